use std::fs;

use serde_json::Value;
use swanforge::cli::dispatch;

fn sf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("swanforge").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

#[test]
fn help_and_bad_usage() {
    let (code, out, _) = sf(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("conductors"));
    assert_eq!(sf(&["frobnicate"]).0, 3);
    assert_eq!(sf(&["table"]).0, 3);
}

#[test]
fn table_formats() {
    let (code, out, _) = sf(&["table", "--group", "builtin:Q8"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v.is_object());
    let (code, csv, _) = sf(&["table", "--group", "builtin:S3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(csv.lines().count() >= 3);
}

#[test]
fn unknown_group_is_input_error() {
    let (code, _, err) = sf(&["table", "--group", "builtin:NoSuchGroup"]);
    assert_eq!(code, 3);
    assert!(err.contains("NoSuchGroup"));
    assert_eq!(sf(&["table", "--group", "/nonexistent/group.json"]).0, 3);
}

#[test]
fn builtin_conductors() {
    let (code, out, _) = sf(&["conductors", "--group", "builtin:Q8", "--filtration", "builtin:breaks1,3"]);
    assert_eq!(code, 0);
    let ls = lines(&out);
    assert_eq!(ls[0]["type"], "filtration");
    let mut sw: Vec<String> = ls[1..].iter().map(|l| l["swan"].as_str().unwrap().to_string()).collect();
    sw.sort();
    assert_eq!(sw, ["0", "1", "1", "1", "3"]);
    let (code, out, _) =
        sf(&["conductors", "--group", "builtin:Q8", "--filtration", "builtin:breaks1,3", "--char", "4"]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out).len(), 2);
    assert_eq!(sf(&["conductors", "--group", "builtin:Q8", "--filtration", "builtin:breaks1,3", "--char", "9"]).0, 3);
}

#[test]
fn enumerate_c2() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("c2.json");
    fs::write(&g, r#"{"name": "C2", "degree": 2, "generators": [[1, 0]]}"#).unwrap();
    let (code, out, _) = sf(&["enumerate", "--group", g.to_str().unwrap(), "--p", "2", "--max-depth", "2", "--wild-only"]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out).len(), 2);
}

#[test]
fn file_corpus_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::write(root.join("q8.json"), r#"{"family": "quaternion", "params": {"order": 8}}"#).unwrap();
    let (code, out, _) = sf(&["table", "--group", root.join("q8.json").to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    fs::write(
        root.join("manifest.json"),
        r#"{"entries": [{"name": "C4", "group": {"name": "C4", "degree": 4, "generators": [[1, 2, 3, 0]]},
            "filtrations": ["c4.json"]}]}"#,
    )
    .unwrap();
    // G_0 = G_1 = C4, G_2 = C2, then trivial
    fs::write(root.join("c4.json"), r#"{"p": 2, "jumps": [{"i": 0, "generators": [1]}, {"i": 2, "generators": [2]}, {"i": 3, "generators": []}]}"#)
        .unwrap();
    let (code, out, err) = sf(&["verify", "--corpus", root.to_str().unwrap(), "--suite", "p2weak", "--max-depth", "3"]);
    assert_eq!(code, 0, "{err}");
    assert!(!out.is_empty());
}

#[test]
fn missing_corpus_and_bad_suite() {
    assert_eq!(sf(&["verify", "--corpus", "/nonexistent/corpus"]).0, 3);
    assert_eq!(sf(&["verify", "--suite", "bogus"]).0, 3);
}

#[test]
fn dyadic_and_g2() {
    let (code, out, _) = sf(&["dyadic", "--tower", "builtin:Q2(i)", "--max-swan", "4"]);
    assert_eq!(code, 0);
    assert!(!lines(&out).is_empty());
    assert_eq!(sf(&["dyadic", "--tower", "builtin:Q3(x)"]).0, 3);
    let (code, out, _) = sf(&["g2"]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out)[0]["type"], "g2");
}
