//! The builtin corpus and the manifest loader.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use crate::conjlab::CorpusEntry;
use crate::error::{Error, Result};
use crate::groupcore::{
    cyclic, dihedral, elementary_abelian, extraspecial, g2_i, g2_i0, g2_translations, group_from_spec,
    heisenberg_p3, pauli, quaternion, semidihedral, semidirect_product, Group, GroupSpec, Subgroup,
};
use crate::ramfilt::{filtration_from_spec, FilteredGroup, FiltrationSpec, ValidateOptions};

/// First normal subgroup (in the group's canonical order) satisfying `pred`.
fn normal_where(g: &Arc<Group>, pred: impl Fn(&Subgroup) -> bool) -> Result<Subgroup> {
    g.normal_subgroups()
        .into_iter()
        .find(|s| pred(s))
        .ok_or_else(|| Error::input(format!("no matching normal subgroup in {}", g.name())))
}

fn of_order(g: &Arc<Group>, n: usize) -> Result<Subgroup> {
    normal_where(g, |s| s.order() == n)
}

fn cyclic_of_order(g: &Arc<Group>, n: usize) -> Result<Subgroup> {
    normal_where(g, |s| s.order() == n && s.is_cyclic())
}

fn filt(g: &Arc<Group>, p: usize, label: &str, jumps: Vec<(usize, Subgroup)>, opts: ValidateOptions) -> Result<FilteredGroup> {
    Ok(FilteredGroup::new(g, p, &jumps, opts)?.with_label(label))
}

fn entry(name: &str, group: Arc<Group>, filtrations: Vec<FilteredGroup>) -> CorpusEntry {
    CorpusEntry { name: name.to_string(), group, filtrations, sweep: true }
}

/// The builtin corpus. Named filtrations failing a strict Hasse–Arf check are
/// dropped in strict mode.
pub fn builtin_corpus(opts: ValidateOptions) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let keep = |r: Result<FilteredGroup>| -> Result<Option<FilteredGroup>> {
        match r {
            Ok(f) => Ok(Some(f)),
            Err(Error::Validation { axiom, .. }) if opts.hasse_arf && axiom == "Hasse-Arf" => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut push = |name: &str, g: Arc<Group>, fs: Vec<Result<FilteredGroup>>| -> Result<()> {
        let mut kept = Vec::new();
        for f in fs {
            if let Some(f) = keep(f)? {
                kept.push(f);
            }
        }
        out.push(entry(name, g, kept));
        Ok(())
    };

    let c2 = cyclic(2)?;
    push(
        "C2",
        c2.clone(),
        vec![
            filt(&c2, 2, "break1", vec![(0, c2.whole()), (2, c2.trivial())], opts),
            filt(&c2, 2, "break3", vec![(0, c2.whole()), (4, c2.trivial())], opts),
        ],
    )?;
    let c4 = cyclic(4)?;
    let c4_2 = of_order(&c4, 2)?;
    push(
        "C4",
        c4.clone(),
        vec![
            filt(&c4, 2, "breaks1,3", vec![(0, c4.whole()), (2, c4_2.clone()), (4, c4.trivial())], opts),
            filt(&c4, 2, "breaks1,5", vec![(0, c4.whole()), (2, c4_2), (6, c4.trivial())], opts),
        ],
    )?;
    let v4 = elementary_abelian(2, 2)?;
    let v4_2 = of_order(&v4, 2)?;
    push(
        "C2xC2",
        v4.clone(),
        vec![
            filt(&v4, 2, "breaks1", vec![(0, v4.whole()), (2, v4.trivial())], opts),
            filt(&v4, 2, "breaks1,3", vec![(0, v4.whole()), (2, v4_2), (4, v4.trivial())], opts),
        ],
    )?;
    let q8 = quaternion(8)?;
    let z = q8.center();
    push(
        "Q8",
        q8.clone(),
        vec![filt(&q8, 2, "breaks1,3", vec![(0, q8.whole()), (2, z), (4, q8.trivial())], opts)],
    )?;
    let d4 = dihedral(4)?;
    let z = d4.center();
    push("D4", d4.clone(), vec![filt(&d4, 2, "breaks1,2", vec![(0, d4.whole()), (2, z), (3, d4.trivial())], opts)])?;
    for (name, g) in [("SD16", semidihedral(16)?), ("Q16", quaternion(16)?)] {
        let c8 = cyclic_of_order(&g, 8)?;
        let c4 = cyclic_of_order(&g, 4)?;
        let c2 = of_order(&g, 2)?;
        let f = filt(&g, 2, "breaks1,2,3,4", vec![(0, g.whole()), (2, c8), (3, c4), (4, c2), (5, g.trivial())], opts);
        push(name, g.clone(), vec![f])?;
    }
    for (name, minus) in [("ext32+", false), ("ext32-", true)] {
        let g = extraspecial(2, 2, minus)?;
        let z = g.center();
        let f = filt(&g, 2, "breaks1,2", vec![(0, g.whole()), (2, z), (3, g.trivial())], opts);
        push(name, g.clone(), vec![f])?;
    }
    let pl = pauli(1)?;
    let z2 = of_order(&pl, 2)?;
    push("Pauli16", pl.clone(), vec![filt(&pl, 2, "breaks1,2", vec![(0, pl.whole()), (2, z2), (3, pl.trivial())], opts)])?;
    let h27 = heisenberg_p3(3)?;
    let z = h27.center();
    push("Heis27", h27.clone(), vec![filt(&h27, 3, "breaks1,2", vec![(0, h27.whole()), (2, z), (3, h27.trivial())], opts)])?;
    let m27 = extraspecial(3, 1, true)?;
    let z = m27.center();
    push("3^1+2-", m27.clone(), vec![filt(&m27, 3, "breaks1,2", vec![(0, m27.whole()), (2, z), (3, m27.trivial())], opts)])?;
    let s3 = dihedral(3)?;
    let c3 = of_order(&s3, 3)?;
    push("S3", s3.clone(), vec![filt(&s3, 3, "tame2,break0", vec![(0, s3.whole()), (1, c3), (2, s3.trivial())], opts)])?;
    let c3c4 = semidirect_product(&cyclic(3)?, &cyclic(4)?, &[vec![0, 2, 1]])?;
    let c3 = of_order(&c3c4, 3)?;
    push(
        "C3:C4",
        c3c4.clone(),
        vec![
            filt(&c3c4, 3, "tame4,break0", vec![(0, c3c4.whole()), (1, c3.clone()), (2, c3c4.trivial())], opts),
            filt(&c3c4, 3, "tame4,break2", vec![(0, c3c4.whole()), (1, c3), (3, c3c4.trivial())], opts),
        ],
    )?;
    let c9 = cyclic(9)?;
    let c9_3 = of_order(&c9, 3)?;
    push(
        "C9",
        c9.clone(),
        vec![
            filt(&c9, 3, "breaks1,4", vec![(0, c9.whole()), (2, c9_3.clone()), (5, c9.trivial())], opts),
            filt(&c9, 3, "breaks2,8", vec![(0, c9.whole()), (3, c9_3), (9, c9.trivial())], opts),
        ],
    )?;
    let i0 = g2_i0()?;
    let j = g2_translations(&i0);
    push("I0", i0.clone(), vec![filt(&i0, 2, "tame7,break1", vec![(0, i0.whole()), (1, j), (2, i0.trivial())], opts)])?;
    push("I", g2_i()?, vec![])?;
    // larger groups used only by the Heisenberg-pair checks
    let mut e128 = entry("ext128+", extraspecial(2, 3, false)?, vec![]);
    e128.sweep = false;
    out.push(e128);
    let mut p64 = entry("Pauli64", pauli(2)?, vec![]);
    p64.sweep = false;
    out.push(p64);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Manifest

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    entries: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    name: String,
    /// path to a group file, or an inline group description
    group: Value,
    #[serde(default)]
    filtrations: Vec<String>,
    #[serde(default = "yes")]
    sweep: bool,
}

fn yes() -> bool {
    true
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::input(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))
}

/// Group from a file path or `builtin:NAME`.
pub fn load_group(spec: &str) -> Result<Arc<Group>> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_corpus(ValidateOptions::default())?
            .into_iter()
            .find(|e| e.name == name)
            .map(|e| e.group)
            .ok_or_else(|| Error::input(format!("no builtin group named {name:?}")));
    }
    let path = Path::new(spec);
    let text = read(path)?;
    let gs: GroupSpec = parse(path, &text)?;
    group_from_spec(&gs).map_err(|e| context(path, e))
}

fn context(path: &Path, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        Error::Validation { axiom, detail } => Error::Validation { axiom, detail: format!("{}: {detail}", path.display()) },
        other => other,
    }
}

pub fn load_filtration(g: &Arc<Group>, path: &Path, opts: ValidateOptions) -> Result<FilteredGroup> {
    let text = read(path)?;
    let spec: FiltrationSpec = parse(path, &text)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
    Ok(filtration_from_spec(g, &spec, opts).map_err(|e| context(path, e))?.with_label(label))
}

/// `builtin` or a directory containing `manifest.json`.
pub fn corpus_load(dir: &str, opts: ValidateOptions) -> Result<Vec<CorpusEntry>> {
    if dir == "builtin" {
        return builtin_corpus(opts);
    }
    let root = PathBuf::from(dir);
    let mpath = root.join("manifest.json");
    let text = read(&mpath)?;
    let m: ManifestFile = parse(&mpath, &text)?;
    let mut out = Vec::new();
    for e in m.entries {
        let group = match &e.group {
            Value::String(f) => {
                let p = root.join(f);
                let t = read(&p)?;
                let gs: GroupSpec = parse(&p, &t)?;
                group_from_spec(&gs).map_err(|err| context(&p, err))?
            }
            v => {
                let gs: GroupSpec = serde_json::from_value(v.clone())
                    .map_err(|err| Error::input(format!("{}: entry {}: {err}", mpath.display(), e.name)))?;
                group_from_spec(&gs)?
            }
        };
        let filtrations = e
            .filtrations
            .iter()
            .map(|f| load_filtration(&group, &root.join(f), opts))
            .collect::<Result<Vec<_>>>()?;
        out.push(CorpusEntry { name: e.name, group, filtrations, sweep: e.sweep });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_enough_groups() {
        let c = builtin_corpus(ValidateOptions::default()).unwrap();
        assert!(c.len() >= 12);
        assert!(c.iter().any(|e| e.name == "Q8" && e.filtrations.len() == 1));
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = std::env::temp_dir().join("swanforge-empty-manifest-test");
        std::fs::create_dir_all(&dir).unwrap();
        assert!(matches!(corpus_load(dir.to_str().unwrap(), ValidateOptions::default()), Err(Error::Input(_))));
    }
}
