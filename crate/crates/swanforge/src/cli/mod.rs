//! Command-line front end. The only module doing I/O.

pub mod corpus;

use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::charcalc::character_table;
use crate::conjlab::{enumerate_filtrations_with, run_suites, EnumerateOptions, RunOptions, Suite};
use crate::error::{Error, Result};
use crate::exactnum::fmt_rat;
use crate::ramfilt::{conductors, slope_irreducible, CommutatorRule, ValidateOptions};

pub use corpus::{builtin_corpus, corpus_load, load_filtration, load_group};

#[derive(Parser, Debug)]
#[command(name = "swanforge", version, about = "Exact Swan conductor calculus on ramification-filtered finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Additive,
    Sharp,
}

impl From<Rule> for CommutatorRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Additive => CommutatorRule::Additive,
            Rule::Sharp => CommutatorRule::Sharp,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Character table of a group file (or builtin:NAME)
    Table {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Swan and Artin exponents of the irreducibles for a filtration
    Conductors {
        #[arg(long)]
        group: String,
        /// filtration file, or builtin:LABEL for a builtin group
        #[arg(long)]
        filtration: String,
        #[arg(long = "char")]
        character: Option<usize>,
    },
    /// Run verification suites over a corpus
    Verify {
        /// corpus directory with manifest.json, or "builtin"
        #[arg(long, default_value = "builtin")]
        corpus: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        strict_hasse_arf: bool,
        /// commutator axiom used by the enumeration sweep
        #[arg(long, value_enum, default_value = "additive")]
        commutators: Rule,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
    },
    /// Enumerate admissible filtrations of a group
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
        #[arg(long)]
        wild_only: bool,
        #[arg(long, value_enum, default_value = "additive")]
        commutators: Rule,
    },
    /// Quadratic-extension character sweep over a dyadic tower
    Dyadic {
        /// tower file (JSON), or builtin:NAME
        #[arg(long)]
        tower: String,
        #[arg(long, default_value_t = 10)]
        max_swan: u32,
    },
    /// Report on the order-168 group and its 7-dimensional representation
    G2,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "swanforge: {e}");
            e.exit_code()
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Resource(format!("write failed: {e}"))
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Table { group, format } => {
            let g = load_group(&group)?;
            let t = character_table(&g)?;
            match format {
                Format::Json => writeln!(out, "{}", t.to_json()).map_err(io)?,
                Format::Csv => write!(out, "{}", t.to_csv()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Conductors { group, filtration, character } => {
            let opts = ValidateOptions::default();
            let (g, fg) = match filtration.strip_prefix("builtin:") {
                Some(label) => {
                    let name = group.strip_prefix("builtin:").ok_or_else(|| Error::input("builtin filtrations need a builtin group"))?;
                    let e = builtin_corpus(opts)?
                        .into_iter()
                        .find(|e| e.name == name)
                        .ok_or_else(|| Error::input(format!("no builtin group named {name:?}")))?;
                    let fg = e
                        .filtrations
                        .into_iter()
                        .find(|f| f.label() == label)
                        .ok_or_else(|| Error::input(format!("no builtin filtration {label:?} on {name}")))?;
                    (e.group, fg)
                }
                None => {
                    let g = load_group(&group)?;
                    let fg = load_filtration(&g, Path::new(&filtration), opts)?;
                    (g, fg)
                }
            };
            let t = character_table(&g)?;
            let ks: Vec<usize> = match character {
                Some(k) if k < t.len() => vec![k],
                Some(k) => return Err(Error::input(format!("character {k} out of range (table has {})", t.len()))),
                None => (0..t.len()).collect(),
            };
            writeln!(out, "{}", json!({"type": "filtration", "filtration": fg.to_json(), "herbrand": fg.herbrand().to_json()}))
                .map_err(io)?;
            for k in ks {
                let chi = t.irr(k);
                let c = conductors(&fg, chi)?;
                let slope = slope_irreducible(&fg, chi)?;
                let line = json!({"type": "conductors", "character": k, "dim": chi.dim(), "swan": fmt_rat(&c.swan),
                    "artin": fmt_rat(&c.artin), "slope": fmt_rat(&slope)});
                writeln!(out, "{line}").map_err(io)?;
            }
            Ok(0)
        }
        Command::Verify { corpus, suite, jobs, strict_hasse_arf, commutators, max_depth } => {
            let vopts = ValidateOptions { hasse_arf: strict_hasse_arf, commutators: CommutatorRule::Additive };
            let entries = corpus_load(&corpus, vopts)?;
            let opts = RunOptions {
                suites: Suite::parse(&suite)?,
                jobs,
                enumerate: EnumerateOptions { max_depth, wild_only: true, commutators: commutators.into(), ..Default::default() },
                strict_hasse_arf,
                ..Default::default()
            };
            let res = run_suites(&entries, &opts)?;
            out.write_all(res.to_jsonl().as_bytes()).map_err(io)?;
            Ok(res.summary.exit_code)
        }
        Command::Enumerate { group, p, max_depth, wild_only, commutators } => {
            let g = load_group(&group)?;
            let opts = EnumerateOptions { max_depth, wild_only, commutators: commutators.into(), ..Default::default() };
            for f in enumerate_filtrations_with(&g, p, &opts)? {
                writeln!(out, "{}", f.to_json()).map_err(io)?;
            }
            Ok(0)
        }
        Command::Dyadic { tower, max_swan } => {
            let t = crate::dyadic::load_tower(&tower)?;
            let rep = crate::dyadic::two_dim_report(&t, max_swan)?;
            write!(out, "{}", rep.to_jsonl()).map_err(io)?;
            Ok(rep.exit_code())
        }
        Command::G2 => {
            let rep = crate::g2case::g2_verify()?;
            writeln!(out, "{}", rep.to_json()).map_err(io)?;
            Ok(if rep.all_pass() { 0 } else { 2 })
        }
    }
}
