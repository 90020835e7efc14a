//! Command implementations behind the `fflab` binary.
//!
//! Every command writes one JSON document (or JSON lines for `search`) to the
//! given writer and reports failures as [`Error`]; [`exit_code`] maps those
//! onto the process status.

pub mod search;

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use fflab_core::freiman::{analyze, base_change, verify_theorem, AnalysisOptions, VerifyOptions};
use fflab_core::json::{envelope, Instance};
use fflab_core::reports::{bridge_report, kneser_mod_report, rr_model, rr_report};
use fflab_core::{BaseField, Error, Result};
use serde_json::{json, Value};

use crate::search::{run_search, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_ASSERTION
    }
}

#[derive(Debug, Parser)]
#[command(name = "fflab", version, about = "Products of subspaces in function fields and the 3k-4 bridge")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the genus and codimension conclusions on an instance file.
    Verify {
        /// Instance JSON file.
        #[arg(value_name = "INSTANCE")]
        path: std::path::PathBuf,
    },
    /// Compare a set of integers with its monomial subspace.
    Bridge {
        /// Comma-separated integers, e.g. 0,1,2,3,5.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        /// Base field characteristic; 0 means Q.
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u32,
    },
    /// Seeded random search; one JSON line per trial.
    Search(SearchArgs),
    /// Riemann-Roch basis of L(n P_inf) and the dimension table up to n.
    Rr {
        #[arg(long, default_value_t = 0)]
        genus: usize,
        #[arg(long)]
        n: i64,
        #[arg(long = "char", default_value_t = 101)]
        characteristic: u32,
        /// Right-hand side f(x) of y^2 = f(x); defaults to a fixed curve of the given genus.
        #[arg(long)]
        curve: Option<String>,
    },
    /// Pivot, stabilizer and bound reports for an instance.
    Stabilizer {
        #[arg(long)]
        instance: std::path::PathBuf,
    },
    /// Stabilizer of A + A in Z/nZ.
    KneserMod {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long = "mod")]
        modulus: u64,
    },
    /// Full analysis including evaluation at a split fibre.
    EvalReport {
        #[arg(long)]
        instance: std::path::PathBuf,
        /// Extend the prime field to F_{p^ext} first.
        #[arg(long)]
        ext: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// 0 means Q.
    #[arg(long = "char", default_value_t = 101)]
    pub characteristic: u32,
    #[arg(long, default_value_t = 1)]
    pub ext: usize,
    #[arg(long, default_value_t = 0)]
    pub genus: usize,
    /// Inclusive range `min,max` for dim S.
    #[arg(long, default_value = "3,8", value_parser = parse_range)]
    pub k_range: (usize, usize),
    /// Inclusive range `min,max` for the codimension in the ambient L(n P_inf).
    #[arg(long, default_value = "0,3", value_parser = parse_range)]
    pub codim_range: (usize, usize),
}

impl SearchArgs {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            trials: self.trials,
            char: self.characteristic,
            ext: self.ext,
            genus: self.genus,
            k_range: self.k_range,
            codim_range: self.codim_range,
        }
    }
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected min,max, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Instance::parse(&text)
}

fn write_doc(out: &mut dyn Write, v: &Value) -> Result<()> {
    let s = serde_json::to_string_pretty(v).expect("values serialize");
    writeln!(out, "{s}").map_err(|e| Error::Config(format!("write failed: {e}")))
}

pub fn cmd_verify(path: &Path, out: &mut dyn Write) -> Result<()> {
    let inst = read_instance(path)?;
    let opts = VerifyOptions { normalize: inst.options.normalize, assert: inst.options.assert };
    let r = verify_theorem(&inst.span(), opts)?;
    write_doc(out, &envelope("theorem", r.to_json(), Some(&inst)))
}

pub fn cmd_bridge(set: &str, p: u32, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let body = bridge_report(set, p)?;
    if let Some(n) = body["A"].as_array().map(Vec::len).filter(|&n| n < 3) {
        let _ = writeln!(err, "note: |A| = {n} < 3; the 3k-4 verification does not apply, report only");
    }
    write_doc(out, &envelope("bridge", body, None))
}

pub fn cmd_search(cfg: &SearchConfig, out: &mut dyn Write) -> Result<()> {
    let summary = run_search(cfg, |line| writeln!(out, "{line}"))?;
    match summary.assertion_at {
        Some(i) => Err(Error::Assertion(format!("trial {i} violated an assertion; reproducer emitted above"))),
        None => Ok(()),
    }
}

pub fn cmd_rr(genus: usize, n: i64, p: u32, curve: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let m = rr_model(genus, p, curve)?;
    write_doc(out, &envelope("rr", rr_report(&m, n)?, None))
}

pub fn cmd_stabilizer(path: &Path, out: &mut dyn Write) -> Result<()> {
    let inst = read_instance(path)?;
    let a = analyze(&inst.span(), AnalysisOptions { assert: inst.options.assert, evaluation: false })?;
    write_doc(out, &envelope("stabilizer", a.to_json()?, Some(&inst)))
}

pub fn cmd_kneser_mod(set: &str, n: u64, out: &mut dyn Write) -> Result<()> {
    write_doc(out, &envelope("kneser-mod", kneser_mod_report(set, n)?, None))
}

pub fn cmd_eval_report(path: &Path, ext: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let inst = read_instance(path)?;
    let mut s = inst.span();
    if let Some(e) = ext {
        let k = s.model().field();
        if !k.is_finite() || k.ext_degree() != 1 {
            return Err(Error::Config("--ext needs an instance over a prime field".into()));
        }
        s = base_change(&s, BaseField::finite(k.characteristic(), e)?)?;
    }
    let a = analyze(&s, AnalysisOptions { assert: inst.options.assert, evaluation: true })?;
    let mut body = a.to_json()?;
    body["field"] = json!(s.model().field().to_string());
    write_doc(out, &envelope("eval-report", body, Some(&inst)))
}

/// Run a parsed command line; returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match &cli.command {
        Command::Verify { path } => cmd_verify(path, out),
        Command::Bridge { set, characteristic } => cmd_bridge(set, *characteristic, out, err),
        Command::Search(a) => cmd_search(&a.config(), out),
        Command::Rr { genus, n, characteristic, curve } => cmd_rr(*genus, *n, *characteristic, curve.as_deref(), out),
        Command::Stabilizer { instance } => cmd_stabilizer(instance, out),
        Command::KneserMod { set, modulus } => cmd_kneser_mod(set, *modulus, out),
        Command::EvalReport { instance, ext } => cmd_eval_report(instance, *ext, out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
