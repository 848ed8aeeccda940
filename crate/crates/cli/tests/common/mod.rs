//! Golden-file cases for the `hcap` binary.
//!
//! Each case runs from `tests/fixtures` and is compared byte for byte with
//! `tests/golden/<name>.golden` (exit code, stdout, stderr) and, for cases
//! that write a trace, `tests/golden/<name>.trace.tsv`. Set `HCAP_BLESS=1`
//! to rewrite the golden files.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

const fn case(name: &'static str, code: i32, args: &'static [&'static str]) -> Case {
    Case { name, args, code }
}

pub const TRACE: &str = "{trace}";

pub const CASES: &[Case] = &[
    case("mi_shannon", 0, &["--no-timing", "mi", "bsc.chan"]),
    case("mi_arimoto_bits", 0, &["--no-timing", "--bits", "mi", "bsc_delimited.txt", "--measure", "arimoto", "--alpha", "2"]),
    case("mi_hayashi_prior", 0, &["--no-timing", "mi", "random3.chan", "--measure", "hayashi", "--alpha", "0.5", "--prior", "0.2,0.3,0.5"]),
    case("mi_independent", 0, &["--no-timing", "mi", "independent.chan", "--measure", "fehr-berens", "--alpha", "2"]),
    case("mi_fb_bad_alpha", 3, &["--no-timing", "mi", "bsc.chan", "--measure", "fehr-berens", "--alpha", "0.5"]),
    case("mi_missing_alpha", 2, &["--no-timing", "mi", "bsc.chan", "--measure", "hayashi"]),
    case("mi_malformed", 2, &["--no-timing", "mi", "malformed.chan"]),
    case("mi_missing_file", 2, &["--no-timing", "mi", "nonexistent.chan"]),
    case("mi_prior_mismatch", 2, &["--no-timing", "mi", "bsc.chan", "--prior", "0.2,0.3,0.5"]),
    case("capacity_shannon", 0, &["--no-timing", "capacity", "bsc.chan", "--eps", "1e-12", "--trace", TRACE]),
    case("capacity_random_shannon", 0, &["--no-timing", "capacity", "random3.chan", "--eps", "1e-12", "--trace", TRACE]),
    case("capacity_arimoto_a1", 0, &["--no-timing", "capacity", "random3.chan", "--measure", "arimoto", "--alpha", "2", "--algorithm", "a1"]),
    case("capacity_arimoto_a2", 0, &["--no-timing", "capacity", "random3.chan", "--measure", "arimoto", "--alpha", "2", "--algorithm", "a2"]),
    case("capacity_arimoto_auto", 0, &["--no-timing", "capacity", "identity2.chan", "--measure", "arimoto", "--alpha", "2"]),
    case("capacity_arimoto_numeric", 0, &["--no-timing", "capacity", "random3.chan", "--measure", "arimoto", "--alpha", "0.5", "--algorithm", "numeric"]),
    case("capacity_hayashi", 0, &["--no-timing", "capacity", "random3.chan", "--measure", "hayashi", "--alpha", "2", "--trace", TRACE]),
    case("capacity_fehr_berens", 0, &["--no-timing", "--bits", "capacity", "random3.chan", "--measure", "fehr-berens", "--alpha", "3"]),
    case("capacity_relative", 0, &["--no-timing", "capacity", "random3.chan", "--eps", "1e-6", "--relative"]),
    case("capacity_not_converged", 4, &["--no-timing", "capacity", "random3.chan", "--max-iter", "3", "--eps", "1e-12"]),
    case("capacity_bad_eps", 3, &["--no-timing", "capacity", "bsc.chan", "--eps", "2"]),
    case("capacity_a1_for_shannon", 2, &["--no-timing", "capacity", "bsc.chan", "--algorithm", "a1"]),
    case("leakage_gain_matrix", 0, &["--no-timing", "leakage", "bsc.chan", "--gain-matrix", "identity_gain.mat", "--multiplicative"]),
    case("leakage_log", 0, &["--no-timing", "leakage", "bsc.chan", "--rule", "log"]),
    case("leakage_alpha_score", 0, &["--no-timing", "leakage", "bsc.chan", "--rule", "alpha-score", "--alpha", "2", "--multiplicative"]),
    case("leakage_power_loss", 0, &["--no-timing", "leakage", "random3.chan", "--rule", "power-loss", "--alpha", "3"]),
    case("leakage_mixed_sign", 3, &["--no-timing", "leakage", "bsc.chan", "--gain-matrix", "mixed_gain.mat", "--multiplicative"]),
    case("leakage_no_source", 2, &["--no-timing", "leakage", "bsc.chan"]),
    case("oracle_bsc", 0, &["--no-timing", "oracle", "bsc.chan", "--measure", "arimoto", "--alpha", "2"]),
    case("oracle_random_jobs1", 0, &["--no-timing", "oracle", "random3.chan", "--measure", "hayashi", "--alpha", "2", "--resolution", "0.01", "--jobs", "1"]),
    case("oracle_random_jobs2", 0, &["--no-timing", "oracle", "random3.chan", "--measure", "hayashi", "--alpha", "2", "--resolution", "0.01", "--jobs", "2"]),
    case("oracle_too_large", 3, &["--no-timing", "oracle", "five_inputs.chan", "--resolution", "0.1"]),
    case("gen_channel", 0, &["gen-channel", "--seed", "20261016", "--inputs", "3", "--outputs", "3"]),
];

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_dir() -> PathBuf {
    crate_dir().join("tests/golden")
}

fn bless() -> bool {
    std::env::var_os("HCAP_BLESS").is_some_and(|v| v != "0")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub trace: Option<String>,
}

pub fn run(case: &Case) -> Run {
    let trace_path = std::env::temp_dir().join(format!("hcap-{}-{}.tsv", std::process::id(), case.name));
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| if *a == TRACE { trace_path.display().to_string() } else { a.to_string() })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_hcap"))
        .args(&args)
        .current_dir(crate_dir().join("tests/fixtures"))
        .output()
        .expect("hcap binary runs");
    let trace = case.args.contains(&TRACE).then(|| {
        let text = std::fs::read_to_string(&trace_path).unwrap_or_default();
        let _ = std::fs::remove_file(&trace_path);
        text
    });
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        trace,
    }
}

fn render(run: &Run) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", run.code, run.stdout, run.stderr)
}

fn compare(path: &Path, actual: &str) -> Result<(), String> {
    if bless() {
        std::fs::write(path, actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != actual {
        return Err(format!("{} differs:\n--- expected\n{expected}--- actual\n{actual}", path.display()));
    }
    Ok(())
}

/// Runs one case and checks it against its golden files.
pub fn check(case: &Case) -> Result<(), String> {
    let run = run(case);
    if run.code != case.code {
        return Err(format!("{}: exit {} (expected {})\n{}", case.name, run.code, case.code, run.stderr));
    }
    compare(&golden_dir().join(format!("{}.golden", case.name)), &render(&run))?;
    if let Some(trace) = &run.trace {
        compare(&golden_dir().join(format!("{}.trace.tsv", case.name)), trace)?;
    }
    Ok(())
}
