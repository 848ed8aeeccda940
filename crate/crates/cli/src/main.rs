//! `hcap`: generalized mutual information, leakage and capacity of finite
//! channels from the command line.
//!
//! Every subcommand except `gen-channel` prints one JSON run record on
//! stdout. Exit codes: 0 ok, 2 parse or usage error, 3 domain error,
//! 4 solver did not converge.

mod input;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use thiserror::Error;

use hcap_core::capacity::{convergence_trace, grid_oracle, solve, PStep, SolverConfig, Stopping};
use hcap_core::entropy::{arimoto_pair, fehr_berens_pair, hayashi_pair, shannon_pair, EntropyPair};
use hcap_core::fixtures::SplitMix64;
use hcap_core::leakage::{evsi, evsi_scoring, mevsi, mevsi_scoring};
use hcap_core::par::{with_threads, Execution};
use hcap_core::scoring::{Family, ScoringRule};
use hcap_core::variational::FunctionalSpec;
use hcap_core::{Channel, Pmf};

use input::{format_channel, load_channel, load_gain_matrix, parse_numbers, ParseError};
use record::{nums, RunRecord, Units};

#[derive(Parser)]
#[command(name = "hcap", version, about = "Generalized mutual information and H-capacity of finite channels")]
struct Cli {
    /// Report logarithmic quantities in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Leave wall-clock time out of the run record.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// H(X), H(X|Y) and I_H(X;Y) for a channel and prior.
    Mi(MiArgs),
    /// H-capacity by alternating maximization.
    Capacity(CapacityArgs),
    /// Expected value of sample information (additive and multiplicative leakage).
    Leakage(LeakageArgs),
    /// H-capacity by brute-force grid search (at most 4 inputs).
    Oracle(OracleArgs),
    /// Print a seeded random channel in keyed form.
    GenChannel(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Shannon,
    Arimoto,
    Hayashi,
    FehrBerens,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Auto,
    A1,
    A2,
    Numeric,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, value_enum, default_value = "shannon")]
    measure: Measure,
    /// Order of the measure (required except for shannon).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct MiArgs {
    channel: PathBuf,
    /// Comma-separated prior; overrides the file's prior (default uniform).
    #[arg(long)]
    prior: Option<String>,
    #[command(flatten)]
    measure: MeasureArgs,
}

#[derive(Args)]
struct CapacityArgs {
    channel: PathBuf,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "auto")]
    algorithm: Algorithm,
    /// Stop on |dF| < eps * |F| instead of |dF| < eps.
    #[arg(long)]
    relative: bool,
    #[arg(long, default_value_t = 1.0)]
    numeric_step: f64,
    #[arg(long, default_value_t = 100)]
    numeric_iters: usize,
    /// Write the per-iteration objective as tab-separated text.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["gain_matrix", "rule"])))]
struct LeakageArgs {
    channel: PathBuf,
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    gain_matrix: Option<PathBuf>,
    /// log, ps-score, power-score, alpha-score or a `-loss` variant.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    multiplicative: bool,
}

#[derive(Args)]
struct OracleArgs {
    channel: PathBuf,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    /// Worker threads for the grid (0: all cores). Does not change results.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    inputs: usize,
    #[arg(long)]
    outputs: usize,
    /// Also draw a prior (after the rows).
    #[arg(long)]
    with_prior: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Domain(#[from] hcap_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Domain(hcap_core::Error::Diverged { .. }) => 4,
            CliError::Domain(_) => 3,
        }
    }
}

struct Outcome {
    stdout: String,
    code: u8,
    warning: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            code: 0,
            warning: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some(w) = out.warning {
                eprintln!("error: {w}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let units = Units { bits: cli.bits };
    let timing = !cli.no_timing;
    match &cli.command {
        Command::Mi(a) => cmd_mi(a, units, timing),
        Command::Capacity(a) => cmd_capacity(a, units, timing),
        Command::Leakage(a) => cmd_leakage(a, units, timing),
        Command::Oracle(a) => cmd_oracle(a, units, timing),
        Command::GenChannel(a) => cmd_gen(a),
    }
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::Shannon => "shannon",
        Measure::Arimoto => "arimoto",
        Measure::Hayashi => "hayashi",
        Measure::FehrBerens => "fehr-berens",
    }
}

fn order(args: &MeasureArgs) -> Result<f64, CliError> {
    args.alpha
        .ok_or_else(|| CliError::Usage(format!("--alpha is required for measure {}", measure_name(args.measure))))
}

fn pair(args: &MeasureArgs) -> Result<EntropyPair, CliError> {
    Ok(match args.measure {
        Measure::Shannon => shannon_pair(),
        Measure::Arimoto => arimoto_pair(order(args)?)?,
        Measure::Hayashi => hayashi_pair(order(args)?)?,
        Measure::FehrBerens => fehr_berens_pair(order(args)?)?,
    })
}

fn echo_measure(rec: &mut RunRecord, args: &MeasureArgs) {
    rec.config("measure", measure_name(args.measure));
    if let (Some(a), false) = (args.alpha, matches!(args.measure, Measure::Shannon)) {
        rec.config("alpha", record::num(a));
    }
}

fn display(path: &Path) -> Option<String> {
    Some(path.display().to_string())
}

fn prior_for(flag: Option<&str>, file_prior: Option<Pmf>, w: &Channel) -> Result<Pmf, CliError> {
    let prior = match flag {
        Some(text) => {
            let values = parse_numbers(text).map_err(|m| CliError::Usage(format!("--prior: {m}")))?;
            Pmf::new(values).map_err(|e| CliError::Usage(format!("--prior: {e}")))?
        }
        None => file_prior.unwrap_or_else(|| Pmf::uniform(w.inputs())),
    };
    if prior.len() != w.inputs() {
        return Err(CliError::Usage(format!(
            "prior has {} entries but the channel has {} inputs",
            prior.len(),
            w.inputs()
        )));
    }
    Ok(prior)
}

fn cmd_mi(a: &MiArgs, units: Units, timing: bool) -> Result<Outcome, CliError> {
    let mut rec = RunRecord::new("mi", display(&a.channel));
    let file = load_channel(&a.channel)?;
    let p = prior_for(a.prior.as_deref(), file.prior, &file.channel)?;
    echo_measure(&mut rec, &a.measure);
    rec.config("prior", nums(p.as_slice())).config("units", units.name());
    let report = pair(&a.measure)?.mutual_information(&p, &file.channel)?;
    let mut result = Map::new();
    result.insert("h_x".into(), units.num(report.h_x));
    result.insert("h_x_given_y".into(), units.num(report.h_x_given_y));
    result.insert("mi".into(), units.num(report.mi));
    Ok(Outcome::ok(rec.finish(result, timing) + "\n"))
}

fn capacity_spec(a: &CapacityArgs) -> Result<(FunctionalSpec, PStep, &'static str), CliError> {
    let wrong = |alg: &str| {
        Err(CliError::Usage(format!(
            "--algorithm {alg} applies to measure arimoto only, not {}",
            measure_name(a.measure.measure)
        )))
    };
    let numeric = matches!(a.algorithm, Algorithm::Numeric);
    let step = if numeric { PStep::Numeric } else { PStep::Auto };
    Ok(match (a.measure.measure, a.algorithm) {
        (Measure::Arimoto, Algorithm::A1) => (FunctionalSpec::arimoto_a1(order(&a.measure)?)?, PStep::Closed, "a1"),
        (Measure::Arimoto, _) => {
            (FunctionalSpec::arimoto_a2(order(&a.measure)?)?, step, if numeric { "numeric" } else { "a2" })
        }
        (_, Algorithm::A1) => return wrong("a1"),
        (_, Algorithm::A2) => return wrong("a2"),
        (Measure::Shannon, _) => (FunctionalSpec::Shannon, step, if numeric { "numeric" } else { "closed" }),
        (Measure::Hayashi, _) => (FunctionalSpec::hayashi(order(&a.measure)?)?, PStep::Numeric, "numeric"),
        (Measure::FehrBerens, _) => (FunctionalSpec::fehr_berens(order(&a.measure)?)?, PStep::Numeric, "numeric"),
    })
}

fn cmd_capacity(a: &CapacityArgs, units: Units, timing: bool) -> Result<Outcome, CliError> {
    let mut rec = RunRecord::new("capacity", display(&a.channel));
    let w = load_channel(&a.channel)?.channel;
    echo_measure(&mut rec, &a.measure);
    let (spec, p_step, algorithm) = capacity_spec(a)?;
    let mut cfg = SolverConfig::new(spec)
        .epsilon(a.eps)
        .max_iter(a.max_iter)
        .p_step(p_step)
        .stopping(if a.relative { Stopping::Relative } else { Stopping::Absolute });
    cfg.numeric_step = a.numeric_step;
    cfg.numeric_iters = a.numeric_iters;
    rec.config("algorithm", algorithm)
        .config("eps", record::num(a.eps))
        .config("max_iter", a.max_iter)
        .config("stopping", if a.relative { "relative" } else { "absolute" });
    if cfg.resolved_p_step()? == PStep::Numeric {
        rec.config("numeric_step", record::num(a.numeric_step))
            .config("numeric_iters", a.numeric_iters);
    }
    rec.config("units", units.name());
    let r = solve(&cfg, &w)?;
    if let Some(path) = &a.trace {
        let mut text = String::from("k\tF\tdeltaF\n");
        for row in convergence_trace(&r) {
            let delta = row.delta.map(|d| units.num(d).to_string()).unwrap_or_default();
            text.push_str(&format!("{}\t{}\t{}\n", row.k, units.num(row.value), delta));
        }
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let mut result = Map::new();
    result.insert("capacity".into(), units.num(r.capacity));
    result.insert("argmax_p".into(), nums(r.argmax_p.as_slice()));
    result.insert("iterations".into(), Value::from(r.iterations));
    result.insert("converged".into(), Value::Bool(r.converged));
    let mut out = Outcome::ok(rec.finish(result, timing) + "\n");
    if !r.converged {
        out.code = 4;
        out.warning = Some(format!("no convergence within {} iterations", a.max_iter));
    }
    Ok(out)
}

fn cmd_leakage(a: &LeakageArgs, units: Units, timing: bool) -> Result<Outcome, CliError> {
    let mut rec = RunRecord::new("leakage", display(&a.channel));
    let file = load_channel(&a.channel)?;
    let p = prior_for(a.prior.as_deref(), file.prior, &file.channel)?;
    let w = file.channel;
    rec.config("prior", nums(p.as_slice()));
    let mut result = Map::new();
    let (report, logarithmic) = if let Some(path) = &a.gain_matrix {
        let m = load_gain_matrix(path)?;
        rec.config("gain_matrix", path.display().to_string());
        let mut report = evsi(&m, &p, &w)?;
        if a.multiplicative {
            report.multiplicative = Some(mevsi(&m, &p, &w)?);
        }
        (report, false)
    } else {
        let name = a.rule.as_deref().expect("clap enforces one source");
        let rule = ScoringRule::by_name(name, a.alpha)?;
        rec.config("rule", rule.name());
        if let Some(alpha) = rule.alpha() {
            rec.config("alpha", record::num(alpha));
        }
        let mut report = evsi_scoring(&rule, &p, &w)?;
        if a.multiplicative {
            report.multiplicative = Some(mevsi_scoring(&rule, &p, &w)?);
        }
        (report, matches!(rule.family(), Family::Log))
    };
    rec.config("multiplicative", a.multiplicative).config("units", units.name());
    let value = |v: f64| if logarithmic { units.num(v) } else { record::num(v) };
    result.insert("prior_value".into(), value(report.prior_value));
    result.insert("posterior_value".into(), value(report.posterior_value));
    result.insert("additive".into(), value(report.additive));
    if a.multiplicative {
        let m = report.multiplicative.expect("computed above");
        result.insert("multiplicative".into(), units.num(m));
    }
    Ok(Outcome::ok(rec.finish(result, timing) + "\n"))
}

fn cmd_oracle(a: &OracleArgs, units: Units, timing: bool) -> Result<Outcome, CliError> {
    let mut rec = RunRecord::new("oracle", display(&a.channel));
    let w = load_channel(&a.channel)?.channel;
    echo_measure(&mut rec, &a.measure);
    rec.config("resolution", record::num(a.resolution)).config("units", units.name());
    let h = pair(&a.measure)?;
    let r = with_threads(a.jobs, || grid_oracle(&h, &w, a.resolution, Execution::Parallel))?;
    let mut result = Map::new();
    result.insert("capacity".into(), units.num(r.value));
    result.insert("point".into(), nums(r.point.as_slice()));
    Ok(Outcome::ok(rec.finish(result, timing) + "\n"))
}

fn cmd_gen(a: &GenArgs) -> Result<Outcome, CliError> {
    if a.inputs == 0 || a.outputs == 0 {
        return Err(CliError::Usage("--inputs and --outputs must be positive".into()));
    }
    let mut rng = SplitMix64::new(a.seed);
    let w = rng.channel(a.inputs, a.outputs);
    let prior = a.with_prior.then(|| rng.pmf(a.inputs));
    let header = format!("# seed {} ({}x{})\n", a.seed, a.inputs, a.outputs);
    Ok(Outcome::ok(header + &format_channel(&w, prior.as_ref())))
}
