//! Command-line front end.
//!
//! Every subcommand validates all of its flags up front and reports every
//! problem in one message before touching any data. Reports go to stdout (or
//! `--output`) as CSV or JSON; human-readable summaries go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{cdf_trials, put_sweep, summarize};
use crate::io::{emit, joint_to_json, mechanism_to_json, read_joint, render, write_file, Cell, Format, Table};
use crate::lift::{AlphaParam, LiftProfile};
use crate::oracle::{verify_strict_tradeoff, verify_merged_lift_bound};
use crate::probability::{example_joint, JointDistribution, ValidateOptions, DEFAULT_TOL};
use crate::relaxation::RelaxationConfig;
use crate::watchdog::{apply_mechanism, attainable, optimal_leakage, x_invariant_mechanism, WatchdogPartition};

#[derive(Debug, Parser)]
#[command(name = "alpha-watchdog", version, about = "α-lift leakage analysis and watchdog sanitization")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads for trials and samples (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-symbol α-lifts, Sibson MI, max Sibson MI and max log-lift.
    Analyze(AnalyzeArgs),
    /// Split X into low- and high-risk symbols at threshold ε.
    Partition(PartitionArgs),
    /// Build the X-invariant mechanism and the sanitized joint.
    Sanitize(SanitizeArgs),
    /// Randomized check that no watchdog mechanism beats the merged lift.
    Verify(VerifyArgs),
    /// Privacy-utility sweep along the α-lift ordering.
    PutSweep(PutSweepArgs),
    /// Monte-Carlo comparison of δ-refinement and α-lift relaxation.
    CompareRelax(CompareRelaxArgs),
    /// α-lifts of the built-in two-secret example over a grid of p(S=1).
    ExampleSurface(SurfaceArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Joint distribution p(s,x), JSON or CSV (by extension).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Rescale the pmf when it does not sum to 1.
    #[arg(long)]
    pub renormalize: bool,
    /// Drop rows and columns with zero marginal instead of failing.
    #[arg(long)]
    pub drop_dead_symbols: bool,
    /// Normalization tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Order α (> 1, or `inf`); repeatable.
    #[arg(short, long, required = true)]
    pub alpha: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(short, long)]
    pub alpha: String,
    /// Threshold on ln ℓ_α(x), in nats.
    #[arg(short, long)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct SanitizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(short, long)]
    pub alpha: String,
    #[arg(short, long)]
    pub epsilon: f64,
    /// Report whether this log-lift target is attainable.
    #[arg(long)]
    pub eps_prime: Option<f64>,
    /// Output distribution R over the high-risk symbols (default uniform).
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// Where to write the mechanism JSON.
    #[arg(long)]
    pub mechanism_out: PathBuf,
    /// Where to write the sanitized (S,Y) joint JSON.
    #[arg(long)]
    pub sanitized_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Repeatable.
    #[arg(short, long, required = true)]
    pub alpha: Vec<String>,
    #[arg(short, long)]
    pub epsilon: f64,
    /// Random mechanisms per α.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PutSweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Repeatable.
    #[arg(short, long, required = true)]
    pub alpha: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompareRelaxArgs {
    #[arg(long, default_value_t = 5000)]
    pub trials: usize,
    #[arg(long, default_value_t = 15)]
    pub num_s: usize,
    #[arg(long, default_value_t = 20)]
    pub num_x: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps_bar: f64,
    #[arg(short, long, default_value = "10")]
    pub alpha: String,
    #[arg(short, long, default_value_t = 0.45)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 4.0)]
    pub eps_max: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(short, long, default_value = "2")]
    pub alpha: String,
    /// Grid points; ρ_k = (k + 1/2) / steps.
    #[arg(long, default_value_t = 1000)]
    pub rho_steps: usize,
}

/// Accumulates validation problems so they can be reported together.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn alpha(&mut self, raw: &str) -> Option<AlphaParam> {
        match raw.parse::<AlphaParam>() {
            Ok(a) => Some(a),
            Err(e) => {
                self.0.push(format!("--alpha {raw}: {e}"));
                None
            }
        }
    }

    fn alphas(&mut self, raw: &[String]) -> Vec<AlphaParam> {
        raw.iter().filter_map(|a| self.alpha(a)).collect()
    }

    fn require(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.0.push(msg.into());
        }
    }

    fn input(&mut self, args: &InputArgs) -> ValidateOptions {
        let tol = args.tol.unwrap_or(DEFAULT_TOL);
        self.require(tol.is_finite() && tol > 0.0, format!("--tol must be finite and > 0, got {tol}"));
        ValidateOptions {
            tol,
            renormalize: args.renormalize,
            drop_dead_symbols: args.drop_dead_symbols,
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(self.0.join("; ")))
        }
    }
}

fn positive_epsilon(p: &mut Problems, eps: f64) {
    p.require(
        eps.is_finite() && eps > 0.0,
        format!("--epsilon must be finite and > 0, got {eps}"),
    );
}

/// Parses arguments, runs the subcommand and maps the outcome to an exit
/// code: 0 on success, 1 when `verify` finds a violation, 2 on any error.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Error::ViolationFound(v)) => {
            eprintln!("violation: {v}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidConfig("--jobs must be >= 1".into()));
        }
        // a second call in the same process (tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Analyze(a) => analyze(a, cli.format, out),
        Command::Partition(a) => partition(a, cli.format, out),
        Command::Sanitize(a) => sanitize(a, cli.format, out),
        Command::Verify(a) => verify(a, cli.format, out),
        Command::PutSweep(a) => sweep(a, cli.format, out),
        Command::CompareRelax(a) => compare_relax(a, cli.format, out),
        Command::ExampleSurface(a) => surface(a, cli.format, out),
    }
}

fn load(args: &InputArgs, opts: ValidateOptions) -> Result<JointDistribution> {
    read_joint(&args.input, opts)
}

fn analyze(args: &AnalyzeArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let opts = p.input(&args.input);
    let alphas = p.alphas(&args.alpha);
    p.finish()?;
    let joint = load(&args.input, opts)?;

    let mut lifts = Table::new("alpha_lift", &["alpha", "x", "p_x", "alpha_lift", "log_alpha_lift"]);
    let mut summary = Table::new(
        "summary",
        &["alpha", "argmax_x", "max_alpha_lift", "sibson_mi", "max_sibson_mi", "max_log_lift"],
    );
    for &alpha in &alphas {
        let prof = LiftProfile::new(&joint, alpha);
        for (x, label) in joint.x_labels().iter().enumerate() {
            lifts.push(vec![
                alpha.to_string().into(),
                label.as_str().into(),
                joint.p_x()[x].into(),
                prof.alpha_lift()[x].into(),
                prof.log_alpha_lift()[x].into(),
            ]);
        }
        let (arg, best) = prof.max_alpha_lift();
        summary.push(vec![
            alpha.to_string().into(),
            joint.x_labels()[arg].as_str().into(),
            best.into(),
            prof.sibson_mi(&joint).into(),
            prof.max_sibson_mi().into(),
            prof.max_log_lift().into(),
        ]);
    }
    emit(out, &render(&[lifts, summary], format))?;
    Ok(ExitCode::SUCCESS)
}

fn partition(args: &PartitionArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let opts = p.input(&args.input);
    let alpha = p.alpha(&args.alpha);
    positive_epsilon(&mut p, args.epsilon);
    p.finish()?;
    let alpha = alpha.expect("validated");
    let joint = load(&args.input, opts)?;
    let part = WatchdogPartition::by_threshold(&joint, alpha, args.epsilon)?;

    let mut t = Table::new("partition", &["x", "p_x", "alpha_lift", "log_alpha_lift", "risk"]);
    for (x, label) in joint.x_labels().iter().enumerate() {
        t.push(vec![
            label.as_str().into(),
            joint.p_x()[x].into(),
            part.alpha_lift()[x].into(),
            part.log_alpha_lift()[x].into(),
            if part.is_high_risk(x) { "high" } else { "low" }.into(),
        ]);
    }
    match part.merged_lift() {
        Some(m) => eprintln!(
            "{} high-risk symbol(s), mass {:.6}, merged lift {:.6}",
            part.high_risk().len(),
            part.high_risk_mass(),
            m
        ),
        None => eprintln!("no high-risk symbols"),
    }
    emit(out, &render(&[t], format))?;
    Ok(ExitCode::SUCCESS)
}

fn sanitize(args: &SanitizeArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let opts = p.input(&args.input);
    let alpha = p.alpha(&args.alpha);
    positive_epsilon(&mut p, args.epsilon);
    if let Some(e) = args.eps_prime {
        p.require(!e.is_nan(), "--eps-prime is NaN");
    }
    p.require(
        args.mechanism_out != args.sanitized_out,
        "--mechanism-out and --sanitized-out must differ",
    );
    p.finish()?;
    let alpha = alpha.expect("validated");
    let joint = load(&args.input, opts)?;
    let part = WatchdogPartition::by_threshold(&joint, alpha, args.epsilon)?;
    let mech = x_invariant_mechanism(&part, args.r.as_deref())?;
    let sanitized = apply_mechanism(&joint, &mech)?;
    let leak = optimal_leakage(&part);

    let verdict = match (args.eps_prime, part.merged_lift()) {
        (Some(e), Some(_)) => Cell::Text(attainable(&part, e)?.to_string()),
        _ => Cell::Empty,
    };
    let high: Vec<&str> = part.high_risk().iter().map(|&x| joint.x_labels()[x].as_str()).collect();
    let mut t = Table::new(
        "sanitize",
        &["alpha", "epsilon", "high_risk", "merged_lift", "high_risk_mass", "attainable", "min_sibson", "min_max_sibson"],
    );
    t.push(vec![
        alpha.to_string().into(),
        args.epsilon.into(),
        high.join(" ").into(),
        part.merged_lift().into(),
        part.high_risk_mass().into(),
        verdict,
        leak.min_sibson.into(),
        leak.min_max_sibson.into(),
    ]);

    if part.high_risk().is_empty() {
        eprintln!("no high-risk symbols");
    } else if let Some(m) = part.merged_lift() {
        eprintln!("merged lift {m:.6} over {{{}}}", high.join(", "));
    }
    write_file(&args.mechanism_out, &(mechanism_to_json(&mech) + "\n"))?;
    write_file(&args.sanitized_out, &(joint_to_json(&sanitized) + "\n"))?;
    emit(out, &render(&[t], format))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let opts = p.input(&args.input);
    let alphas = p.alphas(&args.alpha);
    positive_epsilon(&mut p, args.epsilon);
    p.require(args.samples >= 1, "--samples must be >= 1");
    p.finish()?;
    let joint = load(&args.input, opts)?;

    let mut t = Table::new(
        "verify",
        &[
            "alpha",
            "high_risk",
            "merged_lift",
            "best_sampled_max",
            "best_sampled_expected",
            "samples",
            "violations",
            "x_invariant_gap",
            "strict_tradeoff_premises",
        ],
    );
    let mut failed = 0usize;
    for &alpha in &alphas {
        let part = WatchdogPartition::by_threshold(&joint, alpha, args.epsilon)?;
        if part.high_risk().is_empty() {
            eprintln!("alpha {alpha}: no high-risk symbols, nothing to verify");
            continue;
        }
        let report = match verify_merged_lift_bound(&joint, &part, args.samples, args.seed) {
            Ok(r) => r,
            Err(Error::ViolationFound(v)) => {
                eprintln!("alpha {alpha}: violation: {v}");
                failed += 1;
                match v.report {
                    Some(r) => r,
                    None => continue,
                }
            }
            Err(e) => return Err(e),
        };
        let strict = if part.high_risk().len() >= 2 {
            match verify_strict_tradeoff(&joint, &part, args.samples, args.seed) {
                Ok(n) => Cell::from(n),
                Err(Error::ViolationFound(v)) => {
                    eprintln!("alpha {alpha}: strict tradeoff counterexample: {v}");
                    failed += 1;
                    Cell::Text("violated".into())
                }
                Err(e) => return Err(e),
            }
        } else {
            Cell::Empty
        };
        t.push(vec![
            alpha.to_string().into(),
            report.high_risk.join(" ").into(),
            report.merged_lift.into(),
            report.best_sampled_max.into(),
            report.best_sampled_expected.into(),
            report.num_samples.into(),
            report.violations.into(),
            report.x_invariant_gap.into(),
            strict,
        ]);
    }
    emit(out, &render(&[t], format))?;
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn sweep(args: &PutSweepArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let opts = p.input(&args.input);
    let alphas = p.alphas(&args.alpha);
    p.finish()?;
    let joint = load(&args.input, opts)?;
    let points = put_sweep(&joint, &alphas)?;
    let mut t = Table::new(
        "put",
        &["alpha", "cut_index", "epsilon_equiv", "nmil", "min_sibson", "min_max_sibson"],
    );
    for pt in points {
        t.push(vec![
            pt.alpha.to_string().into(),
            pt.cut_index.into(),
            pt.epsilon_equiv.into(),
            pt.nmil.into(),
            pt.min_sibson.into(),
            pt.min_max_sibson.into(),
        ]);
    }
    emit(out, &render(&[t], format))?;
    Ok(ExitCode::SUCCESS)
}

fn compare_relax(args: &CompareRelaxArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let alpha = p.alpha(&args.alpha);
    p.require(args.trials >= 1, "--trials must be >= 1");
    p.require(
        args.num_s >= 2 && args.num_x >= 2,
        format!("--num-s and --num-x must be >= 2, got {} and {}", args.num_s, args.num_x),
    );
    let config = RelaxationConfig {
        eps_bar: args.eps_bar,
        alpha: alpha.unwrap_or(AlphaParam::Infinity),
        epsilon: args.epsilon,
        delta: args.delta,
        eps_max: args.eps_max,
    };
    if let Err(Error::InvalidConfig(msg)) = config.check() {
        p.0.push(msg);
    }
    p.finish()?;
    if !config.epsilon_below_eps_bar() {
        eprintln!(
            "warning: epsilon {} >= eps_bar {}; the α-lift threshold does not relax the absolute test",
            config.epsilon, config.eps_bar
        );
    }

    let records = cdf_trials(args.trials, args.num_s, args.num_x, &config, args.seed)?;
    let mut t = Table::new("cdf", &["trial", "seed", "method", "nmil", "realized_delta"]);
    for r in &records {
        t.push(vec![
            r.trial.into(),
            r.seed.into(),
            r.method.to_string().into(),
            r.nmil.into(),
            r.realized_delta.into(),
        ]);
    }
    for s in summarize(&records) {
        eprintln!(
            "{}: trials {}, P(NMIL <= 0.2) = {:.4}, median NMIL {:.4}, p99 realized delta {:.4}",
            s.method, s.trials, s.p_nmil_le_0_2, s.median_nmil, s.realized_delta_p99
        );
    }
    emit(out, &render(&[t], format))?;
    Ok(ExitCode::SUCCESS)
}

/// The surface grid `ρ_k = (k + 1/2) / steps`, `k = 0..steps`.
pub fn surface_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| (k as f64 + 0.5) / steps as f64).collect()
}

/// One surface row: `ρ` and `ℓ_α(x)` for each symbol.
pub type SurfaceRow = (f64, Vec<f64>);

/// α-lifts of the built-in example over [`surface_grid`], with the symbol labels.
pub fn example_surface(alpha: AlphaParam, steps: usize) -> Result<(Vec<String>, Vec<SurfaceRow>)> {
    let labels = example_joint(0.5)?.x_labels().to_vec();
    let rows = surface_grid(steps)
        .into_iter()
        .map(|rho| {
            let joint = example_joint(rho)?;
            Ok((rho, LiftProfile::new(&joint, alpha).alpha_lift().to_vec()))
        })
        .collect::<Result<_>>()?;
    Ok((labels, rows))
}

fn surface(args: &SurfaceArgs, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let mut p = Problems::default();
    let alpha = p.alpha(&args.alpha);
    p.require(args.rho_steps >= 1, "--rho-steps must be >= 1");
    p.finish()?;
    let (labels, rows) = example_surface(alpha.expect("validated"), args.rho_steps)?;
    let mut cols = vec!["rho"];
    cols.extend(labels.iter().map(String::as_str));
    let mut t = Table::new("surface", &cols);
    for (rho, lifts) in rows {
        let mut row = vec![Cell::from(rho)];
        row.extend(lifts.into_iter().map(Cell::from));
        t.push(row);
    }
    emit(out, &render(&[t], format))?;
    Ok(ExitCode::SUCCESS)
}
