//! Command-line harness: single estimates, Monte Carlo campaigns, trial-budget
//! tables, budget comparisons and oracle validation.
//!
//! Every command is a pure function of its arguments (including `--seed`) and
//! renders to a string, so repeated invocations are byte-identical.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    const_precision_trials_raw, kitaev_trials_per_bit, qft_lower_bound, trials_table, BudgetMode,
    TABLE_SUCCESS_PROBS,
};
use crate::error::{Error, Result};
use crate::estimate::{is_success, EstimationResult, StageLog};
use crate::fourier::{
    constant_precision_config, semiclassical_estimate, EstimatorConfig, Feedback,
};
use crate::kitaev::{kitaev_estimate, KitaevConfig};
use crate::phase::{Phase, DEFAULT_WIDTH};
use crate::reference::{
    best_outcome_mass, empirical_vs_exact, qpe_distribution_direct, qpe_distribution_exact,
};
use crate::sampling::{run_indexed, RngSeed, SimRng};

/// Exit code for a usage or configuration error.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when `validate` finds a failing check.
pub const EXIT_VALIDATION: i32 = 2;

const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Parser)]
#[command(
    name = "qpe",
    version,
    about = "Quantum phase estimation under limited phase-shift precision"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one estimator once.
    Estimate(EstimateArgs),
    /// Run an estimator many times on independent streams.
    Montecarlo(MonteCarloArgs),
    /// Per-bit trial budgets for a list of success probabilities.
    Table(TableArgs),
    /// Both per-bit budgets over a log-spaced failure-probability grid.
    Compare(CompareArgs),
    /// Check the sampled estimator and the best-outcome floor against the exact distribution.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Kitaev,
    Qft,
    Aqft,
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeedbackArg {
    Estimated,
    Oracle,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// `0.101b`, a decimal in [0,1), `raw/2^w`, or `random`.
    #[arg(long)]
    pub phase: Option<String>,
    #[arg(long)]
    pub bits: u32,
    /// Overall failure budget of one run.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Highest phase-shift degree (aqft, const).
    #[arg(long)]
    pub degree: Option<u32>,
    /// Repetitions per bit (const); rounded up to odd.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Guard stages (const).
    #[arg(long)]
    pub guard: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub feedback: Option<FeedbackArg>,
    /// Use the unrounded Kitaev budget coefficient.
    #[arg(long)]
    pub exact_constants: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Include the per-stage log.
    #[arg(long)]
    pub stages: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Comma-separated success probabilities.
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub exact_constants: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Explicit comma-separated failure probabilities; overrides the grid.
    #[arg(long, value_delimiter = ',')]
    pub eps_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 1e-16)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 4)]
    pub per_decade: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub exact_constants: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 5)]
    pub bits: u32,
    #[arg(long, default_value_t = 50_000)]
    pub samples: u64,
    #[arg(long, default_value = "0.703125")]
    pub phase: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted total-variation distance.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Rendered command output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    /// False only when `validate` has a failing check.
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

/// Formats with 12 significant digits, `%g` style, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Float rounded to what the text formats print, for JSON output.
fn json_f(x: f64) -> Value {
    fmt_sig(x)
        .parse::<f64>()
        .map(Value::from)
        .unwrap_or(Value::Null)
}

/// Aligned plain-text table.
fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    out.push_str(line(header.to_vec()).trim_end());
    out.push('\n');
    for row in rows {
        out.push_str(line(row.iter().map(String::as_str).collect()).trim_end());
        out.push('\n');
    }
    out
}

fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn render_rows(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => render_csv(header, rows),
        Format::Table => render_table(header, rows),
        Format::Json => {
            let objs: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let map = header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), cell_to_json(c)))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            to_json(&Value::Array(objs))
        }
    }
}

fn cell_to_json(cell: &str) -> Value {
    if let Ok(i) = cell.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(f) = cell.parse::<f64>() {
        return Value::from(f);
    }
    match cell {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(cell.to_string()),
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

/// Validated run configuration shared by `estimate` and `montecarlo`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algo: Algo,
    /// `None` draws a fresh phase per run.
    pub phase: Option<Phase>,
    pub n: u32,
    pub eps: f64,
    pub kitaev: Option<KitaevConfig>,
    pub fourier: Option<EstimatorConfig>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let usage = |msg: String| Err(Error::InvalidConfig(msg));
        let n = args.bits;
        if n == 0 {
            return usage("--bits must be at least 1".into());
        }
        if !(args.eps > 0.0 && args.eps < 1.0) {
            return Err(Error::EpsOutOfRange(args.eps));
        }
        let phase = match args.phase.as_deref() {
            None | Some("random") => None,
            Some(text) => Some(Phase::parse(text, DEFAULT_WIDTH)?),
        };
        let uses_degree = matches!(args.algo, Algo::Aqft | Algo::Const);
        if args.degree.is_some() && !uses_degree {
            return usage(format!("--degree does not apply to {:?}", args.algo));
        }
        if (args.reps.is_some() || args.guard.is_some()) && args.algo != Algo::Const {
            return usage("--reps and --guard apply only to --algo const".into());
        }
        if args.exact_constants && args.algo != Algo::Kitaev {
            return usage("--exact-constants applies only to --algo kitaev".into());
        }
        let feedback = match args.feedback {
            Some(FeedbackArg::Oracle) if args.algo == Algo::Kitaev => {
                return usage("--feedback does not apply to kitaev".into())
            }
            Some(FeedbackArg::Oracle) => Feedback::Oracle,
            _ => Feedback::Estimated,
        };
        let mut cfg = RunConfig {
            algo: args.algo,
            phase,
            n,
            eps: args.eps,
            kitaev: None,
            fourier: None,
            seed: args.seed,
        };
        match args.algo {
            Algo::Kitaev => {
                let k = KitaevConfig {
                    mode: if args.exact_constants {
                        BudgetMode::Exact
                    } else {
                        BudgetMode::Rounded
                    },
                    ..KitaevConfig::new(n, args.eps)
                };
                k.validate()?;
                cfg.kitaev = Some(k);
            }
            Algo::Qft => {
                cfg.fourier = Some(EstimatorConfig {
                    feedback,
                    ..EstimatorConfig::full_qft(n)
                })
            }
            Algo::Aqft => {
                let degree = args.degree.unwrap_or_else(|| default_aqft_degree(n));
                if degree < 2 {
                    return usage(format!("AQFT degree {degree} is below 2"));
                }
                cfg.fourier = Some(EstimatorConfig {
                    feedback,
                    ..EstimatorConfig::aqft(n, degree)
                });
            }
            Algo::Const => {
                let mut f = constant_precision_config(n, args.degree.unwrap_or(3), args.eps)?;
                if let Some(r) = args.reps {
                    if r == 0 {
                        return usage("--reps must be at least 1".into());
                    }
                    f.reps = r | 1;
                }
                if let Some(g) = args.guard {
                    f.guard = g;
                }
                f.feedback = feedback;
                cfg.fourier = Some(f);
            }
        }
        if let Some(f) = &cfg.fourier {
            f.validate()?;
        }
        Ok(cfg)
    }

    pub fn run_once(&self, phi: Phase, rng: &mut SimRng) -> Result<EstimationResult> {
        match (&self.kitaev, &self.fourier) {
            (Some(k), _) => kitaev_estimate(phi, k, rng),
            (_, Some(f)) => semiclassical_estimate(phi, f, rng),
            _ => unreachable!("validated config has an engine"),
        }
    }

    /// Success predicate: Kitaev is held to its `n + 2`-bit guarantee, the
    /// Fourier estimators to one unit in the last of `n` bits.
    pub fn succeeded(&self, result: &EstimationResult, phi: Phase) -> bool {
        match self.algo {
            Algo::Kitaev => result.error(phi) < 2f64.powi(-(self.n as i32 + 2)),
            _ => is_success(result, phi, self.n),
        }
    }

    fn draw_phase(&self, rng: &mut SimRng) -> Phase {
        self.phase
            .unwrap_or_else(|| Phase::new(rng.next_u64(), DEFAULT_WIDTH).expect("full-width raw"))
    }
}

/// Smallest degree with `m >= log2(n) + 2`.
pub fn default_aqft_degree(n: u32) -> u32 {
    (n.max(1) as f64).log2().ceil() as u32 + 2
}

fn stage_rows(result: &EstimationResult) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match result.stages.first() {
        Some(StageLog::Kitaev(_)) => (
            vec!["k", "sin_est", "cos_est", "phi_tilde", "beta"],
            result
                .stages
                .iter()
                .filter_map(|s| match s {
                    StageLog::Kitaev(s) => Some(vec![
                        s.k.to_string(),
                        fmt_sig(s.sin_est),
                        fmt_sig(s.cos_est),
                        fmt_sig(s.phi_tilde.value()),
                        s.beta.to_string(),
                    ]),
                    _ => None,
                })
                .collect(),
        ),
        _ => (
            vec!["stage", "residual", "trials", "ones", "bit"],
            result
                .stages
                .iter()
                .filter_map(|s| match s {
                    StageLog::Fourier(s) => Some(vec![
                        s.stage.to_string(),
                        fmt_sig(s.residual.value()),
                        s.trials.to_string(),
                        s.ones.to_string(),
                        (s.bit as u8).to_string(),
                    ]),
                    _ => None,
                })
                .collect(),
        ),
    }
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<Output> {
    let cfg = RunConfig::from_args(&args.run)?;
    let mut rng = SimRng::new(RngSeed::new(cfg.seed));
    let phi = cfg.draw_phase(&mut rng);
    let result = cfg.run_once(phi, &mut rng)?;
    let error = result.error(phi);
    let success = cfg.succeeded(&result, phi);
    let header = [
        "algo",
        "phase",
        "bits",
        "estimate",
        "error",
        "success",
        "total_tests",
    ];
    let row = vec![
        format!("{:?}", cfg.algo).to_lowercase(),
        fmt_sig(phi.value()),
        result.bits.to_string(),
        fmt_sig(result.estimate.value()),
        fmt_sig(error),
        success.to_string(),
        result.total_tests.to_string(),
    ];
    let (stage_header, stage_rows) = stage_rows(&result);
    let text = match args.format {
        Format::Json => {
            let mut obj = json!({
                "algo": cfg.algo,
                "phase": json_f(phi.value()),
                "phase_raw": phi.to_string(),
                "bits": result.bits.to_string(),
                "estimate": json_f(result.estimate.value()),
                "error": json_f(error),
                "success": success,
                "total_tests": result.total_tests,
                "warnings": result.warnings,
            });
            if args.stages {
                let stages: Vec<Value> = stage_rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            stage_header
                                .iter()
                                .zip(r)
                                .map(|(h, c)| (h.to_string(), cell_to_json(c)))
                                .collect(),
                        )
                    })
                    .collect();
                obj["stages"] = Value::Array(stages);
            }
            to_json(&obj)
        }
        format => {
            let mut out = render_rows(format, &header, &[row]);
            for w in &result.warnings {
                let _ = writeln!(out, "# warning: {w}");
            }
            if args.stages {
                out.push('\n');
                out.push_str(&render_rows(format, &stage_header, &stage_rows));
            }
            out
        }
    };
    Ok(Output::ok(text))
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, runs: u64) -> (f64, f64) {
    if runs == 0 {
        return (0.0, 1.0);
    }
    let n = runs as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloRow {
    pub run: u64,
    pub phi: Phase,
    pub estimate: Phase,
    pub error: f64,
    pub success: bool,
    pub tests: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub runs: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// Runs `runs` independent estimates on derived streams, in parallel.
pub fn monte_carlo(cfg: &RunConfig, runs: u64) -> Result<(Vec<MonteCarloRow>, MonteCarloSummary)> {
    if runs == 0 {
        return Err(Error::InvalidConfig("--runs must be at least 1".into()));
    }
    let rows = run_indexed(RngSeed::new(cfg.seed), runs, |i, rng| {
        let phi = cfg.draw_phase(rng);
        cfg.run_once(phi, rng).map(|res| MonteCarloRow {
            run: i,
            phi,
            estimate: res.estimate,
            error: res.error(phi),
            success: cfg.succeeded(&res, phi),
            tests: res.total_tests,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let successes = rows.iter().filter(|r| r.success).count() as u64;
    let (wilson_lo, wilson_hi) = wilson_interval(successes, runs);
    Ok((
        rows,
        MonteCarloSummary {
            runs,
            successes,
            rate: successes as f64 / runs as f64,
            wilson_lo,
            wilson_hi,
        },
    ))
}

pub fn cmd_montecarlo(args: &MonteCarloArgs) -> Result<Output> {
    let cfg = RunConfig::from_args(&args.run)?;
    let (rows, summary) = monte_carlo(&cfg, args.runs)?;
    let header = ["run", "phi", "estimate", "error", "success", "tests"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.run.to_string(),
                fmt_sig(r.phi.value()),
                fmt_sig(r.estimate.value()),
                fmt_sig(r.error),
                r.success.to_string(),
                r.tests.to_string(),
            ]
        })
        .collect();
    let text = match args.format {
        Format::Json => {
            let rows: Vec<Value> = cells
                .iter()
                .map(|r| {
                    Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.to_string(), cell_to_json(c)))
                            .collect(),
                    )
                })
                .collect();
            to_json(&json!({
                "rows": rows,
                "summary": {
                    "runs": summary.runs,
                    "successes": summary.successes,
                    "rate": json_f(summary.rate),
                    "wilson95_lo": json_f(summary.wilson_lo),
                    "wilson95_hi": json_f(summary.wilson_hi),
                }
            }))
        }
        format => {
            let mut out = render_rows(format, &header, &cells);
            let _ = writeln!(
                out,
                "# summary runs={} successes={} rate={} wilson95_lo={} wilson95_hi={}",
                summary.runs,
                summary.successes,
                fmt_sig(summary.rate),
                fmt_sig(summary.wilson_lo),
                fmt_sig(summary.wilson_hi)
            );
            out
        }
    };
    Ok(Output::ok(text))
}

fn budget_mode(exact: bool) -> BudgetMode {
    if exact {
        BudgetMode::Exact
    } else {
        BudgetMode::Rounded
    }
}

pub fn cmd_table(args: &TableArgs) -> Result<Output> {
    let probs = args
        .probs
        .clone()
        .unwrap_or_else(|| TABLE_SUCCESS_PROBS.to_vec());
    let rows = trials_table(&probs, budget_mode(args.exact_constants))?;
    let header = [
        "success_prob",
        "eps",
        "kitaev_trials",
        "const_precision_trials",
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig(r.success_prob),
                fmt_sig(r.eps),
                r.kitaev_trials.to_string(),
                r.const_precision_trials.to_string(),
            ]
        })
        .collect();
    Ok(Output::ok(render_rows(args.format, &header, &cells)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub eps: f64,
    pub kitaev_trials: u64,
    pub const_trials: u64,
    pub ratio: f64,
}

/// `10^(-i / per_decade)` for every `i` landing in `[eps_min, eps_max]`.
pub fn log_grid(eps_min: f64, eps_max: f64, per_decade: u32) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_min <= eps_max && eps_max < 1.0) || per_decade == 0 {
        return Err(Error::InvalidConfig(format!(
            "invalid grid [{eps_min}, {eps_max}] with {per_decade} points per decade"
        )));
    }
    let pd = per_decade as f64;
    let first = (-eps_max.log10() * pd - 1e-9).ceil() as i64;
    let last = (-eps_min.log10() * pd + 1e-9).floor() as i64;
    Ok((first.max(1)..=last)
        .map(|i| 10f64.powf(-(i as f64) / pd))
        .collect())
}

pub fn compare_rows(eps: &[f64], mode: BudgetMode) -> Result<Vec<CompareRow>> {
    eps.iter()
        .map(|&e| {
            let k = kitaev_trials_per_bit(e, mode)?;
            let c = const_precision_trials_raw(e, 3)?;
            Ok(CompareRow {
                eps: e,
                kitaev_trials: k,
                const_trials: c,
                ratio: k as f64 / c as f64,
            })
        })
        .collect()
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Output> {
    let eps = match &args.eps_list {
        Some(list) => list.clone(),
        None => log_grid(args.eps_min, args.eps_max, args.per_decade)?,
    };
    let rows = compare_rows(&eps, budget_mode(args.exact_constants))?;
    let header = ["eps", "kitaev_trials", "const_trials", "ratio"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig(r.eps),
                r.kitaev_trials.to_string(),
                r.const_trials.to_string(),
                fmt_sig(r.ratio),
            ]
        })
        .collect();
    Ok(Output::ok(render_rows(args.format, &header, &cells)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Oracle checks around the exact distribution.
pub fn validation_checks(
    phi: Phase,
    n: u32,
    samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<Vec<Check>> {
    if n == 0 || n > 10 {
        return Err(Error::RegisterTooLarge(n));
    }
    let mut checks = Vec::new();

    let mut worst = 0f64;
    for j in 0..1024u64 {
        let grid_phi = Phase::new(j, 10)?;
        let a = qpe_distribution_exact(grid_phi, n)?;
        let b = qpe_distribution_direct(grid_phi, n)?;
        for (x, y) in a.probs.iter().zip(&b.probs) {
            worst = worst.max((x - y).abs());
        }
    }
    checks.push(Check {
        name: "closed_form_vs_direct_sum",
        value: worst,
        threshold: 1e-10,
        passed: worst < 1e-10,
    });

    let mut rng = SimRng::new(RngSeed::new(seed));
    let tv = empirical_vs_exact(phi, n, samples, &mut rng)?;
    checks.push(Check {
        name: "sampled_vs_exact_tv",
        value: tv,
        threshold: tolerance,
        passed: tv < tolerance,
    });

    let floor = qft_lower_bound() - 1e-9;
    let min_mass = (0..4096u64)
        .map(|j| {
            let grid_phi = Phase::new(j, 12).expect("12-bit grid");
            qpe_distribution_exact(grid_phi, n).map(|d| best_outcome_mass(&d, grid_phi))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: "best_outcome_grid_min",
        value: min_mass,
        threshold: floor,
        passed: min_mass >= floor,
    });

    let mut single = 0f64;
    for j in 0..4096u64 {
        let grid_phi = Phase::new(j, 12)?;
        let d = qpe_distribution_exact(grid_phi, 1)?;
        let angle = std::f64::consts::PI * grid_phi.value();
        single = single
            .max((d.probs[0] - angle.cos().powi(2)).abs())
            .max((d.probs[1] - angle.sin().powi(2)).abs());
    }
    checks.push(Check {
        name: "single_qubit_analytic",
        value: single,
        threshold: 1e-12,
        passed: single < 1e-12,
    });
    Ok(checks)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<Output> {
    let phi = Phase::parse(&args.phase, DEFAULT_WIDTH)?;
    let checks = validation_checks(phi, args.bits, args.samples, args.seed, args.tolerance)?;
    let header = ["check", "value", "threshold", "pass"];
    let cells: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_string(),
                fmt_sig(c.value),
                fmt_sig(c.threshold),
                c.passed.to_string(),
            ]
        })
        .collect();
    Ok(Output {
        text: render_rows(args.format, &header, &cells),
        passed: checks.iter().all(|c| c.passed),
    })
}

pub fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Montecarlo(a) => cmd_montecarlo(a),
        Command::Table(a) => cmd_table(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Parses and runs; returns the rendered output, or the exit code and message.
pub fn run<I, T>(args: I) -> std::result::Result<Output, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
        (code, e.to_string())
    })?;
    execute(&cli).map_err(|e| (EXIT_USAGE, format!("error: {e}\n")))
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(out) => {
            print!("{}", out.text);
            if out.passed {
                0
            } else {
                EXIT_VALIDATION
            }
        }
        Err((0, msg)) => {
            print!("{msg}");
            0
        }
        Err((code, msg)) => {
            eprint!("{msg}");
            code
        }
    }
}
