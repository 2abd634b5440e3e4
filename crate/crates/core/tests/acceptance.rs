//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use clap::Parser;

use qpe::bounds::{binomial_upper_tail, qft_lower_bound, trial_ratio, trials_table, BudgetMode};
use qpe::cli::{self, compare_rows, log_grid, monte_carlo, RunConfig};
use qpe::fourier::oracle_stage_profile;
use qpe::kitaev::kitaev_estimate_noiseless;
use qpe::phase::{mod1_distance, post_h_prob_one, Phase};
use qpe::reference::{best_outcome_mass, empirical_vs_exact, qpe_distribution_exact};
use qpe::sampling::{majority, run_indexed, run_trials, RngSeed, SimRng};

fn report(id: u32, name: &str, passed: bool, detail: String, elapsed: Duration) {
    println!(
        "{} criterion {id:>2} {name}: {detail} ({:.3} s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

fn run_args(args: &[&str]) -> cli::RunArgs {
    let mut full = vec!["qpe", "estimate"];
    full.extend_from_slice(args);
    match cli::Cli::try_parse_from(full)
        .expect("valid arguments")
        .command
    {
        cli::Command::Estimate(e) => e.run,
        _ => unreachable!(),
    }
}

#[test]
fn criterion_01_trial_table() {
    let start = Instant::now();
    let rows = trials_table(&qpe::bounds::TABLE_SUCCESS_PROBS, BudgetMode::Rounded).unwrap();
    let elapsed = start.elapsed();
    let got: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r.kitaev_trials, r.const_precision_trials))
        .collect();
    let want = vec![(98, 3), (120, 5), (211, 13), (344, 24), (515, 39)];
    let passed = got == want && elapsed < Duration::from_millis(1);
    report(1, "trial table", passed, format!("{got:?}"), elapsed);
    assert_eq!(got, want);
    assert!(elapsed < Duration::from_millis(1));
}

#[test]
fn criterion_02_best_outcome_grid() {
    let start = Instant::now();
    let min_mass = (0..4096u64)
        .map(|j| {
            let phi = Phase::new(j, 12).unwrap();
            best_outcome_mass(&qpe_distribution_exact(phi, 6).unwrap(), phi)
        })
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let floor = qft_lower_bound() - 1e-9;
    let passed = min_mass >= floor && elapsed < Duration::from_secs(5);
    report(
        2,
        "best-outcome mass floor",
        passed,
        format!("min {min_mass:.10} vs {floor:.10}"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_03_sampler_matches_exact() {
    let start = Instant::now();
    let phi = Phase::parse("0.703125", 64).unwrap();
    let mut rng = SimRng::from_master(0);
    let tv = empirical_vs_exact(phi, 5, 50_000, &mut rng).unwrap();
    let elapsed = start.elapsed();
    let passed = tv < 0.02 && elapsed < Duration::from_secs(10);
    report(
        3,
        "sampler vs exact distribution",
        passed,
        format!("TV {tv:.5} < 0.02"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_04_oracle_stage_success() {
    let start = Instant::now();
    let floor = (PI / 8.0).cos().powi(2) - 1e-12;
    let mut worst = f64::INFINITY;
    for raw in 0..1u64 << 12 {
        let phi = Phase::new(raw, 12).unwrap();
        for stage in oracle_stage_profile(phi, 12, 2) {
            worst = worst.min(stage.success);
        }
    }
    let elapsed = start.elapsed();
    let passed = worst >= floor;
    report(
        4,
        "oracle per-stage success",
        passed,
        format!("min {worst:.12} vs {floor:.12}"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_05_majority_tail() {
    let start = Instant::now();
    let theta = Phase::new((1u64 << 61) - (1u64 << 44), 64).unwrap();
    assert_eq!(theta.value(), 0.125 - 2f64.powi(-20));
    let p1 = post_h_prob_one(theta);
    let tail = binomial_upper_tail(13, p1, 7);
    let samples = 20_000u64;
    let failures = run_indexed(RngSeed::new(5), samples, |_, rng| {
        majority(run_trials(p1, 13, rng).unwrap()).unwrap()
    })
    .into_iter()
    .filter(|&f| f)
    .count() as f64;
    let rate = failures / samples as f64;
    let sigma = (tail * (1.0 - tail) / samples as f64).sqrt();
    let elapsed = start.elapsed();
    let passed =
        tail <= 0.0455 && (rate - tail).abs() <= 3.0 * sigma && elapsed < Duration::from_secs(5);
    report(
        5,
        "per-bit majority budget",
        passed,
        format!(
            "exact tail {tail:.6}, empirical {rate:.6}, 3 sigma {:.6}",
            3.0 * sigma
        ),
        elapsed,
    );
    assert!(passed);
}

fn random_phase_failure(args: &[&str], runs: u64) -> f64 {
    let cfg = RunConfig::from_args(&run_args(args)).unwrap();
    let (_, summary) = monte_carlo(&cfg, runs).unwrap();
    1.0 - summary.rate
}

#[test]
fn criterion_06_constant_precision_end_to_end() {
    let start = Instant::now();
    let failure = random_phase_failure(
        &[
            "--algo", "const", "--degree", "3", "--bits", "8", "--eps", "0.05", "--phase",
            "random", "--seed", "6",
        ],
        500,
    );
    let elapsed = start.elapsed();
    let passed = failure <= 0.05 && elapsed < Duration::from_secs(30);
    report(
        6,
        "constant-precision end to end",
        passed,
        format!("failure {failure:.4} <= 0.05"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_07_kitaev_end_to_end() {
    let start = Instant::now();
    let failure = random_phase_failure(
        &[
            "--algo", "kitaev", "--bits", "8", "--eps", "0.05", "--phase", "random", "--seed", "7",
        ],
        500,
    );
    let elapsed = start.elapsed();
    let passed = failure <= 0.05 && elapsed < Duration::from_secs(60);
    report(
        7,
        "Kitaev end to end",
        passed,
        format!("failure {failure:.4} <= 0.05"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_08_noiseless_kitaev() {
    let start = Instant::now();
    let mut worst = 0f64;
    for raw in 0..1u64 << 12 {
        let phi = Phase::new(raw, 12).unwrap();
        let est = kitaev_estimate_noiseless(phi, 10).unwrap();
        worst = worst.max(mod1_distance(est.estimate, phi));
    }
    let elapsed = start.elapsed();
    let bound = 2f64.powi(-12);
    let passed = worst < bound && elapsed < Duration::from_secs(10);
    report(
        8,
        "noiseless Kitaev",
        passed,
        format!("max error {worst:e} < {bound:e}"),
        elapsed,
    );
    assert!(passed);
}

#[test]
fn criterion_09_aqft_success() {
    let start = Instant::now();
    let runs = 5000u64;
    let failure = random_phase_failure(
        &[
            "--algo", "aqft", "--degree", "5", "--bits", "8", "--phase", "random", "--seed", "9",
        ],
        runs,
    );
    let rate = 1.0 - failure;
    let floor = 4.0 / (PI * PI) - 1.0 / 32.0;
    let sigma = (floor * (1.0 - floor) / runs as f64).sqrt();
    let elapsed = start.elapsed();
    let passed = rate >= floor - 3.0 * sigma;
    report(
        9,
        "AQFT success",
        passed,
        format!("rate {rate:.4} >= {:.4}", floor - 3.0 * sigma),
        elapsed,
    );
    assert!(passed);
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_10_ratio_convergence() {
    let start = Instant::now();
    let target = trial_ratio();
    let grid = log_grid(1e-16, 0.5, 4).unwrap();
    let rows: Vec<_> = compare_rows(&grid, BudgetMode::Rounded)
        .unwrap()
        .into_iter()
        .filter(|r| r.eps <= 1e-4 * (1.0 + 1e-12))
        .collect();
    let ln_inv: Vec<f64> = rows.iter().map(|r| -r.eps.ln()).collect();
    let kitaev: Vec<f64> = rows.iter().map(|r| r.kitaev_trials as f64).collect();
    let constant: Vec<f64> = rows.iter().map(|r| r.const_trials as f64).collect();
    let growth_ratio = slope(&ln_inv, &kitaev) / slope(&ln_inv, &constant);
    let first = rows.first().unwrap().ratio;
    let last = rows.last().unwrap().ratio;
    let rel = |x: f64| (x - target).abs() / target;
    let elapsed = start.elapsed();
    let passed = rel(growth_ratio) <= 0.05 && rel(last) <= 0.05 && rel(last) < rel(first);
    report(
        10,
        "budget ratio convergence",
        passed,
        format!(
            "target {target}, growth ratio {growth_ratio:.4}, ratio {first:.4} at eps {:e} -> {last:.4} at eps {:e}",
            rows.first().unwrap().eps,
            rows.last().unwrap().eps
        ),
        elapsed,
    );
    assert!(passed);
}

fn run_binary(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpe"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_11_determinism() {
    let start = Instant::now();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "estimate", "--algo", "kitaev", "--bits", "6", "--phase", "random", "--seed", "11",
            "--stages",
        ],
        vec![
            "estimate", "--algo", "const", "--bits", "6", "--phase", "0.3", "--seed", "11",
            "--format", "json",
        ],
        vec![
            "montecarlo",
            "--algo",
            "qft",
            "--bits",
            "6",
            "--runs",
            "200",
            "--seed",
            "11",
        ],
        vec![
            "montecarlo",
            "--algo",
            "const",
            "--bits",
            "5",
            "--runs",
            "50",
            "--seed",
            "11",
            "--format",
            "json",
        ],
        vec!["table"],
        vec!["compare"],
        vec![
            "validate",
            "--bits",
            "3",
            "--samples",
            "2000",
            "--seed",
            "11",
        ],
    ];
    let mut identical = true;
    for args in &commands {
        let a = run_binary(args);
        let b = run_binary(args);
        assert_eq!(a.0, 0, "{args:?}");
        if a != b || a.1.is_empty() {
            identical = false;
            println!("mismatch for {args:?}");
        }
    }
    let elapsed = start.elapsed();
    report(
        11,
        "determinism",
        identical,
        format!("{} commands byte-identical", commands.len()),
        elapsed,
    );
    assert!(identical);
}
