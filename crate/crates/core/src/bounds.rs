//! Closed-form analysis: Chernoff tails, per-bit trial budgets, success
//! lower bounds, and the trial-count table comparing the two estimators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Success probabilities of the published comparison table.
pub const TABLE_SUCCESS_PROBS: [f64; 5] = [0.50000, 0.68269, 0.95450, 0.99730, 0.99993];

/// Rounded coefficient of `ln(4/eps)` in the Kitaev per-bit budget.
pub const KITAEV_COEFF_ROUNDED: f64 = 47.0;

/// How the Kitaev budget coefficient is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BudgetMode {
    /// The rounded coefficient 47 (reproduces the published table).
    Rounded,
    /// `2 / (2 delta^2)` with `delta = (2 - sqrt 2)/4`, about 46.63.
    Exact,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsOutOfRange(eps))
    }
}

/// Raw Hoeffding/Chernoff two-sided tail `2 exp(-2 delta^2 m)`. Not clamped;
/// see [`chernoff_tail_reported`].
pub fn chernoff_tail(delta: f64, m: u64) -> f64 {
    2.0 * (-2.0 * delta * delta * m as f64).exp()
}

pub fn chernoff_tail_reported(delta: f64, m: u64) -> f64 {
    chernoff_tail(delta, m).min(1.0)
}

/// One-sided majority failure bound `exp(-2 m (p - 1/2)^2)`.
pub fn majority_failure_bound(p: f64, m: u64) -> f64 {
    (-2.0 * m as f64 * (p - 0.5).powi(2)).exp()
}

/// Allowed error on each estimated Hadamard-test probability, `(2 - sqrt 2)/4`.
///
/// Twice this value is `1 - 1/sqrt 2`, the bound on the sine and cosine
/// estimate errors that keeps the arctangent reconstruction within 1/16.
pub fn kitaev_accuracy_threshold() -> f64 {
    (2.0 - 2f64.sqrt()) / 4.0
}

fn kitaev_coefficient(mode: BudgetMode) -> f64 {
    match mode {
        BudgetMode::Rounded => KITAEV_COEFF_ROUNDED,
        BudgetMode::Exact => {
            let delta = kitaev_accuracy_threshold();
            2.0 / (2.0 * delta * delta)
        }
    }
}

/// Hadamard tests per bit (both bases together) for failure probability `eps`.
pub fn kitaev_trials_per_bit(eps: f64, mode: BudgetMode) -> Result<u64> {
    check_eps(eps)?;
    Ok((kitaev_coefficient(mode) * (4.0 / eps).ln()).ceil() as u64)
}

/// Per-basis trial count `m1`; half the per-bit budget, rounded up.
pub fn kitaev_trials_per_basis(n: u32, eps_overall: f64, mode: BudgetMode) -> Result<u64> {
    check_eps(eps_overall)?;
    let n = n.max(1) as f64;
    Ok((kitaev_coefficient(mode) * (4.0 * n / eps_overall).ln() / 2.0).ceil() as u64)
}

/// `(per-bit m, total m * n)` under a union bound over the `n` stages.
pub fn kitaev_total_budget(n: u32, eps_overall: f64) -> Result<(u64, u64)> {
    check_eps(eps_overall)?;
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let per_bit = (KITAEV_COEFF_ROUNDED * (4.0 * n as f64 / eps_overall).ln()).ceil() as u64;
    Ok((per_bit, per_bit * n as u64))
}

/// Per-test success with corrections of degree `m`: `cos^2(pi / 2^m)`.
pub fn const_precision_success_per_test(degree: u32) -> f64 {
    (PI / 2f64.powi(degree as i32)).cos().powi(2)
}

/// Chernoff majority budget before the odd bump (the tabulated value).
pub fn const_precision_trials_raw(eps: f64, degree: u32) -> Result<u64> {
    check_eps(eps)?;
    if degree < 3 {
        return Err(Error::ZeroMajorityMargin(degree));
    }
    let margin = const_precision_success_per_test(degree) - 0.5;
    let coeff = 1.0 / (2.0 * margin * margin);
    Ok(((coeff * (1.0 / eps).ln()).ceil() as u64).max(1))
}

/// Majority budget handed to the estimator: the raw budget bumped to odd.
pub fn const_precision_trials(eps: f64, degree: u32) -> Result<u64> {
    const_precision_trials_raw(eps, degree).map(|m| m | 1)
}

/// Best-outcome success floor for textbook QPE, `8 / pi^2`.
pub fn qft_lower_bound() -> f64 {
    8.0 / (PI * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AqftBound {
    pub barenco: f64,
    pub cheung: f64,
    pub best: f64,
    /// Set when `degree < log2(n) + 2`, where neither formula is established.
    pub below_threshold: bool,
}

/// Success floors for AQFT of the given degree on an `n`-bit register.
pub fn aqft_lower_bound(n: u32, degree: u32) -> AqftBound {
    let n_f = n.max(1) as f64;
    let barenco = qft_lower_bound() * ((PI / 4.0) * (degree as f64 / n_f)).sin().powi(2);
    let cheung = 4.0 / (PI * PI) - 1.0 / (4.0 * n_f);
    AqftBound {
        barenco,
        cheung,
        best: barenco.max(cheung),
        below_threshold: (degree as f64) < n_f.log2() + 2.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialTableRow {
    pub success_prob: f64,
    pub eps: f64,
    pub kitaev_trials: u64,
    pub const_precision_trials: u64,
}

/// One row per success probability. Constant-precision counts are the raw
/// Chernoff values (no odd bump), as tabulated.
pub fn trials_table(success_probs: &[f64], mode: BudgetMode) -> Result<Vec<TrialTableRow>> {
    success_probs
        .iter()
        .map(|&p| {
            let eps = 1.0 - p;
            Ok(TrialTableRow {
                success_prob: p,
                eps,
                kitaev_trials: kitaev_trials_per_bit(eps, mode)?,
                const_precision_trials: const_precision_trials_raw(eps, 3)?,
            })
        })
        .collect()
}

/// Asymptotic ratio of the two per-bit budgets: 47 / 4.
pub fn trial_ratio() -> f64 {
    let margin = const_precision_success_per_test(3) - 0.5;
    KITAEV_COEFF_ROUNDED * 2.0 * margin * margin
}

/// Exact `Pr(X >= k)` for `X ~ Binomial(m, p)`, summed in log space.
pub fn binomial_upper_tail(m: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > m {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_choose = |j: u64| -> f64 { (1..=j).map(|i| ((m - j + i) as f64 / i as f64).ln()).sum() };
    (k..=m)
        .map(|j| (ln_choose(j) + j as f64 * p.ln() + (m - j) as f64 * (1.0 - p).ln()).exp())
        .sum::<f64>()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_tail(0.1464, 0), 2.0);
        assert_eq!(chernoff_tail_reported(0.1464, 0), 1.0);
        let v = chernoff_tail(0.1464466, 100);
        assert!((v - 2.0 * (-4.2894f64).exp()).abs() < 1e-4, "{v}");
        assert!((v - 0.0274).abs() < 1e-4);
        assert!((chernoff_tail(0.5, 10) - 0.013_475_893_998).abs() < 1e-11);
    }

    #[test]
    fn accuracy_threshold() {
        let t = kitaev_accuracy_threshold();
        assert!((t - 0.1464466094).abs() < 1e-10);
        assert!((t - (PI / 8.0).sin().powi(2)).abs() < 1e-15);
        assert!((2.0 * t - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn kitaev_budget_examples() {
        assert_eq!(kitaev_trials_per_bit(0.5, BudgetMode::Rounded).unwrap(), 98);
        assert_eq!(
            kitaev_trials_per_bit(0.0027, BudgetMode::Rounded).unwrap(),
            344
        );
        assert_eq!(kitaev_trials_per_bit(0.5, BudgetMode::Exact).unwrap(), 97);
        assert!(kitaev_trials_per_bit(0.0, BudgetMode::Rounded).is_err());
        assert!(kitaev_trials_per_bit(1.0, BudgetMode::Rounded).is_err());

        assert_eq!(kitaev_total_budget(1, 0.5).unwrap(), (98, 98));
        let (per_bit, total) = kitaev_total_budget(8, 0.05).unwrap();
        assert_eq!(per_bit, 304);
        assert_eq!(total, per_bit * 8);
        assert_eq!(
            kitaev_trials_per_basis(8, 0.05, BudgetMode::Rounded).unwrap(),
            152
        );
    }

    #[test]
    fn per_test_success() {
        assert!((const_precision_success_per_test(3) - 0.8535533906).abs() < 1e-10);
        assert!((const_precision_success_per_test(2) - 0.5).abs() < 1e-15);
        assert!((const_precision_success_per_test(6) - 0.99759).abs() < 1e-5);
    }

    #[test]
    fn const_budget_examples() {
        assert_eq!(const_precision_trials(0.5, 3).unwrap(), 3);
        assert_eq!(const_precision_trials(7e-5, 3).unwrap(), 39);
        assert_eq!(const_precision_trials(0.0455, 3).unwrap(), 13);
        assert_eq!(const_precision_trials(0.05, 3).unwrap(), 13);
        assert_eq!(const_precision_trials(0.01, 3).unwrap(), 19);
        assert_eq!(const_precision_trials_raw(0.0027, 3).unwrap(), 24);
        assert_eq!(const_precision_trials(0.0027, 3).unwrap(), 25);
        assert_eq!(
            const_precision_trials(0.1, 2),
            Err(Error::ZeroMajorityMargin(2))
        );
    }

    #[test]
    fn const_budget_suffices_and_shrinks_with_degree() {
        for e in 1..=6 {
            let eps = 10f64.powi(-e);
            let r = const_precision_trials(eps, 3).unwrap();
            assert!(majority_failure_bound(const_precision_success_per_test(3), r) <= eps);
            let mut last = u64::MAX;
            for degree in 3..12 {
                let m = const_precision_trials_raw(eps, degree).unwrap();
                assert!(m <= last);
                last = m;
            }
        }
    }

    #[test]
    fn qft_bounds() {
        assert!((qft_lower_bound() - 0.8105694691).abs() < 1e-9);
        assert!(qft_lower_bound() > 4.0 / (PI * PI));

        let b = aqft_lower_bound(8, 8);
        assert!((b.barenco - 4.0 / (PI * PI)).abs() < 1e-12);
        assert!((b.cheung - (4.0 / (PI * PI) - 1.0 / 32.0)).abs() < 1e-12);
        assert_eq!(b.best, b.barenco);

        let b = aqft_lower_bound(8, 5);
        assert!((b.barenco - 0.1801).abs() < 1e-4, "{}", b.barenco);
        assert!((b.cheung - 0.3740).abs() < 1e-4);
        assert_eq!(b.best, b.cheung);
        assert!(!b.below_threshold);
        assert!(aqft_lower_bound(8, 4).below_threshold);

        assert!((aqft_lower_bound(4, 4).cheung - 0.3428).abs() < 1e-4);
    }

    #[test]
    fn table_rows() {
        let rows = trials_table(&TABLE_SUCCESS_PROBS, BudgetMode::Rounded).unwrap();
        let got: Vec<(u64, u64)> = rows
            .iter()
            .map(|r| (r.kitaev_trials, r.const_precision_trials))
            .collect();
        assert_eq!(
            got,
            vec![(98, 3), (120, 5), (211, 13), (344, 24), (515, 39)]
        );
        for w in rows.windows(2) {
            assert!(w[1].eps < w[0].eps);
            assert!(w[1].kitaev_trials >= w[0].kitaev_trials);
        }
    }

    #[test]
    fn ratio() {
        assert!((trial_ratio() - 11.75).abs() < 1e-12);
        let eps = 1e-300;
        let k = kitaev_trials_per_bit(eps, BudgetMode::Rounded).unwrap() as f64;
        let c = const_precision_trials_raw(eps, 3).unwrap() as f64;
        assert!((k / c - 11.75).abs() < 0.1);
        assert!((98.0f64 / 3.0 - 32.67).abs() < 0.01);
    }

    #[test]
    fn binomial_tail_matches_enumeration() {
        assert_eq!(binomial_upper_tail(5, 0.3, 0), 1.0);
        assert_eq!(binomial_upper_tail(5, 0.3, 6), 0.0);
        // Pr(X >= 2), X ~ Bin(3, 1/2) = 4/8.
        assert!((binomial_upper_tail(3, 0.5, 2) - 0.5).abs() < 1e-15);
        // Brute-force enumeration over all 2^13 outcome patterns.
        let (m, p, k) = (13u64, 0.2f64, 7u64);
        let brute: f64 = (0u32..1 << m)
            .filter(|x| x.count_ones() as u64 >= k)
            .map(|x| {
                p.powi(x.count_ones() as i32) * (1.0 - p).powi((m as u32 - x.count_ones()) as i32)
            })
            .sum();
        assert!((binomial_upper_tail(m, p, k) - brute).abs() < 1e-14);
    }
}
