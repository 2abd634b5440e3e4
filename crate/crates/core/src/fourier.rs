//! Semiclassical inverse-QFT phase estimation with a bounded correction window.
//!
//! Bits are measured least-significant first. Before measuring bit `i`, the
//! stage phase `2^(i-1) phi` is corrected by the `window` most recently decided
//! bits (bit `i + l` through a controlled `R_(l+1)^-1`), then a Hadamard and a
//! measurement decide the bit. With `reps > 1` the identical test is repeated
//! and the majority decides.
//!
//! One engine covers three estimators:
//!
//! * full inverse QFT: `window = n - 1`, one shot per bit;
//! * AQFT of degree `m`: `window = m - 1`, one shot per bit;
//! * constant precision of degree `m`: `window = m - 1`, majority over a
//!   Chernoff-sized batch, plus guard stages run first and discarded.

use serde::{Deserialize, Serialize};

use crate::bounds::const_precision_trials;
use crate::error::{Error, Result};
use crate::estimate::{EstimationResult, StageLog};
use crate::kitaev::widen_to;
use crate::phase::{
    corrected_residual, double_k, phase_from_bits, post_h_prob_one, BitString, Phase,
    DEFAULT_WIDTH, GUARD_BITS,
};
use crate::sampling::{majority, run_trials, SimRng};

/// Guard stages used by the constant-precision estimator.
pub const DEFAULT_GUARD: u32 = 2;

/// Source of the bits used as phase corrections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feedback {
    /// Previously decided (majority) bits, as a real device would use.
    Estimated,
    /// True bits of the phase; isolates the per-test analysis.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub n: u32,
    pub window: u32,
    pub reps: u64,
    pub guard: u32,
    pub feedback: Feedback,
    pub width: u32,
}

impl EstimatorConfig {
    pub fn full_qft(n: u32) -> Self {
        EstimatorConfig {
            n,
            window: n.saturating_sub(1),
            reps: 1,
            guard: 0,
            feedback: Feedback::Estimated,
            width: DEFAULT_WIDTH,
        }
    }

    pub fn aqft(n: u32, degree: u32) -> Self {
        EstimatorConfig {
            window: degree.saturating_sub(1),
            ..EstimatorConfig::full_qft(n)
        }
    }

    /// Degree of the highest phase-shift gate in use.
    pub fn degree(&self) -> u32 {
        self.window + 1
    }

    pub fn stages(&self) -> u32 {
        self.n + self.guard
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.reps == 0 || self.reps.is_multiple_of(2) {
            return Err(Error::TieProneTrialCount(self.reps));
        }
        if self.reps > 1 && self.degree() < 3 {
            return Err(Error::ZeroMajorityMargin(self.degree()));
        }
        let needed = self.n as u64 + self.guard as u64 + self.window as u64;
        if needed + GUARD_BITS as u64 > self.width as u64 {
            return Err(Error::InvalidConfig(format!(
                "n + guard + window = {needed} exceeds phase width {} less {GUARD_BITS} guard bits",
                self.width
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierStage {
    /// Bit position `i` (weight `2^-i`).
    pub stage: u32,
    pub residual: Phase,
    pub trials: u64,
    pub ones: u64,
    pub bit: bool,
}

/// Corrections for stage `i`, nearest bit first.
fn corrections(phi: Phase, cfg: &EstimatorConfig, stage: u32, decided: &[bool]) -> BitString {
    (1..=cfg.window)
        .map(|l| stage + l)
        .filter_map(|pos| match cfg.feedback {
            Feedback::Estimated => (pos <= cfg.stages()).then(|| decided[pos as usize]),
            Feedback::Oracle => Some(phi.bit(pos)),
        })
        .collect::<Vec<_>>()
        .into()
}

/// Residual phase presented to the final Hadamard at `stage`.
pub fn stage_residual(phi: Phase, cfg: &EstimatorConfig, stage: u32, decided: &[bool]) -> Phase {
    corrected_residual(
        double_k(phi, stage - 1),
        &corrections(phi, cfg, stage, decided),
    )
}

pub fn semiclassical_estimate(
    phi: Phase,
    cfg: &EstimatorConfig,
    rng: &mut SimRng,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let phi = widen_to(phi, cfg.width)?;
    let total = cfg.stages();
    // decided[pos] holds bit `pos`; index 0 is unused.
    let mut decided = vec![false; total as usize + 1];
    let mut log = Vec::with_capacity(total as usize);
    for stage in (1..=total).rev() {
        let residual = stage_residual(phi, cfg, stage, &decided);
        let stats = run_trials(post_h_prob_one(residual), cfg.reps, rng)?;
        let bit = majority(stats)?;
        decided[stage as usize] = bit;
        log.push(FourierStage {
            stage,
            residual,
            trials: stats.trials,
            ones: stats.ones,
            bit,
        });
    }
    let bits = BitString::new(decided[1..=cfg.n as usize].to_vec());
    Ok(EstimationResult {
        estimate: phase_from_bits(&bits, cfg.width)?,
        bits,
        stages: log.into_iter().map(StageLog::Fourier).collect(),
        total_tests: cfg.reps * total as u64,
        warnings: vec![],
    })
}

/// Textbook QPE: every prior bit corrects every later one, one shot per bit.
pub fn full_qft_estimate(phi: Phase, n: u32, rng: &mut SimRng) -> Result<EstimationResult> {
    semiclassical_estimate(phi, &EstimatorConfig::full_qft(n), rng)
}

pub fn aqft_estimate(
    phi: Phase,
    n: u32,
    degree: u32,
    rng: &mut SimRng,
) -> Result<EstimationResult> {
    if degree < 2 {
        return Err(Error::InvalidConfig(format!(
            "AQFT degree {degree} is below 2"
        )));
    }
    semiclassical_estimate(phi, &EstimatorConfig::aqft(n, degree), rng)
}

/// Configuration for the constant-precision estimator with a per-run failure
/// budget `eps`, split evenly over the `n` reported bits.
pub fn constant_precision_config(n: u32, degree: u32, eps: f64) -> Result<EstimatorConfig> {
    if degree < 3 {
        return Err(Error::ZeroMajorityMargin(degree));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    Ok(EstimatorConfig {
        reps: const_precision_trials(eps / n as f64, degree)?,
        guard: DEFAULT_GUARD,
        ..EstimatorConfig::aqft(n, degree)
    })
}

pub fn constant_precision_estimate(
    phi: Phase,
    n: u32,
    degree: u32,
    eps: f64,
    rng: &mut SimRng,
) -> Result<EstimationResult> {
    semiclassical_estimate(phi, &constant_precision_config(n, degree, eps)?, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleStage {
    pub stage: u32,
    pub residual: Phase,
    pub target: bool,
    /// Probability one shot returns the true bit.
    pub success: f64,
}

/// Per-stage residuals and single-shot success probabilities under oracle
/// corrections; no sampling involved.
pub fn oracle_stage_profile(phi: Phase, n: u32, window: u32) -> Vec<OracleStage> {
    let cfg = EstimatorConfig {
        n,
        window,
        reps: 1,
        guard: 0,
        feedback: Feedback::Oracle,
        width: phi.width(),
    };
    (1..=n)
        .map(|stage| {
            let residual = stage_residual(phi, &cfg, stage, &[]);
            let p1 = post_h_prob_one(residual);
            let target = phi.bit(stage);
            OracleStage {
                stage,
                residual,
                target,
                success: if target { p1 } else { 1.0 - p1 },
            }
        })
        .collect()
}
