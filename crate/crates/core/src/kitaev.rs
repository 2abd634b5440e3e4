//! Kitaev's estimator: per-stage sine and cosine Hadamard-test batteries,
//! arctangent reconstruction, snapping to eighths, and bit stitching.
//!
//! Stage `k` estimates `phi_k = 2^(k-1) phi` to within 1/16 and replaces it by
//! the nearest eighth `beta_k`. The three digits of `beta_n` seed the low end
//! of the answer; each earlier `beta_k` then selects bit `x_k` as the
//! candidate `0.x x_(k+1) x_(k+2)` lying within 1/4 of it. The result has
//! `n + 2` bits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{kitaev_trials_per_basis, BudgetMode};
use crate::error::{Error, Result};
use crate::estimate::{EstimationResult, StageLog};
use crate::phase::{
    double_k, hadamard_probs, mod1_distance, phase_from_bits, BitString, Phase, TestBasis,
    DEFAULT_WIDTH, GUARD_BITS,
};
use crate::sampling::{frequency_estimate, run_trials, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEstimate {
    pub k: u32,
    /// Estimate of `sin(2 pi phi_k)`, clamped to `[-1, 1]`.
    pub sin_est: f64,
    /// Estimate of `cos(2 pi phi_k)`, clamped to `[-1, 1]`.
    pub cos_est: f64,
    pub phi_tilde: Phase,
    /// `beta_k = beta / 8`.
    pub beta: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KitaevConfig {
    pub n: u32,
    pub eps: f64,
    /// Overrides the Chernoff per-basis count `m1`.
    pub trials_per_test: Option<u64>,
    pub width: u32,
    pub mode: BudgetMode,
}

impl KitaevConfig {
    pub fn new(n: u32, eps: f64) -> Self {
        KitaevConfig {
            n,
            eps,
            trials_per_test: None,
            width: DEFAULT_WIDTH,
            mode: BudgetMode::Rounded,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::EpsOutOfRange(self.eps));
        }
        if self.n + 2 + GUARD_BITS > self.width {
            return Err(Error::InvalidConfig(format!(
                "{} output bits need a phase width of at least {}",
                self.n + 2,
                self.n + 2 + GUARD_BITS
            )));
        }
        if self.trials_per_test == Some(0) {
            return Err(Error::NoTrials);
        }
        Ok(())
    }

    /// `m1`, the number of trials in each of the two bases per stage.
    pub fn trials_per_basis(&self) -> Result<u64> {
        match self.trials_per_test {
            Some(m1) => Ok(m1),
            None => kitaev_trials_per_basis(self.n, self.eps, self.mode),
        }
    }
}

/// Full-circle angle `atan2(s, t) / 2 pi` as a phase. Using both signs picks
/// the right one of `phi_k` and `phi_k + 1/2`.
pub fn arctan_phase(s: f64, t: f64, width: u32) -> Result<Phase> {
    if s == 0.0 && t == 0.0 {
        return Err(Error::IndeterminateAngle);
    }
    Phase::from_f64(s.atan2(t) / (2.0 * PI), width)
}

/// Index `j` of the nearest eighth `j/8`; ties go to the smaller index.
pub fn snap_beta(phi_tilde: Phase) -> u8 {
    let w = phi_tilde.width().max(3);
    let phi = phi_tilde.widen(w);
    let mut best = (0u8, f64::INFINITY);
    for j in 0..8u8 {
        let eighth = Phase::new((j as u64) << (w - 3), w).expect("eighth fits");
        let d = mod1_distance(phi, eighth);
        if d < best.1 {
            best = (j, d);
        }
    }
    best.0
}

/// Builds a stage record from the two outcome frequencies: `p0` of the cosine
/// test and `p1` of the sine test.
pub fn stage_from_frequencies(
    k: u32,
    cos_p0: f64,
    sin_p1: f64,
    width: u32,
) -> Result<StageEstimate> {
    let cos_est = (2.0 * cos_p0 - 1.0).clamp(-1.0, 1.0);
    let sin_est = (2.0 * sin_p1 - 1.0).clamp(-1.0, 1.0);
    let phi_tilde = arctan_phase(sin_est, cos_est, width)?;
    Ok(StageEstimate {
        k,
        sin_est,
        cos_est,
        phi_tilde,
        beta: snap_beta(phi_tilde),
    })
}

/// Runs `m1` cosine and `m1` sine tests on `phi_k = 2^(k-1) phi`.
pub fn estimate_stage(phi: Phase, k: u32, m1: u64, rng: &mut SimRng) -> Result<StageEstimate> {
    let phi_k = double_k(phi, k - 1);
    let (cos_p0, _) = hadamard_probs(phi_k, TestBasis::Cosine);
    let (_, sin_p1) = hadamard_probs(phi_k, TestBasis::Sine);
    // Sample ones of the cosine test; Pr(0) is its complement.
    let cos_ones = run_trials(1.0 - cos_p0, m1, rng)?;
    let sin_ones = run_trials(sin_p1, m1, rng)?;
    stage_from_frequencies(
        k,
        1.0 - frequency_estimate(cos_ones)?,
        frequency_estimate(sin_ones)?,
        phi.width(),
    )
}

/// Noiseless stage: frequencies replaced by the exact probabilities.
pub fn exact_stage(phi: Phase, k: u32) -> Result<StageEstimate> {
    let phi_k = double_k(phi, k - 1);
    let (cos_p0, _) = hadamard_probs(phi_k, TestBasis::Cosine);
    let (_, sin_p1) = hadamard_probs(phi_k, TestBasis::Sine);
    stage_from_frequencies(k, cos_p0, sin_p1, phi.width())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stitched {
    pub bits: BitString,
    /// Stages where neither candidate was strictly within 1/4 of `beta_k`.
    pub ambiguous_stages: Vec<u32>,
}

/// Circular distance between two multiples of 1/8, in eighths.
fn eighths_distance(a: u8, b: u8) -> u8 {
    let d = (a as i16 - b as i16).rem_euclid(8) as u8;
    d.min(8 - d)
}

/// Back-substitutes `betas` (`betas[k-1] = 8 beta_k`) into `n + 2` bits.
pub fn stitch_bits(betas: &[u8]) -> Result<Stitched> {
    let n = betas.len();
    if n == 0 {
        return Err(Error::InvalidConfig("no stages to stitch".into()));
    }
    let mut bits = vec![false; n + 2];
    let last = betas[n - 1] & 7;
    bits[n - 1] = last & 4 != 0;
    bits[n] = last & 2 != 0;
    bits[n + 1] = last & 1 != 0;
    let mut ambiguous_stages = Vec::new();
    for k in (1..n).rev() {
        // bits[k] is x_(k+1).
        let tail = (bits[k] as u8) << 1 | bits[k + 1] as u8;
        let beta = betas[k - 1] & 7;
        let d0 = eighths_distance(tail, beta);
        let d1 = eighths_distance(4 | tail, beta);
        bits[k - 1] = if d0 < 2 {
            false
        } else if d1 < 2 {
            true
        } else {
            ambiguous_stages.push(k as u32);
            d1 < d0
        };
    }
    Ok(Stitched {
        bits: BitString::new(bits),
        ambiguous_stages,
    })
}

fn assemble(stages: Vec<StageEstimate>, width: u32, total_tests: u64) -> Result<EstimationResult> {
    let betas: Vec<u8> = stages.iter().map(|s| s.beta).collect();
    let stitched = stitch_bits(&betas)?;
    let warnings = stitched
        .ambiguous_stages
        .iter()
        .map(|k| format!("stage {k}: no candidate within 1/4 of beta, took the closer"))
        .collect();
    Ok(EstimationResult {
        estimate: phase_from_bits(&stitched.bits, width)?,
        bits: stitched.bits,
        stages: stages.into_iter().map(StageLog::Kitaev).collect(),
        total_tests,
        warnings,
    })
}

/// Sampled end-to-end run producing `n + 2` bits.
pub fn kitaev_estimate(
    phi: Phase,
    cfg: &KitaevConfig,
    rng: &mut SimRng,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let phi = widen_to(phi, cfg.width)?;
    let m1 = cfg.trials_per_basis()?;
    let mut stages = (1..=cfg.n)
        .rev()
        .map(|k| estimate_stage(phi, k, m1, rng))
        .collect::<Result<Vec<_>>>()?;
    stages.reverse();
    assemble(stages, cfg.width, 2 * m1 * cfg.n as u64)
}

/// End-to-end run with exact probabilities in place of sampling.
pub fn kitaev_estimate_noiseless(phi: Phase, n: u32) -> Result<EstimationResult> {
    // Narrow inputs are widened so the stitched output and guard bits fit.
    let width = phi.width().max((n + 2 + GUARD_BITS).min(DEFAULT_WIDTH));
    let cfg = KitaevConfig {
        width,
        ..KitaevConfig::new(n, 0.5)
    };
    cfg.validate()?;
    let phi = phi.widen(width);
    let stages = (1..=n)
        .map(|k| exact_stage(phi, k))
        .collect::<Result<Vec<_>>>()?;
    assemble(stages, width, 0)
}

pub(crate) fn widen_to(phi: Phase, width: u32) -> Result<Phase> {
    if phi.width() > width {
        return Err(Error::InvalidConfig(format!(
            "phase has {} bits, configured width is {width}",
            phi.width()
        )));
    }
    Ok(phi.widen(width))
}
