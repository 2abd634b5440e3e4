//! Closed-form outcome distribution of textbook QPE on an eigenvector input.
//!
//! After the controlled powers the register holds `2^(-n/2) sum_k e^(2 pi i phi k)|k>`;
//! the inverse QFT then yields outcome `y` with probability
//! `|2^-n sum_k e^(2 pi i (phi - y/2^n) k)|^2`, a Dirichlet kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::full_qft_estimate;
use crate::phase::Phase;
use crate::sampling::SimRng;

/// Largest register handled densely.
pub const MAX_REGISTER: u32 = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub n: u32,
    pub probs: Vec<f64>,
}

fn check_register(n: u32) -> Result<()> {
    if n == 0 || n > MAX_REGISTER {
        return Err(Error::RegisterTooLarge(n));
    }
    Ok(())
}

/// `phi - y / 2^n` as raw 64-bit two's complement (exact).
fn offset_raw(phi: Phase, n: u32, y: u64) -> u64 {
    let phi_raw = phi.widen(64).raw();
    phi_raw.wrapping_sub(y << (64 - n))
}

/// Closed-form probability of outcome `y`.
fn kernel(phi: Phase, n: u32, y: u64) -> f64 {
    let delta = offset_raw(phi, n, y) as i64 as f64 * 2f64.powi(-64);
    if delta.abs() < 2f64.powi(-60) {
        // sin(2^n pi d)^2 / (4^n sin(pi d)^2) -> 1 as d -> 0; first-order correction.
        let x = PI * delta;
        let scale = 2f64.powi(n as i32);
        return 1.0 - (scale * scale - 1.0) * x * x / 3.0;
    }
    let num = (2f64.powi(n as i32) * PI * delta).sin();
    let den = 2f64.powi(n as i32) * (PI * delta).sin();
    (num / den).powi(2)
}

/// Direct summation of the amplitude; the angles are formed exactly in
/// 64-bit fixed point before the trigonometric call.
fn direct(phi: Phase, n: u32, y: u64) -> f64 {
    let d = offset_raw(phi, n, y);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for k in 0..1u64 << n {
        let angle = 2.0 * PI * (d.wrapping_mul(k) >> 11) as f64 * 2f64.powi(-53);
        re += angle.cos();
        im += angle.sin();
    }
    let norm = 2f64.powi(-(n as i32));
    (re * norm).powi(2) + (im * norm).powi(2)
}

/// Exact outcome distribution by the closed-form kernel.
pub fn qpe_distribution_exact(phi: Phase, n: u32) -> Result<OutcomeDistribution> {
    check_register(n)?;
    Ok(OutcomeDistribution {
        n,
        probs: (0..1u64 << n).map(|y| kernel(phi, n, y)).collect(),
    })
}

/// Same distribution by explicit summation over `2^n` amplitudes per outcome.
pub fn qpe_distribution_direct(phi: Phase, n: u32) -> Result<OutcomeDistribution> {
    check_register(n)?;
    Ok(OutcomeDistribution {
        n,
        probs: (0..1u64 << n).map(|y| direct(phi, n, y)).collect(),
    })
}

/// Mass on the two outcomes adjacent to `2^n phi` (one outcome if exact).
pub fn best_outcome_mass(dist: &OutcomeDistribution, phi: Phase) -> f64 {
    let n = dist.n;
    let scaled = phi.widen(64).raw();
    let lo = scaled >> (64 - n);
    let exact = scaled << n == 0;
    let hi = if exact { lo } else { (lo + 1) % (1u64 << n) };
    if lo == hi {
        dist.probs[lo as usize]
    } else {
        dist.probs[lo as usize] + dist.probs[hi as usize]
    }
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Runs the full-window semiclassical estimator `samples` times and returns
/// the total-variation distance of its histogram to the exact distribution.
pub fn empirical_vs_exact(phi: Phase, n: u32, samples: u64, rng: &mut SimRng) -> Result<f64> {
    if n > 10 {
        return Err(Error::RegisterTooLarge(n));
    }
    if samples == 0 {
        return Err(Error::NoTrials);
    }
    let exact = qpe_distribution_exact(phi, n)?;
    let mut counts = vec![0u64; 1 << n];
    for _ in 0..samples {
        let res = full_qft_estimate(phi, n, rng)?;
        counts[res.bits.to_integer() as usize] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    Ok(total_variation(&empirical, &exact.probs))
}
