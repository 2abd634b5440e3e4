//! Seeded Bernoulli sampling of Hadamard-test outcomes.
//!
//! Every generator is a xoshiro256++ instance keyed by an [`RngSeed`]. The key
//! is mixed with the SplitMix64 finaliser, which is a bijection on `u64`, so
//! distinct streams under one master never share a key. Uniform doubles take
//! the top 53 bits of each output word. Nothing here depends on the platform.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(master: u64) -> Self {
        RngSeed { master, stream: 0 }
    }
}

/// SplitMix64 output for a single state word.
fn mix(x: u64) -> u64 {
    SplitMix64::seed_from_u64(x).next_u64()
}

/// Deterministic child stream for run `index` of a campaign keyed by `master`.
pub fn derive_run_seed(master: RngSeed, index: u64) -> RngSeed {
    RngSeed {
        master: master.master,
        stream: mix(master.stream ^ mix(index.wrapping_add(0x6A09_E667_F3BC_C909))),
    }
}

/// Single-owner generator for one logical run.
#[derive(Clone, Debug)]
pub struct SimRng {
    inner: Xoshiro256PlusPlus,
}

impl SimRng {
    pub fn new(seed: RngSeed) -> Self {
        let key = mix(seed.master ^ mix(seed.stream));
        SimRng {
            inner: Xoshiro256PlusPlus::seed_from_u64(key),
        }
    }

    pub fn from_master(master: u64) -> Self {
        SimRng::new(RngSeed::new(master))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random mantissa bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }
}

/// Outcome counts of repeated Hadamard tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub ones: u64,
}

impl TrialStats {
    pub fn new(trials: u64, ones: u64) -> Result<Self> {
        if ones > trials {
            return Err(Error::InvalidConfig(format!(
                "{ones} ones out of {trials} trials"
            )));
        }
        Ok(TrialStats { trials, ones })
    }
}

pub fn bernoulli(p: f64, rng: &mut SimRng) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(rng.uniform() < p)
}

pub fn run_trials(p: f64, m: u64, rng: &mut SimRng) -> Result<TrialStats> {
    if m == 0 {
        return Err(Error::NoTrials);
    }
    let mut ones = 0;
    for _ in 0..m {
        ones += bernoulli(p, rng)? as u64;
    }
    Ok(TrialStats { trials: m, ones })
}

/// Maximum-likelihood estimate `h / t` of the outcome-1 probability.
pub fn frequency_estimate(stats: TrialStats) -> Result<f64> {
    if stats.trials == 0 {
        return Err(Error::NoTrials);
    }
    Ok(stats.ones as f64 / stats.trials as f64)
}

/// Majority vote; only odd trial counts are accepted.
pub fn majority(stats: TrialStats) -> Result<bool> {
    if stats.trials.is_multiple_of(2) {
        return Err(Error::TieProneTrialCount(stats.trials));
    }
    Ok(2 * stats.ones > stats.trials)
}

pub fn round_up_to_odd(m: u64) -> u64 {
    m | 1
}

/// Runs `runs` independent jobs in parallel, each on its own derived stream.
/// The output is ordered by run index regardless of scheduling.
pub fn run_indexed<T, F>(master: RngSeed, runs: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync,
{
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = SimRng::new(derive_run_seed(master, i));
            job(i, &mut rng)
        })
        .collect()
}
