//! Result type shared by every estimator.

use serde::{Deserialize, Serialize};

use crate::fourier::FourierStage;
use crate::kitaev::StageEstimate;
use crate::phase::{mod1_distance, BitString, Phase};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StageLog {
    Kitaev(StageEstimate),
    Fourier(FourierStage),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub bits: BitString,
    pub estimate: Phase,
    pub stages: Vec<StageLog>,
    /// Hadamard tests performed, i.e. controlled-`U^(2^k)` applications.
    pub total_tests: u64,
    pub warnings: Vec<String>,
}

impl EstimationResult {
    /// Circular error of the estimate against the true phase.
    pub fn error(&self, phi: Phase) -> f64 {
        mod1_distance(self.estimate, phi)
    }
}

/// Within one unit of the last requested bit: `|est - phi| mod 1 <= 2^-n`.
pub fn is_success(result: &EstimationResult, phi: Phase, n: u32) -> bool {
    result.error(phi) <= 2f64.powi(-(n as i32))
}
