use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit string longer than phase width ({len} > {width})")]
    WidthOverflow { len: usize, width: u32 },

    #[error("phase width must be in 1..=64, got {0}")]
    InvalidWidth(u32),

    #[error("raw value {raw} does not fit in {width} bits")]
    RawOutOfRange { raw: u64, width: u32 },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("no trials")]
    NoTrials,

    #[error("tie-prone trial count {0}")]
    TieProneTrialCount(u64),

    #[error("indeterminate angle")]
    IndeterminateAngle,

    #[error("zero majority margin: degree {0} is below 3")]
    ZeroMajorityMargin(u32),

    #[error("failure budget must lie in (0, 1), got {0}")]
    EpsOutOfRange(f64),

    #[error("register of {0} qubits exceeds the dense cap")]
    RegisterTooLarge(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse phase {0:?}")]
    PhaseParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
