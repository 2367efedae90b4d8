use alloc::string::String;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration has {found} entries but the molecule has {expected} modes")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid molecule: {0}")]
    Validation(ValidationReport),

    /// `(1 + K)^N` exceeds the enumeration budget. `count` is `None` when the
    /// count does not even fit in 128 bits.
    #[error("refusing to enumerate {}: budget is {budget} configurations; use the sampler instead", StateCountDisplay(*.count))]
    EnumerationBudget { count: Option<u128>, budget: u64 },

    #[error("cannot normalize: {0}")]
    CannotNormalize(String),

    #[error("spectrum is empty or all-zero")]
    EmptySpectrum,

    #[error("invalid energy grid: {0}")]
    Grid(String),
}

struct StateCountDisplay(Option<u128>);

impl core::fmt::Display for StateCountDisplay {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n} configurations"),
            None => f.write_str("more than 2^128 configurations"),
        }
    }
}
