use alloc::boxed::Box;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("antenna count `{name}` must be at least 1")]
    ZeroAntennas { name: &'static str },

    #[error("malformed antenna tuple `{0}`")]
    MalformedConfig(alloc::string::String),

    #[error("distance must be positive and finite, got {0}")]
    InvalidDistance(f64),

    #[error("path-loss exponent must be nonnegative and finite, got {0}")]
    InvalidExponent(f64),

    #[error("link gain must be nonnegative and finite, got {0}")]
    InvalidGain(f64),

    #[error("invalid SNR range: lo={lo} dB, hi={hi} dB, step={step} dB")]
    InvalidSnrRange { lo: f64, hi: f64, step: f64 },

    #[error("SNR grid needs at least 2 strictly ascending points")]
    InvalidSnrGrid,

    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),

    #[error("channel draw stayed rank deficient after {attempts} attempts (degenerate gain?)")]
    DegenerateChannel { attempts: u32 },

    #[error("{what} is rank deficient")]
    RankDeficient { what: &'static str },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },

    #[error("antenna tuple is not canonical: link 1 must carry the most antennas")]
    NonCanonical,

    #[error("genie outer bound needs N{receiver} >= M{interferer} (have {have_rx} < {have_tx})")]
    GenieInapplicable {
        receiver: u8,
        interferer: u8,
        have_rx: usize,
        have_tx: usize,
    },

    #[error("no genie condition holds (need N1 >= M2 or N2 >= M1)")]
    NoGenieCondition,

    #[error("scheme `{scheme}` does not apply: {reason}")]
    SchemeMismatch {
        scheme: &'static str,
        reason: &'static str,
    },

    #[error("unknown scheme label `{0}`")]
    UnknownScheme(alloc::string::String),

    #[error("residual cross-link interference ratio {ratio:e} exceeds 1e-6")]
    ResidualInterference { ratio: f64 },

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("slope window [{lo}, {hi}] dB holds {points} curve points, need at least 3")]
    WindowTooSmall { lo: f64, hi: f64, points: usize },

    #[error("trial {trial} at {snr_db} dB: {source}")]
    AtTrial {
        trial: usize,
        snr_db: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
