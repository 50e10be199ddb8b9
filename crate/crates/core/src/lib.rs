//! Degrees of freedom of two-user MIMO networks.
//!
//! The crate evaluates closed-form inner and outer DoF bounds
//! ([`formulas`]), runs the zero-forcing, SVD and genie-aided schemes that
//! realize them at finite SNR ([`schemes`]), and recovers the DoF numerically
//! as the high-SNR slope of Monte Carlo sum-rate curves ([`estimator`]).
//!
//! `no_std` with `alloc`; file formats and the command line live in the
//! companion `mimo-dof-cli` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod formulas;
pub mod linalg;
pub mod net;
pub mod schemes;

pub use error::{Error, Result};
pub use estimator::{
    estimate_dof, sweep_rates, NetworkScheme, RateCurve, RatePoint, RateScheme, SchemeKind,
    SlopeEstimate,
};
pub use formulas::{DofBounds, RelayConfig};
pub use net::{
    path_gain, sample_channel, snr_grid, AntennaConfig, ChannelRealization, LinkGains, SnrGrid,
};
