//! Monte Carlo sum-rate curves and their high-SNR slope.
//!
//! A curve averages a scheme's sum rate over independent channel draws,
//! reusing each draw across the whole SNR grid. The slope of the averaged
//! rate against `log2(rho)` estimates the degrees of freedom.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::net::{
    derive_seed, sample_channel, sample_matrix, AntennaConfig, ChannelRealization, LinkGains,
    SnrGrid,
};
use crate::schemes::{
    genie_sides, int_zf_any, rate_bc_zf, rate_int_genie_outer, rate_int_genie_side, rate_mac_zf,
    rate_ptp, rate_share_and_transmit, GenieSide,
};

fn sq(x: f64) -> f64 {
    x * x
}

/// Defaults for the slope fit.
pub const DEFAULT_WINDOW_DB: (f64, f64) = (40.0, 60.0);
pub const DEFAULT_STEP_DB: f64 = 5.0;
pub const DEFAULT_TRIALS: usize = 20;

/// A sum rate at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub sum_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub points: Vec<RatePoint>,
    /// Standard error of each averaged point across trials.
    pub point_stderr: Vec<f64>,
    pub trials: usize,
    pub scheme_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub dof_hat: f64,
    pub stderr: f64,
    pub window_db: (f64, f64),
    pub points_used: usize,
}

/// Anything that can draw a random network and rate it at a given power.
pub trait RateScheme {
    type Draw;

    fn label(&self) -> String;

    fn draw(&self, seed: u64) -> Result<Self::Draw>;

    /// Sum rate with every transmitter at total power `power` (linear).
    fn sum_rate(&self, draw: &Self::Draw, power: f64) -> Result<f64>;
}

/// Averages `trials` draws per grid point; trial `t` uses
/// `derive_seed(seed, t)` and its draw is reused across the grid.
pub fn sweep_rates<S: RateScheme>(
    scheme: &S,
    grid: &SnrGrid,
    trials: usize,
    seed: u64,
) -> Result<RateCurve> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let per_trial = (0..trials)
        .map(|t| run_trial(scheme, grid, t, derive_seed(seed, t as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(average_trials(scheme.label(), grid, &per_trial))
}

/// Rates of one trial across the grid.
pub fn run_trial<S: RateScheme>(
    scheme: &S,
    grid: &SnrGrid,
    trial: usize,
    trial_seed: u64,
) -> Result<Vec<f64>> {
    let tag = |snr_db: f64| {
        move |e: Error| Error::AtTrial {
            trial,
            snr_db,
            source: Box::new(e),
        }
    };
    let first_db = grid.points_db()[0];
    let draw = scheme.draw(trial_seed).map_err(tag(first_db))?;
    grid.points_db()
        .iter()
        .zip(grid.linear())
        .map(|(&db, rho)| scheme.sum_rate(&draw, rho).map_err(tag(db)))
        .collect()
}

/// Deterministic reduction of per-trial rate rows, in trial order.
pub fn average_trials(scheme_id: String, grid: &SnrGrid, per_trial: &[Vec<f64>]) -> RateCurve {
    let trials = per_trial.len();
    let mut points = Vec::with_capacity(grid.len());
    let mut point_stderr = Vec::with_capacity(grid.len());
    for (i, &snr_db) in grid.points_db().iter().enumerate() {
        let mean = per_trial.iter().map(|r| r[i]).sum::<f64>() / trials as f64;
        let se = if trials > 1 {
            let var = per_trial.iter().map(|r| sq(r[i] - mean)).sum::<f64>() / (trials - 1) as f64;
            libm::sqrt(var / trials as f64)
        } else {
            0.0
        };
        points.push(RatePoint {
            snr_db,
            sum_rate: mean,
        });
        point_stderr.push(se);
    }
    RateCurve {
        points,
        point_stderr,
        trials,
        scheme_id,
    }
}

/// Least-squares slope of rate against `log2(rho)` over the points whose
/// SNR lies in `[lo_db, hi_db]`.
pub fn estimate_dof(curve: &RateCurve, window_db: (f64, f64)) -> Result<SlopeEstimate> {
    let (lo, hi) = window_db;
    let eps = 1e-9;
    let xs_ys: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.snr_db >= lo - eps && p.snr_db <= hi + eps)
        .map(|p| (p.snr_db * core::f64::consts::LOG2_10 / 10.0, p.sum_rate))
        .collect();
    let n = xs_ys.len();
    if n < 3 {
        return Err(Error::WindowTooSmall { lo, hi, points: n });
    }
    let nf = n as f64;
    let x_mean = xs_ys.iter().map(|p| p.0).sum::<f64>() / nf;
    let y_mean = xs_ys.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = xs_ys.iter().map(|p| sq(p.0 - x_mean)).sum();
    let sxy: f64 = xs_ys.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs_ys
        .iter()
        .map(|p| sq(p.1 - intercept - slope * p.0))
        .sum();
    let stderr = libm::sqrt(sse.max(0.0) / (nf - 2.0) / sxx);
    Ok(SlopeEstimate {
        dof_hat: slope,
        stderr,
        window_db,
        points_used: n,
    })
}

/// Genie receiver choice for the outer-bound rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenieChoice {
    /// Minimum over every receiver whose condition holds.
    Tightest,
    Only(GenieSide),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// SVD over `h1`.
    Ptp,
    /// T1 and T2 into R1 through `[h1, z1]`.
    MacZf,
    /// T1 out to R1 and R2 through `h1` and `z2`.
    BcZf,
    IntZf,
    IntGenie(GenieChoice),
    ShareTransmit,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 8] = [
        SchemeKind::Ptp,
        SchemeKind::MacZf,
        SchemeKind::BcZf,
        SchemeKind::IntZf,
        SchemeKind::IntGenie(GenieChoice::Tightest),
        SchemeKind::IntGenie(GenieChoice::Only(GenieSide::Receiver1)),
        SchemeKind::IntGenie(GenieChoice::Only(GenieSide::Receiver2)),
        SchemeKind::ShareTransmit,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Ptp => "ptp",
            SchemeKind::MacZf => "mac-zf",
            SchemeKind::BcZf => "bc-zf",
            SchemeKind::IntZf => "int-zf",
            SchemeKind::IntGenie(GenieChoice::Tightest) => "int-genie",
            SchemeKind::IntGenie(GenieChoice::Only(GenieSide::Receiver1)) => "int-genie-r1",
            SchemeKind::IntGenie(GenieChoice::Only(GenieSide::Receiver2)) => "int-genie-r2",
            SchemeKind::ShareTransmit => "share-transmit",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::UnknownScheme(s.into()))
    }
}

/// A scheme bound to an antenna tuple and link gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkScheme {
    kind: SchemeKind,
    config: AntennaConfig,
    gains: LinkGains,
    sharing_gain: f64,
}

/// One Monte Carlo draw: the network plus, for share-and-transmit, the
/// `M x M` link between the transmitters.
#[derive(Debug, Clone)]
pub struct NetworkDraw {
    pub channel: ChannelRealization,
    pub sharing: Option<CMatrix>,
}

impl NetworkScheme {
    pub fn new(kind: SchemeKind, config: AntennaConfig, gains: LinkGains) -> Result<Self> {
        let scheme = kind.label();
        match kind {
            SchemeKind::IntGenie(GenieChoice::Tightest) if genie_sides(config).is_empty() => {
                return Err(Error::SchemeMismatch {
                    scheme,
                    reason: "needs N1 >= M2 or N2 >= M1",
                });
            }
            SchemeKind::IntGenie(GenieChoice::Only(side))
                if !genie_sides(config).contains(&side) =>
            {
                return Err(Error::SchemeMismatch {
                    scheme,
                    reason: match side {
                        GenieSide::Receiver1 => "needs N1 >= M2",
                        GenieSide::Receiver2 => "needs N2 >= M1",
                    },
                });
            }
            SchemeKind::ShareTransmit
                if config.m1() != config.m2() || config.n1() != config.n2() =>
            {
                return Err(Error::SchemeMismatch {
                    scheme,
                    reason: "needs a symmetric (m,n,m,n) network",
                });
            }
            _ => {}
        }
        Ok(Self {
            kind,
            config,
            gains,
            sharing_gain: 1.0,
        })
    }

    /// Amplitude gain of the transmitter-to-transmitter link.
    pub fn with_sharing_gain(mut self, gain: f64) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::InvalidGain(gain));
        }
        self.sharing_gain = gain;
        Ok(self)
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn config(&self) -> AntennaConfig {
        self.config
    }
}

impl RateScheme for NetworkScheme {
    type Draw = NetworkDraw;

    fn label(&self) -> String {
        self.kind.label().into()
    }

    fn draw(&self, seed: u64) -> Result<NetworkDraw> {
        let channel = sample_channel(self.config, self.gains, seed)?;
        let sharing = match self.kind {
            SchemeKind::ShareTransmit => {
                let m = self.config.m1();
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
                Some(sample_matrix(m, m, self.sharing_gain, &mut rng))
            }
            _ => None,
        };
        Ok(NetworkDraw { channel, sharing })
    }

    fn sum_rate(&self, draw: &NetworkDraw, power: f64) -> Result<f64> {
        let ch = &draw.channel;
        match self.kind {
            SchemeKind::Ptp => rate_ptp(&ch.h1, power),
            SchemeKind::MacZf => rate_mac_zf(&[ch.h1.clone(), ch.z1.clone()], power),
            SchemeKind::BcZf => rate_bc_zf(&[ch.h1.clone(), ch.z2.clone()], power),
            SchemeKind::IntZf => int_zf_any(ch, power).map(|o| o.sum_rate()),
            SchemeKind::IntGenie(GenieChoice::Tightest) => rate_int_genie_outer(ch, power),
            SchemeKind::IntGenie(GenieChoice::Only(side)) => rate_int_genie_side(ch, power, side),
            SchemeKind::ShareTransmit => {
                let tt = draw.sharing.as_ref().ok_or(Error::SchemeMismatch {
                    scheme: "share-transmit",
                    reason: "draw lacks the sharing link",
                })?;
                rate_share_and_transmit(ch, tt, power)
            }
        }
    }
}
