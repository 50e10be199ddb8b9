//! Two-link network model: antenna counts, per-matrix gains, random channel
//! draws and SNR grids.
//!
//! Link 1 runs T1 -> R1 through `h1` (N1 x M1), link 2 runs T2 -> R2 through
//! `h2` (N2 x M2). Cross paths are `z1` (T2 -> R1, N1 x M2) and `z2`
//! (T1 -> R2, N2 x M1).

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{is_full_rank, CMatrix, C64};

/// Consecutive rank-deficient draws tolerated before `sample_channel` gives up.
pub const MAX_RESAMPLES: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    m1: usize,
    n1: usize,
    m2: usize,
    n2: usize,
}

impl AntennaConfig {
    pub fn new(m1: usize, n1: usize, m2: usize, n2: usize) -> Result<Self> {
        for (name, v) in [("m1", m1), ("n1", n1), ("m2", m2), ("n2", n2)] {
            if v == 0 {
                return Err(Error::ZeroAntennas { name });
            }
        }
        Ok(Self { m1, n1, m2, n2 })
    }

    pub fn m1(&self) -> usize {
        self.m1
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn m2(&self) -> usize {
        self.m2
    }
    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (self.m1, self.n1, self.m2, self.n2)
    }

    /// Link 1 carries the most antennas at either end.
    pub fn is_canonical(&self) -> bool {
        self.m1.max(self.n1) >= self.m2.max(self.n2)
    }

    /// Exchange the roles of link 1 and link 2.
    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            n1: self.n2,
            m2: self.m1,
            n2: self.n1,
        }
    }

    /// Reciprocal network: transmitters and receivers exchange roles.
    pub fn reciprocal(&self) -> Self {
        Self {
            m1: self.n1,
            n1: self.m1,
            m2: self.n2,
            n2: self.m2,
        }
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.m1, self.n1, self.m2, self.n2)
    }
}

/// Parses `m1,n1,m2,n2`.
impl FromStr for AntennaConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let counts = parse_counts::<4>(s)?;
        Self::new(counts[0], counts[1], counts[2], counts[3])
    }
}

pub(crate) fn parse_counts<const K: usize>(s: &str) -> Result<[usize; K]> {
    let malformed = || Error::MalformedConfig(s.into());
    let mut out = [0usize; K];
    let mut parts = s.split(',');
    for slot in out.iter_mut() {
        *slot = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(malformed)?;
    }
    if parts.next().is_some() {
        return Err(malformed());
    }
    Ok(out)
}

/// Amplitude scale applied to each channel matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub h1: f64,
    pub h2: f64,
    pub z1: f64,
    pub z2: f64,
}

impl LinkGains {
    pub fn uniform(g: f64) -> Self {
        Self {
            h1: g,
            h2: g,
            z1: g,
            z2: g,
        }
    }

    pub fn unit() -> Self {
        Self::uniform(1.0)
    }

    fn validate(&self) -> Result<()> {
        for g in [self.h1, self.h2, self.z1, self.z2] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidGain(g));
            }
        }
        Ok(())
    }
}

impl Default for LinkGains {
    fn default() -> Self {
        Self::unit()
    }
}

/// Amplitude scale `distance^(-exponent/2)`, so received power falls as
/// `distance^(-exponent)`.
pub fn path_gain(distance: f64, exponent: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::InvalidDistance(distance));
    }
    if !(exponent.is_finite() && exponent >= 0.0) {
        return Err(Error::InvalidExponent(exponent));
    }
    Ok(libm::pow(distance, -exponent / 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub z1: CMatrix,
    pub z2: CMatrix,
}

impl ChannelRealization {
    /// Checks the four shapes agree with a single antenna tuple.
    pub fn new(h1: CMatrix, h2: CMatrix, z1: CMatrix, z2: CMatrix) -> Result<Self> {
        let (n1, m1) = h1.shape();
        let (n2, m2) = h2.shape();
        if z1.shape() != (n1, m2) {
            return Err(Error::DimensionMismatch {
                what: "z1 must be N1 x M2",
            });
        }
        if z2.shape() != (n2, m1) {
            return Err(Error::DimensionMismatch {
                what: "z2 must be N2 x M1",
            });
        }
        AntennaConfig::new(m1, n1, m2, n2)?;
        Ok(Self { h1, h2, z1, z2 })
    }

    pub fn config(&self) -> AntennaConfig {
        AntennaConfig {
            m1: self.h1.ncols(),
            n1: self.h1.nrows(),
            m2: self.h2.ncols(),
            n2: self.h2.nrows(),
        }
    }

    /// Relabels the links so that link 2 becomes link 1.
    pub fn swapped(&self) -> Self {
        Self {
            h1: self.h2.clone(),
            h2: self.h1.clone(),
            z1: self.z2.clone(),
            z2: self.z1.clone(),
        }
    }

    /// The Z channel obtained by removing the T1 -> R2 path.
    pub fn into_z_channel(mut self) -> Self {
        self.z2.fill(C64::new(0.0, 0.0));
        self
    }

    pub fn is_full_rank(&self) -> bool {
        [&self.h1, &self.h2, &self.z1, &self.z2]
            .iter()
            .all(|m| is_full_rank(m))
    }
}

/// Fills a `rows x cols` matrix with i.i.d. CN(0, gain^2) entries.
pub fn sample_matrix(rows: usize, cols: usize, gain: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let scale = gain * core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(scale * re, scale * im)
    })
}

/// Rich-scattering draw of all four matrices, deterministic in `seed`.
pub fn sample_channel(
    config: AntennaConfig,
    gains: LinkGains,
    seed: u64,
) -> Result<ChannelRealization> {
    sample_channel_counted(config, gains, seed).map(|(ch, _)| ch)
}

/// As [`sample_channel`], also reporting how many draws were rejected.
pub fn sample_channel_counted(
    config: AntennaConfig,
    gains: LinkGains,
    seed: u64,
) -> Result<(ChannelRealization, u32)> {
    gains.validate()?;
    let (m1, n1, m2, n2) = config.as_tuple();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for rejected in 0..MAX_RESAMPLES {
        let ch = ChannelRealization {
            h1: sample_matrix(n1, m1, gains.h1, &mut rng),
            h2: sample_matrix(n2, m2, gains.h2, &mut rng),
            z1: sample_matrix(n1, m2, gains.z1, &mut rng),
            z2: sample_matrix(n2, m1, gains.z2, &mut rng),
        };
        if ch.is_full_rank() {
            return Ok((ch, rejected));
        }
    }
    Err(Error::DegenerateChannel {
        attempts: MAX_RESAMPLES,
    })
}

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ascending SNR points in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrGrid {
    points_db: Vec<f64>,
}

impl SnrGrid {
    pub fn new(points_db: Vec<f64>) -> Result<Self> {
        let ascending = points_db.windows(2).all(|w| w[0] < w[1]);
        if points_db.len() < 2 || !ascending || points_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSnrGrid);
        }
        Ok(Self { points_db })
    }

    pub fn points_db(&self) -> &[f64] {
        &self.points_db
    }

    pub fn len(&self) -> usize {
        self.points_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points_db.is_empty()
    }

    /// Linear SNR per point.
    pub fn linear(&self) -> impl Iterator<Item = f64> + '_ {
        self.points_db.iter().map(|&db| db_to_linear(db))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Inclusive arithmetic grid `lo, lo + step, ..., <= hi`.
pub fn snr_grid(lo_db: f64, hi_db: f64, step_db: f64) -> Result<SnrGrid> {
    let bad = || Error::InvalidSnrRange {
        lo: lo_db,
        hi: hi_db,
        step: step_db,
    };
    if !(lo_db.is_finite() && hi_db.is_finite() && step_db.is_finite())
        || step_db <= 0.0
        || lo_db >= hi_db
    {
        return Err(bad());
    }
    let steps = libm::floor((hi_db - lo_db) / step_db + 1e-9) as usize;
    let points = (0..=steps).map(|i| lo_db + i as f64 * step_db).collect();
    SnrGrid::new(points).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;

    #[test]
    fn config_rejects_zero() {
        assert_eq!(
            AntennaConfig::new(1, 0, 1, 1),
            Err(Error::ZeroAntennas { name: "n1" })
        );
    }

    #[test]
    fn config_parsing() {
        let c: AntennaConfig = "2, 3,2,3".parse().unwrap();
        assert_eq!(c.as_tuple(), (2, 3, 2, 3));
        assert!("2,3,2".parse::<AntennaConfig>().is_err());
        assert!("2,3,2,3,1".parse::<AntennaConfig>().is_err());
        assert!("2,x,2,3".parse::<AntennaConfig>().is_err());
        assert!("0,1,1,1".parse::<AntennaConfig>().is_err());
        assert_eq!(alloc::format!("{c}"), "2,3,2,3");
    }

    #[test]
    fn canonical_flag() {
        assert!(AntennaConfig::new(3, 2, 2, 3).unwrap().is_canonical());
        assert!(!AntennaConfig::new(2, 2, 3, 2).unwrap().is_canonical());
    }

    #[test]
    fn determinism() {
        let c = AntennaConfig::new(1, 1, 1, 1).unwrap();
        let a = sample_channel(c, LinkGains::unit(), 42).unwrap();
        let b = sample_channel(c, LinkGains::unit(), 42).unwrap();
        assert_eq!(a, b);
        let other = sample_channel(c, LinkGains::unit(), 43).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn shapes_follow_link_layout() {
        let c = AntennaConfig::new(2, 3, 2, 3).unwrap();
        let ch = sample_channel(c, LinkGains::unit(), 7).unwrap();
        assert_eq!(ch.h1.shape(), (3, 2));
        assert_eq!(ch.z1.shape(), (3, 2));
        assert_eq!(ch.z2.shape(), (3, 2));
        assert_eq!(ch.h2.shape(), (3, 2));
        assert_eq!(ch.config(), c);
    }

    #[test]
    fn entry_variance_matches_gain() {
        // Sample variance over 10^4 draws of each h1 entry, |h|^2 has mean gain^2.
        let c = AntennaConfig::new(4, 1, 4, 1).unwrap();
        let draws = 10_000;
        let mut acc = [0.0f64; 4];
        for seed in 0..draws {
            let ch = sample_channel(c, LinkGains::unit(), seed).unwrap();
            for (j, a) in acc.iter_mut().enumerate() {
                *a += ch.h1[(0, j)].norm_sqr();
            }
        }
        for a in acc {
            let var = a / draws as f64;
            assert!((var - 1.0).abs() < 0.05, "variance {var}");
        }
    }

    #[test]
    fn gain_scales_singular_values() {
        let c = AntennaConfig::new(3, 2, 2, 3).unwrap();
        let base = sample_channel(c, LinkGains::unit(), 11).unwrap();
        let scaled = sample_channel(
            c,
            LinkGains {
                z2: 2.5,
                ..LinkGains::unit()
            },
            11,
        )
        .unwrap();
        let a = singular_values(&base.z2);
        let b = singular_values(&scaled.z2);
        for (x, y) in a.iter().zip(&b) {
            assert!((y - 2.5 * x).abs() < 1e-12 * y.max(1.0));
        }
        assert_eq!(base.h1, scaled.h1);
    }

    #[test]
    fn zero_gain_is_degenerate() {
        let c = AntennaConfig::new(2, 2, 2, 2).unwrap();
        let gains = LinkGains {
            z1: 0.0,
            ..LinkGains::unit()
        };
        assert_eq!(
            sample_channel(c, gains, 1),
            Err(Error::DegenerateChannel {
                attempts: MAX_RESAMPLES
            })
        );
        assert_eq!(
            sample_channel(c, LinkGains::uniform(-1.0), 1),
            Err(Error::InvalidGain(-1.0))
        );
    }

    #[test]
    fn path_gain_values() {
        assert_eq!(path_gain(1.0, 2.0).unwrap(), 1.0);
        assert!((path_gain(5.0, 2.0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(path_gain(5.0, 0.0).unwrap(), 1.0);
        assert!(path_gain(0.0, 2.0).is_err());
        assert!(path_gain(-1.0, 2.0).is_err());
    }

    #[test]
    fn grids() {
        let g = snr_grid(0.0, 10.0, 10.0).unwrap();
        assert_eq!(g.points_db(), &[0.0, 10.0]);
        let lin: Vec<f64> = g.linear().collect();
        assert_eq!(lin, [1.0, 10.0]);
        assert_eq!(snr_grid(40.0, 60.0, 5.0).unwrap().len(), 5);
        assert!(snr_grid(30.0, 30.0, 1.0).is_err());
        assert!(snr_grid(0.0, 10.0, 0.0).is_err());
        assert!(snr_grid(10.0, 0.0, 1.0).is_err());
        // Step larger than the range leaves a single point.
        assert!(snr_grid(0.0, 1.0, 5.0).is_err());
        assert!(SnrGrid::new(alloc::vec![1.0, 1.0]).is_err());
    }
}
