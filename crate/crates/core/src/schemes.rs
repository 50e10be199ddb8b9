//! Transmission strategies evaluated as sum rates in bits per channel use.
//!
//! Noise is unit-variance circularly-symmetric Gaussian per receive antenna;
//! a transmitter at SNR `rho` radiates total power `P = rho`. Power is split
//! equally over active streams everywhere unless stated otherwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::formulas::canonicalize;
use crate::linalg::{
    column_complement, hconcat, hermitian_eigenvalues, hermitian_part, inverse_sqrt_psd,
    is_full_rank, log2_det_identity_plus, numerical_rank, real_diagonal, select_columns,
    singular_values, vconcat, CMatrix, FullSvd, C64, RANK_TOL,
};
use crate::net::{AntennaConfig, ChannelRealization};

/// Ceiling on cross-link interference relative to per-stream signal power.
pub const MAX_RESIDUAL_RATIO: f64 = 1e-6;

/// Eigenvalues of the genie noise covariance at or below this are treated as
/// zero when inverting it.
pub const GENIE_REGULARIZATION: f64 = 1e-12;

fn check_power(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPower(p))
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Independent scalar channels, stream `i` seeing noise variance
/// `noise_scales[i]` for unit transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelChannels {
    noise_scales: Vec<f64>,
}

impl ParallelChannels {
    pub fn new(noise_scales: Vec<f64>) -> Result<Self> {
        if noise_scales.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::RankDeficient {
                what: "parallel stream",
            });
        }
        Ok(Self { noise_scales })
    }

    /// From channel amplitudes: `lambda_i = 1 / sigma_i^2`.
    pub fn from_gains(gains: &[f64]) -> Result<Self> {
        Self::new(gains.iter().map(|s| 1.0 / (s * s)).collect())
    }

    pub fn noise_scales(&self) -> &[f64] {
        &self.noise_scales
    }

    pub fn stream_count(&self) -> usize {
        self.noise_scales.len()
    }

    /// `sum log2(1 + (P / streams) / lambda_i)`.
    pub fn sum_rate(&self, total_power: f64) -> f64 {
        let n = self.stream_count();
        if n == 0 {
            return 0.0;
        }
        let per_stream = total_power / n as f64;
        self.noise_scales
            .iter()
            .map(|l| libm::log2(1.0 + per_stream / l))
            .sum()
    }

    /// Water-filling over the streams at total power `P`.
    pub fn water_filling_rate(&self, total_power: f64) -> f64 {
        let mut levels = self.noise_scales.clone();
        levels.sort_by(f64::total_cmp);
        // Largest active set whose water level clears its weakest stream.
        let mut active = levels.len();
        let mut mu = 0.0;
        while active > 0 {
            let sum: f64 = levels[..active].iter().sum();
            mu = (total_power + sum) / active as f64;
            if mu > levels[active - 1] {
                break;
            }
            active -= 1;
        }
        levels[..active].iter().map(|l| libm::log2(mu / l)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerAllocation {
    #[default]
    Equal,
    WaterFilling,
}

/// Parallel channels of a full-rank point-to-point link after SVD.
pub fn ptp_channels(h: &CMatrix) -> Result<ParallelChannels> {
    let sv = singular_values(h);
    if sv.is_empty() || numerical_rank(&sv) < sv.len() {
        return Err(Error::RankDeficient {
            what: "point-to-point channel",
        });
    }
    ParallelChannels::from_gains(&sv)
}

/// SVD transmission with `P / min(M, N)` on each singular mode.
pub fn rate_ptp(h: &CMatrix, total_power: f64) -> Result<f64> {
    rate_ptp_with(h, total_power, PowerAllocation::Equal)
}

pub fn rate_ptp_with(h: &CMatrix, total_power: f64, allocation: PowerAllocation) -> Result<f64> {
    check_power(total_power)?;
    let streams = ptp_channels(h)?;
    Ok(match allocation {
        PowerAllocation::Equal => streams.sum_rate(total_power),
        PowerAllocation::WaterFilling => streams.water_filling_rate(total_power),
    })
}

/// Hands out `budget` streams to users in order, each taking at most `cap`.
fn allocate_streams(caps: impl Iterator<Item = usize>, budget: usize) -> Vec<usize> {
    let mut left = budget;
    caps.map(|cap| {
        let take = cap.min(left);
        left -= take;
        take
    })
    .collect()
}

/// Zero-forcing multiple access. Each user rotates onto its own strongest
/// right-singular directions, the receiver inverts the stacked effective
/// channel and decodes the `min(sum M_k, N)` streams separately; stream `i`
/// sees noise variance `[(G^H G)^{-1}]_ii`.
pub fn mac_zf_channels(h_list: &[CMatrix]) -> Result<ParallelChannels> {
    let n = h_list
        .first()
        .map(|h| h.nrows())
        .ok_or(Error::DimensionMismatch {
            what: "MAC needs at least one user",
        })?;
    if h_list.iter().any(|h| h.nrows() != n || h.ncols() == 0) {
        return Err(Error::DimensionMismatch {
            what: "MAC users must share the receive dimension",
        });
    }
    let take = allocate_streams(h_list.iter().map(|h| h.ncols()), n);
    let mut g = CMatrix::zeros(n, 0);
    for (h, &k) in h_list.iter().zip(&take) {
        if k == 0 {
            continue;
        }
        let svd = FullSvd::new(h);
        let dirs: Vec<usize> = (0..k).collect();
        g = hconcat(&g, &(h * svd.columns(&dirs)));
    }
    zf_noise_scales(&g, "stacked MAC channel")
}

/// `lambda_i = [(G^H G)^{-1}]_ii` for a tall full-column-rank `G`.
fn zf_noise_scales(g: &CMatrix, what: &'static str) -> Result<ParallelChannels> {
    if !is_full_rank(g) {
        return Err(Error::RankDeficient { what });
    }
    let gram_inv = (g.adjoint() * g)
        .try_inverse()
        .ok_or(Error::RankDeficient { what })?;
    ParallelChannels::new(real_diagonal(&gram_inv))
}

pub fn rate_mac_zf(h_list: &[CMatrix], total_power: f64) -> Result<f64> {
    check_power(total_power)?;
    Ok(mac_zf_channels(h_list)?.sum_rate(total_power))
}

/// Zero-forcing broadcast from one transmitter. Each receiver rotates onto
/// its strongest left-singular directions; the transmitter precodes with the
/// pseudo-inverse of the stacked effective channel. Stream `i` gets power
/// `P / streams` along the normalized precoder column, so its noise scale is
/// the squared column norm `[(G G^H)^{-1}]_ii`.
pub fn bc_zf_channels(h_users: &[CMatrix]) -> Result<ParallelChannels> {
    let m = h_users
        .first()
        .map(|h| h.ncols())
        .ok_or(Error::DimensionMismatch {
            what: "BC needs at least one user",
        })?;
    if h_users.iter().any(|h| h.ncols() != m || h.nrows() == 0) {
        return Err(Error::DimensionMismatch {
            what: "BC users must share the transmit dimension",
        });
    }
    let take = allocate_streams(h_users.iter().map(|h| h.nrows()), m);
    let mut g = CMatrix::zeros(0, m);
    for (h, &k) in h_users.iter().zip(&take) {
        if k == 0 {
            continue;
        }
        // Left-singular vectors of h are the right-singular vectors of h^H.
        let svd = FullSvd::new(&h.adjoint());
        let dirs: Vec<usize> = (0..k).collect();
        g = vconcat(&g, &(svd.columns(&dirs).adjoint() * h));
    }
    zf_noise_scales(&g.adjoint(), "stacked BC channel")
}

pub fn rate_bc_zf(h_users: &[CMatrix], total_power: f64) -> Result<f64> {
    check_power(total_power)?;
    Ok(bc_zf_channels(h_users)?.sum_rate(total_power))
}

/// Which interference-free construction applies to a canonical tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionCase {
    /// `M1 >= N1, M2, N2`: T1 hides behind the null space of `z2`.
    TransmitterHeavy,
    /// `N1 > M1, M2, N2`: R1 absorbs link 2's interference in spare outputs.
    ReceiverHeavy,
}

/// Transmit subspaces and receive filters of the two-link zero-forcing
/// construction. Each link runs SVD transmission between its transmit
/// subspace and receive filter, so `t*_dirs` may span more directions than
/// the link has streams.
#[derive(Debug, Clone)]
pub struct EffectiveLinks {
    pub t1_dirs: CMatrix,
    pub t2_dirs: CMatrix,
    pub r1_filter: CMatrix,
    pub r2_filter: CMatrix,
    pub r1_streams: usize,
    pub r2_streams: usize,
    pub case: ConstructionCase,
}

impl EffectiveLinks {
    pub fn total_streams(&self) -> usize {
        self.r1_streams + self.r2_streams
    }
}

/// Builds the interference-free subspaces for a canonical realization.
pub fn build_int_scheme(ch: &ChannelRealization) -> Result<EffectiveLinks> {
    let config = ch.config();
    if !config.is_canonical() {
        return Err(Error::NonCanonical);
    }
    if !is_full_rank(&ch.h1) || !is_full_rank(&ch.h2) {
        return Err(Error::RankDeficient {
            what: "direct link",
        });
    }
    let (m1, n1, m2, _) = config.as_tuple();
    let mut links = if m1 >= n1 {
        transmitter_heavy(ch, m1, n1)
    } else {
        receiver_heavy(ch, m1, n1, m2)
    };
    if links.r2_streams == 0 {
        // Link 2 stays silent; nothing to protect R1 from.
        links.t2_dirs = CMatrix::zeros(m2, 0);
        links.r1_filter = CMatrix::identity(n1, n1);
    }
    Ok(links)
}

fn transmitter_heavy(ch: &ChannelRealization, m1: usize, n1: usize) -> EffectiveLinks {
    // Right-singular directions of z2 past its rank never reach R2.
    let z2 = FullSvd::new(&ch.z2);
    let visible = z2.rank();
    let invisible: Vec<usize> = (visible..m1).collect();
    let needed = n1.saturating_sub(invisible.len());
    // Fill up with the weakest visible directions.
    let leaked: Vec<usize> = (0..visible).rev().take(needed).collect();
    let t1_idx: Vec<usize> = invisible.iter().chain(&leaked).copied().collect();
    let t1_dirs = z2.columns(&t1_idx);

    // R2 discards the outputs hit by the leaked directions.
    let r2_filter = column_complement(&(&ch.z2 * z2.columns(&leaked)));

    // T2 talks only through directions invisible to R1.
    let t2_dirs = FullSvd::new(&ch.z1).null_space();

    let r1_streams = t1_dirs.ncols().min(n1);
    let r2_streams = t2_dirs.ncols().min(r2_filter.ncols());
    EffectiveLinks {
        t1_dirs,
        t2_dirs,
        r1_filter: CMatrix::identity(n1, n1),
        r2_filter,
        r1_streams,
        r2_streams,
        case: ConstructionCase::TransmitterHeavy,
    }
}

fn receiver_heavy(ch: &ChannelRealization, m1: usize, n1: usize, m2: usize) -> EffectiveLinks {
    // T2 uses its weakest directions into R1, at most the spare outputs there.
    let z1 = FullSvd::new(&ch.z1);
    let spare = m2.min(n1 - m1);
    let t2_idx: Vec<usize> = (0..m2).rev().take(spare).collect();
    let t2_dirs = z1.columns(&t2_idx);
    let r1_filter = column_complement(&(&ch.z1 * &t2_dirs));

    // R2 keeps the outputs z2 cannot reach.
    let r2_filter = column_complement(&ch.z2);

    let r1_streams = m1.min(r1_filter.ncols());
    let r2_streams = t2_dirs.ncols().min(r2_filter.ncols());
    EffectiveLinks {
        t1_dirs: CMatrix::identity(m1, m1),
        t2_dirs,
        r1_filter,
        r2_filter,
        r1_streams,
        r2_streams,
        case: ConstructionCase::ReceiverHeavy,
    }
}

/// One link's SVD transmission inside its effective channel.
struct LinkPlan {
    precoder: CMatrix,
    combiner: CMatrix,
    gains: Vec<f64>,
}

fn plan_link(h: &CMatrix, dirs: &CMatrix, filter: &CMatrix, streams: usize) -> Result<LinkPlan> {
    if streams == 0 {
        return Ok(LinkPlan {
            precoder: CMatrix::zeros(dirs.nrows(), 0),
            combiner: CMatrix::zeros(filter.nrows(), 0),
            gains: Vec::new(),
        });
    }
    let eff = filter.adjoint() * h * dirs;
    let svd = eff.clone().svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top: Vec<usize> = order.into_iter().take(streams).collect();
    let gains: Vec<f64> = top.iter().map(|&i| svd.singular_values[i]).collect();
    if gains.len() < streams || gains[streams - 1] <= RANK_TOL * gains[0] {
        return Err(Error::RankDeficient {
            what: "effective link channel",
        });
    }
    let u = svd.u.expect("requested");
    let v = svd.v_t.expect("requested").adjoint();
    Ok(LinkPlan {
        precoder: dirs * select_columns(&v, &top),
        combiner: filter * select_columns(&u, &top),
        gains,
    })
}

/// Interference power over signal power, worst stream at receiver `own`.
fn residual_ratio(
    own: &LinkPlan,
    own_power: f64,
    cross: &CMatrix,
    other: &LinkPlan,
    other_power: f64,
) -> f64 {
    if own.gains.is_empty() || other.gains.is_empty() {
        return 0.0;
    }
    let leak = own.combiner.adjoint() * cross * &other.precoder;
    let per_own = own_power / own.gains.len() as f64;
    let per_other = other_power / other.gains.len() as f64;
    own.gains
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let interference: f64 =
                leak.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>() * per_other;
            interference / (per_own * s * s)
        })
        .fold(0.0, f64::max)
}

/// Per-link rates and the worst residual interference ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntZfOutcome {
    pub link_rates: [f64; 2],
    pub max_residual: f64,
}

impl IntZfOutcome {
    pub fn sum_rate(&self) -> f64 {
        self.link_rates[0] + self.link_rates[1]
    }
}

pub fn evaluate_int_zf(
    ch: &ChannelRealization,
    links: &EffectiveLinks,
    total_power_per_tx: f64,
) -> Result<IntZfOutcome> {
    check_power(total_power_per_tx)?;
    let p = total_power_per_tx;
    let l1 = plan_link(&ch.h1, &links.t1_dirs, &links.r1_filter, links.r1_streams)?;
    let l2 = plan_link(&ch.h2, &links.t2_dirs, &links.r2_filter, links.r2_streams)?;
    let residual =
        residual_ratio(&l1, p, &ch.z1, &l2, p).max(residual_ratio(&l2, p, &ch.z2, &l1, p));
    if residual.is_nan() || residual > MAX_RESIDUAL_RATIO {
        return Err(Error::ResidualInterference { ratio: residual });
    }
    let rate = |plan: &LinkPlan| -> Result<f64> {
        Ok(if plan.gains.is_empty() {
            0.0
        } else {
            ParallelChannels::from_gains(&plan.gains)?.sum_rate(p)
        })
    };
    Ok(IntZfOutcome {
        link_rates: [rate(&l1)?, rate(&l2)?],
        max_residual: residual,
    })
}

/// Sum rate of the zero-forcing interference-channel construction.
pub fn rate_int_zf(
    ch: &ChannelRealization,
    links: &EffectiveLinks,
    total_power_per_tx: f64,
) -> Result<f64> {
    evaluate_int_zf(ch, links, total_power_per_tx).map(|o| o.sum_rate())
}

/// Builds and evaluates the construction for any labelling, swapping the
/// links first when needed.
pub fn int_zf_any(ch: &ChannelRealization, total_power_per_tx: f64) -> Result<IntZfOutcome> {
    let (_, swapped) = canonicalize(ch.config());
    if swapped {
        let ch = ch.swapped();
        let links = build_int_scheme(&ch)?;
        let mut out = evaluate_int_zf(&ch, &links, total_power_per_tx)?;
        out.link_rates.swap(0, 1);
        Ok(out)
    } else {
        let links = build_int_scheme(ch)?;
        evaluate_int_zf(ch, &links, total_power_per_tx)
    }
}

/// Scaling `alpha` and degraded noise covariance `K'` of the genie bound at
/// the receiver that sees interference through `z`.
#[derive(Debug, Clone)]
pub struct GenieNoise {
    pub alpha: f64,
    pub kprime: CMatrix,
}

/// `alpha = min(1/s_max(z)^2, 1/s_max(h_other)^2)`,
/// `K' = I - z (z^H z)^{-1} z^H + alpha z z^H`.
pub fn genie_noise(z: &CMatrix, h_other: &CMatrix) -> Result<GenieNoise> {
    let (n, m) = z.shape();
    if h_other.ncols() != m {
        return Err(Error::DimensionMismatch {
            what: "interfering link and cross channel must share the transmitter",
        });
    }
    if n < m {
        return Err(Error::GenieInapplicable {
            receiver: 1,
            interferer: 2,
            have_rx: n,
            have_tx: m,
        });
    }
    let what = "cross channel Gram matrix";
    let gram_inv = (z.adjoint() * z)
        .try_inverse()
        .ok_or(Error::RankDeficient { what })?;
    if !is_full_rank(z) {
        return Err(Error::RankDeficient { what });
    }
    let smax = |a: &CMatrix| singular_values(a).first().copied().unwrap_or(0.0);
    let alpha = (1.0 / sq(smax(z))).min(1.0 / sq(smax(h_other)));
    let projector = z * gram_inv * z.adjoint();
    let kprime = CMatrix::identity(n, n) - projector + z * z.adjoint() * c(alpha);
    Ok(GenieNoise {
        alpha,
        kprime: hermitian_part(&kprime),
    })
}

impl GenieNoise {
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.kprime)
    }
}

/// Receiver handed the genie's side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenieSide {
    /// R1 decodes both messages; needs `N1 >= M2`.
    Receiver1,
    /// R2 decodes both messages; needs `N2 >= M1`.
    Receiver2,
}

pub fn genie_sides(config: AntennaConfig) -> Vec<GenieSide> {
    let (m1, n1, m2, n2) = config.as_tuple();
    let mut sides = vec![];
    if n1 >= m2 {
        sides.push(GenieSide::Receiver1);
    }
    if n2 >= m1 {
        sides.push(GenieSide::Receiver2);
    }
    sides
}

/// Genie MAC sum rate at one receiver with equal-power inputs:
/// `log2 det(I + K'^{-1} (P/M_own H H^H + P/M_other Z Z^H))`.
pub fn rate_int_genie_side(
    ch: &ChannelRealization,
    total_power_per_tx: f64,
    side: GenieSide,
) -> Result<f64> {
    check_power(total_power_per_tx)?;
    let p = total_power_per_tx;
    let (h, z, h_other) = match side {
        GenieSide::Receiver1 => (&ch.h1, &ch.z1, &ch.h2),
        GenieSide::Receiver2 => (&ch.h2, &ch.z2, &ch.h1),
    };
    let genie = genie_noise(z, h_other).map_err(|e| match (e, side) {
        (
            Error::GenieInapplicable {
                have_rx, have_tx, ..
            },
            GenieSide::Receiver2,
        ) => Error::GenieInapplicable {
            receiver: 2,
            interferer: 1,
            have_rx,
            have_tx,
        },
        (e, _) => e,
    })?;
    let signal =
        h * h.adjoint() * c(p / h.ncols() as f64) + z * z.adjoint() * c(p / z.ncols() as f64);
    let whiten = inverse_sqrt_psd(&genie.kprime, GENIE_REGULARIZATION);
    let a = hermitian_part(&(&whiten * signal * &whiten));
    Ok(log2_det_identity_plus(&a))
}

/// Tightest genie MAC rate over the applicable receivers.
pub fn rate_int_genie_outer(ch: &ChannelRealization, total_power_per_tx: f64) -> Result<f64> {
    let sides = genie_sides(ch.config());
    if sides.is_empty() {
        return Err(Error::NoGenieCondition);
    }
    let mut best = f64::INFINITY;
    for side in sides {
        best = best.min(rate_int_genie_side(ch, total_power_per_tx, side)?);
    }
    Ok(best)
}

/// Time-shared throughput `2 / (1/C_s + 2/C_t)`; zero if either phase is dead.
pub fn share_transmit_throughput(sharing: f64, transmit: f64) -> f64 {
    if sharing <= 0.0 || transmit <= 0.0 {
        return 0.0;
    }
    2.0 / (1.0 / sharing + 2.0 / transmit)
}

/// Both phases of share-and-transmit, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShareTransmitRates {
    pub sharing: f64,
    pub transmit: f64,
    pub throughput: f64,
}

/// Transmitters exchange messages over `tt_channel` at power `P` each, then
/// broadcast jointly from `2M` antennas at power `2P`.
pub fn share_and_transmit(
    ch: &ChannelRealization,
    tt_channel: &CMatrix,
    total_power_per_tx: f64,
) -> Result<ShareTransmitRates> {
    check_power(total_power_per_tx)?;
    let (m1, n1, m2, n2) = ch.config().as_tuple();
    if m1 != m2 || n1 != n2 {
        return Err(Error::SchemeMismatch {
            scheme: "share-transmit",
            reason: "needs a symmetric (m,n,m,n) network",
        });
    }
    if tt_channel.shape() != (m1, m1) {
        return Err(Error::DimensionMismatch {
            what: "sharing link must be M x M",
        });
    }
    let sharing = rate_ptp(tt_channel, total_power_per_tx)?;
    let to_r1 = hconcat(&ch.h1, &ch.z1);
    let to_r2 = hconcat(&ch.z2, &ch.h2);
    let transmit = rate_bc_zf(&[to_r1, to_r2], 2.0 * total_power_per_tx)?;
    Ok(ShareTransmitRates {
        sharing,
        transmit,
        throughput: share_transmit_throughput(sharing, transmit),
    })
}

pub fn rate_share_and_transmit(
    ch: &ChannelRealization,
    tt_channel: &CMatrix,
    total_power_per_tx: f64,
) -> Result<f64> {
    share_and_transmit(ch, tt_channel, total_power_per_tx).map(|r| r.throughput)
}
