//! Closed-form degrees-of-freedom values. Exact integer and rational
//! arithmetic only.

use core::fmt;
use core::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::net::{parse_counts, AntennaConfig};

/// Inner and outer DoF bounds; `exact` is filled only when they meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofBounds {
    pub inner: usize,
    pub outer: usize,
    pub exact: Option<usize>,
}

impl DofBounds {
    pub fn new(inner: usize, outer: usize) -> Self {
        debug_assert!(
            inner <= outer,
            "inner bound {inner} above outer bound {outer}"
        );
        Self {
            inner,
            outer,
            exact: (inner == outer).then_some(inner),
        }
    }
}

impl fmt::Display for DofBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(e) => write!(f, "exact {e}"),
            None => write!(f, "[{}, {}]", self.inner, self.outer),
        }
    }
}

/// Source, relay and destination antenna counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelayConfig {
    ms: usize,
    mr: usize,
    md: usize,
}

impl RelayConfig {
    pub fn new(ms: usize, mr: usize, md: usize) -> Result<Self> {
        for (name, v) in [("ms", ms), ("mr", mr), ("md", md)] {
            if v == 0 {
                return Err(Error::ZeroAntennas { name });
            }
        }
        Ok(Self { ms, mr, md })
    }

    pub fn ms(&self) -> usize {
        self.ms
    }
    pub fn mr(&self) -> usize {
        self.mr
    }
    pub fn md(&self) -> usize {
        self.md
    }
}

impl FromStr for RelayConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let [ms, mr, md] = parse_counts::<3>(s)?;
        Self::new(ms, mr, md)
    }
}

impl fmt::Display for RelayConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.ms, self.mr, self.md)
    }
}

pub fn dof_ptp(m: usize, n: usize) -> usize {
    m.min(n)
}

pub fn dof_mac(m1: usize, m2: usize, n: usize) -> usize {
    (m1 + m2).min(n)
}

pub fn dof_bc(m: usize, n1: usize, n2: usize) -> usize {
    m.min(n1 + n2)
}

/// Relabels the links so that link 1 has the most antennas at either end.
/// Ties keep the given order. Returns `true` when the links were swapped.
pub fn canonicalize(config: AntennaConfig) -> (AntennaConfig, bool) {
    if config.is_canonical() {
        (config, false)
    } else {
        (config.swapped(), true)
    }
}

fn pos(x: isize) -> usize {
    x.max(0) as usize
}

/// Zero-forcing inner bound. The tuple is canonicalized first, so any
/// labelling is accepted.
pub fn dof_int_inner(config: AntennaConfig) -> usize {
    let (c, _) = canonicalize(config);
    let (m1, n1, m2, n2) = c.as_tuple();
    let (m1, n1, m2, n2) = (m1 as isize, n1 as isize, m2 as isize, n2 as isize);
    let mut dof = m1.min(n1) as usize;
    if m1 > n1 {
        dof += pos((m2 - n1).min(n2));
    }
    if m1 < n1 {
        dof += pos(m2.min(n2 - m1));
    }
    dof
}

/// Per-link stream counts `(link 1, link 2)` of the inner bound on a
/// canonical tuple.
pub fn int_inner_terms(config: AntennaConfig) -> (usize, usize) {
    let (m1, n1, m2, n2) = config.as_tuple();
    let (m1, n1, m2, n2) = (m1 as isize, n1 as isize, m2 as isize, n2 as isize);
    let second = if m1 > n1 {
        pos((m2 - n1).min(n2))
    } else if m1 < n1 {
        pos(m2.min(n2 - m1))
    } else {
        0
    };
    (m1.min(n1) as usize, second)
}

/// Trivial cooperative bound plus every genie MAC bound whose condition
/// holds on this labelling.
pub fn genie_outer_direct(config: AntennaConfig) -> usize {
    let (m1, n1, m2, n2) = config.as_tuple();
    let mut outer = (m1 + m2).min(n1 + n2);
    if n1 >= m2 {
        outer = outer.min((m1 + m2).min(n1));
    }
    if n2 >= m1 {
        outer = outer.min((m1 + m2).min(n2));
    }
    outer
}

/// Outer bound: the direct genie bounds of this network and of its
/// reciprocal, which has the same DoF.
pub fn dof_int_outer(config: AntennaConfig) -> usize {
    genie_outer_direct(config).min(genie_outer_direct(config.reciprocal()))
}

pub fn dof_int_resolve(config: AntennaConfig) -> DofBounds {
    DofBounds::new(dof_int_inner(config), dof_int_outer(config))
}

/// Best single MAC or BC embedded in the X channel.
pub fn dof_x_lower(config: AntennaConfig) -> usize {
    let (m1, n1, m2, n2) = config.as_tuple();
    let bc = m1.max(m2).min(n1 + n2);
    let mac = (m1 + m2).min(n1.max(n2));
    bc.max(mac)
}

/// Z channel with the T1 -> R2 path absent. It matches the genie-aided
/// interference channel, so the interference-channel bounds carry over.
pub fn dof_z(config: AntennaConfig) -> DofBounds {
    dof_int_resolve(config)
}

/// Cut-set bound `min[min(Ms, Mr+Md), min(Ms+Mr, Md)]`.
pub fn dof_relay_min_cut(r: RelayConfig) -> usize {
    let broadcast_cut = r.ms.min(r.mr + r.md);
    let mac_cut = (r.ms + r.mr).min(r.md);
    broadcast_cut.min(mac_cut)
}

pub fn dof_relay_upper(r: RelayConfig) -> usize {
    let cut = dof_relay_min_cut(r);
    let direct = r.ms.min(r.md);
    assert_eq!(
        cut, direct,
        "relay cut-set bound must reduce to min(Ms, Md)"
    );
    direct
}

/// Share-and-transmit DoF for two `m`-antenna transmitters and two
/// `n`-antenna receivers: sharing over the `m x m` link, then a joint
/// `2m`-antenna broadcast, time-shared as `2 / (1/share + 2/transmit)`.
pub fn dof_share_transmit(m: usize, n: usize) -> Ratio<usize> {
    let share = Ratio::from_integer(dof_ptp(m, m));
    let transmit = Ratio::from_integer(dof_bc(2 * m, n, n));
    let two = Ratio::from_integer(2);
    two / (share.recip() + two / transmit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m1: usize, n1: usize, m2: usize, n2: usize) -> AntennaConfig {
        AntennaConfig::new(m1, n1, m2, n2).unwrap()
    }

    #[test]
    fn point_to_point_mac_bc() {
        assert_eq!(dof_ptp(3, 3), 3);
        assert_eq!(dof_ptp(4, 1), 1);
        assert_eq!(dof_ptp(2, 5), 2);
        assert_eq!(dof_mac(1, 1, 2), 2);
        assert_eq!(dof_mac(2, 2, 3), 3);
        assert_eq!(dof_mac(4, 4, 2), 2);
        assert_eq!(dof_bc(5, 1, 4), 5);
        assert_eq!(dof_bc(2, 1, 1), 2);
        assert_eq!(dof_bc(8, 2, 2), 4);
    }

    #[test]
    fn canonicalization() {
        assert_eq!(canonicalize(cfg(2, 2, 3, 2)), (cfg(3, 2, 2, 2), true));
        assert_eq!(canonicalize(cfg(3, 2, 2, 3)), (cfg(3, 2, 2, 3), false));
        assert_eq!(canonicalize(cfg(1, 1, 1, 1)), (cfg(1, 1, 1, 1), false));
    }

    #[test]
    fn inner_bound_examples() {
        assert_eq!(dof_int_inner(cfg(1, 1, 1, 1)), 1);
        assert_eq!(dof_int_inner(cfg(3, 2, 2, 3)), 2);
        assert_eq!(dof_int_inner(cfg(2, 3, 1, 3)), 3);
        assert_eq!(dof_int_inner(cfg(1, 2, 2, 1)), 1);
        assert_eq!(int_inner_terms(cfg(2, 3, 2, 3)), (2, 1));
        assert_eq!(int_inner_terms(cfg(3, 2, 2, 3)), (2, 0));
        // Tie M1 = N1 keeps only the first term.
        assert_eq!(int_inner_terms(cfg(3, 3, 3, 3)), (3, 0));
    }

    #[test]
    fn outer_bound_examples() {
        assert_eq!(dof_int_outer(cfg(1, 2, 2, 1)), 1);
        assert_eq!(dof_int_outer(cfg(2, 1, 2, 1)), 2);
        assert_eq!(dof_int_outer(cfg(2, 3, 2, 3)), 3);
        assert_eq!(genie_outer_direct(cfg(2, 1, 2, 1)), 2);
        // Direct genie bounds alone are not reciprocal.
        assert_eq!(genie_outer_direct(cfg(1, 1, 2, 3)), 3);
        assert_eq!(genie_outer_direct(cfg(1, 1, 3, 2)), 2);
        assert_eq!(dof_int_outer(cfg(1, 1, 2, 3)), 2);
    }

    #[test]
    fn resolve_examples() {
        assert_eq!(dof_int_resolve(cfg(1, 2, 1, 2)).exact, Some(2));
        assert_eq!(dof_int_resolve(cfg(2, 2, 3, 2)).exact, Some(2));
        let b = dof_int_resolve(cfg(3, 1, 3, 1));
        assert_eq!((b.inner, b.outer, b.exact), (2, 2, Some(2)));
        assert_eq!(alloc::format!("{b}"), "exact 2");
        assert_eq!(alloc::format!("{}", DofBounds::new(1, 2)), "[1, 2]");
        assert_eq!(DofBounds::new(1, 2).exact, None);
    }

    #[test]
    fn x_z_relay() {
        assert_eq!(dof_x_lower(cfg(1, 1, 1, 1)), 1);
        assert_eq!(dof_x_lower(cfg(2, 1, 2, 1)), 2);
        assert_eq!(dof_x_lower(cfg(1, 2, 1, 2)), 2);
        assert_eq!(dof_z(cfg(1, 1, 1, 1)).exact, Some(1));
        assert_eq!(dof_z(cfg(1, 2, 1, 2)).exact, Some(2));
        assert_eq!(dof_z(cfg(2, 3, 2, 3)).exact, Some(3));
        assert_eq!(dof_relay_upper(RelayConfig::new(2, 3, 2).unwrap()), 2);
        assert_eq!(dof_relay_upper(RelayConfig::new(1, 5, 4).unwrap()), 1);
        assert_eq!(dof_relay_upper(RelayConfig::new(4, 1, 4).unwrap()), 4);
        assert!(RelayConfig::new(0, 1, 1).is_err());
        assert_eq!(
            "2,3,2".parse::<RelayConfig>().unwrap(),
            RelayConfig::new(2, 3, 2).unwrap()
        );
    }

    #[test]
    fn share_transmit_values() {
        assert_eq!(dof_share_transmit(2, 2), Ratio::from_integer(2));
        assert_eq!(dof_share_transmit(1, 1), Ratio::from_integer(1));
        // 2*4*1 / (4+1)
        assert_eq!(dof_share_transmit(4, 1), Ratio::new(8, 5));
        assert!(dof_share_transmit(4, 1) < Ratio::from_integer(dof_int_inner(cfg(4, 1, 4, 1))));
        // Full cooperation on (n,1,1,n) with n = 4: n+1 antennas to receivers with 1 and n.
        assert_eq!(dof_bc(4 + 1, 1, 4), 5);
    }
}
