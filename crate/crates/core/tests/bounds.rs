use mimo_dof::estimator::RatePoint;
use mimo_dof::formulas::*;
use mimo_dof::{estimate_dof, AntennaConfig, RateCurve};
use num_rational::Ratio;
use proptest::prelude::*;

fn all_tuples() -> impl Iterator<Item = AntennaConfig> {
    (1..=6).flat_map(|m1| {
        (1..=6).flat_map(move |n1| {
            (1..=6).flat_map(move |m2| {
                (1..=6).map(move |n2| AntennaConfig::new(m1, n1, m2, n2).unwrap())
            })
        })
    })
}

/// Known closed form for the two-user MIMO interference channel.
fn closed_form(c: AntennaConfig) -> usize {
    let (m1, n1, m2, n2) = c.as_tuple();
    (m1 + m2).min(n1 + n2).min(m1.max(n2)).min(m2.max(n1))
}

#[test]
fn exhaustive_interference_bounds() {
    let mut count = 0;
    for c in all_tuples() {
        let inner = dof_int_inner(c);
        let outer = dof_int_outer(c);
        assert!(inner <= outer, "{c}: {inner} > {outer}");
        assert_eq!(dof_int_inner(c.swapped()), inner, "{c} swap");
        assert_eq!(dof_int_outer(c.swapped()), outer, "{c} swap");
        assert_eq!(dof_int_inner(c.reciprocal()), inner, "{c} reciprocal");
        assert_eq!(dof_int_outer(c.reciprocal()), outer, "{c} reciprocal");
        assert_eq!(inner, closed_form(c), "{c}");
        assert_eq!(outer, closed_form(c), "{c}");
        count += 1;
    }
    assert_eq!(count, 1296);
}

#[test]
fn share_transmit_never_beats_zero_forcing() {
    for m in 1..=6 {
        for n in 1..=6 {
            let zf = dof_int_inner(AntennaConfig::new(m, n, m, n).unwrap());
            assert!(
                dof_share_transmit(m, n) <= Ratio::from_integer(zf),
                "({m},{n})"
            );
        }
    }
}

#[test]
fn relay_forms_agree() {
    for ms in 1..=6 {
        for mr in 1..=6 {
            for md in 1..=6 {
                let r = RelayConfig::new(ms, mr, md).unwrap();
                assert_eq!(dof_relay_min_cut(r), ms.min(md));
                assert_eq!(dof_relay_upper(r), ms.min(md));
            }
        }
    }
}

#[test]
fn x_channel_hand_values() {
    let x = |t: &str| dof_x_lower(t.parse().unwrap());
    assert_eq!(x("1,1,1,1"), 1);
    assert_eq!(x("2,1,2,1"), 2);
    assert_eq!(x("1,2,1,2"), 2);
}

fn curve(xs_db: &[f64], f: impl Fn(f64) -> f64) -> RateCurve {
    RateCurve {
        points: xs_db
            .iter()
            .map(|&snr_db| RatePoint {
                snr_db,
                sum_rate: f(snr_db),
            })
            .collect(),
        point_stderr: vec![0.0; xs_db.len()],
        trials: 1,
        scheme_id: "synthetic".into(),
    }
}

fn log2_rho(db: f64) -> f64 {
    db / 10.0 * 10f64.log2()
}

proptest! {
    #[test]
    fn slope_is_affine_invariant(
        rates in prop::collection::vec(-50.0f64..50.0, 5),
        shift in -100.0f64..100.0,
        scale in 0.1f64..10.0,
    ) {
        let grid = [40.0, 45.0, 50.0, 55.0, 60.0];
        let base = curve(&grid, |db| rates[((db - 40.0) / 5.0) as usize]);
        let shifted = curve(&grid, |db| rates[((db - 40.0) / 5.0) as usize] + shift);
        let scaled = curve(&grid, |db| rates[((db - 40.0) / 5.0) as usize] * scale);
        let s = estimate_dof(&base, (40.0, 60.0)).unwrap().dof_hat;
        let s_shift = estimate_dof(&shifted, (40.0, 60.0)).unwrap().dof_hat;
        let s_scale = estimate_dof(&scaled, (40.0, 60.0)).unwrap().dof_hat;
        prop_assert!((s - s_shift).abs() <= 1e-9 * (1.0 + s.abs() + shift.abs()));
        prop_assert!((s * scale - s_scale).abs() <= 1e-9 * (1.0 + s_scale.abs()));
    }

    #[test]
    fn linear_curves_are_recovered_exactly(d in 0.0f64..8.0, b in -20.0f64..20.0) {
        let grid = [40.0, 45.0, 50.0, 55.0, 60.0];
        let est = estimate_dof(&curve(&grid, |db| d * log2_rho(db) + b), (40.0, 60.0)).unwrap();
        prop_assert!((est.dof_hat - d).abs() <= 1e-9);
        prop_assert!(est.stderr <= 1e-9);
    }

    #[test]
    fn canonical_form_carries_the_most_antennas(m1 in 1usize..9, n1 in 1usize..9, m2 in 1usize..9, n2 in 1usize..9) {
        let c = AntennaConfig::new(m1, n1, m2, n2).unwrap();
        let (canon, swapped) = canonicalize(c);
        prop_assert!(canon.m1().max(canon.n1()) >= canon.m2().max(canon.n2()));
        prop_assert_eq!(swapped, !c.is_canonical());
        prop_assert_eq!(canonicalize(canon).1, false);
    }
}

#[test]
fn malformed_tuples_are_rejected() {
    for bad in [
        "",
        "1,2,3",
        "1,2,3,4,5",
        "a,1,1,1",
        "0,1,1,1",
        "1,,1,1",
        "-1,1,1,1",
    ] {
        assert!(bad.parse::<AntennaConfig>().is_err(), "{bad:?}");
    }
    assert_eq!(
        " 2, 3 ,2,3"
            .parse::<AntennaConfig>()
            .map(|c| c.as_tuple())
            .ok(),
        Some((2, 3, 2, 3))
    );
}
