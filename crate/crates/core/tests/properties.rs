use proptest::prelude::*;

use qubit_align::channels::{amplitude_damping, bit_flip, depolarizing, imperfect_not, phase_flip, AffineChannel};
use qubit_align::linalg3::Vec3;
use qubit_align::metrics::d_n;
use qubit_align::procrustes::{lift_mismatch, optimal_overlap};
use qubit_align::purification::canonical_purification;
use qubit_align::qstate::{density_from_bloch, uhlmann_fidelity, BlochVector};

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0f64..=1.0, -1.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(u, cos_t, phi)| {
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let v = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t) * u.cbrt();
        BlochVector::from_vec(v).unwrap()
    })
}

fn channel() -> impl Strategy<Value = AffineChannel> {
    (0usize..5, 0.0f64..=1.0, -3.0f64..3.0).prop_map(|(k, p, da)| match k {
        0 => depolarizing(p).unwrap(),
        1 => bit_flip(p).unwrap(),
        2 => phase_flip(p).unwrap(),
        3 => amplitude_damping(p).unwrap(),
        _ => imperfect_not(p, da).unwrap(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn overlap_is_root_fidelity(r in bloch(), s in bloch()) {
        let g = optimal_overlap(&r, &s).unwrap().g_star;
        let f = uhlmann_fidelity(&density_from_bloch(&r), &density_from_bloch(&s));
        prop_assert!((g - f.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn overlap_is_symmetric(r in bloch(), s in bloch()) {
        let a = optimal_overlap(&r, &s).unwrap();
        let b = optimal_overlap(&s, &r).unwrap();
        prop_assert!((a.g_star - b.g_star).abs() < 1e-12);
    }

    #[test]
    fn angle_in_range_and_lift_consistent(r in bloch(), s in bloch()) {
        let res = optimal_overlap(&r, &s).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&res.theta));
        prop_assert!(lift_mismatch(&res.s_star, &res.u_star) < 1e-10);
    }

    #[test]
    fn canonical_purification_is_pure(r in bloch()) {
        prop_assert!(canonical_purification(&r).constraint_violation() < 1e-10);
    }

    #[test]
    fn distance_contracts_under_channels(r in bloch(), s in bloch(), ch in channel()) {
        let before = d_n(&r, &s).unwrap();
        let after = d_n(&ch.apply(&r).unwrap(), &ch.apply(&s).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10);
    }

    #[test]
    fn distance_in_unit_interval(r in bloch(), s in bloch()) {
        let d = d_n(&r, &s).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
