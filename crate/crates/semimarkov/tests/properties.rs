use levy_core::{OuterSpec, ProcessSpec, SubSpec};
use proptest::prelude::*;
use semimarkov::*;

fn partition() -> Partition {
    let mut x: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
    x.insert(0, f64::NEG_INFINITY);
    x.push(f64::INFINITY);
    let mut r: Vec<f64> = (0..=8).map(|j| 0.5 * j as f64).collect();
    r.push(f64::INFINITY);
    Partition::new(x, r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn h_kernels_are_probability_kernels(alpha in 0.2f64..0.9, t in 0.1f64..3.0, rp in 0.0f64..2.0, xp in -1.0f64..1.0) {
        let k = eval_H(&SubSpec::StandardStable { alpha }, t, xp, rp, &partition()).unwrap();
        prop_assert!((k.total_mass() - 1.0).abs() < 1e-3, "{}", k.total_mass());
        prop_assert!(k.ac_mass.iter().all(|&m| m >= 0.0));
        prop_assert_eq!(k.atom_weight == 1.0, t <= rp);
    }

    #[test]
    fn q_kernels_are_probability_kernels(alpha in 0.3f64..0.9, t in 0.2f64..2.0, rp in 0.0f64..0.15) {
        let spec = ProcessSpec::uncoupled(OuterSpec::Brownian { drift: 0.2, diffusivity: 0.5 }, SubSpec::StandardStable { alpha });
        let k = eval_Q(&spec, t, 0.0, rp, &partition()).unwrap();
        prop_assert!((k.total_mass() - 1.0).abs() < 1e-3, "{}", k.total_mass());
    }

    #[test]
    fn occupation_is_additive(alpha in 0.2f64..0.9, y0 in 0.0f64..1.0, dy1 in 0.1f64..1.0, dy2 in 0.1f64..1.0, w1 in 0.5f64..3.0) {
        let w = (0.05, w1);
        let a = occupation_clock(alpha, 0.0, &Region::new((y0, y0 + dy1), w).unwrap()).unwrap().value;
        let b = occupation_clock(alpha, 0.0, &Region::new((y0 + dy1, y0 + dy1 + dy2), w).unwrap()).unwrap().value;
        let ab = occupation_clock(alpha, 0.0, &Region::new((y0, y0 + dy1 + dy2), w).unwrap()).unwrap().value;
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert!((a + b - ab).abs() < 1e-10 * (1.0 + ab));
    }

    #[test]
    fn remainder_is_monotone(alpha in 0.1f64..0.95, c in -2.0f64..2.0, x in -3.0f64..3.0, dx in 0.0f64..2.0, t in 0.1f64..3.0, dt in 0.0f64..2.0) {
        let spec = ProcessSpec::diagonal(OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 }, SubSpec::StandardStable { alpha }, c);
        let base = remainder_measure(&spec, x, t).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!(remainder_measure(&spec, x + dx, t).unwrap() >= base);
        prop_assert!(remainder_measure(&spec, x, t + dt).unwrap() <= base + 1e-15);
    }

    #[test]
    fn m_is_increasing_to_its_total(alpha in 0.1f64..0.95, z in 1e-3f64..50.0, dz in 1e-3f64..5.0) {
        let t = OneSidedStable::get(alpha).unwrap();
        // the table meets 1 / Gamma(alpha) to quadrature roundoff
        prop_assert!(t.m(z + dz) >= t.m(z) - 1e-12);
        prop_assert!(t.m(z) <= t.m(f64::INFINITY) + 1e-12);
    }
}
