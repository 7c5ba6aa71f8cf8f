use fracops::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rl_caputo_relation_holds_identically(
        alpha in 0.05f64..0.95,
        coeffs in prop::collection::vec(-3.0f64..3.0, 4),
        h in 0.005f64..0.05,
    ) {
        let f = LatticeFunction::line(h, 60, |t| coeffs[0] + coeffs[1] * t + coeffs[2] * (coeffs[3] * t).sin()).unwrap();
        let one = LatticeFunction::line(h, 60, |_| 1.0).unwrap();
        let rl = rl_deriv(&f, alpha).unwrap();
        let cap = caputo_deriv(&f, alpha).unwrap();
        let rl1 = rl_deriv(&one, alpha).unwrap();
        for j in 0..60 {
            let want = rl.values[j] - f.values[0] * rl1.values[j];
            prop_assert!((cap.values[j] - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn directional_ops_are_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, alpha in 0.1f64..0.9) {
        let grid = Grid::cube(2, 0.05, 21).unwrap();
        let f = LatticeFunction::from_fn(grid.clone(), |x| (x[0] - x[1]).cos());
        let g = LatticeFunction::from_fn(grid.clone(), |x| x[0] * x[1]);
        let comb = LatticeFunction::from_fn(grid.clone(), |x| a * (x[0] - x[1]).cos() + b * x[0] * x[1]);
        let op = Op1d::RiemannLiouville(alpha);
        let (df, dg, dc) = (
            directional_apply(&op, &f).unwrap(),
            directional_apply(&op, &g).unwrap(),
            directional_apply(&op, &comb).unwrap(),
        );
        for i in 0..grid.len() {
            let want = a * df.values[i] + b * dg.values[i];
            prop_assert!((dc.values[i] - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn conjugation_agrees_with_direct(alpha in 0.1f64..0.9, s1 in -1.0f64..1.0, s2 in -1.0f64..1.0) {
        let grid = Grid::cube(2, 0.05, 25).unwrap();
        let f = LatticeFunction::from_fn(grid.clone(), |x| (s1 * x[0] + s2 * x[1]).exp());
        let op = Op1d::RiemannLiouville(alpha);
        let direct = directional_apply(&op, &f).unwrap();
        let conj = directional_pdo(&op, &f).unwrap();
        for i in 0..grid.len() {
            prop_assert!((direct.values[i] - conj.values[i]).abs() < 1e-10 * (1.0 + direct.values[i].abs()));
        }
    }
}
