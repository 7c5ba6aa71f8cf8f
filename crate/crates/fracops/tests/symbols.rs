use fracops::*;
use levy_core::SubSpec;
use statrs::function::gamma::gamma;

/// Sup relative error of `op(f) / f - symbol` over nodes whose smallest
/// coordinate lies in `[lo, hi]`.
fn symbol_error<F>(dims: usize, h: f64, extent: f64, s: &[f64], symbol: f64, lo: f64, hi: f64, op: F) -> f64
where
    F: Fn(&LatticeFunction) -> LatticeFunction,
{
    let m = (extent / h).round() as usize + 1;
    let grid = Grid::cube(dims, h, m).unwrap();
    let f = LatticeFunction::from_fn(grid.clone(), |x| x.iter().zip(s).map(|(a, b)| a * b).sum::<f64>().exp());
    let g = op(&f);
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        let p = grid.point(i);
        let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = p.iter().cloned().fold(0.0, f64::max);
        if min >= lo - 1e-12 && max <= hi + 1e-12 {
            worst = worst.max((g.values[i] / f.values[i] / symbol - 1.0).abs());
        }
    }
    worst
}

fn check_first_order<F: Fn(f64) -> f64>(name: &str, err: F, h: f64) {
    let (e1, e2) = (err(h), err(h / 2.0));
    println!("{name}: eps(h) = {e1:.3e}, eps(h/2) = {e2:.3e}, ratio = {:.3}", e2 / e1);
    assert!(e1 < 0.02, "{name}: {e1}");
    assert!(e2 / e1 <= 0.6, "{name}: ratio {}", e2 / e1);
}

#[test]
fn rl_symbol_1d() {
    let s = [2.0];
    let sym = 2f64.powf(0.5);
    check_first_order(
        "rl 1d",
        |h| symbol_error(1, h, 6.0, &s, sym, 4.0, 6.0, |f| rl_deriv(f, 0.5).unwrap()),
        0.01,
    );
}

#[test]
fn caputo_symbol_1d() {
    // exp(st) - 1 has Caputo symbol s^alpha on exp(st) up to the decaying start term.
    let s = [2.0];
    let sym = 2f64.powf(0.3);
    check_first_order(
        "caputo 1d",
        |h| symbol_error(1, h, 6.0, &s, sym, 4.0, 6.0, |f| caputo_deriv(f, 0.3).unwrap()),
        0.01,
    );
}

#[test]
fn directional_frac_symbol_2d() {
    let s = [1.0, 1.5];
    let sym = 2.5f64.powf(0.5);
    let op = |f: &LatticeFunction| {
        let fk = FkDistribution::new(2, vec![1, 2], f.clone()).unwrap();
        directional_frac_deriv(&fk, 0.5).unwrap().density
    };
    check_first_order("directional frac 2d", |h| symbol_error(2, h, 4.0, &s, sym, 3.2, 4.0, op), 0.02);
}

#[test]
fn directional_deriv_symbol_2d() {
    let s = [0.7, 1.1];
    let op = |f: &LatticeFunction| {
        let fk = FkDistribution::new(2, vec![1, 2], f.clone()).unwrap();
        directional_deriv(&fk).unwrap().density
    };
    check_first_order("directional deriv 2d", |h| symbol_error(2, h, 2.0, &s, 1.8, 0.0, 2.0, op), 0.05);
}

#[test]
fn levy_pdo_symbol_1d_and_2d() {
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    let s1 = [2.0];
    check_first_order(
        "levy pdo 1d",
        |h| symbol_error(1, h, 6.0, &s1, -(2f64.sqrt()), 4.0, 6.0, |f| pdo_from_measure(&sub, f).unwrap()),
        0.02,
    );
    let s2 = [1.0, 1.5];
    check_first_order(
        "levy pdo 2d",
        |h| {
            symbol_error(2, h, 4.0, &s2, -(2.5f64.sqrt()), 3.2, 4.0, |f| {
                pdo_from_measure(&sub, f).unwrap()
            })
        },
        0.02,
    );
}

#[test]
fn truncated_levy_pdo_symbol() {
    let sub = SubSpec::TruncatedStable { alpha: 0.6, cutoff: 0.05 };
    let s = 1.5f64;
    // Symbol of a growing exponential on [0, T]: int_eps^T (e^{-sy} - 1) K2(dy) - K2([T, inf)).
    let sym_at = |t: f64| {
        let c = 0.6 / gamma(0.4);
        levy_core::quad::composite(0.05, t, 400, |y| ((-s * y).exp() - 1.0) * c * y.powf(-1.6)) - sub.k2_tail(t)
    };
    let grid = Grid::cube(1, 0.005, 1201).unwrap();
    let f = LatticeFunction::from_fn(grid.clone(), |x| (s * x[0]).exp());
    let g = pdo_from_measure(&sub, &f).unwrap();
    for j in [800usize, 1000, 1200] {
        let t = j as f64 * 0.005;
        let rel = (g.values[j] / f.values[j] / sym_at(t) - 1.0).abs();
        assert!(rel < 0.02, "t = {t}: {rel}");
    }
}

#[test]
fn rl_of_identity_matches_closed_form() {
    let f = LatticeFunction::line(1e-3, 1001, |t| t).unwrap();
    let d = rl_deriv(&f, 0.5).unwrap();
    let exact = 1.0 / gamma(1.5);
    assert!((d.values[1000] - exact).abs() < 2e-3, "{}", d.values[1000]);
    let c = caputo_deriv(&f, 0.5).unwrap();
    assert!((c.values[1000] - exact).abs() < 2e-3);
}

#[test]
fn rl_tends_to_classical_derivative() {
    let f = LatticeFunction::line(1e-2, 101, |t| t).unwrap();
    let d = rl_deriv(&f, 0.999).unwrap();
    assert!((d.values[100] - 1.0).abs() < 0.02, "{}", d.values[100]);
}

#[test]
fn rl_caputo_relation_on_grid() {
    for alpha in [0.2, 0.5, 0.8] {
        let f = LatticeFunction::line(1e-3, 1001, |t| 1.0 + t + t * t).unwrap();
        let one = LatticeFunction::line(1e-3, 1001, |_| 1.0).unwrap();
        let rl = rl_deriv(&f, alpha).unwrap();
        let cap = caputo_deriv(&f, alpha).unwrap();
        let rl1 = rl_deriv(&one, alpha).unwrap();
        for j in 0..1001 {
            assert!((cap.values[j] - (rl.values[j] - f.values[0] * rl1.values[j])).abs() < 1e-9);
        }
        // and against the analytic start term t^{-alpha} / Gamma(1 - alpha)
        let t = 1.0f64;
        let analytic = rl.values[1000] - t.powf(-alpha) / gamma(1.0 - alpha);
        assert!((cap.values[1000] - analytic).abs() < 5e-3, "alpha {alpha}");
    }
}

#[test]
fn directional_deriv_examples() {
    let grid = Grid::cube(2, 0.1, 11).unwrap();
    let f = FkDistribution::new(2, vec![1, 2], LatticeFunction::from_fn(grid.clone(), |x| x[0] + x[1])).unwrap();
    let d = directional_deriv(&f).unwrap();
    assert!(d.density.values.iter().all(|v| (v - 2.0).abs() < 1e-12));
    // n = 3 with x_3 tied to x_2: same operator on the density, same constraint map.
    let f3 = FkDistribution::new(3, vec![1, 2], LatticeFunction::from_fn(grid, |x| x[0] * x[0] + 3.0 * x[1])).unwrap();
    let d3 = directional_deriv(&f3).unwrap();
    assert_eq!(d3.k, vec![1, 2]);
    assert_eq!(d3.n, 3);
    for i in 0..d3.density.values.len() {
        let p = d3.density.grid.point(i);
        assert!((d3.density.values[i] - (2.0 * p[0] + 3.0)).abs() < 1e-9);
    }
}

#[test]
fn directional_frac_reduces_to_rl_in_1d() {
    let f = LatticeFunction::line(0.01, 300, |t| (t * 1.3).sin() + t).unwrap();
    let fk = FkDistribution::new(1, vec![1], f.clone()).unwrap();
    assert_eq!(directional_frac_deriv(&fk, 0.4).unwrap().density.values, rl_deriv(&f, 0.4).unwrap().values);
    let zero = FkDistribution::new(2, vec![1, 2], LatticeFunction::from_fn(Grid::cube(2, 0.1, 5).unwrap(), |_| 0.0)).unwrap();
    assert!(directional_frac_deriv(&zero, 0.5).unwrap().density.values.iter().all(|v| *v == 0.0));
}

#[test]
fn levy_pdo_vanishes_on_interior_of_constant() {
    // Differences vanish where f(t - y) = f(t); what remains is the tail
    // -f(t) K2([t, inf)), which decays like t^{-alpha}.
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    let f = LatticeFunction::line(0.01, 2001, |_| 1.0).unwrap();
    let g = pdo_from_measure(&sub, &f).unwrap();
    let t = 20.0;
    assert!((g.values[2000] + sub.k2_tail(t + 0.01)).abs() < 1e-3);
}

#[test]
fn conjugation_matches_direct_directional_operators() {
    let grid = Grid::cube(2, 0.02, 101).unwrap();
    let f = LatticeFunction::from_fn(grid.clone(), |x| (0.8 * x[0] + 1.2 * x[1]).exp());
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    for op in [Op1d::Identity, Op1d::RiemannLiouville(0.5), Op1d::Levy(sub)] {
        let direct = directional_apply(&op, &f).unwrap();
        let conj = directional_pdo(&op, &f).unwrap();
        let worst = direct
            .values
            .iter()
            .zip(&conj.values)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max);
        assert!(worst < 2e-12, "{op:?}: {worst}");
    }
    let id = directional_pdo(&Op1d::Identity, &f).unwrap();
    assert_eq!(id.values, f.values);
}

#[test]
fn conjugated_derivative_is_directional_derivative() {
    let grid = Grid::cube(2, 0.01, 101).unwrap();
    let f = LatticeFunction::from_fn(grid.clone(), |x| (x[0] * 2.0).sin() * (1.0 + x[1] * x[1]));
    let exact = |x: &[f64]| 2.0 * (x[0] * 2.0).cos() * (1.0 + x[1] * x[1]) + (x[0] * 2.0).sin() * 2.0 * x[1];
    let d = directional_pdo(&Op1d::Derivative, &f).unwrap();
    for i in 0..grid.len() {
        let p = grid.point(i);
        if p.iter().all(|v| *v > 0.05 && *v < 0.95) {
            assert!((d.values[i] - exact(&p)).abs() < 1e-3);
        }
    }
}

#[test]
fn shear_maps_ordered_set_to_half_plane() {
    let grid = Grid::cube(2, 0.1, 11).unwrap();
    let ind = LatticeFunction::from_fn(grid.clone(), |x| if x[0] <= x[1] + 1e-12 { 1.0 } else { 0.0 });
    let target = Grid::new(vec![0.0, -1.0], vec![0.1, 0.1], vec![11, 21]).unwrap();
    let t = cov_apply(Direction::Forward, &ind, &target).unwrap();
    for i in 0..target.len() {
        let p = target.point(i);
        if t.values[i].is_nan() {
            assert!(p[0] + p[1] > 1.0);
            continue;
        }
        let expect = if p[1] >= -1e-12 { 1.0 } else { 0.0 };
        assert_eq!(t.values[i], expect, "{p:?}");
    }
}

#[test]
fn shear_roundtrip_is_identity_on_aligned_grids() {
    let grid = Grid::cube(3, 0.1, 8).unwrap();
    let f = LatticeFunction::from_fn(grid.clone(), |x| {
        if x.iter().all(|v| *v <= 0.35) {
            (x[0] - 2.0 * x[1] + x[2] * x[0]).cos()
        } else {
            0.0
        }
    });
    let target = Grid::new(vec![0.0, -0.7, -0.7], vec![0.1; 3], vec![8, 15, 15]).unwrap();
    let fwd = cov_apply(Direction::Forward, &f, &target).unwrap();
    let back = cov_apply(Direction::Inverse, &fwd, &grid).unwrap();
    let worst = back.values.iter().zip(&f.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12);
}
