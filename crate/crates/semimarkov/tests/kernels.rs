use levy_core::{sample_fdd, FddOptions, OuterSpec, ProcessSpec, SubSpec};
use semimarkov::*;

fn full_partition(lo: f64, hi: f64, nx: usize, r_max: f64, nr: usize) -> Partition {
    let mut x: Vec<f64> = (0..=nx).map(|i| lo + (hi - lo) * i as f64 / nx as f64).collect();
    x.insert(0, f64::NEG_INFINITY);
    x.push(f64::INFINITY);
    let mut r: Vec<f64> = (0..=nr).map(|j| r_max * j as f64 / nr as f64).collect();
    r.push(f64::INFINITY);
    Partition::new(x, r).unwrap()
}

#[test]
fn h_is_a_probability_kernel() {
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    let p = full_partition(0.0, 4.0, 40, 4.0, 40);
    for &t in &[0.5, 1.0, 2.0] {
        for &rp in &[0.0, 0.25, 0.75] {
            let k = eval_H(&sub, t, 0.0, rp, &p).unwrap();
            assert!((k.total_mass() - 1.0).abs() < 1e-3, "t {t} r' {rp}: {}", k.total_mass());
        }
    }
}

#[test]
fn atoms_before_and_at_the_first_regeneration() {
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    let p = full_partition(0.0, 2.0, 4, 2.0, 4);
    let k = eval_H(&sub, 0.5, 0.3, 1.0, &p).unwrap();
    assert_eq!(k.atom_weight, 1.0);
    assert_eq!(k.atom_location, (0.3, 0.5));
    assert_eq!(k.ac_total(), 0.0);
    let k = eval_H(&sub, 1.0, 0.3, 1.0, &p).unwrap();
    assert_eq!(k.atom_location, (0.3, 0.0));
    let spec = ProcessSpec::brownian_stable(0.5);
    let k = eval_Q(&spec, 0.5, -1.0, 1.0, &p).unwrap();
    assert_eq!((k.atom_weight, k.atom_location), (1.0, (-1.0, 0.5)));
    let coupled = ProcessSpec::diagonal(OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 }, SubSpec::StandardStable { alpha: 0.5 }, 0.5);
    assert_eq!(eval_Q(&coupled, 0.5, 0.0, 1.0, &p).unwrap().atom_weight, 1.0);
}

#[test]
fn h_marginal_matches_sampled_inverse_subordinator() {
    let alpha = 0.5;
    let p = full_partition(0.0, 0.5, 10, 4.0, 4);
    let k = eval_H(&SubSpec::StandardStable { alpha }, 1.0, 0.0, 0.0, &p).unwrap();
    let marg = k.x_marginal();
    let spec = ProcessSpec::brownian_stable(alpha);
    let opts = FddOptions { du: 1e-3, ..FddOptions::default() };
    let batch = sample_fdd(&spec, &[1.0], 200_000, 7, &opts).unwrap();
    let e = batch.e_column(0);
    let n = e.len() as f64;
    for i in 1..=4 {
        let (a, b) = (p.x_edges[i], p.x_edges[i + 1]);
        let mc = e.iter().filter(|&&v| v >= a && v < b).count() as f64 / n;
        assert!((marg[i] - mc).abs() < 0.05 * mc, "cell [{a},{b}): {} vs {mc}", marg[i]);
    }
    // E_1 for alpha = 1/2 is |Z| sqrt 2: P(E_1 < 0.25) = erf(0.125)
    let want = statrs::function::erf::erf(0.125);
    let got: f64 = marg[1..6].iter().sum();
    assert!((got - want).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn q_uncoupled_is_a_probability_kernel_and_symmetric() {
    let spec = ProcessSpec::brownian_stable(0.5);
    let p = full_partition(-4.0, 4.0, 32, 4.0, 16);
    for &t in &[0.5, 1.0, 2.0] {
        for &rp in &[0.0, 0.25, 0.75] {
            let k = eval_Q(&spec, t, 0.0, rp, &p).unwrap();
            assert!((k.total_mass() - 1.0).abs() < 1e-3, "t {t} r' {rp}: {}", k.total_mass());
            let m = k.x_marginal();
            let nx = m.len();
            for i in 0..nx / 2 {
                assert!((m[i] - m[nx - 1 - i]).abs() < 1e-9, "asymmetric at {i}");
            }
        }
    }
}

#[test]
fn q_is_translation_invariant_on_cell_indices() {
    let spec = ProcessSpec::brownian_stable(0.6);
    let h = 0.25;
    let p = full_partition(-3.0, 3.0, 24, 2.0, 8);
    let a = eval_Q(&spec, 1.0, 0.0, 0.1, &p).unwrap();
    let shifted: Vec<f64> = p.x_edges.iter().map(|e| e + 2.0 * h).collect();
    let ps = Partition::new(shifted, p.r_edges.clone()).unwrap();
    let b = eval_Q(&spec, 1.0, 2.0 * h, 0.1, &ps).unwrap();
    for (x, y) in a.ac_mass.iter().zip(&b.ac_mass) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn q_rejects_coupled_spec_in_uncoupled_entry() {
    let coupled = ProcessSpec::diagonal(OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 }, SubSpec::StandardStable { alpha: 0.5 }, 0.5);
    let p = full_partition(-1.0, 1.0, 4, 1.0, 2);
    assert!(matches!(eval_Q_uncoupled(&coupled, 1.0, 0.0, 0.0, &p), Err(SemiMarkovError::WrongKernel(_))));
}

#[test]
fn coupled_q_has_unit_mass_and_degenerates_to_uncoupled() {
    let outer = OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 };
    let sub = SubSpec::StandardStable { alpha: 0.5 };
    let p = full_partition(-4.0, 6.0, 40, 3.0, 12);
    let coupled = ProcessSpec::diagonal(outer.clone(), sub.clone(), 0.5);
    for &t in &[0.5, 1.0, 2.0] {
        let k = eval_Q(&coupled, t, 0.0, 0.2, &p).unwrap();
        assert!((k.total_mass() - 1.0).abs() < 1e-2, "t {t}: {}", k.total_mass());
    }
    let degenerate = ProcessSpec::diagonal(outer.clone(), sub.clone(), 0.0);
    let a = eval_Q_coupled(&degenerate, 1.0, 0.0, 0.2, &p).unwrap();
    let b = eval_Q_uncoupled(&ProcessSpec::uncoupled(outer, sub), 1.0, 0.0, 0.2, &p).unwrap();
    for (x, y) in a.ac_mass.iter().zip(&b.ac_mass) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn coupled_q_x_marginal_matches_sampled_fdd() {
    let outer = OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 };
    let spec = ProcessSpec::diagonal(outer, SubSpec::StandardStable { alpha: 0.5 }, 0.5);
    let p = full_partition(-2.0, 3.0, 10, 3.0, 3);
    let k = eval_Q(&spec, 1.0, 0.0, 0.0, &p).unwrap();
    let opts = FddOptions { du: 1e-3, ..FddOptions::default() };
    let batch = sample_fdd(&spec, &[1.0], 100_000, 11, &opts).unwrap();
    let x = batch.x_column(0);
    let n = x.len() as f64;
    let m = k.x_marginal();
    let mut tv = 0.0;
    for i in 0..m.len() {
        let (a, b) = (p.x_edges[i], p.x_edges[i + 1]);
        let mc = x.iter().filter(|&&v| v >= a && v < b).count() as f64 / n;
        tv += (m[i] - mc).abs();
    }
    assert!(0.5 * tv < 0.02, "total variation {tv}");
}

#[test]
fn rejects_truncated_subordinator() {
    let sub = SubSpec::TruncatedStable { alpha: 0.5, cutoff: 0.1 };
    let p = full_partition(0.0, 1.0, 2, 1.0, 2);
    assert!(matches!(eval_H(&sub, 1.0, 0.0, 0.0, &p), Err(SemiMarkovError::Unsupported(_))));
}
