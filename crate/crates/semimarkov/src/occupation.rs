//! Occupation measures `U^{x'}(B) = int_0^inf P((x' + A_u, D_u) in B) du` of
//! space-time Levy pairs.

use crate::error::{Result, SemiMarkovError};
use crate::stable::OneSidedStable;
use levy_core::parallel::map_chunks;
use levy_core::quad::gl16;
use levy_core::stats::mean_se;
use levy_core::{ProcessSpec, SubSpec};
use rand::Rng;

/// Rectangle `[y_lo, y_hi) x [w_lo, w_hi)` in `(y, w)` space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub y: (f64, f64),
    pub w: (f64, f64),
}

impl Region {
    pub fn new(y: (f64, f64), w: (f64, f64)) -> Result<Self> {
        if !(y.1 > y.0) || !(w.1 > w.0) || w.0 < 0.0 {
            return Err(SemiMarkovError::Domain(format!("bad region {y:?} x {w:?}")));
        }
        Ok(Region { y, w })
    }

    fn contains(&self, y: f64, w: f64) -> bool {
        y >= self.y.0 && y < self.y.1 && w >= self.w.0 && w < self.w.1
    }

    pub fn shifted(&self, c: f64) -> Region {
        Region {
            y: (self.y.0 + c, self.y.1 + c),
            w: self.w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationQuery {
    pub x_prime: f64,
    pub region: Region,
    pub value: f64,
    /// Monte Carlo standard error, 0 for quadrature values.
    pub std_error: f64,
}

/// A space-time pair `(A_u, D_u)` with `D` non-decreasing, sampled by increments.
pub trait LevyPair: Sync {
    fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> (f64, f64);
}

impl LevyPair for ProcessSpec {
    fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> (f64, f64) {
        ProcessSpec::increment(self, du, rng)
    }
}

/// The pair `(u, D_u)`, whose occupation measure is that of `(t, E_t)`
/// with the roles of the coordinates exchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockPair(pub SubSpec);

impl LevyPair for ClockPair {
    fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> (f64, f64) {
        (du, self.0.increment(du, rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationOptions {
    pub du: f64,
    pub n_paths: usize,
    /// Operational-time cap per path.
    pub max_cells: usize,
}

impl Default for OccupationOptions {
    fn default() -> Self {
        OccupationOptions {
            du: 1e-3,
            n_paths: 10_000,
            max_cells: 10_000_000,
        }
    }
}

/// Monte Carlo occupation measure: each path is advanced on an operational
/// grid of width `du` until `D` leaves the `w`-range, collecting `du` for
/// every left endpoint inside the region.
pub fn occupation_measure<P: LevyPair>(
    pair: &P,
    x_prime: f64,
    region: &Region,
    opts: &OccupationOptions,
    seed: u64,
) -> Result<OccupationQuery> {
    if !region.w.1.is_finite() {
        return Err(SemiMarkovError::Divergence(
            "unbounded w-range: the path integral does not terminate and is finite only for transient pairs".into(),
        ));
    }
    if !(opts.du > 0.0) || opts.n_paths < 2 {
        return Err(SemiMarkovError::Domain("need du > 0 and at least two paths".into()));
    }
    let du = opts.du;
    let parts = map_chunks(opts.n_paths, seed, |range, rng| {
        let mut out = Vec::with_capacity(range.len());
        for _ in range {
            let (mut a, mut d) = (x_prime, 0.0);
            let mut hits = 0usize;
            let mut cells = 0usize;
            while d < region.w.1 && cells < opts.max_cells {
                if region.contains(a, d) {
                    hits += 1;
                }
                let (da, dd) = pair.increment(du, rng);
                a += da;
                d += dd;
                cells += 1;
            }
            out.push(if cells >= opts.max_cells { f64::NAN } else { hits as f64 * du });
        }
        out
    });
    let v: Vec<f64> = parts.into_iter().flatten().collect();
    if v.iter().any(|x| x.is_nan()) {
        return Err(SemiMarkovError::Divergence("path exceeded the operational-time cap".into()));
    }
    let (value, std_error) = mean_se(&v);
    Ok(OccupationQuery {
        x_prime,
        region: *region,
        value,
        std_error,
    })
}

/// Occupation of `(u, D_u)` started at `(x', 0)` for the standard stable
/// subordinator, from `U(dy, dw) = g(w, y - x') dy dw`.
pub fn occupation_clock(alpha: f64, x_prime: f64, region: &Region) -> Result<OccupationQuery> {
    let table = OneSidedStable::get(alpha)?;
    let (ya, yb) = ((region.y.0 - x_prime).max(0.0), (region.y.1 - x_prime).max(0.0));
    let mass = |w_lo: f64, w_hi: f64| {
        // q = w^alpha absorbs w^{alpha-1}
        let (qa, qb) = (w_lo.powf(alpha), w_hi.powf(alpha));
        let mut edges = vec![qa];
        let mut v = (qb * 1e-12).max(qa);
        while v < qb {
            if v > qa {
                edges.push(v);
            }
            v *= 1.15;
        }
        edges.push(qb);
        let rule = gl16();
        let mut acc = 0.0;
        for e in edges.windows(2) {
            acc += rule.integrate(e[0], e[1], |q| {
                let wa = 1.0 / q;
                table.m(yb * wa) - table.m(ya * wa)
            });
        }
        acc / alpha
    };
    let value = if yb <= ya {
        0.0
    } else if region.w.1.is_infinite() {
        if yb.is_infinite() {
            return Err(SemiMarkovError::Divergence("region unbounded in both coordinates".into()));
        }
        // each u spends unit mass in w, so the full w-range gives the y-length
        (yb - ya) - mass(0.0, region.w.0)
    } else {
        mass(region.w.0, region.w.1)
    };
    Ok(OccupationQuery {
        x_prime,
        region: *region,
        value,
        std_error: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct UnitSpeed;

    impl LevyPair for UnitSpeed {
        fn increment<R: Rng + ?Sized>(&self, du: f64, _: &mut R) -> (f64, f64) {
            (0.0, du)
        }
    }

    #[test]
    fn deterministic_diagonal_has_unit_occupation() {
        let region = Region::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let opts = OccupationOptions { du: 1.0 / 1024.0, n_paths: 4, ..Default::default() };
        let q = occupation_measure(&UnitSpeed, 0.0, &region, &opts, 1).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_w_diverges() {
        let region = Region::new((0.0, 1.0), (0.0, f64::INFINITY)).unwrap();
        let r = occupation_measure(&UnitSpeed, 0.0, &region, &OccupationOptions::default(), 1);
        assert!(matches!(r, Err(SemiMarkovError::Divergence(_))));
    }

    #[test]
    fn full_w_range_gives_y_length() {
        let a = Region::new((0.5, 2.0), (0.0, f64::INFINITY)).unwrap();
        let q = occupation_clock(0.5, 0.0, &a).unwrap();
        assert!((q.value - 1.5).abs() < 1e-12);
        // the same through the finite-range quadrature
        // the neglected tail beyond W is O(W^{-alpha})
        let b = Region::new((0.5, 2.0), (0.0, 1e10)).unwrap();
        let q = occupation_clock(0.5, 0.0, &b).unwrap();
        assert!((q.value - 1.5).abs() < 1e-3, "{}", q.value);
    }
}
