//! One-sided stable law with `E exp(-s D_1) = exp(-s^alpha)` and the
//! potential-type integrals of `g(w, u) = P(D_u in dw) / dw` used by the kernels.
//!
//! The density comes from Kanter's integral for moderate arguments and from the
//! convergent series `g(x) = pi^{-1} sum_k (-1)^{k+1} Gamma(alpha k + 1) / k! sin(pi alpha k) x^{-alpha k - 1}`
//! for large ones. The scaling `g(w, u) = u^{-1/alpha} g(w u^{-1/alpha})` gives
//!
//! `int_{u_a}^{u_b} g(w, u) du = w^{alpha - 1} (M(u_b w^{-alpha}) - M(u_a w^{-alpha}))`
//!
//! with `M(z) = alpha E[E_1; E_1 <= z]`, tabulated once per index.

use crate::error::{Result, SemiMarkovError};
use levy_core::quad::gl16;
use statrs::function::gamma::{gamma, ln_gamma};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const KANTER_PANELS: usize = 32;
const SERIES_SWITCH: f64 = 0.25;
const TABLE_STEP: f64 = 0.02;

#[derive(Debug)]
pub struct OneSidedStable {
    alpha: f64,
    /// `ln y` nodes of the table of `C(y) = alpha int_y^inf v^{-alpha} g(v) dv`.
    ln_y: Vec<f64>,
    c: Vec<f64>,
    /// `dC / d ln y = -alpha y^{1 - alpha} g(y)`.
    dc: Vec<f64>,
    total: f64,
}

impl OneSidedStable {
    /// Shared table for index `alpha`, built on first use.
    pub fn get(alpha: f64) -> Result<Arc<OneSidedStable>> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(SemiMarkovError::Domain(format!("stable index must lie in (0,1), got {alpha}")));
        }
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<OneSidedStable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&alpha.to_bits()) {
            return Ok(t.clone());
        }
        let table = Arc::new(Self::build(alpha));
        cache.lock().unwrap().insert(alpha.to_bits(), table.clone());
        Ok(table)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Density of `D_1` at `x`.
    pub fn density(&self, x: f64) -> f64 {
        density(self.alpha, x)
    }

    /// Density of `D_u` at `w`.
    pub fn density_at(&self, w: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let scale = u.powf(-1.0 / self.alpha);
        scale * density(self.alpha, w * scale)
    }

    /// `M(z) = alpha E[E_1; E_1 <= z]`, increasing from 0 to `1 / Gamma(alpha)`.
    pub fn m(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z.is_infinite() {
            return self.total;
        }
        // E_1 = D_1^{-alpha}, so E_1 <= z iff D_1 >= y
        let ln_y = -z.ln() / self.alpha;
        self.c_of(ln_y)
    }

    /// `int_{u_a}^{u_b} g(w, u) du`.
    pub fn potential_mass(&self, w: f64, u_a: f64, u_b: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let wa = w.powf(-self.alpha);
        w.powf(self.alpha - 1.0) * (self.m(u_b * wa) - self.m(u_a * wa))
    }

    /// Density of `E_t` at `u`: `(t / alpha) u^{-1 - 1/alpha} g(t u^{-1/alpha})`.
    pub fn inverse_density(&self, t: f64, u: f64) -> f64 {
        if u <= 0.0 || t <= 0.0 {
            return 0.0;
        }
        let y = t * u.powf(-1.0 / self.alpha);
        t / self.alpha * u.powf(-1.0 - 1.0 / self.alpha) * density(self.alpha, y)
    }

    /// `P(E_t > u) = P(D_u < t)`.
    pub fn inverse_tail(&self, t: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        let ln_y = (t * u.powf(-1.0 / self.alpha)).ln();
        1.0 - self.cdf_tail(ln_y)
    }

    /// `P(D_1 >= y)` at `ln y`, by integration of the density on the table grid.
    fn cdf_tail(&self, ln_y: f64) -> f64 {
        let a = self.alpha;
        let (lo, hi) = (self.ln_y[0], *self.ln_y.last().unwrap());
        if ln_y <= lo {
            return 1.0;
        }
        if ln_y >= hi {
            return series_tail_prob(a, ln_y.exp());
        }
        // series beyond hi plus integral from ln_y to hi
        let mut acc = series_tail_prob(a, hi.exp());
        let rule = gl16();
        let mut x = ln_y;
        while x < hi {
            let b = (x + 0.25).min(hi);
            acc += rule.integrate(x, b, |v| {
                let y = v.exp();
                y * density(a, y)
            });
            x = b;
        }
        acc.min(1.0)
    }

    fn c_of(&self, ln_y: f64) -> f64 {
        let (lo, hi) = (self.ln_y[0], *self.ln_y.last().unwrap());
        if ln_y <= lo {
            return self.total;
        }
        if ln_y >= hi {
            return series_c(self.alpha, ln_y.exp());
        }
        let pos = (ln_y - lo) / TABLE_STEP;
        let i = (pos.floor() as usize).min(self.ln_y.len() - 2);
        let t = pos - i as f64;
        // cubic Hermite on the uniform ln y grid
        let h = TABLE_STEP;
        let (p0, p1, m0, m1) = (self.c[i], self.c[i + 1], self.dc[i] * h, self.dc[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1
    }

    fn build(alpha: f64) -> Self {
        let a0 = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
        // below y_lo the Kanter exponent exceeds 700
        let ln_lo = -(1.0 - alpha) / alpha * (700.0 / a0).ln();
        let ln_hi = (1.0 / SERIES_SWITCH).ln() / alpha + 1.0;
        let n = ((ln_hi - ln_lo) / TABLE_STEP).ceil() as usize + 1;
        let ln_y: Vec<f64> = (0..n).map(|i| ln_lo + i as f64 * TABLE_STEP).collect();
        let ln_hi = *ln_y.last().unwrap();
        let integrand = |v: f64| {
            let y = v.exp();
            alpha * y.powf(1.0 - alpha) * density(alpha, y)
        };
        let mut c = vec![0.0; n];
        c[n - 1] = series_c(alpha, ln_hi.exp());
        let rule = gl16();
        for i in (0..n - 1).rev() {
            c[i] = c[i + 1] + rule.integrate(ln_y[i], ln_y[i + 1], integrand);
        }
        let dc = ln_y.iter().map(|&v| -integrand(v)).collect();
        OneSidedStable {
            alpha,
            ln_y,
            c,
            dc,
            total: 1.0 / gamma(alpha),
        }
    }

    /// `C` at the bottom of the table, which must equal `1 / Gamma(alpha)`.
    pub fn table_total(&self) -> f64 {
        self.c[0]
    }
}

/// Coefficient `pi^{-1} (-1)^{k+1} Gamma(alpha k + 1) / k! sin(pi alpha k)` of the large-x series.
fn series_coeff(alpha: f64, k: usize) -> f64 {
    let kf = k as f64;
    let mag = (ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0)).exp();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * mag * (PI * alpha * kf).sin() / PI
}

/// Number of series terms for ratio `r = x^{-alpha} <= SERIES_SWITCH`.
const SERIES_TERMS: usize = 60;

fn series_density(alpha: f64, x: f64) -> f64 {
    let r = x.powf(-alpha);
    let mut acc = 0.0;
    let mut pow = r;
    for k in 1..=SERIES_TERMS {
        acc += series_coeff(alpha, k) * pow;
        pow *= r;
        if pow < 1e-18 {
            break;
        }
    }
    acc / x
}

/// `C(Y) = alpha int_Y^inf v^{-alpha} g(v) dv` from the series, termwise.
fn series_c(alpha: f64, y: f64) -> f64 {
    let r = y.powf(-alpha);
    let mut acc = 0.0;
    let mut pow = r * r;
    for k in 1..=SERIES_TERMS {
        acc += series_coeff(alpha, k) * pow / (k + 1) as f64;
        pow *= r;
        if pow < 1e-18 {
            break;
        }
    }
    acc
}

/// `P(D_1 >= y)` from the series, termwise.
fn series_tail_prob(alpha: f64, y: f64) -> f64 {
    let r = y.powf(-alpha);
    let mut acc = 0.0;
    let mut pow = r;
    for k in 1..=SERIES_TERMS {
        acc += series_coeff(alpha, k) * pow / (alpha * k as f64);
        pow *= r;
        if pow < 1e-18 {
            break;
        }
    }
    acc
}

/// Kanter's representation:
/// `g(x) = alpha / ((1 - alpha) pi) x^{-1/(1-alpha)} int_0^pi A(th) exp(-A(th) x^{-alpha/(1-alpha)}) dth`.
fn kanter_density(alpha: f64, x: f64) -> f64 {
    let beta = 1.0 - alpha;
    let lam = x.powf(-alpha / beta);
    let ln_a = |th: f64| {
        alpha / beta * (alpha * th).sin().ln() + (beta * th).sin().ln() - th.sin().ln() / beta
    };
    let f = |th: f64| {
        let la = ln_a(th);
        (la - lam * la.exp()).exp()
    };
    let rule = gl16();
    // uniform panels on [0, pi/2]; towards pi, A grows like (pi - th)^{-1/(1-alpha)}
    // and the integrand needs panels shrinking geometrically
    let h = 0.5 * PI / KANTER_PANELS as f64;
    let mut acc = 0.0;
    for p in 0..KANTER_PANELS {
        let lo = p as f64 * h;
        acc += rule.integrate(lo, lo + h, f);
    }
    let mut gap = 0.5 * PI;
    while gap > 1e-14 {
        let next = gap * 0.7;
        acc += rule.integrate(PI - gap, PI - next, f);
        gap = next;
    }
    alpha / (beta * PI) * x.powf(-1.0 / beta) * acc
}

/// Density of `D_1` at `x`.
pub fn density(alpha: f64, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x.powf(-alpha) <= SERIES_SWITCH {
        series_density(alpha, x)
    } else {
        kanter_density(alpha, x)
    }
}
