//! Test-only reference computations, written independently of the library's
//! closed forms.

#![allow(dead_code)]

use proptest::prelude::*;
use siggame_core::GameParams;

/// Decoder error at ratio `alpha` with the gain and offset set to their
/// conditional minimisers, by direct expansion of `E[(x - k r - l)^2]`.
pub fn decoder_cost_at_alpha(a: f64, c: f64, alpha: f64, sx: f64, sv: f64, sw: f64) -> f64 {
    let g = alpha * a + (1.0 - alpha);
    let noise = alpha * alpha * sv + (1.0 - alpha) * (1.0 - alpha) * sw;
    // E[r^2] - E[r]^2 and Cov(x, r)
    let var_r = g * g * sx + noise;
    let cov = g * sx;
    let _ = c; // offset is removed exactly by l
    if var_r == 0.0 {
        sx
    } else {
        sx - cov * cov / var_r
    }
}

/// Minimum over a uniform grid of `alpha` in `[0, 1]`.
pub fn grid_min_decoder_cost(a: f64, sx: f64, sv: f64, sw: f64, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    (0..=n)
        .map(|i| decoder_cost_at_alpha(a, 0.0, i as f64 / n as f64, sx, sv, sw))
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a symmetric 2x2 matrix.
pub fn sym2_eigenvalues(a: f64, b: f64, d: f64) -> (f64, f64) {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// Minimiser of a convex function on `[lo, hi]` by bisection on its
/// (monotone) derivative.
pub fn bisect_root(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the minimiser of a unimodal function.
pub fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

pub fn variance() -> impl Strategy<Value = f64> {
    0.1f64..10.0
}

/// Valid single-stage instance with `theta > 0`.
pub fn game_params() -> impl Strategy<Value = GameParams> {
    (variance(), variance(), variance(), 0.001f64..2.0, -3.0f64..3.0)
        .prop_map(|(sx, sv, sw, theta, b)| GameParams::new(sx, sv, sw, theta, b))
}

pub fn threshold(p: &GameParams) -> f64 {
    p.sigma_x2 / (p.sigma_v2 * (p.sigma_x2 / p.sigma_w2 + 1.0).powi(2))
}

/// Valid instance with `theta` strictly below the transmission threshold.
pub fn below_threshold_params() -> impl Strategy<Value = GameParams> {
    (variance(), variance(), variance(), 0.05f64..0.95, -3.0f64..3.0).prop_map(|(sx, sv, sw, frac, b)| {
        let mut p = GameParams::new(sx, sv, sw, 1.0, b);
        p.theta = frac * threshold(&p);
        p
    })
}
