//! Pólya-Gamma PG(1, k): density and an exact sampler.
//!
//! The untilted density `h(u)` is an alternating series with two useful
//! forms. For small `u` the terms are
//! `(2l+1) / sqrt(2π u³) · exp(-(2l+1)² / (8u))`; for larger `u` the same
//! function equals `Σ (-1)^n 4π(n+½) exp(-2π²(n+½)² u)`. Both have terms that
//! decrease monotonically on their side of the switch point, so partial sums
//! bracket the true value.
//!
//! The sampler is Devroye's alternating-series rejection scheme in the
//! `J*(1, k/2)` parameterization, `PG(1, k) = J*(1, k/2) / 4`, with a
//! truncated inverse-Gaussian proposal below 0.64 and a truncated exponential
//! above it.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::special::ln_normal_cdf;

/// Proposal switch point in the `J*` scale.
const TRUNC: f64 = 0.64;

/// Below this value of `u` the small-argument series is used.
const SERIES_SWITCH: f64 = 0.25;

/// Default cap on series terms.
pub const MAX_TERMS: usize = 200;

/// Relative size at which a series term is negligible.
const TERM_RTOL: f64 = 1e-14;

/// Untilted density `h(u)`, summing at most `max_terms` terms.
pub fn pg_base_density(u: f64, max_terms: usize) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("PG density needs u > 0, got {u}")));
    }
    if max_terms == 0 {
        return Err(Error::InvalidParameter("at least one series term is required".into()));
    }
    let term = |l: usize| -> f64 {
        if u <= SERIES_SWITCH {
            let m = (2 * l + 1) as f64;
            m / (2.0 * PI * u * u * u).sqrt() * (-(m * m) / (8.0 * u)).exp()
        } else {
            let h = l as f64 + 0.5;
            4.0 * PI * h * (-2.0 * PI * PI * h * h * u).exp()
        }
    };
    let mut sum = 0.0;
    for l in 0..max_terms {
        let t = term(l);
        if l % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        if term(l + 1) < TERM_RTOL * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// `ln cosh(k/2) - k²u/2`, the log of the exponential tilt.
fn log_tilt(u: f64, k: f64) -> f64 {
    let a = 0.5 * k.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2 - 0.5 * k * k * u
}

/// PG(1, k) density at `u`.
pub fn pg_density(u: f64, k: f64, max_terms: usize) -> Result<f64> {
    check_k(k)?;
    let h = pg_base_density(u, max_terms)?;
    Ok(h * log_tilt(u, k).exp())
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "PG tilt must be finite and nonnegative, got {k}"
        )));
    }
    Ok(())
}

/// One exact draw from PG(1, k).
pub fn sample_pg<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64> {
    check_k(k)?;
    Ok(draw_pg(k, rng))
}

/// Unchecked sampler used inside the Gibbs loops; `k` is taken in absolute value.
pub(crate) fn draw_pg<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    let z = 0.5 * k.abs();
    let big_k = PI * PI / 8.0 + 0.5 * z * z;
    let p = PI / (2.0 * big_k) * (-big_k * TRUNC).exp();
    let q = 2.0 * inverse_gaussian_mass(z);
    let left_weight = p / (p + q);
    loop {
        let x = if rng.random::<f64>() < left_weight {
            let e: f64 = rng.sample(Exp1);
            TRUNC + e / big_k
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = series_coef(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coef(n, x);
                if y <= s {
                    return 0.25 * x;
                }
            } else {
                s += series_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// `e^{-z} P(IG(1/z, 1) < t)`, the exponential-tilted proposal mass below the
/// switch point. Evaluated in log space; at `z = 0` it is the Lévy mass.
fn inverse_gaussian_mass(z: f64) -> f64 {
    let rt = TRUNC.sqrt();
    if z == 0.0 {
        return 2.0 * ln_normal_cdf(-1.0 / rt).exp();
    }
    let a = ln_normal_cdf((TRUNC * z - 1.0) / rt) - z;
    let b = ln_normal_cdf(-(TRUNC * z + 1.0) / rt) + z;
    a.exp() + b.exp()
}

/// Coefficient `a_n(x)` of the `J*(1, 0)` density series.
fn series_coef(n: usize, x: f64) -> f64 {
    let h = n as f64 + 0.5;
    if x > TRUNC {
        PI * h * (-0.5 * h * h * PI * PI * x).exp()
    } else {
        PI * h * (2.0 / (PI * x)).powf(1.5) * (-2.0 * h * h / x).exp()
    }
}

/// Inverse Gaussian with mean `1/z` and shape 1, truncated to `(0, TRUNC)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > TRUNC {
        loop {
            let (mut e1, mut e2): (f64, f64) = (rng.sample(Exp1), rng.sample(Exp1));
            while e1 * e1 > 2.0 * e2 / TRUNC {
                e1 = rng.sample(Exp1);
                e2 = rng.sample(Exp1);
            }
            let d = 1.0 + TRUNC * e1;
            let x = TRUNC / (d * d);
            let accept = (-0.5 * z * z * x).exp();
            if rng.random::<f64>() <= accept {
                return x;
            }
        }
    } else {
        loop {
            let n: f64 = rng.sample(StandardNormal);
            let y = n * n;
            let muy = mu * y;
            let mut x = mu + 0.5 * mu * muy - 0.5 * mu * (4.0 * muy + muy * muy).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < TRUNC {
                return x;
            }
        }
    }
}
