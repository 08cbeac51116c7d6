//! Numerically careful scalar functions.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument `ln Φ` switches to its asymptotic expansion.
const ASYMPTOTIC_CUT: f64 = -35.0;

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / SQRT_2)
}

/// `ln Φ(t)`, accurate far into both tails.
pub fn ln_normal_cdf(t: f64) -> f64 {
    if t > 0.0 {
        (-0.5 * erfc(t / SQRT_2)).ln_1p()
    } else if t > ASYMPTOTIC_CUT {
        (0.5 * erfc(-t / SQRT_2)).ln()
    } else {
        // Φ(t) = φ(t)/|t| · (1 - 1/t² + 3/t⁴ - 15/t⁶ + 105/t⁸ - 945/t¹⁰ ...)
        let t2 = t * t;
        let mut term = 1.0;
        let mut series = 1.0;
        for k in 1..=5 {
            term *= -((2 * k - 1) as f64) / t2;
            series += term;
        }
        -0.5 * t2 - LN_SQRT_2PI - (-t).ln() + series.ln()
    }
}

/// Standard normal log density.
pub fn ln_normal_pdf(t: f64) -> f64 {
    -0.5 * t * t - LN_SQRT_2PI
}

/// Inverse Mills ratio `φ(t) / Φ(t)`.
pub fn mills(t: f64) -> f64 {
    (ln_normal_pdf(t) - ln_normal_cdf(t)).exp()
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic function.
pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln Γ(ν/2 + ½) - ln Γ(ν/2) - ½ ln(νπ)`, the Student-t normalizing constant.
pub fn ln_student_t_const(df: f64) -> f64 {
    ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln()
}
