use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::special::{ln_normal_cdf, logistic, mills, normal_cdf, softplus};

/// Inverse link `f1(t) = P(y = 1 | t)` for a binary regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Logit,
    Probit,
}

impl Link {
    /// `(ln f1(t), ln f0(t))`.
    pub fn log_probs(self, t: f64) -> (f64, f64) {
        match self {
            Link::Logit => (-softplus(-t), -softplus(t)),
            Link::Probit => (ln_normal_cdf(t), ln_normal_cdf(-t)),
        }
    }

    /// Log-likelihood contribution of one observation with linear predictor `t`.
    pub fn log_lik(self, y: u8, t: f64) -> f64 {
        let (l1, l0) = self.log_probs(t);
        if y == 1 {
            l1
        } else {
            l0
        }
    }

    /// First and second derivative of [`Link::log_lik`] in `t`.
    pub fn log_lik_derivs(self, y: u8, t: f64) -> (f64, f64) {
        match self {
            Link::Logit => {
                let p = logistic(t);
                (f64::from(y) - p, -p * (1.0 - p))
            }
            Link::Probit => {
                // d/dt ln Φ(s t) = s m(s t), d²/dt² = -m(s t)(s t + m(s t)), s = ±1
                let s = if y == 1 { 1.0 } else { -1.0 };
                let m = mills(s * t);
                (s * m, -m * (s * t + m))
            }
        }
    }

    pub fn success_prob(self, t: f64) -> f64 {
        match self {
            Link::Logit => logistic(t),
            Link::Probit => normal_cdf(t),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        })
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            other => Err(Error::InvalidParameter(format!("unknown link `{other}`"))),
        }
    }
}

/// Success and failure probabilities at linear predictor `t`. The failure
/// probability is computed directly, not as `1 - f1`, so both stay accurate
/// in the tails.
pub fn link_probabilities(t: f64, link: Link) -> (f64, f64) {
    (link.success_prob(t), link.success_prob(-t))
}
