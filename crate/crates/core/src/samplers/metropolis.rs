//! Random-walk Metropolis with a spherical Gaussian proposal.
//!
//! During burn-in the log step size follows a Robbins-Monro recursion toward
//! the target acceptance rate; afterwards it is frozen so the kept draws come
//! from a fixed, reversible kernel.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::posterior::log_posterior_unchecked;
use super::{guard, prior_label, run_chains, ChainOutput, Draws, GibbsConfig, Init, Link, PriorSpec};
use crate::dataset::Dataset;
use crate::distributions::std_normal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetropolisConfig {
    pub initial_scale: f64,
    pub target_acceptance: f64,
}

impl Default for MetropolisConfig {
    fn default() -> Self {
        MetropolisConfig {
            initial_scale: 0.1,
            target_acceptance: 0.234,
        }
    }
}

/// Robbins-Monro gain at adaptation step `t`.
fn gain(t: usize) -> f64 {
    ((t + 1) as f64).powf(-0.6)
}

pub fn rw_metropolis(
    d: &Dataset,
    prior: &PriorSpec,
    link: Link,
    cfg: &GibbsConfig,
    mh: &MetropolisConfig,
) -> Result<Draws> {
    let p = d.p();
    cfg.validate(p)?;
    if prior.dim() != p {
        return Err(Error::DimensionMismatch(format!(
            "prior has dimension {}, data has {p} coefficients",
            prior.dim()
        )));
    }
    if !(mh.initial_scale > 0.0 && mh.initial_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial proposal scale must be positive, got {}",
            mh.initial_scale
        )));
    }
    if !(mh.target_acceptance > 0.0 && mh.target_acceptance < 1.0) {
        return Err(Error::InvalidParameter("target acceptance must lie in (0, 1)".into()));
    }

    let mut draws = run_chains(
        d.names().to_vec(),
        cfg,
        "metropolis",
        prior_label(prior),
        link,
        |chain, rng| {
            let mut beta = match &cfg.init {
                Init::Zeros => vec![0.0; p],
                Init::PriorDraw => prior.sample(rng),
                Init::Vector(v) => v.clone(),
            };
            let mut lp = log_posterior_unchecked(&beta, d, prior, link);
            if !lp.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "log posterior is not finite at the initial value (chain {chain})"
                )));
            }
            let mut log_s = mh.initial_scale.ln();
            let mut prop = vec![0.0; p];
            let mut accepted = 0usize;
            let mut after_burnin = 0usize;
            let mut out = Vec::with_capacity(cfg.kept_per_chain() * p);

            for t in 0..cfg.iterations {
                let s = log_s.exp();
                for (q, b) in prop.iter_mut().zip(&beta) {
                    *q = b + s * std_normal(rng);
                }
                let lq = log_posterior_unchecked(&prop, d, prior, link);
                let log_ratio = lq - lp;
                let alpha = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
                let accept = rng.random::<f64>() < alpha;
                if accept {
                    beta.copy_from_slice(&prop);
                    lp = lq;
                }
                guard(&beta, chain, t)?;
                if t < cfg.burnin {
                    log_s += gain(t) * (alpha - mh.target_acceptance);
                } else {
                    after_burnin += 1;
                    accepted += usize::from(accept);
                }
                if cfg.keeps(t) {
                    out.extend_from_slice(&beta);
                }
            }
            Ok(ChainOutput {
                samples: out,
                acceptance: Some(accepted as f64 / after_burnin.max(1) as f64),
                step_scale: Some(log_s.exp()),
            })
        },
    )?;
    draws.meta.record = d.transform().cloned();
    Ok(draws)
}
