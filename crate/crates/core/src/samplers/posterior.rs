use nalgebra::DMatrix;

use super::{Link, PriorSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

fn check_dims(beta: &[f64], d: &Dataset, prior: &PriorSpec) -> Result<()> {
    if beta.len() != d.p() || prior.dim() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, prior {}, data {} columns",
            beta.len(),
            prior.dim(),
            d.p()
        )));
    }
    Ok(())
}

pub(crate) fn linear_predictor(d: &Dataset, beta: &[f64], i: usize) -> f64 {
    let x = d.x();
    beta.iter().enumerate().map(|(j, b)| x[(i, j)] * b).sum()
}

/// Log-likelihood `Σ_{A1} ln f1(x_iᵀβ) + Σ_{A0} ln f0(x_iᵀβ)`.
pub fn log_likelihood(beta: &[f64], d: &Dataset, link: Link) -> Result<f64> {
    if beta.len() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, data {} columns",
            beta.len(),
            d.p()
        )));
    }
    Ok(log_likelihood_unchecked(beta, d, link))
}

pub(crate) fn log_likelihood_unchecked(beta: &[f64], d: &Dataset, link: Link) -> f64 {
    d.y()
        .iter()
        .enumerate()
        .map(|(i, &y)| link.log_lik(y, linear_predictor(d, beta, i)))
        .sum()
}

/// Unnormalized log posterior: log-likelihood plus normalized log prior.
pub fn log_posterior(beta: &[f64], d: &Dataset, prior: &PriorSpec, link: Link) -> Result<f64> {
    check_dims(beta, d, prior)?;
    Ok(log_posterior_unchecked(beta, d, prior, link))
}

pub(crate) fn log_posterior_unchecked(beta: &[f64], d: &Dataset, prior: &PriorSpec, link: Link) -> f64 {
    log_likelihood_unchecked(beta, d, link) + prior.log_density(beta)
}

/// Gradient and Hessian of [`log_posterior`].
pub fn log_posterior_derivs(
    beta: &[f64],
    d: &Dataset,
    prior: &PriorSpec,
    link: Link,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_dims(beta, d, prior)?;
    let (mut g, mut h) = prior.log_density_derivs(beta);
    let x = d.x();
    let p = d.p();
    for (i, &y) in d.y().iter().enumerate() {
        let (d1, d2) = link.log_lik_derivs(y, linear_predictor(d, beta, i));
        for a in 0..p {
            let xa = x[(i, a)];
            g[a] += d1 * xa;
            for b in 0..=a {
                let v = d2 * xa * x[(i, b)];
                h[(a, b)] += v;
                if a != b {
                    h[(b, a)] += v;
                }
            }
        }
    }
    Ok((g, h))
}
