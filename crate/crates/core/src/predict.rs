//! Out-of-sample evaluation and the posterior-mode comparator.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::samplers::{log_posterior, log_posterior_derivs, Draws, Link, PriorSpec};

/// Prediction metrics for one estimator on one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    /// `MCMC` or `MAP`.
    pub label: String,
    pub n_test: usize,
    pub threshold: f64,
    pub misclassification: f64,
    pub brier: f64,
    pub probabilities: Vec<f64>,
    pub classification: Vec<u8>,
}

impl PredictionResult {
    pub fn new(label: &str, probs: Vec<f64>, y: &[u8], threshold: f64) -> Result<Self> {
        let misclassification = misclassification(&probs, y, threshold)?;
        let brier = brier(&probs, y)?;
        let classification = probs.iter().map(|&p| u8::from(p >= threshold)).collect();
        Ok(PredictionResult {
            label: label.to_string(),
            n_test: y.len(),
            threshold,
            misclassification,
            brier,
            probabilities: probs,
            classification,
        })
    }
}

fn check_test_design(names: &[String], record: Option<&crate::dataset::StandardizationRecord>, test: &Dataset) -> Result<()> {
    if names != test.names() {
        return Err(Error::DimensionMismatch(format!(
            "draws have columns {names:?}, test data {:?}",
            test.names()
        )));
    }
    if record != test.transform() {
        return Err(Error::RecordMismatch(
            "test data were not transformed with the training standardization record".into(),
        ));
    }
    Ok(())
}

/// `π̂_i = (1/S) Σ_s f1(x_iᵀβ⁽ˢ⁾)`.
pub fn predict_mc(draws: &Draws, test: &Dataset, link: Link) -> Result<Vec<f64>> {
    if draws.is_empty() {
        return Err(Error::Empty("no draws".into()));
    }
    if link != draws.meta.link {
        return Err(Error::InvalidParameter(format!(
            "draws were fitted with the {} link, not {link}",
            draws.meta.link
        )));
    }
    check_test_design(&draws.names, draws.meta.record.as_ref(), test)?;
    let x = test.x();
    let p = draws.p();
    let s = draws.len() as f64;
    Ok((0..test.n())
        .map(|i| {
            let row: Vec<f64> = (0..p).map(|j| x[(i, j)]).collect();
            let total: f64 = draws
                .rows()
                .map(|b| link.success_prob(row.iter().zip(b).map(|(a, c)| a * c).sum()))
                .sum();
            total / s
        })
        .collect())
}

/// `f1(x_iᵀβ)` at a single coefficient vector.
pub fn predict_point(beta: &[f64], test: &Dataset, link: Link) -> Result<Vec<f64>> {
    if beta.len() != test.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, test data {} columns",
            beta.len(),
            test.p()
        )));
    }
    let x = test.x();
    Ok((0..test.n())
        .map(|i| link.success_prob((0..test.p()).map(|j| x[(i, j)] * beta[j]).sum()))
        .collect())
}

fn check_lengths(probs: &[f64], y: &[u8]) -> Result<()> {
    if probs.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} outcomes",
            probs.len(),
            y.len()
        )));
    }
    if probs.is_empty() {
        return Err(Error::Empty("no test observations".into()));
    }
    Ok(())
}

/// Fraction of observations with `1{π̂ ≥ threshold} ≠ y`. Ties count as successes.
pub fn misclassification(probs: &[f64], y: &[u8], threshold: f64) -> Result<f64> {
    check_lengths(probs, y)?;
    let wrong = probs
        .iter()
        .zip(y)
        .filter(|(p, y)| u8::from(**p >= threshold) != **y)
        .count();
    Ok(wrong as f64 / y.len() as f64)
}

/// Brier score in mean-squared-error form.
pub fn brier(probs: &[f64], y: &[u8]) -> Result<f64> {
    check_lengths(probs, y)?;
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(probs
        .iter()
        .zip(y)
        .map(|(p, &y)| (p - f64::from(y)).powi(2))
        .sum::<f64>()
        / y.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResult {
    pub beta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `‖∇ log posterior‖_∞` at `beta`.
    pub grad_norm: f64,
    pub log_posterior: f64,
    pub notes: Vec<String>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Posterior mode by damped Newton ascent, starting at the prior location.
///
/// Where the Hessian is not negative definite the iterate takes a gradient
/// step instead. Exhausting `max_iter` returns the last iterate with
/// `converged = false`.
pub fn map_estimate(
    d: &Dataset,
    prior: &PriorSpec,
    link: Link,
    tol: f64,
    max_iter: usize,
) -> Result<MapResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut beta = prior.locations().to_vec();
    let mut lp = log_posterior(&beta, d, prior, link)?;
    let mut notes = Vec::new();
    let mut gradient_steps = 0usize;

    for it in 0..max_iter {
        let (g, h) = log_posterior_derivs(&beta, d, prior, link)?;
        let gn = inf_norm(&g);
        if gn < tol {
            return Ok(MapResult {
                beta,
                converged: true,
                iterations: it,
                grad_norm: gn,
                log_posterior: lp,
                notes,
            });
        }
        let (dir, max_step) = match linalg::cholesky(&(-&h)) {
            Ok(l) => (linalg::cholesky_solve(&l, &g), 1.0),
            Err(_) => {
                gradient_steps += 1;
                // Cap the first trial move at unit length.
                (g.clone(), 1.0 / gn.max(1.0))
            }
        };
        let mut t = max_step;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = beta.iter().zip(&dir).map(|(b, s)| b + t * s).collect();
            let lc = log_posterior(&cand, d, prior, link)?;
            if lc.is_finite() && lc >= lp {
                beta = cand;
                lp = lc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            notes.push(format!("line search stalled at iteration {it}"));
            break;
        }
    }
    if gradient_steps > 0 {
        notes.push(format!(
            "Hessian not negative definite at {gradient_steps} iterate(s); took gradient steps"
        ));
    }
    let (g, _) = log_posterior_derivs(&beta, d, prior, link)?;
    let gn = inf_norm(&g);
    Ok(MapResult {
        converged: gn < tol,
        iterations: max_iter,
        grad_norm: gn,
        log_posterior: lp,
        beta,
        notes,
    })
}
