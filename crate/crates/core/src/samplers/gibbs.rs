//! Pólya-Gamma Gibbs samplers for the logit link.
//!
//! With `κ_i = y_i - 1/2` and `z_i ~ PG(1, |x_iᵀβ|)`, the logistic likelihood
//! is conditionally Gaussian in β. Heavy-tailed priors are written as scale
//! mixtures of normals, so each sweep is
//!
//! 1. `β | mixing, z ~ N(P⁻¹ Xᵀ(κ - z∘o), P⁻¹)` with
//!    `P = Xᵀ diag(z) X + prior precision`;
//! 2. mixing variances given β (inverse gamma);
//! 3. `z_i | β ~ PG(1, |x_iᵀβ|)`.
//!
//! Nonzero prior locations μ are handled by sampling `b = β - μ` against the
//! offset `o = Xμ`, then adding μ back.

use nalgebra::DMatrix;
use rand::Rng;

use super::{guard, prior_label, run_chains, ChainOutput, Draws, GibbsConfig, Init, Link, PriorSpec};
use crate::dataset::Dataset;
use crate::distributions::{draw_inverse_gamma, draw_pg, std_normal, RngStream};
use crate::error::{Error, Result};
use crate::linalg;

/// Augmentation variables for the scale-mixture priors.
#[derive(Debug, Clone, PartialEq)]
pub enum Mixing {
    /// Normal prior: variances fixed at σ_j².
    None,
    /// Independent t: one variance γ_j per coefficient.
    Independent(Vec<f64>),
    /// Multivariate t: one scalar φ multiplying the scale matrix.
    Shared(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: Vec<f64>,
    pub mixing: Mixing,
    /// Pólya-Gamma variables, one per observation.
    pub z: Vec<f64>,
}

enum KernelPrior {
    Normal { inv_var: Vec<f64> },
    IndependentT { df: f64, scale2: Vec<f64> },
    MultivariateT { df: f64, precision: DMatrix<f64> },
}

struct Kernel {
    /// Row-major design.
    x: Vec<f64>,
    n: usize,
    p: usize,
    kappa: Vec<f64>,
    offset: Vec<f64>,
    mu: Vec<f64>,
    prior: KernelPrior,
}

impl Kernel {
    fn new(d: &Dataset, prior: &PriorSpec) -> Result<Self> {
        let (n, p) = (d.n(), d.p());
        if prior.dim() != p {
            return Err(Error::DimensionMismatch(format!(
                "prior has dimension {}, data has {p} coefficients",
                prior.dim()
            )));
        }
        let mut x = Vec::with_capacity(n * p);
        for i in 0..n {
            for j in 0..p {
                x.push(d.x()[(i, j)]);
            }
        }
        let mu = prior.locations().to_vec();
        let offset = (0..n)
            .map(|i| (0..p).map(|j| x[i * p + j] * mu[j]).sum())
            .collect();
        let kappa = d.y().iter().map(|&y| f64::from(y) - 0.5).collect();
        let prior = match prior {
            PriorSpec::IndependentNormal { scales, .. } => KernelPrior::Normal {
                inv_var: scales.iter().map(|s| 1.0 / (s * s)).collect(),
            },
            PriorSpec::IndependentT { df, scales, .. } => KernelPrior::IndependentT {
                df: *df,
                scale2: scales.iter().map(|s| s * s).collect(),
            },
            PriorSpec::MultivariateT {
                df, scale_matrix, ..
            } => KernelPrior::MultivariateT {
                df: *df,
                precision: linalg::spd_inverse(scale_matrix)?,
            },
        };
        Ok(Kernel {
            x,
            n,
            p,
            kappa,
            offset,
            mu,
            prior,
        })
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    fn dot(&self, i: usize, beta: &[f64]) -> f64 {
        self.row(i).iter().zip(beta).map(|(a, b)| a * b).sum()
    }

    /// `Xᵀ diag(z) X + prior precision` written into `out`.
    fn precision_into(&self, z: &[f64], mixing: &Mixing, out: &mut DMatrix<f64>) {
        let p = self.p;
        out.fill(0.0);
        for (i, &zi) in z.iter().enumerate() {
            let r = self.row(i);
            for a in 0..p {
                let w = zi * r[a];
                for b in 0..=a {
                    out[(a, b)] += w * r[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                out[(b, a)] = out[(a, b)];
            }
        }
        match (&self.prior, mixing) {
            (KernelPrior::Normal { inv_var }, _) => {
                for j in 0..p {
                    out[(j, j)] += inv_var[j];
                }
            }
            (KernelPrior::IndependentT { .. }, Mixing::Independent(gamma)) => {
                for j in 0..p {
                    out[(j, j)] += 1.0 / gamma[j];
                }
            }
            (KernelPrior::MultivariateT { precision, .. }, Mixing::Shared(phi)) => {
                *out += precision / *phi;
            }
            _ => unreachable!("mixing state does not match prior"),
        }
    }

    /// `Xᵀ(κ - z∘o)`.
    fn rhs(&self, z: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.p];
        for (i, zi) in z.iter().enumerate() {
            let w = self.kappa[i] - zi * self.offset[i];
            for (rj, xij) in r.iter_mut().zip(self.row(i)) {
                *rj += w * xij;
            }
        }
        r
    }

    /// Inverse-gamma `(shape, scale)` of the mixing variables given `b = β - μ`.
    fn mixing_params(&self, b: &[f64]) -> Vec<(f64, f64)> {
        match &self.prior {
            KernelPrior::Normal { .. } => Vec::new(),
            KernelPrior::IndependentT { df, scale2 } => b
                .iter()
                .zip(scale2)
                .map(|(bj, s2)| (0.5 * (df + 1.0), 0.5 * (bj * bj + df * s2)))
                .collect(),
            KernelPrior::MultivariateT { df, precision } => {
                let q = linalg::quad_form(precision, b);
                vec![(0.5 * (df + self.p as f64), 0.5 * (df + q))]
            }
        }
    }

    fn initial_mixing(&self) -> Mixing {
        match &self.prior {
            KernelPrior::Normal { .. } => Mixing::None,
            KernelPrior::IndependentT { scale2, .. } => Mixing::Independent(scale2.clone()),
            KernelPrior::MultivariateT { .. } => Mixing::Shared(1.0),
        }
    }

    fn draw_z<R: Rng + ?Sized>(&self, beta: &[f64], z: &mut [f64], rng: &mut R) {
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = draw_pg(self.dot(i, beta).abs(), rng);
        }
    }

    fn run_chain(
        &self,
        prior: &PriorSpec,
        cfg: &GibbsConfig,
        chain: usize,
        rng: &mut RngStream,
    ) -> Result<ChainOutput> {
        let p = self.p;
        let beta0 = match &cfg.init {
            Init::Zeros => vec![0.0; p],
            Init::PriorDraw => prior.sample(rng),
            Init::Vector(v) => v.clone(),
        };
        let mut z = vec![0.0; self.n];
        self.draw_z(&beta0, &mut z, rng);
        let mut state = ChainState {
            beta: beta0,
            mixing: self.initial_mixing(),
            z,
        };
        let mut prec = DMatrix::zeros(p, p);
        let mut b = vec![0.0; p];
        let mut out = Vec::with_capacity(cfg.kept_per_chain() * p);

        for t in 0..cfg.iterations {
            // 1. coefficients
            self.precision_into(&state.z, &state.mixing, &mut prec);
            let l = linalg::cholesky(&prec).map_err(|e| Error::Diverged {
                chain,
                iteration: t,
                reason: format!("coefficient update failed: {e}"),
                snapshot: state.beta.clone(),
            })?;
            let mean = linalg::cholesky_solve(&l, &self.rhs(&state.z));
            for v in b.iter_mut() {
                *v = std_normal(rng);
            }
            linalg::backward_solve_transpose(&l, &mut b);
            for j in 0..p {
                b[j] += mean[j];
                state.beta[j] = self.mu[j] + b[j];
            }
            guard(&state.beta, chain, t)?;

            // 2. mixing variances
            let params = self.mixing_params(&b);
            match &mut state.mixing {
                Mixing::None => {}
                Mixing::Independent(gamma) => {
                    for (g, (shape, scale)) in gamma.iter_mut().zip(&params) {
                        *g = draw_inverse_gamma(*shape, *scale, rng);
                    }
                }
                Mixing::Shared(phi) => {
                    let (shape, scale) = params[0];
                    *phi = draw_inverse_gamma(shape, scale, rng);
                }
            }
            let mixing_ok = match &state.mixing {
                Mixing::None => true,
                Mixing::Independent(g) => g.iter().all(|v| v.is_finite() && *v > 0.0),
                Mixing::Shared(v) => v.is_finite() && *v > 0.0,
            };
            if !mixing_ok {
                return Err(Error::Diverged {
                    chain,
                    iteration: t,
                    reason: format!("mixing variables left (0, inf): {:?}", state.mixing),
                    snapshot: state.beta.clone(),
                });
            }

            // 3. Pólya-Gamma variables
            self.draw_z(&state.beta, &mut state.z, rng);

            if cfg.keeps(t) {
                out.extend_from_slice(&state.beta);
            }
        }
        Ok(ChainOutput {
            samples: out,
            acceptance: None,
            step_scale: None,
        })
    }
}

fn run(d: &Dataset, prior: &PriorSpec, cfg: &GibbsConfig) -> Result<Draws> {
    cfg.validate(d.p())?;
    let kernel = Kernel::new(d, prior)?;
    let mut draws = run_chains(
        d.names().to_vec(),
        cfg,
        "gibbs",
        prior_label(prior),
        Link::Logit,
        |c, rng| kernel.run_chain(prior, cfg, c, rng),
    )?;
    draws.meta.record = d.transform().cloned();
    Ok(draws)
}

/// Gibbs sampler under independent Student-t priors (Cauchy at `df = 1`).
pub fn gibbs_independent_t(d: &Dataset, prior: &PriorSpec, cfg: &GibbsConfig) -> Result<Draws> {
    match prior {
        PriorSpec::IndependentT { .. } => run(d, prior, cfg),
        _ => Err(Error::Unsupported("gibbs_independent_t needs an independent t prior".into())),
    }
}

/// Gibbs sampler under independent normal priors (no mixing step).
pub fn gibbs_normal(d: &Dataset, prior: &PriorSpec, cfg: &GibbsConfig) -> Result<Draws> {
    match prior {
        PriorSpec::IndependentNormal { .. } => run(d, prior, cfg),
        _ => Err(Error::Unsupported("gibbs_normal needs an independent normal prior".into())),
    }
}

/// Gibbs sampler under a multivariate t prior with one shared mixing scalar.
pub fn gibbs_multivariate_t(d: &Dataset, prior: &PriorSpec, cfg: &GibbsConfig) -> Result<Draws> {
    match prior {
        PriorSpec::MultivariateT { df, .. } if *df >= 1.0 => run(d, prior, cfg),
        PriorSpec::MultivariateT { df, .. } => Err(Error::InvalidParameter(format!(
            "multivariate t sampler needs df >= 1, got {df}"
        ))),
        _ => Err(Error::Unsupported("gibbs_multivariate_t needs a multivariate t prior".into())),
    }
}

/// Precision and mean of the coefficient full conditional at `state`, in the
/// original (unshifted) coordinates.
pub fn gibbs_step_beta(
    d: &Dataset,
    prior: &PriorSpec,
    state: &ChainState,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let k = Kernel::new(d, prior)?;
    if state.z.len() != k.n || state.beta.len() != k.p {
        return Err(Error::DimensionMismatch("chain state does not match data".into()));
    }
    let mut prec = DMatrix::zeros(k.p, k.p);
    k.precision_into(&state.z, &state.mixing, &mut prec);
    let l = linalg::cholesky(&prec)?;
    let mean = linalg::cholesky_solve(&l, &k.rhs(&state.z));
    let mean = mean.iter().zip(&k.mu).map(|(b, m)| b + m).collect();
    Ok((prec, mean))
}

/// Inverse-gamma `(shape, scale)` pairs of the mixing full conditional(s).
pub fn gibbs_step_mixing(d: &Dataset, prior: &PriorSpec, beta: &[f64]) -> Result<Vec<(f64, f64)>> {
    let k = Kernel::new(d, prior)?;
    if beta.len() != k.p {
        return Err(Error::DimensionMismatch("beta does not match data".into()));
    }
    let b: Vec<f64> = beta.iter().zip(&k.mu).map(|(x, m)| x - m).collect();
    Ok(k.mixing_params(&b))
}
