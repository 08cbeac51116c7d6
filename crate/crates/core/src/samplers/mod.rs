//! Posterior simulation for binary regression.
//!
//! * [`gibbs_independent_t`], [`gibbs_normal`] and [`gibbs_multivariate_t`]
//!   are Pólya-Gamma data-augmentation Gibbs samplers for the logit link.
//! * [`rw_metropolis`] is a random-walk Metropolis sampler for any supported
//!   prior and link.
//!
//! Chains run on their own threads, each owning an [`RngStream`] keyed by
//! `(seed, chain index)`, so a configuration always reproduces the same
//! draws regardless of scheduling.

mod gibbs;
mod link;
mod metropolis;
mod posterior;
mod prior;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::StandardizationRecord;
use crate::distributions::RngStream;
use crate::error::{Error, Result};

pub use gibbs::{
    gibbs_independent_t, gibbs_multivariate_t, gibbs_normal, gibbs_step_beta, gibbs_step_mixing,
    ChainState, Mixing,
};
pub use link::{link_probabilities, Link};
pub use metropolis::{rw_metropolis, MetropolisConfig};
pub use posterior::{log_likelihood, log_posterior, log_posterior_derivs};
pub use prior::PriorSpec;

/// Any coefficient beyond this magnitude aborts the chain.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    Zeros,
    PriorDraw,
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    /// Total iterations per chain, burn-in included.
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub chains: usize,
    pub init: Init,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            iterations: 11_000,
            burnin: 1_000,
            thin: 1,
            seed: 1,
            chains: 1,
            init: Init::Zeros,
        }
    }
}

impl GibbsConfig {
    pub fn new(iterations: usize, burnin: usize, seed: u64) -> Self {
        GibbsConfig {
            iterations,
            burnin,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.iterations == 0 || self.thin == 0 || self.chains == 0 {
            return Err(Error::InvalidParameter(
                "iterations, thin and chains must be positive".into(),
            ));
        }
        if self.burnin >= self.iterations {
            return Err(Error::InvalidParameter(format!(
                "burn-in {} must be below iterations {}",
                self.burnin, self.iterations
            )));
        }
        if self.kept_per_chain() == 0 {
            return Err(Error::InvalidParameter("thinning leaves no draws".into()));
        }
        if let Init::Vector(v) = &self.init {
            if v.len() != p || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "initial vector must have {p} finite entries"
                )));
            }
        }
        Ok(())
    }

    pub fn kept_per_chain(&self) -> usize {
        self.iterations.saturating_sub(self.burnin) / self.thin.max(1)
    }

    /// Whether iteration `t` (0-based) is retained.
    pub(crate) fn keeps(&self, t: usize) -> bool {
        t >= self.burnin && (t - self.burnin + 1).is_multiple_of(self.thin)
    }
}

/// Run metadata written next to the draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawsMeta {
    pub sampler: String,
    pub prior: String,
    pub link: Link,
    pub config: GibbsConfig,
    /// Post-burn-in acceptance rate per chain (Metropolis only).
    #[serde(default)]
    pub acceptance: Vec<f64>,
    /// Frozen proposal scale per chain (Metropolis only).
    #[serde(default)]
    pub step_scale: Vec<f64>,
    pub wall_time_secs: f64,
    #[serde(default)]
    pub record: Option<StandardizationRecord>,
}

/// Retained posterior draws, row-major (`S × p`), pooled over chains.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    pub names: Vec<String>,
    pub samples: Vec<f64>,
    pub chain: Vec<u32>,
    pub meta: DrawsMeta,
}

impl Draws {
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, s: usize) -> &[f64] {
        let p = self.p();
        &self.samples[s * p..(s + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.p().max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn chain_ids(&self) -> Vec<u32> {
        let mut ids = self.chain.clone();
        ids.dedup();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Column `j` restricted to one chain, in iteration order.
    pub fn chain_column(&self, chain: u32, j: usize) -> Vec<f64> {
        self.rows()
            .zip(&self.chain)
            .filter(|(_, &c)| c == chain)
            .map(|(r, _)| r[j])
            .collect()
    }

    pub fn means(&self) -> Vec<f64> {
        let s = self.len() as f64;
        (0..self.p()).map(|j| self.column(j).iter().sum::<f64>() / s).collect()
    }

    /// One row per retained draw, columns = coefficient names then `chain`.
    /// Values use the shortest representation that round-trips exactly.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.push("chain");
        wr.write_record(&header)?;
        let mut rec = Vec::with_capacity(self.p() + 1);
        for (row, c) in self.rows().zip(&self.chain) {
            rec.clear();
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(c.to_string());
            wr.write_record(&rec)?;
        }
        wr.flush().map_err(|e| Error::io("<draws csv>", e))?;
        Ok(())
    }

    /// Reads a file written by [`Draws::write_csv`], attaching `meta`.
    pub fn read_csv<R: std::io::Read>(r: R, meta: DrawsMeta) -> Result<Draws> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        if header.len() < 2 || header.get(header.len() - 1) != Some("chain") {
            return Err(Error::MalformedDraws("last column must be `chain`".into()));
        }
        let p = header.len() - 1;
        let names: Vec<String> = header.iter().take(p).map(str::to_string).collect();
        let mut samples = Vec::new();
        let mut chain = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != p + 1 {
                return Err(Error::MalformedDraws(format!("row {} has {} fields", i + 1, rec.len())));
            }
            for (j, cell) in rec.iter().take(p).enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::MalformedDraws(format!("row {}, column `{}`: {cell:?}", i + 1, names[j]))
                })?;
                if !v.is_finite() {
                    return Err(Error::MalformedDraws(format!(
                        "row {}, column `{}` is not finite",
                        i + 1,
                        names[j]
                    )));
                }
                samples.push(v);
            }
            let c = rec[p]
                .parse::<u32>()
                .map_err(|_| Error::MalformedDraws(format!("row {}: bad chain id {:?}", i + 1, &rec[p])))?;
            chain.push(c);
        }
        if chain.is_empty() {
            return Err(Error::MalformedDraws("no draws".into()));
        }
        Ok(Draws {
            names,
            samples,
            chain,
            meta,
        })
    }
}

pub(crate) struct ChainOutput {
    pub samples: Vec<f64>,
    pub acceptance: Option<f64>,
    pub step_scale: Option<f64>,
}

/// Runs `cfg.chains` chains in parallel and pools their output in chain order.
pub(crate) fn run_chains<F>(
    names: Vec<String>,
    cfg: &GibbsConfig,
    sampler: &str,
    prior: String,
    link: Link,
    run: F,
) -> Result<Draws>
where
    F: Fn(usize, &mut RngStream) -> Result<ChainOutput> + Sync,
{
    let start = Instant::now();
    let outputs: Vec<Result<ChainOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.chains)
            .map(|c| {
                let run = &run;
                scope.spawn(move || {
                    let mut rng = RngStream::new(cfg.seed, c as u64);
                    run(c, &mut rng)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    });

    let mut samples = Vec::new();
    let mut chain = Vec::new();
    let mut acceptance = Vec::new();
    let mut step_scale = Vec::new();
    let p = names.len();
    for (c, out) in outputs.into_iter().enumerate() {
        let out = out?;
        let rows = out.samples.len() / p.max(1);
        chain.extend(std::iter::repeat_n(c as u32, rows));
        samples.extend(out.samples);
        acceptance.extend(out.acceptance);
        step_scale.extend(out.step_scale);
    }
    Ok(Draws {
        names,
        samples,
        chain,
        meta: DrawsMeta {
            sampler: sampler.to_string(),
            prior,
            link,
            config: cfg.clone(),
            acceptance,
            step_scale,
            wall_time_secs: start.elapsed().as_secs_f64(),
            record: None,
        },
    })
}

pub(crate) fn guard(beta: &[f64], chain: usize, iteration: usize) -> Result<()> {
    if let Some(v) = beta.iter().find(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
        return Err(Error::Diverged {
            chain,
            iteration,
            reason: if v.is_finite() {
                format!("|beta| exceeded {DIVERGENCE_BOUND:e}")
            } else {
                "non-finite coefficient".into()
            },
            snapshot: beta.to_vec(),
        });
    }
    Ok(())
}

/// Short human-readable prior label, e.g. `t(df=7)`.
pub(crate) fn prior_label(prior: &PriorSpec) -> String {
    match prior {
        PriorSpec::IndependentT { df, .. } if *df == 1.0 => "cauchy".into(),
        PriorSpec::IndependentT { df, .. } => format!("t(df={df})"),
        PriorSpec::IndependentNormal { .. } => "normal".into(),
        PriorSpec::MultivariateT { df, .. } if *df == 1.0 => "multivariate-cauchy".into(),
        PriorSpec::MultivariateT { df, .. } => format!("multivariate-t(df={df})"),
    }
}
