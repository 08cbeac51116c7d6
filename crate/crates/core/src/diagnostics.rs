//! Chain summaries: running means, autocorrelations, effective sample size
//! and posterior summaries with Monte Carlo standard errors.

use std::io::Write;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::Draws;
use crate::separation::Verdict;

/// Lags reported in each coefficient's ACF table (those below the chain length).
pub const SUMMARY_LAGS: [usize; 6] = [1, 5, 10, 25, 50, 100];

const NOT_EXISTS_NOTE: &str =
    "posterior mean does not exist; the reported average is not an estimator of a finite quantity";

/// `out[t]` is the mean of `series[0..=t]`.
pub fn running_mean(series: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::Empty("running mean of an empty series".into()));
    }
    let mut sum = 0.0;
    Ok(series
        .iter()
        .enumerate()
        .map(|(t, v)| {
            sum += v;
            sum / (t + 1) as f64
        })
        .collect())
}

fn is_constant(series: &[f64]) -> bool {
    series.iter().all(|v| *v == series[0])
}

/// Biased sample ACF at lags `0..=max_lag`, computed by FFT.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let s = series.len();
    if max_lag >= s {
        return Err(Error::InvalidParameter(format!(
            "max lag {max_lag} must be below the series length {s}"
        )));
    }
    if is_constant(series) {
        return Err(Error::ConstantSeries { column: None });
    }
    let mut acf = full_acf(series);
    acf.truncate(max_lag + 1);
    Ok(acf)
}

fn full_acf(series: &[f64]) -> Vec<f64> {
    let s = series.len();
    let mean = series.iter().sum::<f64>() / s as f64;
    let m = (2 * s).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(m)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let c0 = buf[0].re;
    buf[..s].iter().map(|c| c.re / c0).collect()
}

/// Effective sample size by Geyer's initial positive sequence, capped at `10 S`.
pub fn ess(series: &[f64]) -> Result<f64> {
    let s = series.len();
    if s < 10 {
        return Err(Error::InvalidParameter(format!("ESS needs at least 10 draws, got {s}")));
    }
    if is_constant(series) {
        return Err(Error::ConstantSeries { column: None });
    }
    Ok(ess_of_acf(&full_acf(series), s))
}

fn ess_of_acf(rho: &[f64], s: usize) -> f64 {
    // τ = 1 + 2 Σ_{k≥1} ρ_k = -1 + 2 Σ_m (ρ_{2m} + ρ_{2m+1})
    let mut tau = -1.0;
    let mut m = 0;
    while 2 * m + 1 < rho.len() {
        let pair = rho[2 * m] + rho[2 * m + 1];
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        m += 1;
    }
    let cap = 10.0 * s as f64;
    if tau <= 0.0 {
        cap
    } else {
        (s as f64 / tau).min(cap)
    }
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfEntry {
    pub lag: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
    /// In `(0, S]`; estimates above `S` are clamped so MC-SE never undercuts `sd/√S`.
    pub ess: f64,
    pub mcse: f64,
    pub acf: Vec<AcfEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerChainSummary {
    pub chain: u32,
    pub draws: usize,
    pub coefficients: Vec<CoefficientSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub draws: usize,
    pub chains: usize,
    pub pooled: Vec<CoefficientSummary>,
    pub per_chain: Vec<PerChainSummary>,
}

impl ChainSummary {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientSummary> {
        self.pooled.iter().find(|c| c.name == name)
    }
}

/// Moments, quantiles and ACF table of one series. ESS is left unset.
fn describe(name: &str, series: &[f64]) -> Result<(CoefficientSummary, Option<Vec<f64>>)> {
    let s = series.len();
    if s >= 2 && is_constant(series) {
        return Err(Error::ConstantSeries {
            column: Some(name.to_string()),
        });
    }
    let mean = series.iter().sum::<f64>() / s as f64;
    let sd = if s > 1 {
        (series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rho = if s >= 2 { Some(full_acf(series)) } else { None };
    let acf = rho
        .as_ref()
        .map(|r| {
            SUMMARY_LAGS
                .iter()
                .filter(|&&k| k < s)
                .map(|&k| AcfEntry { lag: k, value: r[k] })
                .collect()
        })
        .unwrap_or_default();
    Ok((
        CoefficientSummary {
            name: name.to_string(),
            mean,
            sd,
            q025: quantile(&sorted, 0.025),
            median: quantile(&sorted, 0.5),
            q975: quantile(&sorted, 0.975),
            ess: s as f64,
            mcse: 0.0,
            acf,
            verdict: None,
            note: None,
        },
        rho,
    ))
}

/// ESS of one chain clamped to `(0, S]`; chains too short for the Geyer
/// estimator count at face value.
fn chain_ess(rho: Option<&[f64]>, s: usize) -> f64 {
    match rho {
        Some(r) if s >= 10 => ess_of_acf(r, s).min(s as f64),
        _ => s as f64,
    }
}

fn finish(c: &mut CoefficientSummary, ess: f64) {
    c.ess = ess;
    c.mcse = c.sd / ess.sqrt();
}

/// Pooled and per-chain summaries. The pooled ESS is the sum of per-chain
/// ESS values. Coefficients with a `NotExists` verdict carry a note.
pub fn summarize(draws: &Draws, verdicts: Option<&[Verdict]>) -> Result<ChainSummary> {
    if draws.is_empty() {
        return Err(Error::Empty("no draws to summarize".into()));
    }
    let p = draws.p();
    if let Some(v) = verdicts {
        if v.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} verdicts for {p} coefficients",
                v.len()
            )));
        }
    }
    let chains = draws.chain_ids();
    let mut per_chain: Vec<PerChainSummary> = chains
        .iter()
        .map(|&c| PerChainSummary {
            chain: c,
            draws: 0,
            coefficients: Vec::with_capacity(p),
        })
        .collect();
    let mut pooled = Vec::with_capacity(p);

    for j in 0..p {
        let name = &draws.names[j];
        let mut total_ess = 0.0;
        for pc in per_chain.iter_mut() {
            let series = draws.chain_column(pc.chain, j);
            pc.draws = series.len();
            let (mut c, rho) = describe(name, &series)?;
            let e = chain_ess(rho.as_deref(), series.len());
            finish(&mut c, e);
            total_ess += e;
            pc.coefficients.push(c);
        }
        let (mut c, _) = describe(name, &draws.column(j))?;
        if chains.len() == 1 {
            c.acf = per_chain[0].coefficients[j].acf.clone();
        } else {
            // Pooled lags would straddle chain boundaries; report chain averages.
            c.acf = SUMMARY_LAGS
                .iter()
                .filter_map(|&k| {
                    let vals: Vec<f64> = per_chain
                        .iter()
                        .filter_map(|pc| pc.coefficients[j].acf.iter().find(|a| a.lag == k))
                        .map(|a| a.value)
                        .collect();
                    (vals.len() == per_chain.len())
                        .then(|| AcfEntry { lag: k, value: vals.iter().sum::<f64>() / vals.len() as f64 })
                })
                .collect();
        }
        finish(&mut c, total_ess.min(draws.len() as f64));
        if let Some(v) = verdicts {
            c.verdict = Some(v[j]);
            if v[j] == Verdict::NotExists {
                c.note = Some(NOT_EXISTS_NOTE.into());
                for pc in per_chain.iter_mut() {
                    pc.coefficients[j].verdict = Some(v[j]);
                    pc.coefficients[j].note = Some(NOT_EXISTS_NOTE.into());
                }
            }
        }
        pooled.push(c);
    }
    Ok(ChainSummary {
        draws: draws.len(),
        chains: chains.len(),
        pooled,
        per_chain,
    })
}

fn csv_writer<W: Write>(w: W, names: &[String], lead: [&str; 2]) -> Result<csv::Writer<W>> {
    let mut wr = csv::Writer::from_writer(w);
    let header: Vec<&str> = lead.iter().copied().chain(names.iter().map(String::as_str)).collect();
    wr.write_record(&header)?;
    Ok(wr)
}

/// Per-chain ACF table: columns `chain, lag, <coefficients...>`.
pub fn write_acf_csv<W: Write>(w: W, draws: &Draws, max_lag: usize) -> Result<()> {
    let mut wr = csv_writer(w, &draws.names, ["chain", "lag"])?;
    for c in draws.chain_ids() {
        let cols = (0..draws.p())
            .map(|j| {
                let series = draws.chain_column(c, j);
                let lag = max_lag.min(series.len().saturating_sub(1));
                autocorrelation(&series, lag).map_err(|e| match e {
                    Error::ConstantSeries { .. } => Error::ConstantSeries {
                        column: Some(draws.names[j].clone()),
                    },
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lags = cols.iter().map(Vec::len).min().unwrap_or(0);
        for k in 0..lags {
            let mut rec = vec![c.to_string(), k.to_string()];
            rec.extend(cols.iter().map(|col| col[k].to_string()));
            wr.write_record(&rec)?;
        }
    }
    wr.flush().map_err(|e| Error::io("<acf csv>", e))?;
    Ok(())
}

/// Per-chain running means: columns `chain, iteration, <coefficients...>`.
/// Every `stride`-th iteration is written (the last one always is).
pub fn write_running_mean_csv<W: Write>(w: W, draws: &Draws, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let mut wr = csv_writer(w, &draws.names, ["chain", "iteration"])?;
    for c in draws.chain_ids() {
        let cols = (0..draws.p())
            .map(|j| running_mean(&draws.chain_column(c, j)))
            .collect::<Result<Vec<_>>>()?;
        let s = cols.first().map_or(0, Vec::len);
        for t in (0..s).filter(|t| (t + 1) % stride == 0 || t + 1 == s) {
            let mut rec = vec![c.to_string(), (t + 1).to_string()];
            rec.extend(cols.iter().map(|col| col[t].to_string()));
            wr.write_record(&rec)?;
        }
    }
    wr.flush().map_err(|e| Error::io("<running mean csv>", e))?;
    Ok(())
}
