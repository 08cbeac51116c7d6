use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    now, CheckArgs, DataArgs, DiagnoseArgs, FitArgs, LinkArg, PointEstimate, PredictArgs,
    PriorArgs, PriorFamily, RunManifest, SamplerKind, SigmaMatrix, SimulateArgs, Versions,
};
use crate::dataset::{load_csv, Dataset, StandardizationRecord};
use crate::diagnostics::{summarize, write_acf_csv, write_running_mean_csv};
use crate::error::{Error, Result};
use crate::linalg;
use crate::predict::{map_estimate, predict_mc, predict_point, MapResult, PredictionResult};
use crate::samplers::{
    gibbs_independent_t, gibbs_multivariate_t, gibbs_normal, rw_metropolis, Draws, DrawsMeta,
    GibbsConfig, Init, Link, MetropolisConfig, PriorSpec,
};
use crate::separation::{existence_report, CoefficientVerdict, SeparationKind, SeparationReport};
use crate::simulate::simulate as generate;

const MAP_TOL: f64 = 1e-8;
const MAP_MAX_ITER: usize = 500;
const RUNNING_MEAN_ROWS: usize = 10_000;

/// Metadata written next to a draws CSV as `draws.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub names: Vec<String>,
    pub meta: DrawsMeta,
    pub existence: Vec<CoefficientVerdict>,
    pub map: Option<MapResult>,
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn make_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn prepare(a: &DataArgs) -> Result<Dataset> {
    let d = load_csv(&a.data, &a.response, !a.no_header)?.add_intercept()?;
    if a.no_standardize {
        Ok(d)
    } else {
        Ok(d.standardize()?.0)
    }
}

fn build_prior(a: &PriorArgs, d: &Dataset) -> Result<PriorSpec> {
    let p = d.p();
    let scales: Vec<f64> = (0..p)
        .map(|j| if Some(j) == d.intercept_index() { a.scale_intercept } else { a.scale })
        .collect();
    let locations = match a.location.len() {
        0 => vec![0.0; p],
        1 => vec![a.location[0]; p],
        k if k == p => a.location.clone(),
        k => {
            return Err(Error::DimensionMismatch(format!(
                "{k} locations given for {p} coefficients"
            )))
        }
    };
    match a.prior {
        PriorFamily::Cauchy => PriorSpec::cauchy(&locations, &scales),
        PriorFamily::T => PriorSpec::independent_t(a.df.unwrap_or(7.0), &locations, &scales),
        PriorFamily::Normal => PriorSpec::normal(&locations, &scales),
        PriorFamily::Mvt => {
            let sigma = match a.sigma_matrix {
                SigmaMatrix::Identity => {
                    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p, scales.iter().map(|s| s * s)))
                }
                SigmaMatrix::ZellnerSiow => {
                    let x = d.x();
                    let inv = linalg::spd_inverse(&(x.transpose() * x))?;
                    let m = inv * d.n() as f64;
                    // Symmetrize away rounding so the prior's symmetry check passes.
                    (&m + m.transpose()) * 0.5
                }
            };
            PriorSpec::multivariate_t(a.df.unwrap_or(1.0), &locations, sigma)
        }
    }
}

fn exit_code(r: &SeparationReport) -> i32 {
    if r.any_not_exists() {
        3
    } else if r.any_unknown() {
        4
    } else if r.kind == SeparationKind::None {
        0
    } else {
        2
    }
}

fn print_warnings(r: &SeparationReport) {
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
}

pub(super) fn check(a: &CheckArgs) -> Result<i32> {
    let d = prepare(&a.data)?;
    let prior = build_prior(&a.prior, &d)?;
    let report = existence_report(&d, &prior, a.prior.link.into())?;
    print_warnings(&report);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = &a.out {
        make_dir(dir)?;
        write_json(&dir.join("report.json"), &report)?;
    }
    Ok(exit_code(&report))
}

pub(super) fn fit(a: &FitArgs) -> Result<i32> {
    let started = now();
    let link: Link = a.prior.link.into();
    if a.sampler.sampler == SamplerKind::Gibbs && a.prior.link == LinkArg::Probit {
        return Err(Error::Unsupported(
            "the Gibbs sampler covers only the logit link; use --sampler metropolis for probit".into(),
        ));
    }
    let d = prepare(&a.data)?;
    let prior = build_prior(&a.prior, &d)?;
    let report = existence_report(&d, &prior, link)?;
    print_warnings(&report);
    if report.any_not_exists() && !a.force {
        eprintln!("{}", serde_json::to_string_pretty(&report.existence)?);
        eprintln!(
            "refusing to sample: some posterior means do not exist under this prior; \
             pass --force to sample anyway"
        );
        return Ok(3);
    }

    let s = &a.sampler;
    let cfg = GibbsConfig {
        iterations: s.iters,
        burnin: s.burnin,
        thin: s.thin,
        seed: s.seed,
        chains: s.chains,
        init: Init::Zeros,
    };
    let draws = match (s.sampler, &prior) {
        (SamplerKind::Gibbs, PriorSpec::IndependentT { .. }) => gibbs_independent_t(&d, &prior, &cfg)?,
        (SamplerKind::Gibbs, PriorSpec::IndependentNormal { .. }) => gibbs_normal(&d, &prior, &cfg)?,
        (SamplerKind::Gibbs, PriorSpec::MultivariateT { .. }) => gibbs_multivariate_t(&d, &prior, &cfg)?,
        (SamplerKind::Metropolis, _) => {
            let mh = MetropolisConfig {
                initial_scale: s.step_scale,
                ..Default::default()
            };
            rw_metropolis(&d, &prior, link, &cfg, &mh)?
        }
    };
    let map = map_estimate(&d, &prior, link, MAP_TOL, MAP_MAX_ITER)?;

    let dir = &a.out;
    make_dir(dir)?;
    let draws_path = dir.join("draws.csv");
    let sidecar_path = dir.join("draws.json");
    let record_path = dir.join("standardization.json");
    let report_path = dir.join("report.json");
    let manifest_path = dir.join("manifest.json");

    let mut w = create(&draws_path)?;
    draws.write_csv(&mut w)?;
    w.flush().map_err(|e| Error::io(&draws_path, e))?;
    write_json(
        &sidecar_path,
        &Sidecar {
            names: draws.names.clone(),
            meta: draws.meta.clone(),
            existence: report.existence.clone(),
            map: Some(map),
        },
    )?;
    write_json(&record_path, &d.transform())?;
    write_json(&report_path, &report)?;

    let manifest = RunManifest {
        command: "fit".into(),
        inputs: vec![a.data.data.clone()],
        config: serde_json::json!({
            "prior": &a.prior,
            "sampler": s,
            "response": &a.data.response,
            "no_header": a.data.no_header,
            "no_standardize": a.data.no_standardize,
            "force": a.force,
        }),
        seed: Some(s.seed),
        versions: Versions::default(),
        started_at: started,
        finished_at: now(),
        outputs: vec![draws_path.clone(), sidecar_path, record_path, report_path, manifest_path.clone()],
    };
    write_json(&manifest_path, &manifest)?;

    println!(
        "{} draws of {} coefficients written to {}",
        draws.len(),
        draws.p(),
        draws_path.display()
    );
    for (name, m) in draws.names.iter().zip(draws.means()) {
        println!("  {name:>16}  mean {m:.4}");
    }
    Ok(0)
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().unwrap_or(Path::new(".")).join(name)
}

fn load_draws(path: &Path, sidecar: Option<&Sidecar>) -> Result<Draws> {
    let meta = match sidecar {
        Some(s) => s.meta.clone(),
        None => DrawsMeta {
            sampler: "unknown".into(),
            prior: "unknown".into(),
            link: Link::Logit,
            config: GibbsConfig::default(),
            acceptance: vec![],
            step_scale: vec![],
            wall_time_secs: 0.0,
            record: None,
        },
    };
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let draws = Draws::read_csv(std::io::BufReader::new(f), meta)?;
    if let Some(s) = sidecar {
        if s.names != draws.names {
            return Err(Error::MalformedDraws(format!(
                "sidecar columns {:?} do not match draws columns {:?}",
                s.names, draws.names
            )));
        }
    }
    Ok(draws)
}

pub(super) fn diagnose(a: &DiagnoseArgs) -> Result<i32> {
    let started = now();
    let sidecar_path = sibling(&a.draws, "draws.json");
    let sidecar = if sidecar_path.exists() {
        Some(read_sidecar(&sidecar_path)?)
    } else {
        None
    };
    let draws = load_draws(&a.draws, sidecar.as_ref())?;
    let verdicts: Option<Vec<_>> = sidecar
        .as_ref()
        .filter(|s| s.existence.len() == draws.p())
        .map(|s| s.existence.iter().map(|v| v.verdict).collect());
    let summary = summarize(&draws, verdicts.as_deref())?;

    let dir = a.out.clone().unwrap_or_else(|| sibling(&a.draws, ""));
    make_dir(&dir)?;
    let summary_path = dir.join("summary.json");
    let acf_path = dir.join("acf.csv");
    let rm_path = dir.join("running_mean.csv");
    let manifest_path = dir.join("diagnose-manifest.json");
    write_json(&summary_path, &summary)?;

    let mut w = create(&acf_path)?;
    write_acf_csv(&mut w, &draws, a.max_lag)?;
    w.flush().map_err(|e| Error::io(&acf_path, e))?;

    let per_chain = draws.len() / summary.chains.max(1);
    let stride = if a.stride == 0 {
        per_chain.div_ceil(RUNNING_MEAN_ROWS).max(1)
    } else {
        a.stride
    };
    let mut w = create(&rm_path)?;
    write_running_mean_csv(&mut w, &draws, stride)?;
    w.flush().map_err(|e| Error::io(&rm_path, e))?;

    write_json(
        &manifest_path,
        &RunManifest {
            command: "diagnose".into(),
            inputs: vec![a.draws.clone()],
            config: serde_json::json!({ "max_lag": a.max_lag, "stride": stride }),
            seed: None,
            versions: Versions::default(),
            started_at: started,
            finished_at: now(),
            outputs: vec![summary_path.clone(), acf_path, rm_path, manifest_path.clone()],
        },
    )?;
    for c in &summary.pooled {
        println!(
            "{:>16}  mean {:>10.4}  sd {:>9.4}  ess {:>9.1}  mcse {:.4}{}",
            c.name,
            c.mean,
            c.sd,
            c.ess,
            c.mcse,
            if c.note.is_some() { "  (mean does not exist)" } else { "" }
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct Metrics<'a> {
    label: &'a str,
    n_test: usize,
    threshold: f64,
    misclassification: f64,
    brier: f64,
}

pub(super) fn predict(a: &PredictArgs) -> Result<i32> {
    let started = now();
    let sidecar_path = sibling(&a.draws, "draws.json");
    let sidecar = read_sidecar(&sidecar_path)?;
    let record_path = a.record.clone().unwrap_or_else(|| sibling(&a.draws, "standardization.json"));
    let record: Option<StandardizationRecord> = {
        let f = File::open(&record_path).map_err(|e| Error::io(&record_path, e))?;
        serde_json::from_reader(std::io::BufReader::new(f))?
    };
    let raw = load_csv(&a.test, &a.response, !a.no_header)?.add_intercept()?;
    let test = match &record {
        Some(r) => r.apply(&raw)?,
        None => raw,
    };
    let link = sidecar.meta.link;
    let (label, probs) = match a.point_estimate {
        PointEstimate::Mcmc => {
            let draws = load_draws(&a.draws, Some(&sidecar))?;
            ("MCMC", predict_mc(&draws, &test, link)?)
        }
        PointEstimate::Map => {
            if test.transform() != sidecar.meta.record.as_ref() {
                return Err(Error::RecordMismatch(
                    "test data were not transformed with the training standardization record".into(),
                ));
            }
            if test.names() != sidecar.names.as_slice() {
                return Err(Error::DimensionMismatch("test columns differ from the fitted model".into()));
            }
            let map = sidecar
                .map
                .as_ref()
                .ok_or_else(|| Error::MalformedDraws("sidecar has no posterior mode".into()))?;
            ("MAP", predict_point(&map.beta, &test, link)?)
        }
    };
    let result = PredictionResult::new(label, probs, test.y(), a.threshold)?;

    make_dir(&a.out)?;
    let probs_path = a.out.join("probabilities.csv");
    let metrics_path = a.out.join("metrics.json");
    let manifest_path = a.out.join("predict-manifest.json");
    {
        let mut wr = csv::Writer::from_writer(create(&probs_path)?);
        wr.write_record(["row", "y", "probability", "class"])?;
        for (i, ((p, c), y)) in result
            .probabilities
            .iter()
            .zip(&result.classification)
            .zip(test.y())
            .enumerate()
        {
            wr.write_record([(i + 1).to_string(), y.to_string(), p.to_string(), c.to_string()])?;
        }
        wr.flush().map_err(|e| Error::io(&probs_path, e))?;
    }
    write_json(
        &metrics_path,
        &Metrics {
            label,
            n_test: result.n_test,
            threshold: result.threshold,
            misclassification: result.misclassification,
            brier: result.brier,
        },
    )?;
    write_json(
        &manifest_path,
        &RunManifest {
            command: "predict".into(),
            inputs: vec![a.draws.clone(), a.test.clone(), record_path],
            config: serde_json::json!({
                "point_estimate": a.point_estimate,
                "threshold": a.threshold,
                "response": &a.response,
            }),
            seed: None,
            versions: Versions::default(),
            started_at: started,
            finished_at: now(),
            outputs: vec![probs_path, metrics_path, manifest_path.clone()],
        },
    )?;
    println!(
        "{label}: misclassification {:.3}, Brier {:.3} on {} observations",
        result.misclassification, result.brier, result.n_test
    );
    Ok(0)
}

pub(super) fn simulate(a: &SimulateArgs) -> Result<i32> {
    let sim = generate(a.scenario, a.n, a.seed)?;
    match &a.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                make_dir(dir)?;
            }
            let mut w = create(path)?;
            sim.write_csv(&mut w)?;
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        None => sim.write_csv(std::io::stdout().lock())?,
    }
    Ok(0)
}
