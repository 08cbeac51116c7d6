//! Train on Pima, score the test set with the MC average and the MAP.
//!
//! cargo run --release --example predict_pima

use sepbayes::dataset::load_csv;
use sepbayes::predict::{map_estimate, predict_mc, predict_point, PredictionResult};
use sepbayes::samplers::{gibbs_independent_t, GibbsConfig, Link, PriorSpec};

fn main() -> sepbayes::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pima");
    let (train, record) = load_csv(format!("{dir}/train.csv"), "y", true)?.add_intercept()?.standardize()?;
    let test = record.apply(&load_csv(format!("{dir}/test.csv"), "y", true)?.add_intercept()?)?;

    let prior = PriorSpec::cauchy(&vec![0.0; train.p()], &PriorSpec::default_scales(train.p(), train.intercept_index()))?;
    let draws = gibbs_independent_t(&train, &prior, &GibbsConfig::new(11_000, 1_000, 5))?;
    let mc = PredictionResult::new("MCMC", predict_mc(&draws, &test, Link::Logit)?, test.y(), 0.5)?;

    let map = map_estimate(&train, &prior, Link::Logit, 1e-8, 500)?;
    let pt = PredictionResult::new("MAP", predict_point(&map.beta, &test, Link::Logit)?, test.y(), 0.5)?;

    for r in [mc, pt] {
        println!("{:<5} misclassification {:.3}  brier {:.4}", r.label, r.misclassification, r.brier);
    }
    Ok(())
}
