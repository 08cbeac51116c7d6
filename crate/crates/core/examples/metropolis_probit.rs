//! Adaptive random-walk Metropolis for a probit model.
//!
//! cargo run --release --example metropolis_probit

use sepbayes::dataset::load_csv;
use sepbayes::diagnostics::summarize;
use sepbayes::samplers::{rw_metropolis, GibbsConfig, Link, MetropolisConfig, PriorSpec};

fn main() -> sepbayes::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pima/train.csv");
    let (d, _) = load_csv(path, "y", true)?.add_intercept()?.standardize()?;
    let prior = PriorSpec::independent_t(7.0, &vec![0.0; d.p()], &PriorSpec::default_scales(d.p(), d.intercept_index()))?;
    let mut cfg = GibbsConfig::new(20_000, 5_000, 3);
    cfg.chains = 2;
    let draws = rw_metropolis(&d, &prior, Link::Probit, &cfg, &MetropolisConfig::default())?;
    println!("acceptance {:?}, step {:?}", draws.meta.acceptance, draws.meta.step_scale);
    for c in &summarize(&draws, None)?.pooled {
        println!("{:>12} {:>8.3}  [{:.3}, {:.3}]", c.name, c.mean, c.q025, c.q975);
    }
    Ok(())
}
