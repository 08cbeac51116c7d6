//! Gibbs sampling on the Pima training data under three priors.
//!
//! cargo run --release --example gibbs_fit

use sepbayes::dataset::load_csv;
use sepbayes::diagnostics::summarize;
use sepbayes::samplers::{gibbs_independent_t, gibbs_normal, GibbsConfig, PriorSpec};

fn main() -> sepbayes::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pima/train.csv");
    let (d, _) = load_csv(path, "y", true)?.add_intercept()?.standardize()?;
    let loc = vec![0.0; d.p()];
    let scales = PriorSpec::default_scales(d.p(), d.intercept_index());
    let cfg = GibbsConfig::new(6_000, 1_000, 42);

    let runs = [
        ("cauchy", gibbs_independent_t(&d, &PriorSpec::cauchy(&loc, &scales)?, &cfg)?),
        ("t7", gibbs_independent_t(&d, &PriorSpec::independent_t(7.0, &loc, &scales)?, &cfg)?),
        ("normal", gibbs_normal(&d, &PriorSpec::normal(&loc, &scales)?, &cfg)?),
    ];
    for (label, draws) in &runs {
        let s = summarize(draws, None)?;
        println!("{label}:");
        for c in &s.pooled {
            println!("  {:>12} {:>8.3} sd {:.3}  ess {:>6.0}", c.name, c.mean, c.sd, c.ess);
        }
    }
    Ok(())
}
