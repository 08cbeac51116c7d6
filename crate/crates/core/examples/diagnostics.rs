//! Autocorrelation and effective sample size under heavy and light tails.
//!
//! cargo run --release --example diagnostics

use sepbayes::diagnostics::{autocorrelation, ess, running_mean};
use sepbayes::samplers::{gibbs_independent_t, gibbs_normal, GibbsConfig, PriorSpec};
use sepbayes::simulate::{simulate, Scenario};

fn main() -> sepbayes::Result<()> {
    let d = simulate(Scenario::NoSolitary, 30, 7)?.dataset()?.add_intercept()?;
    let cfg = GibbsConfig::new(25_000, 5_000, 1);
    let s = [10.0, 2.5];
    let runs = [
        ("cauchy", gibbs_independent_t(&d, &PriorSpec::cauchy(&[0.0; 2], &s)?, &cfg)?),
        ("normal", gibbs_normal(&d, &PriorSpec::normal(&[0.0; 2], &s)?, &cfg)?),
    ];
    for (label, draws) in &runs {
        let b2 = draws.column(1);
        let acf = autocorrelation(&b2, 50)?;
        let rm = running_mean(&b2)?;
        println!(
            "{label}: acf lag1 {:.3} lag10 {:.3} lag50 {:.3}, ess {:.0}, mean {:.3}",
            acf[1], acf[10], acf[50], ess(&b2)?, rm[rm.len() - 1]
        );
    }
    Ok(())
}
