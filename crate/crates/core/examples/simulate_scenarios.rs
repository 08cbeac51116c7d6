//! The two simulated scenarios and what the checks say about them.
//!
//! cargo run --example simulate_scenarios

use sepbayes::samplers::{Link, PriorSpec};
use sepbayes::separation::existence_report;
use sepbayes::simulate::{simulate, Scenario};

fn main() -> sepbayes::Result<()> {
    for scenario in [Scenario::Solitary, Scenario::NoSolitary] {
        let sim = simulate(scenario, 30, 1)?;
        let d = sim.dataset()?.add_intercept()?;
        let r = existence_report(&d, &PriorSpec::cauchy(&[0.0; 2], &[10.0, 2.5])?, Link::Logit)?;
        println!("{scenario}: {:?}, X2 solitary: {}, verdicts {:?}", r.kind, r.solitary[1].is_solitary(), r.verdicts());
    }
    let mut out = Vec::new();
    simulate(Scenario::Solitary, 6, 1)?.write_csv(&mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
