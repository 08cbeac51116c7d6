//! Posterior-mean existence before and after centering a binary predictor.
//!
//! cargo run --example existence_verdicts

use sepbayes::dataset::Dataset;
use sepbayes::samplers::{Link, PriorSpec};
use sepbayes::separation::existence_report;

fn main() -> sepbayes::Result<()> {
    // 25 failures then 75 successes; x is 0 for the first 50 rows and 1 after.
    let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![f64::from(u8::from(i >= 50))]).collect();
    let y = (0..100).map(|i| u8::from(i >= 25)).collect();
    let raw = Dataset::from_rows(&rows, y, vec!["x".into()])?.add_intercept()?;
    let (centered, _) = raw.standardize()?;

    for (family, prior) in [
        ("cauchy", PriorSpec::cauchy(&[0.0; 2], &[10.0, 2.5])?),
        ("t7", PriorSpec::independent_t(7.0, &[0.0; 2], &[10.0, 2.5])?),
    ] {
        for (label, d) in [("raw", &raw), ("centered", &centered)] {
            let r = existence_report(d, &prior, Link::Logit)?;
            println!("{:<10} {:<8} {:?} {:?}", family, label, r.kind, r.verdicts());
        }
    }
    Ok(())
}
