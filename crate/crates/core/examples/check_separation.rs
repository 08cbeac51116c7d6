//! Detects separation on a small design and prints the certificate.
//!
//! cargo run --example check_separation

use sepbayes::dataset::Dataset;
use sepbayes::separation::{detect_separation, find_solitary_separators, signed_design, DEFAULT_TOL};

fn main() -> sepbayes::Result<()> {
    // Subjects older than 25 are all infected.
    let age = [18.0, 22.0, 24.5, 19.0, 31.0, 26.0, 44.0, 58.0];
    let smoker = [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
    let y = vec![0, 0, 0, 0, 1, 1, 1, 1];
    let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![age[i], smoker[i]]).collect();
    let d = Dataset::from_rows(&rows, y, vec!["age".into(), "smoker".into()])?.add_intercept()?;

    let (kind, cert) = detect_separation(&d, DEFAULT_TOL)?;
    println!("kind: {kind:?}");
    if let Some(c) = cert {
        let z = signed_design(&d);
        println!("alpha: {:?}", c.alpha);
        println!("min z_i'alpha: {:.4}", z.products(&c.alpha).into_iter().fold(f64::INFINITY, f64::min));
    }
    for (name, s) in d.names().iter().zip(find_solitary_separators(&d)) {
        println!("{name:>12}: {s:?}");
    }
    Ok(())
}
