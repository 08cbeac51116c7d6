//! Polya-Gamma draws against the exact mean tanh(k/2)/(2k).
//!
//! cargo run --release --example pg_sampling

use sepbayes::distributions::{pg_density, sample_pg, RngStream, PG_MAX_TERMS};

fn main() -> sepbayes::Result<()> {
    let mut rng = RngStream::new(1, 0);
    let n = 50_000;
    for k in [0.0, 1.0, 2.5, 10.0] {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_pg(k, &mut rng)?;
        }
        let exact = if k == 0.0 { 0.25 } else { (k / 2.0f64).tanh() / (2.0 * k) };
        println!("k = {k:>4}: mean {:.5}  exact {exact:.5}  density at 0.2 {:.4}", sum / n as f64, pg_density(0.2, k, PG_MAX_TERMS)?);
    }
    Ok(())
}
