//! Re-creations of the two simulated separation scenarios (p = 2: intercept
//! plus one continuous predictor `X2`, already on the standardized scale).

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, TARGET_SD};
use crate::distributions::RngStream;
use crate::error::{Error, Result};

/// Separating threshold of the `no-solitary` scenario on the standardized scale.
pub const NO_SOLITARY_THRESHOLD: f64 = -0.3;

/// Minimum distance kept between any point and the separating line.
const MARGIN: f64 = 0.02;

const MAX_TRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `X2 > 0` exactly for the successes: `X2` is a solitary separator.
    Solitary,
    /// Complete separation at `X2 = -0.3`, with successes on both sides of 0.
    NoSolitary,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Solitary => "solitary",
            Scenario::NoSolitary => "no-solitary",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solitary" => Ok(Scenario::Solitary),
            "no-solitary" => Ok(Scenario::NoSolitary),
            _ => Err(Error::InvalidParameter(format!(
                "unknown scenario `{s}` (expected solitary or no-solitary)"
            ))),
        }
    }
}

/// A generated scenario: responses and the standardized predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub scenario: Scenario,
    pub y: Vec<u8>,
    pub x2: Vec<f64>,
}

impl Simulated {
    /// The dataset as loaded from its CSV: a single covariate `X2`.
    pub fn dataset(&self) -> Result<Dataset> {
        let rows: Vec<Vec<f64>> = self.x2.iter().map(|&v| vec![v]).collect();
        Dataset::from_rows(&rows, self.y.clone(), vec!["X2".into()])
    }

    /// CSV with columns `y, X2`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["y", "X2"])?;
        for (y, x) in self.y.iter().zip(&self.x2) {
            wr.write_record([y.to_string(), x.to_string()])?;
        }
        wr.flush().map_err(|e| Error::io("<simulated csv>", e))?;
        Ok(())
    }
}

/// Centers and scales to mean 0, sd 0.5.
fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    for v in x.iter_mut() {
        *v = (*v - m) / sd * TARGET_SD;
    }
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Generates `n` observations, deterministic in `seed`.
pub fn simulate(scenario: Scenario, n: usize, seed: u64) -> Result<Simulated> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "scenario {scenario} needs n >= 4, got {n}"
        )));
    }
    let mut rng = RngStream::new(seed, 0);
    match scenario {
        Scenario::Solitary => {
            let n1 = n / 2;
            let y: Vec<u8> = (0..n).map(|i| u8::from(i >= n - n1)).collect();
            for _ in 0..MAX_TRIES {
                let mut x: Vec<f64> = y
                    .iter()
                    .map(|&yi| {
                        let m = uniform(&mut rng, 0.1, 1.5);
                        if yi == 1 { m } else { -m }
                    })
                    .collect();
                standardize(&mut x);
                let ok = x
                    .iter()
                    .zip(&y)
                    .all(|(v, &yi)| if yi == 1 { *v > MARGIN } else { *v < -MARGIN });
                if ok {
                    return Ok(Simulated { scenario, y, x2: x });
                }
            }
        }
        Scenario::NoSolitary => {
            // A third of the points are failures, far below the threshold;
            // successes straddle zero.
            let n0 = (n / 3).max(1);
            let y: Vec<u8> = (0..n).map(|i| u8::from(i >= n0)).collect();
            let t = NO_SOLITARY_THRESHOLD;
            for _ in 0..MAX_TRIES {
                let mut x: Vec<f64> = y
                    .iter()
                    .enumerate()
                    .map(|(i, &yi)| match (yi, i % 2) {
                        (0, _) => uniform(&mut rng, -1.2, -0.45),
                        (_, 0) => uniform(&mut rng, -0.25, -0.02),
                        _ => uniform(&mut rng, 0.02, 1.0),
                    })
                    .collect();
                standardize(&mut x);
                let separated = x
                    .iter()
                    .zip(&y)
                    .all(|(v, &yi)| if yi == 1 { *v > t + MARGIN } else { *v < t - MARGIN });
                let mixed = x.iter().zip(&y).any(|(v, &yi)| yi == 1 && *v < -MARGIN)
                    && x.iter().zip(&y).any(|(v, &yi)| yi == 1 && *v > MARGIN);
                if separated && mixed {
                    return Ok(Simulated { scenario, y, x2: x });
                }
            }
        }
    }
    Err(Error::InvalidParameter(format!(
        "could not realize scenario {scenario} with n = {n}"
    )))
}
