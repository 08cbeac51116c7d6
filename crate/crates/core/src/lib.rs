//! Separation diagnostics and Bayesian binary regression.
//!
//! The pipeline mirrors the command-line tool:
//!
//! * [`dataset`] loads a CSV, adds an intercept and standardizes predictors
//!   (binary inputs centered, others centered and scaled to sd 0.5).
//! * [`separation`] classifies the data as overlapping, quasicompletely or
//!   completely separated, flags solitary separators and turns both into
//!   per-coefficient verdicts on whether the posterior mean exists.
//! * [`samplers`] fits logistic regression by Pólya-Gamma Gibbs sampling
//!   under independent t, normal and multivariate t priors, and any
//!   prior/link pair by random-walk Metropolis.
//! * [`diagnostics`] and [`predict`] summarize chains and score predictions.
//!
//! ```
//! use sepbayes::dataset::Dataset;
//! use sepbayes::samplers::{Link, PriorSpec};
//! use sepbayes::separation::{existence_report, Verdict};
//!
//! let rows = vec![vec![-1.0], vec![-0.5], vec![0.5], vec![2.0]];
//! let d = Dataset::from_rows(&rows, vec![0, 0, 1, 1], vec!["x".into()])?
//!     .add_intercept()?;
//! let prior = PriorSpec::cauchy(&[0.0, 0.0], &[10.0, 2.5])?;
//! let report = existence_report(&d, &prior, Link::Logit)?;
//! assert_eq!(report.verdicts(), vec![Verdict::Exists, Verdict::NotExists]);
//! # Ok::<(), sepbayes::Error>(())
//! ```

pub mod cli;
pub mod dataset;
pub mod diagnostics;
pub mod distributions;
mod error;
pub mod linalg;
pub mod predict;
pub mod samplers;
pub mod separation;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
