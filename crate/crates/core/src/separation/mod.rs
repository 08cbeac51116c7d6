//! Separation diagnostics for binary-response data.
//!
//! A dataset is separated when some direction `alpha` has `z_iᵀ alpha >= 0` for
//! every signed row `z_i` (the row itself for successes, its negation for
//! failures). Strictly positive everywhere is complete separation; otherwise,
//! with at least one equality, it is quasicomplete.
//!
//! Two linear programs decide which case applies. A column whose coordinate
//! direction alone separates the data is a *solitary separator*; under
//! independent Cauchy priors those columns are exactly the coefficients whose
//! posterior mean fails to exist, which is what [`existence_report`] reports.

pub mod lp;

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::samplers::{Link, PriorSpec};
use lp::{Constraint, LpProblem, LpStatus, Relation};

/// Default numerical tolerance for [`detect_separation`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Box bound on the completeness program.
pub const COMPLETE_BOX: f64 = 1e6;

/// Rows of `X` multiplied by `2 y_i - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDesign {
    pub z: DMatrix<f64>,
}

impl SignedDesign {
    pub fn row_dot(&self, i: usize, alpha: &[f64]) -> f64 {
        self.z.row(i).iter().zip(alpha).map(|(a, b)| a * b).sum()
    }

    pub fn products(&self, alpha: &[f64]) -> Vec<f64> {
        (0..self.z.nrows()).map(|i| self.row_dot(i, alpha)).collect()
    }
}

pub fn signed_design(d: &Dataset) -> SignedDesign {
    let mut z = d.x().clone();
    for (i, &y) in d.y().iter().enumerate() {
        if y == 0 {
            z.row_mut(i).neg_mut();
        }
    }
    SignedDesign { z }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationKind {
    None,
    Quasicomplete,
    Complete,
}

/// A separating direction together with the kind it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCertificate {
    pub alpha: Vec<f64>,
    pub kind: SeparationKind,
}

impl SeparationCertificate {
    /// Checks the certificate against the data at tolerance `tol`.
    pub fn is_valid(&self, z: &SignedDesign, tol: f64) -> bool {
        let prods = z.products(&self.alpha);
        match self.kind {
            SeparationKind::Complete => prods.iter().all(|&v| v > tol),
            SeparationKind::Quasicomplete => {
                self.alpha.iter().any(|&a| a != 0.0)
                    && prods.iter().all(|&v| v >= -tol)
                    && prods.iter().any(|&v| v.abs() <= tol)
            }
            SeparationKind::None => false,
        }
    }
}

/// Decides between overlap, quasicomplete and complete separation.
///
/// The completeness program looks for `Zα >= 1` inside a box of half-width
/// [`COMPLETE_BOX`]. If that fails, the second program maximizes `1ᵀZα` over
/// `Zα >= 0`, `|α_j| <= 1`; a positive optimum is a quasicomplete direction.
/// A design without full column rank also counts as quasicomplete, since any
/// null direction satisfies every inequality with equality.
pub fn detect_separation(
    d: &Dataset,
    tol: f64,
) -> Result<(SeparationKind, Option<SeparationCertificate>)> {
    let z = signed_design(d);
    let (n, p) = z.z.shape();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| z.z.row(i).iter().copied().collect()).collect();

    let complete = LpProblem {
        objective: vec![0.0; p],
        constraints: rows
            .iter()
            .map(|r| Constraint::new(r.clone(), Relation::Ge, 1.0))
            .collect(),
        lower: vec![-COMPLETE_BOX; p],
        upper: vec![COMPLETE_BOX; p],
    };
    let sol = lp::solve_lp(&complete).map_err(|e| stage_error(e, "completeness LP"))?;
    if sol.status == LpStatus::Optimal {
        return Ok((
            SeparationKind::Complete,
            Some(SeparationCertificate {
                alpha: sol.primal,
                kind: SeparationKind::Complete,
            }),
        ));
    }

    let mut objective = vec![0.0; p];
    for r in &rows {
        for (o, v) in objective.iter_mut().zip(r) {
            *o += v;
        }
    }
    let any = LpProblem {
        objective,
        constraints: rows
            .iter()
            .map(|r| Constraint::new(r.clone(), Relation::Ge, 0.0))
            .collect(),
        lower: vec![-1.0; p],
        upper: vec![1.0; p],
    };
    let sol = lp::solve_lp(&any).map_err(|e| stage_error(e, "separation LP"))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpFailure {
            stage: "separation LP",
            reason: format!("unexpected status {:?}", sol.status),
        });
    }
    if sol.value > n as f64 * tol {
        let mut alpha = sol.primal;
        // Snap rounding noise so the certificate's equalities are exact.
        for v in alpha.iter_mut() {
            if v.abs() < 1e-12 {
                *v = 0.0;
            }
        }
        return Ok((
            SeparationKind::Quasicomplete,
            Some(SeparationCertificate {
                alpha,
                kind: SeparationKind::Quasicomplete,
            }),
        ));
    }

    if let Some(alpha) = null_direction(d.x()) {
        return Ok((
            SeparationKind::Quasicomplete,
            Some(SeparationCertificate {
                alpha,
                kind: SeparationKind::Quasicomplete,
            }),
        ));
    }
    Ok((SeparationKind::None, None))
}

fn stage_error(e: Error, stage: &'static str) -> Error {
    match e {
        Error::LpFailure { reason, .. } => Error::LpFailure { stage, reason },
        other => Error::LpFailure {
            stage,
            reason: other.to_string(),
        },
    }
}

/// A unit vector in the null space of `x`, if the columns are dependent.
fn null_direction(x: &DMatrix<f64>) -> Option<Vec<f64>> {
    let gram = x.transpose() * x;
    let eig = gram.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let (k, min) = eig
        .eigenvalues
        .iter()
        .cloned()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if min <= 1e-12 * max.max(1.0) {
        let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let resid = (x * nalgebra::DVector::from_column_slice(&v)).amax();
        let scale = x.amax().max(1.0);
        if resid <= 1e-9 * scale {
            return Some(v);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Complete,
    Quasicomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitaryStatus {
    NotSolitary,
    Solitary {
        direction: Direction,
        strictness: Strictness,
    },
}

impl SolitaryStatus {
    pub fn is_solitary(self) -> bool {
        matches!(self, SolitaryStatus::Solitary { .. })
    }
}

/// Exact sign scan of every column. An all-zero column matches both sign
/// patterns and is reported as a positive quasicomplete separator.
pub fn find_solitary_separators(d: &Dataset) -> Vec<SolitaryStatus> {
    let x = d.x();
    let y = d.y();
    (0..d.p())
        .map(|j| {
            let mut pos = true;
            let mut neg = true;
            let mut strict = true;
            for (i, &yi) in y.iter().enumerate() {
                let v = x[(i, j)];
                if v == 0.0 {
                    strict = false;
                }
                if yi == 1 {
                    pos &= v >= 0.0;
                    neg &= v <= 0.0;
                } else {
                    pos &= v <= 0.0;
                    neg &= v >= 0.0;
                }
            }
            let strictness = if strict {
                Strictness::Complete
            } else {
                Strictness::Quasicomplete
            };
            if pos {
                SolitaryStatus::Solitary {
                    direction: Direction::Positive,
                    strictness,
                }
            } else if neg {
                SolitaryStatus::Solitary {
                    direction: Direction::Negative,
                    strictness,
                }
            } else {
                SolitaryStatus::NotSolitary
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    NotExists,
    Unknown,
}

/// The result that justifies a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Independent Cauchy priors with logit or probit link: the mean exists
    /// exactly when the column is not a solitary separator.
    SolitarySeparatorCriterion,
    /// Prior mean exists and the likelihood is bounded by one.
    BoundedLikelihood,
    /// Multivariate Cauchy prior with no separation.
    MultivariateNoSeparation,
    /// Multivariate Cauchy prior under complete separation.
    MultivariateCompleteSeparation,
    /// Multivariate Cauchy prior under quasicomplete separation: unresolved.
    MultivariateQuasicompleteOpen,
    /// Independent t prior with fewer than one degree of freedom: a solitary
    /// column still has no posterior mean, other columns are not covered.
    HeavierThanCauchy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVerdict {
    pub coef: String,
    pub verdict: Verdict,
    pub basis: Basis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub names: Vec<String>,
    pub kind: SeparationKind,
    pub certificate: Option<SeparationCertificate>,
    pub solitary: Vec<SolitaryStatus>,
    pub existence: Vec<CoefficientVerdict>,
    pub warnings: Vec<String>,
}

impl SeparationReport {
    pub fn any_not_exists(&self) -> bool {
        self.existence.iter().any(|v| v.verdict == Verdict::NotExists)
    }

    pub fn any_unknown(&self) -> bool {
        self.existence.iter().any(|v| v.verdict == Verdict::Unknown)
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        self.existence.iter().map(|v| v.verdict).collect()
    }
}

#[derive(Serialize)]
struct SolitaryJson<'a> {
    column: &'a str,
    solitary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strictness: Option<Strictness>,
}

impl Serialize for SeparationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let alpha: &[f64] = self.certificate.as_ref().map(|c| c.alpha.as_slice()).unwrap_or(&[]);
        let solitary: Vec<SolitaryJson> = self
            .solitary
            .iter()
            .zip(&self.names)
            .map(|(st, name)| match *st {
                SolitaryStatus::NotSolitary => SolitaryJson {
                    column: name,
                    solitary: false,
                    direction: None,
                    strictness: None,
                },
                SolitaryStatus::Solitary {
                    direction,
                    strictness,
                } => SolitaryJson {
                    column: name,
                    solitary: true,
                    direction: Some(direction),
                    strictness: Some(strictness),
                },
            })
            .collect();
        let mut st = s.serialize_struct("SeparationReport", 5)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("alpha", alpha)?;
        st.serialize_field("solitary", &solitary)?;
        st.serialize_field("existence", &self.existence)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Per-coefficient posterior-mean existence implied by the separation
/// structure and the prior family.
pub fn existence_verdicts(
    names: &[String],
    kind: SeparationKind,
    solitary: &[SolitaryStatus],
    prior: &PriorSpec,
    link: Link,
) -> Result<Vec<CoefficientVerdict>> {
    let p = names.len();
    if prior.dim() != p || solitary.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "prior has dimension {}, data has {p} coefficients",
            prior.dim()
        )));
    }
    // Both supported links satisfy the tail condition needed for the
    // sufficiency half of the criterion.
    let link_covered = matches!(link, Link::Logit | Link::Probit);
    let verdict = |j: usize| -> (Verdict, Basis) {
        match prior {
            PriorSpec::IndependentNormal { .. } => (Verdict::Exists, Basis::BoundedLikelihood),
            PriorSpec::IndependentT { df, .. } if *df > 1.0 => {
                (Verdict::Exists, Basis::BoundedLikelihood)
            }
            PriorSpec::IndependentT { df, .. } if *df == 1.0 => {
                if solitary[j].is_solitary() {
                    (Verdict::NotExists, Basis::SolitarySeparatorCriterion)
                } else if link_covered {
                    (Verdict::Exists, Basis::SolitarySeparatorCriterion)
                } else {
                    (Verdict::Unknown, Basis::SolitarySeparatorCriterion)
                }
            }
            PriorSpec::IndependentT { .. } => {
                if solitary[j].is_solitary() {
                    (Verdict::NotExists, Basis::HeavierThanCauchy)
                } else {
                    (Verdict::Unknown, Basis::HeavierThanCauchy)
                }
            }
            PriorSpec::MultivariateT { df, .. } if *df > 1.0 => {
                (Verdict::Exists, Basis::BoundedLikelihood)
            }
            PriorSpec::MultivariateT { df, .. } if *df < 1.0 => match kind {
                SeparationKind::Complete => (Verdict::NotExists, Basis::HeavierThanCauchy),
                _ => (Verdict::Unknown, Basis::HeavierThanCauchy),
            },
            PriorSpec::MultivariateT { .. } => match kind {
                SeparationKind::None => (Verdict::Exists, Basis::MultivariateNoSeparation),
                SeparationKind::Complete => {
                    (Verdict::NotExists, Basis::MultivariateCompleteSeparation)
                }
                SeparationKind::Quasicomplete => {
                    (Verdict::Unknown, Basis::MultivariateQuasicompleteOpen)
                }
            },
        }
    };
    Ok((0..p)
        .map(|j| {
            let (verdict, basis) = verdict(j);
            CoefficientVerdict {
                coef: names[j].clone(),
                verdict,
                basis,
            }
        })
        .collect())
}

/// Runs both detectors and derives the existence verdicts.
pub fn existence_report(d: &Dataset, prior: &PriorSpec, link: Link) -> Result<SeparationReport> {
    if prior.dim() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "prior has dimension {}, data has {} coefficients",
            prior.dim(),
            d.p()
        )));
    }
    let (kind, certificate) = detect_separation(d, DEFAULT_TOL)?;
    let solitary = find_solitary_separators(d);
    let mut warnings = Vec::new();
    for (j, st) in solitary.iter().enumerate() {
        if st.is_solitary() && d.x().column(j).iter().all(|&v| v == 0.0) {
            warnings.push(format!(
                "column `{}` is identically zero; reported as a solitary separator",
                d.names()[j]
            ));
        }
    }
    let existence = existence_verdicts(d.names(), kind, &solitary, prior, link)?;
    Ok(SeparationReport {
        names: d.names().to_vec(),
        kind,
        certificate,
        solitary,
        existence,
        warnings,
    })
}
