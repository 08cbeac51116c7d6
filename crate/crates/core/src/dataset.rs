//! Binary-response datasets: CSV ingestion, intercept handling and the
//! centering/scaling protocol applied before fitting.
//!
//! Binary 0/1 inputs are mean-centered only. Every other non-intercept column
//! is centered and divided so that its sample standard deviation (n - 1
//! denominator) is 0.5. The transform is captured in a
//! [`StandardizationRecord`] so that held-out data can be mapped identically.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name given to the column created by [`Dataset::add_intercept`].
pub const INTERCEPT_NAME: &str = "(Intercept)";

/// Target standard deviation of scaled columns.
pub const TARGET_SD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<u8>,
    names: Vec<String>,
    intercept: Option<usize>,
    transform: Option<StandardizationRecord>,
}

impl Dataset {
    /// Builds a dataset from a design matrix and 0/1 responses.
    pub fn new(x: DMatrix<f64>, y: Vec<u8>, names: Vec<String>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::Empty("dataset has no observations".into()));
        }
        Self::build(x, y, names, None)
    }

    /// A dataset with `p` named coefficients and no observations. Samplers run
    /// on it draw from the prior, which is how the mixture representations are
    /// checked.
    pub fn prior_only(names: Vec<String>) -> Result<Self> {
        let p = names.len();
        Self::build(DMatrix::zeros(0, p), Vec::new(), names, None)
    }

    /// Convenience constructor from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<u8>, names: Vec<String>) -> Result<Self> {
        let p = names.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {p}",
                bad + 1,
                rows[bad].len()
            )));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::new(x, y, names)
    }

    fn build(
        x: DMatrix<f64>,
        y: Vec<u8>,
        names: Vec<String>,
        intercept: Option<usize>,
    ) -> Result<Self> {
        let (n, p) = x.shape();
        if p == 0 {
            return Err(Error::Empty("dataset has no covariate columns".into()));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} responses for {n} rows",
                y.len()
            )));
        }
        if names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {p} columns",
                names.len()
            )));
        }
        if let Some(i) = y.iter().position(|&v| v > 1) {
            return Err(Error::InvalidResponse {
                row: i + 1,
                value: y[i].to_string(),
            });
        }
        for j in 0..p {
            for i in 0..n {
                if !x[(i, j)].is_finite() {
                    return Err(Error::NonFinite {
                        row: i + 1,
                        column: names[j].clone(),
                    });
                }
            }
        }
        Ok(Dataset {
            x,
            y,
            names,
            intercept,
            transform: None,
        })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn intercept_index(&self) -> Option<usize> {
        self.intercept
    }

    /// The standardization record last applied to this dataset, if any.
    pub fn transform(&self) -> Option<&StandardizationRecord> {
        self.transform.as_ref()
    }

    /// Indices of failures (`A_0`).
    pub fn failures(&self) -> impl Iterator<Item = usize> + '_ {
        self.y.iter().enumerate().filter(|(_, &v)| v == 0).map(|(i, _)| i)
    }

    /// Indices of successes (`A_1`).
    pub fn successes(&self) -> impl Iterator<Item = usize> + '_ {
        self.y.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Prepends a column of ones.
    pub fn add_intercept(&self) -> Result<Dataset> {
        if self.intercept.is_some() {
            return Err(Error::InterceptPresent);
        }
        let (n, p) = self.x.shape();
        let x = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { self.x[(i, j - 1)] });
        let mut names = Vec::with_capacity(p + 1);
        names.push(INTERCEPT_NAME.to_string());
        names.extend(self.names.iter().cloned());
        Ok(Dataset {
            x,
            y: self.y.clone(),
            names,
            intercept: Some(0),
            transform: None,
        })
    }

    /// Applies the default standardization protocol.
    pub fn standardize(&self) -> Result<(Dataset, StandardizationRecord)> {
        self.standardize_with(&BTreeMap::new())
    }

    /// Like [`Dataset::standardize`], but columns named in `overrides` get the
    /// given action instead of the automatic one. Interaction predictors are
    /// typically marked [`ColumnAction::None`] here.
    pub fn standardize_with(
        &self,
        overrides: &BTreeMap<String, ColumnAction>,
    ) -> Result<(Dataset, StandardizationRecord)> {
        for name in overrides.keys() {
            if self.column_index(name).is_none() {
                return Err(Error::MissingColumn(name.clone()));
            }
        }
        let n = self.n();
        let mut columns = Vec::with_capacity(self.p());
        for j in 0..self.p() {
            let name = &self.names[j];
            let col: Vec<f64> = self.x.column(j).iter().copied().collect();
            let transform = if Some(j) == self.intercept {
                ColumnTransform::identity(name)
            } else {
                let action = match overrides.get(name) {
                    Some(a) => *a,
                    None => classify_column(&col),
                };
                let mean = if n == 0 { 0.0 } else { col.iter().sum::<f64>() / n as f64 };
                match action {
                    ColumnAction::None => ColumnTransform::identity(name),
                    ColumnAction::Center => ColumnTransform {
                        name: name.clone(),
                        action,
                        shift: mean,
                        divisor: 1.0,
                    },
                    ColumnAction::CenterScale => {
                        let sd = sample_sd(&col, mean);
                        if !(sd > 0.0) {
                            return Err(Error::ConstantColumn(name.clone()));
                        }
                        ColumnTransform {
                            name: name.clone(),
                            action,
                            shift: mean,
                            divisor: sd / TARGET_SD,
                        }
                    }
                }
            };
            columns.push(transform);
        }
        let record = StandardizationRecord {
            intercept_index: self.intercept,
            columns,
        };
        let out = record.apply(self)?;
        Ok((out, record))
    }
}

fn sample_sd(col: &[f64], mean: f64) -> f64 {
    if col.len() < 2 {
        return 0.0;
    }
    let ss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (col.len() - 1) as f64).sqrt()
}

/// Raw 0/1 columns and already-centered two-level columns one unit apart are
/// binary; everything else is continuous.
fn classify_column(col: &[f64]) -> ColumnAction {
    let mut levels: Vec<f64> = Vec::with_capacity(2);
    for &v in col {
        if !levels.contains(&v) {
            if levels.len() == 2 {
                return ColumnAction::CenterScale;
            }
            levels.push(v);
        }
    }
    if levels.len() != 2 {
        return ColumnAction::CenterScale;
    }
    let (lo, hi) = if levels[0] < levels[1] {
        (levels[0], levels[1])
    } else {
        (levels[1], levels[0])
    };
    if lo == 0.0 && hi == 1.0 {
        return ColumnAction::Center;
    }
    let mean = col.iter().sum::<f64>() / col.len() as f64;
    if ((hi - lo) - 1.0).abs() <= 1e-12 && mean.abs() <= 1e-12 {
        ColumnAction::Center
    } else {
        ColumnAction::CenterScale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnAction {
    None,
    Center,
    CenterScale,
}

/// `standardized = (raw - shift) / divisor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnTransform {
    pub name: String,
    pub action: ColumnAction,
    pub shift: f64,
    pub divisor: f64,
}

impl ColumnTransform {
    fn identity(name: &str) -> Self {
        ColumnTransform {
            name: name.to_string(),
            action: ColumnAction::None,
            shift: 0.0,
            divisor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationRecord {
    pub intercept_index: Option<usize>,
    pub columns: Vec<ColumnTransform>,
}

impl StandardizationRecord {
    /// Maps raw data through the recorded transform. The data must have the
    /// same column names, in the same order, and the same intercept layout.
    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let theirs: Vec<&str> = d.names.iter().map(String::as_str).collect();
        if names != theirs {
            return Err(Error::RecordMismatch(format!(
                "record columns {names:?} vs data columns {theirs:?}"
            )));
        }
        if self.intercept_index != d.intercept {
            return Err(Error::RecordMismatch(format!(
                "record intercept {:?} vs data intercept {:?}",
                self.intercept_index, d.intercept
            )));
        }
        let mut x = d.x.clone();
        for (j, c) in self.columns.iter().enumerate() {
            if c.action == ColumnAction::None {
                continue;
            }
            if !(c.divisor > 0.0) {
                return Err(Error::RecordMismatch(format!(
                    "column `{}` has non-positive divisor",
                    c.name
                )));
            }
            for v in x.column_mut(j).iter_mut() {
                *v = (*v - c.shift) / c.divisor;
            }
        }
        Ok(Dataset {
            x,
            y: d.y.clone(),
            names: d.names.clone(),
            intercept: d.intercept,
            transform: Some(self.clone()),
        })
    }
}

/// Reads a comma-separated file. Columns keep file order with the response
/// removed. Without a header row the columns are named `V1`, `V2`, ...
pub fn load_csv(path: impl AsRef<Path>, response: &str, header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, response, header)
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: std::io::Read>(reader: R, response: &str, header: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        records.push(rec);
    }
    let width = match (header, records.first()) {
        (true, _) => rdr.headers()?.len(),
        (false, Some(r)) => r.len(),
        (false, None) => 0,
    };
    if records.is_empty() || width == 0 {
        return Err(Error::Empty("no data rows".into()));
    }
    let all_names: Vec<String> = if header {
        rdr.headers()?.iter().map(str::to_string).collect()
    } else {
        (1..=width).map(|k| format!("V{k}")).collect()
    };
    let resp = all_names
        .iter()
        .position(|c| c == response)
        .ok_or_else(|| Error::MissingColumn(response.to_string()))?;

    let names: Vec<String> = all_names
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != resp)
        .map(|(_, c)| c.clone())
        .collect();
    if names.is_empty() {
        return Err(Error::Empty("no covariate columns besides the response".into()));
    }

    let n = records.len();
    let mut x = DMatrix::zeros(n, names.len());
    let mut y = Vec::with_capacity(n);
    for (i, rec) in records.iter().enumerate() {
        let row = i + 1;
        let mut k = 0;
        for (j, cell) in rec.iter().enumerate() {
            if j == resp {
                let v = match cell.parse::<f64>() {
                    Ok(0.0) => 0,
                    Ok(1.0) => 1,
                    _ => {
                        return Err(Error::InvalidResponse {
                            row,
                            value: cell.to_string(),
                        })
                    }
                };
                y.push(v);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                    row,
                    column: all_names[j].clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row,
                        column: all_names[j].clone(),
                    });
                }
                x[(i, k)] = v;
                k += 1;
            }
        }
    }
    Dataset::new(x, y, names)
}
