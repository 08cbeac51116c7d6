use nalgebra::DMatrix;
use rand::Rng;

use crate::distributions::{draw_inverse_gamma, std_normal};
use crate::error::{Error, Result};
use crate::linalg;
use crate::special::{ln_gamma, ln_student_t_const};

/// Prior on the coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    /// Independent `t_df(location_j, scale_j)`; `df = 1` is the Cauchy.
    IndependentT {
        df: f64,
        locations: Vec<f64>,
        scales: Vec<f64>,
    },
    IndependentNormal {
        locations: Vec<f64>,
        scales: Vec<f64>,
    },
    /// Multivariate t with location vector and scale matrix.
    MultivariateT {
        df: f64,
        location: Vec<f64>,
        scale_matrix: DMatrix<f64>,
    },
}

fn check_df(df: f64) -> Result<()> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("degrees of freedom must be positive, got {df}")))
    }
}

fn check_loc_scale(locations: &[f64], scales: &[f64]) -> Result<()> {
    if locations.len() != scales.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} locations and {} scales",
            locations.len(),
            scales.len()
        )));
    }
    if locations.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("prior locations must be finite".into()));
    }
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(format!("prior scales must be positive, got {s}")));
    }
    Ok(())
}

impl PriorSpec {
    pub fn independent_t(df: f64, locations: &[f64], scales: &[f64]) -> Result<Self> {
        check_df(df)?;
        check_loc_scale(locations, scales)?;
        Ok(PriorSpec::IndependentT {
            df,
            locations: locations.to_vec(),
            scales: scales.to_vec(),
        })
    }

    pub fn cauchy(locations: &[f64], scales: &[f64]) -> Result<Self> {
        Self::independent_t(1.0, locations, scales)
    }

    pub fn normal(locations: &[f64], scales: &[f64]) -> Result<Self> {
        check_loc_scale(locations, scales)?;
        Ok(PriorSpec::IndependentNormal {
            locations: locations.to_vec(),
            scales: scales.to_vec(),
        })
    }

    pub fn multivariate_t(df: f64, location: &[f64], scale_matrix: DMatrix<f64>) -> Result<Self> {
        check_df(df)?;
        let p = location.len();
        if scale_matrix.shape() != (p, p) {
            return Err(Error::DimensionMismatch(format!(
                "location of length {p} with a {}x{} scale matrix",
                scale_matrix.nrows(),
                scale_matrix.ncols()
            )));
        }
        if location.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("prior location must be finite".into()));
        }
        let asym = (&scale_matrix - scale_matrix.transpose()).amax();
        if asym > 1e-10 * scale_matrix.amax().max(1.0) {
            return Err(Error::InvalidParameter("scale matrix is not symmetric".into()));
        }
        linalg::cholesky(&scale_matrix)?;
        Ok(PriorSpec::MultivariateT {
            df,
            location: location.to_vec(),
            scale_matrix,
        })
    }

    /// Scales of 10 for the intercept and 2.5 elsewhere, zero locations.
    pub fn default_scales(p: usize, intercept: Option<usize>) -> Vec<f64> {
        (0..p).map(|j| if Some(j) == intercept { 10.0 } else { 2.5 }).collect()
    }

    pub fn dim(&self) -> usize {
        match self {
            PriorSpec::IndependentT { locations, .. } => locations.len(),
            PriorSpec::IndependentNormal { locations, .. } => locations.len(),
            PriorSpec::MultivariateT { location, .. } => location.len(),
        }
    }

    pub fn locations(&self) -> &[f64] {
        match self {
            PriorSpec::IndependentT { locations, .. } => locations,
            PriorSpec::IndependentNormal { locations, .. } => locations,
            PriorSpec::MultivariateT { location, .. } => location,
        }
    }

    /// Normalized log density.
    pub fn log_density(&self, beta: &[f64]) -> f64 {
        match self {
            PriorSpec::IndependentT {
                df,
                locations,
                scales,
            } => {
                let c = ln_student_t_const(*df);
                beta.iter()
                    .zip(locations)
                    .zip(scales)
                    .map(|((b, m), s)| {
                        let r = (b - m) / s;
                        c - s.ln() - 0.5 * (df + 1.0) * (r * r / df).ln_1p()
                    })
                    .sum()
            }
            PriorSpec::IndependentNormal { locations, scales } => beta
                .iter()
                .zip(locations)
                .zip(scales)
                .map(|((b, m), s)| {
                    let r = (b - m) / s;
                    -0.5 * r * r - s.ln() - 0.918_938_533_204_672_8
                })
                .sum(),
            PriorSpec::MultivariateT {
                df,
                location,
                scale_matrix,
            } => {
                let p = location.len() as f64;
                let l = linalg::cholesky(scale_matrix).expect("validated scale matrix");
                let mut r: Vec<f64> = beta.iter().zip(location).map(|(b, m)| b - m).collect();
                linalg::forward_solve(&l, &mut r);
                let q: f64 = r.iter().map(|v| v * v).sum();
                ln_gamma(0.5 * (df + p)) - ln_gamma(0.5 * df) - 0.5 * p * (df * std::f64::consts::PI).ln()
                    - 0.5 * linalg::log_det_from_cholesky(&l)
                    - 0.5 * (df + p) * (q / df).ln_1p()
            }
        }
    }

    /// Gradient and Hessian of [`PriorSpec::log_density`].
    pub fn log_density_derivs(&self, beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let p = beta.len();
        let mut g = vec![0.0; p];
        let mut h = DMatrix::zeros(p, p);
        match self {
            PriorSpec::IndependentT {
                df,
                locations,
                scales,
            } => {
                for j in 0..p {
                    let b = beta[j] - locations[j];
                    let vs2 = df * scales[j] * scales[j];
                    let d = vs2 + b * b;
                    g[j] = -(df + 1.0) * b / d;
                    h[(j, j)] = -(df + 1.0) * (vs2 - b * b) / (d * d);
                }
            }
            PriorSpec::IndependentNormal { locations, scales } => {
                for j in 0..p {
                    let s2 = scales[j] * scales[j];
                    g[j] = -(beta[j] - locations[j]) / s2;
                    h[(j, j)] = -1.0 / s2;
                }
            }
            PriorSpec::MultivariateT {
                df,
                location,
                scale_matrix,
            } => {
                let prec = linalg::spd_inverse(scale_matrix).expect("validated scale matrix");
                let b = nalgebra::DVector::from_iterator(p, beta.iter().zip(location).map(|(x, m)| x - m));
                let pb = &prec * &b;
                let q = b.dot(&pb);
                let c = (df + p as f64) / (df + q);
                for j in 0..p {
                    g[j] = -c * pb[j];
                }
                h = -c * &prec + (2.0 * c / (df + q)) * (&pb * pb.transpose());
            }
        }
        (g, h)
    }

    /// One draw from the prior.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            PriorSpec::IndependentT {
                df,
                locations,
                scales,
            } => locations
                .iter()
                .zip(scales)
                .map(|(m, s)| {
                    let g = draw_inverse_gamma(0.5 * df, 0.5 * df * s * s, rng);
                    m + g.sqrt() * std_normal(rng)
                })
                .collect(),
            PriorSpec::IndependentNormal { locations, scales } => locations
                .iter()
                .zip(scales)
                .map(|(m, s)| m + s * std_normal(rng))
                .collect(),
            PriorSpec::MultivariateT {
                df,
                location,
                scale_matrix,
            } => {
                let p = location.len();
                let l = linalg::cholesky(scale_matrix).expect("validated scale matrix");
                let phi = draw_inverse_gamma(0.5 * df, 0.5 * df, rng);
                let xi: Vec<f64> = (0..p).map(|_| std_normal(rng)).collect();
                (0..p)
                    .map(|i| location[i] + phi.sqrt() * (0..=i).map(|k| l[(i, k)] * xi[k]).sum::<f64>())
                    .collect()
            }
        }
    }
}
