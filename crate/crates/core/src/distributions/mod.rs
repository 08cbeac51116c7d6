//! Seedable random streams and the building-block samplers used by the
//! posterior simulators.
//!
//! Every sampler is a function of its parameters and a caller-owned
//! generator, so chains that own distinct [`RngStream`]s can run in parallel.

mod pg;

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;

pub use pg::{pg_base_density, pg_density, sample_pg, MAX_TERMS as PG_MAX_TERMS};
pub(crate) use pg::draw_pg;

/// A ChaCha stream identified by `(seed, stream)`. Equal pairs give equal
/// sequences; different stream ids give non-overlapping ones.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Inverse gamma with density ∝ `x^(-shape-1) exp(-scale/x)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    positive("inverse-gamma shape", shape)?;
    positive("inverse-gamma scale", scale)?;
    Ok(draw_inverse_gamma(shape, scale, rng))
}

pub(crate) fn draw_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0).expect("validated gamma shape");
    let mut v: f64 = g.sample(rng);
    // Tiny shapes can underflow the gamma draw.
    while v <= 0.0 {
        v = g.sample(rng);
    }
    scale / v
}

pub(crate) fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `mean + L ξ` with `L` the lower Cholesky factor of `covariance`.
pub fn sample_mvn<R: Rng + ?Sized>(
    mean: &[f64],
    covariance: &DMatrix<f64>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let p = mean.len();
    if covariance.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "mean of length {p} with a {}x{} covariance",
            covariance.nrows(),
            covariance.ncols()
        )));
    }
    let l = linalg::cholesky(covariance)?;
    let xi: Vec<f64> = (0..p).map(|_| std_normal(rng)).collect();
    Ok((0..p)
        .map(|i| mean[i] + (0..=i).map(|k| l[(i, k)] * xi[k]).sum::<f64>())
        .collect())
}

/// Student-t by composition: `location + sqrt(γ) ξ`, `γ ~ IG(ν/2, ν s²/2)`.
pub fn sample_student_t<R: Rng + ?Sized>(
    df: f64,
    location: f64,
    scale: f64,
    rng: &mut R,
) -> Result<f64> {
    positive("degrees of freedom", df)?;
    positive("scale", scale)?;
    if !location.is_finite() {
        return Err(Error::InvalidParameter("location must be finite".into()));
    }
    let gamma = draw_inverse_gamma(0.5 * df, 0.5 * df * scale * scale, rng);
    Ok(location + gamma.sqrt() * std_normal(rng))
}
