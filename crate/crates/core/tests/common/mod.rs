//! Independent reference computations shared by the integration tests and
//! the acceptance runner. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) quadrature, vector-valued.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let dim = fc.len();
    let mut k: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for i in 0..7 {
        let f1 = f(c - h * XGK[i]);
        let f2 = f(c + h * XGK[i]);
        for d in 0..dim {
            let s = f1[d] + f2[d];
            k[d] += WGK[i] * s;
            if i % 2 == 1 {
                g[d] += WG[i / 2] * s;
            }
        }
    }
    let err = k.iter().zip(&g).map(|(a, b)| (a - b).abs() * h).fold(0.0, f64::max);
    (k.iter().map(|v| v * h).collect(), err)
}

fn adapt<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Vec<f64> {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    let left = adapt(f, a, m, 0.5 * tol, depth - 1);
    let right = adapt(f, m, b, 0.5 * tol, depth - 1);
    left.iter().zip(&right).map(|(l, r)| l + r).collect()
}

/// `∫_a^b f` for vector-valued `f`, absolute tolerance `tol` per component.
pub fn integrate_vec<F: FnMut(f64) -> Vec<f64>>(mut f: F, a: f64, b: f64, tol: f64) -> Vec<f64> {
    adapt(&mut f, a, b, tol, 40)
}

pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_vec(|x| vec![f(x)], a, b, tol)[0]
}

/// Nested 2-D integral over a rectangle.
pub fn integrate_2d<F: Fn(f64, f64) -> Vec<f64>>(
    f: F,
    (a1, b1): (f64, f64),
    (a2, b2): (f64, f64),
    tol: f64,
) -> Vec<f64> {
    let w = b1 - a1;
    integrate_vec(|x| integrate_vec(|y| f(x, y), a2, b2, tol / w), a1, b1, tol)
}

// ---------------------------------------------------------------------------
// Pólya-Gamma density, written directly from its definition.

/// Density of `U = (2/π²) Σ W_l/(2l-1)²`. Below `u = 1` the alternating
/// series in `exp(-(2l+1)²/(8u))`; above it the density of a sum of
/// independent exponentials with rates `λ_n = π²(2n+1)²/2`, whose weights
/// follow from `cos(πx/2) = Π (1 - x²/(2m+1)²)`: `w_n = (-1)^n 2π (2n+1)`.
pub fn pg0_density(u: f64) -> f64 {
    use std::f64::consts::PI;
    if u <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    if u < 1.0 {
        for l in 0..400 {
            let a = (2 * l + 1) as f64;
            let t = a / (2.0 * PI * u * u * u).sqrt() * (-a * a / (8.0 * u)).exp();
            s += if l % 2 == 0 { t } else { -t };
            if t < 1e-300 {
                break;
            }
        }
    } else {
        for n in 0..400 {
            let a = (2 * n + 1) as f64;
            let rate = PI * PI * a * a / 2.0;
            let t = 2.0 * PI * a * (-rate * u).exp();
            s += if n % 2 == 0 { t } else { -t };
            if t < 1e-300 {
                break;
            }
        }
    }
    s
}

/// PG(1, k) density by exponential tilting.
pub fn pg_density_oracle(u: f64, k: f64) -> f64 {
    // cosh(k/2) e^{-k²u/2} in log space
    let lc = 0.5 * k.abs() + (-(k.abs())).exp().ln_1p() - std::f64::consts::LN_2;
    (lc - 0.5 * k * k * u).exp() * pg0_density(u)
}

/// Breakpoints covering the PG(1, k) support for quadrature.
pub const PG_BREAKS: [f64; 8] = [0.0, 0.02, 0.08, 0.25, 0.6, 1.5, 5.0, 40.0];

pub fn pg_moment_oracle(k: f64, power: i32) -> f64 {
    PG_BREAKS
        .windows(2)
        .map(|w| integrate(|u| u.powi(power) * pg_density_oracle(u, k), w[0], w[1], 1e-14))
        .sum()
}

/// CDF values at sorted points, accumulated piecewise.
pub fn pg_cdf_at_sorted(points: &[f64], k: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &x in points {
        if x > prev {
            acc += integrate(|u| pg_density_oracle(u, k), prev, x, 1e-13);
            prev = x;
        }
        out.push(acc);
    }
    out
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov.

/// `sup |F_n - F|` given sorted data and the model CDF at each point.
pub fn ks_statistic(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value with the Stephens small-sample correction.
pub fn ks_critical_1pct(n: usize) -> f64 {
    let r = (n as f64).sqrt();
    1.628 / (r + 0.12 + 0.11 / r)
}

// ---------------------------------------------------------------------------
// Exact 2-D posterior by quadrature.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OraclePrior {
    /// Independent Student-t with the given df and scales.
    T(f64, [f64; 2]),
    Normal([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleLink {
    Logit,
    Probit,
}

fn ln_phi(t: f64) -> f64 {
    if t > -30.0 {
        (0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)).ln()
    } else {
        // Mills-ratio expansion
        let t2 = t * t;
        -0.5 * t2 - 0.5 * (2.0 * std::f64::consts::PI).ln() - (-t).ln()
            + (1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2)).ln()
    }
}

/// Unnormalized log posterior for intercept-plus-slope data.
pub fn oracle_log_post(b: [f64; 2], x: &[f64], y: &[u8], prior: OraclePrior, link: OracleLink) -> f64 {
    let mut lp = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let t = b[0] + b[1] * xi;
        let s = if yi == 1 { t } else { -t };
        lp += match link {
            // ln σ(s) = -ln(1 + e^{-s})
            OracleLink::Logit => {
                if s > 0.0 {
                    -(-s).exp().ln_1p()
                } else {
                    s - s.exp().ln_1p()
                }
            }
            OracleLink::Probit => ln_phi(s),
        };
    }
    match prior {
        OraclePrior::T(v, sc) => {
            for j in 0..2 {
                let r = b[j] / sc[j];
                lp -= 0.5 * (v + 1.0) * (r * r / v).ln_1p();
            }
        }
        OraclePrior::Normal(sc) => {
            for j in 0..2 {
                let r = b[j] / sc[j];
                lp -= 0.5 * r * r;
            }
        }
    }
    lp
}

#[derive(Debug, Clone, Copy)]
pub struct PosteriorMoments {
    pub mean: [f64; 2],
    pub sd: [f64; 2],
}

/// Means and sds by nested adaptive quadrature over a box of ±`width`
/// Laplace standard deviations around the mode.
pub fn posterior_moments(x: &[f64], y: &[u8], prior: OraclePrior, link: OracleLink) -> PosteriorMoments {
    let f = |b: [f64; 2]| oracle_log_post(b, x, y, prior, link);
    // Newton on finite-difference derivatives.
    let mut m = [0.0, 0.0];
    let h = 1e-4;
    for _ in 0..100 {
        let (g, hess) = fd_derivs(&f, m, h);
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        let step = [
            (hess[1][1] * g[0] - hess[0][1] * g[1]) / det,
            (-hess[1][0] * g[0] + hess[0][0] * g[1]) / det,
        ];
        let mut t = 1.0;
        let f0 = f(m);
        while f([m[0] - t * step[0], m[1] - t * step[1]]) < f0 && t > 1e-10 {
            t *= 0.5;
        }
        m = [m[0] - t * step[0], m[1] - t * step[1]];
        if step[0].abs().max(step[1].abs()) < 1e-10 {
            break;
        }
    }
    let (_, hess) = fd_derivs(&f, m, h);
    let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    let s = [(-hess[1][1] / det).sqrt(), (-hess[0][0] / det).sqrt()];
    let width = 25.0;
    let fmax = f(m);
    let moments = integrate_2d(
        |a, b| {
            let w = (f([a, b]) - fmax).exp();
            vec![w, w * a, w * b, w * a * a, w * b * b]
        },
        (m[0] - width * s[0], m[0] + width * s[0]),
        (m[1] - width * s[1], m[1] + width * s[1]),
        1e-10 * s[0] * s[1],
    );
    let z = moments[0];
    let mean = [moments[1] / z, moments[2] / z];
    let sd = [
        (moments[3] / z - mean[0] * mean[0]).sqrt(),
        (moments[4] / z - mean[1] * mean[1]).sqrt(),
    ];
    PosteriorMoments { mean, sd }
}

fn fd_derivs<F: Fn([f64; 2]) -> f64>(f: &F, m: [f64; 2], h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let e = |i: usize, s: f64| {
        let mut v = m;
        v[i] += s;
        v
    };
    let g = [
        (f(e(0, h)) - f(e(0, -h))) / (2.0 * h),
        (f(e(1, h)) - f(e(1, -h))) / (2.0 * h),
    ];
    let f0 = f(m);
    let h00 = (f(e(0, h)) - 2.0 * f0 + f(e(0, -h))) / (h * h);
    let h11 = (f(e(1, h)) - 2.0 * f0 + f(e(1, -h))) / (h * h);
    let h01 = (f([m[0] + h, m[1] + h]) - f([m[0] + h, m[1] - h]) - f([m[0] - h, m[1] + h])
        + f([m[0] - h, m[1] - h]))
        / (4.0 * h * h);
    (g, [[h00, h01], [h01, h11]])
}

/// Three fixed overlapping datasets with n = 20 (intercept + slope).
pub fn exactness_datasets() -> Vec<(Vec<f64>, Vec<u8>)> {
    let a: Vec<f64> = (0..20).map(|i| -1.9 + 0.2 * i as f64).collect();
    let ya = vec![0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1];
    let b: Vec<f64> = (0..20).map(|i| ((i * 7) % 20) as f64 / 10.0 - 0.6).collect();
    let yb = vec![1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1, 0, 1, 1];
    let c: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin() * 1.5).collect();
    let yc = vec![0, 1, 1, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1];
    vec![(a, ya), (b, yb), (c, yc)]
}

// ---------------------------------------------------------------------------
// Separation by vertex enumeration.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    None,
    Quasicomplete,
    Complete,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Orthonormal basis of the null space of `a` (columns).
fn null_space(a: &DMatrix<f64>, cols: usize) -> Vec<DVector<f64>> {
    if a.nrows() == 0 {
        return (0..cols).map(|j| DVector::from_fn(cols, |i, _| f64::from(u8::from(i == j)))).collect();
    }
    let g = a.transpose() * a;
    let eig = g.symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    (0..cols)
        .filter(|&k| eig.eigenvalues[k].abs() <= 1e-10 * scale)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect()
}

/// Classifies `z` (rows `(2y_i - 1) x_i`) by enumerating the candidate
/// extreme rays of `{α : Zα ≥ 0}` and the vertices of `{γ : ZQγ ≥ 1}` with
/// `Q` a basis of the row space.
pub fn separation_oracle(z: &DMatrix<f64>) -> OracleKind {
    let (n, p) = z.shape();
    let tol = 1e-9;
    let feasible = |v: &DVector<f64>, rhs: f64| (z * v).iter().all(|&r| r >= rhs - tol);

    // Complete: vertex of {γ : (ZQ)γ ≥ 1}.
    let nulls = null_space(z, p);
    let eig = (z.transpose() * z).symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let row_basis: Vec<DVector<f64>> = (0..p)
        .filter(|&k| eig.eigenvalues[k].abs() > 1e-10 * scale)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    let r = row_basis.len();
    if r > 0 {
        let q = DMatrix::from_columns(&row_basis);
        let zq = z * &q;
        for s in subsets(n, r) {
            let a = DMatrix::from_fn(r, r, |i, j| zq[(s[i], j)]);
            if let Some(inv) = a.clone().try_inverse() {
                if a.determinant().abs() < 1e-12 {
                    continue;
                }
                let gamma = inv * DVector::from_element(r, 1.0);
                let alpha = &q * gamma;
                if feasible(&alpha, 1.0) {
                    return OracleKind::Complete;
                }
            }
        }
    }

    // Quasicomplete: lineality or an extreme ray of the cone.
    if !nulls.is_empty() {
        return OracleKind::Quasicomplete;
    }
    for s in subsets(n, p - 1) {
        let a = DMatrix::from_fn(p - 1, p, |i, j| z[(s[i], j)]);
        let ns = null_space(&a, p);
        if ns.len() != 1 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let v = &ns[0] * sign;
            if feasible(&v, 0.0) {
                return OracleKind::Quasicomplete;
            }
        }
    }
    OracleKind::None
}

// ---------------------------------------------------------------------------
// Penalized IRLS for logistic regression.

/// Mode of the logistic log-likelihood plus `-½ Σ (β_j/σ_j)²` by IRLS.
pub fn irls_logistic(x: &DMatrix<f64>, y: &[u8], prior_sd: &[f64]) -> Vec<f64> {
    let (n, p) = x.shape();
    let mut beta = DVector::zeros(p);
    for _ in 0..200 {
        let eta = x * &beta;
        let mu: DVector<f64> = eta.map(|t| 1.0 / (1.0 + (-t).exp()));
        let w: DVector<f64> = mu.map(|m| m * (1.0 - m));
        let zwork = DVector::from_fn(n, |i, _| eta[i] + (f64::from(y[i]) - mu[i]) / w[i]);
        let mut xtwx = DMatrix::zeros(p, p);
        let mut xtwz = DVector::zeros(p);
        for i in 0..n {
            let xi = x.row(i).transpose();
            xtwx += w[i] * &xi * xi.transpose();
            xtwz += w[i] * zwork[i] * &xi;
        }
        for j in 0..p {
            xtwx[(j, j)] += 1.0 / (prior_sd[j] * prior_sd[j]);
        }
        let next = xtwx.lu().solve(&xtwz).expect("IRLS system singular");
        let delta = (&next - &beta).amax();
        beta = next;
        if delta < 1e-13 {
            break;
        }
    }
    beta.iter().copied().collect()
}

// ---------------------------------------------------------------------------
// Random small designs for separation checks.

/// Small random design: integer grid entries so ties and quasicomplete
/// configurations are common.
pub fn random_dataset(rng: &mut rand_chacha::ChaCha8Rng) -> sepbayes::dataset::Dataset {
    use rand::Rng;
    let n = rng.random_range(2..=12);
    let p = rng.random_range(1..=3);
    let continuous = rng.random_bool(0.3);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..p)
                .map(|_| {
                    if continuous {
                        rng.random_range(-2.0..2.0)
                    } else {
                        f64::from(rng.random_range(-2i8..=2))
                    }
                })
                .collect()
        })
        .collect();
    let y = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
    sepbayes::dataset::Dataset::from_rows(&rows, y, (1..=p).map(|j| format!("x{j}")).collect()).unwrap()
}

