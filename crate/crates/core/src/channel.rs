//! Spatial channel models: array responses, LoS inner products, 2D/3D
//! one-ring correlation matrices, and correlated Rayleigh sampling.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - Arrays have half-wavelength element spacing. A linear array lies in the
//!   horizontal plane; element `m` (0-based) of the response to azimuth
//!   `phi` is `exp(j pi m sin(phi))`, so element 0 is always 1.
//! - A planar array is `s x s` with `s = sqrt(M)`. Antenna `(row, col)` maps
//!   to the flat index `m = row * s + col` (row-major). Rows are stacked
//!   vertically: the row difference couples to `sin(theta)` (elevation) and
//!   the column difference to `cos(theta) sin(phi)`.
//! - Correlation matrices carry the large-scale gain on their trace:
//!   `tr(R) = M * beta`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;

use crate::linalg::{self, C64, CMat, CVec};
use crate::netconfig::{ArrayGeometry, LinkGeometry};
use crate::{Error, Result};

/// Steering vector of an M-element uniform linear array toward azimuth
/// `phi`: element m is `exp(j pi m sin(phi))`.
pub fn ula_response(phi: f64, m: usize) -> CVec {
    let s = phi.sin();
    CVec::from_fn(m, |i, _| C64::from_polar(1.0, PI * i as f64 * s))
}

/// Steering vector of an `sqrt(M) x sqrt(M)` planar array toward azimuth
/// `phi` and elevation `theta`. Element `(r, c)` (flat index `r * s + c`)
/// has phase `pi (r sin(theta) + c cos(theta) sin(phi))`.
pub fn planar_response(phi: f64, theta: f64, m: usize) -> Result<CVec> {
    let s = square_side(m)?;
    let vert = theta.sin();
    let horiz = theta.cos() * phi.sin();
    Ok(CVec::from_fn(m, |i, _| {
        let (r, c) = (i / s, i % s);
        C64::from_polar(1.0, PI * (r as f64 * vert + c as f64 * horiz))
    }))
}

/// Normalized inner product of two ULA responses,
/// `(1/M) a(phi1)^H a(phi2)`, evaluated in closed form:
/// with `Omega = pi (sin(phi1) - sin(phi2)) / 2`, the value is
/// `exp(-j (M-1) Omega) sin(M Omega) / (M sin(Omega))`.
///
/// Equal effective angles (`sin(phi1) == sin(phi2)`) give exactly 1. Near
/// the removable singularities of the closed form the direct M-term sum is
/// used instead, so the magnitude never exceeds 1.
pub fn los_inner_product(phi1: f64, phi2: f64, m: usize) -> C64 {
    let delta = phi1.sin() - phi2.sin();
    if delta == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let omega = 0.5 * PI * delta;
    if omega.sin().abs() < 1e-9 {
        // fall back to the direct sum where the ratio form loses accuracy
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..m {
            acc += C64::from_polar(1.0, -2.0 * omega * i as f64);
        }
        return acc / m as f64;
    }
    let ratio = (m as f64 * omega).sin() / (m as f64 * omega.sin());
    C64::from_polar(1.0, -(m as f64 - 1.0) * omega) * ratio
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence. Nodes are in
/// ascending order; weights sum to 2.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dpdz = 0.0;
        for _ in 0..100 {
            let (mut p, mut pm1) = (1.0f64, 0.0f64);
            for j in 0..n {
                let pm2 = pm1;
                pm1 = p;
                p = (((2 * j + 1) as f64) * z * pm1 - j as f64 * pm2) / (j + 1) as f64;
            }
            dpdz = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dpdz;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        // i counts from the largest root downward; store symmetrically
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dpdz * dpdz);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Quadrature size for a one-ring integral whose largest phase rate is
/// `pi * spread * max_lag`: enough nodes to resolve every oscillation plus
/// a safety tail, never fewer than 64.
fn quad_points(spread: f64, max_lag: usize) -> usize {
    64usize.max((PI * spread * max_lag as f64).ceil() as usize + 33)
}

/// Quadrature nodes over `center + spread * [-1, 1]` with weights summing
/// to one (the uniform angular density is folded into the weights). A zero
/// spread degenerates to the single nominal angle.
fn axis_nodes(center: f64, spread: f64, max_lag: usize) -> Vec<(f64, f64)> {
    if spread == 0.0 {
        return vec![(center, 1.0)];
    }
    let n = quad_points(spread, max_lag);
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(w.iter())
        .map(|(&xi, &wi)| (center + spread * xi, 0.5 * wi))
        .collect()
}

fn square_side(m: usize) -> Result<usize> {
    let s = (m as f64).sqrt().round() as usize;
    if s * s != m {
        return Err(Error::config(format!(
            "planar-array operations need a square antenna count, got M = {m}"
        )));
    }
    Ok(s)
}

/// A validated spatial correlation matrix: Hermitian, with `beta = tr(R)/M`
/// the average per-antenna gain.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    r: CMat,
    beta: f64,
}

impl CorrelationMatrix {
    /// Wraps a matrix after checking squareness, Hermitian symmetry (defect
    /// below `1e-12` relative to the largest entry), and a positive trace.
    pub fn new(r: CMat) -> Result<Self> {
        if r.nrows() != r.ncols() || r.nrows() == 0 {
            return Err(Error::config(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        let scale = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let defect = linalg::hermitian_defect(&r);
        if defect > 1e-12 * scale {
            return Err(Error::numerical(format!(
                "correlation matrix is not Hermitian: defect {defect:.3e} vs scale {scale:.3e}"
            )));
        }
        let beta = linalg::trace_re(&r) / r.nrows() as f64;
        if !(beta > 0.0) {
            return Err(Error::domain(format!(
                "correlation matrix must have positive trace, got average gain {beta:.3e}"
            )));
        }
        Ok(CorrelationMatrix { r, beta })
    }

    pub fn matrix(&self) -> &CMat {
        &self.r
    }

    pub fn into_matrix(self) -> CMat {
        self.r
    }

    /// Average per-antenna gain `tr(R) / M`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// Factor `F` with `F F^H = R` from the eigendecomposition, for
    /// correlated Rayleigh sampling. Eigenvalues in `[-1e-10 * beta, 0)`
    /// are treated as rounding noise and clamped to zero; anything lower
    /// means the input was not PSD and is a hard error.
    pub fn sqrt_factor(&self) -> Result<ChannelFactor> {
        let (vals, vecs) = linalg::eigh_desc(&self.r);
        let tol = 1e-10 * self.beta;
        let mut f = vecs;
        for (j, &lam) in vals.iter().enumerate() {
            if lam < -tol {
                return Err(Error::numerical(format!(
                    "correlation matrix has eigenvalue {lam:.6e} below -1e-10 * beta = {:.6e}",
                    -tol
                )));
            }
            let s = lam.max(0.0).sqrt();
            let mut col = f.column_mut(j);
            col *= C64::new(s, 0.0);
        }
        Ok(ChannelFactor { f })
    }

    /// Row-major dump with each entry as a (re, im) pair: `2 M^2` floats.
    pub fn to_interleaved(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = Vec::with_capacity(2 * m * m);
        for i in 0..m {
            for j in 0..m {
                out.push(self.r[(i, j)].re);
                out.push(self.r[(i, j)].im);
            }
        }
        out
    }

    /// Inverse of [`CorrelationMatrix::to_interleaved`].
    pub fn from_interleaved(m: usize, data: &[f64]) -> Result<Self> {
        if data.len() != 2 * m * m {
            return Err(Error::config(format!(
                "interleaved dump for M = {m} needs {} values, got {}",
                2 * m * m,
                data.len()
            )));
        }
        let r = CMat::from_fn(m, m, |i, j| {
            let off = 2 * (i * m + j);
            C64::new(data[off], data[off + 1])
        });
        CorrelationMatrix::new(r)
    }
}

/// Sampling factor for correlated Rayleigh fading: `h = F z`, `z` i.i.d.
/// CN(0, 1), gives `E{h h^H} = R`.
#[derive(Debug, Clone)]
pub struct ChannelFactor {
    f: CMat,
}

impl ChannelFactor {
    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CVec {
        &self.f * linalg::cn01_vec(rng, self.f.ncols())
    }
}

/// One correlated Rayleigh draw straight from a correlation matrix. Use
/// [`CorrelationMatrix::sqrt_factor`] once and [`ChannelFactor::sample`]
/// repeatedly when drawing many realizations of the same link.
pub fn sample_channel<R: Rng + ?Sized>(corr: &CorrelationMatrix, rng: &mut R) -> Result<CVec> {
    Ok(corr.sqrt_factor()?.sample(rng))
}

/// 2D one-ring correlation matrix for an M-element ULA: scatterers uniform
/// over azimuth `nominal_az + spread * [-1, 1]`,
/// `[R]_{m1,m2} = beta * E{ exp(j pi (m1 - m2) sin(phi)) }`.
///
/// The matrix is Toeplitz and Hermitian by construction and the diagonal is
/// exactly `beta`. Zero spread degenerates to the rank-one LoS outer
/// product `beta a a^H`.
pub fn corr_2d_one_ring(
    m: usize,
    beta: f64,
    nominal_az: f64,
    spread: f64,
) -> Result<CorrelationMatrix> {
    check_one_ring_args(m, beta, spread)?;
    if spread == 0.0 {
        let a = ula_response(nominal_az, m);
        return rank_one(beta, &a);
    }
    let nodes = axis_nodes(nominal_az, spread, m - 1);
    // one value per non-negative lag; conjugate symmetry fills the rest
    let mut lags = vec![C64::new(0.0, 0.0); m];
    lags[0] = C64::new(1.0, 0.0);
    for (d, slot) in lags.iter_mut().enumerate().skip(1) {
        let mut acc = C64::new(0.0, 0.0);
        for &(phi, w) in &nodes {
            acc += C64::from_polar(w, PI * d as f64 * phi.sin());
        }
        *slot = acc;
    }
    let r = CMat::from_fn(m, m, |i, j| {
        if i >= j {
            lags[i - j] * beta
        } else {
            lags[j - i].conj() * beta
        }
    });
    CorrelationMatrix::new(r)
}

/// 3D one-ring correlation matrix for an `sqrt(M) x sqrt(M)` planar array:
/// scatterers uniform over the rectangle
/// `(phi, theta) in nominal +- spread` (azimuth x elevation), and
/// `[R]_{m1,m2} = beta * E{ exp(j pi [(r1 - r2) sin(theta)
///  + (c1 - c2) cos(theta) sin(phi)]) }` with `(r, c)` the row/column of
/// each antenna under the row-major flat index `m = r * sqrt(M) + c`.
///
/// The matrix is block Toeplitz: entries depend only on the row and column
/// index differences, so only `(2 sqrt(M) - 1)^2` integrals are evaluated.
/// Zero spreads on both axes degenerate to the rank-one LoS outer product.
pub fn corr_3d_one_ring(
    m: usize,
    beta: f64,
    nominal_az: f64,
    nominal_el: f64,
    spread_az: f64,
    spread_el: f64,
) -> Result<CorrelationMatrix> {
    check_one_ring_args(m, beta, spread_az.min(spread_el))?;
    let s = square_side(m)?;
    if spread_az == 0.0 && spread_el == 0.0 {
        let a = planar_response(nominal_az, nominal_el, m)?;
        return rank_one(beta, &a);
    }
    let az_nodes = axis_nodes(nominal_az, spread_az, s - 1);
    let el_nodes = axis_nodes(nominal_el, spread_el, s - 1);
    let width = 2 * s - 1;
    // ttab[(dr + s - 1) * width + (dc + s - 1)] = E{ e^{j pi (dr sin th + dc cos th sin ph)} }
    let mut ttab = vec![C64::new(0.0, 0.0); width * width];
    let mut hrow = vec![C64::new(0.0, 0.0); width];
    for &(theta, w_el) in &el_nodes {
        let sin_el = theta.sin();
        let cos_el = theta.cos();
        hrow.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for &(phi, w_az) in &az_nodes {
            let base = PI * cos_el * phi.sin();
            for (dc, slot) in hrow.iter_mut().enumerate() {
                let lag = dc as f64 - (s - 1) as f64;
                *slot += C64::from_polar(w_az, base * lag);
            }
        }
        for dr in 0..width {
            let lag = dr as f64 - (s - 1) as f64;
            let vert = C64::from_polar(w_el, PI * sin_el * lag);
            for dc in 0..width {
                ttab[dr * width + dc] += vert * hrow[dc];
            }
        }
    }
    let r = CMat::from_fn(m, m, |m1, m2| {
        if m1 == m2 {
            return C64::new(beta, 0.0);
        }
        let dr = (m1 / s) as isize - (m2 / s) as isize;
        let dc = (m1 % s) as isize - (m2 % s) as isize;
        let idx = (dr + s as isize - 1) as usize * width + (dc + s as isize - 1) as usize;
        ttab[idx] * beta
    });
    CorrelationMatrix::new(r)
}

/// Builds the correlation matrix appropriate to the BS array geometry from
/// one link's large-scale parameters.
pub fn corr_for_link(
    array: ArrayGeometry,
    m: usize,
    beta: f64,
    link: &LinkGeometry,
) -> Result<CorrelationMatrix> {
    match array {
        ArrayGeometry::Linear => corr_2d_one_ring(m, beta, link.azimuth, link.spread_az),
        ArrayGeometry::Planar => corr_3d_one_ring(
            m,
            beta,
            link.azimuth,
            link.elevation,
            link.spread_az,
            link.spread_el,
        ),
    }
}

fn check_one_ring_args(m: usize, beta: f64, min_spread: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::config("correlation matrix needs at least one antenna"));
    }
    if !(beta > 0.0) {
        return Err(Error::domain(format!("average gain must be positive, got {beta:.3e}")));
    }
    if min_spread < 0.0 {
        return Err(Error::domain("angular spreads must be non-negative"));
    }
    Ok(())
}

fn rank_one(beta: f64, a: &CVec) -> Result<CorrelationMatrix> {
    let m = a.len();
    let r = CMat::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(beta, 0.0)
        } else {
            a[i] * a[j].conj() * beta
        }
    });
    CorrelationMatrix::new(r)
}

/// Eigenvalues of a correlation matrix in descending order; convenience for
/// rank/subspace diagnostics.
pub fn corr_eigenvalues(corr: &CorrelationMatrix) -> DVector<f64> {
    linalg::eigh_desc(corr.matrix()).0
}
