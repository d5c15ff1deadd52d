//! Complex linear-algebra helpers used throughout the crate: CN(0, 1)
//! sampling, Hermitian eigendecompositions with a fixed ordering, Cholesky
//! solves, and deterministic pairwise summation for Monte Carlo averages.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// One CN(0, 1) sample: independent real and imaginary parts, variance 1/2
/// each, so that E{|x|^2} = 1.
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Vector of `n` i.i.d. CN(0, 1) entries.
pub fn cn01_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| cn01(rng))
}

/// Hermitian part (A + A^H)/2. Used to scrub the tiny asymmetry that
/// accumulates when a theoretically Hermitian matrix is assembled from
/// products of solves.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Largest elementwise deviation |A - A^H|.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let d = a - a.adjoint();
    d.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
/// descending order. Ties break on the original eigenvalue index so the
/// ordering is deterministic. Returns `(eigenvalues, eigenvectors)` with
/// eigenvectors as columns, aligned with the eigenvalue order.
pub fn eigh_desc(a: &CMat) -> (DVector<f64>, CMat) {
    let se = a.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]).then(i.cmp(&j)));
    let vals = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Cholesky factorization of a Hermitian positive-definite matrix, with a
/// typed error instead of an `Option` when the input is not PD. The complex
/// factorization itself never balks (every complex number has a square
/// root), so positive definiteness is enforced by demanding a real,
/// strictly positive factor diagonal.
pub fn chol(a: CMat) -> Result<Cholesky<C64, Dyn>> {
    let n = a.nrows();
    let fail = || {
        Error::numerical(format!(
            "Cholesky factorization failed: {n}x{n} matrix is not positive definite"
        ))
    };
    let f = Cholesky::new(a).ok_or_else(fail)?;
    let l = f.l_dirty();
    for i in 0..n {
        let d = l[(i, i)];
        if !(d.re > 0.0) || !d.re.is_finite() || d.im.abs() > 1e-9 * d.re {
            return Err(fail());
        }
    }
    Ok(f)
}

/// v^H M v for Hermitian M. The result is real up to rounding; the residual
/// imaginary part is discarded.
pub fn quad_form(v: &CVec, m: &CMat) -> f64 {
    v.dotc(&(m * v)).re
}

/// tr(A B) evaluated without forming the product, as sum_{i,j} A_ij B_ji.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(b.ncols(), a.nrows());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Real trace of a (numerically) Hermitian matrix.
pub fn trace_re(a: &CMat) -> f64 {
    a.diagonal().iter().map(|x| x.re).sum()
}

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// slice length, which keeps Monte Carlo averages bit-identical no matter
/// how the samples were produced or how many threads ran.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Pairwise mean; zero-length input yields NaN.
pub fn pairwise_mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample standard deviation (n - 1 normalization) computed around the
/// pairwise mean. Returns 0 for fewer than two samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = pairwise_mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    (pairwise_sum(&sq) / (xs.len() - 1) as f64).sqrt()
}
