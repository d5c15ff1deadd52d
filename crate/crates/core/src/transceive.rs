//! Receive combining and downlink precoding over the spread domain.
//!
//! With spreading signature `u` (length N) and antenna channel `h` (length
//! M), the effective uplink channel after stacking the N chips is
//! `g = u kron h` (element `n * M + i` is `u[n] h[i]`). Combiners act on
//! this MN-dimensional domain:
//!
//! - MR: `v = g_hat`.
//! - MMSE: `v = p_t (sum_t' p_t' g_hat_t' g_hat_t'^H + Z)^{-1} g_hat_t`,
//!   where `Z = sum_t' p_t' (u_t' u_t'^H) kron C_t' + sigma^2 I` collects
//!   estimation-error and noise covariance.
//!
//! When every UE uses a signature from one orthogonal book, the MN-system
//! block-diagonalizes chip-wise: per signature, an M-dimensional system
//! with `Zbar = sum_{co-signature} p C + (sigma^2 / N) I` produces the
//! *same* SINR at a fraction of the cost. [`coset_interference_covariance`]
//! and [`orthogonal_mmse_combiner`] implement that fast path; callers gate
//! it with [`require_orthogonal`].
//!
//! Downlink precoders are rescaled uplink combiners:
//! `w = v / sqrt(E{||v||^2})` (unit average power per UE).

use nalgebra::{Cholesky, Dyn};

use crate::linalg::{self, C64, CMat, CVec};
use crate::signatures::{SignatureKind, SignatureSet};
use crate::{Error, Result};

/// Effective spread-domain channel `g = u kron h`.
pub fn effective_channel(u: &CVec, h: &CVec) -> CVec {
    u.kronecker(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinerScheme {
    Mr,
    Mmse,
}

/// A receive combining vector, MN-dimensional (or M-dimensional on the
/// orthogonal fast path).
#[derive(Debug, Clone)]
pub struct Combiner {
    pub v: CVec,
    pub scheme: CombinerScheme,
}

/// A downlink precoding vector with `E{||w||^2} = 1` under the
/// normalization supplied at construction.
#[derive(Debug, Clone)]
pub struct Precoder {
    pub w: CVec,
}

/// Estimation-error-plus-noise covariance seen by an MN-domain combiner:
/// `Z = sum_t p_t (u_t u_t^H) kron C_t + sigma^2 I_{MN}`. UEs sharing a
/// signature are merged before the Kronecker expansion, so assembly costs
/// one M x M sum per *distinct* signature.
pub fn interference_covariance(
    signatures: &SignatureSet,
    err_covs: &[CMat],
    powers: &[f64],
    sigma2: f64,
) -> Result<CMat> {
    let total = err_covs.len();
    if total == 0 || powers.len() != total || signatures.assigned_ues() != total {
        return Err(Error::config(
            "interference covariance needs matching err_covs, powers, and signature assignment",
        ));
    }
    let m = err_covs[0].nrows();
    let n = signatures.len();
    let dim = m * n;
    let mut z = CMat::identity(dim, dim).scale(sigma2);
    for (vidx, ues) in signatures.ues_by_vector().iter().enumerate() {
        if ues.is_empty() {
            continue;
        }
        let mut csum = CMat::zeros(m, m);
        for &t in ues {
            csum += err_covs[t].scale(powers[t]);
        }
        let u = signatures.vector(vidx);
        for n1 in 0..n {
            for n2 in 0..n {
                let f = u[n1] * u[n2].conj();
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                let mut block = z.view_mut((n1 * m, n2 * m), (m, m));
                for i in 0..m {
                    for j in 0..m {
                        block[(i, j)] += f * csum[(i, j)];
                    }
                }
            }
        }
    }
    Ok(z)
}

/// M-dimensional interference covariance of the orthogonal fast path for
/// one signature coset: `Zbar = sum_t p_t C_t + (sigma^2 / N) I_M`, where
/// `t` ranges over the UEs sharing the signature.
pub fn coset_interference_covariance(
    err_covs: &[&CMat],
    powers: &[f64],
    sigma2: f64,
    n: usize,
) -> Result<CMat> {
    if err_covs.is_empty() || powers.len() != err_covs.len() || n == 0 {
        return Err(Error::config(
            "coset covariance needs matching err_covs and powers and N >= 1",
        ));
    }
    let m = err_covs[0].nrows();
    let mut z = CMat::identity(m, m).scale(sigma2 / n as f64);
    for (c, &p) in err_covs.iter().zip(powers.iter()) {
        z += c.scale(p);
    }
    Ok(z)
}

/// Guard for the orthogonal fast paths: the book must be an orthogonal
/// kind *and* numerically orthogonal. Returns a contract-violation error
/// otherwise.
pub fn require_orthogonal(signatures: &SignatureSet) -> Result<()> {
    if signatures.kind() != SignatureKind::Orthogonal
        || !signatures.is_mutually_orthogonal(1e-12)
    {
        return Err(Error::config(
            "this path requires a mutually orthogonal signature book",
        ));
    }
    Ok(())
}

/// MMSE normal matrix `A = sum_t p_t g_hat_t g_hat_t^H + Z`, stored with
/// its Cholesky factor. One factorization serves every UE's combiner and
/// SINR at this BS.
pub struct MmseSolver {
    a: CMat,
    chol: Cholesky<C64, Dyn>,
}

impl MmseSolver {
    pub fn new(g_hat_all: &[CVec], powers: &[f64], z: &CMat) -> Result<Self> {
        if g_hat_all.is_empty() || g_hat_all.len() != powers.len() {
            return Err(Error::config("need matching channel estimates and powers"));
        }
        let dim = z.nrows();
        if z.ncols() != dim || g_hat_all.iter().any(|g| g.len() != dim) {
            return Err(Error::config(format!(
                "estimates and Z must share one dimension, Z is {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        let mut a = z.clone();
        for (g, &p) in g_hat_all.iter().zip(powers.iter()) {
            a.gerc(C64::new(p, 0.0), g, g, C64::new(1.0, 0.0));
        }
        let chol = linalg::chol(a.clone())?;
        Ok(MmseSolver { a, chol })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `A^{-1} x`.
    pub fn solve(&self, x: &CVec) -> CVec {
        self.chol.solve(x)
    }

    /// MMSE combiner for a UE with estimate `g_hat` and power `p` (the
    /// estimate must already be part of the sum inside `A`).
    pub fn combiner(&self, g_hat: &CVec, p: f64) -> Combiner {
        Combiner { v: self.solve(g_hat).scale(p), scheme: CombinerScheme::Mmse }
    }

    /// SINR of the MMSE combiner without forming it: with
    /// `q = p g^H A^{-1} g`, the optimal SINR is `q / (1 - q)`.
    pub fn max_sinr(&self, g_hat: &CVec, p: f64) -> f64 {
        let q = p * g_hat.dotc(&self.solve(g_hat)).re;
        q / (1.0 - q)
    }

    /// `v^H A v`; with MR (`v = g_hat`) this is the full received power at
    /// the combiner output, so the MR SINR denominator is
    /// `v^H A v - p |v^H g|^2`.
    pub fn quad(&self, v: &CVec) -> f64 {
        linalg::quad_form(v, &self.a)
    }
}

/// MR combiner `v = g_hat`.
pub fn mr_combiner(g_hat: &CVec) -> Combiner {
    Combiner { v: g_hat.clone(), scheme: CombinerScheme::Mr }
}

/// One-shot MMSE combiner on the full MN domain:
/// `v = p_target (sum_t p_t g_hat_t g_hat_t^H + Z)^{-1} g_hat_target`.
pub fn n_mmse_combiner(
    g_hat_all: &[CVec],
    powers: &[f64],
    z: &CMat,
    target: usize,
) -> Result<Combiner> {
    if target >= g_hat_all.len() {
        return Err(Error::config(format!("target {target} out of range")));
    }
    let solver = MmseSolver::new(g_hat_all, powers, z)?;
    Ok(solver.combiner(&g_hat_all[target], powers[target]))
}

/// MMSE combiner of the orthogonal fast path, M-dimensional: the inputs
/// are the antenna-domain estimates of the UEs in one signature coset and
/// `Zbar` from [`coset_interference_covariance`]. Produces the same SINR
/// as the MN-domain combiner when the book is orthogonal.
pub fn orthogonal_mmse_combiner(
    h_hat_coset: &[CVec],
    powers: &[f64],
    z_bar: &CMat,
    target: usize,
) -> Result<Combiner> {
    if target >= h_hat_coset.len() {
        return Err(Error::config(format!("target {target} out of range")));
    }
    let solver = MmseSolver::new(h_hat_coset, powers, z_bar)?;
    Ok(solver.combiner(&h_hat_coset[target], powers[target]))
}

/// Downlink precoder from an uplink combiner: `w = v / sqrt(expected_sq_norm)`
/// with `expected_sq_norm = E{||v||^2}`. For MR the expectation is known in
/// closed form ([`mr_expected_sq_norm`]); for MMSE it is estimated from
/// combiner samples (at least 10^4 in the bundled experiments).
pub fn precoder_from_combiner(v: &Combiner, expected_sq_norm: f64) -> Result<Precoder> {
    if !(expected_sq_norm > 0.0) || !expected_sq_norm.is_finite() {
        return Err(Error::domain(format!(
            "precoder normalization needs a positive finite E{{||v||^2}}, got {expected_sq_norm:.3e}"
        )));
    }
    Ok(Precoder { w: v.v.scale(1.0 / expected_sq_norm.sqrt()) })
}

/// `E{||u kron h_hat||^2} = N tr(Phi)`: the exact MR precoder
/// normalization.
pub fn mr_expected_sq_norm(n: usize, phi: &CMat) -> f64 {
    n as f64 * linalg::trace_re(phi)
}
