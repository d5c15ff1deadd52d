//! MMSE channel estimation from uplink pilots.
//!
//! The pilot phase sends, per UE, a `tau_p`-length pilot vector scaled by
//! the UE's transmit amplitude; the BS observes the `M x tau_p` matrix
//! `Y = sum_t sqrt(p_t) h_t phi_t^T + noise`. Estimation is linear MMSE on
//! `vec(Y)` with the per-link one-ring statistics as prior.
//!
//! Two routes produce identical estimates when both apply:
//!
//! - **general**: works for arbitrary pilot vectors; inverts the full
//!   `M tau_p x M tau_p` Gram `Q = sum_t p_t (phi phi^H) kron R + s2 I`.
//!   Cost grows with `(M tau_p)^3`; intended for small studies and as
//!   the reference in equivalence tests.
//! - **classical**: applies when the distinct pilot *vectors* are mutually
//!   orthogonal (vector reuse across UEs is fine). The observation is
//!   despread per pilot group (`y_b = Y phi_b^*`) and only `M x M` Grams
//!   `Qbar_b = sum_{t in b} p_t tau_p R_t + sigma^2 I` are inverted.
//!
//! [`BsEstimator::new`] picks the route automatically; the forced
//! constructors exist for tests and diagnostics.

use nalgebra::{Cholesky, Dyn};
use rand::Rng;

use crate::channel::CorrelationMatrix;
use crate::linalg::{self, C64, CMat, CVec};
use crate::signatures::SignatureSet;
use crate::{Error, Result};

/// Raw pilot-phase observation at one BS: `M x tau_p`.
#[derive(Debug, Clone)]
pub struct PilotObservation {
    pub y: CMat,
}

/// MMSE estimate of one UE's channel at one BS, with its second-order
/// statistics: `phi = E{h_hat h_hat^H}` and the error covariance
/// `err_cov = R - phi` (estimate and error are uncorrelated).
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub h_hat: CVec,
    pub phi: CMat,
    pub err_cov: CMat,
}

enum Route {
    Classical {
        /// flat UE -> pilot-group slot in `groups`
        group_of: Vec<usize>,
        /// pilot vector index per group
        groups: Vec<usize>,
    },
    General {
        /// `W_t = sqrt(p_t) (phi_t^H kron R_t) Q^{-1}`, `M x M tau_p`
        w: Vec<CMat>,
    },
}

/// Precomputed MMSE estimator for every network UE as seen by one BS.
/// Construction is per drop (it depends only on statistics); estimation per
/// trial is a matrix-vector product per UE.
pub struct BsEstimator {
    m: usize,
    tau_p: usize,
    route: Route,
    pilots: SignatureSet,
    /// `W_t` for the classical route (`sqrt(p_t) R_t Qbar^{-1}`, M x M);
    /// unused on the general route (its W lives in `Route::General`).
    w_classical: Vec<CMat>,
    phi: Vec<CMat>,
    err: Vec<CMat>,
    corr: Vec<CMat>,
    powers: Vec<f64>,
    sigma2: f64,
    cond_hint: f64,
}

impl BsEstimator {
    /// Builds the estimator, choosing the classical route when the distinct
    /// pilot vectors are mutually orthogonal and the general route
    /// otherwise.
    pub fn new(
        pilots: &SignatureSet,
        corr: &[CorrelationMatrix],
        powers: &[f64],
        sigma2: f64,
    ) -> Result<Self> {
        if pilots.is_mutually_orthogonal(1e-12) {
            Self::new_classical(pilots, corr, powers, sigma2)
        } else {
            Self::new_general(pilots, corr, powers, sigma2)
        }
    }

    /// Forces the despread per-group route; errors if the distinct pilot
    /// vectors are not mutually orthogonal.
    pub fn new_classical(
        pilots: &SignatureSet,
        corr: &[CorrelationMatrix],
        powers: &[f64],
        sigma2: f64,
    ) -> Result<Self> {
        check_inputs(pilots, corr, powers, sigma2)?;
        if !pilots.is_mutually_orthogonal(1e-12) {
            return Err(Error::config(
                "classical estimation requires mutually orthogonal pilot vectors",
            ));
        }
        let m = corr[0].dim();
        let tau_p = pilots.len();
        let total = corr.len();
        let by_vector = pilots.ues_by_vector();
        let used: Vec<usize> = (0..by_vector.len()).filter(|&v| !by_vector[v].is_empty()).collect();
        let mut group_of = vec![usize::MAX; total];
        let mut qbar = Vec::with_capacity(used.len());
        let mut cond_hint = 1.0f64;
        for (slot, &v) in used.iter().enumerate() {
            let mut q = CMat::identity(m, m).scale(sigma2);
            for &t in &by_vector[v] {
                group_of[t] = slot;
                q += corr[t].matrix().scale(powers[t] * tau_p as f64);
            }
            let f = linalg::chol(q)?;
            cond_hint = cond_hint.max(chol_condition_hint(&f));
            qbar.push(f);
        }
        let mut w_classical = Vec::with_capacity(total);
        let mut phi = Vec::with_capacity(total);
        let mut err = Vec::with_capacity(total);
        for t in 0..total {
            let r = corr[t].matrix();
            // W = sqrt(p) R Qbar^{-1} = sqrt(p) (Qbar^{-1} R)^H
            let x = qbar[group_of[t]].solve(r);
            let w = x.adjoint().scale(powers[t].sqrt());
            // Phi = p tau_p R Qbar^{-1} R = sqrt(p) tau_p W R
            let p = linalg::hermitize(&(&w * r).scale(powers[t].sqrt() * tau_p as f64));
            let e = linalg::hermitize(&(r - &p));
            w_classical.push(w);
            phi.push(p);
            err.push(e);
        }
        Ok(BsEstimator {
            m,
            tau_p,
            route: Route::Classical {
                group_of,
                groups: used,
            },
            pilots: pilots.clone(),
            w_classical,
            phi,
            err,
            corr: corr.iter().map(|c| c.matrix().clone()).collect(),
            powers: powers.to_vec(),
            sigma2,
            cond_hint,
        })
    }

    /// Forces the full `M tau_p` route; valid for any pilot vectors.
    pub fn new_general(
        pilots: &SignatureSet,
        corr: &[CorrelationMatrix],
        powers: &[f64],
        sigma2: f64,
    ) -> Result<Self> {
        check_inputs(pilots, corr, powers, sigma2)?;
        let m = corr[0].dim();
        let tau_p = pilots.len();
        let total = corr.len();
        let q = build_q(pilots, corr, powers, sigma2)?;
        let f = linalg::chol(q)?;
        let cond_hint = chol_condition_hint(&f);
        let mut w = Vec::with_capacity(total);
        let mut phi = Vec::with_capacity(total);
        let mut err = Vec::with_capacity(total);
        for t in 0..total {
            let r = corr[t].matrix();
            let u = pilots.signature_of(t);
            let ukr = u.kronecker(r); // (M tau_p) x M
            // W = sqrt(p) (u^H kron R) Q^{-1} = sqrt(p) (Q^{-1} (u kron R))^H
            let wt = f.solve(&ukr).adjoint().scale(powers[t].sqrt());
            let p = linalg::hermitize(&(&wt * &ukr).scale(powers[t].sqrt()));
            let e = linalg::hermitize(&(r - &p));
            w.push(wt);
            phi.push(p);
            err.push(e);
        }
        Ok(BsEstimator {
            m,
            tau_p,
            route: Route::General { w },
            pilots: pilots.clone(),
            w_classical: Vec::new(),
            phi,
            err,
            corr: corr.iter().map(|c| c.matrix().clone()).collect(),
            powers: powers.to_vec(),
            sigma2,
            cond_hint,
        })
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn tau_p(&self) -> usize {
        self.tau_p
    }

    pub fn total_ues(&self) -> usize {
        self.corr.len()
    }

    pub fn route_name(&self) -> &'static str {
        match self.route {
            Route::Classical { .. } => "classical",
            Route::General { .. } => "general",
        }
    }

    /// Pilot-vector index of every UE, in flat UE order.
    pub fn pilot_assignment(&self) -> &[usize] {
        self.pilots.assignment()
    }

    /// Crude condition estimate of the inverted Gram(s), from the squared
    /// ratio of extreme Cholesky diagonal entries. Values above 1e12 mean
    /// the estimates are numerically fragile; computation proceeds, and
    /// callers that care should warn. See [`BsEstimator::is_ill_conditioned`].
    pub fn condition_hint(&self) -> f64 {
        self.cond_hint
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.cond_hint > 1e12
    }

    /// `E{h_hat h_hat^H}` of UE `t` at this BS.
    pub fn phi(&self, t: usize) -> &CMat {
        &self.phi[t]
    }

    /// Estimation-error covariance `C_t = R_t - Phi_t`.
    pub fn err_cov(&self, t: usize) -> &CMat {
        &self.err[t]
    }

    pub fn corr(&self, t: usize) -> &CMat {
        &self.corr[t]
    }

    pub fn power(&self, t: usize) -> f64 {
        self.powers[t]
    }

    pub fn noise_power(&self) -> f64 {
        self.sigma2
    }

    /// MMSE estimates for every UE from one pilot observation.
    pub fn estimate_all(&self, obs: &PilotObservation) -> Result<Vec<CVec>> {
        if obs.y.nrows() != self.m || obs.y.ncols() != self.tau_p {
            return Err(Error::config(format!(
                "pilot observation must be {} x {}, got {} x {}",
                self.m,
                self.tau_p,
                obs.y.nrows(),
                obs.y.ncols()
            )));
        }
        match &self.route {
            Route::Classical { group_of, groups, .. } => {
                let despread: Vec<CVec> = groups
                    .iter()
                    .map(|&v| &obs.y * pilot_conj(self.pilots.vector(v)))
                    .collect();
                Ok((0..self.total_ues())
                    .map(|t| &self.w_classical[t] * &despread[group_of[t]])
                    .collect())
            }
            Route::General { w } => {
                let yv = CVec::from_column_slice(obs.y.as_slice());
                Ok(w.iter().map(|wt| wt * &yv).collect())
            }
        }
    }

    /// Estimate for a single UE.
    pub fn estimate(&self, obs: &PilotObservation, t: usize) -> Result<CVec> {
        match &self.route {
            Route::Classical { group_of, groups, .. } => {
                if obs.y.nrows() != self.m || obs.y.ncols() != self.tau_p {
                    return Err(Error::config("pilot observation has wrong shape"));
                }
                let v = groups[group_of[t]];
                let y = &obs.y * pilot_conj(self.pilots.vector(v));
                Ok(&self.w_classical[t] * y)
            }
            Route::General { w } => {
                let yv = CVec::from_column_slice(obs.y.as_slice());
                Ok(&w[t] * yv)
            }
        }
    }

    /// Simulates the pilot phase and estimates in one step, given the true
    /// channels of every UE at this BS. Statistically identical to
    /// [`simulate_pilot_observation`] followed by [`BsEstimator::estimate_all`],
    /// but the classical route skips forming `Y` and draws the despread
    /// noise directly (`M` noise draws per pilot group instead of
    /// `M tau_p`).
    pub fn simulate_and_estimate<R: Rng + ?Sized>(
        &self,
        channels: &[CVec],
        rng: &mut R,
    ) -> Result<Vec<CVec>> {
        if channels.len() != self.total_ues() {
            return Err(Error::config(format!(
                "need one channel per UE: got {}, expected {}",
                channels.len(),
                self.total_ues()
            )));
        }
        match &self.route {
            Route::Classical { group_of, groups, .. } => {
                let noise_amp = (self.sigma2 * self.tau_p as f64).sqrt();
                let by_vector = self.pilots.ues_by_vector();
                let despread: Vec<CVec> = groups
                    .iter()
                    .map(|&v| {
                        let mut y = linalg::cn01_vec(rng, self.m).scale(noise_amp);
                        for &t in &by_vector[v] {
                            y += channels[t].scale(self.tau_p as f64 * self.powers[t].sqrt());
                        }
                        y
                    })
                    .collect();
                Ok((0..self.total_ues())
                    .map(|t| &self.w_classical[t] * &despread[group_of[t]])
                    .collect())
            }
            Route::General { .. } => {
                let obs =
                    simulate_pilot_observation(channels, &self.pilots, &self.powers, self.sigma2, rng)?;
                self.estimate_all(&obs)
            }
        }
    }

    /// `tr(E{h_hat_a h_b^H})` at this BS: the coherent coupling between
    /// UE `a`'s estimate and UE `b`'s true channel. Zero unless the two UEs
    /// share a pilot group (their estimates are then pilot-contaminated).
    pub fn cross_trace(&self, a: usize, b: usize) -> C64 {
        match &self.route {
            Route::Classical { group_of, .. } => {
                if group_of[a] != group_of[b] {
                    return C64::new(0.0, 0.0);
                }
                // D = sqrt(p_a p_b) tau_p R_a Qbar^{-1} R_b = tau_p sqrt(p_b) W_a R_b
                linalg::trace_product(&self.w_classical[a], &self.corr[b])
                    * (self.tau_p as f64 * self.powers[b].sqrt())
            }
            Route::General { w } => {
                let ukr = self.pilots.signature_of(b).kronecker(&self.corr[b]);
                linalg::trace_product(&w[a], &ukr) * self.powers[b].sqrt()
            }
        }
    }
}

fn pilot_conj(v: &CVec) -> CVec {
    v.map(|x| x.conj())
}

fn chol_condition_hint(f: &Cholesky<C64, Dyn>) -> f64 {
    let d = f.l_dirty().diagonal();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for x in d.iter() {
        lo = lo.min(x.re);
        hi = hi.max(x.re);
    }
    if lo <= 0.0 { f64::INFINITY } else { (hi / lo) * (hi / lo) }
}

fn check_inputs(
    pilots: &SignatureSet,
    corr: &[CorrelationMatrix],
    powers: &[f64],
    sigma2: f64,
) -> Result<()> {
    if corr.is_empty() {
        return Err(Error::config("need at least one UE"));
    }
    if powers.len() != corr.len() {
        return Err(Error::config(format!(
            "got {} powers for {} UEs",
            powers.len(),
            corr.len()
        )));
    }
    if pilots.assigned_ues() != corr.len() {
        return Err(Error::config(format!(
            "pilot assignment covers {} UEs, expected {}",
            pilots.assigned_ues(),
            corr.len()
        )));
    }
    if powers.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::domain("pilot powers must be positive"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::domain("noise power must be positive"));
    }
    let m = corr[0].dim();
    if corr.iter().any(|c| c.dim() != m) {
        return Err(Error::config("all correlation matrices must share the antenna count"));
    }
    Ok(())
}

/// The pilot-phase Gram `Q = sum_t p_t (phi_t phi_t^H) kron R_t
/// + sigma^2 I_{M tau_p}` used by the general route.
pub fn build_q(
    pilots: &SignatureSet,
    corr: &[CorrelationMatrix],
    powers: &[f64],
    sigma2: f64,
) -> Result<CMat> {
    check_inputs(pilots, corr, powers, sigma2)?;
    let m = corr[0].dim();
    let tau_p = pilots.len();
    let dim = m * tau_p;
    let mut q = CMat::identity(dim, dim).scale(sigma2);
    for t in 0..corr.len() {
        let u = pilots.signature_of(t);
        let outer = u * u.adjoint();
        q += outer.kronecker(corr[t].matrix()).scale(powers[t]);
    }
    Ok(q)
}

/// One-shot MMSE estimate of UE `target` from a pilot observation,
/// returning the estimate together with `Phi` and the error covariance.
/// Routes exactly like [`BsEstimator::new`].
pub fn mmse_estimate(
    obs: &PilotObservation,
    target: usize,
    pilots: &SignatureSet,
    corr: &[CorrelationMatrix],
    powers: &[f64],
    sigma2: f64,
) -> Result<ChannelEstimate> {
    if target >= corr.len() {
        return Err(Error::config(format!(
            "target UE {target} out of range (total {})",
            corr.len()
        )));
    }
    let est = BsEstimator::new(pilots, corr, powers, sigma2)?;
    Ok(ChannelEstimate {
        h_hat: est.estimate(obs, target)?,
        phi: est.phi(target).clone(),
        err_cov: est.err_cov(target).clone(),
    })
}

/// Error covariance `C = R - Phi`, with a PSD check: the smallest
/// eigenvalue must not drop below `-1e-9 tr(R)/M`.
pub fn error_covariance(r: &CorrelationMatrix, phi: &CMat) -> Result<CMat> {
    if phi.nrows() != r.dim() || phi.ncols() != r.dim() {
        return Err(Error::config("Phi must match R in size"));
    }
    let c = linalg::hermitize(&(r.matrix() - phi));
    let (vals, _) = linalg::eigh_desc(&c);
    let tol = 1e-9 * r.beta();
    let min = vals[vals.len() - 1];
    if min < -tol {
        return Err(Error::numerical(format!(
            "error covariance has eigenvalue {min:.6e} below -1e-9 * beta = {:.6e}",
            -tol
        )));
    }
    Ok(c)
}

/// Simulates the raw pilot observation `Y = sum_t sqrt(p_t) h_t phi_t^T
/// + noise` with i.i.d. CN(0, sigma2) noise entries.
pub fn simulate_pilot_observation<R: Rng + ?Sized>(
    channels: &[CVec],
    pilots: &SignatureSet,
    powers: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<PilotObservation> {
    if channels.is_empty() || channels.len() != powers.len() {
        return Err(Error::config("need matching non-empty channels and powers"));
    }
    if pilots.assigned_ues() != channels.len() {
        return Err(Error::config("pilot assignment must cover every UE"));
    }
    let m = channels[0].len();
    let tau_p = pilots.len();
    let noise_amp = sigma2.sqrt();
    let mut y = CMat::from_fn(m, tau_p, |_, _| linalg::cn01(rng) * noise_amp);
    for (t, h) in channels.iter().enumerate() {
        let u = pilots.signature_of(t);
        let amp = powers[t].sqrt();
        for c in 0..tau_p {
            let scale = u[c] * amp;
            for r in 0..m {
                y[(r, c)] += h[r] * scale;
            }
        }
    }
    Ok(PilotObservation { y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::corr_2d_one_ring;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_corrs(m: usize, n_ues: usize, seed: u64) -> Vec<CorrelationMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n_ues)
            .map(|_| {
                let az: f64 = rng.gen_range(-1.0..1.0);
                let spread: f64 = rng.gen_range(0.02..0.2);
                let beta: f64 = rng.gen_range(0.1..2.0);
                corr_2d_one_ring(m, beta, az, spread).unwrap()
            })
            .collect()
    }

    #[test]
    fn test_routes_agree_on_orthogonal_pilots() {
        let m = 6;
        let n_ues = 5;
        let corr = toy_corrs(m, n_ues, 1);
        let powers = [0.7, 1.0, 1.3, 0.5, 2.0];
        let sigma2 = 0.3;
        // 3 orthogonal pilots reused cyclically across 5 UEs
        let pilots = SignatureSet::orthogonal(3).unwrap().assign_cyclic(1, 5).unwrap();
        let classical = BsEstimator::new_classical(&pilots, &corr, &powers, sigma2).unwrap();
        let general = BsEstimator::new_general(&pilots, &corr, &powers, sigma2).unwrap();
        let auto = BsEstimator::new(&pilots, &corr, &powers, sigma2).unwrap();
        assert_eq!(auto.route_name(), "classical");

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let channels: Vec<CVec> = corr
            .iter()
            .map(|r| crate::channel::sample_channel(r, &mut rng).unwrap())
            .collect();
        let obs = simulate_pilot_observation(&channels, &pilots, &powers, sigma2, &mut rng).unwrap();
        let hc = classical.estimate_all(&obs).unwrap();
        let hg = general.estimate_all(&obs).unwrap();
        for t in 0..n_ues {
            let scale = hc[t].norm().max(1e-12);
            assert!(
                (&hc[t] - &hg[t]).norm() < 1e-10 * scale,
                "estimates disagree for UE {t}"
            );
            let dphi = (classical.phi(t) - general.phi(t)).norm();
            assert!(dphi < 1e-10 * classical.phi(t).norm(), "Phi disagrees for UE {t}");
            let dc = (classical.err_cov(t) - general.err_cov(t)).norm();
            assert!(dc < 1e-10 * corr[t].matrix().norm(), "C disagrees for UE {t}");
        }
    }

    #[test]
    fn test_auto_route_picks_general_for_nonorthogonal() {
        let m = 4;
        let corr = toy_corrs(m, 3, 4);
        let powers = [1.0, 1.0, 1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pilots = SignatureSet::random_pm1(4, 3, &mut rng).unwrap();
        if pilots.is_mutually_orthogonal(1e-12) {
            return; // unlucky draw: all orthogonal, nothing to test
        }
        let auto = BsEstimator::new(&pilots, &corr, &powers, 0.2).unwrap();
        assert_eq!(auto.route_name(), "general");
        assert!(BsEstimator::new_classical(&pilots, &corr, &powers, 0.2).is_err());
    }

    #[test]
    fn test_phi_plus_err_equals_r() {
        let corr = toy_corrs(5, 4, 9);
        let powers = [1.0, 0.5, 0.25, 2.0];
        let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(1, 4).unwrap();
        let est = BsEstimator::new(&pilots, &corr, &powers, 0.1).unwrap();
        for t in 0..4 {
            let sum = est.phi(t) + est.err_cov(t);
            assert!((sum - corr[t].matrix()).norm() < 1e-12 * corr[t].matrix().norm());
            let c = error_covariance(&corr[t], est.phi(t)).unwrap();
            assert!((c - est.err_cov(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn test_estimates_shrink_with_noise() {
        // as sigma2 -> infinity the MMSE estimate collapses toward zero
        let corr = toy_corrs(4, 2, 12);
        let powers = [1.0, 1.0];
        let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let channels: Vec<CVec> = corr
            .iter()
            .map(|r| crate::channel::sample_channel(r, &mut rng).unwrap())
            .collect();
        let obs = simulate_pilot_observation(&channels, &pilots, &powers, 1.0, &mut rng).unwrap();
        let est_lo = BsEstimator::new(&pilots, &corr, &powers, 1e-6).unwrap();
        let est_hi = BsEstimator::new(&pilots, &corr, &powers, 1e6).unwrap();
        let h_lo = est_lo.estimate_all(&obs).unwrap();
        let h_hi = est_hi.estimate_all(&obs).unwrap();
        for t in 0..2 {
            assert!(h_hi[t].norm() < 1e-3 * h_lo[t].norm().max(1e-12));
            assert!(est_hi.phi(t).norm() < 1e-4 * corr[t].matrix().norm());
        }
    }

    #[test]
    fn test_cross_trace_matches_phi_trace_on_self() {
        let corr = toy_corrs(5, 6, 20);
        let powers = [1.0, 0.5, 0.7, 1.1, 0.9, 1.4];
        let pilots = SignatureSet::orthogonal(3).unwrap().assign_cyclic(1, 6).unwrap();
        for est in [
            BsEstimator::new_classical(&pilots, &corr, &powers, 0.2).unwrap(),
            BsEstimator::new_general(&pilots, &corr, &powers, 0.2).unwrap(),
        ] {
            for t in 0..6 {
                let own = est.cross_trace(t, t);
                let tr_phi = linalg::trace_re(est.phi(t));
                assert_relative_eq!(own.re, tr_phi, max_relative = 1e-9);
                assert!(own.im.abs() < 1e-9 * tr_phi.abs().max(1e-12));
            }
            // co-pilot pairs couple, orthogonal-pilot pairs do not
            let coupled = est.cross_trace(0, 3).norm();
            assert!(coupled > 0.0);
            let uncoupled = est.cross_trace(0, 1).norm();
            assert!(uncoupled < 1e-12 * coupled.max(1e-12));
        }
    }

    #[test]
    fn test_build_q_structure() {
        let corr = toy_corrs(3, 4, 30);
        let powers = [1.0, 2.0, 0.5, 0.25];
        let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(1, 4).unwrap();
        let q = build_q(&pilots, &corr, &powers, 0.7).unwrap();
        assert_eq!(q.nrows(), 6);
        assert!(linalg::hermitian_defect(&q) < 1e-12 * q.norm());
        // Q - sigma^2 I must be PSD (sum of PSD Kronecker products)
        let qs = &q - CMat::identity(6, 6).scale(0.7);
        let (vals, _) = linalg::eigh_desc(&qs);
        assert!(vals[vals.len() - 1] > -1e-10 * q.norm());
    }

    #[test]
    fn test_shape_and_input_validation() {
        let corr = toy_corrs(4, 2, 40);
        let powers = [1.0, 1.0];
        let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(1, 2).unwrap();
        let est = BsEstimator::new(&pilots, &corr, &powers, 0.1).unwrap();
        let bad = PilotObservation { y: CMat::zeros(4, 3) };
        assert!(est.estimate_all(&bad).is_err());
        assert!(BsEstimator::new(&pilots, &corr, &[1.0], 0.1).is_err());
        assert!(BsEstimator::new(&pilots, &corr, &powers, 0.0).is_err());
        assert!(BsEstimator::new(&pilots, &corr, &[1.0, -1.0], 0.1).is_err());
    }
}
