//! Independent oracle for the channel estimator: stack every UE channel
//! into one Gaussian vector `x`, write the pilot observation as the linear
//! model `vec(Y) = A x + n`, and condition the joint Gaussian directly
//! (LU-based, no shared code with the estimator). Both estimator routes
//! must reproduce the conditional mean and its covariance.

// index loops mirror the flat UE indexing used across parallel arrays
#![allow(clippy::needless_range_loop)]

use noma_mimo_core::channel::{corr_2d_one_ring, CorrelationMatrix};
use noma_mimo_core::estimation::{simulate_pilot_observation, BsEstimator};
use noma_mimo_core::linalg::{C64, CMat, CVec};
use noma_mimo_core::signatures::SignatureSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_corrs(m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<CorrelationMatrix> {
    (0..count)
        .map(|_| {
            corr_2d_one_ring(
                m,
                rng.gen_range(0.3..3.0),
                rng.gen_range(-1.2..1.2),
                rng.gen_range(0.02..0.2),
            )
            .unwrap()
        })
        .collect()
}

/// Conditional mean and per-UE estimate covariances of the joint Gaussian
/// model, from first principles.
struct JointGaussianOracle {
    /// `x_hat = gain * y` with `gain = Sigma_x A^H C^{-1}` (TM x M tau_p)
    gain: CMat,
    /// `Phi = gain C gain^H` diagonal blocks (M x M each)
    phi: Vec<CMat>,
    m: usize,
}

impl JointGaussianOracle {
    fn build(
        pilots: &SignatureSet,
        corrs: &[CorrelationMatrix],
        powers: &[f64],
        sigma2: f64,
    ) -> Self {
        let m = corrs[0].dim();
        let tau_p = pilots.len();
        let total = corrs.len();
        let obs_dim = m * tau_p;
        // A: columns t-block = sqrt(p_t) (phi_t kron I_M)
        let mut a = CMat::zeros(obs_dim, total * m);
        for t in 0..total {
            let phi = pilots.signature_of(t);
            for c in 0..tau_p {
                for i in 0..m {
                    a[(c * m + i, t * m + i)] = phi[c] * powers[t].sqrt();
                }
            }
        }
        // Sigma_x = blkdiag(R_t)
        let mut sx = CMat::zeros(total * m, total * m);
        for t in 0..total {
            sx.view_mut((t * m, t * m), (m, m)).copy_from(corrs[t].matrix());
        }
        let c = &a * &sx * a.adjoint() + CMat::identity(obs_dim, obs_dim).scale(sigma2);
        let lu = c.clone().lu();
        // gain^H = C^{-1} A Sigma_x  (solve column-wise through LU)
        let asx = &a * &sx;
        let gain_h = lu.solve(&asx).expect("observation Gram is invertible");
        let gain: CMat = gain_h.adjoint();
        let phi_full = &gain * &c * gain.adjoint();
        let phi = (0..total)
            .map(|t| phi_full.view((t * m, t * m), (m, m)).into_owned())
            .collect();
        JointGaussianOracle { gain, phi, m }
    }

    fn estimate(&self, yvec: &CVec, t: usize) -> CVec {
        let full = &self.gain * yvec;
        full.rows(t * self.m, self.m).into_owned()
    }
}

fn vec_of(y: &CMat) -> CVec {
    CVec::from_column_slice(y.as_slice())
}

fn run_route_comparison(pilots: SignatureSet, seed: u64, expect_route: &str) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 3;
    let total = pilots.assigned_ues();
    let corrs = random_corrs(m, total, &mut rng);
    let powers: Vec<f64> = (0..total).map(|_| rng.gen_range(0.2..2.0)).collect();
    let sigma2 = 0.15;
    let est = BsEstimator::new(&pilots, &corrs, &powers, sigma2).unwrap();
    assert_eq!(est.route_name(), expect_route);
    let oracle = JointGaussianOracle::build(&pilots, &corrs, &powers, sigma2);
    // second-order statistics
    for t in 0..total {
        let diff = (est.phi(t) - &oracle.phi[t]).norm();
        let scale = oracle.phi[t].norm().max(1e-30);
        assert!(
            diff <= 1e-9 * scale,
            "phi mismatch for UE {t} on {expect_route} route: {diff:.3e} vs scale {scale:.3e}"
        );
    }
    // conditional means on simulated observations
    for _ in 0..5 {
        let channels: Vec<CVec> = corrs
            .iter()
            .map(|r| {
                let f = r.sqrt_factor().unwrap();
                f.sample(&mut rng)
            })
            .collect();
        let obs =
            simulate_pilot_observation(&channels, &pilots, &powers, sigma2, &mut rng).unwrap();
        let got = est.estimate_all(&obs).unwrap();
        let yvec = vec_of(&obs.y);
        for t in 0..total {
            let want = oracle.estimate(&yvec, t);
            let diff = (&got[t] - &want).norm();
            assert!(
                diff <= 1e-9 * want.norm().max(1e-30),
                "estimate mismatch for UE {t} on {expect_route} route: {diff:.3e}"
            );
        }
    }
}

#[test]
fn general_route_matches_joint_gaussian_conditioning() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // odd length: the inner product of two +-1 vectors is a sum of an odd
    // number of +-1 terms, so the book can never be mutually orthogonal
    // and the estimator is forced onto the general route
    let pilots = SignatureSet::random_pm1(5, 3, &mut rng).unwrap();
    run_route_comparison(pilots, 7, "general");
}

#[test]
fn classical_route_matches_joint_gaussian_conditioning() {
    // orthogonal pilot vectors reused across two cells: tau_p = 2, 4 UEs
    let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(2, 2).unwrap();
    run_route_comparison(pilots, 8, "classical");
}

#[test]
fn sparse_pilots_route_general_and_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pilots = SignatureSet::sparse(4, 5, &mut rng).unwrap();
    // sparse single-tone pilots may collide on a tone; route is general
    // unless they happen to be mutually orthogonal. Either way the oracle
    // must agree, so derive the expectation from the set itself.
    let expect = if pilots.is_mutually_orthogonal(1e-12) { "classical" } else { "general" };
    run_route_comparison(pilots, 12, expect);
}

#[test]
fn orthogonality_principle_holds_empirically() {
    // E{(h - h_hat) h_hat^H} = 0: the estimation error is uncorrelated
    // with the estimate. Checked by Monte Carlo on the classical route.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = 4;
    let pilots = SignatureSet::orthogonal(2).unwrap().assign_cyclic(1, 4).unwrap();
    let corrs = random_corrs(m, 4, &mut rng);
    let powers = vec![1.0, 0.7, 1.3, 0.4];
    let sigma2 = 0.2;
    let est = BsEstimator::new(&pilots, &corrs, &powers, sigma2).unwrap();
    let factors: Vec<_> = corrs.iter().map(|r| r.sqrt_factor().unwrap()).collect();
    let trials = 20_000;
    let mut cross = vec![CMat::zeros(m, m); 4];
    let mut second = vec![CMat::zeros(m, m); 4];
    for _ in 0..trials {
        let channels: Vec<CVec> = factors.iter().map(|f| f.sample(&mut rng)).collect();
        let hats = est.simulate_and_estimate(&channels, &mut rng).unwrap();
        for t in 0..4 {
            let err = &channels[t] - &hats[t];
            cross[t] += &err * hats[t].adjoint();
            second[t] += &hats[t] * hats[t].adjoint();
        }
    }
    for t in 0..4 {
        cross[t] /= C64::new(trials as f64, 0.0);
        second[t] /= C64::new(trials as f64, 0.0);
        let scale = est.phi(t).norm();
        assert!(
            cross[t].norm() < 0.05 * scale,
            "UE {t}: error-estimate correlation {:.3e} vs scale {scale:.3e}",
            cross[t].norm()
        );
        let drift = (&second[t] - est.phi(t)).norm();
        assert!(
            drift < 0.05 * scale,
            "UE {t}: empirical estimate covariance off by {drift:.3e} (scale {scale:.3e})"
        );
    }
}

#[test]
fn estimator_is_deterministic_given_seed() {
    let pilots = SignatureSet::orthogonal(4).unwrap().assign_identity(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let corrs = random_corrs(3, 4, &mut rng);
    let powers = vec![1.0; 4];
    let est = BsEstimator::new(&pilots, &corrs, &powers, 0.1).unwrap();
    let sample = |seed: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let channels: Vec<CVec> = corrs
            .iter()
            .map(|c| c.sqrt_factor().unwrap().sample(&mut r))
            .collect();
        est.simulate_and_estimate(&channels, &mut r).unwrap()
    };
    let a = sample(99);
    let b = sample(99);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x, y, "same seed must give bit-identical estimates");
    }
}
