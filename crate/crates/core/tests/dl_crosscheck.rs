//! Monte Carlo validation of the downlink matched-filter closed form:
//! simulate pilot estimation and precoding over many fading realizations,
//! feed the hardening-bound moment accumulator, and require agreement
//! with the deterministic closed form within the Monte Carlo confidence
//! interval. Also checks the precoder normalization `E{||w||^2} = 1`.

// index loops mirror the flat cell/UE indexing used across parallel arrays
#![allow(clippy::needless_range_loop)]

use noma_mimo_core::channel::{corr_2d_one_ring, ChannelFactor, CorrelationMatrix};
use noma_mimo_core::estimation::BsEstimator;
use noma_mimo_core::linalg::CVec;
use noma_mimo_core::netconfig::NetworkConfig;
use noma_mimo_core::se::{dl_mr_closed_form, dl_se_hardening, DlMoments};
use noma_mimo_core::signatures::SignatureSet;
use noma_mimo_core::transceive::{mr_combiner, mr_expected_sq_norm, precoder_from_combiner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Net {
    config: NetworkConfig,
    corr: Vec<Vec<CorrelationMatrix>>,
    factors: Vec<Vec<ChannelFactor>>,
    estimators: Vec<BsEstimator>,
    signatures: SignatureSet,
}

fn build_net(seed: u64) -> Net {
    let cells = 2;
    let k = 2;
    let m = 4;
    let n = 2;
    let total = cells * k;
    let mut config = NetworkConfig::urban_macro(cells, k, m, n).with_tau_p(k);
    config.p_ul.iter_mut().for_each(|p| *p = 1.0);
    config.rho_dl.iter_mut().for_each(|p| *p = 1.0);
    config.sigma2_ul = 0.1;
    config.sigma2_dl = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corr: Vec<Vec<CorrelationMatrix>> = (0..cells)
        .map(|_| {
            (0..total)
                .map(|_| {
                    corr_2d_one_ring(
                        m,
                        rng.gen_range(0.4..2.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.04..0.12),
                    )
                    .unwrap()
                })
                .collect()
        })
        .collect();
    let factors = corr
        .iter()
        .map(|row| row.iter().map(|r| r.sqrt_factor().unwrap()).collect())
        .collect();
    let pilots = SignatureSet::orthogonal(k).unwrap().assign_cyclic(cells, k).unwrap();
    let estimators = (0..cells)
        .map(|l| BsEstimator::new(&pilots, &corr[l], &config.p_ul, config.sigma2_ul).unwrap())
        .collect();
    let signatures = SignatureSet::orthogonal(n).unwrap().assign_cyclic(cells, k).unwrap();
    Net { config, corr, factors, estimators, signatures }
}

/// One Monte Carlo batch of matched-filter precoding moments, in the fast
/// (despread, M-dimensional) convention scaled back to the MN domain.
fn mc_batch(net: &Net, trials: usize, seed: u64) -> DlMoments {
    let cells = net.config.cells;
    let k = net.config.ues_per_cell;
    let total = cells * k;
    let nf = net.config.spreading as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mom = DlMoments::new(total);
    for _ in 0..trials {
        mom.begin_trial();
        // channels of every UE at every BS, then per-BS estimates
        let h: Vec<Vec<CVec>> = (0..cells)
            .map(|l| (0..total).map(|t| net.factors[l][t].sample(&mut rng)).collect())
            .collect();
        for l in 0..cells {
            let hats = net.estimators[l].simulate_and_estimate(&h[l], &mut rng).unwrap();
            for i in 0..k {
                let owner = l * k + i;
                let vbar = mr_combiner(&hats[owner]);
                mom.add_signal(owner, vbar.v.dotc(&h[l][owner]) * nf);
                mom.add_norm(owner, vbar.v.norm_squared() * nf);
                for victim in net.signatures.co_signature_index(owner, true) {
                    let c = vbar.v.dotc(&h[l][victim]).norm_sqr();
                    mom.add_cross(owner, victim, c * nf * nf);
                }
            }
        }
    }
    mom
}

#[test]
fn dl_closed_form_agrees_with_monte_carlo() {
    let net = build_net(2026);
    let closed = dl_mr_closed_form(&net.config, &net.signatures, &net.estimators).unwrap();
    let batches: Vec<DlMoments> =
        (0..8).map(|b| mc_batch(&net, 2500, 1000 + b as u64)).collect();
    let mc = dl_se_hardening(&net.config, &batches, 10_000).unwrap();
    assert_eq!(mc.trials, 20_000);
    for t in 0..net.config.total_ues() {
        let tol = (3.0 * mc.ci_halfwidth[t]).max(0.015 * closed.se[t]);
        let diff = (mc.se[t] - closed.se[t]).abs();
        assert!(
            diff <= tol,
            "UE {t}: MC SE {:.6} vs closed form {:.6} (diff {diff:.2e}, tol {tol:.2e})",
            mc.se[t],
            closed.se[t]
        );
    }
}

#[test]
fn precoder_norm_is_unit_in_expectation() {
    let net = build_net(7);
    let l = 0usize;
    let owner = 1usize; // UE 1 of cell 0
    let phi = net.estimators[l].phi(owner);
    let expected = mr_expected_sq_norm(net.config.spreading, phi);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let trials = 20_000;
    let mut acc = 0.0;
    for _ in 0..trials {
        let h: Vec<CVec> = (0..net.config.total_ues())
            .map(|t| net.factors[l][t].sample(&mut rng))
            .collect();
        let hats = net.estimators[l].simulate_and_estimate(&h, &mut rng).unwrap();
        let w = precoder_from_combiner(&mr_combiner(&hats[owner]), expected).unwrap();
        // in the MN domain the precoder is (u kron w_bar), so its squared
        // norm is N times the despread one
        acc += w.w.norm_squared() * net.config.spreading as f64;
    }
    acc /= trials as f64;
    assert!(
        (acc - 1.0).abs() < 0.03,
        "expected unit average precoder energy, got {acc:.4}"
    );
}

#[test]
fn hardening_refuses_starved_accumulators() {
    let net = build_net(3);
    let batches = vec![mc_batch(&net, 50, 9)];
    assert!(dl_se_hardening(&net.config, &batches, 1000).is_err());
    // single batch above the minimum: point estimate fine, CI undefined
    let batches = vec![mc_batch(&net, 60, 9)];
    let r = dl_se_hardening(&net.config, &batches, 50).unwrap();
    assert!(r.ci_halfwidth.iter().all(|c| c.is_nan()));
    assert!(r.se.iter().all(|s| s.is_finite() && *s >= 0.0));
}

#[test]
fn corr_matrices_expose_consistent_betas() {
    // tr(R) = M beta must survive the one-ring construction end to end
    let net = build_net(5);
    for row in &net.corr {
        for r in row {
            let tr: f64 = (0..r.dim()).map(|i| r.matrix()[(i, i)].re).sum();
            assert!((tr - r.dim() as f64 * r.beta()).abs() < 1e-9 * tr.abs());
        }
    }
}
