//! Independent oracle for the uplink combiner: the SINR-optimal receive
//! vector solves a generalized eigenvalue problem whose value is
//! `p g^H B^{-1} g` with `B` the interference-plus-noise covariance
//! (everything except the desired UE's signal). The oracle inverts `B`
//! through LU; the library's solver works with the *total* Gram through
//! Cholesky, so agreement is a genuine cross-check.

use noma_mimo_core::channel::{corr_2d_one_ring, CorrelationMatrix};
use noma_mimo_core::estimation::BsEstimator;
use noma_mimo_core::linalg::{cn01_vec, C64, CMat, CVec};
use noma_mimo_core::signatures::SignatureSet;
use noma_mimo_core::transceive::{
    effective_channel, interference_covariance, mr_combiner, MmseSolver,
};
use noma_mimo_core::se::ul_sinr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    g: Vec<CVec>,
    powers: Vec<f64>,
    z: CMat,
}

fn build_instance(seed: u64, m: usize, n: usize, cells: usize, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = cells * k;
    let corrs: Vec<CorrelationMatrix> = (0..total)
        .map(|_| {
            corr_2d_one_ring(
                m,
                rng.gen_range(0.4..2.5),
                rng.gen_range(-1.2..1.2),
                rng.gen_range(0.03..0.15),
            )
            .unwrap()
        })
        .collect();
    let powers: Vec<f64> = (0..total).map(|_| rng.gen_range(0.3..1.5)).collect();
    let sigma2 = 0.2;
    let pilots = SignatureSet::orthogonal(k).unwrap().assign_cyclic(cells, k).unwrap();
    let est = BsEstimator::new(&pilots, &corrs, &powers, sigma2).unwrap();
    let channels: Vec<CVec> = corrs
        .iter()
        .map(|r| r.sqrt_factor().unwrap().sample(&mut rng))
        .collect();
    let h_hat = est.simulate_and_estimate(&channels, &mut rng).unwrap();
    let signatures = SignatureSet::orthogonal(n).unwrap().assign_cyclic(cells, k).unwrap();
    let err: Vec<CMat> = (0..total).map(|t| est.err_cov(t).clone()).collect();
    let z = interference_covariance(&signatures, &err, &powers, sigma2).unwrap();
    let g: Vec<CVec> = (0..total)
        .map(|t| effective_channel(signatures.signature_of(t), &h_hat[t]))
        .collect();
    Instance { g, powers, z }
}

fn oracle_sinr(inst: &Instance, target: usize) -> f64 {
    let dim = inst.z.nrows();
    let mut b = inst.z.clone();
    for (t, g) in inst.g.iter().enumerate() {
        if t != target {
            b += (g * g.adjoint()).scale(inst.powers[t]);
        }
    }
    let lu = b.lu();
    let sol = lu.solve(&inst.g[target]).expect("B is positive definite");
    let q = inst.g[target].dotc(&sol);
    assert!(q.im.abs() < 1e-9 * q.re.abs().max(1e-30), "quadratic form must be real");
    assert_eq!(sol.len(), dim);
    inst.powers[target] * q.re
}

#[test]
fn mmse_sinr_matches_generalized_eigenvalue_oracle() {
    for seed in [1u64, 2, 3, 4, 5] {
        let inst = build_instance(seed, 3, 2, 2, 2);
        let solver = MmseSolver::new(&inst.g, &inst.powers, &inst.z).unwrap();
        for target in 0..inst.g.len() {
            let want = oracle_sinr(&inst, target);
            let got = solver.max_sinr(&inst.g[target], inst.powers[target]);
            let rel = (got - want).abs() / want.max(1e-30);
            assert!(
                rel < 1e-10,
                "seed {seed} target {target}: solver {got:.12e} vs oracle {want:.12e}"
            );
            // the returned combiner achieves the optimum
            let v = solver.combiner(&inst.g[target], inst.powers[target]);
            let achieved = ul_sinr(&v.v, &inst.g, &inst.powers, target, &inst.z);
            let rel2 = (achieved - want).abs() / want.max(1e-30);
            assert!(rel2 < 1e-10, "combiner does not achieve the optimum: {rel2:.3e}");
        }
    }
}

#[test]
fn no_combiner_beats_the_oracle() {
    let inst = build_instance(77, 4, 2, 1, 3);
    let solver = MmseSolver::new(&inst.g, &inst.powers, &inst.z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for target in 0..inst.g.len() {
        let best = oracle_sinr(&inst, target);
        let opt = solver.combiner(&inst.g[target], inst.powers[target]);
        for _ in 0..20 {
            // random perturbations around the optimum and random directions
            let noise = cn01_vec(&mut rng, inst.z.nrows());
            for scale in [0.01, 0.3, 1.0] {
                let v = &opt.v + noise.scale(scale * opt.v.norm());
                let s = ul_sinr(&v, &inst.g, &inst.powers, target, &inst.z);
                assert!(
                    s <= best * (1.0 + 1e-9),
                    "perturbed combiner exceeded the optimum: {s} > {best}"
                );
            }
        }
        // matched filtering is admissible, hence not better
        let mr = mr_combiner(&inst.g[target]);
        let s_mr = ul_sinr(&mr.v, &inst.g, &inst.powers, target, &inst.z);
        assert!(s_mr <= best * (1.0 + 1e-9));
    }
}

#[test]
fn sinr_is_scale_invariant_in_the_combiner() {
    let inst = build_instance(5, 3, 2, 1, 2);
    let target = 1;
    let v = mr_combiner(&inst.g[target]);
    let s1 = ul_sinr(&v.v, &inst.g, &inst.powers, target, &inst.z);
    let scaled = v.v.scale(3.7) * C64::new(0.2, -1.3);
    let s2 = ul_sinr(&scaled, &inst.g, &inst.powers, target, &inst.z);
    assert!((s1 - s2).abs() < 1e-10 * s1, "SINR must not depend on combiner scaling");
}
