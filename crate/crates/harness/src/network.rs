//! Per-drop simulation context: one UE placement realized into correlation
//! matrices, channel factors, per-BS estimators, and per-scheme signature
//! books with their interference covariances.
//!
//! Everything here is computed once per drop and shared read-only by the
//! Monte Carlo trial workers. All schemes in a run see the same drop, the
//! same pilot books, and (inside a trial) the same channels and estimates;
//! they differ only in spreading signatures and combining.

use noma_mimo_core::channel::{ChannelFactor, CorrelationMatrix, corr_for_link};
use noma_mimo_core::estimation::BsEstimator;
use noma_mimo_core::grouping::balanced_group;
use noma_mimo_core::netconfig::{NetworkConfig, large_scale_fading};
use noma_mimo_core::signatures::SignatureSet;
use noma_mimo_core::transceive::{coset_interference_covariance, interference_covariance};
use noma_mimo_core::{CMat, CVec, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{BookPlan, Combine, PointPlan};
use crate::seeds::{fnv1a, sub_seed};

/// How a scheme's SINRs are evaluated.
pub enum EvalPath {
    /// The distinct signature vectors in use are mutually orthogonal
    /// (orthogonal books, but also sparse single-tap books, whose distinct
    /// taps never overlap): the MN-dimensional problem decouples exactly
    /// into one M-dimensional solve per signature coset per BS.
    /// `zbar[bs][coset]` is present for every non-empty coset.
    Fast { cosets: Vec<Vec<usize>>, zbar: Vec<Vec<Option<CMat>>> },
    /// General book: full MN-dimensional solve with `z[bs]`.
    Full { z: Vec<CMat> },
}

/// One signature pipeline (book + assignment) shared by every combiner
/// that requested it.
pub struct SchemeRuntime {
    pub book: BookPlan,
    pub signatures: SignatureSet,
    /// Signature length of this scheme (1 for mMIMO).
    pub n: usize,
    /// Point config with `spreading` set to this scheme's N, so prelogs
    /// and downlink noise bookkeeping are per-scheme.
    pub config: NetworkConfig,
    pub path: EvalPath,
}

/// One output label: a (pipeline, combiner) pair in the order the spec
/// listed its schemes.
pub struct LabelPlan {
    /// Canonical scheme label without direction prefix, e.g.
    /// `noma-mmse-grouped`.
    pub label: String,
    pub scheme_idx: usize,
    pub combine: Combine,
}

pub struct DropContext {
    /// Point configuration (NOMA spreading length).
    pub config: NetworkConfig,
    /// `corr[bs][t]`: correlation of UE `t`'s channel at BS `bs`.
    pub corr: Vec<Vec<CorrelationMatrix>>,
    /// Sampling factors matching `corr`.
    pub factors: Vec<Vec<ChannelFactor>>,
    /// Per-BS channel estimators over all network UEs (scheme-independent:
    /// pilots are a separate resource from spreading signatures).
    pub estimators: Vec<BsEstimator>,
    pub schemes: Vec<SchemeRuntime>,
    pub labels: Vec<LabelPlan>,
}

/// Builds the full per-drop context. `drop_seed` must be unique per
/// (point, drop) pair; every internal draw (placement, shadow fading,
/// random books, grouping starts, random assignment) uses a named
/// sub-stream of it, so adding or removing schemes never shifts the
/// placement, and each book's draws are independent of the scheme list
/// order.
pub fn build_drop(point: &PointPlan, subspace_dim: usize, drop_seed: u64) -> Result<DropContext> {
    let config = &point.config;
    let cells = config.cells;
    let k = config.ues_per_cell;
    let total = config.total_ues();
    let m = config.antennas;

    let drop = noma_mimo_core::netconfig::drop_ues(
        config,
        &point.scenario,
        sub_seed(drop_seed, fnv1a("placement"), 0),
    )?;

    let mut corr: Vec<Vec<CorrelationMatrix>> = Vec::with_capacity(cells);
    let mut factors: Vec<Vec<ChannelFactor>> = Vec::with_capacity(cells);
    for bs in 0..cells {
        let mut row = Vec::with_capacity(total);
        let mut frow = Vec::with_capacity(total);
        for l in 0..cells {
            for kk in 0..k {
                let link = drop.link(bs, l, kk);
                let beta = large_scale_fading(link)?;
                let r = corr_for_link(config.array, m, beta, link)?;
                frow.push(r.sqrt_factor()?);
                row.push(r);
            }
        }
        corr.push(row);
        factors.push(frow);
    }

    let pilots = SignatureSet::orthogonal(config.tau_p)?.assign_cyclic(cells, k)?;
    let mut estimators = Vec::with_capacity(cells);
    for corr_row in &corr {
        estimators.push(BsEstimator::new(&pilots, corr_row, &config.p_ul, config.sigma2_ul)?);
    }

    // One runtime per distinct book plan, in first-appearance order.
    let mut schemes: Vec<SchemeRuntime> = Vec::new();
    let mut labels: Vec<LabelPlan> = Vec::with_capacity(point.schemes.len());
    for rs in &point.schemes {
        let scheme_idx = match schemes.iter().position(|s| s.book == rs.book) {
            Some(i) => i,
            None => {
                schemes.push(build_scheme(
                    rs.book,
                    point,
                    &corr,
                    &estimators,
                    subspace_dim,
                    drop_seed,
                )?);
                schemes.len() - 1
            }
        };
        labels.push(LabelPlan { label: rs.label.clone(), scheme_idx, combine: rs.combine });
    }

    Ok(DropContext { config: config.clone(), corr, factors, estimators, schemes, labels })
}

fn build_scheme(
    book: BookPlan,
    point: &PointPlan,
    corr: &[Vec<CorrelationMatrix>],
    estimators: &[BsEstimator],
    subspace_dim: usize,
    drop_seed: u64,
) -> Result<SchemeRuntime> {
    let config = &point.config;
    let cells = config.cells;
    let k = config.ues_per_cell;
    let total = config.total_ues();
    let n = match book {
        BookPlan::Mmimo => 1,
        _ => config.spreading,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(drop_seed, fnv1a(book.stream_key()), 0));

    let signatures = match book {
        BookPlan::Mmimo => SignatureSet::orthogonal(1)?.assign_cyclic(cells, k)?,
        BookPlan::OrthGrouped => {
            // Balanced eigenspace grouping per cell, from the serving BS's
            // view of its own UEs; group members (spatially similar UEs)
            // get the N distinct vectors, groups reuse the book.
            let mut groups: Vec<Vec<usize>> = Vec::with_capacity(cells * (k / n));
            for l in 0..cells {
                let own = &corr[l][l * k..(l + 1) * k];
                let assignment = balanced_group(own, k / n, subspace_dim, &mut rng, 100)?;
                for g in assignment.groups {
                    groups.push(g.into_iter().map(|t| l * k + t).collect());
                }
            }
            SignatureSet::orthogonal(n)?.assign_grouped(&groups, total)?
        }
        BookPlan::OrthRandom => SignatureSet::orthogonal(n)?.assign_random(total, &mut rng)?,
        BookPlan::Pm1 => SignatureSet::random_pm1(n, total, &mut rng)?.assign_identity(total)?,
        BookPlan::Sparse => SignatureSet::sparse(n, total, &mut rng)?.assign_identity(total)?,
    };

    let mut scheme_config = config.clone();
    scheme_config.spreading = n;

    let path = if let Some(cosets) = orthogonal_cosets(&signatures, total) {
        let mut zbar = Vec::with_capacity(cells);
        for est in estimators.iter() {
            let mut per_vec = Vec::with_capacity(cosets.len());
            for members in &cosets {
                if members.is_empty() {
                    per_vec.push(None);
                    continue;
                }
                let covs: Vec<&CMat> = members.iter().map(|&t| est.err_cov(t)).collect();
                let powers: Vec<f64> = members.iter().map(|&t| config.p_ul[t]).collect();
                per_vec.push(Some(coset_interference_covariance(
                    &covs,
                    &powers,
                    config.sigma2_ul,
                    n,
                )?));
            }
            zbar.push(per_vec);
        }
        EvalPath::Fast { cosets, zbar }
    } else {
        let mut z = Vec::with_capacity(cells);
        for est in estimators.iter() {
            let covs: Vec<CMat> = (0..total).map(|t| est.err_cov(t).clone()).collect();
            z.push(interference_covariance(
                &signatures,
                &covs,
                &config.p_ul,
                config.sigma2_ul,
            )?);
        }
        EvalPath::Full { z }
    };

    Ok(SchemeRuntime { book, signatures, n, config: scheme_config, path })
}

/// Groups UEs by identical signature value and returns the cosets when
/// every pair of distinct values is orthogonal (the condition under which
/// the per-coset M-dimensional reduction is exact). Returns `None` for
/// genuinely non-orthogonal books, which need the full MN-dimensional
/// treatment.
fn orthogonal_cosets(signatures: &SignatureSet, total: usize) -> Option<Vec<Vec<usize>>> {
    let n = signatures.len() as f64;
    let mut reps: Vec<&CVec> = Vec::new();
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for t in 0..total {
        let u = signatures.signature_of(t);
        match reps.iter().position(|r| *r == u) {
            Some(i) => cosets[i].push(t),
            None => {
                reps.push(u);
                cosets.push(vec![t]);
            }
        }
    }
    let orthogonal = reps
        .iter()
        .enumerate()
        .all(|(i, a)| reps[i + 1..].iter().all(|b| a.dotc(b).norm() <= 1e-12 * n));
    orthogonal.then_some(cosets)
}
