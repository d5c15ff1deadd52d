//! Monte Carlo execution: trials, batching, aggregation, and the
//! closed-form case-study evaluator.
//!
//! Determinism: a drop's trials are split into [`BATCHES`] fixed
//! contiguous chunks, each driven by its own seeded RNG; chunk results are
//! merged in chunk order. The split never depends on the worker pool, so
//! the output is byte-identical for any `--threads` value.
//!
//! Common random numbers: within a trial, every scheme sees the same true
//! channels and the same pilot-phase estimates; schemes draw nothing
//! during trials (their setup randomness is consumed once per drop in
//! [`crate::network::build_drop`]). Scheme comparisons are therefore
//! paired, which sharpens ordering tests at fixed trial counts.

use noma_mimo_core::se::{self, DlMoments, SeResult};
use noma_mimo_core::transceive::MmseSolver;
use noma_mimo_core::{CVec, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{CasePlan, CaseSchemeSpec, Combine, MontePlan, PointPlan};
use crate::network::{DropContext, EvalPath, build_drop};
use crate::seeds::{fnv1a, sub_seed};

/// Fixed number of RNG batches per drop (the determinism unit, and the
/// parallelism grain).
pub const BATCHES: usize = 10;

/// Raw per-drop output: one uplink SINR sample per (label, UE, trial) and
/// per-batch downlink moment accumulators (empty batches dropped).
pub struct DropResult {
    pub ul_samples: Vec<Vec<Vec<f64>>>,
    pub dl_batches: Vec<Vec<DlMoments>>,
}

struct BatchOut {
    ul: Vec<Vec<Vec<f64>>>,
    dl: Vec<DlMoments>,
}

impl BatchOut {
    fn new(labels: usize, total_ues: usize) -> Self {
        BatchOut {
            ul: vec![vec![Vec::new(); total_ues]; labels],
            dl: vec![DlMoments::new(total_ues); labels],
        }
    }
}

/// Runs every trial of one drop and returns the raw samples.
pub fn run_drop(
    ctx: &DropContext,
    trials_ul: usize,
    trials_dl: usize,
    measure_dl: bool,
    drop_seed: u64,
) -> Result<DropResult> {
    let total_trials = trials_ul.max(if measure_dl { trials_dl } else { 0 });
    let total_ues = ctx.config.total_ues();
    let labels = ctx.labels.len();

    let base = total_trials / BATCHES;
    let rem = total_trials % BATCHES;
    let bounds: Vec<(usize, usize)> = (0..BATCHES)
        .scan(0usize, |start, b| {
            let len = base + usize::from(b < rem);
            let s = *start;
            *start += len;
            Some((s, s + len))
        })
        .collect();

    let batch_results: Vec<Result<BatchOut>> = bounds
        .par_iter()
        .enumerate()
        .map(|(b, &(start, end))| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(sub_seed(drop_seed, fnv1a("batch"), b as u64));
            let mut out = BatchOut::new(labels, total_ues);
            for trial in start..end {
                let want_ul = trial < trials_ul;
                let want_dl = measure_dl && trial < trials_dl;
                run_trial(ctx, &mut rng, want_ul, want_dl, &mut out)?;
            }
            Ok(out)
        })
        .collect();

    let mut ul_samples = vec![vec![Vec::new(); total_ues]; labels];
    let mut dl_batches = vec![Vec::new(); labels];
    for br in batch_results {
        let br = br?;
        for li in 0..labels {
            for (dst, src) in ul_samples[li].iter_mut().zip(&br.ul[li]) {
                dst.extend_from_slice(src);
            }
            if br.dl[li].trials() > 0 {
                dl_batches[li].push(br.dl[li].clone());
            }
        }
    }
    Ok(DropResult { ul_samples, dl_batches })
}

/// One channel realization: draw channels and estimates once, then walk
/// every scheme pipeline.
fn run_trial(
    ctx: &DropContext,
    rng: &mut ChaCha8Rng,
    want_ul: bool,
    want_dl: bool,
    out: &mut BatchOut,
) -> Result<()> {
    let config = &ctx.config;
    let cells = config.cells;
    let k = config.ues_per_cell;
    let total = config.total_ues();

    let mut h: Vec<Vec<CVec>> = Vec::with_capacity(cells);
    for frow in &ctx.factors {
        h.push(frow.iter().map(|f| f.sample(rng)).collect());
    }
    let mut hat: Vec<Vec<CVec>> = Vec::with_capacity(cells);
    for (est, hb) in ctx.estimators.iter().zip(&h) {
        hat.push(est.simulate_and_estimate(hb, rng)?);
    }

    if want_dl {
        for mom in out.dl.iter_mut() {
            mom.begin_trial();
        }
    }

    for (si, scheme) in ctx.schemes.iter().enumerate() {
        let combs: Vec<(Combine, usize)> = ctx
            .labels
            .iter()
            .enumerate()
            .filter(|(_, lp)| lp.scheme_idx == si)
            .map(|(li, lp)| (lp.combine, li))
            .collect();
        let nf = scheme.n as f64;

        match &scheme.path {
            EvalPath::Fast { cosets, zbar } => {
                for bs in 0..cells {
                    let own = bs * k..(bs + 1) * k;
                    for (vi, members) in cosets.iter().enumerate() {
                        if !members.iter().any(|t| own.contains(t)) {
                            continue;
                        }
                        let ghat: Vec<CVec> =
                            members.iter().map(|&t| hat[bs][t].clone()).collect();
                        let powers: Vec<f64> =
                            members.iter().map(|&t| config.p_ul[t]).collect();
                        let z = zbar[bs][vi]
                            .as_ref()
                            .ok_or_else(|| Error::config("missing coset covariance"))?;
                        let solver = MmseSolver::new(&ghat, &powers, z)?;
                        for &t in members.iter().filter(|t| own.contains(t)) {
                            let p_t = config.p_ul[t];
                            for &(comb, li) in &combs {
                                eval_target(
                                    &solver,
                                    comb,
                                    &hat[bs][t],
                                    p_t,
                                    want_ul,
                                    want_dl,
                                    t,
                                    li,
                                    out,
                                    |vbar, mom| {
                                        mom.add_signal(t, vbar.dotc(&h[bs][t]) * nf);
                                        mom.add_norm(t, vbar.norm_squared() * nf);
                                        for &tv in members {
                                            mom.add_cross(
                                                t,
                                                tv,
                                                vbar.dotc(&h[bs][tv]).norm_sqr() * nf * nf,
                                            );
                                        }
                                    },
                                );
                            }
                        }
                    }
                }
            }
            EvalPath::Full { z } => {
                for bs in 0..cells {
                    let ghat: Vec<CVec> = (0..total)
                        .map(|t| {
                            noma_mimo_core::transceive::effective_channel(
                                scheme.signatures.signature_of(t),
                                &hat[bs][t],
                            )
                        })
                        .collect();
                    let solver = MmseSolver::new(&ghat, &config.p_ul, &z[bs])?;
                    let gtrue: Option<Vec<CVec>> = want_dl.then(|| {
                        (0..total)
                            .map(|t| {
                                noma_mimo_core::transceive::effective_channel(
                                    scheme.signatures.signature_of(t),
                                    &h[bs][t],
                                )
                            })
                            .collect()
                    });
                    for t in bs * k..(bs + 1) * k {
                        let p_t = config.p_ul[t];
                        for &(comb, li) in &combs {
                            eval_target(
                                &solver,
                                comb,
                                &ghat[t],
                                p_t,
                                want_ul,
                                want_dl,
                                t,
                                li,
                                out,
                                |v, mom| {
                                    let g = gtrue.as_ref().expect("true effective channels");
                                    mom.add_signal(t, v.dotc(&g[t]));
                                    mom.add_norm(t, v.norm_squared());
                                    for (tv, gv) in g.iter().enumerate() {
                                        mom.add_cross(t, tv, v.dotc(gv).norm_sqr());
                                    }
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Evaluates one (target, combiner) pair against a prepared solver:
/// records the uplink SINR and feeds the downlink moment closure with the
/// combiner direction. The closure owns the MN-convention scaling.
#[allow(clippy::too_many_arguments)]
fn eval_target(
    solver: &MmseSolver,
    comb: Combine,
    g_hat: &CVec,
    p_t: f64,
    want_ul: bool,
    want_dl: bool,
    t: usize,
    li: usize,
    out: &mut BatchOut,
    dl_accumulate: impl Fn(&CVec, &mut DlMoments),
) {
    match comb {
        Combine::Mmse => {
            let x = solver.solve(g_hat);
            if want_ul {
                let q = p_t * g_hat.dotc(&x).re;
                out.ul[li][t].push(q / (1.0 - q));
            }
            if want_dl {
                dl_accumulate(&x.scale(p_t), &mut out.dl[li]);
            }
        }
        Combine::Mr => {
            if want_ul {
                let quad = solver.quad(g_hat);
                out.ul[li][t].push(se::ul_sinr_via_total(g_hat, g_hat, p_t, quad));
            }
            if want_dl {
                dl_accumulate(g_hat, &mut out.dl[li]);
            }
        }
    }
}

/// Per-UE aggregate over drops for one (label, direction).
#[derive(Debug, Clone)]
pub struct AggRow {
    pub se: f64,
    pub sinr_mean: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
}

/// One label's results at one sweep point. `per_drop_*` keep the per-drop
/// spectral efficiencies so callers can form drop-level statistics of any
/// derived quantity (per-cell sums, scheme gaps) without re-running.
pub struct LabelOutcome {
    pub label: String,
    pub n: usize,
    pub ul_rows: Vec<AggRow>,
    pub dl_rows: Option<Vec<AggRow>>,
    pub per_drop_ul: Vec<SeResult>,
    pub per_drop_dl: Vec<SeResult>,
}

pub struct PointOutcome {
    pub scenario_id: String,
    pub m: usize,
    pub k: usize,
    pub cells: usize,
    pub labels: Vec<LabelOutcome>,
}

fn aggregate(per_drop: &[SeResult]) -> Vec<AggRow> {
    let drops = per_drop.len();
    let total = per_drop[0].se.len();
    let trials: usize = per_drop.iter().map(|r| r.trials).sum();
    (0..total)
        .map(|t| {
            let ses: Vec<f64> = per_drop.iter().map(|r| r.se[t]).collect();
            let se = noma_mimo_core::linalg::pairwise_mean(&ses);
            let sinr_mean = noma_mimo_core::linalg::pairwise_mean(
                &per_drop.iter().map(|r| r.sinr_mean[t]).collect::<Vec<_>>(),
            );
            let ci = if drops >= 2 {
                1.96 * noma_mimo_core::linalg::sample_std(&ses) / (drops as f64).sqrt()
            } else {
                per_drop[0].ci_halfwidth[t]
            };
            AggRow { se, sinr_mean, ci_halfwidth: ci, trials }
        })
        .collect()
}

/// Stream key for a point's placement and trial randomness: exactly the
/// parameters that shape UE placement. Sweep points that differ only in
/// other axes (N, M, tau_p, signature kind) share placements — and, where
/// dimensions allow, channel draws — so cross-point comparisons are
/// paired. Editing the sweep list or renaming the run never shifts
/// another point's samples.
fn point_stream_key(point: &PointPlan) -> String {
    use noma_mimo_core::netconfig::DropKind;
    let c = &point.config;
    let drop = match point.scenario.drop {
        DropKind::UniformCell => "uniform".to_string(),
        DropKind::SectorArc { half_angle, distance } => format!("arc:{half_angle}:{distance}"),
        DropKind::SectorFilled { half_angle, radius } => format!("filled:{half_angle}:{radius}"),
        DropKind::Clusters { clusters, radius } => format!("clusters:{clusters}:{radius}"),
    };
    format!("cells={},k={},side={},drop={drop}", c.cells, c.ues_per_cell, c.cell_side)
}

/// Runs one sweep point of `plan`: all drops, all schemes.
pub fn run_point(point: &PointPlan, plan: &MontePlan) -> Result<PointOutcome> {
    let point_seed = sub_seed(plan.seed, fnv1a(&point_stream_key(point)), 0);
    let drops = plan.drops;
    let n_labels = point.schemes.len();
    let mut per_drop_ul: Vec<Vec<SeResult>> = vec![Vec::with_capacity(drops); n_labels];
    let mut per_drop_dl: Vec<Vec<SeResult>> = vec![Vec::with_capacity(drops); n_labels];
    let mut label_meta: Option<Vec<(String, usize)>> = None;

    for drop_idx in 0..drops {
        let drop_seed = sub_seed(point_seed, fnv1a("drop"), drop_idx as u64);
        let ctx = build_drop(point, plan.grouping_subspace_dim, drop_seed)?;
        if label_meta.is_none() {
            label_meta = Some(
                ctx.labels
                    .iter()
                    .map(|lp| (lp.label.clone(), ctx.schemes[lp.scheme_idx].n))
                    .collect(),
            );
        }
        let dr = run_drop(&ctx, plan.trials_ul, plan.trials_dl, plan.measure_dl, drop_seed)?;
        for (li, lp) in ctx.labels.iter().enumerate() {
            let scheme_config = &ctx.schemes[lp.scheme_idx].config;
            per_drop_ul[li].push(se::ul_se(scheme_config, &dr.ul_samples[li])?);
            if plan.measure_dl {
                per_drop_dl[li].push(se::dl_se_hardening(
                    scheme_config,
                    &dr.dl_batches[li],
                    plan.min_dl_trials,
                )?);
            }
        }
    }

    let metas = label_meta.expect("at least one drop");
    let labels = metas
        .into_iter()
        .enumerate()
        .map(|(li, (label, n))| {
            let dl_rows =
                if plan.measure_dl { Some(aggregate(&per_drop_dl[li])) } else { None };
            LabelOutcome {
                label,
                n,
                ul_rows: aggregate(&per_drop_ul[li]),
                dl_rows,
                per_drop_ul: std::mem::take(&mut per_drop_ul[li]),
                per_drop_dl: std::mem::take(&mut per_drop_dl[li]),
            }
        })
        .collect();

    Ok(PointOutcome {
        scenario_id: point.scenario_id.clone(),
        m: point.config.antennas,
        k: point.config.ues_per_cell,
        cells: point.config.cells,
        labels,
    })
}

/// Runs every point of a Monte Carlo plan, reporting per-point wall time
/// through `progress`.
pub fn run_monte(
    plan: &MontePlan,
    mut progress: impl FnMut(&str, f64),
) -> Result<Vec<PointOutcome>> {
    let mut out = Vec::with_capacity(plan.points.len());
    for point in &plan.points {
        let t0 = std::time::Instant::now();
        let po = run_point(point, plan)?;
        progress(&point.scenario_id, t0.elapsed().as_secs_f64());
        out.push(po);
    }
    Ok(out)
}

/// One case-study result row.
pub struct CaseRow {
    pub scenario_id: String,
    pub label: &'static str,
    pub n: usize,
    pub se: f64,
    /// Effective SINR implied by the SE through `2^(N se) - 1`; exact for
    /// the deterministic signature pairs, an effective (log-domain
    /// average) value for the random ±1 expectation.
    pub sinr: f64,
}

/// Evaluates the closed-form two-user case study over the azimuth sweep.
pub fn run_case(plan: &CasePlan) -> Result<Vec<CaseRow>> {
    use noma_mimo_core::se::{CasePair, CaseScheme, case_study_se};
    let mut rows = Vec::with_capacity(plan.phi2_deg.len() * plan.schemes.len());
    for &deg in &plan.phi2_deg {
        let phi2 = deg.to_radians();
        for &scheme in &plan.schemes {
            let (n, pair, cs) = match scheme {
                CaseSchemeSpec::MmimoMr => (1, CasePair::Shared, CaseScheme::Mr),
                CaseSchemeSpec::MmimoMmse => (1, CasePair::Shared, CaseScheme::Mmse),
                // MR and MMSE coincide for orthogonal signatures (zero
                // collision level), so one row covers both.
                CaseSchemeSpec::NomaOrth => (plan.spreading, CasePair::Orthogonal, CaseScheme::Mr),
                CaseSchemeSpec::NomaPm1Mr => (plan.spreading, CasePair::RandomPm1, CaseScheme::Mr),
                CaseSchemeSpec::NomaPm1Mmse => {
                    (plan.spreading, CasePair::RandomPm1, CaseScheme::Mmse)
                }
            };
            let se = case_study_se(plan.antennas, n, plan.snr, plan.phi1, phi2, &pair, cs)?;
            rows.push(CaseRow {
                scenario_id: format!("{}:angle-deg={deg}", plan.scenario_id),
                label: scheme.label(),
                n,
                se,
                sinr: (n as f64 * se).exp2() - 1.0,
            });
        }
    }
    Ok(rows)
}

/// Serving-BS correlation matrices of the first drop of the first point,
/// for the standalone `group` verb: `(flat_ue, matrix)` pairs.
pub fn corr_dump(
    plan: &MontePlan,
) -> Result<Vec<(usize, noma_mimo_core::channel::CorrelationMatrix)>> {
    let point = plan
        .points
        .first()
        .ok_or_else(|| Error::config("plan has no sweep points"))?;
    let point_seed = sub_seed(plan.seed, fnv1a(&point.scenario_id), 0);
    let drop_seed = sub_seed(point_seed, fnv1a("drop"), 0);
    let ctx = build_drop(point, plan.grouping_subspace_dim, drop_seed)?;
    let k = point.config.ues_per_cell;
    let mut out = Vec::with_capacity(point.config.total_ues());
    for t in 0..point.config.total_ues() {
        out.push((t, ctx.corr[t / k][t].clone()));
    }
    Ok(out)
}
