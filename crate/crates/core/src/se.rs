//! Spectral-efficiency evaluation: uplink SINR/SE from combiner samples,
//! downlink SE through the channel-hardening bound, matched-filter downlink
//! closed forms, favorable-propagation diagnostics, and the two-user LoS
//! case study.
//!
//! Prelogs account for both the pilot overhead and the spreading: an uplink
//! data symbol occupies N chips, so the SE carries `(1/N) (tau_u / tau_c)`;
//! the downlink analogously carries `(1/N) (tau_d / tau_c)`.

use crate::channel::{los_inner_product, CorrelationMatrix};
use crate::estimation::BsEstimator;
use crate::linalg::{self, C64, CMat, CVec};
use crate::netconfig::NetworkConfig;
use crate::signatures::SignatureSet;
use crate::transceive;
use crate::{Error, Result};

/// Per-UE spectral efficiency (bit/s/Hz), mean SINR, and a 95% half-width
/// for the SE estimate. Closed-form results carry `trials = 0` and zero
/// half-widths; Monte Carlo results report the sampling uncertainty.
#[derive(Debug, Clone)]
pub struct SeResult {
    pub se: Vec<f64>,
    pub sinr_mean: Vec<f64>,
    pub ci_halfwidth: Vec<f64>,
    pub trials: usize,
}

pub fn prelog_ul(config: &NetworkConfig) -> f64 {
    (config.tau_u as f64 / config.tau_c as f64) / config.spreading as f64
}

pub fn prelog_dl(config: &NetworkConfig) -> f64 {
    (config.tau_d as f64 / config.tau_c as f64) / config.spreading as f64
}

/// Instantaneous uplink SINR of combiner `v` for UE `target`:
/// `p_t |v^H g_t|^2 / (sum_{t' != t} p_t' |v^H g_t'|^2 + v^H Z v)`.
pub fn ul_sinr(v: &CVec, g_hat_all: &[CVec], powers: &[f64], target: usize, z: &CMat) -> f64 {
    let num = powers[target] * v.dotc(&g_hat_all[target]).norm_sqr();
    let mut den = linalg::quad_form(v, z);
    for (t, g) in g_hat_all.iter().enumerate() {
        if t != target {
            den += powers[t] * v.dotc(g).norm_sqr();
        }
    }
    num / den
}

/// Uplink SINR given the *total* quadratic form `v^H A v` with
/// `A = sum_t p_t g_t g_t^H + Z`: the denominator is the total minus the
/// desired-signal term. Algebraically identical to [`ul_sinr`]; avoids the
/// per-UE inner products when `A` is already available.
pub fn ul_sinr_via_total(v: &CVec, g_target: &CVec, p_target: f64, total_quad: f64) -> f64 {
    let num = p_target * v.dotc(g_target).norm_sqr();
    num / (total_quad - num)
}

/// Uplink ergodic SE from per-UE SINR samples:
/// `(1/N) (tau_u / tau_c) E{log2(1 + sinr)}`, with a 95% confidence
/// half-width from the sample standard deviation of `log2(1 + sinr)`.
pub fn ul_se(config: &NetworkConfig, sinr_samples: &[Vec<f64>]) -> Result<SeResult> {
    if sinr_samples.len() != config.total_ues() {
        return Err(Error::config(format!(
            "need SINR samples for all {} UEs, got {}",
            config.total_ues(),
            sinr_samples.len()
        )));
    }
    let trials = sinr_samples[0].len();
    if trials == 0 || sinr_samples.iter().any(|s| s.len() != trials) {
        return Err(Error::config("every UE needs the same non-zero trial count"));
    }
    let prelog = prelog_ul(config);
    let mut se = Vec::with_capacity(sinr_samples.len());
    let mut sinr_mean = Vec::with_capacity(sinr_samples.len());
    let mut ci = Vec::with_capacity(sinr_samples.len());
    for samples in sinr_samples {
        if samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::numerical("SINR samples must be finite and non-negative"));
        }
        let rates: Vec<f64> = samples.iter().map(|&g| (1.0 + g).log2()).collect();
        se.push(prelog * linalg::pairwise_mean(&rates));
        sinr_mean.push(linalg::pairwise_mean(samples));
        ci.push(prelog * 1.96 * linalg::sample_std(&rates) / (trials as f64).sqrt());
    }
    Ok(SeResult { se, sinr_mean, ci_halfwidth: ci, trials })
}

/// Accumulator for the downlink hardening bound. Per trial and per
/// *precoding* UE `t` (the owner), callers add, in the MN convention:
///
/// - `add_signal(t, v^H g_t)`: combiner against the owner's own true
///   effective channel at the serving BS;
/// - `add_norm(t, ||v||^2)`;
/// - `add_cross(t, t', |v_t^H g_t'|^2)`: against victim `t'`'s true
///   effective channel *at the owner's BS* (omit pairs that are exactly
///   zero, e.g. different signatures of an orthogonal book).
///
/// The orthogonal fast path works with M-dimensional quantities `vbar`,
/// `h`; the MN-convention values to add are then `N (vbar^H h)`,
/// `N ||vbar||^2`, and `N^2 |vbar^H h|^2` for co-signature pairs.
#[derive(Debug, Clone)]
pub struct DlMoments {
    total: usize,
    sig: Vec<C64>,
    nrm: Vec<f64>,
    cross: Vec<f64>,
    trials: usize,
}

impl DlMoments {
    pub fn new(total_ues: usize) -> Self {
        DlMoments {
            total: total_ues,
            sig: vec![C64::new(0.0, 0.0); total_ues],
            nrm: vec![0.0; total_ues],
            cross: vec![0.0; total_ues * total_ues],
            trials: 0,
        }
    }

    pub fn total_ues(&self) -> usize {
        self.total
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn begin_trial(&mut self) {
        self.trials += 1;
    }

    pub fn add_signal(&mut self, owner: usize, v_dot_g: C64) {
        self.sig[owner] += v_dot_g;
    }

    pub fn add_norm(&mut self, owner: usize, sq_norm: f64) {
        self.nrm[owner] += sq_norm;
    }

    pub fn add_cross(&mut self, owner: usize, victim: usize, sq_abs: f64) {
        self.cross[owner * self.total + victim] += sq_abs;
    }

    pub fn merge(&mut self, other: &DlMoments) {
        assert_eq!(self.total, other.total, "cannot merge moments of different sizes");
        self.trials += other.trials;
        for t in 0..self.total {
            self.sig[t] += other.sig[t];
            self.nrm[t] += other.nrm[t];
        }
        for (a, b) in self.cross.iter_mut().zip(other.cross.iter()) {
            *a += *b;
        }
    }

    fn gamma(&self, config: &NetworkConfig) -> Result<Vec<f64>> {
        let t_inv = 1.0 / self.trials.max(1) as f64;
        let total = self.total;
        // per-owner normalizations
        let mut s_over_q = vec![0.0; total]; // |E{v^H g}|^2 / E{||v||^2}
        for t in 0..total {
            let q = self.nrm[t] * t_inv;
            if q <= 0.0 {
                let has_cross = (0..total).any(|v| self.cross[t * total + v] != 0.0);
                if self.sig[t].norm() != 0.0 || has_cross {
                    return Err(Error::numerical(format!(
                        "owner UE {t} has zero accumulated combiner norm but non-zero couplings"
                    )));
                }
                continue;
            }
            let s = self.sig[t] * t_inv;
            s_over_q[t] = s.norm_sqr() / q;
        }
        let mut gammas = Vec::with_capacity(total);
        for tv in 0..total {
            let signal = config.rho_dl[tv] * s_over_q[tv];
            let mut den = config.sigma2_dl - signal;
            for to in 0..total {
                let q = self.nrm[to] * t_inv;
                if q <= 0.0 {
                    continue;
                }
                den += config.rho_dl[to] * (self.cross[to * total + tv] * t_inv) / q;
            }
            gammas.push(signal / den);
        }
        Ok(gammas)
    }
}

/// Downlink ergodic SE through the hardening bound, from batched moment
/// accumulators. The point estimate pools every batch; the 95% half-width
/// comes from the spread of the per-batch SE estimates (NaN when only one
/// batch is supplied). Refuses to produce results from fewer than
/// `min_trials` pooled trials.
pub fn dl_se_hardening(
    config: &NetworkConfig,
    batches: &[DlMoments],
    min_trials: usize,
) -> Result<SeResult> {
    if batches.is_empty() {
        return Err(Error::config("need at least one moment batch"));
    }
    let total = batches[0].total;
    if total != config.total_ues() {
        return Err(Error::config(format!(
            "moments cover {total} UEs but the network has {}",
            config.total_ues()
        )));
    }
    let mut pooled = batches[0].clone();
    for b in &batches[1..] {
        pooled.merge(b);
    }
    if pooled.trials < min_trials.max(1) {
        return Err(Error::config(format!(
            "downlink hardening needs at least {min_trials} trials, got {}",
            pooled.trials
        )));
    }
    let prelog = prelog_dl(config);
    let gammas = pooled.gamma(config)?;
    let se: Vec<f64> = gammas.iter().map(|&g| prelog * (1.0 + g).log2()).collect();
    let ci = if batches.len() < 2 {
        vec![f64::NAN; total]
    } else {
        let mut per_batch: Vec<Vec<f64>> = Vec::with_capacity(batches.len());
        for b in batches {
            let g = b.gamma(config)?;
            per_batch.push(g.iter().map(|&x| prelog * (1.0 + x).log2()).collect());
        }
        (0..total)
            .map(|t| {
                let xs: Vec<f64> = per_batch.iter().map(|v| v[t]).collect();
                1.96 * linalg::sample_std(&xs) / (xs.len() as f64).sqrt()
            })
            .collect()
    };
    Ok(SeResult { se, sinr_mean: gammas, ci_halfwidth: ci, trials: pooled.trials })
}

/// Downlink SE closed form for matched-filter precoding (`w` proportional
/// to `u kron h_hat`), valid for any signature book. For victim UE `(j,k)`
/// and owner `(l,i)`:
///
/// - signal: `rho_jk N tr(Phi_jk^j)`;
/// - interference from owner `(l,i)`:
///   `rho_li |u_li^H u_jk|^2 (tr(R_jk^l Phi_li^l) + |tr D|^2) / (N tr(Phi_li^l))`
///   where `D = E{h_hat_li (h_jk^l)^H}` is non-zero only for co-pilot
///   pairs (the coherent pilot-contamination term);
/// - the coherent part of the self term cancels against the signal.
///
/// `estimators[l]` must be the serving-BS-`l` estimator over all network
/// UEs; inconsistent pilot bookkeeping across them is an error.
pub fn dl_mr_closed_form(
    config: &NetworkConfig,
    signatures: &SignatureSet,
    estimators: &[BsEstimator],
) -> Result<SeResult> {
    let total = config.total_ues();
    validate_dl_inputs(config, signatures, Some(estimators), total)?;
    let n = config.spreading as f64;
    let k = config.ues_per_cell;
    // |u_a^H u_b|^2 between signature vectors
    let nv = signatures.num_vectors();
    let mut gram2 = vec![0.0; nv * nv];
    for a in 0..nv {
        for b in 0..nv {
            gram2[a * nv + b] = signatures.vector(a).dotc(signatures.vector(b)).norm_sqr();
        }
    }
    let tr_phi: Vec<Vec<f64>> = (0..config.cells)
        .map(|l| (0..total).map(|t| linalg::trace_re(estimators[l].phi(t))).collect())
        .collect();
    let mut se = Vec::with_capacity(total);
    let mut sinr = Vec::with_capacity(total);
    let prelog = prelog_dl(config);
    for tv in 0..total {
        let j = tv / k;
        let num = config.rho_dl[tv] * n * tr_phi[j][tv];
        if !(num > 0.0) {
            return Err(Error::numerical(format!(
                "victim UE {tv} has a degenerate estimate covariance (tr Phi = {})",
                tr_phi[j][tv]
            )));
        }
        let mut den = config.sigma2_dl - num;
        for to in 0..total {
            let l = to / k;
            let g2 =
                gram2[signatures.vector_index_of(to) * nv + signatures.vector_index_of(tv)];
            if g2 == 0.0 {
                continue;
            }
            let est = &estimators[l];
            let noncoh = linalg::trace_product(est.corr(tv), est.phi(to)).re;
            let coh = est.cross_trace(to, tv).norm_sqr();
            den += config.rho_dl[to] * g2 * (noncoh + coh) / (n * tr_phi[l][to]);
        }
        let g = num / den;
        sinr.push(g);
        se.push(prelog * (1.0 + g).log2());
    }
    Ok(SeResult { se, sinr_mean: sinr, ci_halfwidth: vec![0.0; total], trials: 0 })
}

/// Independent downlink matched-filter closed form for the fully
/// orthogonal case (orthogonal signature book *and* orthogonal pilot
/// book), written directly in terms of the per-group pilot Grams
/// `Qbar = sum p tau_p R + sigma_ul^2 I`:
///
/// `gamma_jk = rho_jk tr(Phi_jk) / ( sum_{(l,i) co-signature}
///   rho_li [ tr(R_jk^l Phi_li^l) + co-pilot: p_jk tau_p^2 p_li
///   |tr(R_jk^l Qbar^{-1} R_li^l)|^2 ] / tr(Phi_li^l)
///   - rho_jk tr(Phi_jk) + sigma_dl^2 / N )`
///
/// It shares no code with [`dl_mr_closed_form`] beyond the correlation
/// inputs, serving as its cross-check in the orthogonal regime.
pub fn dl_mr_orth_closed_form(
    config: &NetworkConfig,
    signatures: &SignatureSet,
    pilots: &SignatureSet,
    corr: &[Vec<CorrelationMatrix>],
) -> Result<SeResult> {
    let total = config.total_ues();
    validate_dl_inputs(config, signatures, None, total)?;
    transceive::require_orthogonal(signatures)?;
    if !pilots.is_mutually_orthogonal(1e-12) {
        return Err(Error::config(
            "the orthogonal closed form requires mutually orthogonal pilots",
        ));
    }
    if pilots.assigned_ues() != total || pilots.len() != config.tau_p {
        return Err(Error::config("pilot assignment must cover every UE at length tau_p"));
    }
    if corr.len() != config.cells || corr.iter().any(|c| c.len() != total) {
        return Err(Error::config(
            "need correlation matrices for every (BS, UE) pair: corr[bs][flat_ue]",
        ));
    }
    let k = config.ues_per_cell;
    let tau_p = config.tau_p as f64;
    let by_pilot = pilots.ues_by_vector();
    // per owner (at its serving BS): X = Qbar^{-1} R, Y = R X, tr(Y)
    let mut x_own: Vec<Option<CMat>> = (0..total).map(|_| None).collect();
    let mut y_own: Vec<Option<CMat>> = (0..total).map(|_| None).collect();
    let mut tr_y = vec![0.0; total];
    for l in 0..config.cells {
        let m = config.antennas;
        for members in &by_pilot {
            if members.is_empty() {
                continue;
            }
            let mut q = CMat::identity(m, m).scale(config.sigma2_ul);
            for &t in members {
                q += corr[l][t].matrix().scale(config.p_ul[t] * tau_p);
            }
            let chol = linalg::chol(q)?;
            for &t in members {
                if t / k != l {
                    continue; // only owners served by BS l precode from it
                }
                let r = corr[l][t].matrix();
                let x = chol.solve(r);
                let y = r * &x;
                tr_y[t] = linalg::trace_re(&y);
                x_own[t] = Some(x);
                y_own[t] = Some(y);
            }
        }
    }
    let prelog = prelog_dl(config);
    let mut se = Vec::with_capacity(total);
    let mut sinr = Vec::with_capacity(total);
    for tv in 0..total {
        // tr(Phi) = p tau_p tr(R Qbar^{-1} R)
        let tr_phi_v = config.p_ul[tv] * tau_p * tr_y[tv];
        let num = config.rho_dl[tv] * tr_phi_v;
        if !(num > 0.0) {
            return Err(Error::numerical(format!("degenerate estimate for UE {tv}")));
        }
        let mut den = config.sigma2_dl / config.spreading as f64 - num;
        for to in signatures.co_signature_index(tv, true) {
            let l = to / k;
            let r_v = corr[l][tv].matrix();
            let y = y_own[to].as_ref().expect("owner statistics prepared above");
            let tr_phi_o = config.p_ul[to] * tau_p * tr_y[to];
            let noncoh = config.p_ul[to] * tau_p * linalg::trace_product(r_v, y).re;
            let coh = if pilots.vector_index_of(to) == pilots.vector_index_of(tv) {
                let x = x_own[to].as_ref().expect("owner statistics prepared above");
                let cross = linalg::trace_product(r_v, x);
                config.p_ul[to] * config.p_ul[tv] * tau_p * tau_p * cross.norm_sqr()
            } else {
                0.0
            };
            den += config.rho_dl[to] * (noncoh + coh) / tr_phi_o;
        }
        let g = num / den;
        sinr.push(g);
        se.push(prelog * (1.0 + g).log2());
    }
    Ok(SeResult { se, sinr_mean: sinr, ci_halfwidth: vec![0.0; total], trials: 0 })
}

fn validate_dl_inputs(
    config: &NetworkConfig,
    signatures: &SignatureSet,
    estimators: Option<&[BsEstimator]>,
    total: usize,
) -> Result<()> {
    if signatures.assigned_ues() != total {
        return Err(Error::config(format!(
            "signature assignment covers {} UEs, expected {total}",
            signatures.assigned_ues()
        )));
    }
    if signatures.len() != config.spreading {
        return Err(Error::config(format!(
            "signature length {} does not match configured N = {}",
            signatures.len(),
            config.spreading
        )));
    }
    if let Some(est) = estimators {
        if est.len() != config.cells {
            return Err(Error::config(format!(
                "need one estimator per BS: got {}, expected {}",
                est.len(),
                config.cells
            )));
        }
        for (l, e) in est.iter().enumerate() {
            if e.total_ues() != total || e.antennas() != config.antennas {
                return Err(Error::config(format!(
                    "estimator {l} covers {} UEs x {} antennas, expected {total} x {}",
                    e.total_ues(),
                    e.antennas(),
                    config.antennas
                )));
            }
            if e.pilot_assignment() != est[0].pilot_assignment() {
                return Err(Error::config(
                    "co-pilot bookkeeping differs between BS estimators",
                ));
            }
        }
    }
    Ok(())
}

/// Favorable-propagation variance coefficient between two correlation
/// matrices: `delta = tr(R1 R2) / (M^2 beta1 beta2)`, in `[0, 1]`. The
/// variance of the normalized inner product `h1^H h2 / M` of independent
/// channels is `delta beta1 beta2`; small values mean the directions are
/// nearly statistically orthogonal. Identity covariances give `1/M`;
/// aligned rank-one covariances give 1.
pub fn favorable_variance(r1: &CorrelationMatrix, r2: &CorrelationMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::config(format!(
            "dimension mismatch: {} vs {}",
            r1.dim(),
            r2.dim()
        )));
    }
    let m = r1.dim() as f64;
    let t = linalg::trace_product(r1.matrix(), r2.matrix()).re;
    Ok(t / (m * m * r1.beta() * r2.beta()))
}

/// Receive scheme of the two-user LoS case study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseScheme {
    Mr,
    Mmse,
}

/// Signature relationship between the two case-study UEs.
#[derive(Debug, Clone)]
pub enum CasePair {
    /// Two distinct vectors of an orthogonal book (requires N >= 2).
    Orthogonal,
    /// Both UEs on the same signature; N = 1 recovers classical massive
    /// MIMO without spreading.
    Shared,
    /// Explicit signature pair (each of length N with squared norm N).
    Fixed(CVec, CVec),
    /// Expectation over independent uniform ±1 signatures, evaluated
    /// exactly by enumerating the distribution of the collision level.
    RandomPm1,
}

/// Spectral efficiency of one UE in the two-user LoS case study: M
/// antennas, N-length signatures, per-UE SNR `snr` (linear), UEs at
/// azimuths `phi1`, `phi2`, perfect CSI. With `x = |(1/M) a1^H a2|` and
/// `y = |u1^H u2| / N`:
///
/// - MR:   `sinr = 1 / (x^2 y^2 + 1 / (M N snr))`
/// - MMSE: `sinr = M N snr (1 - x^2 y^2 / (1 + 1 / (M N snr)))`
///
/// and `SE = (1/N) log2(1 + sinr)`.
pub fn case_study_se(
    m: usize,
    n: usize,
    snr: f64,
    phi1: f64,
    phi2: f64,
    pair: &CasePair,
    scheme: CaseScheme,
) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::config("case study needs M >= 1 and N >= 1"));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::domain(format!("SNR must be positive and finite, got {snr}")));
    }
    let x2 = los_inner_product(phi1, phi2, m).norm_sqr();
    let a = (m * n) as f64 * snr;
    let se_of_y2 = |y2: f64| {
        let gamma = match scheme {
            CaseScheme::Mr => 1.0 / (x2 * y2 + 1.0 / a),
            CaseScheme::Mmse => a * (1.0 - x2 * y2 / (1.0 + 1.0 / a)),
        };
        (1.0 + gamma).log2() / n as f64
    };
    match pair {
        CasePair::Orthogonal => {
            if n < 2 {
                return Err(Error::config(
                    "orthogonal signatures need N >= 2; use Shared for N = 1",
                ));
            }
            Ok(se_of_y2(0.0))
        }
        CasePair::Shared => Ok(se_of_y2(1.0)),
        CasePair::Fixed(u1, u2) => {
            for u in [u1, u2] {
                if u.len() != n {
                    return Err(Error::config("fixed signatures must have length N"));
                }
                if (u.norm_squared() - n as f64).abs() > 1e-9 * n as f64 {
                    return Err(Error::config("fixed signatures must have squared norm N"));
                }
            }
            Ok(se_of_y2(u1.dotc(u2).norm_sqr() / (n * n) as f64))
        }
        CasePair::RandomPm1 => {
            // u1^H u2 is a sum of N i.i.d. ±1 terms: P{sum = N - 2k} = C(N, k) / 2^N
            let mut acc = 0.0;
            let mut coeff = 1.0f64;
            let half = 0.5f64.powi(n as i32);
            for k in 0..=n {
                let y = (n as f64 - 2.0 * k as f64) / n as f64;
                acc += coeff * half * se_of_y2(y * y);
                coeff = coeff * (n - k) as f64 / (k + 1) as f64;
            }
            Ok(acc)
        }
    }
}
