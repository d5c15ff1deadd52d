//! Experiment specifications: the TOML-facing types, their validation, and
//! resolution into concrete per-sweep-point run plans.
//!
//! Files use degrees and dBm; everything is converted to radians and watts
//! at this boundary. Validation never stops at the first problem: it
//! collects every violated constraint so a spec file can be fixed in one
//! pass.

use noma_mimo_core::netconfig::{ArrayGeometry, DropKind, NetworkConfig, Scenario, dbm_to_watt};
use serde::{Deserialize, Serialize};

/// Maximum UEs per cell without `--full-scale`, and the hard ceiling with it.
pub const DESK_K_CAP: usize = 64;
pub const FULL_K_CAP: usize = 128;

/// A complete experiment description, deserializable from a TOML file.
/// Every field has a default except `scenario_id`, `sweep`, and `schemes`,
/// which validation requires to be meaningful.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    /// Name of the run; also the results subdirectory.
    pub scenario_id: String,
    /// `monte-carlo` (network simulation) or `case-study` (two-user
    /// closed-form line-of-sight study).
    pub mode: String,
    pub sweep: SweepSpec,
    /// Scheme names. Monte Carlo: `mmimo-{mr,mmse}`,
    /// `noma-{mr,mmse}[-{grouped,random,pm1,sparse}]` (the bare form takes
    /// its signature book from a `kind` sweep, defaulting to
    /// orthogonal+grouped). Case study: `mmimo-{mr,mmse}`, `noma-orth`,
    /// `noma-pm1-{mr,mmse}`.
    pub schemes: Vec<String>,
    pub network: NetworkSpec,
    pub drop: DropSpec,
    pub case: CaseSpec,
    /// Channel realizations per drop entering uplink SINR averages.
    pub trials_ul: usize,
    /// Channel realizations per drop entering downlink hardening moments.
    pub trials_dl: usize,
    /// Refuse downlink results pooled from fewer trials than this.
    pub min_dl_trials: usize,
    /// Independent UE placement realizations per sweep point.
    pub drops: usize,
    /// Evaluate the downlink (hardening bound) in addition to the uplink.
    pub measure_dl: bool,
    /// Eigenspace dimension used by the grouped signature assignment.
    pub grouping_subspace_dim: usize,
    pub seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            scenario_id: String::new(),
            mode: "monte-carlo".into(),
            sweep: SweepSpec::default(),
            schemes: Vec::new(),
            network: NetworkSpec::default(),
            drop: DropSpec::default(),
            case: CaseSpec::default(),
            trials_ul: 500,
            trials_dl: 1000,
            min_dl_trials: 200,
            drops: 10,
            measure_dl: false,
            grouping_subspace_dim: 6,
            seed: 1,
        }
    }
}

/// One swept parameter and its values. `param` is one of `n`, `m`, `k`,
/// `tau-p`, `kind` (Monte Carlo) or `angle-deg` (case study; the second
/// UE's azimuth). `kind` values are strings: `orthogonal`, `pm1`, `sparse`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<SweepValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(i64),
    Float(f64),
    Text(String),
}

/// Network shape and radio parameters; defaults reproduce the urban-macro
/// baseline (250 m cells, 20 dBm per UE, -94 dBm noise, 200-sample blocks,
/// 10 dB shadowing, 2 degree angular spreads).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSpec {
    pub cells: usize,
    pub ues_per_cell: usize,
    pub antennas: usize,
    /// Signature length N for NOMA schemes (mMIMO schemes always run N=1).
    pub spreading: usize,
    /// When set, ties N to the UE count: N = K / divisor at every sweep
    /// point (used by K sweeps that scale the signature length with load).
    pub spreading_k_divisor: Option<usize>,
    /// `linear` (2D one-ring) or `planar` (3D one-ring; M must be square).
    pub array: String,
    pub tau_c: usize,
    /// Pilot budget; defaults to one orthogonal pilot per in-cell UE.
    pub tau_p: Option<usize>,
    pub power_dbm: f64,
    pub noise_dbm: f64,
    pub cell_side_m: f64,
    pub shadow_std_db: f64,
    pub azimuth_spread_deg: f64,
    pub elevation_spread_deg: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec {
            cells: 4,
            ues_per_cell: 16,
            antennas: 64,
            spreading: 4,
            spreading_k_divisor: None,
            array: "linear".into(),
            tau_c: 200,
            tau_p: None,
            power_dbm: 20.0,
            noise_dbm: -94.0,
            cell_side_m: 250.0,
            shadow_std_db: 10.0,
            azimuth_spread_deg: 2.0,
            elevation_spread_deg: 2.0,
        }
    }
}

/// UE placement rule, applied independently in every cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DropSpec {
    /// `uniform`, `sector-arc`, `sector-filled`, or `clusters`.
    pub kind: String,
    pub half_angle_deg: f64,
    pub distance_m: f64,
    pub radius_m: f64,
    pub clusters: usize,
}

impl Default for DropSpec {
    fn default() -> Self {
        DropSpec {
            kind: "uniform".into(),
            half_angle_deg: 15.0,
            distance_m: 100.0,
            radius_m: 20.0,
            clusters: 4,
        }
    }
}

/// Parameters of the two-user line-of-sight case study (closed forms, no
/// Monte Carlo): UE 1 fixed at `phi1_deg`, UE 2 swept via an `angle-deg`
/// sweep, per-UE SNR `snr_db`, perfect CSI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CaseSpec {
    pub antennas: usize,
    pub spreading: usize,
    pub snr_db: f64,
    pub phi1_deg: f64,
}

impl Default for CaseSpec {
    fn default() -> Self {
        CaseSpec { antennas: 64, spreading: 2, snr_db: 0.0, phi1_deg: 30.0 }
    }
}

/// Receive filter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combine {
    Mr,
    Mmse,
}

impl Combine {
    pub fn tag(self) -> &'static str {
        match self {
            Combine::Mr => "mr",
            Combine::Mmse => "mmse",
        }
    }
}

/// How a Monte Carlo scheme obtains its signature book and assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BookPlan {
    /// N = 1, no spreading: classical massive MIMO.
    Mmimo,
    /// Orthogonal book, balanced eigenspace grouping per cell.
    OrthGrouped,
    /// Orthogonal book, uniformly random assignment.
    OrthRandom,
    /// Independent random ±1 signature per UE.
    Pm1,
    /// Independent single-tap sparse signature per UE.
    Sparse,
}

impl BookPlan {
    /// Stable stream name for this book's setup randomness.
    pub fn stream_key(self) -> &'static str {
        match self {
            BookPlan::Mmimo => "mmimo",
            BookPlan::OrthGrouped => "orth-grouped",
            BookPlan::OrthRandom => "orth-random",
            BookPlan::Pm1 => "pm1",
            BookPlan::Sparse => "sparse",
        }
    }

    fn label_suffix(self) -> &'static str {
        match self {
            BookPlan::Mmimo => "",
            BookPlan::OrthGrouped => "-grouped",
            BookPlan::OrthRandom => "-random",
            BookPlan::Pm1 => "-pm1",
            BookPlan::Sparse => "-sparse",
        }
    }
}

/// Signature book kind at one sweep point (the `kind` axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BookKind {
    Orthogonal,
    Pm1,
    Sparse,
}

impl BookKind {
    pub fn name(self) -> &'static str {
        match self {
            BookKind::Orthogonal => "orthogonal",
            BookKind::Pm1 => "pm1",
            BookKind::Sparse => "sparse",
        }
    }
}

/// A parsed Monte Carlo scheme, before the signature-kind sweep value is
/// applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AccessSpec {
    Mmimo,
    /// Bare `noma-<combiner>`: book follows the sweep point's kind
    /// (orthogonal resolves to the grouped assignment).
    Auto,
    Fixed(BookPlan),
}

#[derive(Debug, Clone, Copy)]
pub struct SchemeSpec {
    combine: Combine,
    access: AccessSpec,
}

impl SchemeSpec {
    pub fn parse(name: &str) -> Result<Self, String> {
        let (combine, access) = match name {
            "mmimo-mr" => (Combine::Mr, AccessSpec::Mmimo),
            "mmimo-mmse" => (Combine::Mmse, AccessSpec::Mmimo),
            "noma-mr" => (Combine::Mr, AccessSpec::Auto),
            "noma-mmse" => (Combine::Mmse, AccessSpec::Auto),
            "noma-mr-grouped" => (Combine::Mr, AccessSpec::Fixed(BookPlan::OrthGrouped)),
            "noma-mmse-grouped" => (Combine::Mmse, AccessSpec::Fixed(BookPlan::OrthGrouped)),
            "noma-mr-random" => (Combine::Mr, AccessSpec::Fixed(BookPlan::OrthRandom)),
            "noma-mmse-random" => (Combine::Mmse, AccessSpec::Fixed(BookPlan::OrthRandom)),
            "noma-mr-pm1" => (Combine::Mr, AccessSpec::Fixed(BookPlan::Pm1)),
            "noma-mmse-pm1" => (Combine::Mmse, AccessSpec::Fixed(BookPlan::Pm1)),
            "noma-mr-sparse" => (Combine::Mr, AccessSpec::Fixed(BookPlan::Sparse)),
            "noma-mmse-sparse" => (Combine::Mmse, AccessSpec::Fixed(BookPlan::Sparse)),
            other => {
                return Err(format!(
                    "unknown scheme '{other}' (expected mmimo-{{mr,mmse}} or \
                     noma-{{mr,mmse}}[-{{grouped,random,pm1,sparse}}])"
                ));
            }
        };
        Ok(SchemeSpec { combine, access })
    }

    /// Book plan at a sweep point of the given signature kind.
    fn resolve_book(self, kind: BookKind) -> BookPlan {
        match self.access {
            AccessSpec::Mmimo => BookPlan::Mmimo,
            AccessSpec::Fixed(b) => b,
            AccessSpec::Auto => match kind {
                BookKind::Orthogonal => BookPlan::OrthGrouped,
                BookKind::Pm1 => BookPlan::Pm1,
                BookKind::Sparse => BookPlan::Sparse,
            },
        }
    }
}

/// Case-study scheme. `noma-orth` has no combiner tag because MR and MMSE
/// coincide under orthogonal signatures (zero collision level).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseSchemeSpec {
    MmimoMr,
    MmimoMmse,
    NomaOrth,
    NomaPm1Mr,
    NomaPm1Mmse,
}

impl CaseSchemeSpec {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "mmimo-mr" => Ok(CaseSchemeSpec::MmimoMr),
            "mmimo-mmse" => Ok(CaseSchemeSpec::MmimoMmse),
            "noma-orth" => Ok(CaseSchemeSpec::NomaOrth),
            "noma-pm1-mr" => Ok(CaseSchemeSpec::NomaPm1Mr),
            "noma-pm1-mmse" => Ok(CaseSchemeSpec::NomaPm1Mmse),
            other => Err(format!(
                "unknown case-study scheme '{other}' (expected mmimo-{{mr,mmse}}, \
                 noma-orth, or noma-pm1-{{mr,mmse}})"
            )),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseSchemeSpec::MmimoMr => "mmimo-mr",
            CaseSchemeSpec::MmimoMmse => "mmimo-mmse",
            CaseSchemeSpec::NomaOrth => "noma-orth",
            CaseSchemeSpec::NomaPm1Mr => "noma-pm1-mr",
            CaseSchemeSpec::NomaPm1Mmse => "noma-pm1-mmse",
        }
    }
}

/// A scheme resolved at one sweep point: canonical label plus everything
/// the runner needs to build it.
#[derive(Debug, Clone)]
pub struct ResolvedScheme {
    pub label: String,
    pub combine: Combine,
    pub book: BookPlan,
}

/// One sweep point of a Monte Carlo plan.
#[derive(Debug, Clone)]
pub struct PointPlan {
    /// `<scenario_id>:<param>=<value>`.
    pub scenario_id: String,
    /// Network at this point; `spreading` is the NOMA signature length.
    pub config: NetworkConfig,
    pub scenario: Scenario,
    pub schemes: Vec<ResolvedScheme>,
}

#[derive(Debug, Clone)]
pub struct MontePlan {
    pub scenario_id: String,
    pub points: Vec<PointPlan>,
    pub trials_ul: usize,
    pub trials_dl: usize,
    pub min_dl_trials: usize,
    pub drops: usize,
    pub measure_dl: bool,
    pub grouping_subspace_dim: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CasePlan {
    pub scenario_id: String,
    pub antennas: usize,
    pub spreading: usize,
    pub snr: f64,
    pub phi1: f64,
    pub phi2_deg: Vec<f64>,
    pub schemes: Vec<CaseSchemeSpec>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum RunPlan {
    Monte(MontePlan),
    Case(CasePlan),
}

impl RunPlan {
    pub fn scenario_id(&self) -> &str {
        match self {
            RunPlan::Monte(p) => &p.scenario_id,
            RunPlan::Case(p) => &p.scenario_id,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            RunPlan::Monte(p) => p.seed,
            RunPlan::Case(p) => p.seed,
        }
    }
}

fn id_is_path_safe(id: &str) -> bool {
    !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !id.starts_with('.')
}

fn as_positive_int(v: &SweepValue) -> Option<usize> {
    match *v {
        SweepValue::Int(i) if i >= 1 => Some(i as usize),
        SweepValue::Float(f) if f >= 1.0 && f.fract() == 0.0 => Some(f as usize),
        _ => None,
    }
}

fn as_angle(v: &SweepValue) -> Option<f64> {
    match *v {
        SweepValue::Int(i) => Some(i as f64),
        SweepValue::Float(f) if f.is_finite() => Some(f),
        _ => None,
    }
}

fn as_kind(v: &SweepValue) -> Option<BookKind> {
    match v {
        SweepValue::Text(s) => match s.as_str() {
            "orthogonal" => Some(BookKind::Orthogonal),
            "pm1" => Some(BookKind::Pm1),
            "sparse" => Some(BookKind::Sparse),
            _ => None,
        },
        _ => None,
    }
}

/// The typed sweep axis, produced by validation.
#[derive(Debug, Clone)]
enum Axis {
    N(Vec<usize>),
    M(Vec<usize>),
    K(Vec<usize>),
    TauP(Vec<usize>),
    Kind(Vec<BookKind>),
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("spec parse error: {e}"))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes")
    }

    /// Validates the whole spec and resolves it into a run plan. On
    /// failure returns every violated constraint, one message per entry.
    pub fn resolve(&self, full_scale: bool) -> Result<RunPlan, Vec<String>> {
        match self.mode.as_str() {
            "monte-carlo" => self.resolve_monte(full_scale),
            "case-study" => self.resolve_case(),
            other => Err(vec![format!(
                "mode must be 'monte-carlo' or 'case-study', got '{other}'"
            )]),
        }
    }

    fn common_checks(&self, errs: &mut Vec<String>) {
        if !id_is_path_safe(&self.scenario_id) {
            errs.push(format!(
                "scenario_id '{}' must be non-empty and use only [A-Za-z0-9._-], \
                 not starting with '.'",
                self.scenario_id
            ));
        }
        if self.sweep.values.is_empty() {
            errs.push("sweep.values must be non-empty".into());
        }
        if self.schemes.is_empty() {
            errs.push("schemes must be non-empty".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.schemes {
            if !seen.insert(s.clone()) {
                errs.push(format!("scheme '{s}' is listed more than once"));
            }
        }
    }

    fn resolve_case(&self) -> Result<RunPlan, Vec<String>> {
        let mut errs = Vec::new();
        self.common_checks(&mut errs);
        if self.sweep.param != "angle-deg" {
            errs.push(format!(
                "case-study mode sweeps the second UE's azimuth: sweep.param must be \
                 'angle-deg', got '{}'",
                self.sweep.param
            ));
        }
        let mut phi2 = Vec::with_capacity(self.sweep.values.len());
        for (i, v) in self.sweep.values.iter().enumerate() {
            match as_angle(v) {
                Some(a) if (-90.0..=90.0).contains(&a) => phi2.push(a),
                _ => errs.push(format!(
                    "sweep.values[{i}] must be a finite angle in [-90, 90] degrees"
                )),
            }
        }
        let mut schemes = Vec::with_capacity(self.schemes.len());
        for s in &self.schemes {
            match CaseSchemeSpec::parse(s) {
                Ok(c) => schemes.push(c),
                Err(e) => errs.push(e),
            }
        }
        if self.case.antennas == 0 {
            errs.push("case.antennas must be >= 1".into());
        }
        if self.case.spreading < 2 {
            errs.push(
                "case.spreading must be >= 2 (the orthogonal pair needs two distinct \
                 vectors; mMIMO schemes run N = 1 regardless)"
                    .into(),
            );
        }
        if !self.case.snr_db.is_finite() {
            errs.push("case.snr_db must be finite".into());
        }
        if !(-90.0..=90.0).contains(&self.case.phi1_deg) {
            errs.push("case.phi1_deg must lie in [-90, 90] degrees".into());
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(RunPlan::Case(CasePlan {
            scenario_id: self.scenario_id.clone(),
            antennas: self.case.antennas,
            spreading: self.case.spreading,
            snr: noma_mimo_core::netconfig::db_to_lin(self.case.snr_db),
            phi1: self.case.phi1_deg.to_radians(),
            phi2_deg: phi2,
            schemes,
            seed: self.seed,
        }))
    }

    fn resolve_monte(&self, full_scale: bool) -> Result<RunPlan, Vec<String>> {
        let mut errs = Vec::new();
        self.common_checks(&mut errs);

        let axis = self.parse_axis(&mut errs);

        let mut schemes = Vec::with_capacity(self.schemes.len());
        for s in &self.schemes {
            match SchemeSpec::parse(s) {
                Ok(sp) => schemes.push(sp),
                Err(e) => errs.push(e),
            }
        }
        if let Some(Axis::Kind(_)) = axis {
            for (name, sp) in self.schemes.iter().zip(schemes.iter()) {
                if let AccessSpec::Fixed(_) = sp.access {
                    errs.push(format!(
                        "scheme '{name}' fixes its signature book and cannot appear in a \
                         'kind' sweep; use the bare 'noma-{}' form",
                        sp.combine.tag()
                    ));
                }
            }
        }

        if self.trials_ul == 0 {
            errs.push("trials_ul must be >= 1".into());
        }
        if self.drops == 0 {
            errs.push("drops must be >= 1".into());
        }
        if self.measure_dl && self.trials_dl < self.min_dl_trials.max(1) {
            errs.push(format!(
                "downlink hardening pools {} trials per drop but at least {} are required: \
                 raise trials_dl or lower min_dl_trials",
                self.trials_dl,
                self.min_dl_trials.max(1)
            ));
        }
        if self.grouping_subspace_dim == 0 {
            errs.push("grouping_subspace_dim must be >= 1".into());
        }

        let scenario = self.parse_drop(&mut errs);

        // Build per-point configurations even if earlier checks failed, to
        // surface per-point constraint violations in the same pass.
        let mut points = Vec::new();
        if let (Some(axis), Some(scenario)) = (axis.as_ref(), scenario) {
            let labels = self.point_labels(axis);
            let mut seen_values = std::collections::BTreeSet::new();
            for (value_label, _, _, _, _, _) in &labels {
                if !seen_values.insert(value_label.clone()) {
                    errs.push(format!("sweep value '{value_label}' is listed more than once"));
                }
            }
            for (value_label, n_val, m_val, k_val, tau_val, kind) in labels {
                let point_id = format!("{}:{}", self.scenario_id, value_label);
                match self.build_point(
                    &point_id, n_val, m_val, k_val, tau_val, kind, &schemes, scenario, full_scale,
                    &mut errs,
                ) {
                    Some(p) => points.push(p),
                    None => continue,
                }
            }
        }

        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(RunPlan::Monte(MontePlan {
            scenario_id: self.scenario_id.clone(),
            points,
            trials_ul: self.trials_ul,
            trials_dl: self.trials_dl,
            min_dl_trials: self.min_dl_trials,
            drops: self.drops,
            measure_dl: self.measure_dl,
            grouping_subspace_dim: self.grouping_subspace_dim,
            seed: self.seed,
        }))
    }

    fn parse_axis(&self, errs: &mut Vec<String>) -> Option<Axis> {
        let param = self.sweep.param.as_str();
        let ints = |errs: &mut Vec<String>| {
            let mut out = Vec::with_capacity(self.sweep.values.len());
            for (i, v) in self.sweep.values.iter().enumerate() {
                match as_positive_int(v) {
                    Some(x) => out.push(x),
                    None => errs.push(format!(
                        "sweep.values[{i}] must be a positive integer for param '{param}'"
                    )),
                }
            }
            out
        };
        match param {
            "n" => Some(Axis::N(ints(errs))),
            "m" => Some(Axis::M(ints(errs))),
            "k" => Some(Axis::K(ints(errs))),
            "tau-p" => Some(Axis::TauP(ints(errs))),
            "kind" => {
                let mut kinds = Vec::new();
                for (i, v) in self.sweep.values.iter().enumerate() {
                    match as_kind(v) {
                        Some(k) => kinds.push(k),
                        None => errs.push(format!(
                            "sweep.values[{i}] must be one of 'orthogonal', 'pm1', 'sparse'"
                        )),
                    }
                }
                Some(Axis::Kind(kinds))
            }
            "angle-deg" => {
                errs.push(
                    "sweep.param 'angle-deg' is only available in case-study mode".into(),
                );
                None
            }
            other => {
                errs.push(format!(
                    "sweep.param must be one of n, m, k, tau-p, kind (monte-carlo) or \
                     angle-deg (case-study), got '{other}'"
                ));
                None
            }
        }
    }

    /// Expands the axis into per-point (label, N, M, K, tau_p, kind) tuples.
    #[allow(clippy::type_complexity)]
    fn point_labels(
        &self,
        axis: &Axis,
    ) -> Vec<(String, usize, usize, usize, Option<usize>, BookKind)> {
        let base_n = self.network.spreading;
        let base_m = self.network.antennas;
        let base_k = self.network.ues_per_cell;
        let base_tau = self.network.tau_p;
        let out = |label: String, n, m, k, tau, kind| (label, n, m, k, tau, kind);
        match axis {
            Axis::N(vs) => vs
                .iter()
                .map(|&n| out(format!("N={n}"), n, base_m, base_k, base_tau, BookKind::Orthogonal))
                .collect(),
            Axis::M(vs) => vs
                .iter()
                .map(|&m| out(format!("M={m}"), base_n, m, base_k, base_tau, BookKind::Orthogonal))
                .collect(),
            Axis::K(vs) => vs
                .iter()
                .map(|&k| {
                    let n = match self.network.spreading_k_divisor {
                        Some(d) if d >= 1 => k / d.max(1),
                        _ => base_n,
                    };
                    out(format!("K={k}"), n, base_m, k, base_tau, BookKind::Orthogonal)
                })
                .collect(),
            Axis::TauP(vs) => vs
                .iter()
                .map(|&t| {
                    out(format!("tau_p={t}"), base_n, base_m, base_k, Some(t), BookKind::Orthogonal)
                })
                .collect(),
            Axis::Kind(vs) => vs
                .iter()
                .map(|&kind| {
                    out(format!("kind={}", kind.name()), base_n, base_m, base_k, base_tau, kind)
                })
                .collect(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn build_point(
        &self,
        point_id: &str,
        n: usize,
        m: usize,
        k: usize,
        tau_p: Option<usize>,
        kind: BookKind,
        schemes: &[SchemeSpec],
        scenario: Scenario,
        full_scale: bool,
        errs: &mut Vec<String>,
    ) -> Option<PointPlan> {
        let before = errs.len();

        if let Some(d) = self.network.spreading_k_divisor {
            if d == 0 {
                errs.push(format!("{point_id}: spreading_k_divisor must be >= 1"));
            } else if !k.is_multiple_of(d) {
                errs.push(format!(
                    "{point_id}: spreading_k_divisor = {d} must divide K = {k}"
                ));
            }
        }
        if n == 0 {
            errs.push(format!("{point_id}: spreading must be >= 1"));
        }
        let cap = if full_scale { FULL_K_CAP } else { DESK_K_CAP };
        if k > cap {
            if !full_scale && k <= FULL_K_CAP {
                errs.push(format!(
                    "{point_id}: K = {k} exceeds the desk-scale cap of {DESK_K_CAP}; \
                     pass --full-scale to allow up to {FULL_K_CAP}"
                ));
            } else {
                errs.push(format!("{point_id}: K = {k} exceeds the hard cap of {FULL_K_CAP}"));
            }
        }

        let array = match self.network.array.as_str() {
            "linear" => ArrayGeometry::Linear,
            "planar" => ArrayGeometry::Planar,
            other => {
                errs.push(format!(
                    "{point_id}: network.array must be 'linear' or 'planar', got '{other}'"
                ));
                ArrayGeometry::Linear
            }
        };

        let mut config = NetworkConfig::urban_macro(self.network.cells, k, m, n);
        config.array = array;
        config.tau_c = self.network.tau_c;
        config.cell_side = self.network.cell_side_m;
        config.shadow_std_db = self.network.shadow_std_db;
        config.azimuth_spread = self.network.azimuth_spread_deg.to_radians();
        config.elevation_spread = self.network.elevation_spread_deg.to_radians();
        let p = dbm_to_watt(self.network.power_dbm);
        config.p_ul = vec![p; config.total_ues()];
        config.rho_dl = vec![p; config.total_ues()];
        let sigma2 = dbm_to_watt(self.network.noise_dbm);
        config.sigma2_ul = sigma2;
        config.sigma2_dl = sigma2;
        let tau = tau_p.or(self.network.tau_p).unwrap_or(k);
        if tau > config.tau_c {
            errs.push(format!(
                "{point_id}: tau_p = {tau} exceeds the coherence block tau_c = {}",
                config.tau_c
            ));
        }
        let tau_clamped = tau.min(config.tau_c);
        config = config.with_tau_p(tau_clamped);
        if config.tau_u == 0 {
            errs.push(format!(
                "{point_id}: no uplink data samples remain (tau_c = {}, tau_p = {tau})",
                config.tau_c
            ));
        }
        if self.measure_dl && config.tau_d == 0 {
            errs.push(format!(
                "{point_id}: no downlink data samples remain (tau_c = {}, tau_p = {tau})",
                config.tau_c
            ));
        }

        if let Err(core_errs) = config.validate() {
            for e in core_errs {
                errs.push(format!("{point_id}: {e}"));
            }
        }
        if self.grouping_subspace_dim > m {
            errs.push(format!(
                "{point_id}: grouping_subspace_dim = {} exceeds M = {m}",
                self.grouping_subspace_dim
            ));
        }

        let mut resolved = Vec::with_capacity(schemes.len());
        for spec in schemes {
            let book = spec.resolve_book(kind);
            if book == BookPlan::OrthGrouped && !k.is_multiple_of(n) {
                errs.push(format!(
                    "{point_id}: grouped assignment needs N = {n} to divide K = {k}"
                ));
            }
            let label = match book {
                BookPlan::Mmimo => format!("mmimo-{}", spec.combine.tag()),
                b => format!("noma-{}{}", spec.combine.tag(), b.label_suffix()),
            };
            resolved.push(ResolvedScheme { label, combine: spec.combine, book });
        }
        let mut labels = std::collections::BTreeSet::new();
        for r in &resolved {
            if !labels.insert(r.label.clone()) {
                errs.push(format!(
                    "{point_id}: schemes resolve to duplicate label '{}'",
                    r.label
                ));
            }
        }

        if matches!(scenario.drop, DropKind::Clusters { clusters, .. } if clusters > 0 && !k.is_multiple_of(clusters))
        {
            errs.push(format!(
                "{point_id}: drop.clusters must divide K = {k}"
            ));
        }

        if errs.len() > before {
            return None;
        }
        Some(PointPlan { scenario_id: point_id.to_string(), config, scenario, schemes: resolved })
    }

    fn parse_drop(&self, errs: &mut Vec<String>) -> Option<Scenario> {
        let d = &self.drop;
        let kind = match d.kind.as_str() {
            "uniform" => DropKind::UniformCell,
            "sector-arc" => {
                if d.half_angle_deg.is_nan() || d.half_angle_deg <= 0.0 || d.half_angle_deg > 60.0
                {
                    errs.push("drop.half_angle_deg must lie in (0, 60]".into());
                    return None;
                }
                if d.distance_m.is_nan() || d.distance_m <= 0.0 {
                    errs.push("drop.distance_m must be positive".into());
                    return None;
                }
                DropKind::SectorArc {
                    half_angle: d.half_angle_deg.to_radians(),
                    distance: d.distance_m,
                }
            }
            "sector-filled" => {
                if d.half_angle_deg.is_nan() || d.half_angle_deg <= 0.0 || d.half_angle_deg > 60.0
                {
                    errs.push("drop.half_angle_deg must lie in (0, 60]".into());
                    return None;
                }
                if d.radius_m.is_nan() || d.radius_m <= 0.0 {
                    errs.push("drop.radius_m must be positive".into());
                    return None;
                }
                DropKind::SectorFilled {
                    half_angle: d.half_angle_deg.to_radians(),
                    radius: d.radius_m,
                }
            }
            "clusters" => {
                if d.clusters == 0 {
                    errs.push("drop.clusters must be >= 1".into());
                    return None;
                }
                if d.radius_m.is_nan() || d.radius_m <= 0.0 {
                    errs.push("drop.radius_m must be positive".into());
                    return None;
                }
                DropKind::Clusters { clusters: d.clusters, radius: d.radius_m }
            }
            other => {
                errs.push(format!(
                    "drop.kind must be one of uniform, sector-arc, sector-filled, clusters; \
                     got '{other}'"
                ));
                return None;
            }
        };
        Some(Scenario { drop: kind })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_monte() -> ExperimentSpec {
        ExperimentSpec {
            scenario_id: "t".into(),
            sweep: SweepSpec { param: "n".into(), values: vec![SweepValue::Int(2)] },
            schemes: vec!["mmimo-mr".into(), "noma-mmse-grouped".into()],
            network: NetworkSpec {
                cells: 2,
                ues_per_cell: 4,
                antennas: 8,
                spreading: 2,
                ..NetworkSpec::default()
            },
            drops: 1,
            trials_ul: 5,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn minimal_spec_resolves() {
        let plan = minimal_monte().resolve(false).expect("valid spec");
        let RunPlan::Monte(m) = plan else { panic!("expected monte plan") };
        assert_eq!(m.points.len(), 1);
        assert_eq!(m.points[0].scenario_id, "t:N=2");
        assert_eq!(m.points[0].config.spreading, 2);
        assert_eq!(m.points[0].schemes[0].label, "mmimo-mr");
        assert_eq!(m.points[0].schemes[1].label, "noma-mmse-grouped");
    }

    #[test]
    fn validation_collects_all_violations() {
        let mut spec = minimal_monte();
        spec.scenario_id = "bad id!".into();
        spec.schemes = vec!["nope".into(), "mmimo-mr".into(), "mmimo-mr".into()];
        spec.trials_ul = 0;
        spec.network.array = "hexagonal".into();
        let errs = spec.resolve(false).unwrap_err();
        assert!(errs.len() >= 4, "expected several violations, got {errs:?}");
        assert!(errs.iter().any(|e| e.contains("scenario_id")));
        assert!(errs.iter().any(|e| e.contains("unknown scheme")));
        assert!(errs.iter().any(|e| e.contains("trials_ul")));
        assert!(errs.iter().any(|e| e.contains("array")));
        assert!(errs.iter().any(|e| e.contains("listed more than once")));
    }

    #[test]
    fn desk_cap_mentions_full_scale() {
        let mut spec = minimal_monte();
        spec.sweep = SweepSpec { param: "k".into(), values: vec![SweepValue::Int(128)] };
        spec.network.spreading_k_divisor = Some(4);
        let errs = spec.resolve(false).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("--full-scale")), "{errs:?}");
        assert!(spec.resolve(true).is_ok());
    }

    #[test]
    fn kind_sweep_rejects_fixed_books() {
        let mut spec = minimal_monte();
        spec.sweep = SweepSpec {
            param: "kind".into(),
            values: vec![SweepValue::Text("orthogonal".into()), SweepValue::Text("pm1".into())],
        };
        spec.schemes = vec!["noma-mmse-grouped".into()];
        let errs = spec.resolve(false).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("kind")), "{errs:?}");

        spec.schemes = vec!["noma-mmse".into()];
        let RunPlan::Monte(m) = spec.resolve(false).expect("bare scheme ok") else {
            panic!("expected monte plan")
        };
        assert_eq!(m.points[0].schemes[0].label, "noma-mmse-grouped");
        assert_eq!(m.points[1].schemes[0].label, "noma-mmse-pm1");
    }

    #[test]
    fn tau_p_sweep_resplits_block() {
        let mut spec = minimal_monte();
        spec.sweep = SweepSpec {
            param: "tau-p".into(),
            values: vec![SweepValue::Int(1), SweepValue::Int(4)],
        };
        let RunPlan::Monte(m) = spec.resolve(false).expect("valid") else { panic!() };
        assert_eq!(m.points[0].config.tau_p, 1);
        assert_eq!(m.points[1].config.tau_p, 4);
        for p in &m.points {
            assert_eq!(
                p.config.tau_p + p.config.tau_u + p.config.tau_d,
                p.config.tau_c
            );
        }
    }

    #[test]
    fn case_spec_roundtrips_through_toml() {
        let spec = ExperimentSpec {
            scenario_id: "case".into(),
            mode: "case-study".into(),
            sweep: SweepSpec {
                param: "angle-deg".into(),
                values: vec![SweepValue::Float(-30.0), SweepValue::Int(45)],
            },
            schemes: vec!["mmimo-mr".into(), "noma-orth".into()],
            ..ExperimentSpec::default()
        };
        let text = spec.to_toml_string();
        let back = ExperimentSpec::from_toml_str(&text).expect("parses");
        let RunPlan::Case(c) = back.resolve(false).expect("valid") else { panic!() };
        assert_eq!(c.phi2_deg, vec![-30.0, 45.0]);
        assert_eq!(c.schemes, vec![CaseSchemeSpec::MmimoMr, CaseSchemeSpec::NomaOrth]);
        assert!((c.snr - 1.0).abs() < 1e-12);
    }
}
