//! Named scenario presets: ready-to-run experiment specs sized for a
//! laptop-class machine. Each entry documents what it measures and its
//! expected desk-scale runtime; `--full-scale` widens the sweeps that are
//! capped by default.

use crate::config::{CaseSpec, DropSpec, ExperimentSpec, NetworkSpec, SweepSpec, SweepValue};

/// One catalog entry.
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Rough desk-scale wall time on a laptop-class machine.
    pub budget: &'static str,
    pub spec: ExperimentSpec,
}

fn ints(values: &[i64]) -> Vec<SweepValue> {
    values.iter().map(|&v| SweepValue::Int(v)).collect()
}

fn strings(values: &[&str]) -> Vec<SweepValue> {
    values.iter().map(|&v| SweepValue::Text(v.into())).collect()
}

fn fig1_case_study() -> ExperimentSpec {
    ExperimentSpec {
        scenario_id: "fig1-case-study".into(),
        mode: "case-study".into(),
        sweep: SweepSpec { param: "angle-deg".into(), values: ints(&(-90..=90).collect::<Vec<_>>()) },
        schemes: vec![
            "mmimo-mr".into(),
            "mmimo-mmse".into(),
            "noma-orth".into(),
            "noma-pm1-mr".into(),
            "noma-pm1-mmse".into(),
        ],
        case: CaseSpec { antennas: 64, spreading: 2, snr_db: 0.0, phi1_deg: 30.0 },
        ..ExperimentSpec::default()
    }
}

/// Shared base for the two 30-degree-sector sweeps: K = 16 UEs per cell on
/// an arc 100 m from the BS, planar array, uplink only.
fn fig4_base(id: &str, sweep: SweepSpec, spreading: usize, antennas: usize) -> ExperimentSpec {
    ExperimentSpec {
        scenario_id: id.into(),
        sweep,
        schemes: vec![
            "mmimo-mr".into(),
            "mmimo-mmse".into(),
            "noma-mr-grouped".into(),
            "noma-mmse-grouped".into(),
        ],
        network: NetworkSpec {
            ues_per_cell: 16,
            antennas,
            spreading,
            array: "planar".into(),
            ..NetworkSpec::default()
        },
        drop: DropSpec {
            kind: "sector-arc".into(),
            half_angle_deg: 15.0,
            distance_m: 100.0,
            ..DropSpec::default()
        },
        trials_ul: 300,
        drops: 10,
        ..ExperimentSpec::default()
    }
}

fn fig4_sector_n() -> ExperimentSpec {
    fig4_base(
        "fig4-sector-n",
        SweepSpec { param: "n".into(), values: ints(&[1, 2, 4, 8, 16]) },
        4,
        64,
    )
}

fn fig4_sector_m(full_scale: bool) -> ExperimentSpec {
    let ms: &[i64] = if full_scale { &[16, 36, 64, 100, 144] } else { &[16, 36, 64] };
    fig4_base("fig4-sector-m", SweepSpec { param: "m".into(), values: ints(ms) }, 4, 64)
}

fn fig6_clusters(full_scale: bool) -> ExperimentSpec {
    let ks: &[i64] = if full_scale { &[16, 32, 64, 128] } else { &[16, 32] };
    ExperimentSpec {
        scenario_id: "fig6-clusters".into(),
        sweep: SweepSpec { param: "k".into(), values: ints(ks) },
        schemes: vec![
            "mmimo-mr".into(),
            "mmimo-mmse".into(),
            "noma-mr-grouped".into(),
            "noma-mmse-grouped".into(),
            "noma-mr-random".into(),
            "noma-mmse-random".into(),
        ],
        network: NetworkSpec {
            spreading_k_divisor: Some(4),
            array: "planar".into(),
            ..NetworkSpec::default()
        },
        drop: DropSpec { kind: "clusters".into(), clusters: 4, radius_m: 20.0, ..DropSpec::default() },
        trials_ul: 300,
        trials_dl: 300,
        min_dl_trials: 200,
        drops: 20,
        measure_dl: true,
        ..ExperimentSpec::default()
    }
}

fn fig7_codes() -> ExperimentSpec {
    ExperimentSpec {
        scenario_id: "fig7-codes".into(),
        sweep: SweepSpec { param: "kind".into(), values: strings(&["orthogonal", "pm1", "sparse"]) },
        schemes: vec!["noma-mr".into(), "noma-mmse".into()],
        network: NetworkSpec {
            ues_per_cell: 32,
            spreading: 4,
            array: "planar".into(),
            ..NetworkSpec::default()
        },
        drop: DropSpec { kind: "clusters".into(), clusters: 4, radius_m: 20.0, ..DropSpec::default() },
        trials_ul: 150,
        drops: 8,
        ..ExperimentSpec::default()
    }
}

fn fig8_pilots() -> ExperimentSpec {
    ExperimentSpec {
        scenario_id: "fig8-pilots".into(),
        sweep: SweepSpec { param: "tau-p".into(), values: ints(&[1, 2, 4, 8, 16, 32]) },
        schemes: vec![
            "mmimo-mr".into(),
            "mmimo-mmse".into(),
            "noma-mr-grouped".into(),
            "noma-mmse-grouped".into(),
        ],
        network: NetworkSpec { ues_per_cell: 32, spreading: 8, ..NetworkSpec::default() },
        trials_ul: 250,
        drops: 10,
        ..ExperimentSpec::default()
    }
}

/// All named presets, with sweeps widened when `full_scale` is set.
pub fn preset_catalog(full_scale: bool) -> Vec<Preset> {
    vec![
        Preset {
            name: "fig1-case-study",
            description: "Two-UE line-of-sight closed forms: SE vs second UE azimuth \
                          (181 points), M=64, N=2, SNR 0 dB, five schemes",
            budget: "< 1 s",
            spec: fig1_case_study(),
        },
        Preset {
            name: "fig4-sector-n",
            description: "Crowded 30-degree sector (K=16 on a 100 m arc): uplink SE vs \
                          signature length N in {1,2,4,8,16}, M=64 planar",
            budget: "~2 min",
            spec: fig4_sector_n(),
        },
        Preset {
            name: "fig4-sector-m",
            description: "Same sector scenario: uplink SE vs antenna count M in \
                          {16,36,64} (desk) or {16,36,64,100,144} (--full-scale), N=4",
            budget: "~2 min",
            spec: fig4_sector_m(full_scale),
        },
        Preset {
            name: "fig6-clusters",
            description: "Four 20 m UE clusters per cell: uplink + downlink sum SE vs \
                          K in {16,32} (desk) or up to 128 (--full-scale), N=K/4, \
                          grouped vs random assignment vs classical",
            budget: "~4 min",
            spec: fig6_clusters(full_scale),
        },
        Preset {
            name: "fig7-codes",
            description: "Clustered K=32: uplink SE by signature family (orthogonal, \
                          random +-1, sparse) at N=4",
            budget: "~3 min",
            spec: fig7_codes(),
        },
        Preset {
            name: "fig8-pilots",
            description: "Pilot shortage at K=32, N=8 orthogonal: uplink SE vs pilot \
                          budget tau_p in {1,...,32}",
            budget: "~2 min",
            spec: fig8_pilots(),
        },
    ]
}

/// Looks up one preset by name.
pub fn preset(name: &str, full_scale: bool) -> Option<ExperimentSpec> {
    preset_catalog(full_scale).into_iter().find(|p| p.name == name).map(|p| p.spec)
}

/// Multi-preset aliases accepted by the `run` verb.
pub fn alias_targets(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "fig4-sector" => Some(&["fig4-sector-n", "fig4-sector-m"]),
        _ => None,
    }
}
