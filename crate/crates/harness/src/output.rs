//! Result serialization: the per-UE CSV, the run manifest, and the
//! correlation-matrix dump consumed by the standalone `group` verb.
//!
//! CSV values are written with plain `Display` formatting (shortest
//! round-trip for floats), so identical runs produce byte-identical
//! files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use noma_mimo_core::channel::CorrelationMatrix;
use noma_mimo_core::{Error, Result};

use crate::config::ExperimentSpec;
use crate::runner::{CaseRow, PointOutcome};

/// One line of `results.csv`.
pub struct ResultRow {
    pub scenario_id: String,
    pub cell: usize,
    pub ue: usize,
    pub scheme: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub se_bits: f64,
    pub sinr_mean: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "scenario_id,cell,ue,scheme,N,M,K,se_bits,sinr_mean,ci_halfwidth,trials,seed";

/// Flattens Monte Carlo outcomes into CSV rows: point order, then scheme
/// order as resolved from the spec, uplink before downlink, then flat UE
/// index (cell-major).
pub fn monte_rows(outcomes: &[PointOutcome], seed: u64) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for po in outcomes {
        let k = po.k;
        for lo in &po.labels {
            let directions: Vec<(&str, &Vec<crate::runner::AggRow>)> =
                std::iter::once(("ul", &lo.ul_rows))
                    .chain(lo.dl_rows.iter().map(|r| ("dl", r)))
                    .collect();
            for (dir, aggs) in directions {
                for (t, agg) in aggs.iter().enumerate() {
                    rows.push(ResultRow {
                        scenario_id: po.scenario_id.clone(),
                        cell: t / k,
                        ue: t % k,
                        scheme: format!("{dir}:{}", lo.label),
                        n: lo.n,
                        m: po.m,
                        k,
                        se_bits: agg.se,
                        sinr_mean: agg.sinr_mean,
                        ci_halfwidth: agg.ci_halfwidth,
                        trials: agg.trials,
                        seed,
                    });
                }
            }
        }
    }
    rows
}

/// Flattens case-study rows. The two UEs of the pair are symmetric
/// (same SNR, symmetric angle coupling), so both carry the same values;
/// the SINR column is the effective value implied by the SE.
pub fn case_rows(rows: &[CaseRow], m: usize, seed: u64) -> Vec<ResultRow> {
    let mut out = Vec::with_capacity(rows.len() * 2);
    for cr in rows {
        for ue in 0..2 {
            out.push(ResultRow {
                scenario_id: cr.scenario_id.clone(),
                cell: 0,
                ue,
                scheme: format!("ul:{}", cr.label),
                n: cr.n,
                m,
                k: 2,
                se_bits: cr.se,
                sinr_mean: cr.sinr,
                ci_halfwidth: 0.0,
                trials: 0,
                seed,
            });
        }
    }
    out
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario_id,
            r.cell,
            r.ue,
            r.scheme,
            r.n,
            r.m,
            r.k,
            r.se_bits,
            r.sinr_mean,
            r.ci_halfwidth,
            r.trials,
            r.seed
        )
        .expect("writing to String cannot fail");
    }
    s
}

/// Crate version, extended with `git describe` output when available.
pub fn version_string() -> String {
    let base = env!("CARGO_PKG_VERSION");
    match std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
    {
        Ok(o) if o.status.success() => {
            let tag = String::from_utf8_lossy(&o.stdout).trim().to_string();
            if tag.is_empty() { base.to_string() } else { format!("{base}+{tag}") }
        }
        _ => base.to_string(),
    }
}

/// Builds the manifest recorded next to each results file.
pub fn manifest_json(
    spec: &ExperimentSpec,
    scenario_id: &str,
    seed: u64,
    full_scale: bool,
    rows: usize,
    points: usize,
    wall_time_s: f64,
) -> Result<String> {
    let value = serde_json::json!({
        "scenario_id": scenario_id,
        "seed": seed,
        "version": version_string(),
        "wall_time_s": wall_time_s,
        "threads": rayon::current_num_threads(),
        "full_scale": full_scale,
        "rows": rows,
        "points": points,
        "spec": serde_json::to_value(spec)
            .map_err(|e| Error::config(format!("spec not serializable: {e}")))?,
    });
    serde_json::to_string_pretty(&value)
        .map_err(|e| Error::config(format!("manifest serialization failed: {e}")))
}

/// Resolves the output directory `<base>/<scenario_id>/<seed>/`, creating
/// it if needed.
pub fn output_dir(base: &Path, scenario_id: &str, seed: u64) -> Result<PathBuf> {
    let dir = base.join(scenario_id).join(seed.to_string());
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Serializes serving-BS correlation matrices, one UE per line:
/// `ue_id,m,<2 m^2 interleaved re/im values>`.
pub fn render_corr_dump(entries: &[(usize, CorrelationMatrix)]) -> String {
    let mut s = String::new();
    s.push_str("# ue_id,m,interleaved re/im of the m x m correlation matrix (row-major)\n");
    for (ue, corr) in entries {
        let m = corr.dim();
        write!(s, "{ue},{m}").expect("writing to String cannot fail");
        for v in corr.to_interleaved() {
            write!(s, ",{v}").expect("writing to String cannot fail");
        }
        s.push('\n');
    }
    s
}

/// Parses a correlation dump produced by [`render_corr_dump`] (blank
/// lines and `#` comments ignored).
pub fn parse_corr_dump(text: &str) -> Result<Vec<(usize, CorrelationMatrix)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let bad = |what: &str| {
            Error::config(format!("corr dump line {}: {what}", lineno + 1))
        };
        let ue: usize = fields
            .next()
            .ok_or_else(|| bad("missing ue_id"))?
            .trim()
            .parse()
            .map_err(|_| bad("ue_id is not an integer"))?;
        let m: usize = fields
            .next()
            .ok_or_else(|| bad("missing dimension"))?
            .trim()
            .parse()
            .map_err(|_| bad("dimension is not an integer"))?;
        let data: Vec<f64> = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("matrix entry is not a number"))?;
        if data.len() != 2 * m * m {
            return Err(bad(&format!(
                "expected {} matrix values, found {}",
                2 * m * m,
                data.len()
            )));
        }
        out.push((ue, CorrelationMatrix::from_interleaved(m, &data)?));
    }
    if out.is_empty() {
        return Err(Error::config("corr dump contains no matrices"));
    }
    Ok(out)
}

/// Serializes a grouping result as CSV (`ue_id,group_id,distance_to_center`).
pub fn render_group_csv(
    ue_ids: &[usize],
    assignment: &noma_mimo_core::grouping::GroupAssignment,
    distances: &[f64],
) -> String {
    let mut s = String::from("ue_id,group_id,distance_to_center\n");
    for (i, &ue) in ue_ids.iter().enumerate() {
        writeln!(s, "{ue},{},{}", assignment.membership[i], distances[i])
            .expect("writing to String cannot fail");
    }
    s
}
