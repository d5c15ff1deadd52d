use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result, bail};
use clap::{Args, Parser, Subcommand};
use noma_mimo::config::{ExperimentSpec, RunPlan};
use noma_mimo::{output, presets, runner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "noma-mimo",
    version,
    about = "Spectral-efficiency experiments for code-domain NOMA over massive MIMO"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named preset or a TOML experiment spec
    Run(RunArgs),
    /// List the available presets
    ListPresets {
        /// Show the widened sweeps enabled by --full-scale
        #[arg(long)]
        full_scale: bool,
    },
    /// Check a spec file, printing every violated constraint
    Validate {
        spec: PathBuf,
        #[arg(long)]
        full_scale: bool,
    },
    /// Group UEs by channel-correlation similarity from a saved dump
    Group(GroupArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Preset name (see list-presets) or path to a TOML spec file
    target: String,
    /// Override the spec's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override both trials_ul and trials_dl
    #[arg(long)]
    trials: Option<usize>,
    /// Base output directory; results land in <out>/<scenario_id>/<seed>/
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Lift the desk-scale sweep caps (larger K range, more antennas)
    #[arg(long)]
    full_scale: bool,
    /// Also write the serving-BS correlation matrices of the first drop
    /// (input for the `group` verb)
    #[arg(long)]
    dump_corr: bool,
}

#[derive(Args)]
struct GroupArgs {
    /// Correlation dump written by `run --dump-corr`
    dump: PathBuf,
    /// Number of groups
    #[arg(long)]
    groups: usize,
    /// Eigenspace dimension used for the similarity metric
    #[arg(long, default_value_t = 6)]
    subspace_dim: usize,
    /// Force equal group sizes (groups must divide the UE count)
    #[arg(long)]
    balanced: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(args) => run(args),
        Cmd::ListPresets { full_scale } => {
            list_presets(full_scale);
            Ok(())
        }
        Cmd::Validate { spec, full_scale } => validate(&spec, full_scale),
        Cmd::Group(args) => group(args),
    }
}

fn load_spec(target: &str) -> Result<ExperimentSpec> {
    if let Some(spec) = presets::preset(target, false) {
        return Ok(spec);
    }
    let path = Path::new(target);
    if !path.exists() {
        bail!(
            "'{target}' is neither a preset (see list-presets) nor an existing spec file"
        );
    }
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    ExperimentSpec::from_toml_str(&text).map_err(|e| anyhow::anyhow!(e))
}

fn run(args: RunArgs) -> Result<()> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("failed to size the worker pool")?;
    }

    let targets: Vec<String> = match presets::alias_targets(&args.target) {
        Some(names) => names.iter().map(|s| s.to_string()).collect(),
        None => vec![args.target.clone()],
    };

    for target in &targets {
        let mut spec = if presets::preset(target, false).is_some() {
            presets::preset(target, args.full_scale).expect("known preset")
        } else {
            load_spec(target)?
        };
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        if let Some(trials) = args.trials {
            spec.trials_ul = trials;
            spec.trials_dl = trials;
        }
        run_one(&spec, &args, target)?;
    }
    Ok(())
}

fn run_one(spec: &ExperimentSpec, args: &RunArgs, target: &str) -> Result<()> {
    let plan = match spec.resolve(args.full_scale) {
        Ok(p) => p,
        Err(violations) => {
            eprintln!("{target}: invalid experiment spec:");
            for v in &violations {
                eprintln!("  - {v}");
            }
            std::process::exit(1);
        }
    };

    let t0 = Instant::now();
    let (rows, points) = match &plan {
        RunPlan::Monte(mp) => {
            eprintln!(
                "{}: {} sweep point(s), {} drop(s) x {} UL trial(s) each",
                mp.scenario_id,
                mp.points.len(),
                mp.drops,
                mp.trials_ul
            );
            let outcomes = runner::run_monte(mp, |id, secs| {
                eprintln!("  {id} done in {secs:.1} s");
            })?;
            (output::monte_rows(&outcomes, mp.seed), mp.points.len())
        }
        RunPlan::Case(cp) => {
            let rows = runner::run_case(cp)?;
            (output::case_rows(&rows, cp.antennas, cp.seed), cp.phi2_deg.len())
        }
    };

    let dir = output::output_dir(&args.out, plan.scenario_id(), plan.seed())?;
    let csv_path = dir.join("results.csv");
    std::fs::write(&csv_path, output::render_csv(&rows))
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    let manifest = output::manifest_json(
        spec,
        plan.scenario_id(),
        plan.seed(),
        args.full_scale,
        rows.len(),
        points,
        t0.elapsed().as_secs_f64(),
    )?;
    let manifest_path = dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest)
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    if args.dump_corr {
        let RunPlan::Monte(mp) = &plan else {
            bail!("--dump-corr needs a monte-carlo spec (the case study has no correlation matrices)");
        };
        let entries = runner::corr_dump(mp)?;
        let corr_path = dir.join("corr.csv");
        std::fs::write(&corr_path, output::render_corr_dump(&entries))
            .with_context(|| format!("cannot write {}", corr_path.display()))?;
        println!("{}", corr_path.display());
    }

    println!("{}", csv_path.display());
    println!("{}", manifest_path.display());
    Ok(())
}

fn list_presets(full_scale: bool) {
    for p in presets::preset_catalog(full_scale) {
        let pts = p.spec.sweep.values.len();
        println!("{:<16} {:>3} point(s), {:>7}  {}", p.name, pts, p.budget, p.description);
    }
    println!("{:<16} alias: runs fig4-sector-n and fig4-sector-m back to back", "fig4-sector");
}

fn validate(path: &Path, full_scale: bool) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let spec = match ExperimentSpec::from_toml_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match spec.resolve(full_scale) {
        Ok(RunPlan::Monte(mp)) => {
            println!(
                "ok: monte-carlo, {} sweep point(s), {} scheme label(s)",
                mp.points.len(),
                mp.points.first().map_or(0, |p| p.schemes.len())
            );
            Ok(())
        }
        Ok(RunPlan::Case(cp)) => {
            println!(
                "ok: case-study, {} angle(s), {} scheme(s)",
                cp.phi2_deg.len(),
                cp.schemes.len()
            );
            Ok(())
        }
        Err(violations) => {
            eprintln!("{} violated constraint(s):", violations.len());
            for v in &violations {
                eprintln!("  - {v}");
            }
            std::process::exit(1);
        }
    }
}

fn group(args: GroupArgs) -> Result<()> {
    use noma_mimo_core::grouping::{
        balanced_group, chordal_distance, kmeans_group, p_dominant_eigenspace,
    };

    let text = std::fs::read_to_string(&args.dump)
        .with_context(|| format!("cannot read {}", args.dump.display()))?;
    let entries = output::parse_corr_dump(&text)?;
    let ue_ids: Vec<usize> = entries.iter().map(|(ue, _)| *ue).collect();
    let corrs: Vec<_> = entries.into_iter().map(|(_, c)| c).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let assignment = if args.balanced {
        balanced_group(&corrs, args.groups, args.subspace_dim, &mut rng, 100)?
    } else {
        kmeans_group(&corrs, args.groups, args.subspace_dim, &mut rng, 100)?
    };

    let mut distances = Vec::with_capacity(corrs.len());
    for (i, c) in corrs.iter().enumerate() {
        let space = p_dominant_eigenspace(c.matrix(), args.subspace_dim)?;
        distances.push(chordal_distance(&space, &assignment.centers[assignment.membership[i]])?);
    }

    let csv = output::render_group_csv(&ue_ids, &assignment, &distances);
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv)
                .with_context(|| format!("cannot write {}", path.display()))?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "{} UE(s) -> {} group(s), total cost {:.6}",
        ue_ids.len(),
        args.groups,
        assignment.total_cost
    );
    Ok(())
}
