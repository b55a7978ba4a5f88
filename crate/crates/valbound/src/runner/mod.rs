//! Experiment runner: loads a JSON config, validates it, executes the
//! requested task over all seeds (in parallel, capped by `VALBOUND_THREADS`),
//! and writes per-seed artifacts plus a run manifest.

pub mod artifacts;
pub mod compare;
pub mod config;

pub use config::{ExperimentConfig, TaskKind};

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::clipping::clipped_value_iteration;
use crate::composition::verify_exact_composition;
use crate::dqn::{dqn_train, DqnConfig};
use crate::error::{Error, Result};
use crate::mdp::{solve, QTable, TabularMdp};
use crate::rng::Stream;

/// Command-line overrides applied on top of the config document.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub output_override: Option<PathBuf>,
    pub seeds_override: Option<Vec<u64>>,
}

/// Where a finished run put its artifacts.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub outputs: Vec<String>,
}

#[derive(Serialize)]
struct RunManifest {
    config: serde_json::Value,
    version: String,
    outputs: Vec<String>,
    timings_ms: ManifestTimings,
    finalized: bool,
}

#[derive(Serialize, Default)]
struct ManifestTimings {
    total: u128,
    per_seed: Vec<u128>,
}

/// Worker cap: `VALBOUND_THREADS` if set, otherwise the machine parallelism.
pub fn thread_cap() -> usize {
    std::env::var("VALBOUND_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run closures across a bounded worker pool, preserving result order.
pub fn run_jobs<T, F>(jobs: Vec<F>) -> Result<Vec<T>>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    let threads = thread_cap().min(jobs.len()).max(1);
    if threads <= 1 {
        return jobs.into_iter().map(|job| job()).collect();
    }
    let slots: Vec<Mutex<Option<F>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<Result<T>>>> =
        (0..slots.len()).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= slots.len() {
                    break;
                }
                let job = slots[i].lock().unwrap().take().expect("job taken once");
                *results[i].lock().unwrap() = Some(job());
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    std::fs::write(
        dir.join("manifest.json"),
        crate::io::to_json_string_pretty(manifest)?,
    )?;
    Ok(())
}

pub(crate) struct SeedArtifacts {
    pub(crate) files: Vec<String>,
    pub(crate) elapsed_ms: u128,
}

/// Execute the experiment described by the config file. Validation happens
/// before anything is written; the manifest is created before the seeds run
/// and finalized with timings afterwards. Returns the artifact directory.
pub fn run(config_path: &Path, options: &RunOptions) -> Result<RunOutcome> {
    let text = std::fs::read_to_string(config_path)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)?;
    let mut echo: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(dir) = &options.output_override {
        config.output_dir = dir.clone();
        echo["output_dir"] = serde_json::Value::String(dir.display().to_string());
    }
    if let Some(seeds) = &options.seeds_override {
        config.seeds = seeds.clone();
        echo["seeds"] = serde_json::json!(seeds);
    }
    config.validate()?;
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));

    let out_dir = config.output_dir.clone();
    std::fs::create_dir_all(&out_dir)?;
    let mut manifest = RunManifest {
        config: echo,
        version: env!("CARGO_PKG_VERSION").to_owned(),
        outputs: Vec::new(),
        timings_ms: ManifestTimings::default(),
        finalized: false,
    };
    write_manifest(&out_dir, &manifest)?;

    let started = Instant::now();
    let per_seed = match config.task {
        TaskKind::Solve => run_solve(&config, base, &out_dir)?,
        TaskKind::Bounds => run_bounds(&config, base, &out_dir)?,
        TaskKind::Clip => run_clip(&config, base, &out_dir)?,
        TaskKind::ComposeCheck => run_compose_check(&config, base, &out_dir)?,
        TaskKind::Dqn => run_dqn(&config, &out_dir)?,
        TaskKind::Compare => compare::run_compare(&config, base, &out_dir)?,
    };

    for seed_artifacts in &per_seed {
        manifest
            .outputs
            .extend(seed_artifacts.files.iter().cloned());
        manifest.timings_ms.per_seed.push(seed_artifacts.elapsed_ms);
    }
    manifest.timings_ms.total = started.elapsed().as_millis();
    manifest.finalized = true;
    write_manifest(&out_dir, &manifest)?;
    Ok(RunOutcome {
        output_dir: out_dir,
        outputs: manifest.outputs,
    })
}

fn seed_dir(out_dir: &Path, seed: u64) -> Result<PathBuf> {
    let dir = out_dir.join(format!("seed_{seed}"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct SolveSummary {
    iterations: usize,
    residual: f64,
    tol: f64,
}

fn run_solve(config: &ExperimentConfig, base: &Path, out_dir: &Path) -> Result<Vec<SeedArtifacts>> {
    let mdp = config.build_tabular_env(base)?;
    let reg = config.regularization(mdp.num_states, mdp.num_actions)?;
    let tols = config.tolerances;
    let jobs: Vec<_> = config
        .seeds
        .iter()
        .map(|&seed| {
            let mdp = mdp.clone();
            let reg = reg.clone();
            let dir = seed_dir(out_dir, seed);
            move || {
                let dir = dir?;
                let t = Instant::now();
                let report = solve(&mdp, &reg, tols.tol, tols.max_iter)?;
                let q_path = dir.join("q.csv");
                artifacts::write_q_csv(&report.q, &q_path)?;
                let summary = SolveSummary {
                    iterations: report.iterations,
                    residual: report.residual,
                    tol: tols.tol,
                };
                let json_path = dir.join("solve.json");
                std::fs::write(&json_path, crate::io::to_json_string_pretty(&summary)?)?;
                Ok(SeedArtifacts {
                    files: vec![
                        format!("seed_{seed}/q.csv"),
                        format!("seed_{seed}/solve.json"),
                    ],
                    elapsed_ms: t.elapsed().as_millis(),
                })
            }
        })
        .collect();
    run_jobs(jobs)
}

fn estimate_for_seed(
    config: &ExperimentConfig,
    mdp: &TabularMdp,
    reg: &crate::mdp::RegularizationSpec,
    seed: u64,
) -> Result<QTable> {
    let (source, low, high) = match &config.estimate {
        None => ("random", -5.0, 5.0),
        Some(e) => (e.source.as_str(), e.low, e.high),
    };
    match source {
        "zero" => Ok(QTable::zeros(mdp.num_states, mdp.num_actions)),
        "solve" => Ok(solve(mdp, reg, config.tolerances.tol, config.tolerances.max_iter)?.q),
        _ => {
            let mut rng = Stream::for_component(seed, "estimate");
            Ok(QTable::random(
                &mut rng,
                mdp.num_states,
                mdp.num_actions,
                low,
                high,
            ))
        }
    }
}

fn run_bounds(
    config: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<Vec<SeedArtifacts>> {
    let mdp = config.build_tabular_env(base)?;
    let reg = config.regularization(mdp.num_states, mdp.num_actions)?;
    let jobs: Vec<_> = config
        .seeds
        .iter()
        .map(|&seed| {
            let mdp = mdp.clone();
            let reg = reg.clone();
            let dir = seed_dir(out_dir, seed);
            move || {
                let dir = dir?;
                let t = Instant::now();
                let q = estimate_for_seed(config, &mdp, &reg, seed)?;
                let delta = crate::bounds::delta_for(&mdp, &reg, &q)?;
                let pair = crate::bounds::bounds_from_delta(&mdp, &delta)?;
                artifacts::write_bounds_csv(&pair, &delta.delta, &dir.join("bounds.csv"))?;
                Ok(SeedArtifacts {
                    files: vec![format!("seed_{seed}/bounds.csv")],
                    elapsed_ms: t.elapsed().as_millis(),
                })
            }
        })
        .collect();
    run_jobs(jobs)
}

fn run_clip(config: &ExperimentConfig, base: &Path, out_dir: &Path) -> Result<Vec<SeedArtifacts>> {
    let mdp = config.build_tabular_env(base)?;
    let reg = config.regularization(mdp.num_states, mdp.num_actions)?;
    let clip = config.clip_config()?;
    let tols = config.tolerances;
    let jobs: Vec<_> = config
        .seeds
        .iter()
        .map(|&seed| {
            let mdp = mdp.clone();
            let reg = reg.clone();
            let dir = seed_dir(out_dir, seed);
            move || {
                let dir = dir?;
                let t = Instant::now();
                let (report, trace) =
                    clipped_value_iteration(&mdp, &reg, &clip, tols.tol, tols.max_iter)?;
                artifacts::emit_maze_figure_data(&trace, &dir.join("trace.csv"))?;
                let summary = SolveSummary {
                    iterations: report.iterations,
                    residual: report.residual,
                    tol: tols.tol,
                };
                std::fs::write(
                    dir.join("solve.json"),
                    crate::io::to_json_string_pretty(&summary)?,
                )?;
                Ok(SeedArtifacts {
                    files: vec![
                        format!("seed_{seed}/trace.csv"),
                        format!("seed_{seed}/solve.json"),
                    ],
                    elapsed_ms: t.elapsed().as_millis(),
                })
            }
        })
        .collect();
    run_jobs(jobs)
}

fn run_compose_check(
    config: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<Vec<SeedArtifacts>> {
    let section = config
        .compose
        .as_ref()
        .expect("validated compose-check config");
    let t = Instant::now();
    let mut tasks = Vec::with_capacity(section.tasks.len());
    for path in &section.tasks {
        let text = std::fs::read_to_string(base.join(path))?;
        tasks.push(TabularMdp::from_json_str(&text)?);
    }
    let spec = config.composition_spec()?;
    let report = verify_exact_composition(&tasks, &spec, section.tol)?;
    let json = crate::io::to_json_string(&report)?;
    println!("{json}");
    std::fs::write(
        out_dir.join("report.json"),
        crate::io::to_json_string_pretty(&report)?,
    )?;
    Ok(vec![SeedArtifacts {
        files: vec!["report.json".to_owned()],
        elapsed_ms: t.elapsed().as_millis(),
    }])
}

/// DQN config for one seed, folding in the clip section.
fn dqn_config_for_seed(config: &ExperimentConfig, seed: u64) -> Result<DqnConfig> {
    let mut dqn = config.dqn.clone().unwrap_or_default();
    let clip = config.clip_config()?;
    dqn.clip_method = clip.method;
    dqn.eta = clip.eta;
    dqn.seed = seed;
    Ok(dqn)
}

fn run_dqn(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<SeedArtifacts>> {
    let env_params = config
        .env
        .as_ref()
        .and_then(|e| e.mountain_car)
        .unwrap_or_default();
    let jobs: Vec<_> = config
        .seeds
        .iter()
        .map(|&seed| {
            let dir = seed_dir(out_dir, seed);
            let dqn = dqn_config_for_seed(config, seed);
            move || {
                let dir = dir?;
                let t = Instant::now();
                let run = dqn_train(&env_params, &dqn?)?;
                artifacts::write_train_log_csv(&run.log, &dir.join("train_log.csv"))?;
                std::fs::write(dir.join("checkpoint.json"), run.network.to_json_string()?)?;
                if run.log.hard_clip_breaches > 0 {
                    return Err(Error::Precondition(format!(
                        "hard clipping let {} targets escape their bounds",
                        run.log.hard_clip_breaches
                    )));
                }
                Ok(SeedArtifacts {
                    files: vec![
                        format!("seed_{seed}/train_log.csv"),
                        format!("seed_{seed}/checkpoint.json"),
                    ],
                    elapsed_ms: t.elapsed().as_millis(),
                })
            }
        })
        .collect();
    run_jobs(jobs)
}
