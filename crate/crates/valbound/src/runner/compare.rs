//! Method comparison: run several clipping methods over the same seeds and
//! summarize per-checkpoint means with 95% normal-approximation confidence
//! half-widths.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::clipping::{clipped_value_iteration, ClipConfig};
use crate::dqn::dqn_train;
use crate::error::{Error, Result};
use crate::runner::config::{parse_clip_method, ExperimentConfig};
use crate::runner::{artifacts, run_jobs};

/// Sample mean and 95% half-width (`1.96 sd / sqrt(n)`); a single sample has
/// half-width zero.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

#[derive(Serialize)]
struct Checkpoint {
    env_step: usize,
    eval_reward_mean: f64,
    eval_reward_ci95: f64,
    violation_mean: f64,
    violation_ci95: f64,
}

#[derive(Serialize)]
struct IterationSummary {
    values: Vec<f64>,
    mean: f64,
    ci95: f64,
}

#[derive(Serialize)]
struct MethodSummary {
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    checkpoints: Option<Vec<Checkpoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<IterationSummary>,
}

#[derive(Serialize)]
struct CompareSummary {
    kind: String,
    seeds: Vec<u64>,
    methods: Vec<MethodSummary>,
    warnings: Vec<String>,
}

pub(crate) fn run_compare(
    config: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<Vec<super::SeedArtifacts>> {
    let section = config.compare.as_ref().expect("validated compare config");
    let mut warnings = Vec::new();
    if config.seeds.len() == 1 {
        warnings.push("single seed: confidence half-widths are reported as 0".to_owned());
    }
    let t = Instant::now();
    let mut files = Vec::new();
    let mut methods = Vec::new();
    match section.of.as_str() {
        "clip" => {
            let mdp = config.build_tabular_env(base)?;
            let reg = config.regularization(mdp.num_states, mdp.num_actions)?;
            let tols = config.tolerances;
            for name in &section.methods {
                let method = parse_clip_method(name, "compare.methods")?;
                let clip = ClipConfig {
                    method,
                    eta: config.clip_config()?.eta,
                };
                let jobs: Vec<_> = config
                    .seeds
                    .iter()
                    .map(|&seed| {
                        let mdp = mdp.clone();
                        let reg = reg.clone();
                        let dir = out_dir.join(name).join(format!("seed_{seed}"));
                        move || {
                            std::fs::create_dir_all(&dir)?;
                            let (report, trace) = clipped_value_iteration(
                                &mdp,
                                &reg,
                                &clip,
                                tols.tol,
                                tols.max_iter,
                            )?;
                            artifacts::emit_maze_figure_data(&trace, &dir.join("trace.csv"))?;
                            Ok(report.iterations as f64)
                        }
                    })
                    .collect();
                let iterations = run_jobs(jobs)?;
                for seed in &config.seeds {
                    files.push(format!("{name}/seed_{seed}/trace.csv"));
                }
                let (mean, ci95) = mean_ci95(&iterations);
                methods.push(MethodSummary {
                    method: name.clone(),
                    checkpoints: None,
                    iterations: Some(IterationSummary {
                        values: iterations,
                        mean,
                        ci95,
                    }),
                });
            }
        }
        "dqn" => {
            let env_params = config
                .env
                .as_ref()
                .and_then(|e| e.mountain_car)
                .unwrap_or_default();
            let expected_rows = {
                let d = config.dqn.clone().unwrap_or_default();
                d.total_steps / d.eval_interval
            };
            for name in &section.methods {
                let method = parse_clip_method(name, "compare.methods")?;
                let jobs: Vec<_> = config
                    .seeds
                    .iter()
                    .map(|&seed| {
                        let mut dqn = config.dqn.clone().unwrap_or_default();
                        dqn.clip_method = method;
                        if let Some(clip) = &config.clip {
                            dqn.eta = clip.eta;
                        }
                        dqn.seed = seed;
                        let dir = out_dir.join(name).join(format!("seed_{seed}"));
                        move || {
                            std::fs::create_dir_all(&dir)?;
                            let run = dqn_train(&env_params, &dqn)?;
                            artifacts::write_train_log_csv(&run.log, &dir.join("train_log.csv"))?;
                            Ok(run.log)
                        }
                    })
                    .collect();
                let logs = run_jobs(jobs)?;
                for seed in &config.seeds {
                    files.push(format!("{name}/seed_{seed}/train_log.csv"));
                }
                for log in &logs {
                    if log.rows.len() != expected_rows {
                        return Err(Error::Precondition(format!(
                            "mismatched budgets: a {name} run logged {} checkpoints, expected {expected_rows}",
                            log.rows.len()
                        )));
                    }
                }
                let mut checkpoints = Vec::with_capacity(expected_rows);
                for row_idx in 0..expected_rows {
                    let rewards: Vec<f64> = logs
                        .iter()
                        .map(|l| l.rows[row_idx].mean_eval_reward)
                        .collect();
                    let violations: Vec<f64> =
                        logs.iter().map(|l| l.rows[row_idx].violation_sum).collect();
                    let (rm, rc) = mean_ci95(&rewards);
                    let (vm, vc) = mean_ci95(&violations);
                    checkpoints.push(Checkpoint {
                        env_step: logs[0].rows[row_idx].env_step,
                        eval_reward_mean: rm,
                        eval_reward_ci95: rc,
                        violation_mean: vm,
                        violation_ci95: vc,
                    });
                }
                methods.push(MethodSummary {
                    method: name.clone(),
                    checkpoints: Some(checkpoints),
                    iterations: None,
                });
            }
        }
        other => {
            return Err(Error::Config {
                field: "compare.of".into(),
                message: format!("unknown comparison kind {other:?}"),
            })
        }
    }
    let summary = CompareSummary {
        kind: section.of.clone(),
        seeds: config.seeds.clone(),
        methods,
        warnings,
    };
    std::fs::write(
        out_dir.join("summary.json"),
        crate::io::to_json_string_pretty(&summary)?,
    )?;
    files.push("summary.json".to_owned());
    Ok(vec![super::SeedArtifacts {
        files,
        elapsed_ms: t.elapsed().as_millis(),
    }])
}
