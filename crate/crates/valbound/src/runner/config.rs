//! Experiment configuration: strict JSON schema plus field-path validation.
//!
//! Unknown keys are rejected at parse time; semantic problems are reported
//! with the offending field path and exit the CLI with status 2.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::clipping::{ClipConfig, ClipMethod};
use crate::composition::{CompositionRule, CompositionSpec};
use crate::dqn::DqnConfig;
use crate::envs::maze::{MazeSpec, DEFAULT_MAZE};
use crate::error::{Error, Result};
use crate::mdp::{RegularizationSpec, TabularMdp, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Solve,
    Bounds,
    Clip,
    ComposeCheck,
    Dqn,
    Compare,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Solve => "solve",
            TaskKind::Bounds => "bounds",
            TaskKind::Clip => "clip",
            TaskKind::ComposeCheck => "compose-check",
            TaskKind::Dqn => "dqn",
            TaskKind::Compare => "compare",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpSection {
    /// Path to an MDP JSON document, relative to the config file.
    pub path: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MazeSection {
    #[serde(default)]
    pub layout_path: Option<PathBuf>,
    #[serde(default)]
    pub rows: Option<Vec<String>>,
    #[serde(default = "default_slip")]
    pub slip: (f64, f64, f64),
    #[serde(default = "default_step_penalty")]
    pub step_penalty: f64,
    #[serde(default = "default_goal_reward")]
    pub goal_reward: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_slip() -> (f64, f64, f64) {
    (0.5, 0.25, 0.25)
}
fn default_step_penalty() -> f64 {
    -0.1
}
fn default_goal_reward() -> f64 {
    1.0
}
fn default_gamma() -> f64 {
    0.98
}
fn default_beta() -> f64 {
    0.1
}

/// `{"beta": 0.5}` or `{"beta": "standard"}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegSection {
    pub beta: BetaValue,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    Number(f64),
    Keyword(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipSection {
    pub method: String,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_eta() -> f64 {
    ClipConfig::DEFAULT_ETA
}

/// Estimate source for the bounds task.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    pub source: String,
    #[serde(default = "default_low")]
    pub low: f64,
    #[serde(default = "default_high")]
    pub high: f64,
}

fn default_low() -> f64 {
    -5.0
}
fn default_high() -> f64 {
    5.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeSection {
    /// Paths to subtask MDP JSON documents, relative to the config file.
    pub tasks: Vec<PathBuf>,
    pub weights: Vec<f64>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default = "default_compose_tol")]
    pub tol: f64,
}

fn default_tau() -> f64 {
    1.0
}
fn default_rule() -> String {
    "logsumexp".to_owned()
}
fn default_compose_tol() -> f64 {
    1e-8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// "clip" (tabular value iteration) or "dqn".
    pub of: String,
    pub methods: Vec<String>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Top-level experiment configuration document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    #[serde(default)]
    pub mdp: Option<MdpSection>,
    #[serde(default)]
    pub maze: Option<MazeSection>,
    #[serde(default)]
    pub env: Option<MountainCarSection>,
    #[serde(default)]
    pub reg: Option<RegSection>,
    #[serde(default)]
    pub clip: Option<ClipSection>,
    #[serde(default)]
    pub estimate: Option<EstimateSection>,
    #[serde(default)]
    pub compose: Option<ComposeSection>,
    #[serde(default)]
    pub dqn: Option<DqnConfig>,
    #[serde(default)]
    pub compare: Option<CompareSection>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountainCarSection {
    #[serde(default)]
    pub mountain_car: Option<crate::envs::MountainCarParams>,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_owned(),
        message: message.into(),
    }
}

pub fn parse_clip_method(name: &str, field: &str) -> Result<ClipMethod> {
    match name {
        "none" => Ok(ClipMethod::None),
        "hard" => Ok(ClipMethod::Hard),
        "soft" => Ok(ClipMethod::Soft),
        "smoothed" => Ok(ClipMethod::Smoothed),
        other => Err(config_err(
            field,
            format!("unknown clip method {other:?}; expected none|hard|soft|smoothed"),
        )),
    }
}

impl ExperimentConfig {
    /// Semantic validation; runs before anything touches the filesystem.
    pub fn validate(&self) -> Result<()> {
        match self.task {
            TaskKind::Solve | TaskKind::Bounds | TaskKind::Clip => {
                if self.mdp.is_none() && self.maze.is_none() {
                    return Err(config_err(
                        "maze",
                        "solve/bounds/clip need an `mdp` or `maze` section",
                    ));
                }
                if self.mdp.is_some() && self.reg.is_none() {
                    return Err(config_err("reg", "an external MDP needs a `reg` section"));
                }
            }
            TaskKind::ComposeCheck => {
                if self.compose.is_none() {
                    return Err(config_err(
                        "compose",
                        "compose-check needs a `compose` section",
                    ));
                }
            }
            TaskKind::Dqn => {}
            TaskKind::Compare => {
                let compare = self
                    .compare
                    .as_ref()
                    .ok_or_else(|| config_err("compare", "compare needs a `compare` section"))?;
                if compare.methods.is_empty() {
                    return Err(config_err("compare.methods", "at least one method"));
                }
                for (i, m) in compare.methods.iter().enumerate() {
                    parse_clip_method(m, &format!("compare.methods[{i}]"))?;
                }
                match compare.of.as_str() {
                    "clip" => {
                        if self.mdp.is_none() && self.maze.is_none() {
                            return Err(config_err("maze", "clip comparison needs an environment"));
                        }
                    }
                    "dqn" => {}
                    other => {
                        return Err(config_err(
                            "compare.of",
                            format!("unknown comparison kind {other:?}; expected clip|dqn"),
                        ))
                    }
                }
            }
        }
        if let Some(reg) = &self.reg {
            match &reg.beta {
                BetaValue::Number(b) => {
                    if !(*b > 0.0) || !b.is_finite() {
                        return Err(config_err(
                            "reg.beta",
                            format!("beta must be a positive real or \"standard\", got {b}"),
                        ));
                    }
                }
                BetaValue::Keyword(k) if k == "standard" => {}
                BetaValue::Keyword(k) => {
                    return Err(config_err(
                        "reg.beta",
                        format!("unknown keyword {k:?}; expected a number or \"standard\""),
                    ))
                }
            }
        }
        if let Some(clip) = &self.clip {
            let method = parse_clip_method(&clip.method, "clip.method")?;
            if method == ClipMethod::Soft && !(clip.eta > 0.0) {
                return Err(config_err(
                    "clip.eta",
                    "eta must be positive for soft clipping",
                ));
            }
        }
        if let Some(maze) = &self.maze {
            let (a, b, c) = maze.slip;
            if ((a + b + c) - 1.0).abs() > 1e-12 || a < 0.0 || b < 0.0 || c < 0.0 {
                return Err(config_err(
                    "maze.slip",
                    "slip probabilities must be nonnegative and sum to 1",
                ));
            }
            if !(maze.gamma > 0.0 && maze.gamma <= 1.0) {
                return Err(config_err("maze.gamma", "gamma must lie in (0, 1]"));
            }
            if !(maze.beta > 0.0) {
                return Err(config_err("maze.beta", "beta must be positive"));
            }
        }
        if let Some(est) = &self.estimate {
            match est.source.as_str() {
                "zero" | "solve" => {}
                "random" => {
                    if !(est.low < est.high) {
                        return Err(config_err(
                            "estimate.low",
                            "random estimates need low < high",
                        ));
                    }
                }
                other => {
                    return Err(config_err(
                        "estimate.source",
                        format!("unknown source {other:?}; expected zero|random|solve"),
                    ))
                }
            }
        }
        if let Some(compose) = &self.compose {
            if compose.tasks.is_empty() {
                return Err(config_err("compose.tasks", "at least one subtask"));
            }
            if !(compose.tau > 0.0) {
                return Err(config_err("compose.tau", "tau must be positive"));
            }
            for (i, w) in compose.weights.iter().enumerate() {
                if !(*w > 0.0) {
                    return Err(config_err(
                        &format!("compose.weights[{i}]"),
                        "weights must be positive",
                    ));
                }
            }
            match compose.rule.as_str() {
                "logsumexp" | "max" | "mean" => {}
                other => {
                    return Err(config_err(
                        "compose.rule",
                        format!("unknown rule {other:?}; expected logsumexp|max|mean"),
                    ))
                }
            }
        }
        if let Some(dqn) = &self.dqn {
            dqn.validate()
                .map_err(|e| config_err("dqn", e.to_string()))?;
        }
        if !(self.tolerances.tol > 0.0) {
            return Err(config_err("tolerances.tol", "tol must be positive"));
        }
        if self.tolerances.max_iter == 0 {
            return Err(config_err(
                "tolerances.max_iter",
                "max_iter must be positive",
            ));
        }
        let needs_seeds = !matches!(self.task, TaskKind::ComposeCheck);
        if needs_seeds && self.seeds.is_empty() {
            return Err(config_err("seeds", "at least one seed"));
        }
        Ok(())
    }

    /// The regularization to use with the configured tabular environment.
    pub fn regularization(
        &self,
        num_states: usize,
        num_actions: usize,
    ) -> Result<RegularizationSpec> {
        if let Some(reg) = &self.reg {
            return match &reg.beta {
                BetaValue::Number(b) => {
                    RegularizationSpec::soft_uniform(*b, num_states, num_actions)
                }
                BetaValue::Keyword(_) => Ok(RegularizationSpec::standard(num_states, num_actions)),
            };
        }
        if let Some(maze) = &self.maze {
            return RegularizationSpec::soft_uniform(maze.beta, num_states, num_actions);
        }
        Err(config_err("reg", "no regularization available"))
    }

    /// Clip configuration, defaulting to no clipping.
    pub fn clip_config(&self) -> Result<ClipConfig> {
        match &self.clip {
            None => Ok(ClipConfig::new(ClipMethod::None)),
            Some(section) => Ok(ClipConfig {
                method: parse_clip_method(&section.method, "clip.method")?,
                eta: section.eta,
            }),
        }
    }

    /// Build the tabular environment, resolving file paths against `base`.
    pub fn build_tabular_env(&self, base: &Path) -> Result<TabularMdp> {
        if let Some(mdp) = &self.mdp {
            let path = base.join(&mdp.path);
            let text = std::fs::read_to_string(&path)?;
            return TabularMdp::from_json_str(&text);
        }
        if let Some(maze) = &self.maze {
            return Ok(crate::envs::build_maze(&maze.to_spec(base)?)?.mdp);
        }
        Err(config_err("maze", "no tabular environment configured"))
    }

    pub fn composition_spec(&self) -> Result<CompositionSpec> {
        let section = self
            .compose
            .as_ref()
            .ok_or_else(|| config_err("compose", "missing section"))?;
        let rule = match section.rule.as_str() {
            "logsumexp" => CompositionRule::LogSumExpWeighted,
            "max" => CompositionRule::Max,
            "mean" => CompositionRule::Mean,
            other => {
                return Err(config_err(
                    "compose.rule",
                    format!("unknown rule {other:?}"),
                ))
            }
        };
        Ok(CompositionSpec {
            weights: section.weights.clone(),
            tau: section.tau,
            rule,
        })
    }
}

impl MazeSection {
    pub fn to_spec(&self, base: &Path) -> Result<MazeSpec> {
        let rows: Vec<String> = if let Some(rows) = &self.rows {
            rows.clone()
        } else if let Some(path) = &self.layout_path {
            std::fs::read_to_string(base.join(path))?
                .lines()
                .map(str::to_owned)
                .collect()
        } else {
            DEFAULT_MAZE.lines().map(str::to_owned).collect()
        };
        Ok(MazeSpec {
            rows,
            slip: self.slip,
            step_penalty: self.step_penalty,
            goal_reward: self.goal_reward,
            gamma: self.gamma,
            beta: self.beta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(task: &str) -> String {
        format!(r#"{{"task": "{task}", "maze": {{}}, "seeds": [0], "output_dir": "out"}}"#)
    }

    #[test]
    fn minimal_solve_config_parses_with_defaults() {
        let config: ExperimentConfig = serde_json::from_str(&minimal("solve")).unwrap();
        config.validate().unwrap();
        assert_eq!(config.task, TaskKind::Solve);
        let maze = config.maze.as_ref().unwrap();
        assert_eq!(maze.slip, (0.5, 0.25, 0.25));
        assert_eq!(maze.gamma, 0.98);
        assert_eq!(config.tolerances.tol, 1e-10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text =
            r#"{"task": "solve", "maze": {}, "seeds": [0], "output_dir": "out", "extra": 1}"#;
        let parsed: std::result::Result<ExperimentConfig, _> = serde_json::from_str(text);
        let err = parsed.err().unwrap().to_string();
        assert!(err.contains("extra"), "{err}");
    }

    #[test]
    fn negative_beta_names_the_field() {
        let text = r#"{"task": "solve", "maze": {}, "reg": {"beta": -0.5}, "seeds": [0], "output_dir": "out"}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        match config.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "reg.beta"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn standard_keyword_selects_unregularized_mode() {
        let text = r#"{"task": "solve", "maze": {}, "reg": {"beta": "standard"}, "seeds": [0], "output_dir": "out"}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        config.validate().unwrap();
        let reg = config.regularization(3, 2).unwrap();
        assert!(!reg.beta.is_finite());
    }

    #[test]
    fn compose_check_does_not_need_seeds() {
        let text = r#"{"task": "compose-check",
            "compose": {"tasks": ["a.json", "b.json"], "weights": [1.0, 2.0]},
            "output_dir": "out"}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        config.validate().unwrap();
        assert_eq!(config.compose.as_ref().unwrap().tau, 1.0);
    }

    #[test]
    fn missing_seeds_are_a_config_error() {
        let text = r#"{"task": "solve", "maze": {}, "output_dir": "out"}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        match config.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "seeds"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn exit_codes_distinguish_schema_from_runtime() {
        let schema = Error::Config {
            field: "reg.beta".into(),
            message: "bad".into(),
        };
        assert_eq!(schema.exit_code(), 2);
        let runtime = Error::EmptyDataset;
        assert_eq!(runtime.exit_code(), 1);
    }
}
