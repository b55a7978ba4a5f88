//! ASCII-grid maze environments as tabular MDPs.
//!
//! Characters: `#` wall, `.` open, `S` start, `G` goal. The action space is
//! the four cardinal moves; a move into a wall or off the grid stays put.
//! With slip `(p_intended, p_left, p_right)` the agent moves in the intended
//! direction with `p_intended` and perpendicular to it with `p_left` /
//! `p_right`. The goal is absorbing: its reward is collected once and value
//! never propagates beyond it. Every other state-action pair pays the step
//! penalty.

use ndarray::{Array2, Array3};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::TabularMdp;

/// Default 8x8 layout: start in the lower-left region, goal in the
/// upper-right corner behind walls.
pub const DEFAULT_MAZE: &str = "\
.....#.G
.###.#..
.#...#..
.#.###..
.#.....#
.#####..
........
S....#..";

/// Cardinal actions in fixed order.
pub const MAZE_ACTIONS: [&str; 4] = ["up", "right", "down", "left"];

const DELTAS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// Maze description. `slip` is `(p_intended, p_left, p_right)` where left and
/// right are perpendicular to the intended direction.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MazeSpec {
    pub rows: Vec<String>,
    pub slip: (f64, f64, f64),
    pub step_penalty: f64,
    pub goal_reward: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl MazeSpec {
    /// The default experiment maze: slip (0.5, 0.25, 0.25), step penalty
    /// -0.1, goal reward 1, gamma 0.98, beta 0.1.
    pub fn default_experiment() -> Self {
        MazeSpec {
            rows: DEFAULT_MAZE.lines().map(str::to_owned).collect(),
            slip: (0.5, 0.25, 0.25),
            step_penalty: -0.1,
            goal_reward: 1.0,
            gamma: 0.98,
            beta: 0.1,
        }
    }

    /// Same layout without slip, for deterministic-transition experiments.
    pub fn default_deterministic() -> Self {
        MazeSpec {
            slip: (1.0, 0.0, 0.0),
            ..Self::default_experiment()
        }
    }

    /// Parse rows from a plain-text layout (one row per line).
    pub fn with_layout(mut self, text: &str) -> Self {
        self.rows = text.lines().map(str::to_owned).collect();
        self
    }
}

/// A maze compiled to a [`TabularMdp`] plus the cell/state correspondence.
#[derive(Clone, Debug)]
pub struct BuiltMaze {
    pub mdp: TabularMdp,
    pub start: usize,
    pub goal: usize,
    pub width: usize,
    pub height: usize,
    /// Grid coordinates (row, col) of each state index.
    pub cells: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

impl BuiltMaze {
    /// State index at a grid cell, if the cell is open.
    pub fn state_at(&self, row: usize, col: usize) -> Option<usize> {
        self.cells.iter().position(|&c| c == (row, col))
    }
}

/// Compile a maze spec into an MDP. States are the open cells in row-major
/// order.
pub fn build_maze(spec: &MazeSpec) -> Result<BuiltMaze> {
    let (p_int, p_left, p_right) = spec.slip;
    for (name, p) in [("intended", p_int), ("left", p_left), ("right", p_right)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Precondition(format!(
                "slip probability {name} = {p} out of [0, 1]"
            )));
        }
    }
    if ((p_int + p_left + p_right) - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "slip probabilities must sum to 1, got {}",
            p_int + p_left + p_right
        )));
    }
    if spec.rows.is_empty() {
        return Err(Error::Precondition("maze has no rows".into()));
    }
    let height = spec.rows.len();
    let width = spec.rows[0].chars().count();
    let mut grid = vec![vec!['#'; width]; height];
    let mut start_cell = None;
    let mut goal_cell = None;
    for (r, row) in spec.rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(Error::Precondition(format!(
                "row {r} has {} characters, expected {width} (grid must be rectangular)",
                row.chars().count()
            )));
        }
        for (c, ch) in row.chars().enumerate() {
            match ch {
                '#' | '.' => grid[r][c] = ch,
                'S' => {
                    if start_cell.replace((r, c)).is_some() {
                        return Err(Error::Precondition("more than one 'S'".into()));
                    }
                    grid[r][c] = '.';
                }
                'G' => {
                    if goal_cell.replace((r, c)).is_some() {
                        return Err(Error::Precondition("more than one 'G'".into()));
                    }
                    grid[r][c] = '.';
                }
                other => {
                    return Err(Error::Precondition(format!(
                        "unexpected character {other:?} at row {r}, column {c}"
                    )))
                }
            }
        }
    }
    let start_cell = start_cell.ok_or_else(|| Error::Precondition("missing 'S'".into()))?;
    let goal_cell = goal_cell.ok_or_else(|| Error::Precondition("missing 'G'".into()))?;

    let mut cells = Vec::new();
    let mut state_of = vec![vec![usize::MAX; width]; height];
    for r in 0..height {
        for c in 0..width {
            if grid[r][c] == '.' {
                state_of[r][c] = cells.len();
                cells.push((r, c));
            }
        }
    }
    let ns = cells.len();
    let na = 4;
    let start = state_of[start_cell.0][start_cell.1];
    let goal = state_of[goal_cell.0][goal_cell.1];

    let dest = |r: usize, c: usize, dir: usize| -> usize {
        let (dr, dc) = DELTAS[dir];
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        if nr < 0 || nc < 0 || nr >= height as isize || nc >= width as isize {
            return state_of[r][c];
        }
        let (nr, nc) = (nr as usize, nc as usize);
        if grid[nr][nc] == '#' {
            state_of[r][c]
        } else {
            state_of[nr][nc]
        }
    };

    let mut transition = Array3::zeros((ns, na, ns));
    let mut reward = Array2::from_elem((ns, na), spec.step_penalty);
    for (s, &(r, c)) in cells.iter().enumerate() {
        if s == goal {
            for a in 0..na {
                transition[[s, a, s]] = 1.0;
                reward[[s, a]] = spec.goal_reward;
            }
            continue;
        }
        for a in 0..na {
            // Perpendicular directions: left is counterclockwise of the
            // intended move, right is clockwise.
            let left = (a + 3) % 4;
            let right = (a + 1) % 4;
            transition[[s, a, dest(r, c, a)]] += p_int;
            transition[[s, a, dest(r, c, left)]] += p_left;
            transition[[s, a, dest(r, c, right)]] += p_right;
        }
    }

    let mdp = TabularMdp::new(transition, reward, spec.gamma, vec![goal])?;

    // Reachability by positive-probability moves; unreachable goals warn.
    let mut warnings = Vec::new();
    let mut seen = vec![false; ns];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        for a in 0..na {
            for sp in 0..ns {
                if mdp.transition[[s, a, sp]] > 0.0 && !seen[sp] {
                    seen[sp] = true;
                    stack.push(sp);
                }
            }
        }
    }
    if !seen[goal] {
        warnings.push("goal is unreachable from the start".to_owned());
    }

    Ok(BuiltMaze {
        mdp,
        start,
        goal,
        width,
        height,
        cells,
        warnings,
    })
}

/// Compile a maze spec directly to its MDP.
pub fn maze_to_mdp(spec: &MazeSpec) -> Result<TabularMdp> {
    Ok(build_maze(spec)?.mdp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{boltzmann_policy, solve, RegularizationSpec};

    #[test]
    fn corridor_compiles_to_a_three_state_chain() {
        let spec = MazeSpec {
            rows: vec!["S.G".into()],
            slip: (1.0, 0.0, 0.0),
            step_penalty: -1.0,
            goal_reward: 5.0,
            gamma: 0.9,
            beta: 1.0,
        };
        let maze = build_maze(&spec).unwrap();
        assert_eq!(maze.mdp.num_states, 3);
        assert_eq!(maze.start, 0);
        assert_eq!(maze.goal, 2);
        // Action 1 is "right": 0 -> 1 -> 2 deterministically.
        assert_eq!(maze.mdp.transition[[0, 1, 1]], 1.0);
        assert_eq!(maze.mdp.transition[[1, 1, 2]], 1.0);
        // Up from the corridor bumps the boundary and stays.
        assert_eq!(maze.mdp.transition[[0, 0, 0]], 1.0);
        // Goal is absorbing with the goal reward.
        for a in 0..4 {
            assert_eq!(maze.mdp.transition[[2, a, 2]], 1.0);
            assert_eq!(maze.mdp.reward[[2, a]], 5.0);
        }
        assert_eq!(maze.mdp.reward[[0, 1]], -1.0);
    }

    #[test]
    fn transition_rows_are_stochastic_for_any_slip() {
        for slip in [(1.0, 0.0, 0.0), (0.5, 0.25, 0.25), (0.34, 0.33, 0.33)] {
            let spec = MazeSpec {
                slip,
                ..MazeSpec::default_experiment()
            };
            let maze = build_maze(&spec).unwrap();
            for s in 0..maze.mdp.num_states {
                for a in 0..4 {
                    let sum: f64 = (0..maze.mdp.num_states)
                        .map(|sp| maze.mdp.transition[[s, a, sp]])
                        .sum();
                    assert!((sum - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn default_maze_is_solvable_and_greedy_policy_reaches_the_goal() {
        let spec = MazeSpec::default_experiment();
        let maze = build_maze(&spec).unwrap();
        assert!(maze.warnings.is_empty(), "{:?}", maze.warnings);
        let reg = RegularizationSpec::soft_uniform(spec.beta, maze.mdp.num_states, 4).unwrap();
        let report = solve(&maze.mdp, &reg, 1e-10, 5000).unwrap();
        assert!(report.residual <= 1e-10);
        // Follow greedy intended moves; must reach the goal without cycling.
        let greedy = boltzmann_policy(
            &report.q,
            &RegularizationSpec::standard(maze.mdp.num_states, 4),
        )
        .unwrap();
        let mut s = maze.start;
        for _ in 0..maze.mdp.num_states * 2 {
            if s == maze.goal {
                break;
            }
            let a = (0..4).max_by(|&x, &y| {
                greedy.probs[[s, x]]
                    .partial_cmp(&greedy.probs[[s, y]])
                    .unwrap()
            });
            let a = a.unwrap();
            let (r, c) = maze.cells[s];
            // Intended move only (deterministic walk along the policy).
            let mut dest = s;
            let (dr, dc) = DELTAS[a];
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr >= 0 && nc >= 0 && (nr as usize) < maze.height && (nc as usize) < maze.width {
                if let Some(sp) = maze.state_at(nr as usize, nc as usize) {
                    dest = sp;
                }
            }
            s = dest;
        }
        assert_eq!(s, maze.goal, "greedy rollout did not reach the goal");
    }

    #[test]
    fn identical_specs_build_identical_mdps() {
        let spec = MazeSpec::default_experiment();
        let a = build_maze(&spec).unwrap();
        let b = build_maze(&spec).unwrap();
        for (x, y) in a.mdp.transition.iter().zip(b.mdp.transition.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in a.mdp.reward.iter().zip(b.mdp.reward.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn malformed_grids_are_rejected() {
        let mut spec = MazeSpec::default_experiment();
        spec.rows = vec!["S.".into(), "G".into()];
        assert!(matches!(build_maze(&spec), Err(Error::Precondition(_))));
        let mut spec = MazeSpec::default_experiment();
        spec.rows = vec!["S.".into(), "..".into()];
        assert!(matches!(build_maze(&spec), Err(Error::Precondition(_))));
        let mut spec = MazeSpec::default_experiment();
        spec.rows = vec!["SG".into(), "SG".into()];
        assert!(matches!(build_maze(&spec), Err(Error::Precondition(_))));
    }

    #[test]
    fn unreachable_goal_warns_instead_of_failing() {
        let spec = MazeSpec {
            rows: vec!["S#G".into()],
            slip: (1.0, 0.0, 0.0),
            step_penalty: -0.1,
            goal_reward: 1.0,
            gamma: 0.9,
            beta: 1.0,
        };
        let maze = build_maze(&spec).unwrap();
        assert_eq!(maze.warnings.len(), 1);
    }
}
