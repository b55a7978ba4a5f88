//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test -p valbound --test acceptance --
//! --nocapture` to see the lines; the full-scale training criterion
//! dominates the runtime (tens of minutes, scaling with core count).

use ndarray::{Array2, Array3};
use valbound::bounds::{
    bounds_from_delta, delta_for, delta_soft, identity_lower_bound, suboptimality_bounds,
};
use valbound::clipping::{clipped_value_iteration, ClipConfig, ClipMethod};
use valbound::composition::{
    inverse_reward, std_composition_correction, verify_exact_composition, CompositionRule,
    CompositionSpec,
};
use valbound::dqn::{dqn_train, mlp_gradients, DqnConfig, MlpParams, TrainLog};
use valbound::envs::maze::{build_maze, MazeSpec};
use valbound::envs::{add_identity_action, MountainCarParams};
use valbound::lipschitz::{
    extrema_bounds, lipschitz_constants, propagated_bounds, v_error_bound, DeltaSample,
    ErrorProfile, ErrorVariant, LipschitzSpec, SamplePoint,
};
use valbound::mdp::{
    policy_evaluation, random_mdp, solve, PolicyTable, QTable, RegularizationSpec, TabularMdp,
};
use valbound::rng::Stream;

const ORACLE_TOL: f64 = 1e-12;
const ORACLE_ITERS: usize = 400_000;
const CONTAINMENT_SLACK: f64 = 1e-9;

fn oracle(mdp: &TabularMdp, reg: &RegularizationSpec) -> QTable {
    solve(mdp, reg, ORACLE_TOL, ORACLE_ITERS)
        .expect("oracle solve")
        .q
}

/// Criterion 1 — double-sided bound containment over 200 random MDPs with
/// random estimates, in soft mode (beta 0.1 / 1 / 10) and standard mode.
#[test]
fn acceptance_01_bound_containment() {
    let start = std::time::Instant::now();
    let mut rng = Stream::seed_from_u64(9001);
    let mut checked = 0usize;
    for trial in 0..200 {
        let ns = 2 + rng.index(9); // up to 10 states
        let na = 1 + rng.index(4); // up to 4 actions
        let gamma = rng.uniform_in(0.5, 0.99);
        let mdp = random_mdp(&mut rng, ns, na, gamma);
        let reg = match trial % 4 {
            0 => RegularizationSpec::soft_uniform(0.1, ns, na).unwrap(),
            1 => RegularizationSpec::soft_uniform(1.0, ns, na).unwrap(),
            2 => RegularizationSpec::soft_uniform(10.0, ns, na).unwrap(),
            _ => RegularizationSpec::standard(ns, na),
        };
        let q_star = oracle(&mdp, &reg);
        let q = QTable::random(&mut rng, ns, na, -5.0, 5.0);
        let delta = delta_for(&mdp, &reg, &q).unwrap();
        let pair = bounds_from_delta(&mdp, &delta).unwrap();
        for s in 0..ns {
            for a in 0..na {
                let target = q_star.values[[s, a]];
                assert!(
                    target >= pair.lower[[s, a]] - CONTAINMENT_SLACK,
                    "criterion 1 violation at trial {trial} ({s},{a}): {target} < {}",
                    pair.lower[[s, a]]
                );
                assert!(
                    target <= pair.upper[[s, a]] + CONTAINMENT_SLACK,
                    "criterion 1 violation at trial {trial} ({s},{a}): {target} > {}",
                    pair.upper[[s, a]]
                );
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 60.0,
        "criterion 1 runtime {elapsed:.1}s exceeds one minute"
    );
    println!(
        "PASS criterion 1: oracle contained at all {checked} state-actions across 200 random MDPs, zero violations ({elapsed:.1}s)"
    );
}

/// Criterion 2 — during soft value iteration on the default maze the bound
/// gap equals gamma*H*(sup delta - inf delta) at every interior entry, its
/// sup norm is at most twice gamma*H times the Bellman residual, and the
/// final gap at residual 1e-9 is below 1e-7.
#[test]
fn acceptance_02_tightness_upon_convergence() {
    let spec = MazeSpec::default_experiment();
    let maze = build_maze(&spec).unwrap();
    let mdp = &maze.mdp;
    let reg = RegularizationSpec::soft_uniform(spec.beta, mdp.num_states, mdp.num_actions).unwrap();
    let gamma = mdp.discount;
    let h = 1.0 / (1.0 - gamma);
    let tol = 1e-9;

    let mut q = QTable::zeros(mdp.num_states, mdp.num_actions);
    let mut final_gap = f64::INFINITY;
    let mut iterations = 0;
    for iteration in 1..=5000 {
        let delta = delta_soft(mdp, &reg, &q).unwrap();
        let pair = bounds_from_delta(mdp, &delta).unwrap();
        let expected_gap = gamma * h * (delta.sup_delta - delta.inf_delta);
        let mut gap_linf = 0.0f64;
        for s in 0..mdp.num_states {
            for a in 0..mdp.num_actions {
                let gap = pair.upper[[s, a]] - pair.lower[[s, a]];
                gap_linf = gap_linf.max(gap);
                if !mdp.is_absorbing(s) {
                    // Exact identity modulo one rounding of the shared base.
                    let tolerance = 1e-10 * expected_gap.abs().max(1.0);
                    assert!(
                        (gap - expected_gap).abs() <= tolerance,
                        "iteration {iteration} ({s},{a}): gap {gap} vs identity {expected_gap}"
                    );
                }
            }
        }
        let residual_linf = delta.delta.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(
            gap_linf <= 2.0 * gamma * h * residual_linf + 1e-12,
            "iteration {iteration}: gap {gap_linf} exceeds 2*gamma*H*residual {}",
            2.0 * gamma * h * residual_linf
        );
        let next = QTable {
            values: delta.base.clone(),
        };
        let step = next.linf_distance(&q);
        q = next;
        iterations = iteration;
        if step <= tol {
            final_gap = gamma * h * (delta.sup_delta - delta.inf_delta);
            break;
        }
    }
    assert!(final_gap <= 1e-7, "final gap {final_gap} above 1e-7");
    println!(
        "PASS criterion 2: gap identity held for {iterations} iterations; final gap {final_gap:.2e} <= 1e-7 at residual 1e-9"
    );
}

/// Criterion 3 — the clipped operator's fixed point matches the unclipped
/// one within 1e-8 on the default maze and 50 random MDPs.
#[test]
fn acceptance_03_clipped_fixed_point() {
    let spec = MazeSpec::default_experiment();
    let maze = build_maze(&spec).unwrap();
    let reg =
        RegularizationSpec::soft_uniform(spec.beta, maze.mdp.num_states, maze.mdp.num_actions)
            .unwrap();
    let tol = 1e-12;
    let unclipped = solve(&maze.mdp, &reg, tol, 200_000).unwrap().q;
    let (clipped, _) = clipped_value_iteration(
        &maze.mdp,
        &reg,
        &ClipConfig::new(ClipMethod::Hard),
        tol,
        200_000,
    )
    .unwrap();
    let maze_dist = clipped.q.linf_distance(&unclipped);
    assert!(maze_dist <= 1e-8, "maze fixed points differ by {maze_dist}");

    let mut rng = Stream::seed_from_u64(9003);
    let mut worst: f64 = maze_dist;
    for trial in 0..50 {
        let ns = 2 + rng.index(8);
        let na = 1 + rng.index(4);
        let gamma = rng.uniform_in(0.5, 0.97);
        let mdp = random_mdp(&mut rng, ns, na, gamma);
        let beta = [0.1, 1.0, 10.0][trial % 3];
        let reg = RegularizationSpec::soft_uniform(beta, ns, na).unwrap();
        let plain = solve(&mdp, &reg, tol, 200_000).unwrap().q;
        let (hard, _) =
            clipped_value_iteration(&mdp, &reg, &ClipConfig::new(ClipMethod::Hard), tol, 200_000)
                .unwrap();
        let dist = hard.q.linf_distance(&plain);
        assert!(dist <= 1e-8, "trial {trial}: fixed points differ by {dist}");
        worst = worst.max(dist);
    }
    println!(
        "PASS criterion 3: clipped and unclipped fixed points agree within 1e-8 on the maze and 50 random MDPs (worst {worst:.2e})"
    );
}

/// Criterion 4 — iterations to residual 1e-6 on the default maze with hard
/// clipping do not exceed the unclipped count.
#[test]
fn acceptance_04_maze_iteration_count() {
    let spec = MazeSpec::default_experiment();
    let maze = build_maze(&spec).unwrap();
    let reg =
        RegularizationSpec::soft_uniform(spec.beta, maze.mdp.num_states, maze.mdp.num_actions)
            .unwrap();
    let tol = 1e-6;
    let (none, _) = clipped_value_iteration(
        &maze.mdp,
        &reg,
        &ClipConfig::new(ClipMethod::None),
        tol,
        5000,
    )
    .unwrap();
    let (hard, _) = clipped_value_iteration(
        &maze.mdp,
        &reg,
        &ClipConfig::new(ClipMethod::Hard),
        tol,
        5000,
    )
    .unwrap();
    assert!(
        hard.iterations <= none.iterations,
        "hard clipping took {} iterations vs {} unclipped",
        hard.iterations,
        none.iterations
    );
    println!(
        "PASS criterion 4: iterations to 1e-6 with hard clipping {} <= {} without",
        hard.iterations, none.iterations
    );
}

/// Deterministic forward-chain task family for the composition suite.
fn chain_family(rng: &mut Stream, len: usize, num_actions: usize) -> (TabularMdp, TabularMdp) {
    let mut transition = Array3::zeros((len, num_actions, len));
    for s in 0..len - 1 {
        for a in 0..num_actions {
            let hop = 1 + (a % 2);
            transition[[s, a, (s + hop).min(len - 1)]] = 1.0;
        }
    }
    for a in 0..num_actions {
        transition[[len - 1, a, len - 1]] = 1.0;
    }
    let interior = Array2::from_shape_fn((len, num_actions), |_| rng.uniform_in(-1.0, 0.0));
    let build = |rng: &mut Stream, interior: &Array2<f64>| {
        let mut reward = interior.clone();
        for a in 0..num_actions {
            reward[[len - 1, a]] = rng.uniform_in(-1.0, 2.0);
        }
        TabularMdp::new(transition.clone(), reward, 1.0, vec![len - 1]).unwrap()
    };
    let a = build(rng, &interior);
    let b = build(rng, &interior);
    (a, b)
}

/// Criterion 5 — exact log-sum-exp composition over 20 random deterministic
/// absorbing-chain pairs at tau in {0.5, 1, 2}, plus a mean-composition
/// negative control.
#[test]
fn acceptance_05_exact_composition() {
    let mut rng = Stream::seed_from_u64(9005);
    let mut worst: f64 = 0.0;
    for pair_idx in 0..20 {
        let len = 4 + rng.index(5);
        let (a, b) = chain_family(&mut rng, len, 2);
        let tasks = [a, b];
        for &tau in &[0.5, 1.0, 2.0] {
            let weights = vec![rng.uniform_in(0.1, 3.0), rng.uniform_in(0.1, 3.0)];
            let spec = CompositionSpec::logsumexp(weights, tau);
            let report = verify_exact_composition(&tasks, &spec, 1e-8).unwrap();
            assert!(
                report.pass,
                "pair {pair_idx}, tau {tau}: residual {}",
                report.residual
            );
            worst = worst.max(report.residual);
        }
    }
    // Negative control: averaging distinct tasks leaves a real residual.
    let mut transition = Array3::zeros((5, 2, 5));
    for s in 0..4 {
        transition[[s, 0, s + 1]] = 1.0;
        transition[[s, 1, (s + 2).min(4)]] = 1.0;
    }
    for a in 0..2 {
        transition[[4, a, 4]] = 1.0;
    }
    let mut r1 = Array2::from_elem((5, 2), -0.2);
    let mut r2 = r1.clone();
    r1[[4, 0]] = 3.0;
    r1[[4, 1]] = 0.0;
    r2[[4, 0]] = 0.0;
    r2[[4, 1]] = 3.0;
    let t1 = TabularMdp::new(transition.clone(), r1, 1.0, vec![4]).unwrap();
    let t2 = TabularMdp::new(transition, r2, 1.0, vec![4]).unwrap();
    let mean_spec = CompositionSpec {
        weights: vec![1.0, 1.0],
        tau: 1.0,
        rule: CompositionRule::Mean,
    };
    let control = verify_exact_composition(&[t1, t2], &mean_spec, 1e-8).unwrap();
    assert!(
        control.residual > 1e-3,
        "negative control residual {} is not above 1e-3",
        control.residual
    );
    println!(
        "PASS criterion 5: 60 log-sum-exp compositions exact (worst residual {worst:.2e}); mean-rule control residual {:.2e} > 1e-3",
        control.residual
    );
}

/// Criterion 6 — standard-RL composition and shaping reconstructions agree
/// with direct value iteration within 1e-8 for identity, max, and mean
/// compositions; inverse rewards round-trip within 1e-8.
#[test]
fn acceptance_06_standard_composition_and_shaping() {
    let mut rng = Stream::seed_from_u64(9006);
    let reg_for = RegularizationSpec::standard;
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let ns = 3 + rng.index(5);
        let na = 1 + rng.index(3);
        let gamma = rng.uniform_in(0.5, 0.95);
        let shared = random_mdp(&mut rng, ns, na, gamma);
        let mut second = shared.clone();
        second.reward = Array2::from_shape_fn((ns, na), |_| rng.uniform_in(-1.0, 1.0));
        let reg = reg_for(ns, na);
        let q1 = oracle(&shared, &reg);
        let q2 = oracle(&second, &reg);

        for rule in [
            CompositionRule::Custom(std::sync::Arc::new(|v: &[f64]| v[0])),
            CompositionRule::Max,
            CompositionRule::Mean,
        ] {
            let identity_like = matches!(rule, CompositionRule::Custom(_));
            let spec = CompositionSpec {
                weights: vec![1.0; if identity_like { 1 } else { 2 }],
                tau: 1.0,
                rule,
            };
            let (subtasks, q_tables): (Vec<TabularMdp>, Vec<QTable>) = if identity_like {
                (vec![shared.clone()], vec![q1.clone()])
            } else {
                (
                    vec![shared.clone(), second.clone()],
                    vec![q1.clone(), q2.clone()],
                )
            };
            let artifacts = std_composition_correction(&subtasks, &q_tables, &spec).unwrap();
            let mut tuple = vec![0.0; subtasks.len()];
            let composed_reward = Array2::from_shape_fn((ns, na), |(s, a)| {
                for (j, t) in subtasks.iter().enumerate() {
                    tuple[j] = t.reward[[s, a]];
                }
                spec.apply(&tuple)
            });
            let composite =
                TabularMdp::new(shared.transition.clone(), composed_reward, gamma, vec![]).unwrap();
            let direct = oracle(&composite, &reg);
            let dist = artifacts.reconstructed.linf_distance(&direct);
            assert!(dist <= 1e-8, "trial {trial}: reconstruction off by {dist}");
            worst = worst.max(dist);
        }

        // Inverse-reward round trip on a fresh random table.
        let q = QTable::random(&mut rng, ns, na, -3.0, 3.0);
        let r = inverse_reward(&q, &shared, &reg).unwrap();
        let task = TabularMdp::new(shared.transition.clone(), r, gamma, vec![]).unwrap();
        let back = oracle(&task, &reg);
        let rt = back.linf_distance(&q);
        assert!(rt <= 1e-8, "trial {trial}: round trip off by {rt}");
        worst = worst.max(rt);
    }
    println!(
        "PASS criterion 6: identity/max/mean reconstructions and inverse-reward round trips within 1e-8 on 20 instances (worst {worst:.2e})"
    );
}

/// Criterion 7 — suboptimality containment for 100 random (MDP, policy)
/// pairs: H inf d <= Q* - Q^pi <= H sup d everywhere, slack 1e-9.
#[test]
fn acceptance_07_suboptimality_containment() {
    let mut rng = Stream::seed_from_u64(9007);
    let mut checked = 0usize;
    for trial in 0..100 {
        let ns = 2 + rng.index(7);
        let na = 1 + rng.index(4);
        let gamma = rng.uniform_in(0.5, 0.95);
        let mdp = random_mdp(&mut rng, ns, na, gamma);
        let reg = RegularizationSpec::soft_uniform([0.1, 1.0, 10.0][trial % 3], ns, na).unwrap();
        let q_star = oracle(&mdp, &reg);
        let pi = PolicyTable::random(&mut rng, ns, na);
        let q_pi = policy_evaluation(&mdp, &reg, &pi, ORACLE_TOL).unwrap();
        let report = suboptimality_bounds(&mdp, &reg, &q_pi).unwrap();
        for s in 0..ns {
            for a in 0..na {
                let gap = q_star.values[[s, a]] - q_pi.values[[s, a]];
                assert!(
                    gap >= report.lo - CONTAINMENT_SLACK && gap <= report.hi + CONTAINMENT_SLACK,
                    "trial {trial} ({s},{a}): gap {gap} outside [{}, {}]",
                    report.lo,
                    report.hi
                );
                checked += 1;
            }
        }
    }
    println!(
        "PASS criterion 7: suboptimality gap contained at all {checked} state-actions over 100 (MDP, policy) pairs"
    );
}

/// Random deterministic maze layout with one start and one goal.
fn random_deterministic_maze(rng: &mut Stream) -> MazeSpec {
    loop {
        let height = 4 + rng.index(3);
        let width = 4 + rng.index(3);
        let mut grid: Vec<Vec<char>> = (0..height)
            .map(|_| {
                (0..width)
                    .map(|_| if rng.uniform() < 0.2 { '#' } else { '.' })
                    .collect()
            })
            .collect();
        let open: Vec<(usize, usize)> = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .filter(|&(r, c)| grid[r][c] == '.')
            .collect();
        if open.len() < 4 {
            continue;
        }
        let s = open[rng.index(open.len())];
        let mut g = open[rng.index(open.len())];
        while g == s {
            g = open[rng.index(open.len())];
        }
        grid[s.0][s.1] = 'S';
        grid[g.0][g.1] = 'G';
        return MazeSpec {
            rows: grid
                .into_iter()
                .map(|row| row.into_iter().collect())
                .collect(),
            slip: (1.0, 0.0, 0.0),
            step_penalty: -0.1,
            goal_reward: 1.0,
            gamma: 0.98,
            beta: 0.1,
        };
    }
}

/// Criterion 8 — on identity-augmented deterministic gridworlds with random
/// estimates, the identity-action lower bound contains the oracle and
/// dominates the generic lower bound pointwise, on 100 instances. Run in
/// standard mode, where the rollout argument behind the bound is exact.
#[test]
fn acceptance_08_identity_action_bound() {
    let mut rng = Stream::seed_from_u64(9008);
    let mut instances = 0usize;
    while instances < 100 {
        let spec = random_deterministic_maze(&mut rng);
        let maze = build_maze(&spec).unwrap();
        let (aug, map) = add_identity_action(&maze.mdp, spec.step_penalty).unwrap();
        let reg = RegularizationSpec::standard(aug.num_states, aug.num_actions);
        let q_star = oracle(&aug, &reg);
        for _ in 0..5 {
            let q = QTable::random(&mut rng, aug.num_states, aug.num_actions, -5.0, 5.0);
            let id_lower = identity_lower_bound(&aug, &reg, &q, &map).unwrap();
            let generic = bounds_from_delta(&aug, &delta_for(&aug, &reg, &q).unwrap()).unwrap();
            for s in 0..aug.num_states {
                for a in 0..aug.num_actions {
                    assert!(
                        q_star.values[[s, a]] >= id_lower[[s, a]] - CONTAINMENT_SLACK,
                        "instance {instances} ({s},{a}): oracle below the identity bound"
                    );
                    assert!(
                        id_lower[[s, a]] >= generic.lower[[s, a]] - 1e-12,
                        "instance {instances} ({s},{a}): identity bound below the generic bound"
                    );
                }
            }
            instances += 1;
            if instances == 100 {
                break;
            }
        }
    }
    println!(
        "PASS criterion 8: identity-action bound contains the oracle and dominates the generic lower bound on 100 augmented gridworld instances"
    );
}

/// Deterministic 1-D continuous toy on a fine grid: Lipschitz reward,
/// clamped-drift dynamics, Gaussian policy over a discretized action space.
struct GridToy {
    n_s: usize,
    n_a: usize,
    gamma: f64,
    beta: f64,
    reward: Vec<f64>,      // (s, a) row-major
    successor: Vec<usize>, // (s, a) row-major
    mu: Vec<f64>,
}

impl GridToy {
    fn build() -> Self {
        let n_s = 1000;
        let n_a = 21;
        let s_at = |i: usize| -1.0 + 2.0 * i as f64 / (n_s - 1) as f64;
        let a_at = |j: usize| -1.0 + 2.0 * j as f64 / (n_a - 1) as f64;
        let snap = |x: f64| -> usize {
            let t = (x + 1.0) / 2.0 * (n_s - 1) as f64;
            t.round().clamp(0.0, (n_s - 1) as f64) as usize
        };
        let mut reward = vec![0.0; n_s * n_a];
        let mut successor = vec![0usize; n_s * n_a];
        for i in 0..n_s {
            for j in 0..n_a {
                let s = s_at(i);
                let a = a_at(j);
                reward[i * n_a + j] = -(s - 0.5).abs() - 0.1 * a.abs();
                successor[i * n_a + j] = snap((s + 0.1 * a).clamp(-1.0, 1.0));
            }
        }
        let mu = (0..n_s).map(|i| 0.3 * (3.0 * s_at(i)).sin()).collect();
        GridToy {
            n_s,
            n_a,
            gamma: 0.5,
            beta: 1.0,
            reward,
            successor,
            mu,
        }
    }

    fn soft_v(&self, q: &[f64]) -> Vec<f64> {
        (0..self.n_s)
            .map(|i| {
                let row = &q[i * self.n_a..(i + 1) * self.n_a];
                let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = row.iter().map(|x| ((x - m) * self.beta).exp()).sum();
                m + (sum / self.n_a as f64).ln() / self.beta
            })
            .collect()
    }

    /// Soft-optimal table by direct fixed-point iteration (the oracle).
    fn solve_optimal(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.n_s * self.n_a];
        for _ in 0..200 {
            let v = self.soft_v(&q);
            let mut next = q.clone();
            let mut diff = 0.0f64;
            for k in 0..q.len() {
                next[k] = self.reward[k] + self.gamma * v[self.successor[k]];
                diff = diff.max((next[k] - q[k]).abs());
            }
            q = next;
            if diff <= 1e-13 {
                break;
            }
        }
        q
    }

    /// Discretized Gaussian policy weights over the action grid at state i.
    fn policy_row(&self, i: usize, sigma: f64) -> Vec<f64> {
        let a_at = |j: usize| -1.0 + 2.0 * j as f64 / (self.n_a - 1) as f64;
        let mut w: Vec<f64> = (0..self.n_a)
            .map(|j| (-(a_at(j) - self.mu[i]).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= z);
        w
    }

    /// Entropy-regularized value of the Gaussian policy on the grid.
    fn policy_value(&self, sigma: f64) -> Vec<f64> {
        let pi: Vec<Vec<f64>> = (0..self.n_s).map(|i| self.policy_row(i, sigma)).collect();
        let prior = 1.0 / self.n_a as f64;
        let kl: Vec<f64> = (0..self.n_s)
            .map(|i| {
                pi[i]
                    .iter()
                    .filter(|p| **p > 0.0)
                    .map(|p| p * (p / prior).ln())
                    .sum::<f64>()
            })
            .collect();
        let mut q = vec![0.0; self.n_s * self.n_a];
        for _ in 0..200 {
            let w: Vec<f64> = (0..self.n_s)
                .map(|i| {
                    let row = &q[i * self.n_a..(i + 1) * self.n_a];
                    let ev: f64 = row.iter().zip(&pi[i]).map(|(x, p)| x * p).sum();
                    ev - kl[i] / self.beta
                })
                .collect();
            let mut diff = 0.0f64;
            let mut next = q.clone();
            for k in 0..q.len() {
                next[k] = self.reward[k] + self.gamma * w[self.successor[k]];
                diff = diff.max((next[k] - q[k]).abs());
            }
            q = next;
            if diff <= 1e-13 {
                break;
            }
        }
        q
    }
}

/// Criterion 9 — the Lipschitz suite: dataset extrema containment, closed
/// form vs recurrence for L_Q, Monte-Carlo validation of the corrected
/// one-point error bound (with the published variant's failures counted),
/// and propagated bounds containing the fine-grid oracle on the 1-D toy.
#[test]
fn acceptance_09_lipschitz_suite() {
    // (a) extrema containment over 100 random 1-Lipschitz functions.
    let mut rng = Stream::seed_from_u64(9009);
    let n = 500;
    let h = 1.0 / (n - 1) as f64;
    for trial in 0..100 {
        let mut f = vec![rng.uniform_in(-1.0, 1.0)];
        for i in 1..n {
            let prev = f[i - 1];
            f.push(prev + rng.uniform_in(-h, h));
        }
        let true_max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let true_min = f.iter().copied().fold(f64::INFINITY, f64::min);
        let samples: Vec<SamplePoint> = (0..1 + rng.index(10))
            .map(|_| {
                let i = rng.index(n);
                SamplePoint {
                    state: i as f64 * h,
                    action: 0.0,
                    value: f[i],
                }
            })
            .collect();
        let (sup_upper, inf_lower) = extrema_bounds(&samples, 1.0, 1.0).unwrap();
        assert!(true_max <= sup_upper + 1e-12, "trial {trial}");
        assert!(true_min >= inf_lower - 1e-12, "trial {trial}");
    }

    // (b) closed-form L_Q equals the recurrence fixed point within 1e-10.
    let spec = LipschitzSpec {
        l_r: 1.0,
        l_p: 0.5,
        d_s: 2.0,
        d_a: 2.0,
        sigma_min: 1.0,
    };
    let (gamma, beta) = (0.5, 1.0);
    let constants = lipschitz_constants(&spec, gamma, beta).unwrap();
    let mut l = spec.l_r;
    for _ in 0..2000 {
        l = spec.l_r
            + gamma * ((1.0 + constants.l_n) * l + 1.0 / (beta * spec.sigma_min)) * spec.l_p;
    }
    assert!(
        (l - constants.l_q).abs() <= 1e-10,
        "recurrence {l} vs closed form {}",
        constants.l_q
    );

    // (c) Monte-Carlo validation of the corrected one-point error bound over
    // 100 (mu, sigma) pairs, counting published-variant violations.
    let unit = valbound::lipschitz::LipschitzConstants {
        l_n: 0.0,
        l_v: 0.0,
        l_q: 1.0,
        l_delta: 0.0,
    };
    let mut published_violations = 0usize;
    for _ in 0..100 {
        let mu = rng.uniform_in(-2.0, 2.0);
        let sigma = rng.uniform_in(0.2, 2.0);
        let samples = 100_000;
        let mut sum = 0.0;
        for _ in 0..samples {
            let a = mu + sigma * rng.normal();
            sum += (a - mu).abs(); // worst-case kinked 1-Lipschitz Q
        }
        let err = sum / samples as f64;
        let se = sigma / (samples as f64).sqrt();
        let corrected = v_error_bound(&unit, mu, sigma, 0.0, ErrorVariant::Corrected);
        assert!(
            err <= corrected + 3.0 * se,
            "{err} > corrected bound {corrected}"
        );
        let published = v_error_bound(&unit, mu, sigma, 0.0, ErrorVariant::Published);
        if err > published + 3.0 * se {
            published_violations += 1;
        }
    }
    assert!(
        published_violations > 0,
        "expected the published formula to under-cover away from mu = 0"
    );

    // (d) propagated bounds contain the fine-grid oracle on the 1-D toy and
    // are no tighter than the exact bounds from the same estimate.
    let toy = GridToy::build();
    let sigma = 1.0;
    let q_star = toy.solve_optimal();
    let q_pi = toy.policy_value(sigma);
    let constants = lipschitz_constants(&spec, toy.gamma, toy.beta).unwrap();
    let field = valbound::lipschitz::GaussianPolicyField {
        mean: toy.mu.clone(),
        std: vec![sigma; toy.n_s],
        epsilon: 0.0,
    };
    field.validate(spec.sigma_min).unwrap();
    let profile = ErrorProfile::new(&constants, &field, ErrorVariant::Corrected);

    // One-point state values: Q at the grid action nearest the mean, plus
    // the Gaussian entropy term.
    let a_index = |mu: f64| -> usize {
        let t = (mu + 1.0) / 2.0 * (toy.n_a - 1) as f64;
        t.round().clamp(0.0, (toy.n_a - 1) as f64) as usize
    };
    let v_bar: Vec<f64> = (0..toy.n_s)
        .map(|i| {
            valbound::lipschitz::gaussian_v_estimate(
                q_pi[i * toy.n_a + a_index(toy.mu[i])],
                sigma,
                toy.beta,
            )
        })
        .collect();
    // Residual estimates over a strided dataset, each row carrying its own
    // successor error expectation (deterministic successors here).
    let mut samples = Vec::new();
    for i in (0..toy.n_s).step_by(11) {
        for j in (0..toy.n_a).step_by(3) {
            let k = i * toy.n_a + j;
            let sp = toy.successor[k];
            let delta_bar = toy.reward[k] + toy.gamma * v_bar[sp] - q_pi[k];
            samples.push(DeltaSample {
                delta_bar,
                expected_a: profile.a[sp],
            });
        }
    }
    // Exact bounds from the same estimate, for the looseness ordering.
    let v_exact = toy.soft_v(&q_pi);
    let mut sup_delta = f64::NEG_INFINITY;
    let mut inf_delta = f64::INFINITY;
    for k in 0..toy.n_s * toy.n_a {
        let d = toy.reward[k] + toy.gamma * v_exact[toy.successor[k]] - q_pi[k];
        sup_delta = sup_delta.max(d);
        inf_delta = inf_delta.min(d);
    }
    let h_gamma = toy.gamma / (1.0 - toy.gamma);
    let mut contained = 0usize;
    for i in 0..toy.n_s {
        for j in 0..toy.n_a {
            let k = i * toy.n_a + j;
            let succ = [(toy.successor[k], 1.0)];
            let (lower, upper) = propagated_bounds(
                toy.reward[k],
                &succ,
                &v_bar,
                &profile,
                &samples,
                &constants,
                &spec,
                toy.gamma,
            )
            .unwrap();
            let target = q_star[k];
            assert!(
                target >= lower - CONTAINMENT_SLACK && target <= upper + CONTAINMENT_SLACK,
                "toy ({i},{j}): {target} outside [{lower}, {upper}]"
            );
            let exact_upper =
                toy.reward[k] + toy.gamma * v_exact[toy.successor[k]] + h_gamma * sup_delta;
            let exact_lower =
                toy.reward[k] + toy.gamma * v_exact[toy.successor[k]] + h_gamma * inf_delta;
            assert!(
                upper >= exact_upper - 1e-12,
                "toy ({i},{j}): propagated upper tighter than exact"
            );
            assert!(
                lower <= exact_lower + 1e-12,
                "toy ({i},{j}): propagated lower tighter than exact"
            );
            contained += 1;
        }
    }
    println!(
        "PASS criterion 9: extrema containment 100/100; L_Q recurrence agreement 1e-10; corrected error bound held over 100 Monte-Carlo pairs (published variant under-covered {published_violations} times, as documented); propagated bounds contained the oracle at {contained} grid points"
    );
}

fn quartile_means(log: &TrainLog) -> (f64, f64) {
    let rows = &log.rows;
    let q = (rows.len() / 4).max(1);
    let first: f64 = rows[..q].iter().map(|r| r.violation_sum).sum::<f64>() / q as f64;
    let last: f64 = rows[rows.len() - q..]
        .iter()
        .map(|r| r.violation_sum)
        .sum::<f64>()
        / q as f64;
    (first, last)
}

/// Criterion 10 — desk-scale MountainCar DQN: finite-difference gradient
/// check, hard-clip safety, decreasing violation trend for hard and smoothed
/// clipping, and non-inferiority of final evaluation rewards. 150k steps,
/// 10 seeds per method, shared hyperparameters.
#[test]
fn acceptance_10_dqn_desk_scale() {
    let start = std::time::Instant::now();

    // (a) analytic gradients match central finite differences (rel. err <= 1e-4).
    let mut rng = Stream::seed_from_u64(9010);
    let mut net = MlpParams::init(&[2, 4, 3], &mut rng).unwrap();
    let inputs = ndarray::array![[0.4, -0.6], [-0.2, 0.9], [1.1, 0.3]];
    let actions = [0usize, 2, 1];
    let targets = [0.5, -0.7, 0.1];
    let (grads, _, _) = mlp_gradients(&net, &inputs, &actions, &targets, None).unwrap();
    let fd_step = 1e-6;
    let loss = |net: &MlpParams| -> f64 {
        let out = net.forward_batch(&inputs).unwrap();
        (0..3)
            .map(|i| (out[[i, actions[i]]] - targets[i]).powi(2))
            .sum::<f64>()
            / 3.0
    };
    for l in 0..net.num_layers() {
        for idx in 0..net.weights[l].len() {
            let flat = net.weights[l].as_slice_mut().unwrap();
            let orig = flat[idx];
            flat[idx] = orig + fd_step;
            let up = loss(&net);
            net.weights[l].as_slice_mut().unwrap()[idx] = orig - fd_step;
            let down = loss(&net);
            net.weights[l].as_slice_mut().unwrap()[idx] = orig;
            let fd = (up - down) / (2.0 * fd_step);
            let g = grads.weights[l].as_slice().unwrap()[idx];
            let denom = g.abs().max(fd.abs()).max(1e-6);
            assert!(
                (g - fd).abs() / denom <= 1e-4,
                "gradient check failed at layer {l} index {idx}: {g} vs {fd}"
            );
        }
    }

    // Full-scale runs: 150k steps, 10 seeds, all four methods.
    let methods = [
        ClipMethod::None,
        ClipMethod::Hard,
        ClipMethod::Soft,
        ClipMethod::Smoothed,
    ];
    let seeds: Vec<u64> = (0..10).collect();
    let env_params = MountainCarParams::default();
    let jobs: Vec<_> = methods
        .iter()
        .flat_map(|&method| {
            seeds.iter().map(move |&seed| {
                move || {
                    let config = DqnConfig {
                        clip_method: method,
                        seed,
                        ..DqnConfig::default()
                    };
                    let run = dqn_train(&env_params, &config)?;
                    Ok((method, run.log))
                }
            })
        })
        .collect();
    let results = valbound::runner::run_jobs(jobs).expect("training runs");

    let logs_for = |method: ClipMethod| -> Vec<&TrainLog> {
        results
            .iter()
            .filter(|(m, _)| *m == method)
            .map(|(_, log)| log)
            .collect()
    };

    // (b) hard-clipped targets never escape their bounds.
    let hard_breaches: usize = logs_for(ClipMethod::Hard)
        .iter()
        .map(|log| log.hard_clip_breaches)
        .sum();
    assert_eq!(hard_breaches, 0, "hard clipping breached its bounds");

    // The unclipped baseline escapes the never-reached-the-goal floor at
    // some checkpoint of some seed.
    let baseline_improved = logs_for(ClipMethod::None)
        .iter()
        .any(|log| log.rows.iter().any(|r| r.mean_eval_reward > -200.0));
    assert!(
        baseline_improved,
        "no unclipped run ever improved past the -200 floor"
    );

    // (c) violation trend: last-quartile mean below first-quartile mean for
    // hard and smoothed clipping, averaged over seeds.
    let mut trend_report = String::new();
    for method in [ClipMethod::Hard, ClipMethod::Smoothed] {
        let logs = logs_for(method);
        let mut first_sum = 0.0;
        let mut last_sum = 0.0;
        for log in &logs {
            let (first, last) = quartile_means(log);
            first_sum += first;
            last_sum += last;
        }
        let first = first_sum / logs.len() as f64;
        let last = last_sum / logs.len() as f64;
        assert!(
            last < first,
            "{}: last-quartile violation {last:.3} not below first-quartile {first:.3}",
            method.name()
        );
        trend_report.push_str(&format!("{} {first:.1}->{last:.1} ", method.name(),));
    }

    // (d) final evaluation rewards: hard and smoothed within 10 of the
    // unclipped baseline.
    let final_mean = |method: ClipMethod| -> f64 {
        let logs = logs_for(method);
        logs.iter()
            .map(|log| log.rows.last().unwrap().mean_eval_reward)
            .sum::<f64>()
            / logs.len() as f64
    };
    let baseline = final_mean(ClipMethod::None);
    let hard = final_mean(ClipMethod::Hard);
    let smoothed = final_mean(ClipMethod::Smoothed);
    let soft = final_mean(ClipMethod::Soft);
    assert!(
        hard >= baseline - 10.0,
        "hard final reward {hard:.1} more than 10 below baseline {baseline:.1}"
    );
    assert!(
        smoothed >= baseline - 10.0,
        "smoothed final reward {smoothed:.1} more than 10 below baseline {baseline:.1}"
    );

    println!(
        "PASS criterion 10: gradient check passed; 0 hard-clip breaches; violation trend {trend_report}; final rewards none {baseline:.1} / hard {hard:.1} / soft {soft:.1} / smoothed {smoothed:.1} ({:.0}s wall)",
        start.elapsed().as_secs_f64()
    );
}
