//! Standard-RL transfer machinery: compose solved subtasks under any
//! function through a corrective task, shape rewards with any potential, and
//! recover the reward a value table is optimal for.
//!
//! ```bash
//! cargo run --release --example shaping_transfer
//! ```

use ndarray::Array2;
use valbound::composition::{
    inverse_reward, shaping_kappa, std_composition_correction, CompositionRule, CompositionSpec,
};
use valbound::mdp::{hard_state_value, random_mdp, solve, QTable, RegularizationSpec, TabularMdp};
use valbound::rng::Stream;

fn main() -> valbound::Result<()> {
    let mut rng = Stream::seed_from_u64(33);
    let gamma = 0.9;
    let shared = random_mdp(&mut rng, 6, 2, gamma);
    let mut second = shared.clone();
    second.reward = Array2::from_shape_fn((6, 2), |_| rng.uniform_in(-1.0, 1.0));
    let reg = RegularizationSpec::standard(6, 2);
    let q1 = solve(&shared, &reg, 1e-12, 200_000)?.q;
    let q2 = solve(&second, &reg, 1e-12, 200_000)?.q;

    // Composite under f = max, corrected by the kappa task.
    let spec = CompositionSpec {
        weights: vec![1.0, 1.0],
        tau: 1.0,
        rule: CompositionRule::Max,
    };
    let subtasks = [shared.clone(), second.clone()];
    let artifacts = std_composition_correction(&subtasks, &[q1.clone(), q2], &spec)?;
    let composed_reward = Array2::from_shape_fn((6, 2), |(s, a)| {
        shared.reward[[s, a]].max(second.reward[[s, a]])
    });
    let composite = TabularMdp::new(shared.transition.clone(), composed_reward, gamma, vec![])?;
    let oracle = solve(&composite, &reg, 1e-12, 200_000)?.q;
    println!(
        "max-composition: reconstructed V_f + K* matches direct solving to {:.2e}",
        artifacts.reconstructed.linf_distance(&oracle)
    );

    // Shaping transfer: any potential leaves the reconstruction exact.
    let v1 = hard_state_value(&q1)?;
    let shaped = shaping_kappa(&second, &v1)?;
    let oracle2 = solve(&second, &reg, 1e-12, 200_000)?.q;
    println!(
        "shaping with the other task's V*: reconstruction error {:.2e}",
        shaped.reconstructed.linf_distance(&oracle2)
    );

    // Inverse rewards: any table is optimal for some reward.
    let arbitrary = QTable::random(&mut rng, 6, 2, -3.0, 3.0);
    let r = inverse_reward(&arbitrary, &shared, &reg)?;
    let task = TabularMdp::new(shared.transition.clone(), r, gamma, vec![])?;
    let recovered = solve(&task, &reg, 1e-13, 200_000)?.q;
    println!(
        "inverse-reward round trip: solve(dynamics, R(q)) differs from q by {:.2e}",
        recovered.linf_distance(&arbitrary)
    );
    Ok(())
}
