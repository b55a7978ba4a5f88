//! Double-sided bounds on the optimal value function from an arbitrary
//! estimate: the worse the estimate, the wider the sandwich; the optimum is
//! always inside it.
//!
//! ```bash
//! cargo run --release --example bounds_from_estimate
//! ```

use valbound::bounds::{bounds_from_delta, delta_soft, reward_only_bounds};
use valbound::mdp::{random_mdp, solve, QTable, RegularizationSpec};
use valbound::rng::Stream;

fn main() -> valbound::Result<()> {
    let mut rng = Stream::seed_from_u64(7);
    let mdp = random_mdp(&mut rng, 8, 3, 0.95);
    let reg = RegularizationSpec::soft_uniform(1.0, 8, 3)?;
    let q_star = solve(&mdp, &reg, 1e-12, 200_000)?.q;

    println!("estimate                        gap (linf)   contains Q*");
    let report = |label: &str, q: &QTable| -> valbound::Result<()> {
        let delta = delta_soft(&mdp, &reg, q)?;
        let pair = bounds_from_delta(&mdp, &delta)?;
        let gap = pair
            .upper
            .iter()
            .zip(pair.lower.iter())
            .map(|(u, l)| u - l)
            .fold(0.0f64, f64::max);
        let contained = q_star
            .values
            .iter()
            .zip(pair.lower.iter().zip(pair.upper.iter()))
            .all(|(q, (l, u))| *q >= l - 1e-9 && *q <= u + 1e-9);
        println!("{label:<30}  {gap:>10.4}   {contained}");
        Ok(())
    };

    report("zero table", &QTable::zeros(8, 3))?;
    report(
        "random in [-5, 5]",
        &QTable::random(&mut rng, 8, 3, -5.0, 5.0),
    )?;
    // Partially converged estimates tighten the sandwich.
    for iters in [5usize, 20, 80] {
        let mut q = QTable::zeros(8, 3);
        for _ in 0..iters {
            q = valbound::soft_backup(&mdp, &reg, &q)?;
        }
        report(&format!("{iters} backups from zero"), &q)?;
    }
    report("the optimum itself", &q_star)?;

    let lemma = reward_only_bounds(&mdp)?;
    println!(
        "\nestimate-free reward-only bounds: gap {:.4} everywhere",
        lemma.upper[[0, 0]] - lemma.lower[[0, 0]]
    );
    Ok(())
}
