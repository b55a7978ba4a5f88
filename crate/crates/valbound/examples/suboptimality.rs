//! Bound the suboptimality of a policy from its own value function alone:
//! `H inf d <= Q* - Q^pi <= H sup d` without ever solving for Q*.
//!
//! ```bash
//! cargo run --release --example suboptimality
//! ```

use valbound::bounds::suboptimality_bounds;
use valbound::mdp::{
    boltzmann_policy, policy_evaluation, random_mdp, solve, PolicyTable, RegularizationSpec,
};
use valbound::rng::Stream;

fn main() -> valbound::Result<()> {
    let mut rng = Stream::seed_from_u64(21);
    let mdp = random_mdp(&mut rng, 6, 3, 0.9);
    let reg = RegularizationSpec::soft_uniform(1.0, 6, 3)?;
    let q_star = solve(&mdp, &reg, 1e-12, 200_000)?.q;

    println!("policy                 bound on Q* - Q^pi        true gap range");
    let check = |label: &str, pi: &PolicyTable| -> valbound::Result<()> {
        let q_pi = policy_evaluation(&mdp, &reg, pi, 1e-12)?;
        let rep = suboptimality_bounds(&mdp, &reg, &q_pi)?;
        let gaps: Vec<f64> = q_star
            .values
            .iter()
            .zip(q_pi.values.iter())
            .map(|(star, pi)| star - pi)
            .collect();
        let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo >= rep.lo - 1e-9 && hi <= rep.hi + 1e-9);
        println!(
            "{label:<20}  [{:>8.4}, {:>8.4}]   [{:>8.4}, {:>8.4}]",
            rep.lo, rep.hi, lo, hi
        );
        Ok(())
    };

    check("uniform", &PolicyTable::uniform(6, 3))?;
    check("random", &PolicyTable::random(&mut rng, 6, 3))?;
    check("boltzmann(Q*)", &boltzmann_policy(&q_star, &reg)?)?;
    println!("\nevery true gap lies inside its bound.");
    Ok(())
}
