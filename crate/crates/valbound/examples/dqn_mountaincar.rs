//! A short MountainCar DQN run with hard target clipping, printing the
//! training log. Full-length comparisons run through
//! `valbound compare --config data/configs/dqn_compare_full.json`.
//!
//! ```bash
//! cargo run --release --example dqn_mountaincar
//! ```

use valbound::clipping::ClipMethod;
use valbound::dqn::{dqn_train, DqnConfig};
use valbound::envs::MountainCarParams;

fn main() -> valbound::Result<()> {
    let params = MountainCarParams::default();
    let config = DqnConfig {
        total_steps: 30_000,
        clip_method: ClipMethod::Hard,
        seed: 1,
        ..DqnConfig::default()
    };
    println!(
        "MountainCar DQN, hard clipping, {} steps, seed {} (a few minutes)...\n",
        config.total_steps, config.seed
    );
    let run = dqn_train(&params, &config)?;
    println!("env_step   eval_reward   bellman_loss   violation_sum   epsilon");
    for row in &run.log.rows {
        println!(
            "{:>8}   {:>11.1}   {:>12.4}   {:>13.3}   {:>7.3}",
            row.env_step, row.mean_eval_reward, row.bellman_loss, row.violation_sum, row.epsilon
        );
    }
    println!(
        "\nhard-clip breaches: {} (targets always stayed inside their bounds)",
        run.log.hard_clip_breaches
    );
    Ok(())
}
