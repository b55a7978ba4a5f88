//! Solve the default maze with the soft Bellman backup and print the value
//! landscape and greedy policy.
//!
//! ```bash
//! cargo run --release --example solve_maze
//! ```

use valbound::envs::maze::{build_maze, MazeSpec};
use valbound::mdp::{boltzmann_policy, hard_state_value, solve, RegularizationSpec};

fn main() -> valbound::Result<()> {
    let spec = MazeSpec::default_experiment();
    let maze = build_maze(&spec)?;
    let reg = RegularizationSpec::soft_uniform(spec.beta, maze.mdp.num_states, 4)?;
    let report = solve(&maze.mdp, &reg, 1e-10, 5000)?;
    println!(
        "solved {} states in {} iterations (residual {:.2e})",
        maze.mdp.num_states, report.iterations, report.residual
    );

    let v = hard_state_value(&report.q)?;
    println!("\nstate values (walls are #):");
    for r in 0..maze.height {
        let mut line = String::new();
        for c in 0..maze.width {
            match maze.state_at(r, c) {
                Some(s) => line.push_str(&format!("{:7.2}", v[s])),
                None => line.push_str("      #"),
            }
        }
        println!("{line}");
    }

    let greedy = boltzmann_policy(
        &report.q,
        &RegularizationSpec::standard(maze.mdp.num_states, 4),
    )?;
    let arrows = ['^', '>', 'v', '<'];
    println!("\ngreedy policy (S start, G goal):");
    for r in 0..maze.height {
        let mut line = String::new();
        for c in 0..maze.width {
            match maze.state_at(r, c) {
                Some(s) if s == maze.goal => line.push('G'),
                Some(s) if s == maze.start => line.push('S'),
                Some(s) => {
                    let best = (0..4)
                        .max_by(|&a, &b| {
                            greedy.probs[[s, a]]
                                .partial_cmp(&greedy.probs[[s, b]])
                                .unwrap()
                        })
                        .unwrap();
                    line.push(arrows[best]);
                }
                None => line.push('#'),
            }
        }
        println!("{line}");
    }
    Ok(())
}
