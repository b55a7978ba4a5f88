//! Value iteration on the default maze with per-iteration bound computation
//! and each clipping rule, tracing residuals, delta extrema, and violations.
//!
//! ```bash
//! cargo run --release --example clipped_value_iteration
//! ```

use valbound::clipping::{clipped_value_iteration, ClipConfig, ClipMethod};
use valbound::envs::maze::{build_maze, MazeSpec};
use valbound::mdp::RegularizationSpec;

fn main() -> valbound::Result<()> {
    let spec = MazeSpec::default_experiment();
    let maze = build_maze(&spec)?;
    let reg = RegularizationSpec::soft_uniform(spec.beta, maze.mdp.num_states, 4)?;
    let tol = 1e-6;

    println!("method     iterations   final residual   max violation   final gap");
    let mut baseline = None;
    for method in [
        ClipMethod::None,
        ClipMethod::Hard,
        ClipMethod::Soft,
        ClipMethod::Smoothed,
    ] {
        let (report, trace) =
            clipped_value_iteration(&maze.mdp, &reg, &ClipConfig::new(method), tol, 5000)?;
        let max_violation = trace
            .rows
            .iter()
            .map(|r| r.violation_sum)
            .fold(0.0f64, f64::max);
        let last = trace.rows.last().unwrap();
        let h = 1.0 / (1.0 - spec.gamma);
        let gap = spec.gamma * h * (last.sup_delta - last.inf_delta);
        println!(
            "{:<9}  {:>10}   {:>14.3e}   {:>13.3e}   {:>9.3e}",
            method.name(),
            report.iterations,
            report.residual,
            max_violation,
            gap
        );
        match &baseline {
            None => baseline = Some(report.q),
            Some(q) => {
                let dist = report.q.linf_distance(q);
                assert!(dist <= 1e-8, "fixed points diverged: {dist}");
            }
        }
    }
    println!("\nall methods converged to the same table (within 1e-8).");
    println!("the trace columns feed the per-iteration CSV emitted by `valbound clip`.");
    Ok(())
}
