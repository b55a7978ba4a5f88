//! CSV and JSON artifact writers. All floats render with 17 significant
//! digits so artifacts round-trip exactly.

use std::path::Path;

use crate::bounds::BoundPair;
use crate::clipping::ClipTrace;
use crate::dqn::TrainLog;
use crate::error::Result;
use crate::io::csv_row;
use crate::mdp::QTable;

/// Fig.3-style per-iteration trace:
/// `iteration,residual,inf_delta,sup_delta,mean_q,violation_sum`.
pub fn emit_maze_figure_data(trace: &ClipTrace, path: &Path) -> Result<()> {
    let mut out = String::from("iteration,residual,inf_delta,sup_delta,mean_q,violation_sum\n");
    for row in &trace.rows {
        out.push_str(&csv_row(
            &[row.iteration],
            &[
                row.residual,
                row.inf_delta,
                row.sup_delta,
                row.mean_q,
                row.violation_sum,
            ],
        ));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Bound tables as `state,action,lower,upper,delta` rows.
pub fn write_bounds_csv(
    bounds: &BoundPair,
    delta: &ndarray::Array2<f64>,
    path: &Path,
) -> Result<()> {
    let mut out = String::from("state,action,lower,upper,delta\n");
    let (ns, na) = bounds.lower.dim();
    for s in 0..ns {
        for a in 0..na {
            out.push_str(&csv_row(
                &[s, a],
                &[bounds.lower[[s, a]], bounds.upper[[s, a]], delta[[s, a]]],
            ));
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Q table as `state,action,q` rows.
pub fn write_q_csv(q: &QTable, path: &Path) -> Result<()> {
    let mut out = String::from("state,action,q\n");
    for ((s, a), v) in q.values.indexed_iter() {
        out.push_str(&csv_row(&[s, a], &[*v]));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Training log as
/// `env_step,mean_eval_reward,bellman_loss,clip_loss,violation_sum,epsilon`.
pub fn write_train_log_csv(log: &TrainLog, path: &Path) -> Result<()> {
    let mut out =
        String::from("env_step,mean_eval_reward,bellman_loss,clip_loss,violation_sum,epsilon\n");
    for row in &log.rows {
        out.push_str(&csv_row(
            &[row.env_step],
            &[
                row.mean_eval_reward,
                row.bellman_loss,
                row.clip_loss,
                row.violation_sum,
                row.epsilon,
            ],
        ));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
