//! Experiment CLI: thin argument parsing over the library runner.
//!
//! ```text
//! valbound <solve|bounds|clip|compose-check|dqn|compare> --config <path> [--output <dir>] [--seeds a,b,c]
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use valbound::runner::{run, RunOptions, TaskKind};

const USAGE: &str = "usage: valbound <solve|bounds|clip|compose-check|dqn|compare> \
--config <path> [--output <dir>] [--seeds a,b,c]

Runs the experiment described by a JSON config file. The subcommand must
match the config's `task` field. `--output` and `--seeds` override the
corresponding config fields. VALBOUND_THREADS caps worker parallelism.";

fn parse_task(name: &str) -> Option<TaskKind> {
    Some(match name {
        "solve" => TaskKind::Solve,
        "bounds" => TaskKind::Bounds,
        "clip" => TaskKind::Clip,
        "compose-check" => TaskKind::ComposeCheck,
        "dqn" => TaskKind::Dqn,
        "compare" => TaskKind::Compare,
        _ => return None,
    })
}

fn fail(message: &str, code: u8) -> ExitCode {
    eprintln!("error: {message}");
    eprintln!("{USAGE}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        println!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let Some(task) = parse_task(&args[0]) else {
        return fail(&format!("unknown subcommand {:?}", args[0]), 2);
    };

    let mut config_path: Option<PathBuf> = None;
    let mut options = RunOptions::default();
    let mut i = 1;
    while i < args.len() {
        match args[i].as_str() {
            "--config" => {
                i += 1;
                match args.get(i) {
                    Some(p) => config_path = Some(PathBuf::from(p)),
                    None => return fail("--config needs a path", 2),
                }
            }
            "--output" => {
                i += 1;
                match args.get(i) {
                    Some(p) => options.output_override = Some(PathBuf::from(p)),
                    None => return fail("--output needs a directory", 2),
                }
            }
            "--seeds" => {
                i += 1;
                let Some(list) = args.get(i) else {
                    return fail("--seeds needs a comma-separated list", 2);
                };
                let mut seeds = Vec::new();
                for part in list.split(',') {
                    match part.trim().parse::<u64>() {
                        Ok(s) => seeds.push(s),
                        Err(_) => return fail(&format!("bad seed {part:?}"), 2),
                    }
                }
                options.seeds_override = Some(seeds);
            }
            other => return fail(&format!("unknown argument {other:?}"), 2),
        }
        i += 1;
    }
    let Some(config_path) = config_path else {
        return fail("--config is required", 2);
    };

    // The config's task must agree with the subcommand.
    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(doc) => {
            if doc.get("task").and_then(|t| t.as_str()) != Some(task.name()) {
                eprintln!(
                    "error: invalid config field `task`: expected \"{}\" for this subcommand",
                    task.name()
                );
                return ExitCode::from(2);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    match run(&config_path, &options) {
        Ok(outcome) => {
            eprintln!(
                "wrote {} artifacts under {}",
                outcome.outputs.len(),
                outcome.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
