use std::process::ExitCode;

use clap::Parser;
use gomsfem::cli::{exit_code, run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let result = args.into_config().and_then(|cfg| run(&cfg).map(|out| (cfg, out)));
    match result {
        Ok((cfg, out)) => {
            let h = &out.history;
            let last = h.rows.last().expect("history has at least one row");
            let goal = last.goal_error.map_or("n/a".to_string(), |e| format!("{e:.3e}"));
            println!(
                "{:?} after {} iterations: dof {}, goal error {goal}; outputs in {}",
                h.termination,
                h.iterations(),
                out.space.dim(),
                cfg.out.display()
            );
            ExitCode::from(exit_code(h.termination) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
