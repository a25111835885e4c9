use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use capillary_penrose::cli::{run_batch, Command, EXIT_CONFIG};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Exterior mass of the support
    Mass,
    /// Continuation sweep of capillary surfaces with the free energy mass
    Sweep,
    /// Finite-difference, structural, stability and oracle checks
    Verify,
    /// Flux of the ends against the neck size
    Flux,
}

#[derive(Debug, Parser)]
#[command(name = "capillary-penrose", version, about = "Capillary surfaces and free energy mass on asymptotically flat supports")]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Configuration file; repeat for batch runs
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    /// Output directory, overriding output.dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Configs run in parallel in batch mode
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CAPPEN_LOG", "warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let command = match args.command {
        Cmd::Mass => Command::Mass,
        Cmd::Sweep => Command::Sweep,
        Cmd::Verify => Command::Verify,
        Cmd::Flux => Command::Flux,
    };
    let results = run_batch(command, &args.config, args.out.as_deref(), args.jobs);
    let many = results.len() > 1;
    let mut code = 0;
    for (path, outcome) in &results {
        if many {
            println!("== {} (exit {})", path.display(), outcome.code);
        }
        for line in &outcome.lines {
            if line.starts_with("error:") {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        }
        code = code.max(outcome.code);
    }
    ExitCode::from(code as u8)
}
