use std::io::Write;
use std::process::ExitCode;

use aoi_secrecy_lab::cli::{build_spec, Cli};
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, args) = cli.command.split();

    let spec = match build_spec(experiment, args) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match aoi_secrecy_lab::run(&spec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let written = match &spec.output {
        Some(path) => std::fs::write(path, outcome.table.to_csv_bytes())
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(&outcome.table.to_csv_bytes())
            .map_err(anyhow::Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    eprint!("{}", outcome.summary);
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
