//! Command-line interface.

use std::path::PathBuf;

use aoi_secrecy::OutageConvention;
use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, Experiment, FileConfig, Method, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "aoi-secrecy", version, about = "Secrecy age analytics, oracle and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average secrecy age against the ratio p/q.
    Fig1(CommonArgs),
    /// Secrecy objective against the transmission probability.
    Fig2(CommonArgs),
    /// Cross-check the evaluation methods against declared tolerances.
    Compare(CommonArgs),
    /// Closed-form optimal transmission probability against a grid search.
    Optimize(CommonArgs),
}

impl Command {
    pub fn split(&self) -> (Experiment, &CommonArgs) {
        match self {
            Command::Fig1(a) => (Experiment::Fig1, a),
            Command::Fig2(a) => (Experiment::Fig2, a),
            Command::Compare(a) => (Experiment::Compare, a),
            Command::Optimize(a) => (Experiment::Optimize, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file, or JSON with a `.json` extension.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV destination; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Base seed of the Monte Carlo streams.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Outage convention: `paper` or `strict`.
    #[arg(long, value_parser = parse_convention)]
    pub convention: Option<OutageConvention>,
    /// Comma-separated methods: closed_form, oracle, monte_carlo.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,

    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q: Option<Vec<f64>>,
    #[arg(long = "p-tx", value_delimiter = ',', num_args = 1..)]
    pub p_tx: Option<Vec<f64>>,
    /// Secrecy age outage thresholds.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub eta: Option<Vec<u32>>,
    /// Ratios p/q for fig1.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub ratio: Option<Vec<f64>>,

    /// Slots per replication, burn-in included.
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub replications: Option<u32>,
    /// Fixed oracle truncation instead of the tail-bound choice.
    #[arg(long)]
    pub truncation: Option<u32>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Closed form vs oracle tolerance on probabilities.
    #[arg(long = "prob-tol")]
    pub prob_tol: Option<f64>,
    /// Closed form vs oracle tolerance on the average secrecy age.
    #[arg(long = "mean-tol")]
    pub mean_tol: Option<f64>,
    /// Allowed Monte Carlo deviation in standard errors.
    #[arg(long = "mc-sigma")]
    pub mc_sigma: Option<f64>,
    /// Grid step of the optimizer's brute-force search.
    #[arg(long)]
    pub step: Option<f64>,
    /// Write per-replication trajectories into this directory.
    #[arg(long, value_name = "DIR")]
    pub trace: Option<PathBuf>,
    /// Write oracle stationary vectors into this directory.
    #[arg(long = "dump-oracle", value_name = "DIR")]
    pub dump_oracle: Option<PathBuf>,
}

fn parse_convention(s: &str) -> Result<OutageConvention, String> {
    s.parse().map_err(|_| format!("unknown convention `{s}` (paper, strict)"))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Defaults, then the config file, then flags.
pub fn build_spec(experiment: Experiment, args: &CommonArgs) -> Result<SweepSpec, ConfigError> {
    let mut spec = SweepSpec::defaults(experiment);
    if let Some(path) = &args.config {
        spec.apply_file(FileConfig::load(path)?)?;
    }
    let a = args.clone();
    set(&mut spec.output, a.out.map(Some));
    set(&mut spec.sim.seed, a.seed);
    set(&mut spec.convention, a.convention);
    set(&mut spec.methods, a.methods);
    set(&mut spec.p, a.p);
    set(&mut spec.q, a.q);
    set(&mut spec.p_tx, a.p_tx);
    set(&mut spec.eta_th, a.eta);
    set(&mut spec.ratio, a.ratio);
    set(&mut spec.sim.horizon, a.horizon);
    set(&mut spec.sim.burn_in, a.burn_in);
    set(&mut spec.sim.replications, a.replications);
    set(&mut spec.oracle.truncation, a.truncation.map(Some));
    set(&mut spec.workers, a.workers.map(Some));
    set(&mut spec.tolerances.probability, a.prob_tol);
    set(&mut spec.tolerances.mean, a.mean_tol);
    set(&mut spec.tolerances.mc_sigma, a.mc_sigma);
    set(&mut spec.step, a.step);
    set(&mut spec.trace, a.trace.map(Some));
    set(&mut spec.dump_oracle, a.dump_oracle.map(Some));
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<SweepSpec, ConfigError> {
        let cli = Cli::try_parse_from(args).unwrap();
        let (exp, common) = cli.command.split();
        build_spec(exp, common)
    }

    #[test]
    fn flags_override_defaults() {
        let spec = parse(&[
            "aoi-secrecy", "compare", "--p", "0.3,0.4", "--eta", "2", "--methods", "closed_form,oracle",
            "--convention", "paper", "--seed", "7", "--workers", "2",
        ])
        .unwrap();
        assert_eq!(spec.p, vec![0.3, 0.4]);
        assert_eq!(spec.eta_th, vec![2]);
        assert_eq!(spec.methods, vec![Method::ClosedForm, Method::Oracle]);
        assert_eq!(spec.convention, OutageConvention::PaperPrinted);
        assert_eq!(spec.sim.seed, 7);
        assert_eq!(spec.workers, Some(2));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("aoi-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fig2.toml");
        std::fs::write(&path, "[grid]\nq = [0.25]\neta_th = 3\n").unwrap();
        let spec = parse(&["aoi-secrecy", "fig2", "--config", path.to_str().unwrap(), "--eta", "4"]).unwrap();
        assert_eq!(spec.q, vec![0.25]);
        assert_eq!(spec.eta_th, vec![4]);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn bad_flags() {
        assert!(Cli::try_parse_from(["aoi-secrecy", "fig1", "--convention", "loose"]).is_err());
        assert!(Cli::try_parse_from(["aoi-secrecy", "fig1", "--methods", "guess"]).is_err());
        assert!(parse(&["aoi-secrecy", "compare", "--methods", "oracle"]).is_err());
        assert!(parse(&["aoi-secrecy", "fig2", "--p-tx", "1.5"]).is_err());
    }
}
