//! Experiment specification: built-in defaults, an optional TOML or JSON
//! config file, then command-line overrides, in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aoi_secrecy::sim::SimConfig;
use aoi_secrecy::{ChannelParams, OutageConvention, Policy, SecrecyThreshold};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid TOML in {path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("config file is for `{file}` but the command is `{command}`")]
    ExperimentMismatch { file: Experiment, command: Experiment },
    #[error("grid `{0}` is empty")]
    EmptyGrid(&'static str),
    #[error("grid `{name}` has invalid value {value}: {reason}")]
    BadValue {
        name: &'static str,
        value: String,
        reason: String,
    },
    #[error("`{0}` needs at least two methods")]
    TooFewMethods(Experiment),
    #[error("`optimize` needs at least two distinct p values to check independence from p")]
    OptimizeNeedsTwoP,
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig1,
    Fig2,
    Compare,
    Optimize,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Compare => "compare",
            Experiment::Optimize => "optimize",
        })
    }
}

/// Evaluation route for a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Oracle,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Oracle => "oracle",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "closed_form" | "closed" | "analytic" => Ok(Method::ClosedForm),
            "oracle" | "chain" => Ok(Method::Oracle),
            "monte_carlo" | "mc" | "simulation" => Ok(Method::MonteCarlo),
            other => Err(format!("unknown method `{other}` (closed_form, oracle, monte_carlo)")),
        }
    }
}

/// Parses a comma-separated method list; duplicates are kept.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub horizon: u64,
    pub burn_in: u64,
    pub replications: u32,
    pub seed: u64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            horizon: SimConfig::DEFAULT_HORIZON,
            burn_in: SimConfig::DEFAULT_BURN_IN,
            replications: SimConfig::DEFAULT_REPLICATIONS,
            seed: SimConfig::DEFAULT_SEED,
        }
    }
}

impl SimSettings {
    /// Core simulator config whose histogram reaches `max_limit`.
    pub fn config(&self, threshold: SecrecyThreshold, max_limit: u32) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            burn_in: self.burn_in,
            replications: self.replications,
            base_seed: self.seed,
            threshold,
            max_gap: SimConfig::DEFAULT_MAX_GAP.max(max_limit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Fixed truncation; chosen per point from the tail bounds when `None`.
    pub truncation: Option<u32>,
    pub min_truncation: u32,
    pub max_truncation: u32,
    /// Target for the boundary probability mass.
    pub probability_tail: f64,
    /// Target for the mean secrecy age lost to the clamp.
    pub mean_tail: f64,
    /// L1 residual at which power iteration stops.
    pub tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            truncation: None,
            min_truncation: 64,
            max_truncation: 1600,
            probability_tail: 1e-10,
            mean_tail: 1e-7,
            tolerance: 1e-12,
        }
    }
}

/// Pass/fail thresholds for `compare`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Closed form vs oracle, probabilities.
    pub probability: f64,
    /// Closed form vs oracle, average secrecy age.
    pub mean: f64,
    /// Allowed Monte Carlo deviation in standard errors.
    pub mc_sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            probability: 1e-9,
            mean: 1e-6,
            mc_sigma: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub p_tx: Vec<f64>,
    pub eta_th: Vec<u32>,
    /// `p / q` ratios for `fig1`.
    pub ratio: Vec<f64>,
    pub methods: Vec<Method>,
    pub convention: OutageConvention,
    pub output: Option<PathBuf>,
    pub sim: SimSettings,
    pub oracle: OracleSettings,
    pub tolerances: Tolerances,
    /// Grid step of the brute-force optimizer.
    pub step: f64,
    /// Worker threads; all available cores when `None`.
    pub workers: Option<usize>,
    /// Directory for per-replication trajectory CSVs.
    pub trace: Option<PathBuf>,
    /// Directory for oracle stationary-vector CSVs.
    pub dump_oracle: Option<PathBuf>,
}

/// `0.05, 0.10, ..., 1.00`.
pub fn default_ptx_grid() -> Vec<f64> {
    (1..=20).map(|k| k as f64 / 20.0).collect()
}

impl SweepSpec {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = SweepSpec {
            experiment,
            p: vec![0.8],
            q: vec![0.2],
            p_tx: vec![1.0],
            eta_th: vec![5],
            ratio: Vec::new(),
            methods: vec![Method::ClosedForm],
            convention: OutageConvention::default(),
            output: None,
            sim: SimSettings::default(),
            oracle: OracleSettings::default(),
            tolerances: Tolerances::default(),
            step: 1e-3,
            workers: None,
            trace: None,
            dump_oracle: None,
        };
        match experiment {
            Experiment::Fig1 => SweepSpec {
                p: Vec::new(),
                q: vec![0.1, 0.2],
                p_tx: vec![0.5, 1.0],
                ratio: (1..=8).map(f64::from).collect(),
                ..base
            },
            Experiment::Fig2 => SweepSpec {
                q: vec![0.2, 0.3],
                eta_th: vec![5, 10],
                p_tx: default_ptx_grid(),
                ..base
            },
            Experiment::Compare => SweepSpec {
                p: vec![0.2, 0.5, 0.8],
                q: vec![0.2, 0.5, 0.8],
                p_tx: vec![0.5, 1.0],
                methods: vec![Method::ClosedForm, Method::Oracle, Method::MonteCarlo],
                ..base
            },
            Experiment::Optimize => SweepSpec {
                p: vec![0.3, 0.8],
                q: vec![0.1, 0.2, 0.25, 0.3, 0.5],
                eta_th: vec![2, 4, 5, 8],
                p_tx: Vec::new(),
                ..base
            },
        }
    }

    /// Checks every grid value against its type's range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |name: &'static str, value: String, reason: String| ConfigError::BadValue { name, value, reason };
        let nonempty = |name: &'static str, len: usize| if len == 0 { Err(ConfigError::EmptyGrid(name)) } else { Ok(()) };

        match self.experiment {
            Experiment::Fig1 => {
                nonempty("q", self.q.len())?;
                nonempty("p_tx", self.p_tx.len())?;
                nonempty("ratio", self.ratio.len())?;
            }
            Experiment::Fig2 | Experiment::Compare => {
                nonempty("p", self.p.len())?;
                nonempty("q", self.q.len())?;
                nonempty("p_tx", self.p_tx.len())?;
                nonempty("eta_th", self.eta_th.len())?;
            }
            Experiment::Optimize => {
                nonempty("q", self.q.len())?;
                nonempty("eta_th", self.eta_th.len())?;
                let mut distinct = self.p.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                if distinct.len() < 2 {
                    return Err(ConfigError::OptimizeNeedsTwoP);
                }
            }
        }
        for &p in &self.p {
            ChannelParams::new(p, 0.0).map_err(|e| bad("p", p.to_string(), e.to_string()))?;
        }
        for &q in &self.q {
            ChannelParams::new(0.0, q).map_err(|e| bad("q", q.to_string(), e.to_string()))?;
        }
        for &tx in &self.p_tx {
            Policy::new(tx).map_err(|e| bad("p_tx", tx.to_string(), e.to_string()))?;
        }
        for &eta in &self.eta_th {
            SecrecyThreshold::new(eta).map_err(|e| bad("eta_th", eta.to_string(), e.to_string()))?;
        }
        for &r in &self.ratio {
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad("ratio", r.to_string(), "must be positive".into()));
            }
        }
        if self.methods.is_empty() {
            return Err(ConfigError::EmptyGrid("methods"));
        }
        if self.experiment == Experiment::Compare && self.methods.len() < 2 {
            return Err(ConfigError::TooFewMethods(self.experiment));
        }
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(bad("step", self.step.to_string(), "must lie in (0, 1]".into()));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Other("workers must be at least 1".into()));
        }
        let sampled = self.uses(Method::Oracle) || self.uses(Method::MonteCarlo);
        if sampled || self.experiment == Experiment::Compare {
            if let Some(q) = self.q.iter().find(|q| **q <= 0.0) {
                return Err(bad("q", q.to_string(), "oracle, monte_carlo and compare need q > 0".into()));
            }
        }
        if sampled {
            if let Some(p) = self.p.iter().find(|p| **p <= 0.0) {
                return Err(bad("p", p.to_string(), "oracle and monte_carlo need p > 0".into()));
            }
        }
        if self.uses(Method::MonteCarlo) && self.experiment == Experiment::Compare && self.sim.replications < 2 {
            return Err(ConfigError::Other(
                "compare needs at least 2 replications for Monte Carlo confidence intervals".into(),
            ));
        }
        if self.trace.is_some() && self.sim.horizon > crate::export::MAX_TRACE_SLOTS {
            return Err(ConfigError::Other(format!(
                "trace export is limited to horizons of {} slots",
                crate::export::MAX_TRACE_SLOTS
            )));
        }
        if self.uses(Method::MonteCarlo) {
            let max_eta = self.eta_th.iter().copied().max().unwrap_or(1);
            self.sim
                .config(SecrecyThreshold::new(max_eta).unwrap(), max_eta)
                .validate()
                .map_err(|e| ConfigError::Other(format!("simulation settings: {e}")))?;
        }
        Ok(())
    }

    pub fn uses(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    /// Applies a parsed config file on top of `self`.
    pub fn apply_file(&mut self, file: FileConfig) -> Result<(), ConfigError> {
        if let Some(exp) = file.experiment {
            if exp != self.experiment {
                return Err(ConfigError::ExperimentMismatch {
                    file: exp,
                    command: self.experiment,
                });
            }
        }
        let g = file.grid;
        set(&mut self.p, g.p.map(OneOrMany::into_vec));
        set(&mut self.q, g.q.map(OneOrMany::into_vec));
        set(&mut self.p_tx, g.p_tx.map(OneOrMany::into_vec));
        set(&mut self.eta_th, g.eta_th.map(OneOrMany::into_vec));
        set(&mut self.ratio, g.ratio.map(OneOrMany::into_vec));
        set(&mut self.methods, file.methods.map(OneOrMany::into_vec));
        if let Some(c) = file.convention {
            self.convention = c
                .parse()
                .map_err(|e| ConfigError::Other(format!("convention `{c}`: {e}")))?;
        }
        set(&mut self.output, file.output.map(Some));
        set(&mut self.workers, file.workers.map(Some));
        set(&mut self.trace, file.trace.map(Some));
        set(&mut self.dump_oracle, file.dump_oracle.map(Some));

        let s = file.simulation;
        set(&mut self.sim.horizon, s.horizon);
        set(&mut self.sim.burn_in, s.burn_in);
        set(&mut self.sim.replications, s.replications);
        set(&mut self.sim.seed, s.seed);

        let o = file.oracle;
        set(&mut self.oracle.truncation, o.truncation.map(Some));
        set(&mut self.oracle.min_truncation, o.min_truncation);
        set(&mut self.oracle.max_truncation, o.max_truncation);
        set(&mut self.oracle.probability_tail, o.probability_tail);
        set(&mut self.oracle.mean_tail, o.mean_tail);
        set(&mut self.oracle.tolerance, o.tolerance);

        let t = file.tolerance;
        set(&mut self.tolerances.probability, t.probability);
        set(&mut self.tolerances.mean, t.mean);
        set(&mut self.tolerances.mc_sigma, t.mc_sigma);
        set(&mut self.step, file.optimize.step);
        Ok(())
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    pub fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub p: Option<OneOrMany<f64>>,
    pub q: Option<OneOrMany<f64>>,
    pub p_tx: Option<OneOrMany<f64>>,
    pub eta_th: Option<OneOrMany<u32>>,
    pub ratio: Option<OneOrMany<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub horizon: Option<u64>,
    pub burn_in: Option<u64>,
    pub replications: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub truncation: Option<u32>,
    pub min_truncation: Option<u32>,
    pub max_truncation: Option<u32>,
    pub probability_tail: Option<f64>,
    pub mean_tail: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    pub probability: Option<f64>,
    pub mean: Option<f64>,
    pub mc_sigma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub step: Option<f64>,
}

/// On-disk config. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub methods: Option<OneOrMany<Method>>,
    pub convention: Option<String>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub trace: Option<PathBuf>,
    pub dump_oracle: Option<PathBuf>,
    pub grid: GridSection,
    pub simulation: SimulationSection,
    pub oracle: OracleSection,
    pub tolerance: ToleranceSection,
    pub optimize: OptimizeSection,
}

impl FileConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|source| ConfigError::Json {
                path: path.to_owned(),
                source,
            })
        } else {
            toml::from_str(&text).map_err(|source| ConfigError::Toml {
                path: path.to_owned(),
                source,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for exp in [Experiment::Fig1, Experiment::Fig2, Experiment::Compare, Experiment::Optimize] {
            SweepSpec::defaults(exp).validate().unwrap();
        }
    }

    #[test]
    fn toml_and_json_agree() {
        let toml_text = r#"
            experiment = "fig2"
            methods = ["closed_form", "monte_carlo"]
            convention = "paper"
            [grid]
            p = 0.7
            q = [0.2, 0.4]
            eta_th = [3, 6]
            [simulation]
            replications = 4
            seed = 9
        "#;
        let json_text = r#"{
            "experiment": "fig2",
            "methods": ["closed_form", "monte_carlo"],
            "convention": "paper",
            "grid": {"p": 0.7, "q": [0.2, 0.4], "eta_th": [3, 6]},
            "simulation": {"replications": 4, "seed": 9}
        }"#;
        let mut a = SweepSpec::defaults(Experiment::Fig2);
        a.apply_file(toml::from_str(toml_text).unwrap()).unwrap();
        let mut b = SweepSpec::defaults(Experiment::Fig2);
        b.apply_file(serde_json::from_str(json_text).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.p, vec![0.7]);
        assert_eq!(a.convention, OutageConvention::PaperPrinted);
        assert_eq!(a.sim.replications, 4);
        a.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(toml::from_str::<FileConfig>("[grid]\nbogus = 1").is_err());
        let mut spec = SweepSpec::defaults(Experiment::Fig1);
        let file: FileConfig = toml::from_str("experiment = \"compare\"").unwrap();
        assert!(matches!(spec.apply_file(file), Err(ConfigError::ExperimentMismatch { .. })));

        spec.q = vec![1.5];
        assert!(matches!(spec.validate(), Err(ConfigError::BadValue { name: "q", .. })));

        let mut cmp = SweepSpec::defaults(Experiment::Compare);
        cmp.methods = vec![Method::ClosedForm];
        assert!(matches!(cmp.validate(), Err(ConfigError::TooFewMethods(_))));
        cmp.methods = vec![Method::ClosedForm, Method::ClosedForm];
        cmp.validate().unwrap();

        let mut opt = SweepSpec::defaults(Experiment::Optimize);
        opt.p = vec![0.5, 0.5];
        assert!(matches!(opt.validate(), Err(ConfigError::OptimizeNeedsTwoP)));

        let mut fig2 = SweepSpec::defaults(Experiment::Fig2);
        fig2.p_tx = vec![0.0];
        assert!(fig2.validate().is_err());
        fig2.p_tx = vec![0.5];
        fig2.eta_th = vec![0];
        assert!(fig2.validate().is_err());
    }

    #[test]
    fn method_lists() {
        assert_eq!(
            parse_methods("closed_form, mc,oracle").unwrap(),
            vec![Method::ClosedForm, Method::MonteCarlo, Method::Oracle]
        );
        assert!(parse_methods("closed_form,psychic").is_err());
    }
}
