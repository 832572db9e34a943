//! Cross-check of the evaluation methods at each grid point.
//!
//! The first listed method is the reference; every other method yields one
//! record against it. Oracle and Monte Carlo outage figures always measure
//! `secrecy_age <= eta_th`, so a closed form under the paper convention is
//! expected to disagree with them by about `gap_pmf_at_eta`.

use aoi_secrecy::analytics;
use aoi_secrecy::sim::Interval;
use aoi_secrecy::{ChannelParams, Policy, SecrecyThreshold};

use crate::config::{Method, SweepSpec};
use crate::eval::{McRun, OracleRun, Runner};
use crate::table::{fmt9, Table};
use crate::{LabError, Outcome};

pub const COLUMNS: [&str; 19] = [
    "p",
    "q",
    "p_tx",
    "eta_th",
    "convention",
    "reference",
    "candidate",
    "mean_reference",
    "mean_candidate",
    "mean_abs_diff",
    "mean_tolerance",
    "mean_ci_covers",
    "outage_reference",
    "outage_candidate",
    "outage_abs_diff",
    "outage_tolerance",
    "outage_ci_covers",
    "gap_pmf_at_eta",
    "status",
];

/// One metric as produced by one method.
#[derive(Debug, Clone, Copy)]
struct Value {
    estimate: f64,
    /// Present for Monte Carlo figures only.
    interval: Option<Interval>,
}

impl Value {
    fn exact(estimate: f64) -> Self {
        Value { estimate, interval: None }
    }

    fn sampled(interval: Interval) -> Self {
        Value {
            estimate: interval.estimate,
            interval: Some(interval),
        }
    }

    fn standard_error(&self) -> f64 {
        self.interval.and_then(|i| i.standard_error()).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Check {
    reference: f64,
    candidate: f64,
    diff: f64,
    tolerance: f64,
    covers: Option<bool>,
    pass: bool,
}

fn check(reference: Value, candidate: Value, declared: f64, mc_sigma: f64) -> Check {
    let diff = (reference.estimate - candidate.estimate).abs();
    let sampled = reference.interval.is_some() || candidate.interval.is_some();
    let tolerance = if sampled {
        mc_sigma * reference.standard_error().hypot(candidate.standard_error())
    } else {
        declared
    };
    let covers = match (candidate.interval, reference.interval) {
        (Some(c), _) => c.covers(reference.estimate),
        (None, Some(r)) => r.covers(candidate.estimate),
        (None, None) => None,
    };
    Check {
        reference: reference.estimate,
        candidate: candidate.estimate,
        diff,
        tolerance,
        covers,
        pass: diff <= tolerance,
    }
}

#[derive(Default)]
struct Evaluated {
    oracle: Option<OracleRun>,
    mc: Option<McRun>,
}

pub fn run(spec: &SweepSpec, runner: &Runner) -> Result<Outcome, LabError> {
    let mut triples = Vec::new();
    for &p in &spec.p {
        for &q in &spec.q {
            for &tx in &spec.p_tx {
                triples.push((p, q, tx));
            }
        }
    }
    let max_eta = spec.eta_th.iter().copied().max().unwrap_or(1);
    let evaluated = runner.map(&triples, |&(p, q, tx)| -> Result<Evaluated, LabError> {
        let params = ChannelParams::new(p, q)?;
        let policy = Policy::new(tx)?;
        let mut e = Evaluated::default();
        if spec.uses(Method::Oracle) {
            let run = OracleRun::new(params, policy, &spec.oracle)?;
            crate::export::maybe_dump_oracle(spec, params, policy, &run.steady)?;
            e.oracle = Some(run);
        }
        if spec.uses(Method::MonteCarlo) {
            crate::export::maybe_trace(spec, params, policy)?;
            e.mc = Some(runner.replications(params, policy, &spec.sim, max_eta)?);
        }
        Ok(e)
    });
    let evaluated = evaluated.into_iter().collect::<Result<Vec<_>, _>>()?;

    let convention = spec.convention;
    let reference_method = spec.methods[0];
    let mut table = Table::new(&COLUMNS);
    let mut failures = Vec::new();
    let mut records = 0usize;
    for (&(p, q, tx), e) in triples.iter().zip(&evaluated) {
        let params = ChannelParams::new(p, q)?;
        let policy = Policy::new(tx)?;
        for &eta in &spec.eta_th {
            let threshold = SecrecyThreshold::new(eta)?;
            let values = |m: Method| -> Result<(Value, Value), LabError> {
                Ok(match m {
                    Method::ClosedForm => (
                        Value::exact(analytics::average_secrecy_age(params, policy)?.as_f64()),
                        Value::exact(analytics::outage_probability(params, policy, threshold, convention)?),
                    ),
                    Method::Oracle => {
                        let o = e.oracle.as_ref().expect("oracle evaluated");
                        (Value::exact(o.mean), Value::exact(o.outage(eta)))
                    }
                    Method::MonteCarlo => {
                        let m = e.mc.as_ref().expect("monte carlo evaluated");
                        (Value::sampled(m.mean_secrecy_age()), Value::sampled(m.outage(eta)))
                    }
                })
            };
            let pmf = analytics::secrecy_gap_pmf(u64::from(eta), params, policy)?;
            let (ref_mean, ref_out) = values(reference_method)?;
            for &candidate in &spec.methods[1..] {
                let (cand_mean, cand_out) = values(candidate)?;
                let mean = check(ref_mean, cand_mean, spec.tolerances.mean, spec.tolerances.mc_sigma);
                let outage = check(ref_out, cand_out, spec.tolerances.probability, spec.tolerances.mc_sigma);
                let pass = mean.pass && outage.pass;
                records += 1;
                if !pass {
                    failures.push(format!(
                        "p={p} q={q} p_tx={tx} eta_th={eta} {reference_method} vs {candidate}:{}{}",
                        describe("mean", &mean),
                        describe("outage", &outage)
                    ));
                }
                table.push(vec![
                    fmt9(p),
                    fmt9(q),
                    fmt9(tx),
                    eta.to_string(),
                    convention.label().to_string(),
                    reference_method.label().to_string(),
                    candidate.label().to_string(),
                    fmt9(mean.reference),
                    fmt9(mean.candidate),
                    fmt9(mean.diff),
                    fmt9(mean.tolerance),
                    flag(mean.covers),
                    fmt9(outage.reference),
                    fmt9(outage.candidate),
                    fmt9(outage.diff),
                    fmt9(outage.tolerance),
                    flag(outage.covers),
                    fmt9(pmf),
                    if pass { "PASS" } else { "MISMATCH" }.to_string(),
                ]);
            }
        }
    }

    let passed = failures.is_empty();
    let mut summary = format!(
        "compare: {records} records, convention {}, reference {reference_method}, {} mismatches\n",
        convention.label(),
        failures.len()
    );
    for f in &failures {
        summary.push_str("  MISMATCH ");
        summary.push_str(f);
        summary.push('\n');
    }
    summary.push_str(if passed { "verdict: PASS\n" } else { "verdict: FAIL\n" });
    Ok(Outcome { table, summary, passed })
}

fn flag(covers: Option<bool>) -> String {
    match covers {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => String::new(),
    }
}

fn describe(name: &str, c: &Check) -> String {
    if c.pass {
        String::new()
    } else {
        format!(" {name} |diff| {} > {}", fmt9(c.diff), fmt9(c.tolerance))
    }
}
