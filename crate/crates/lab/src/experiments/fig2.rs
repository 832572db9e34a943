//! Secrecy objective `p_tx (1 - P_out)` against the transmission probability.

use std::collections::{HashMap, HashSet};

use aoi_secrecy::analytics;
use aoi_secrecy::{ChannelParams, Policy, SecrecyThreshold};

use crate::config::{Method, SweepSpec};
use crate::eval::{McRun, OracleRun, Runner};
use crate::table::{fmt9, fmt_opt, Table};
use crate::{LabError, Outcome};

pub const COLUMNS: [&str; 12] = [
    "p",
    "q",
    "eta_th",
    "p_tx",
    "convention",
    "closed_form",
    "oracle",
    "oracle_bound",
    "monte_carlo",
    "mc_half_width",
    "optimal_ptx",
    "optimum",
];

/// Grid values this close to the optimum carry the star themselves.
const SAME_POINT: f64 = 1e-12;

type Key = (u64, u64, u64);

fn key(p: f64, q: f64, tx: f64) -> Key {
    (p.to_bits(), q.to_bits(), tx.to_bits())
}

#[derive(Debug, Clone, Copy)]
struct Row {
    p: f64,
    q: f64,
    eta: u32,
    p_tx: f64,
    optimum: f64,
    starred: bool,
}

#[derive(Default)]
struct Evaluated {
    oracle: Option<OracleRun>,
    mc: Option<McRun>,
}

pub fn run(spec: &SweepSpec, runner: &Runner) -> Result<Outcome, LabError> {
    let convention = spec.convention;
    let mut rows = Vec::new();
    for &p in &spec.p {
        for &q in &spec.q {
            for &eta in &spec.eta_th {
                let threshold = SecrecyThreshold::new(eta)?;
                let optimum = analytics::optimal_ptx(q, threshold, convention)?;
                let mut grid = spec.p_tx.clone();
                if !grid.iter().any(|x| (x - optimum).abs() <= SAME_POINT) {
                    grid.push(optimum);
                }
                grid.sort_by(f64::total_cmp);
                grid.dedup();
                rows.extend(grid.into_iter().map(|p_tx| Row {
                    p,
                    q,
                    eta,
                    p_tx,
                    optimum,
                    starred: (p_tx - optimum).abs() <= SAME_POINT,
                }));
            }
        }
    }

    let mut keys: Vec<(f64, f64, f64)> = Vec::new();
    let mut seen = HashSet::new();
    for r in &rows {
        if seen.insert(key(r.p, r.q, r.p_tx)) {
            keys.push((r.p, r.q, r.p_tx));
        }
    }
    let max_limit = spec
        .eta_th
        .iter()
        .map(|&e| SecrecyThreshold::new(e).map(|t| convention.outage_gap_limit(t)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(1);

    let evaluated = runner.map(&keys, |&(p, q, tx)| -> Result<Evaluated, LabError> {
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
            e.mc = Some(runner.replications(params, policy, &spec.sim, max_limit)?);
        }
        Ok(e)
    });
    let mut cache = HashMap::new();
    for ((p, q, tx), e) in keys.into_iter().zip(evaluated) {
        cache.insert(key(p, q, tx), e?);
    }

    let mut table = Table::new(&COLUMNS);
    let mut stars = Vec::new();
    for r in &rows {
        let params = ChannelParams::new(r.p, r.q)?;
        let policy = Policy::new(r.p_tx)?;
        let threshold = SecrecyThreshold::new(r.eta)?;
        let limit = convention.outage_gap_limit(threshold);
        let e = &cache[&key(r.p, r.q, r.p_tx)];
        let closed = if spec.uses(Method::ClosedForm) {
            Some(analytics::objective(params, policy, threshold, convention)?)
        } else {
            None
        };
        let oracle = e
            .oracle
            .as_ref()
            .map(|o| (r.p_tx * (1.0 - o.outage(limit)), r.p_tx * o.probability_bound()));
        let mc = e.mc.as_ref().map(|m| {
            let out = m.outage(limit);
            (r.p_tx * (1.0 - out.estimate), out.half_width.map(|h| r.p_tx * h))
        });
        if r.starred {
            stars.push(format!("p={} q={} eta_th={}: p_tx*={}", r.p, r.q, r.eta, fmt9(r.optimum)));
        }
        table.push(vec![
            fmt9(r.p),
            fmt9(r.q),
            r.eta.to_string(),
            fmt9(r.p_tx),
            convention.label().to_string(),
            fmt_opt(closed),
            fmt_opt(oracle.map(|o| o.0)),
            fmt_opt(oracle.map(|o| o.1)),
            fmt_opt(mc.map(|m| m.0)),
            fmt_opt(mc.and_then(|m| m.1)),
            fmt9(r.optimum),
            if r.starred { "*".into() } else { String::new() },
        ]);
    }

    let mut summary = format!(
        "fig2: {} rows, convention {}, methods {}\n",
        table.rows.len(),
        convention.label(),
        crate::method_list(&spec.methods)
    );
    for s in stars {
        summary.push_str("  ");
        summary.push_str(&s);
        summary.push('\n');
    }
    Ok(Outcome {
        table,
        summary,
        passed: true,
    })
}
