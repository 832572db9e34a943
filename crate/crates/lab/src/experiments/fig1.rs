//! Average secrecy age against the ratio `p / q`.

use aoi_secrecy::analytics;
use aoi_secrecy::{ChannelParams, Policy};

use crate::config::{Method, SweepSpec};
use crate::eval::{OracleRun, Runner};
use crate::table::{fmt9, fmt_opt, Table};
use crate::{LabError, Outcome};

pub const COLUMNS: [&str; 9] = [
    "q",
    "p_tx",
    "ratio",
    "p",
    "closed_form",
    "oracle",
    "oracle_bound",
    "monte_carlo",
    "mc_half_width",
];

/// Slack for ratios like `5 * 0.2` that land a rounding error above 1.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Point {
    q: f64,
    p_tx: f64,
    ratio: f64,
    p: f64,
}

pub fn run(spec: &SweepSpec, runner: &Runner) -> Result<Outcome, LabError> {
    let mut points = Vec::new();
    let mut skipped = 0usize;
    for &q in &spec.q {
        for &p_tx in &spec.p_tx {
            for &ratio in &spec.ratio {
                let p = ratio * q;
                if p > 1.0 + FEASIBILITY_SLACK {
                    log::warn!("skipping q={q} p_tx={p_tx} ratio={ratio}: p = {p} exceeds 1");
                    skipped += 1;
                    continue;
                }
                points.push(Point {
                    q,
                    p_tx,
                    ratio,
                    p: p.min(1.0),
                });
            }
        }
    }

    let rows = runner.map(&points, |pt| evaluate(spec, runner, *pt));
    let mut table = Table::new(&COLUMNS);
    for row in rows {
        table.push(row?);
    }
    let summary = format!(
        "fig1: {} rows, {} infeasible ratios skipped, methods {}\n",
        table.rows.len(),
        skipped,
        crate::method_list(&spec.methods)
    );
    Ok(Outcome {
        table,
        summary,
        passed: true,
    })
}

fn evaluate(spec: &SweepSpec, runner: &Runner, pt: Point) -> Result<Vec<String>, LabError> {
    let params = ChannelParams::new(pt.p, pt.q)?;
    let policy = Policy::new(pt.p_tx)?;
    let closed = if spec.uses(Method::ClosedForm) {
        Some(analytics::average_secrecy_age(params, policy)?.as_f64())
    } else {
        None
    };
    let oracle = if spec.uses(Method::Oracle) {
        let run = OracleRun::new(params, policy, &spec.oracle)?;
        crate::export::maybe_dump_oracle(spec, params, policy, &run.steady)?;
        Some((run.mean, run.mean_bound))
    } else {
        None
    };
    let mc = if spec.uses(Method::MonteCarlo) {
        crate::export::maybe_trace(spec, params, policy)?;
        let run = runner.replications(params, policy, &spec.sim, 1)?;
        let mean = run.mean_secrecy_age();
        Some((mean.estimate, mean.half_width))
    } else {
        None
    };
    Ok(vec![
        fmt9(pt.q),
        fmt9(pt.p_tx),
        fmt9(pt.ratio),
        fmt9(pt.p),
        fmt_opt(closed),
        fmt_opt(oracle.map(|o| o.0)),
        fmt_opt(oracle.map(|o| o.1)),
        fmt_opt(mc.map(|m| m.0)),
        fmt_opt(mc.and_then(|m| m.1)),
    ])
}
