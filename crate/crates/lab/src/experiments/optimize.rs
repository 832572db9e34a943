//! Closed-form optimal transmission probability against a brute-force grid
//! search, under each outage convention.

use aoi_secrecy::analytics::{self, OutageConvention};
use aoi_secrecy::{AnalyticsError, ChannelParams, Policy, SecrecyThreshold};

use crate::config::SweepSpec;
use crate::eval::Runner;
use crate::table::{fmt9, Table};
use crate::{LabError, Outcome};

pub const COLUMNS: [&str; 10] = [
    "q",
    "eta_th",
    "convention",
    "closed_form_ptx",
    "grid_argmax",
    "abs_gap",
    "grid_step",
    "argmax_by_p",
    "p_independent",
    "status",
];

/// `step, 2 step, ...` up to and including 1.
pub fn ptx_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step + 1e-9).floor() as u64;
    let mut grid: Vec<f64> = (1..=n).map(|k| k as f64 * step).filter(|x| *x <= 1.0).collect();
    if grid.last().is_none_or(|last| 1.0 - last > 1e-12) {
        grid.push(1.0);
    }
    grid
}

/// First grid point attaining the largest objective.
pub fn grid_argmax(
    params: ChannelParams,
    threshold: SecrecyThreshold,
    convention: OutageConvention,
    grid: &[f64],
) -> Result<f64, AnalyticsError> {
    let mut best = (f64::NEG_INFINITY, grid[0]);
    for &x in grid {
        let value = analytics::objective(params, Policy::new(x)?, threshold, convention)?;
        if value > best.0 {
            best = (value, x);
        }
    }
    Ok(best.1)
}

pub fn run(spec: &SweepSpec, runner: &Runner) -> Result<Outcome, LabError> {
    let grid = ptx_grid(spec.step);
    let mut cases = Vec::new();
    for &q in &spec.q {
        for &eta in &spec.eta_th {
            for convention in OutageConvention::ALL {
                cases.push((q, eta, convention));
            }
        }
    }
    let rows = runner.map(&cases, |&(q, eta, convention)| -> Result<(Vec<String>, Option<String>), LabError> {
        let threshold = SecrecyThreshold::new(eta)?;
        let closed = analytics::optimal_ptx(q, threshold, convention)?;
        let argmaxes = spec
            .p
            .iter()
            .map(|&p| grid_argmax(ChannelParams::new(p, q)?, threshold, convention, &grid))
            .collect::<Result<Vec<_>, _>>()?;
        let argmax = argmaxes[0];
        let independent = argmaxes.iter().all(|a| *a == argmax);
        let gap = (closed - argmax).abs();
        let pass = gap <= spec.step * (1.0 + 1e-9) && independent;
        let by_p = spec
            .p
            .iter()
            .zip(&argmaxes)
            .map(|(p, a)| format!("{}:{}", fmt9(*p), fmt9(*a)))
            .collect::<Vec<_>>()
            .join(";");
        let failure = (!pass).then(|| {
            format!(
                "q={q} eta_th={eta} {}: closed form {} grid {} argmax by p {by_p}",
                convention.label(),
                fmt9(closed),
                fmt9(argmax)
            )
        });
        Ok((
            vec![
                fmt9(q),
                eta.to_string(),
                convention.label().to_string(),
                fmt9(closed),
                fmt9(argmax),
                fmt9(gap),
                fmt9(spec.step),
                by_p,
                independent.to_string(),
                if pass { "PASS" } else { "FAIL" }.to_string(),
            ],
            failure,
        ))
    });

    let mut table = Table::new(&COLUMNS);
    let mut failures = Vec::new();
    for row in rows {
        let (row, failure) = row?;
        table.push(row);
        failures.extend(failure);
    }
    let passed = failures.is_empty();
    let mut summary = format!(
        "optimize: {} cases, grid step {}, {} failures\n",
        table.rows.len(),
        spec.step,
        failures.len()
    );
    for f in &failures {
        summary.push_str("  FAIL ");
        summary.push_str(f);
        summary.push('\n');
    }
    summary.push_str(if passed { "verdict: PASS\n" } else { "verdict: FAIL\n" });
    Ok(Outcome { table, summary, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_at_one() {
        let g = ptx_grid(1e-3);
        assert_eq!(g.len(), 1000);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(ptx_grid(0.3), vec![0.3, 0.6, 0.8999999999999999, 1.0]);
    }
}
