//! Debug exports: oracle stationary vectors and simulated trajectories.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use aoi_secrecy::oracle::SteadyState;
use aoi_secrecy::sim::Trajectory;
use aoi_secrecy::{ChannelParams, Policy};

use crate::config::SweepSpec;
use crate::LabError;

/// Longest trajectory accepted for export.
pub const MAX_TRACE_SLOTS: u64 = 1_000_000;

/// File-name tag of a parameter point, e.g. `p0.8_q0.2_tx1`.
pub fn point_tag(params: ChannelParams, policy: Policy) -> String {
    format!("p{}_q{}_tx{}", params.p(), params.q(), policy.p_tx())
}

fn create(dir: &Path, name: String) -> Result<(PathBuf, BufWriter<File>), LabError> {
    std::fs::create_dir_all(dir).map_err(|source| LabError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| LabError::Io {
        path: path.clone(),
        source,
    })?;
    Ok((path, BufWriter::new(file)))
}

/// Writes `i,j,probability` for every state of the truncated chain.
pub fn write_oracle_csv<W: Write>(steady: &SteadyState, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["i", "j", "probability"])?;
    for (i, j, prob) in steady.entries() {
        w.write_record([i.to_string(), j.to_string(), format!("{prob:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `slot,delta_d,delta_e,secrecy_age` for the first `slots` slots of
/// one replication, burn-in included.
pub fn write_trace_csv<W: Write>(
    params: ChannelParams,
    policy: Policy,
    seed: u64,
    replication: u32,
    slots: u64,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["slot", "delta_d", "delta_e", "secrecy_age"])?;
    for rec in Trajectory::new(params, policy, seed, replication).take(slots as usize) {
        w.write_record([
            rec.slot.to_string(),
            rec.state.delta_d().to_string(),
            rec.state.delta_e().to_string(),
            rec.state.secrecy_age().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn maybe_dump_oracle(
    spec: &SweepSpec,
    params: ChannelParams,
    policy: Policy,
    steady: &SteadyState,
) -> Result<(), LabError> {
    let Some(dir) = &spec.dump_oracle else {
        return Ok(());
    };
    let (path, file) = create(dir, format!("oracle_{}.csv", point_tag(params, policy)))?;
    write_oracle_csv(steady, file).map_err(|e| LabError::Csv { path, source: e })
}

pub fn maybe_trace(spec: &SweepSpec, params: ChannelParams, policy: Policy) -> Result<(), LabError> {
    let Some(dir) = &spec.trace else {
        return Ok(());
    };
    for k in 0..spec.sim.replications {
        let (path, file) = create(dir, format!("trace_{}_r{k}.csv", point_tag(params, policy)))?;
        write_trace_csv(params, policy, spec.sim.seed, k, spec.sim.horizon, file)
            .map_err(|e| LabError::Csv { path, source: e })?;
    }
    Ok(())
}
