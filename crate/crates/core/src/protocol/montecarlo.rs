use rayon::prelude::*;
use serde::Serialize;

use super::{run, ProtocolKind, ProtocolTrace, UnknownQubit};
use crate::error::{Error, Result};
use crate::ledger::Purpose;
use crate::rng::{haar_qubit, SeedTree, StreamPurpose};

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run_id: u64,
    pub psi: UnknownQubit,
    pub trace: ProtocolTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub protocol: ProtocolKind,
    pub runs: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Teleportation bits sent per run; `None` if runs disagreed.
    pub bits_per_run: Option<u64>,
}

/// Ideal runs on Haar-random inputs. Run `i` draws its input from stream
/// `(i, InputState)`, so both protocols see the same states for a given seed.
pub fn run_batch(kind: ProtocolKind, n_runs: u64, seeds: SeedTree) -> Result<Vec<RunRecord>> {
    if n_runs == 0 {
        return Err(Error::Config("n_runs must be at least 1".into()));
    }
    (0..n_runs)
        .into_par_iter()
        .map(|run_id| {
            let psi = haar_qubit(&mut seeds.stream(run_id, StreamPurpose::InputState));
            let trace = run(kind, &psi, &mut seeds.stream(run_id, StreamPurpose::Measurement))?;
            Ok(RunRecord { run_id, psi, trace })
        })
        .collect()
}

pub fn summarize(kind: ProtocolKind, records: &[RunRecord]) -> MonteCarloSummary {
    let fids: Vec<f64> = records.iter().map(|r| r.trace.fidelity_achieved).collect();
    let bits: Vec<u64> = records.iter().map(|r| r.trace.ledger.total(Some(Purpose::Teleport))).collect();
    let bits_per_run = match bits.first() {
        Some(&b) if bits.iter().all(|&x| x == b) => Some(b),
        _ => None,
    };
    MonteCarloSummary {
        protocol: kind,
        runs: records.len() as u64,
        mean_fidelity: fids.iter().sum::<f64>() / fids.len().max(1) as f64,
        min_fidelity: fids.iter().copied().fold(f64::INFINITY, f64::min),
        bits_per_run,
    }
}

pub fn monte_carlo(kind: ProtocolKind, n_runs: u64, seeds: SeedTree) -> Result<MonteCarloSummary> {
    Ok(summarize(kind, &run_batch(kind, n_runs, seeds)?))
}
