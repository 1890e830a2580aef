use std::io::Write;

use serde::Serialize;

use super::{distill_to_threshold, recurrence_map, rounds_to_target, WernerParam};
use crate::error::{Error, Result};
use crate::ledger::CostModel;
use crate::protocol::ProtocolKind;
use crate::rng::{SeedTree, StreamPurpose};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "F_in")]
    pub f_in: f64,
    pub success_prob: f64,
    #[serde(rename = "F_out")]
    pub f_out: f64,
    /// Deterministic levels to the target along the success branch; empty if
    /// the round cap is hit first.
    pub rounds_to_target: Option<u32>,
    /// LOCC bits of one seeded distillation run.
    pub locc_bits: u64,
    pub total_bits_sqtp: u64,
    pub total_bits_kak: u64,
}

/// One row per grid point. Row `i` uses distillation stream `i`.
pub fn sweep(grid: &[f64], target: f64, max_rounds: u32, seeds: SeedTree) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("empty fidelity grid".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &f)| {
            let f = WernerParam::new(f)?;
            let step = recurrence_map(f)?;
            let mut rng = seeds.stream(i as u64, StreamPurpose::Distillation);
            let report = distill_to_threshold(f, target, max_rounds, &mut rng)?;
            Ok(SweepRow {
                f_in: f.value(),
                success_prob: step.success_probability.clamp(0.0, 1.0),
                f_out: step.fidelity_out.clamp(0.0, 1.0),
                rounds_to_target: rounds_to_target(f, target, max_rounds)?,
                locc_bits: report.locc_bits,
                total_bits_sqtp: CostModel::qubit(ProtocolKind::Sqtp).ideal_bits() + report.locc_bits,
                total_bits_kak: CostModel::qubit(ProtocolKind::Kak).ideal_bits() + report.locc_bits,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
