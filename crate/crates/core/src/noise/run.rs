use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{distill_to_threshold, noisy_branches, werner_state, DistillReport, WernerParam};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ledger::{CostLedger, Purpose};
use crate::protocol::{Party, ProtocolKind, TraceEvent, UnknownQubit};
use crate::rng::{haar_qubit, SeedTree, StreamPurpose};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseConfig {
    /// Fidelity of each freshly shared pair.
    pub noise_f: WernerParam,
    /// Distill until the pair reaches this fidelity; `None` uses raw pairs.
    pub distill_target: Option<f64>,
    pub max_rounds: u32,
}

/// One teleportation over a noisy channel, optionally distilled first.
#[derive(Clone, Debug, Serialize)]
pub struct NoisyRun {
    pub run_id: u64,
    pub protocol: ProtocolKind,
    pub distillation: Option<DistillReport>,
    /// Bell fidelity of the pair actually used for teleportation.
    pub channel_fidelity: f64,
    pub outcome: BitString,
    /// Every classical message of the run, distillation first.
    pub messages: Vec<TraceEvent>,
    #[serde(skip)]
    pub ledger: CostLedger,
    /// Fidelity of Bob's output given the sampled outcome.
    pub fidelity: f64,
    /// Copies of the unknown state used up while establishing the channel.
    /// The chained-XOR protocol entangles the input with the pair before it
    /// is shared, so each distillation attempt needs its own copy.
    pub unknown_copies_consumed: u64,
}

impl NoisyRun {
    pub fn attempts(&self) -> u64 {
        self.distillation.as_ref().map_or(0, |d| d.attempts)
    }
}

fn message(ledger: &mut CostLedger, from: Party, to: Party, bits: BitString, purpose: Purpose) -> Result<TraceEvent> {
    ledger.record(from, to, bits.len() as u32, purpose)?;
    Ok(TraceEvent::MessageSent { party: from, to, bits, purpose })
}

pub fn run_noisy(
    kind: ProtocolKind,
    psi: &UnknownQubit,
    config: &NoiseConfig,
    seeds: SeedTree,
    run_id: u64,
) -> Result<NoisyRun> {
    let mut ledger = CostLedger::new();
    let mut messages = Vec::new();
    let distillation = match config.distill_target {
        Some(target) => {
            let mut rng = seeds.stream(run_id, StreamPurpose::Distillation);
            let report = distill_to_threshold(config.noise_f, target, config.max_rounds, &mut rng)?;
            for attempt in &report.log {
                let a = attempt.announced.select(&[0]);
                let b = attempt.announced.select(&[1]);
                messages.push(message(&mut ledger, Party::Alice, Party::Bob, a, Purpose::Locc)?);
                messages.push(message(&mut ledger, Party::Bob, Party::Alice, b, Purpose::Locc)?);
            }
            Some(report)
        }
        None => None,
    };
    let channel_fidelity = distillation
        .as_ref()
        .map_or(config.noise_f.value(), |d| d.final_fidelity);
    let channel = werner_state(WernerParam::new(channel_fidelity)?);
    let branches = noisy_branches(kind, psi, &channel)?;

    let u: f64 = seeds.stream(run_id, StreamPurpose::Measurement).gen();
    let mut acc = 0.0;
    let picked = branches
        .iter()
        .find(|b| {
            acc += b.probability;
            u < acc
        })
        .or_else(|| branches.last())
        .ok_or_else(|| Error::InvalidDensity("no measurement branch".into()))?;

    let sent = picked.bits.select(kind.transmitted_positions());
    messages.push(message(&mut ledger, Party::Alice, Party::Bob, sent, Purpose::Teleport)?);

    let attempts = distillation.as_ref().map_or(0, |d| d.attempts);
    Ok(NoisyRun {
        run_id,
        protocol: kind,
        channel_fidelity,
        outcome: picked.bits.clone(),
        messages,
        ledger,
        fidelity: picked.fidelity,
        unknown_copies_consumed: match kind {
            ProtocolKind::Kak => attempts,
            ProtocolKind::Sqtp => 0,
        },
        distillation,
    })
}

pub fn run_noisy_batch(kind: ProtocolKind, n_runs: u64, config: &NoiseConfig, seeds: SeedTree) -> Result<Vec<NoisyRun>> {
    if n_runs == 0 {
        return Err(Error::Config("n_runs must be at least 1".into()));
    }
    (0..n_runs)
        .into_par_iter()
        .map(|run_id| {
            let psi = haar_qubit(&mut seeds.stream(run_id, StreamPurpose::InputState));
            run_noisy(kind, &psi, config, seeds, run_id)
        })
        .collect()
}
