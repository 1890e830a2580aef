//! Recurrence distillation on Werner pairs.
//!
//! Two pairs of equal fidelity sit in a four-qubit register laid out as
//! `[A1, B1, A2, B2]`. Alice applies CNOT A1 -> A2, Bob applies CNOT B1 -> B2,
//! both measure their target qubit and announce the bit. The source pair is
//! kept when the bits agree and is then twirled back to Werner form with the
//! same Bell fidelity.

use rand::Rng;
use serde::Serialize;

use super::{werner_state, DensityMatrix, WernerParam};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ledger::LOCC_BITS_PER_ATTEMPT;
use crate::protocol::Gate;

const A1: usize = 0;
const B1: usize = 1;
const A2: usize = 2;
const B2: usize = 3;

/// Upper bound on attempts in one `distill_to_threshold` call.
pub const MAX_ATTEMPTS: u64 = 10_000;

/// Exact statistics of one recurrence step at a given input fidelity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceStep {
    pub fidelity_in: f64,
    /// Probability of each (Alice bit, Bob bit) outcome, indexed 00, 01, 10, 11.
    pub outcome_probabilities: [f64; 4],
    pub success_probability: f64,
    /// Bell fidelity of the kept pair, conditioned on success.
    pub fidelity_out: f64,
    /// Kept pair before twirling, conditioned on success.
    #[serde(skip)]
    pub kept_state: DensityMatrix,
}

/// Four-qubit density-matrix evaluation of one step.
pub fn recurrence_map(f: WernerParam) -> Result<RecurrenceStep> {
    let pair = werner_state(f);
    let rho = pair
        .tensor(&pair)?
        .apply_gate(Gate::Cnot, &[A1, A2])?
        .apply_gate(Gate::Cnot, &[B1, B2])?;
    let mut outcome_probabilities = [0.0; 4];
    let mut kept: Option<DensityMatrix> = None;
    for (k, slot) in outcome_probabilities.iter_mut().enumerate() {
        let bits = BitString::from_index(k, 2);
        let (p, projected) = rho.project(&[A2, B2], &bits)?;
        *slot = p;
        if k == 0b00 || k == 0b11 {
            let reduced = projected.partial_trace(&[A1, B1])?;
            kept = Some(match kept {
                None => reduced,
                Some(acc) => DensityMatrix::from_parts_unchecked(2, acc.matrix() + reduced.matrix()),
            });
        }
    }
    let success_probability = outcome_probabilities[0] + outcome_probabilities[3];
    let kept_state = kept.expect("two agreeing outcomes").normalized()?;
    let fidelity_out = kept_state.fidelity_pure(&super::bell_state(0))?;
    Ok(RecurrenceStep {
        fidelity_in: f.value(),
        outcome_probabilities,
        success_probability,
        fidelity_out,
        kept_state,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistillStep {
    pub success: bool,
    /// Alice's bit then Bob's bit.
    pub announced: BitString,
    pub success_probability: f64,
    /// Twirled fidelity of the kept pair; meaningful when `success` is set.
    pub fidelity_out: WernerParam,
    pub locc_bits: u32,
}

/// One sampled recurrence attempt.
pub fn distill_step<R: Rng + ?Sized>(f_in: WernerParam, rng: &mut R) -> Result<DistillStep> {
    sample_step(&recurrence_map(f_in)?, rng)
}

fn sample_step<R: Rng + ?Sized>(step: &RecurrenceStep, rng: &mut R) -> Result<DistillStep> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut outcome = 3;
    for (k, p) in step.outcome_probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = k;
            break;
        }
    }
    Ok(DistillStep {
        success: outcome == 0b00 || outcome == 0b11,
        announced: BitString::from_index(outcome, 2),
        success_probability: step.success_probability,
        fidelity_out: WernerParam::new(step.fidelity_out.clamp(0.0, 1.0))?,
        locc_bits: LOCC_BITS_PER_ATTEMPT,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttemptRecord {
    pub round: u32,
    pub fidelity_before: f64,
    pub announced: BitString,
    pub success: bool,
    pub fidelity_after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistillReport {
    /// Successful recurrence levels.
    pub rounds: u32,
    pub attempts: u64,
    pub locc_bits: u64,
    pub final_fidelity: f64,
    pub reached_target: bool,
    pub log: Vec<AttemptRecord>,
}

fn check_target(target: f64, max_rounds: u32) -> Result<()> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Distillation(format!("target {target} outside (0, 1]")));
    }
    if max_rounds == 0 {
        return Err(Error::Distillation("max_rounds must be at least 1".into()));
    }
    Ok(())
}

/// Repeats recurrence steps until the pair reaches `target` or `max_rounds`
/// levels have succeeded. A failed attempt discards both pairs and is retried
/// at the same level with fresh pairs.
pub fn distill_to_threshold<R: Rng + ?Sized>(
    f_in: WernerParam,
    target: f64,
    max_rounds: u32,
    rng: &mut R,
) -> Result<DistillReport> {
    check_target(target, max_rounds)?;
    let mut f = f_in;
    let mut report = DistillReport {
        rounds: 0,
        attempts: 0,
        locc_bits: 0,
        final_fidelity: f.value(),
        reached_target: f.value() >= target,
        log: Vec::new(),
    };
    if report.reached_target {
        return Ok(report);
    }
    if f.value() <= 0.5 {
        return Err(Error::Distillation(format!(
            "input fidelity {} does not improve under recurrence (needs > 1/2)",
            f.value()
        )));
    }
    // failed attempts retry at the same fidelity, so the map is reused
    let mut map = recurrence_map(f)?;
    while f.value() < target && report.rounds < max_rounds {
        if report.attempts >= MAX_ATTEMPTS {
            return Err(Error::Distillation(format!("no progress after {MAX_ATTEMPTS} attempts")));
        }
        if map.fidelity_in != f.value() {
            map = recurrence_map(f)?;
        }
        let step = sample_step(&map, rng)?;
        report.attempts += 1;
        report.locc_bits += u64::from(step.locc_bits);
        let before = f.value();
        if step.success {
            f = step.fidelity_out;
            report.rounds += 1;
        }
        report.log.push(AttemptRecord {
            round: report.rounds,
            fidelity_before: before,
            announced: step.announced,
            success: step.success,
            fidelity_after: f.value(),
        });
    }
    report.final_fidelity = f.value();
    report.reached_target = f.value() >= target;
    Ok(report)
}

/// Successful levels needed to reach `target` along the deterministic
/// success branch, or `None` if `max_rounds` levels are not enough.
pub fn rounds_to_target(f_in: WernerParam, target: f64, max_rounds: u32) -> Result<Option<u32>> {
    check_target(target, max_rounds)?;
    let mut f = f_in.value();
    for rounds in 0..=max_rounds {
        if f >= target {
            return Ok(Some(rounds));
        }
        if rounds == max_rounds {
            break;
        }
        f = recurrence_map(WernerParam::new(f)?)?.fidelity_out.clamp(0.0, 1.0);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{SeedTree, StreamPurpose};

    fn w(f: f64) -> WernerParam {
        WernerParam::new(f).unwrap()
    }

    #[test]
    fn perfect_pairs_pass_unchanged() {
        let s = recurrence_map(w(1.0)).unwrap();
        assert!((s.success_probability - 1.0).abs() < 1e-12);
        assert!((s.fidelity_out - 1.0).abs() < 1e-12);
        let mut rng = SeedTree::new(0).stream(0, StreamPurpose::Distillation);
        let step = distill_step(w(1.0), &mut rng).unwrap();
        assert!(step.success);
        assert_eq!(step.locc_bits, 2);
    }

    #[test]
    fn maximally_mixed_is_a_fixed_point() {
        let s = recurrence_map(w(0.25)).unwrap();
        assert!((s.fidelity_out - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kept_state_is_valid() {
        for f in [0.3, 0.6, 0.9] {
            recurrence_map(w(f)).unwrap().kept_state.validate().unwrap();
        }
    }

    #[test]
    fn already_above_target() {
        let mut rng = SeedTree::new(0).stream(0, StreamPurpose::Distillation);
        let r = distill_to_threshold(w(0.999), 0.99, 10, &mut rng).unwrap();
        assert_eq!((r.rounds, r.attempts, r.locc_bits), (0, 0, 0));
        assert!(r.reached_target);
    }

    #[test]
    fn low_fidelity_rejected() {
        let mut rng = SeedTree::new(0).stream(0, StreamPurpose::Distillation);
        assert!(distill_to_threshold(w(0.5), 0.9, 10, &mut rng).is_err());
        assert!(distill_to_threshold(w(0.4), 0.9, 10, &mut rng).is_err());
        assert!(distill_to_threshold(w(0.7), 1.5, 10, &mut rng).is_err());
        assert!(distill_to_threshold(w(0.7), 0.9, 0, &mut rng).is_err());
    }

    #[test]
    fn bits_are_two_per_attempt() {
        let tree = SeedTree::new(17);
        for run in 0..50 {
            let mut rng = tree.stream(run, StreamPurpose::Distillation);
            let r = distill_to_threshold(w(0.75), 0.9, 32, &mut rng).unwrap();
            assert_eq!(r.locc_bits, 2 * r.attempts);
            assert!(r.attempts >= u64::from(r.rounds));
            assert_eq!(r.log.len() as u64, r.attempts);
            assert!(r.reached_target);
            assert_eq!(Some(r.rounds), rounds_to_target(w(0.75), 0.9, 32).unwrap());
        }
    }

    #[test]
    fn round_cap_stops_early() {
        let mut rng = SeedTree::new(4).stream(0, StreamPurpose::Distillation);
        let r = distill_to_threshold(w(0.6), 0.99, 1, &mut rng).unwrap();
        assert_eq!(r.rounds, 1);
        assert!(!r.reached_target);
        assert_eq!(rounds_to_target(w(0.6), 0.99, 1).unwrap(), None);
    }
}
