//! Noisy Bell pairs, teleportation through them, and recurrence distillation.
//!
//! Only the shared pair is noisy. Gates, measurements and the classical
//! channel are ideal.

mod density;
mod distill;
mod run;
mod sweep;

use num_complex::Complex64;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::{ProtocolKind, Stage, UnknownQubit, BOB_QUBIT, MEASURED_QUBITS};

pub use density::{bell_state, DensityMatrix, MAX_DENSITY_QUBITS};
pub use distill::{
    distill_step, distill_to_threshold, recurrence_map, rounds_to_target, AttemptRecord, DistillReport,
    DistillStep, RecurrenceStep, MAX_ATTEMPTS,
};
pub use run::{run_noisy, run_noisy_batch, NoiseConfig, NoisyRun};
pub use sweep::{sweep, write_sweep_csv, SweepRow};

/// Fidelity of a noisy pair with (|00> + |11>)/sqrt(2).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::FidelityRange(f));
        }
        Ok(WernerParam(f))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// F |Phi+><Phi+| + (1 - F)/3 (|Phi-><Phi-| + |Psi+><Psi+| + |Psi-><Psi-|).
pub fn werner_state(f: WernerParam) -> DensityMatrix {
    let weights = [f.0, (1.0 - f.0) / 3.0, (1.0 - f.0) / 3.0, (1.0 - f.0) / 3.0];
    let m = (0..4)
        .map(|k| {
            let v = nalgebra::DVector::from_column_slice(bell_state(k).amplitudes());
            (&v * v.adjoint()) * Complex64::new(weights[k], 0.0)
        })
        .fold(nalgebra::DMatrix::zeros(4, 4), |acc, p| acc + p);
    DensityMatrix::from_parts_unchecked(2, m)
}

/// One measurement branch of a noisy teleportation.
#[derive(Clone, Debug, Serialize)]
pub struct NoisyBranch {
    pub bits: BitString,
    pub probability: f64,
    pub bob_state: DensityMatrix,
    pub fidelity: f64,
}

/// Runs the protocol on |psi><psi| (x) channel, with the channel in place of
/// the ideal Bell pair, and returns every branch after Bob's correction.
pub fn noisy_branches(kind: ProtocolKind, psi: &UnknownQubit, channel: &DensityMatrix) -> Result<Vec<NoisyBranch>> {
    if channel.n_qubits() != 2 {
        return Err(Error::InvalidDensity(format!("channel has {} qubits, expected 2", channel.n_qubits())));
    }
    channel.validate()?;
    let target = psi.state();
    let mut rho = DensityMatrix::from_pure(&target)?.tensor(channel)?;
    for stage in crate::protocol::script(kind) {
        match stage {
            Stage::Gate { gate, qubits } => rho = rho.apply_gate(gate, &qubits)?,
            Stage::Transfer { .. } => {}
            _ => break,
        }
    }
    let table = kind.correction_table();
    let mut out = Vec::new();
    for k in 0..4 {
        let bits = BitString::from_index(k, 2);
        let (p, projected) = rho.project(&MEASURED_QUBITS, &bits)?;
        if p <= 1e-24 {
            continue;
        }
        let mut corrected = projected;
        for &g in table.lookup(&bits.select(kind.transmitted_positions()))? {
            corrected = corrected.apply_gate(g, &[BOB_QUBIT])?;
        }
        let bob = corrected.partial_trace(&[BOB_QUBIT])?.normalized()?;
        let fidelity = bob.fidelity_pure(&target)?;
        out.push(NoisyBranch { bits, probability: p, bob_state: bob, fidelity });
    }
    Ok(out)
}

/// Outcome-averaged fidelity <psi| rho_Bob |psi>.
pub fn teleport_fidelity_noisy(kind: ProtocolKind, psi: &UnknownQubit, channel: &DensityMatrix) -> Result<f64> {
    Ok(noisy_branches(kind, psi, channel)?
        .iter()
        .map(|b| b.probability * b.fidelity)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::enumerate_protocol;
    use crate::rng::{haar_qubit, SeedTree, StreamPurpose};

    #[test]
    fn werner_endpoints() {
        let pure = werner_state(WernerParam::new(1.0).unwrap());
        let bell = DensityMatrix::from_pure(&bell_state(0)).unwrap();
        assert!((pure.matrix() - bell.matrix()).iter().all(|z| z.norm() < 1e-12));

        let mixed = werner_state(WernerParam::new(0.25).unwrap());
        let eye = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((mixed.matrix() - eye.matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn werner_spectrum() {
        let d = werner_state(WernerParam::new(0.7).unwrap());
        d.validate().unwrap();
        let ev = d.eigenvalues();
        for (e, want) in ev.iter().zip([0.7, 0.1, 0.1, 0.1]) {
            assert!((e - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn werner_param_range() {
        assert!(WernerParam::new(-0.01).is_err());
        assert!(WernerParam::new(1.01).is_err());
        assert!(WernerParam::new(f64::NAN).is_err());
    }

    #[test]
    fn noiseless_channel_matches_pure_engine() {
        let mut rng = SeedTree::new(11).stream(0, StreamPurpose::InputState);
        let channel = werner_state(WernerParam::new(1.0).unwrap());
        for _ in 0..10 {
            let psi = haar_qubit(&mut rng);
            for kind in ProtocolKind::ALL {
                let pure: f64 = enumerate_protocol(kind, &psi)
                    .unwrap()
                    .iter()
                    .map(|b| b.outcome.probability * b.fidelity)
                    .sum();
                let mixed = teleport_fidelity_noisy(kind, &psi, &channel).unwrap();
                assert!((pure - mixed).abs() < 1e-10);
                assert!((mixed - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fully_mixed_channel_gives_half() {
        let channel = DensityMatrix::maximally_mixed(2).unwrap();
        let psi = UnknownQubit::from_angles(1.1, 0.4);
        for kind in ProtocolKind::ALL {
            let f = teleport_fidelity_noisy(kind, &psi, &channel).unwrap();
            assert!((f - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_outputs_are_valid_states() {
        let channel = werner_state(WernerParam::new(0.6).unwrap());
        let psi = UnknownQubit::from_angles(2.0, -0.7);
        for kind in ProtocolKind::ALL {
            let branches = noisy_branches(kind, &psi, &channel).unwrap();
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for b in branches {
                b.bob_state.validate().unwrap();
            }
        }
    }

    #[test]
    fn channel_must_be_two_qubits() {
        let bad = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(teleport_fidelity_noisy(ProtocolKind::Sqtp, &UnknownQubit::zero(), &bad).is_err());
    }
}
