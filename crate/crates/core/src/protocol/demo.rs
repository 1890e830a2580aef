//! Chained-XOR teleportation of one half of a two-qubit state.

use num_complex::Complex64;
use serde::Serialize;

use super::{CorrectionTable, Gate};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::statevector::StateVector;

// Register layout: [held, fed, pair A, pair B]. The fed qubit plays the role
// of qubit 0 in the three-qubit protocol.
const FED: usize = 1;
const PAIR_A: usize = 2;
const PAIR_B: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct EntangledBranch {
    pub bits: BitString,
    pub probability: f64,
    /// Joint fidelity after the correction the table prescribes.
    pub fidelity: f64,
    /// Best joint fidelity over every row of the correction table.
    pub best_fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntangledInputReport {
    pub branches: Vec<EntangledBranch>,
    /// Smallest prescribed-correction fidelity over branches.
    pub min_fidelity: f64,
    /// Overlap of the (held, fed) pair with the input right after the chained
    /// XOR, tracing out the Bell-pair qubits.
    pub post_xor_input_fidelity: f64,
}

/// Feeds qubit 1 of `joint` through the chained-XOR protocol while qubit 0 is
/// held out, then compares (held, Bob) against `joint` on every branch.
pub fn kak_entangled_input_demo(joint: &StateVector) -> Result<EntangledInputReport> {
    if joint.n_qubits() != 2 {
        return Err(Error::DimensionMismatch { left: joint.n_qubits(), right: 2 });
    }
    let register = joint
        .tensor(&StateVector::bell_pair())?
        .apply_cnot(FED, PAIR_A)?
        .apply_cnot(PAIR_A, PAIR_B)?;

    let post_xor_input_fidelity = reduced_overlap(&register, joint);

    let register = register.apply_h(FED)?;
    let table = CorrectionTable::kak();
    let mut branches = Vec::new();
    for outcome in register.enumerate_branches(&[FED, PAIR_A])? {
        let sent = outcome.bits.select(&[0]);
        let score = |gates: &[Gate]| -> Result<f64> {
            let corrected = super::apply_correction(&outcome.post_state, PAIR_B, gates)?;
            // remaining qubits in ascending order: (held, pair B)
            corrected.residual(&outcome.measured, &outcome.bits)?.fidelity(joint)
        };
        let fidelity = score(table.lookup(&sent)?)?;
        let best_fidelity = table
            .rows()
            .iter()
            .map(|(_, g)| score(g))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        branches.push(EntangledBranch {
            bits: outcome.bits.clone(),
            probability: outcome.probability,
            fidelity,
            best_fidelity,
        });
    }
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(1.0, f64::min);
    Ok(EntangledInputReport { branches, min_fidelity, post_xor_input_fidelity })
}

/// <joint| Tr_pair(|s><s|) |joint> for the (held, fed) qubits.
fn reduced_overlap(s: &StateVector, joint: &StateVector) -> f64 {
    let amps = s.amplitudes();
    (0..4)
        .map(|pair| {
            let overlap: Complex64 = (0..4)
                .map(|hf| joint.amplitude(hf).conj() * amps[(hf << 2) | pair])
                .sum();
            overlap.norm_sqr()
        })
        .sum()
}
