use serde::Serialize;

use super::{Gate, Party, ProtocolKind};
use crate::bits::BitString;
use crate::ledger::{CostLedger, Purpose};
use crate::statevector::StateVector;

/// One step of a protocol run. Serialized with a `step_type` tag; `party` is
/// always the acting party (the sender, for transfers and messages).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "step_type", rename_all = "snake_case")]
pub enum TraceEvent {
    GateApplied {
        party: Party,
        gate: Gate,
        qubits: Vec<usize>,
    },
    QubitTransferred {
        party: Party,
        to: Party,
        qubits: Vec<usize>,
    },
    Measured {
        party: Party,
        qubits: Vec<usize>,
        bits: BitString,
    },
    MessageSent {
        party: Party,
        to: Party,
        bits: BitString,
        purpose: Purpose,
    },
    CorrectionApplied {
        party: Party,
        qubits: Vec<usize>,
        gate_seq: Vec<Gate>,
    },
}

/// Completed record of one protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolTrace {
    pub protocol: ProtocolKind,
    pub steps: Vec<TraceEvent>,
    #[serde(skip)]
    pub ledger: CostLedger,
    /// Everything Alice measured, including bits she never sends.
    pub outcome: BitString,
    pub final_bob_state: StateVector,
    pub fidelity_achieved: f64,
}

impl ProtocolTrace {
    /// The bits Alice transmitted for teleportation.
    pub fn sent_bits(&self) -> BitString {
        let mut bits = Vec::new();
        for e in &self.steps {
            if let TraceEvent::MessageSent { bits: b, purpose: Purpose::Teleport, .. } = e {
                bits.extend_from_slice(b.bits());
            }
        }
        BitString::new(bits)
    }
}
