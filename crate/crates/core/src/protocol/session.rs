use rand::Rng;

use super::{CorrectionTable, Gate, Party, ProtocolKind, ProtocolTrace, TraceEvent, UnknownQubit, BOB_QUBIT};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ledger::{CostLedger, Purpose};
use crate::statevector::StateVector;

/// One scripted step of a protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Transfer { qubit: usize },
    Gate { gate: Gate, qubits: Vec<usize> },
    Measure { qubits: Vec<usize> },
    Send { positions: Vec<usize> },
    Correct,
}

pub(crate) fn script(kind: ProtocolKind) -> Vec<Stage> {
    let cnot = |c, t| Stage::Gate { gate: Gate::Cnot, qubits: vec![c, t] };
    let h0 = Stage::Gate { gate: Gate::H, qubits: vec![0] };
    let measure = Stage::Measure { qubits: vec![0, 1] };
    match kind {
        // The pair is shared before the unknown qubit touches it.
        ProtocolKind::Sqtp => vec![
            Stage::Transfer { qubit: BOB_QUBIT },
            cnot(0, 1),
            h0,
            measure,
            Stage::Send { positions: vec![0, 1] },
            Stage::Correct,
        ],
        // The chained XOR runs while Alice still holds all three qubits; the
        // channel exists only once qubit 2 leaves.
        ProtocolKind::Kak => vec![
            cnot(0, 1),
            cnot(1, 2),
            Stage::Transfer { qubit: BOB_QUBIT },
            h0,
            measure,
            Stage::Send { positions: vec![0] },
            Stage::Correct,
        ],
    }
}

/// A protocol run in progress.
///
/// The session owns the three-qubit register and knows which party holds each
/// qubit. Every action is checked against the protocol's fixed script and
/// against qubit ownership; anything out of order is rejected and leaves the
/// session unchanged. A session cannot exist without the unknown qubit, so no
/// schedule can touch the Bell pair before the input is available.
#[derive(Clone, Debug)]
pub struct Session {
    kind: ProtocolKind,
    register: StateVector,
    owners: [Party; 3],
    script: Vec<Stage>,
    cursor: usize,
    steps: Vec<TraceEvent>,
    ledger: CostLedger,
    measured: Option<(Party, Vec<usize>, BitString)>,
    inbox: Option<(Party, BitString)>,
}

impl Session {
    /// Alice starts with |psi> on qubit 0 and a freshly prepared Bell pair on
    /// qubits 1 and 2.
    pub fn new(kind: ProtocolKind, psi: &UnknownQubit) -> Self {
        let register = psi
            .state()
            .tensor(&StateVector::bell_pair())
            .expect("three qubits fit");
        Session {
            kind,
            register,
            owners: [Party::Alice; 3],
            script: script(kind),
            cursor: 0,
            steps: Vec::new(),
            ledger: CostLedger::new(),
            measured: None,
            inbox: None,
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn register(&self) -> &StateVector {
        &self.register
    }

    pub fn owner(&self, qubit: usize) -> Option<Party> {
        self.owners.get(qubit).copied()
    }

    pub fn steps(&self) -> &[TraceEvent] {
        &self.steps
    }

    pub fn next_stage(&self) -> Option<&Stage> {
        self.script.get(self.cursor)
    }

    pub fn is_complete(&self) -> bool {
        self.cursor == self.script.len()
    }

    fn expect(&self, got: &Stage) -> Result<()> {
        match self.next_stage() {
            Some(want) if want == got => Ok(()),
            Some(want) => Err(Error::Protocol(format!(
                "{}: expected {want:?}, got {got:?}",
                self.kind
            ))),
            None => Err(Error::Protocol(format!("{}: run already complete, got {got:?}", self.kind))),
        }
    }

    fn check_owner(&self, party: Party, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            match self.owner(q) {
                Some(p) if p == party => {}
                Some(p) => {
                    return Err(Error::Protocol(format!("{party} acted on qubit {q} held by {p}")))
                }
                None => {
                    return Err(Error::QubitOutOfRange { index: q, n_qubits: self.owners.len() })
                }
            }
        }
        Ok(())
    }

    pub fn transfer(&mut self, from: Party, to: Party, qubit: usize) -> Result<()> {
        self.expect(&Stage::Transfer { qubit })?;
        self.check_owner(from, &[qubit])?;
        if from == to {
            return Err(Error::Protocol(format!("{from} cannot transfer to itself")));
        }
        self.owners[qubit] = to;
        self.steps.push(TraceEvent::QubitTransferred { party: from, to, qubits: vec![qubit] });
        self.cursor += 1;
        Ok(())
    }

    pub fn gate(&mut self, party: Party, gate: Gate, qubits: &[usize]) -> Result<()> {
        self.expect(&Stage::Gate { gate, qubits: qubits.to_vec() })?;
        self.check_owner(party, qubits)?;
        self.register = gate.apply(&self.register, qubits)?;
        self.steps.push(TraceEvent::GateApplied { party, gate, qubits: qubits.to_vec() });
        self.cursor += 1;
        Ok(())
    }

    fn record_measurement(&mut self, party: Party, qubits: &[usize], bits: BitString, post: StateVector) {
        self.register = post;
        self.steps.push(TraceEvent::Measured { party, qubits: qubits.to_vec(), bits: bits.clone() });
        self.measured = Some((party, qubits.to_vec(), bits));
        self.cursor += 1;
    }

    /// Born-rule measurement of `qubits`.
    pub fn measure<R: Rng + ?Sized>(&mut self, party: Party, qubits: &[usize], rng: &mut R) -> Result<BitString> {
        self.expect(&Stage::Measure { qubits: qubits.to_vec() })?;
        self.check_owner(party, qubits)?;
        let (bits, post) = self.register.measure_sample(qubits, rng)?;
        self.record_measurement(party, qubits, bits.clone(), post);
        Ok(bits)
    }

    /// Measurement forced onto a given outcome, for branch enumeration.
    pub fn measure_as(&mut self, party: Party, qubits: &[usize], bits: &BitString) -> Result<()> {
        self.expect(&Stage::Measure { qubits: qubits.to_vec() })?;
        self.check_owner(party, qubits)?;
        let post = self.register.collapse(qubits, bits)?;
        self.record_measurement(party, qubits, bits.clone(), post);
        Ok(())
    }

    /// Sends the listed positions of the sender's own measurement outcome.
    pub fn send(&mut self, from: Party, to: Party, positions: &[usize]) -> Result<()> {
        self.expect(&Stage::Send { positions: positions.to_vec() })?;
        let bits = match &self.measured {
            Some((p, _, bits)) if *p == from => bits.select(positions),
            _ => return Err(Error::Protocol(format!("{from} has no measurement to send"))),
        };
        self.ledger.record(from, to, bits.len() as u32, Purpose::Teleport)?;
        self.steps.push(TraceEvent::MessageSent {
            party: from,
            to,
            bits: bits.clone(),
            purpose: Purpose::Teleport,
        });
        self.inbox = Some((to, bits));
        self.cursor += 1;
        Ok(())
    }

    /// Applies the table row for the bits `party` has received.
    pub fn correct(&mut self, party: Party, table: &CorrectionTable) -> Result<()> {
        self.expect(&Stage::Correct)?;
        self.check_owner(party, &[BOB_QUBIT])?;
        let bits = match &self.inbox {
            Some((p, bits)) if *p == party => bits.clone(),
            _ => return Err(Error::Protocol(format!("{party} corrected before receiving a message"))),
        };
        let gates = table.lookup(&bits)?.to_vec();
        self.register = super::apply_correction(&self.register, BOB_QUBIT, &gates)?;
        self.steps.push(TraceEvent::CorrectionApplied { party, qubits: vec![BOB_QUBIT], gate_seq: gates });
        self.cursor += 1;
        Ok(())
    }

    /// Closes the run and scores Bob's qubit against the input.
    pub fn finish(self, psi: &UnknownQubit) -> Result<ProtocolTrace> {
        if !self.is_complete() {
            return Err(Error::Protocol(format!(
                "{}: run stopped before {:?}",
                self.kind,
                self.next_stage()
            )));
        }
        let (_, qubits, outcome) = self.measured.expect("script includes a measurement");
        let bob = self.register.residual(&qubits, &outcome)?;
        let fidelity = bob.fidelity(&psi.state())?;
        Ok(ProtocolTrace {
            protocol: self.kind,
            steps: self.steps,
            ledger: self.ledger,
            outcome,
            final_bob_state: bob,
            fidelity_achieved: fidelity,
        })
    }
}
