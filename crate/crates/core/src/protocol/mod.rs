//! The standard and chained-XOR teleportation protocols as two-party state
//! machines.
//!
//! Both protocols use a three-qubit register. Qubit 0 holds the unknown state,
//! qubits 1 and 2 start as the Bell pair (|00> + |11>)/sqrt(2), and qubit 2 is
//! the one that ends up with Bob.

mod demo;
mod montecarlo;
mod session;
mod trace;

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::statevector::{Amplitude, BranchOutcome, StateVector, TOLERANCE};

pub use demo::{kak_entangled_input_demo, EntangledBranch, EntangledInputReport};
pub use montecarlo::{monte_carlo, run_batch, MonteCarloSummary, RunRecord};
pub(crate) use session::script;
pub use session::{Session, Stage};
pub use trace::{ProtocolTrace, TraceEvent};

/// Alice's half-pair qubit.
pub const ALICE_PAIR_QUBIT: usize = 1;
/// The qubit Bob holds at the end of either protocol.
pub const BOB_QUBIT: usize = 2;
/// Qubits Alice measures in both protocols.
pub const MEASURED_QUBITS: [usize; 2] = [0, 1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Sqtp,
    Kak,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 2] = [ProtocolKind::Sqtp, ProtocolKind::Kak];

    pub fn correction_table(self) -> CorrectionTable {
        match self {
            ProtocolKind::Sqtp => CorrectionTable::sqtp(),
            ProtocolKind::Kak => CorrectionTable::kak(),
        }
    }

    /// Positions within Alice's two-bit outcome that she transmits.
    pub fn transmitted_positions(self) -> &'static [usize] {
        match self {
            ProtocolKind::Sqtp => &[0, 1],
            ProtocolKind::Kak => &[0],
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Sqtp => "sqtp",
            ProtocolKind::Kak => "kak",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    I,
    X,
    Z,
    H,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl Gate {
    pub fn arity(self) -> usize {
        if self == Gate::Cnot {
            2
        } else {
            1
        }
    }

    pub(crate) fn apply(self, state: &StateVector, qubits: &[usize]) -> Result<StateVector> {
        if qubits.len() != self.arity() {
            return Err(Error::Protocol(format!("{self:?} takes {} qubit(s)", self.arity())));
        }
        match self {
            Gate::I => Ok(state.clone()),
            Gate::X => state.apply_x(qubits[0]),
            Gate::Z => state.apply_z(qubits[0]),
            Gate::H => state.apply_h(qubits[0]),
            Gate::Cnot => state.apply_cnot(qubits[0], qubits[1]),
        }
    }
}

/// alpha|0> + beta|1>, the state Alice wants to send.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnknownQubit {
    alpha: Amplitude,
    beta: Amplitude,
}

impl UnknownQubit {
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let finite = [alpha.re, alpha.im, beta.re, beta.im].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite(0));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(UnknownQubit { alpha, beta })
    }

    /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        UnknownQubit {
            alpha: Complex64::new((theta / 2.0).cos(), 0.0),
            beta: Complex64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn zero() -> Self {
        UnknownQubit { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) }
    }

    pub fn one() -> Self {
        UnknownQubit { alpha: Complex64::new(0.0, 0.0), beta: Complex64::new(1.0, 0.0) }
    }

    pub fn plus() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        UnknownQubit { alpha: r, beta: r }
    }

    pub fn alpha(&self) -> Amplitude {
        self.alpha
    }

    pub fn beta(&self) -> Amplitude {
        self.beta
    }

    pub fn state(&self) -> StateVector {
        StateVector::qubit(self.alpha, self.beta).expect("validated on construction")
    }
}

/// Bob's lookup from received bits to the gates he applies, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    rows: Vec<(BitString, Vec<Gate>)>,
}

impl CorrectionTable {
    /// 00: nothing, 01: X, 10: Z, 11: Z then X.
    pub fn sqtp() -> Self {
        CorrectionTable {
            rows: vec![
                (BitString::from_index(0b00, 2), vec![]),
                (BitString::from_index(0b01, 2), vec![Gate::X]),
                (BitString::from_index(0b10, 2), vec![Gate::Z]),
                (BitString::from_index(0b11, 2), vec![Gate::Z, Gate::X]),
            ],
        }
    }

    /// 0: nothing, 1: Z.
    pub fn kak() -> Self {
        CorrectionTable {
            rows: vec![
                (BitString::from_index(0, 1), vec![]),
                (BitString::from_index(1, 1), vec![Gate::Z]),
            ],
        }
    }

    pub fn rows(&self) -> &[(BitString, Vec<Gate>)] {
        &self.rows
    }

    pub fn lookup(&self, bits: &BitString) -> Result<&[Gate]> {
        self.rows
            .iter()
            .find(|(k, _)| k == bits)
            .map(|(_, g)| g.as_slice())
            .ok_or_else(|| Error::Protocol(format!("no correction for message {bits}")))
    }
}

/// Applies a gate sequence to Bob's qubit.
pub fn apply_correction(state: &StateVector, qubit: usize, gates: &[Gate]) -> Result<StateVector> {
    gates.iter().try_fold(state.clone(), |s, g| g.apply(&s, &[qubit]))
}

fn drive(kind: ProtocolKind, psi: &UnknownQubit, measure: impl FnOnce(&mut Session) -> Result<()>) -> Result<Session> {
    let mut s = Session::new(kind, psi);
    match kind {
        ProtocolKind::Sqtp => {
            s.transfer(Party::Alice, Party::Bob, BOB_QUBIT)?;
            s.gate(Party::Alice, Gate::Cnot, &[0, 1])?;
            s.gate(Party::Alice, Gate::H, &[0])?;
        }
        ProtocolKind::Kak => {
            s.gate(Party::Alice, Gate::Cnot, &[0, 1])?;
            s.gate(Party::Alice, Gate::Cnot, &[1, 2])?;
            s.transfer(Party::Alice, Party::Bob, BOB_QUBIT)?;
            s.gate(Party::Alice, Gate::H, &[0])?;
        }
    }
    measure(&mut s)?;
    s.send(Party::Alice, Party::Bob, kind.transmitted_positions())?;
    s.correct(Party::Bob, &kind.correction_table())?;
    Ok(s)
}

/// Runs one protocol instance with a sampled measurement outcome.
pub fn run<R: Rng + ?Sized>(kind: ProtocolKind, psi: &UnknownQubit, rng: &mut R) -> Result<ProtocolTrace> {
    drive(kind, psi, |s| s.measure(Party::Alice, &MEASURED_QUBITS, rng).map(|_| ()))?.finish(psi)
}

pub fn run_sqtp<R: Rng + ?Sized>(psi: &UnknownQubit, rng: &mut R) -> Result<ProtocolTrace> {
    run(ProtocolKind::Sqtp, psi, rng)
}

pub fn run_kak<R: Rng + ?Sized>(psi: &UnknownQubit, rng: &mut R) -> Result<ProtocolTrace> {
    run(ProtocolKind::Kak, psi, rng)
}

/// A named register snapshot taken before Alice measures.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub label: &'static str,
    pub state: StateVector,
}

/// Register states in execution order, up to and including Alice's Hadamard.
/// Labels: `bell_pair` (the two-qubit resource alone), `initial`,
/// `post_cnot`, `post_second_cnot` (chained XOR only), `post_hadamard`.
pub fn snapshots(kind: ProtocolKind, psi: &UnknownQubit) -> Result<Vec<Snapshot>> {
    let mut s = Session::new(kind, psi);
    let mut out = vec![
        Snapshot { label: "bell_pair", state: StateVector::bell_pair() },
        Snapshot { label: "initial", state: s.register().clone() },
    ];
    let mut cnots = 0;
    while let Some(stage) = s.next_stage().cloned() {
        match stage {
            Stage::Transfer { qubit } => s.transfer(Party::Alice, Party::Bob, qubit)?,
            Stage::Gate { gate, ref qubits } => {
                s.gate(Party::Alice, gate, qubits)?;
                let label = match gate {
                    Gate::Cnot => {
                        cnots += 1;
                        if cnots == 1 {
                            "post_cnot"
                        } else {
                            "post_second_cnot"
                        }
                    }
                    Gate::H => "post_hadamard",
                    _ => unreachable!("scripts only contain CNOT and H"),
                };
                out.push(Snapshot { label, state: s.register().clone() });
            }
            _ => break,
        }
    }
    Ok(out)
}

/// One measurement branch of a protocol, carried through Bob's correction.
#[derive(Clone, Debug)]
pub struct ProtocolBranch {
    pub outcome: BranchOutcome,
    /// Bob's qubit before correction.
    pub residual: StateVector,
    /// Bob's qubit after correction.
    pub corrected: StateVector,
    pub fidelity: f64,
    pub trace: ProtocolTrace,
}

/// Runs every measurement branch deterministically.
pub fn enumerate_protocol(kind: ProtocolKind, psi: &UnknownQubit) -> Result<Vec<ProtocolBranch>> {
    let pre = snapshots(kind, psi)?
        .pop()
        .expect("snapshots end at the Hadamard")
        .state;
    pre.enumerate_branches(&MEASURED_QUBITS)?
        .into_iter()
        .map(|outcome| {
            let bits = outcome.bits.clone();
            let trace = drive(kind, psi, |s| s.measure_as(Party::Alice, &MEASURED_QUBITS, &bits))?.finish(psi)?;
            Ok(ProtocolBranch {
                residual: outcome.residual()?,
                corrected: trace.final_bob_state.clone(),
                fidelity: trace.fidelity_achieved,
                outcome,
                trace,
            })
        })
        .collect()
}
