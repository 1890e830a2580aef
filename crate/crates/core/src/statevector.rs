//! Dense pure-state simulation for small registers.
//!
//! Basis indices put qubit 0 in the most significant position, so the ket
//! `|q0 q1 q2>` has index `q0*4 + q1*2 + q2`. Every operation returns a new
//! value; a `StateVector` is never mutated after construction.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub type Amplitude = Complex64;

pub const MAX_QUBITS: usize = 8;

/// Absolute tolerance for state comparisons and probability sums.
pub const TOLERANCE: f64 = 1e-12;

/// Branches at or below this probability are treated as impossible.
const ZERO_PROBABILITY: f64 = 1e-24;

/// A 2x2 complex matrix, row major.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

/// One outcome of a projective computational-basis measurement.
///
/// `post_state` keeps the whole register, with the measured qubits collapsed
/// onto `bits` and the rest renormalized.
#[derive(Clone, Debug, Serialize)]
pub struct BranchOutcome {
    pub measured: Vec<usize>,
    pub bits: BitString,
    pub probability: f64,
    pub post_state: StateVector,
}

impl BranchOutcome {
    /// State of the qubits that were not measured, in ascending qubit order.
    pub fn residual(&self) -> Result<StateVector> {
        self.post_state.residual(&self.measured, &self.bits)
    }
}

fn checked_qubit_count(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    let n = len.trailing_zeros() as usize;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::BadLength(len));
    }
    Ok(n)
}

impl StateVector {
    /// Builds a state from raw amplitudes, checking length, finiteness and
    /// normalization.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let n_qubits = checked_qubit_count(amps.len())?;
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Like `from_amplitudes`, but rescales any nonzero finite vector to unit
    /// norm first.
    pub fn normalized(amps: Vec<Amplitude>) -> Result<Self> {
        checked_qubit_count(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state named by a string of `0`/`1` characters.
    pub fn basis_state(n_qubits: usize, label: &str) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let bad = || Error::BadLabel { label: label.to_string(), n_qubits };
        let bits: BitString = label.parse().map_err(|_| bad())?;
        if bits.len() != n_qubits {
            return Err(bad());
        }
        let index = bits.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// The Bell pair (|00> + |11>)/sqrt(2).
    pub fn bell_pair() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        StateVector { n_qubits: 2, amps: vec![h, z, z, h] }
    }

    /// alpha|0> + beta|1>.
    pub fn qubit(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Kronecker product; `self` takes the most significant qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::CapacityExceeded(n));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { n_qubits: n, amps })
    }

    /// Applies a 2x2 matrix to qubit `q` without checking unitarity.
    fn apply_matrix(&self, q: usize, m: &Matrix2) -> Result<StateVector> {
        self.check_qubit(q)?;
        let mask = self.mask(q);
        let mut amps = self.amps.clone();
        for i in (0..amps.len()).filter(|i| i & mask == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | mask]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// Applies an arbitrary single-qubit unitary.
    pub fn apply_unitary(&self, q: usize, u: &Matrix2) -> Result<StateVector> {
        if !is_unitary(u) {
            return Err(Error::NotUnitary);
        }
        self.apply_matrix(q, u)
    }

    pub fn apply_h(&self, q: usize) -> Result<StateVector> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_matrix(q, &[[h, h], [h, -h]])
    }

    pub fn apply_x(&self, q: usize) -> Result<StateVector> {
        self.check_qubit(q)?;
        let mask = self.mask(q);
        let amps = (0..self.amps.len()).map(|i| self.amps[i ^ mask]).collect();
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    pub fn apply_z(&self, q: usize) -> Result<StateVector> {
        self.check_qubit(q)?;
        let mask = self.mask(q);
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if i & mask == 0 { a } else { -a })
            .collect();
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// Flips `target` on every basis state where `control` is 1.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<StateVector> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::SameControlTarget(control));
        }
        let (cm, tm) = (self.mask(control), self.mask(target));
        let amps = (0..self.amps.len())
            .map(|i| if i & cm != 0 { self.amps[i ^ tm] } else { self.amps[i] })
            .collect();
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |<self|other>|^2, clamped to [0, 1].
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Outcome bits of `qubits` (in list order) for basis index `i`.
    fn outcome_index(&self, i: usize, qubits: &[usize]) -> usize {
        qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | usize::from(i & self.mask(q) != 0))
    }

    fn outcome_probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.outcome_index(i, qubits)] += a.norm_sqr();
        }
        probs
    }

    /// Born probability of reading `bits` on `qubits`.
    pub fn probability(&self, qubits: &[usize], bits: &BitString) -> Result<f64> {
        self.check_qubits(qubits)?;
        if bits.len() != qubits.len() {
            return Err(Error::BadBits(bits.to_string()));
        }
        let want = bits.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Ok(self.outcome_probabilities(qubits)[want])
    }

    /// Projects onto `bits` for `qubits` and renormalizes.
    pub fn collapse(&self, qubits: &[usize], bits: &BitString) -> Result<StateVector> {
        let p = self.probability(qubits, bits)?;
        if p <= ZERO_PROBABILITY {
            return Err(Error::ImpossibleOutcome(bits.to_string()));
        }
        let want = bits.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if self.outcome_index(i, qubits) == want {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// Collapses `measured` onto `bits` and returns the renormalized state of
    /// the remaining qubits, in ascending qubit order.
    pub fn residual(&self, measured: &[usize], bits: &BitString) -> Result<StateVector> {
        let collapsed = self.collapse(measured, bits)?;
        let kept: Vec<usize> = (0..self.n_qubits).filter(|q| !measured.contains(q)).collect();
        if kept.is_empty() {
            return Err(Error::QubitCount(0));
        }
        let want = bits.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let amps = collapsed
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.outcome_index(*i, measured) == want)
            .map(|(_, &a)| a)
            .collect::<Vec<_>>();
        // Filtering by outcome keeps the remaining qubits in ascending order.
        Self::normalized(amps)
    }

    /// Every nonzero-probability outcome of measuring `qubits`, in ascending
    /// outcome order.
    pub fn enumerate_branches(&self, qubits: &[usize]) -> Result<Vec<BranchOutcome>> {
        self.check_qubits(qubits)?;
        let probs = self.outcome_probabilities(qubits);
        probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > ZERO_PROBABILITY)
            .map(|(k, &p)| {
                let bits = BitString::from_index(k, qubits.len());
                Ok(BranchOutcome {
                    measured: qubits.to_vec(),
                    post_state: self.collapse(qubits, &bits)?,
                    bits,
                    probability: p,
                })
            })
            .collect()
    }

    /// Samples a Born-rule outcome and returns it with the collapsed register.
    pub fn measure_sample<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<(BitString, StateVector)> {
        let branches = self.enumerate_branches(qubits)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let last = branches.len() - 1;
        for (k, b) in branches.iter().enumerate() {
            acc += b.probability;
            if u < acc || k == last {
                return Ok((b.bits.clone(), b.post_state.clone()));
            }
        }
        unreachable!("a normalized state has at least one branch")
    }
}

/// Phase-invariant overlap |<a|b>|^2.
pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

pub fn is_unitary(u: &Matrix2) -> bool {
    for r in 0..2 {
        for c in 0..2 {
            let dot: Complex64 = (0..2).map(|k| u[k][r].conj() * u[k][c]).sum();
            let expect = if r == c { 1.0 } else { 0.0 };
            if (dot - expect).norm() > TOLERANCE {
                return false;
            }
        }
    }
    true
}
