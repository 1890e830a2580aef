use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::Gate;
use crate::statevector::{Matrix2, StateVector};

pub const MAX_DENSITY_QUBITS: usize = 4;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Mixed state on up to four qubits, same basis ordering as `StateVector`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSITY_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

/// `u` acting on qubit `q` of an `n`-qubit register.
fn embed_single(n: usize, q: usize, u: &Matrix2) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mask = 1 << (n - 1 - q);
    DMatrix::from_fn(dim, dim, |r, c| {
        if (r & !mask) != (c & !mask) {
            return zero();
        }
        u[usize::from(r & mask != 0)][usize::from(c & mask != 0)]
    })
}

#[cfg(test)]
fn cnot_matrix(n: usize, control: usize, target: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let (cm, tm) = (1 << (n - 1 - control), 1 << (n - 1 - target));
    DMatrix::from_fn(dim, dim, |r, c| {
        let image = if c & cm != 0 { c ^ tm } else { c };
        if r == image {
            one()
        } else {
            zero()
        }
    })
}

fn gate_matrix(gate: Gate) -> Matrix2 {
    let (o, z) = (one(), zero());
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match gate {
        Gate::I => [[o, z], [z, o]],
        Gate::X => [[z, o], [o, z]],
        Gate::Z => [[o, z], [z, -o]],
        Gate::H => [[h, h], [h, -h]],
        Gate::Cnot => unreachable!("two-qubit gate"),
    }
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::InvalidDensity(format!("{}x{} is not a qubit operator", dim, m.ncols())));
        }
        let n = dim.trailing_zeros() as usize;
        check_count(n)?;
        let d = DensityMatrix { n_qubits: n, m };
        d.validate()?;
        Ok(d)
    }

    pub fn from_pure(s: &StateVector) -> Result<Self> {
        check_count(s.n_qubits())?;
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        Ok(DensityMatrix { n_qubits: s.n_qubits(), m: &v * v.adjoint() })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_count(n)?;
        let dim = 1 << n;
        Ok(DensityMatrix {
            n_qubits: n,
            m: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, m: DMatrix<Complex64>) -> Self {
        DensityMatrix { n_qubits, m }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn element(&self, r: usize, c: usize) -> Complex64 {
        self.m[(r, c)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite element".into()));
        }
        let skew = (&self.m - self.m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {skew:e})")));
        }
        let tr = self.trace();
        if (tr - one()).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::CapacityExceeded(n));
        }
        Ok(DensityMatrix { n_qubits: n, m: self.m.kronecker(&other.m) })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    fn conjugate(&self, u: &DMatrix<Complex64>) -> DensityMatrix {
        DensityMatrix { n_qubits: self.n_qubits, m: u * &self.m * u.adjoint() }
    }

    /// rho -> U rho U^dagger for one of the protocol gates.
    pub fn apply_gate(&self, gate: Gate, qubits: &[usize]) -> Result<DensityMatrix> {
        if qubits.len() != gate.arity() {
            return Err(Error::Protocol(format!("{gate:?} takes {} qubit(s)", gate.arity())));
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let u = match gate {
            Gate::Cnot => {
                if qubits[0] == qubits[1] {
                    return Err(Error::SameControlTarget(qubits[0]));
                }
                // CNOT is a basis permutation, so conjugation just relabels entries
                let n = self.n_qubits;
                let (cm, tm) = (1 << (n - 1 - qubits[0]), 1 << (n - 1 - qubits[1]));
                let image = |i: usize| if i & cm != 0 { i ^ tm } else { i };
                let m = DMatrix::from_fn(self.m.nrows(), self.m.ncols(), |r, c| self.m[(image(r), image(c))]);
                return Ok(DensityMatrix { n_qubits: n, m });
            }
            g => embed_single(self.n_qubits, qubits[0], &gate_matrix(g)),
        };
        Ok(self.conjugate(&u))
    }

    /// Unnormalized projection onto `bits` for `qubits`, with its probability.
    pub fn project(&self, qubits: &[usize], bits: &BitString) -> Result<(f64, DensityMatrix)> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if bits.len() != qubits.len() {
            return Err(Error::BadBits(bits.to_string()));
        }
        let n = self.n_qubits;
        let keep = |i: usize| {
            qubits
                .iter()
                .zip(bits.bits())
                .all(|(&q, &b)| (i & (1 << (n - 1 - q)) != 0) == b)
        };
        let m = DMatrix::from_fn(self.m.nrows(), self.m.ncols(), |r, c| {
            if keep(r) && keep(c) {
                self.m[(r, c)]
            } else {
                zero()
            }
        });
        let p = m.trace().re;
        Ok((p, DensityMatrix { n_qubits: n, m }))
    }

    /// Partial trace onto `keep`, which must be ascending; the result lists
    /// the kept qubits in that order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDensity("partial trace needs ascending qubits".into()));
        }
        for &q in keep {
            self.check_qubit(q)?;
        }
        let n = self.n_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let compose = |kept_bits: usize, env_bits: usize| {
            let mut idx = 0;
            for (k, &q) in keep.iter().enumerate() {
                if kept_bits & (1 << (keep.len() - 1 - k)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (k, &q) in traced.iter().enumerate() {
                if env_bits & (1 << (traced.len() - 1 - k)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let dim = 1 << keep.len();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            (0..1usize << traced.len())
                .map(|e| self.m[(compose(r, e), compose(c, e))])
                .sum()
        });
        Ok(DensityMatrix { n_qubits: keep.len(), m })
    }

    /// Rescales to unit trace.
    pub fn normalized(&self) -> Result<DensityMatrix> {
        let tr = self.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidDensity(format!("cannot normalize trace {tr}")));
        }
        Ok(DensityMatrix { n_qubits: self.n_qubits, m: &self.m / Complex64::new(tr, 0.0) })
    }

    /// <psi|rho|psi>
    pub fn fidelity_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: psi.n_qubits() });
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }
}

#[derive(Serialize)]
struct Element(f64, f64);

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Element>> = (0..self.m.nrows())
            .map(|r| (0..self.m.ncols()).map(|c| Element(self.m[(r, c)].re, self.m[(r, c)].im)).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// Bell states in the order Phi+, Phi-, Psi+, Psi-.
pub fn bell_state(index: usize) -> StateVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps: [f64; 4] = match index {
        0 => [r, 0.0, 0.0, r],
        1 => [r, 0.0, 0.0, -r],
        2 => [0.0, r, r, 0.0],
        3 => [0.0, r, -r, 0.0],
        _ => panic!("Bell index {index} out of range"),
    };
    StateVector::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
        .expect("Bell states are normalized")
}
