//! Brute-force reference arithmetic shared by the integration tests.
//!
//! Nothing here calls into the library. States and operators are plain
//! nested vectors, qubit 0 is the most significant bit, and every step is a
//! full matrix product.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;

pub mod frozen;

pub type Mat = Vec<Vec<C>>;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn zeros(d: usize) -> Mat {
    vec![vec![c(0.0); d]; d]
}

pub fn identity(d: usize) -> Mat {
    let mut m = zeros(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0);
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut m = zeros(d);
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0) {
                continue;
            }
            for j in 0..d {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn dagger(a: &Mat) -> Mat {
    let d = a.len();
    let mut m = zeros(d);
    for i in 0..d {
        for j in 0..d {
            m[j][i] = a[i][j].conj();
        }
    }
    m
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut m = zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    m[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn trace(a: &Mat) -> f64 {
    (0..a.len()).map(|i| a[i][i].re).sum()
}

pub fn outer(v: &[C]) -> Mat {
    v.iter().map(|x| v.iter().map(|y| x * y.conj()).collect()).collect()
}

/// <v| a |v>
pub fn expect(a: &Mat, v: &[C]) -> f64 {
    let mut s = c(0.0);
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += v[i].conj() * a[i][j] * v[j];
        }
    }
    s.re
}

fn bit(i: usize, q: usize, n: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

/// Single-qubit matrix `u` on qubit `q` of `n`, identity elsewhere.
pub fn on(n: usize, q: usize, u: [[f64; 2]; 2]) -> Mat {
    let d = 1 << n;
    let mut m = zeros(d);
    for i in 0..d {
        for j in 0..d {
            let others_equal = (0..n).filter(|&k| k != q).all(|k| bit(i, k, n) == bit(j, k, n));
            if others_equal {
                m[i][j] = c(u[bit(i, q, n)][bit(j, q, n)]);
            }
        }
    }
    m
}

pub fn cnot(n: usize, control: usize, target: usize) -> Mat {
    let d = 1 << n;
    let mut m = zeros(d);
    for j in 0..d {
        let i = if bit(j, control, n) == 1 { j ^ (1 << (n - 1 - target)) } else { j };
        m[i][j] = c(1.0);
    }
    m
}

pub const H: [[f64; 2]; 2] = [[std::f64::consts::FRAC_1_SQRT_2; 2], [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2]];
pub const X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
pub const Z: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

/// Projector onto the given bit values of the given qubits.
pub fn projector(n: usize, qubits: &[usize], bits: &[usize]) -> Mat {
    let d = 1 << n;
    let mut m = zeros(d);
    for i in 0..d {
        if qubits.iter().zip(bits).all(|(&q, &b)| bit(i, q, n) == b) {
            m[i][i] = c(1.0);
        }
    }
    m
}

/// Traces out every qubit not in `keep` (ascending).
pub fn partial_trace(rho: &Mat, n: usize, keep: &[usize]) -> Mat {
    let k = keep.len();
    let mut m = zeros(1 << k);
    let sub = |i: usize| keep.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q, n));
    let rest = |i: usize| (0..n).filter(|q| !keep.contains(q)).fold(0, |acc, q| (acc << 1) | bit(i, q, n));
    for i in 0..rho.len() {
        for j in 0..rho.len() {
            if rest(i) == rest(j) {
                m[sub(i)][sub(j)] += rho[i][j];
            }
        }
    }
    m
}

pub fn conjugate(u: &Mat, rho: &Mat) -> Mat {
    mul(&mul(u, rho), &dagger(u))
}

pub fn bell(k: usize) -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        0 => vec![c(h), c(0.0), c(0.0), c(h)],
        1 => vec![c(h), c(0.0), c(0.0), c(-h)],
        2 => vec![c(0.0), c(h), c(h), c(0.0)],
        _ => vec![c(0.0), c(h), c(-h), c(0.0)],
    }
}

pub fn werner(f: f64) -> Mat {
    let mut m = scale(&outer(&bell(0)), f);
    for k in 1..4 {
        m = add(&m, &scale(&outer(&bell(k)), (1.0 - f) / 3.0));
    }
    m
}

/// Standard teleportation of `psi` through a two-qubit `channel`, averaged
/// over Alice's four outcomes.
pub fn sqtp_noisy_fidelity(psi: [C; 2], channel: &Mat) -> f64 {
    let rho = kron(&outer(&psi), channel);
    let u = mul(&on(3, 0, H), &cnot(3, 0, 1));
    let rho = conjugate(&u, &rho);
    let mut bob = zeros(2);
    for m0 in 0..2 {
        for m1 in 0..2 {
            let p = projector(3, &[0, 1], &[m0, m1]);
            let mut branch = conjugate(&p, &rho);
            if m1 == 1 {
                branch = conjugate(&on(3, 2, X), &branch);
            }
            if m0 == 1 {
                branch = conjugate(&on(3, 2, Z), &branch);
            }
            bob = add(&bob, &partial_trace(&branch, 3, &[2]));
        }
    }
    expect(&bob, &psi)
}

/// Average of `sqtp_noisy_fidelity` over an 8 x 8 grid of Bloch angles,
/// theta at cell midpoints and phi from 0.
pub fn sphere_grid_average(channel: &Mat) -> f64 {
    let mut sum = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / 8.0;
            let phi = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            let psi = [c((theta / 2.0).cos()), C::from_polar((theta / 2.0).sin(), phi)];
            sum += sqtp_noisy_fidelity(psi, channel);
        }
    }
    sum / 64.0
}

/// One recurrence step on two Werner pairs in layout [A1, B1, A2, B2]:
/// returns (success probability, Bell fidelity of the kept pair).
pub fn recurrence(f: f64) -> (f64, f64) {
    let rho = kron(&werner(f), &werner(f));
    let u = mul(&cnot(4, 1, 3), &cnot(4, 0, 2));
    let rho = conjugate(&u, &rho);
    let mut kept = zeros(4);
    for b in 0..2 {
        let p = projector(4, &[2, 3], &[b, b]);
        kept = add(&kept, &partial_trace(&conjugate(&p, &rho), 4, &[0, 1]));
    }
    let p = trace(&kept);
    (p, expect(&kept, &bell(0)) / p)
}

/// Chained-XOR protocol on the second qubit of a two-qubit `joint` state,
/// register [held, fed, pair A, pair B]. For each (fed, pair A) outcome,
/// returns (probability, fidelity of the corrected (held, pair B) state with
/// `joint`).
pub fn kak_entangled(joint: [C; 4]) -> Vec<(f64, f64)> {
    let mut s = vec![c(0.0); 16];
    for (i, a) in joint.iter().enumerate() {
        for (j, b) in bell(0).iter().enumerate() {
            s[i * 4 + j] = a * b;
        }
    }
    let u = mul(&on(4, 1, H), &mul(&cnot(4, 2, 3), &cnot(4, 1, 2)));
    let s: Vec<C> = (0..16).map(|i| (0..16).map(|j| u[i][j] * s[j]).sum()).collect();
    let mut out = Vec::new();
    for m1 in 0..2 {
        for m2 in 0..2 {
            let mut v = vec![c(0.0); 4];
            for h in 0..2 {
                for b in 0..2 {
                    let sign = if m1 == 1 && b == 1 { -1.0 } else { 1.0 };
                    v[h * 2 + b] = s[(h << 3) | (m1 << 2) | (m2 << 1) | b] * sign;
                }
            }
            let p: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            let overlap: C = joint.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            out.push((p, overlap.norm_sqr() / p));
        }
    }
    out
}
