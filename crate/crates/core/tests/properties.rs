use num_complex::Complex64;
use proptest::prelude::*;
use teleport_core::ledger::{CostLedger, Purpose};
use teleport_core::protocol::{enumerate_protocol, run, ProtocolKind, UnknownQubit};
use teleport_core::rng::{SeedTree, StreamPurpose};
use teleport_core::StateVector;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn sized_state() -> impl Strategy<Value = StateVector> {
    (1usize..=5).prop_flat_map(state)
}

fn qubit() -> impl Strategy<Value = UnknownQubit> {
    state(1).prop_map(|s| UnknownQubit::new(s.amplitude(0), s.amplitude(1)).unwrap())
}

#[derive(Clone, Debug)]
enum Op {
    H(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
}

fn apply(s: &StateVector, op: &Op) -> StateVector {
    match *op {
        Op::H(q) => s.apply_h(q),
        Op::X(q) => s.apply_x(q),
        Op::Z(q) => s.apply_z(q),
        Op::Cnot(c, t) => s.apply_cnot(c, t),
    }
    .unwrap()
}

fn op(n: usize) -> impl Strategy<Value = Op> {
    let single = (0..n).prop_flat_map(|q| prop_oneof![Just(Op::H(q)), Just(Op::X(q)), Just(Op::Z(q))]);
    if n < 2 {
        return single.boxed();
    }
    prop_oneof![single, (0..n, 1..n).prop_map(move |(c, d)| Op::Cnot(c, (c + d) % n))].boxed()
}

fn state_and_ops() -> impl Strategy<Value = (StateVector, Vec<Op>)> {
    (1usize..=5).prop_flat_map(|n| (state(n), prop::collection::vec(op(n), 0..20)))
}

fn close(a: &StateVector, b: &StateVector) -> bool {
    a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-12)
}

proptest! {
    #[test]
    fn gates_preserve_norm((s, ops) in state_and_ops()) {
        let out = ops.iter().fold(s, |acc, o| apply(&acc, o));
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates_are_involutions((s, ops) in state_and_ops()) {
        for o in &ops {
            prop_assert!(close(&apply(&apply(&s, o), o), &s));
        }
    }

    #[test]
    fn branches_are_complete(s in sized_state(), mask in 1usize..32) {
        let qubits: Vec<usize> = (0..s.n_qubits()).filter(|q| mask & (1 << q) != 0).collect();
        prop_assume!(!qubits.is_empty());
        let branches = s.enumerate_branches(&qubits).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for b in &branches {
            prop_assert!((b.post_state.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in state(2), b in state(2)) {
        let f = a.fidelity(&b).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - b.fidelity(&a).unwrap()).abs() < 1e-12);
        prop_assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    /// Each branch acts linearly on the input, so Bob's corrected state for
    /// alpha|0> + beta|1> is the same combination of the basis-input results.
    #[test]
    fn protocols_are_linear(psi in qubit()) {
        for kind in ProtocolKind::ALL {
            let zero = enumerate_protocol(kind, &UnknownQubit::zero()).unwrap();
            let one = enumerate_protocol(kind, &UnknownQubit::one()).unwrap();
            let gen = enumerate_protocol(kind, &psi).unwrap();
            prop_assert_eq!(gen.len(), 4);
            for ((g, z), o) in gen.iter().zip(&zero).zip(&one) {
                prop_assert_eq!(&g.outcome.bits, &z.outcome.bits);
                for k in 0..2 {
                    let want = psi.alpha() * z.corrected.amplitude(k) + psi.beta() * o.corrected.amplitude(k);
                    prop_assert!((g.corrected.amplitude(k) - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ledger_replays_from_trace(seed in any::<u64>(), run_id in 0u64..1000) {
        for kind in ProtocolKind::ALL {
            let psi = UnknownQubit::from_angles(1.0, 2.0);
            let mut rng = SeedTree::new(seed).stream(run_id, StreamPurpose::Measurement);
            let trace = run(kind, &psi, &mut rng).unwrap();
            let replayed = CostLedger::replay(&trace.steps).unwrap();
            prop_assert_eq!(replayed.entries(), trace.ledger.entries());
            prop_assert_eq!(replayed.total(Some(Purpose::Locc)), 0);
        }
    }
}
