//! Reference numbers produced by the brute-force routines in `common` and a
//! separate numpy script before the library existed. Do not regenerate them
//! from library output.

/// (F_in, success probability, F_out) for one recurrence step.
pub const RECURRENCE: [(f64, f64, f64); 7] = [
    (0.25, 0.5, 0.25),
    (0.55, 0.58, 0.5603448275862069),
    (0.65, 0.6422222222222222, 0.6790657439446367),
    (0.75, 0.7222222222222222, 0.7884615384615384),
    (0.85, 0.82, 0.8841463414634146),
    (0.95, 0.9355555555555556, 0.9649643705463182),
    (1.0, 1.0, 1.0),
];

/// Standard teleportation through werner(0.85), averaged over the 64-point
/// sphere grid.
pub const SPHERE_GRID_F085: f64 = 0.9;

/// Chained-XOR protocol fed half of (|00> + |11>)/sqrt(2): per-branch
/// probability and joint-state fidelity, outcomes 00, 01, 10, 11.
pub const KAK_ENTANGLED_BRANCHES: [(f64, f64); 4] = [(0.25, 1.0), (0.25, 1.0), (0.25, 1.0), (0.25, 1.0)];
