use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::golden::{Expr, GoldenSet};
use super::{json_bytes, OutputFormat};
use crate::error::{Error, Result};
use crate::ledger::{CostModel, Purpose};
use crate::protocol::{enumerate_protocol, snapshots, Gate, ProtocolBranch, ProtocolKind, Snapshot, UnknownQubit};
use crate::rng::{random_amplitudes, SeedTree, StreamPurpose};
use crate::statevector::TOLERANCE;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: u64 = 100;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random (alpha, beta) pairs each check is evaluated on.
    pub samples: u64,
    pub golden: GoldenSet,
}

impl VerifyConfig {
    pub fn bundled(seed: u64, samples: u64) -> Result<Self> {
        Ok(VerifyConfig { seed, samples, golden: GoldenSet::bundled()? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Expansion,
    Property,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub kind: CheckKind,
    pub protocol: ProtocolKind,
    pub stage: Option<String>,
    /// Largest deviation seen over all samples; `null` in JSON when the
    /// shapes did not even match.
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<CheckRow>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Sample {
    psi: UnknownQubit,
    snapshots: [Vec<Snapshot>; 2],
    branches: [Vec<ProtocolBranch>; 2],
}

fn slot(kind: ProtocolKind) -> usize {
    match kind {
        ProtocolKind::Sqtp => 0,
        ProtocolKind::Kak => 1,
    }
}

fn sample(seeds: SeedTree, i: u64) -> Result<Sample> {
    let (a, b) = random_amplitudes(&mut seeds.stream(i, StreamPurpose::Verification));
    let psi = UnknownQubit::new(a, b)?;
    Ok(Sample {
        snapshots: [snapshots(ProtocolKind::Sqtp, &psi)?, snapshots(ProtocolKind::Kak, &psi)?],
        branches: [
            enumerate_protocol(ProtocolKind::Sqtp, &psi)?,
            enumerate_protocol(ProtocolKind::Kak, &psi)?,
        ],
        psi,
    })
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn row(name: String, kind: CheckKind, protocol: ProtocolKind, stage: Option<String>, max_error: f64) -> CheckRow {
    CheckRow { name, kind, protocol, stage, max_error, tolerance: TOLERANCE, passed: max_error <= TOLERANCE }
}

/// Checks every golden expansion and the protocol-level properties on
/// `samples` random inputs.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("verification needs at least one sample".into()));
    }
    let seeds = SeedTree::new(cfg.seed);
    let samples = (0..cfg.samples).map(|i| sample(seeds, i)).collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();

    for g in &cfg.golden.expansions {
        let expr = Expr::parse(&g.expr).map_err(|e| Error::Golden(format!("{}: {e}", g.name)))?;
        let mut worst: f64 = 0.0;
        for s in &samples {
            let snap = s.snapshots[slot(g.protocol)]
                .iter()
                .find(|x| x.label == g.stage)
                .ok_or_else(|| Error::Golden(format!("{}: no {} stage named {:?}", g.name, g.protocol, g.stage)))?;
            let want = expr.evaluate(s.psi.alpha(), s.psi.beta())?;
            worst = worst.max(max_abs_diff(snap.state.amplitudes(), &want));
        }
        checks.push(row(g.name.clone(), CheckKind::Expansion, g.protocol, Some(g.stage.clone()), worst));
    }

    for kind in ProtocolKind::ALL {
        let worst = samples
            .iter()
            .map(|s| {
                let b = &s.branches[slot(kind)];
                if b.len() != 4 {
                    return f64::INFINITY;
                }
                b.iter().map(|x| (1.0 - x.fidelity).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        checks.push(row(format!("{kind}.branch_universality"), CheckKind::Property, kind, None, worst));
    }

    // outcome 11 leaves Bob with -psi, the same state up to global phase
    let worst = samples
        .iter()
        .map(|s| {
            let b = s.branches[0].iter().find(|b| b.outcome.bits.to_string() == "11");
            let target: Vec<Complex64> = s.psi.state().amplitudes().iter().map(|z| -z).collect();
            b.map_or(f64::INFINITY, |b| max_abs_diff(b.corrected.amplitudes(), &target))
        })
        .fold(0.0, f64::max);
    checks.push(row("sqtp.phase_of_branch_11".into(), CheckKind::Property, ProtocolKind::Sqtp, None, worst));

    let worst = samples
        .iter()
        .map(|s| {
            let b = &s.branches[1];
            let pair = |x: &str, y: &str| -> f64 {
                let find = |l: &str| b.iter().find(|b| b.outcome.bits.to_string() == l);
                match (find(x), find(y)) {
                    (Some(p), Some(q)) => p.corrected.fidelity(&q.corrected).map_or(f64::INFINITY, |f| (1.0 - f).abs()),
                    _ => f64::INFINITY,
                }
            };
            pair("00", "01").max(pair("10", "11"))
        })
        .fold(0.0, f64::max);
    checks.push(row("kak.q1_irrelevance".into(), CheckKind::Property, ProtocolKind::Kak, None, worst));

    for kind in ProtocolKind::ALL {
        let ideal = CostModel::qubit(kind).ideal_bits() as f64;
        let worst = samples
            .iter()
            .flat_map(|s| s.branches[slot(kind)].iter())
            .map(|b| {
                let teleport = b.trace.ledger.total(Some(Purpose::Teleport)) as f64;
                let total = b.trace.ledger.total(None) as f64;
                (teleport - ideal).abs().max((total - ideal).abs())
            })
            .fold(0.0, f64::max);
        checks.push(row(format!("{kind}.teleport_bits"), CheckKind::Property, kind, None, worst));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { seed: cfg.seed, samples: cfg.samples, checks, passed })
}

fn action(gates: &[Gate]) -> String {
    if gates.is_empty() {
        return "none".into();
    }
    let names: Vec<_> = gates.iter().map(|g| format!("{g:?}")).collect();
    format!("apply {}", names.join(" then "))
}

fn correction_tables(out: &mut String) {
    for kind in ProtocolKind::ALL {
        let title = match kind {
            ProtocolKind::Sqtp => "Standard teleportation: Bob's correction",
            ProtocolKind::Kak => "Chained-XOR teleportation: Bob's correction",
        };
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "  {:<16} Bob's action", "Alice's result");
        for (bits, gates) in kind.correction_table().rows() {
            let _ = writeln!(out, "  {:<16} {}", bits.to_string(), action(gates));
        }
        let _ = writeln!(out);
    }
}

fn fmt_error(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        "shape".into()
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    kind: CheckKind,
    protocol: ProtocolKind,
    stage: &'a str,
    max_error: String,
    tolerance: f64,
    passed: bool,
}

pub fn render_verify(report: &VerifyReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => json_bytes(report),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &report.checks {
                w.serialize(CsvRow {
                    name: &c.name,
                    kind: c.kind,
                    protocol: c.protocol,
                    stage: c.stage.as_deref().unwrap_or(""),
                    max_error: fmt_error(c.max_error),
                    tolerance: c.tolerance,
                    passed: c.passed,
                })?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        OutputFormat::Text => {
            let mut s = String::new();
            correction_tables(&mut s);
            let _ = writeln!(s, "seed {} / {} random inputs", report.seed, report.samples);
            let _ = writeln!(s, "{:<28} {:<9} {:<18} {:>10}  result", "check", "protocol", "stage", "max_error");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{:<28} {:<9} {:<18} {:>10}  {}",
                    c.name,
                    c.protocol.to_string(),
                    c.stage.as_deref().unwrap_or("-"),
                    fmt_error(c.max_error),
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(s, "{passed}/{} checks passed", report.checks.len());
            Ok(s.into_bytes())
        }
    }
}
