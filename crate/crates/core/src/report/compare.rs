use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use super::{fmt_bits, json_bytes, OutputFormat, ProtocolChoice};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ledger::{ledger_rows, write_ledger_csv, CostLedger, Purpose};
use crate::noise::{run_noisy_batch, NoiseConfig, WernerParam};
use crate::protocol::{run_batch, ProtocolKind, TraceEvent};
use crate::rng::SeedTree;

pub const DEFAULT_MAX_ROUNDS: u32 = 32;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub protocol: ProtocolChoice,
    pub n_runs: u64,
    pub seed: u64,
    #[serde(rename = "noise_F")]
    pub noise_f: Option<f64>,
    pub distill_target: Option<f64>,
    pub max_rounds: u32,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn ideal(protocol: ProtocolChoice, n_runs: u64, seed: u64) -> Self {
        RunConfig {
            protocol,
            n_runs,
            seed,
            noise_f: None,
            distill_target: None,
            max_rounds: DEFAULT_MAX_ROUNDS,
            format: OutputFormat::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::Config("n_runs must be at least 1".into()));
        }
        if let Some(f) = self.noise_f {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(format!("noise_F {f} outside [0, 1]")));
            }
        }
        if let Some(t) = self.distill_target {
            let Some(f) = self.noise_f else {
                return Err(Error::Config("distill_target requires noise_F".into()));
            };
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Config(format!("distill_target {t} outside (0, 1]")));
            }
            if f < t && f <= 0.5 {
                return Err(Error::Config(format!("noise_F {f} cannot be distilled (needs > 1/2)")));
            }
        }
        if self.max_rounds == 0 {
            return Err(Error::Config("max_rounds must be at least 1".into()));
        }
        Ok(())
    }

    fn noise(&self) -> Result<Option<NoiseConfig>> {
        self.noise_f
            .map(|f| {
                Ok(NoiseConfig {
                    noise_f: WernerParam::new(f)?,
                    distill_target: self.distill_target,
                    max_rounds: self.max_rounds,
                })
            })
            .transpose()
    }
}

/// Condensed record of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunDigest {
    pub run_id: String,
    pub protocol: ProtocolKind,
    pub outcome: BitString,
    pub fidelity: f64,
    pub teleport_bits: u64,
    pub locc_bits: u64,
    pub distill_attempts: u64,
    pub unknown_copies_consumed: u64,
    /// Full step list for ideal runs, classical messages for noisy ones.
    pub steps: Vec<TraceEvent>,
    #[serde(skip)]
    pub ledger: CostLedger,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolSummary {
    pub runs: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Totals over all runs.
    pub teleport_bits: u64,
    pub locc_bits: u64,
    pub total_bits: u64,
    pub teleport_bits_per_qubit: f64,
    pub total_bits_per_qubit: f64,
    pub unknown_copies_consumed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub config: RunConfig,
    pub per_run: Vec<RunDigest>,
    pub summary: BTreeMap<ProtocolKind, ProtocolSummary>,
}

fn digests(kind: ProtocolKind, cfg: &RunConfig, seeds: SeedTree) -> Result<Vec<RunDigest>> {
    let id = |n: u64| format!("{kind}-{n}");
    match cfg.noise()? {
        None => Ok(run_batch(kind, cfg.n_runs, seeds)?
            .into_iter()
            .map(|r| RunDigest {
                run_id: id(r.run_id),
                protocol: kind,
                outcome: r.trace.outcome.clone(),
                fidelity: r.trace.fidelity_achieved,
                teleport_bits: r.trace.ledger.total(Some(Purpose::Teleport)),
                locc_bits: r.trace.ledger.total(Some(Purpose::Locc)),
                distill_attempts: 0,
                unknown_copies_consumed: 0,
                steps: r.trace.steps,
                ledger: r.trace.ledger,
            })
            .collect()),
        Some(noise) => Ok(run_noisy_batch(kind, cfg.n_runs, &noise, seeds)?
            .into_iter()
            .map(|r| RunDigest {
                run_id: id(r.run_id),
                protocol: kind,
                distill_attempts: r.attempts(),
                outcome: r.outcome,
                fidelity: r.fidelity,
                teleport_bits: r.ledger.total(Some(Purpose::Teleport)),
                locc_bits: r.ledger.total(Some(Purpose::Locc)),
                unknown_copies_consumed: r.unknown_copies_consumed,
                steps: r.messages,
                ledger: r.ledger,
            })
            .collect()),
    }
}

fn summarize(runs: &[RunDigest]) -> ProtocolSummary {
    let n = runs.len() as u64;
    let teleport_bits: u64 = runs.iter().map(|r| r.teleport_bits).sum();
    let locc_bits: u64 = runs.iter().map(|r| r.locc_bits).sum();
    let total_bits = teleport_bits + locc_bits;
    ProtocolSummary {
        runs: n,
        mean_fidelity: runs.iter().map(|r| r.fidelity).sum::<f64>() / n as f64,
        min_fidelity: runs.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
        teleport_bits,
        locc_bits,
        total_bits,
        teleport_bits_per_qubit: teleport_bits as f64 / n as f64,
        total_bits_per_qubit: total_bits as f64 / n as f64,
        unknown_copies_consumed: runs.iter().map(|r| r.unknown_copies_consumed).sum(),
    }
}

/// Runs each selected protocol `n_runs` times. Both protocols see the same
/// sequence of input states.
pub fn compare(cfg: &RunConfig) -> Result<CompareReport> {
    cfg.validate()?;
    let seeds = SeedTree::new(cfg.seed);
    let mut per_run = Vec::new();
    let mut summary = BTreeMap::new();
    for &kind in cfg.protocol.kinds() {
        let runs = digests(kind, cfg, seeds)?;
        summary.insert(kind, summarize(&runs));
        per_run.extend(runs);
    }
    Ok(CompareReport { config: cfg.clone(), per_run, summary })
}

pub fn render_compare(report: &CompareReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => json_bytes(report),
        OutputFormat::Csv => {
            let rows = ledger_rows(report.per_run.iter().map(|r| (r.run_id.clone(), &r.ledger)));
            let mut buf = Vec::new();
            write_ledger_csv(&rows, &mut buf)?;
            Ok(buf)
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:<9} {:>6} {:>14} {:>14} {:>22} {:>19}",
                "protocol", "runs", "mean_fidelity", "min_fidelity", "bits/qubit (TELEPORT)", "bits/qubit (total)"
            );
            for (kind, x) in &report.summary {
                let _ = writeln!(
                    s,
                    "{:<9} {:>6} {:>14.6} {:>14.6} {:>22} {:>19}",
                    kind.to_string(),
                    x.runs,
                    x.mean_fidelity,
                    x.min_fidelity,
                    fmt_bits(x.teleport_bits_per_qubit),
                    fmt_bits(x.total_bits_per_qubit)
                );
            }
            Ok(s.into_bytes())
        }
    }
}
