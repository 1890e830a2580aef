//! Report builders behind the `teleport-sim` commands.
//!
//! Each command builds a report value, renders it to bytes in the requested
//! format and only then writes it out, so a failed run never leaves a partial
//! file behind.

mod compare;
mod golden;
mod sweep;
mod verify;

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

pub use compare::{compare, DEFAULT_MAX_ROUNDS, render_compare, CompareReport, ProtocolSummary, RunConfig, RunDigest};
pub use golden::{Expr, Factor, GoldenExpansion, GoldenSet, Symbol, Term, BUNDLED};
pub use sweep::{parse_grid, DEFAULT_TARGET, render_sweep, run_sweep, SweepConfig};
pub use verify::{render_verify, verify, CheckKind, CheckRow, VerifyConfig, VerifyReport, DEFAULT_SAMPLES, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolChoice {
    Sqtp,
    Kak,
    Both,
}

impl ProtocolChoice {
    pub fn kinds(self) -> &'static [ProtocolKind] {
        match self {
            ProtocolChoice::Sqtp => &[ProtocolKind::Sqtp],
            ProtocolChoice::Kak => &[ProtocolKind::Kak],
            ProtocolChoice::Both => &ProtocolKind::ALL,
        }
    }
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn write_output(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Write { path: p.to_path_buf(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Integral values without a fraction, others to two places.
fn fmt_bits(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}
