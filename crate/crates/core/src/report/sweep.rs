use std::fmt::Write as _;

use serde::Serialize;

use super::{json_bytes, OutputFormat};
use crate::error::{Error, Result};
use crate::noise::{sweep, write_sweep_csv, SweepRow};
use crate::rng::SeedTree;

pub const DEFAULT_TARGET: f64 = 0.95;

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub distill_target: f64,
    pub max_rounds: u32,
    pub seed: u64,
}

/// Parses `START:STOP:STEP` into an inclusive grid. Points are rounded to
/// 12 decimals so that `0.55:0.95:0.1` ends exactly on 0.95.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::Config(format!("grid {spec:?} is not START:STOP:STEP")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Config(format!("bad number {s:?} in grid {spec:?}")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step <= 0.0 {
        return Err(Error::Config(format!("grid step {step} must be positive")));
    }
    if stop < start {
        return Ok(Vec::new());
    }
    let n = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.grid.is_empty() {
        return Err(Error::Config("empty fidelity grid".into()));
    }
    if let Some(f) = cfg.grid.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::Config(format!("grid point {f} outside [0, 1]")));
    }
    sweep(&cfg.grid, cfg.distill_target, cfg.max_rounds, SeedTree::new(cfg.seed))
}

pub fn render_sweep(rows: &[SweepRow], format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(rows, &mut buf)?;
            Ok(buf)
        }
        OutputFormat::Json => json_bytes(&rows),
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:>6} {:>12} {:>12} {:>7} {:>9} {:>10} {:>9}",
                "F_in", "success_prob", "F_out", "rounds", "locc_bits", "total_sqtp", "total_kak"
            );
            for r in rows {
                let rounds = r.rounds_to_target.map_or("-".to_string(), |n| n.to_string());
                let _ = writeln!(
                    s,
                    "{:>6.3} {:>12.6} {:>12.6} {:>7} {:>9} {:>10} {:>9}",
                    r.f_in, r.success_prob, r.f_out, rounds, r.locc_bits, r.total_bits_sqtp, r.total_bits_kak
                );
            }
            Ok(s.into_bytes())
        }
    }
}
