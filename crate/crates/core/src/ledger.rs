//! Classical communication accounting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{Party, ProtocolKind, TraceEvent};

/// Bits exchanged per distillation attempt: each side announces its one-bit
/// parity measurement.
pub const LOCC_BITS_PER_ATTEMPT: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Purpose {
    Teleport,
    Locc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub from: Party,
    pub to: Party,
    pub bits: u32,
    pub purpose: Purpose,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    entries: Vec<LedgerEntry>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, from: Party, to: Party, bits: u32, purpose: Purpose) -> Result<()> {
        if bits == 0 {
            return Err(Error::ZeroBits);
        }
        self.entries.push(LedgerEntry { from, to, bits, purpose });
        Ok(())
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Sum of bits, optionally restricted to one purpose.
    pub fn total(&self, filter: Option<Purpose>) -> u64 {
        self.entries
            .iter()
            .filter(|e| filter.is_none_or(|p| e.purpose == p))
            .map(|e| u64::from(e.bits))
            .sum()
    }

    /// Rebuilds a ledger from the messages recorded in a trace.
    pub fn replay<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> Result<Self> {
        let mut ledger = CostLedger::new();
        for event in events {
            if let TraceEvent::MessageSent { party, to, bits, purpose } = event {
                let n = u32::try_from(bits.len()).map_err(|_| Error::ZeroBits)?;
                ledger.record(*party, *to, n, *purpose)?;
            }
        }
        Ok(ledger)
    }

    pub fn merge(&mut self, other: &CostLedger) {
        self.entries.extend(other.entries.iter().cloned());
    }
}

/// Dimension of the teleported system plus the protocol used per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    dimension: u32,
    kind: ProtocolKind,
}

impl CostModel {
    pub fn new(dimension: u32, kind: ProtocolKind) -> Result<Self> {
        if dimension < 2 || !dimension.is_power_of_two() {
            return Err(Error::BadDimension(dimension));
        }
        Ok(CostModel { dimension, kind })
    }

    pub fn qubit(kind: ProtocolKind) -> Self {
        CostModel { dimension: 2, kind }
    }

    /// 2 log2 N for the standard protocol. The chained-XOR protocol needs a
    /// separate channel per qubit and one bit on each, so log2 N.
    pub fn ideal_bits(&self) -> u64 {
        let qubits = u64::from(self.dimension.trailing_zeros());
        match self.kind {
            ProtocolKind::Sqtp => 2 * qubits,
            ProtocolKind::Kak => qubits,
        }
    }
}

/// One CSV/JSON export row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub run_id: String,
    pub from: Party,
    pub to: Party,
    pub bits: u32,
    pub purpose: Purpose,
}

pub fn ledger_rows<'a>(ledgers: impl IntoIterator<Item = (String, &'a CostLedger)>) -> Vec<LedgerRow> {
    ledgers
        .into_iter()
        .flat_map(|(run_id, ledger)| {
            ledger.entries.iter().map(move |e| LedgerRow {
                run_id: run_id.clone(),
                from: e.from,
                to: e.to,
                bits: e.bits,
                purpose: e.purpose,
            })
        })
        .collect()
}

pub fn write_ledger_csv<W: Write>(rows: &[LedgerRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LedgerExport<'a> {
    entries: &'a [LedgerRow],
    teleport_bits: u64,
    locc_bits: u64,
    total_bits: u64,
}

pub fn write_ledger_json<W: Write>(rows: &[LedgerRow], out: W) -> Result<()> {
    let sum = |p: Option<Purpose>| {
        rows.iter()
            .filter(|r| p.is_none_or(|p| r.purpose == p))
            .map(|r| u64::from(r.bits))
            .sum::<u64>()
    };
    let export = LedgerExport {
        entries: rows,
        teleport_bits: sum(Some(Purpose::Teleport)),
        locc_bits: sum(Some(Purpose::Locc)),
        total_bits: sum(None),
    };
    serde_json::to_writer_pretty(out, &export)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_bits_cases() {
        assert_eq!(CostModel::new(2, ProtocolKind::Sqtp).unwrap().ideal_bits(), 2);
        assert_eq!(CostModel::new(2, ProtocolKind::Kak).unwrap().ideal_bits(), 1);
        assert_eq!(CostModel::new(8, ProtocolKind::Sqtp).unwrap().ideal_bits(), 6);
        assert_eq!(CostModel::new(8, ProtocolKind::Kak).unwrap().ideal_bits(), 3);
    }

    #[test]
    fn bad_dimensions() {
        for n in [0, 1, 3, 6, 12] {
            assert!(matches!(CostModel::new(n, ProtocolKind::Sqtp), Err(Error::BadDimension(_))));
        }
    }

    #[test]
    fn totals() {
        let empty = CostLedger::new();
        assert_eq!(empty.total(None), 0);

        // one chained-XOR teleport after three distillation attempts
        let mut l = CostLedger::new();
        for _ in 0..3 {
            l.record(Party::Alice, Party::Bob, 1, Purpose::Locc).unwrap();
            l.record(Party::Bob, Party::Alice, 1, Purpose::Locc).unwrap();
        }
        l.record(Party::Alice, Party::Bob, 1, Purpose::Teleport).unwrap();
        assert_eq!(l.total(None), 7);
        assert_eq!(l.total(Some(Purpose::Teleport)), 1);
        assert_eq!(l.total(Some(Purpose::Locc)), 6);
    }

    #[test]
    fn zero_bits_rejected() {
        let mut l = CostLedger::new();
        assert!(matches!(l.record(Party::Alice, Party::Bob, 0, Purpose::Teleport), Err(Error::ZeroBits)));
    }

    #[test]
    fn csv_columns() {
        let mut l = CostLedger::new();
        l.record(Party::Alice, Party::Bob, 2, Purpose::Teleport).unwrap();
        let rows = ledger_rows([("kak-5".to_string(), &l)]);
        let mut buf = Vec::new();
        write_ledger_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "run_id,from,to,bits,purpose\nkak-5,alice,bob,2,TELEPORT\n");
    }
}
