//! The published table for degrees 1–3, embedded and checksum-verified.
//!
//! Each row carries the label printed in the table and the label under which
//! the engine reproduces it. They differ for one row only, which is marked.

use num_bigint::BigInt;
use realwdvv::insertions::TableRow;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

const TABLE: &str = include_str!("../data/table1.csv");
const TABLE_SHA256: &str = "a8dddd093b7ff80fd55947a7929c3de9c3e5fa73a58fdd02be4526e2be164b73";

pub const MAX_REFERENCE_DEGREE: u32 = 3;

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("reference table checksum mismatch: {0}")]
    Checksum(String),
    #[error("reference table is malformed: {0}")]
    Csv(#[from] csv::Error),
    #[error("reference table has a non-integer entry `{0}`")]
    Number(String),
}

#[derive(Debug, Deserialize)]
struct RawRow {
    d: u32,
    printed_a: u32,
    printed_b: u32,
    a: u32,
    b: u32,
    averaged: String,
    expansion: String,
    min: String,
    complex: String,
    mark: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRow {
    pub degree: u32,
    pub printed: (u32, u32),
    pub lines: u32,
    pub points: u32,
    pub averaged: BigInt,
    pub expansion: Vec<BigInt>,
    pub min: BigInt,
    pub complex: BigInt,
    /// Printed in boldface as a new lower bound.
    pub bold: bool,
    /// Printed label differs from the engine label.
    pub label_typo: bool,
}

impl ReferenceRow {
    pub fn expansion_string(&self) -> String {
        self.expansion
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn number(s: &str) -> Result<BigInt, ReferenceError> {
    s.trim()
        .parse()
        .map_err(|_| ReferenceError::Number(s.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ReferenceDataset {
    rows: Vec<ReferenceRow>,
}

impl ReferenceDataset {
    pub fn load() -> Result<Self, ReferenceError> {
        Self::parse(TABLE, TABLE_SHA256)
    }

    fn parse(text: &str, expected: &str) -> Result<Self, ReferenceError> {
        let digest = sha256_hex(text.as_bytes());
        if digest != expected {
            return Err(ReferenceError::Checksum(digest));
        }
        let mut rows = Vec::new();
        for raw in csv::Reader::from_reader(text.as_bytes()).deserialize() {
            let raw: RawRow = raw?;
            rows.push(ReferenceRow {
                degree: raw.d,
                printed: (raw.printed_a, raw.printed_b),
                lines: raw.a,
                points: raw.b,
                averaged: number(&raw.averaged)?,
                expansion: raw
                    .expansion
                    .split(',')
                    .map(number)
                    .collect::<Result<_, _>>()?,
                min: number(&raw.min)?,
                complex: number(&raw.complex)?,
                bold: raw.mark == "bold",
                label_typo: raw.mark == "label-typo",
            });
        }
        Ok(ReferenceDataset { rows })
    }

    pub fn rows(&self) -> &[ReferenceRow] {
        &self.rows
    }

    pub fn find(&self, d: u32, a: u32, b: u32) -> Option<&ReferenceRow> {
        self.rows
            .iter()
            .find(|r| (r.degree, r.lines, r.points) == (d, a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Match,
    /// Matches under the engine label; the printed label differs.
    MatchRelabeled { printed: (u32, u32) },
    Mismatch(Vec<String>),
    Missing,
    /// Beyond the published degrees.
    Extrapolated,
}

impl RowStatus {
    pub fn is_failure(&self) -> bool {
        matches!(self, RowStatus::Mismatch(_) | RowStatus::Missing)
    }

    pub fn label(&self) -> String {
        match self {
            RowStatus::Match => "match".into(),
            RowStatus::MatchRelabeled { printed } => {
                format!("match (printed as a={} b={})", printed.0, printed.1)
            }
            RowStatus::Mismatch(fields) => format!("mismatch: {}", fields.join("; ")),
            RowStatus::Missing => "missing".into(),
            RowStatus::Extrapolated => "extrapolated".into(),
        }
    }
}

pub fn compare_row(reference: &ReferenceDataset, row: &TableRow) -> RowStatus {
    if row.degree > MAX_REFERENCE_DEGREE {
        return RowStatus::Extrapolated;
    }
    let Some(r) = reference.find(row.degree, row.lines, row.points) else {
        return RowStatus::Missing;
    };
    let mut diffs = Vec::new();
    if r.averaged != row.averaged {
        diffs.push(format!("averaged {} vs {}", row.averaged, r.averaged));
    }
    if r.expansion != row.expansion {
        diffs.push(format!(
            "expansion {} vs {}",
            row.expansion_string(),
            r.expansion_string()
        ));
    }
    if r.min != row.min {
        diffs.push(format!("min {} vs {}", row.min, r.min));
    }
    if r.complex != row.complex {
        diffs.push(format!("complex {} vs {}", row.complex, r.complex));
    }
    if !diffs.is_empty() {
        RowStatus::Mismatch(diffs)
    } else if r.label_typo {
        RowStatus::MatchRelabeled { printed: r.printed }
    } else {
        RowStatus::Match
    }
}

/// Informational: how the engine row at the printed label of a relabeled
/// reference row differs from it.
pub fn typo_notes(reference: &ReferenceDataset, rows: &[TableRow]) -> Vec<String> {
    let mut notes = Vec::new();
    for r in reference.rows().iter().filter(|r| r.label_typo) {
        let (pa, pb) = r.printed;
        if let Some(engine) = rows
            .iter()
            .find(|x| (x.degree, x.lines, x.points) == (r.degree, pa, pb))
        {
            notes.push(format!(
                "table row printed as d={} a={pa} b={pb} (averaged {}, expansion {}) is reproduced at a={} b={}; the engine row at the printed label has averaged {}, expansion {}",
                r.degree,
                r.averaged,
                r.expansion_string(),
                r.lines,
                r.points,
                engine.averaged,
                engine.expansion_string()
            ));
        }
    }
    notes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_verifies() {
        let data = ReferenceDataset::load().unwrap();
        assert_eq!(data.rows().len(), 29);
        assert_eq!(data.rows().iter().filter(|r| r.label_typo).count(), 1);
        assert_eq!(data.rows().iter().filter(|r| r.bold).count(), 6);
        let r = data.find(3, 4, 0).unwrap();
        assert_eq!(r.expansion_string(), "16,-12,-24,-12,16");
        assert_eq!(r.complex, BigInt::from(1312));
        let typo = data.find(3, 1, 2).unwrap();
        assert_eq!(typo.printed, (2, 0));
    }

    #[test]
    fn tampering_is_detected() {
        let tampered = TABLE.replace("80160", "80161");
        assert!(matches!(
            ReferenceDataset::parse(&tampered, TABLE_SHA256),
            Err(ReferenceError::Checksum(_))
        ));
    }
}
