//! Versioned JSON archive of solved invariants. Values are exact rational
//! strings so that archives are diffable and reload losslessly.

use std::path::Path;

use realwdvv::algebra::{format_rational, parse_rational, Rational};
use realwdvv::complex_gw::{ComplexKey, ComplexStore};
use realwdvv::real_wdvv::{RealKey, RealStore, Seed};
use realwdvv::target::{ProjectiveThreeSpace, TargetModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed archive: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported archive format version {0}")]
    Version(u32),
    #[error("unsupported target `{0}`")]
    Target(String),
    #[error("bad value `{value}` in entry {entry}")]
    Value { entry: String, value: String },
    #[error("bad seed `{0}`")]
    Seed(String),
    #[error("entry {0} is inconsistent with the dimension count")]
    Key(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealEntry {
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub k: i64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub created_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantArchive {
    pub format_version: u32,
    pub target: String,
    pub seed: Option<String>,
    pub complex_degree: u32,
    pub real_degree: u32,
    pub complex: Vec<ComplexEntry>,
    pub real: Vec<RealEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

pub fn seed_label(seed: Seed) -> &'static str {
    match seed {
        Seed::Plus => "+1",
        Seed::Minus => "-1",
    }
}

pub fn parse_seed(s: &str) -> Option<Seed> {
    match s.trim() {
        "+1" | "1" => Some(Seed::Plus),
        "-1" => Some(Seed::Minus),
        _ => None,
    }
}

fn lines_points(ins: &realwdvv::algebra::MultiIndex) -> (u32, u32) {
    (
        ins.get(ProjectiveThreeSpace::LINE),
        ins.get(ProjectiveThreeSpace::POINT),
    )
}

impl InvariantArchive {
    pub fn from_stores(complex: Option<&ComplexStore>, real: Option<&RealStore>) -> Self {
        let complex_entries = complex
            .map(|c| {
                c.entries()
                    .map(|(k, v)| {
                        let (a, b) = lines_points(&k.insertions);
                        ComplexEntry {
                            d: k.degree,
                            a,
                            b,
                            value: format_rational(v),
                        }
                    })
                    .collect()
            })
            .unwrap_or_default();
        let real_entries = real
            .map(|r| {
                r.entries()
                    .map(|(k, v)| {
                        let (a, b) = lines_points(&k.insertions);
                        RealEntry {
                            d: k.degree,
                            a,
                            b,
                            k: k.k,
                            value: format_rational(v),
                        }
                    })
                    .collect()
            })
            .unwrap_or_default();
        InvariantArchive {
            format_version: FORMAT_VERSION,
            target: ProjectiveThreeSpace.id().to_string(),
            seed: real.map(|r| seed_label(r.seed()).to_string()),
            complex_degree: complex.map_or(0, |c| c.solved_up_to()),
            real_degree: real.map_or(0, |r| r.solved_up_to()),
            complex: complex_entries,
            real: real_entries,
            provenance: None,
        }
    }

    pub fn with_timestamp(mut self) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.provenance = Some(Provenance {
            generator: format!("realwdvv {}", env!("CARGO_PKG_VERSION")),
            created_unix,
        });
        self
    }

    fn check_header(&self) -> Result<(), ArchiveError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ArchiveError::Version(self.format_version));
        }
        if self.target != ProjectiveThreeSpace.id() {
            return Err(ArchiveError::Target(self.target.clone()));
        }
        Ok(())
    }

    pub fn complex_store(&self) -> Result<ComplexStore, ArchiveError> {
        self.check_header()?;
        let mut entries = Vec::new();
        for e in &self.complex {
            let label = format!("complex({},{},{})", e.d, e.a, e.b);
            if e.a + 2 * e.b != 4 * e.d {
                return Err(ArchiveError::Key(label));
            }
            entries.push((ComplexKey::p3(e.d, e.a, e.b), value(&label, &e.value)?));
        }
        Ok(ComplexStore::from_entries(
            &self.target,
            ProjectiveThreeSpace.rank(),
            self.complex_degree,
            entries,
        ))
    }

    /// `None` when the archive holds no real invariants.
    pub fn real_store(&self) -> Result<Option<RealStore>, ArchiveError> {
        self.check_header()?;
        let Some(seed) = &self.seed else {
            return Ok(None);
        };
        let seed = parse_seed(seed).ok_or_else(|| ArchiveError::Seed(seed.clone()))?;
        let mut entries = Vec::new();
        for e in &self.real {
            let label = format!("real({},{},{},k={})", e.d, e.a, e.b, e.k);
            let key = RealKey::p3(e.d, e.a, e.b);
            if key.k != e.k {
                return Err(ArchiveError::Key(label));
            }
            entries.push((key, value(&label, &e.value)?));
        }
        Ok(Some(RealStore::from_entries(
            &self.target,
            ProjectiveThreeSpace.rank(),
            seed,
            self.real_degree,
            entries,
        )))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, ArchiveError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ArchiveError> {
        std::fs::write(path, self.to_json()).map_err(|source| ArchiveError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ArchiveError> {
        let s = std::fs::read_to_string(path).map_err(|source| ArchiveError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&s)
    }
}

fn value(entry: &str, s: &str) -> Result<Rational, ArchiveError> {
    parse_rational(s).ok_or_else(|| ArchiveError::Value {
        entry: entry.to_string(),
        value: s.to_string(),
    })
}
