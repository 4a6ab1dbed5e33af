//! Command-line front end: solving, caching, table emission and the
//! verification harness.

pub mod archive;
pub mod reference;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use realwdvv::algebra::format_rational;
use realwdvv::complex_gw::{self, solve_complex, ComplexStore};
use realwdvv::insertions::{emit_table, TableRow};
use realwdvv::real_wdvv::{self, solve_real, RealStore, Seed};
use realwdvv::series::{build_potentials, verify_all, PdeReport, PotentialCaps};
use realwdvv::target::ProjectiveThreeSpace;
use serde::Serialize;
use thiserror::Error;

use archive::{parse_seed, ArchiveError, InvariantArchive};
use reference::{compare_row, typo_notes, ReferenceDataset, ReferenceError, RowStatus};

const P3: ProjectiveThreeSpace = ProjectiveThreeSpace;

#[derive(Debug, Parser)]
#[command(name = "realwdvv", version, about = "Exact complex and real genus-0 invariants of P^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Target manifold.
    #[arg(long, default_value = "p3", value_parser = ["p3"])]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Archive to reuse solved invariants from; written after solving.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn seed_arg(s: &str) -> Result<Seed, String> {
    parse_seed(s).ok_or_else(|| format!("seed must be +1 or -1, got `{s}`"))
}

fn degree_arg(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(format!("degree must be a positive integer, got `{s}`")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complex invariants ⟨(h²)^a (h³)^b⟩_d.
    ComplexTable {
        #[arg(short = 'd', long, default_value = "3", value_parser = degree_arg)]
        max_degree: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Disk invariants ⟨ℓ̃^a pt^b⟩_d with k = 2d − a − 2b real points.
    RealTable {
        #[arg(short = 'd', long, default_value = "3", value_parser = degree_arg)]
        max_degree: u32,
        #[arg(long, default_value = "+1", value_parser = seed_arg, allow_hyphen_values = true)]
        seed: Seed,
        #[command(flatten)]
        common: Common,
    },
    /// Averaged counts, ℓ₋/ℓ₊ expansions, lower bounds and complex counts.
    BoundsTable {
        #[arg(short = 'd', long, default_value = "3", value_parser = degree_arg)]
        max_degree: u32,
        #[arg(long, default_value = "+1", value_parser = seed_arg, allow_hyphen_values = true)]
        seed: Seed,
        #[command(flatten)]
        common: Common,
    },
    /// Checks both PDEs on the generating functions.
    VerifyPde {
        /// Highest power of q.
        #[arg(short = 'd', long, default_value = "4", value_parser = degree_arg)]
        max_degree: u32,
        /// Highest total degree in t.
        #[arg(long, default_value_t = 8)]
        t_cap: u32,
        #[arg(long, default_value = "+1", value_parser = seed_arg, allow_hyphen_values = true)]
        seed: Seed,
        #[command(flatten)]
        common: Common,
    },
    /// Reference comparison, relation residual sweeps and PDE check.
    Verify {
        #[arg(short = 'd', long, default_value = "3", value_parser = degree_arg)]
        max_degree: u32,
        #[arg(long, default_value_t = 8)]
        t_cap: u32,
        #[arg(long, default_value = "+1", value_parser = seed_arg, allow_hyphen_values = true)]
        seed: Seed,
        /// Only compare against the reference table.
        #[arg(long)]
        skip_pde: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Solver(#[from] realwdvv::Error),
    #[error("cache {path}: {source}")]
    Cache { path: String, source: ArchiveError },
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Cache { .. } | CliError::Reference(_) => 1,
            CliError::Solver(_) | CliError::Io { .. } => 3,
        }
    }
}

/// Rendered output and whether every check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

impl Outcome {
    fn pass(output: String) -> Self {
        Outcome {
            output,
            passed: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Solved stores, possibly read from a cache archive.
pub struct Stores {
    pub complex: ComplexStore,
    pub real: Option<RealStore>,
}

/// Solves complex invariants through `max_degree` and, if `seed` is given,
/// real invariants as well. A cache covering the request is used as is.
pub fn obtain_stores(
    max_degree: u32,
    seed: Option<Seed>,
    cache: Option<&Path>,
) -> Result<Stores, CliError> {
    let cache_err = |path: &Path, source| CliError::Cache {
        path: path.display().to_string(),
        source,
    };
    if let Some(path) = cache.filter(|p| p.exists()) {
        let archive = InvariantArchive::load(path).map_err(|e| cache_err(path, e))?;
        let complex = archive.complex_store().map_err(|e| cache_err(path, e))?;
        let real = archive.real_store().map_err(|e| cache_err(path, e))?;
        let complex_ok = complex.solved_up_to() >= max_degree;
        let real_ok = match seed {
            None => true,
            Some(s) => real
                .as_ref()
                .is_some_and(|r| r.seed() == s && r.solved_up_to() >= max_degree),
        };
        if complex_ok && real_ok {
            return Ok(Stores {
                complex,
                real: if seed.is_some() { real } else { None },
            });
        }
    }
    let complex = solve_complex(&P3, max_degree)?;
    let real = match seed {
        Some(s) => Some(solve_real(&P3, &complex, max_degree, s)?),
        None => None,
    };
    if let Some(path) = cache {
        InvariantArchive::from_stores(Some(&complex), real.as_ref())
            .with_timestamp()
            .save(path)
            .map_err(|e| cache_err(path, e))?;
    }
    Ok(Stores { complex, real })
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn render_complex(store: &ComplexStore, max_degree: u32, format: Format) -> String {
    match format {
        Format::Csv => csv_string(
            &["d", "a", "b", "value"],
            store
                .entries()
                .filter(|(k, _)| k.degree <= max_degree)
                .map(|(k, v)| {
                    vec![
                        k.degree.to_string(),
                        k.insertions.get(ProjectiveThreeSpace::LINE).to_string(),
                        k.insertions.get(ProjectiveThreeSpace::POINT).to_string(),
                        format_rational(v),
                    ]
                }),
        ),
        Format::Json => {
            let trimmed = ComplexStore::from_entries(
                store.target_id(),
                store.rank(),
                max_degree.min(store.solved_up_to()),
                store
                    .entries()
                    .filter(|(k, _)| k.degree <= max_degree)
                    .map(|(k, v)| (k.clone(), v.clone())),
            );
            InvariantArchive::from_stores(Some(&trimmed), None).to_json()
        }
    }
}

pub fn render_real(store: &RealStore, max_degree: u32, format: Format) -> String {
    match format {
        Format::Csv => csv_string(
            &["d", "a", "b", "k", "value"],
            store
                .entries()
                .filter(|(k, _)| k.degree <= max_degree)
                .map(|(k, v)| {
                    vec![
                        k.degree.to_string(),
                        k.insertions.get(ProjectiveThreeSpace::LINE).to_string(),
                        k.insertions.get(ProjectiveThreeSpace::POINT).to_string(),
                        k.k.to_string(),
                        format_rational(v),
                    ]
                }),
        ),
        Format::Json => {
            let trimmed = RealStore::from_entries(
                store.target_id(),
                store.rank(),
                store.seed(),
                max_degree.min(store.solved_up_to()),
                store
                    .entries()
                    .filter(|(k, _)| k.degree <= max_degree)
                    .map(|(k, v)| (k.clone(), v.clone())),
            );
            InvariantArchive::from_stores(None, Some(&trimmed)).to_json()
        }
    }
}

#[derive(Serialize)]
struct BoundsJson {
    d: u32,
    a: u32,
    b: u32,
    k: i64,
    averaged: String,
    expansion: Vec<String>,
    min: String,
    complex: String,
    reference: String,
}

/// Table rows with their reference status.
pub fn bounds_rows(
    stores: &Stores,
    max_degree: u32,
    reference: &ReferenceDataset,
) -> Result<Vec<(TableRow, RowStatus)>, CliError> {
    let real = stores.real.as_ref().expect("bounds need real invariants");
    let rows = emit_table(&stores.complex, real, max_degree)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            let s = compare_row(reference, &r);
            (r, s)
        })
        .collect())
}

pub fn render_bounds(rows: &[(TableRow, RowStatus)], format: Format) -> String {
    match format {
        Format::Csv => csv_string(
            &["d", "a", "b", "k", "averaged", "expansion", "min", "complex", "reference"],
            rows.iter().map(|(r, s)| {
                vec![
                    r.degree.to_string(),
                    r.lines.to_string(),
                    r.points.to_string(),
                    r.real_points.to_string(),
                    r.averaged.to_string(),
                    r.expansion_string(),
                    r.min.to_string(),
                    r.complex.to_string(),
                    s.label(),
                ]
            }),
        ),
        Format::Json => {
            let out: Vec<BoundsJson> = rows
                .iter()
                .map(|(r, s)| BoundsJson {
                    d: r.degree,
                    a: r.lines,
                    b: r.points,
                    k: r.real_points,
                    averaged: r.averaged.to_string(),
                    expansion: r.expansion.iter().map(|v| v.to_string()).collect(),
                    min: r.min.to_string(),
                    complex: r.complex.to_string(),
                    reference: s.label(),
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&out).expect("serializes");
            s.push('\n');
            s
        }
    }
}

#[derive(Serialize)]
struct PdeJson {
    relation: String,
    passed: bool,
    nonzero_terms: usize,
    first_exponent: Option<Vec<u32>>,
    coefficient: Option<String>,
}

pub fn render_pde(reports: &[PdeReport], format: Format) -> String {
    let exponent = |e: &Vec<u32>| {
        e.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    match format {
        Format::Csv => csv_string(
            &["relation", "status", "nonzero_terms", "first_exponent", "coefficient"],
            reports.iter().map(|r| {
                let (e, c) = match &r.first_offending {
                    Some((e, c)) => (exponent(e), format_rational(c)),
                    None => (String::new(), String::new()),
                };
                vec![
                    r.tag.to_string(),
                    if r.passed() { "pass" } else { "fail" }.into(),
                    r.nonzero_terms.to_string(),
                    e,
                    c,
                ]
            }),
        ),
        Format::Json => {
            let out: Vec<PdeJson> = reports
                .iter()
                .map(|r| PdeJson {
                    relation: r.tag.to_string(),
                    passed: r.passed(),
                    nonzero_terms: r.nonzero_terms,
                    first_exponent: r.first_offending.as_ref().map(|(e, _)| e.clone()),
                    coefficient: r.first_offending.as_ref().map(|(_, c)| format_rational(c)),
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&out).expect("serializes");
            s.push('\n');
            s
        }
    }
}

pub fn pde_reports(stores: &Stores, max_degree: u32, t_cap: u32) -> Result<Vec<PdeReport>, CliError> {
    let real = stores.real.as_ref().expect("PDE check needs real invariants");
    let pair = build_potentials(
        &P3,
        &stores.complex,
        real,
        PotentialCaps::new(max_degree, t_cap),
    )?;
    Ok(verify_all(&P3, &pair)?)
}

/// Runs every check and reports line by line, stopping at nothing.
pub fn verify(
    stores: &Stores,
    max_degree: u32,
    t_cap: u32,
    skip_pde: bool,
) -> Result<Outcome, CliError> {
    let mut lines = Vec::new();
    let mut passed = true;
    let reference = ReferenceDataset::load()?;
    let rows = bounds_rows(stores, max_degree, &reference)?;
    let compared: Vec<_> = rows
        .iter()
        .filter(|(_, s)| !matches!(s, RowStatus::Extrapolated))
        .collect();
    let failures: Vec<_> = compared.iter().filter(|(_, s)| s.is_failure()).collect();
    lines.push(format!(
        "reference: {} rows compared, {} mismatched, {} extrapolated",
        compared.len(),
        failures.len(),
        rows.len() - compared.len()
    ));
    if let Some((r, s)) = failures.first() {
        passed = false;
        lines.push(format!(
            "  first failure: d={} a={} b={}: {}",
            r.degree,
            r.lines,
            r.points,
            s.label()
        ));
    }
    let table_rows: Vec<TableRow> = rows.iter().map(|(r, _)| r.clone()).collect();
    for note in typo_notes(&reference, &table_rows) {
        lines.push(format!("  note: {note}"));
    }

    if skip_pde {
        lines.push("relations: skipped".into());
        lines.push("pde: skipped".into());
    } else {
        let real = stores.real.as_ref().expect("verify solves real invariants");
        let complex_bad = complex_gw::residual_sweep(&P3, &stores.complex)?;
        let complex_total: usize = (1..=stores.complex.solved_up_to())
            .map(|d| complex_gw::associativity_instances(&P3, d).len())
            .sum();
        lines.push(format!(
            "complex relations: {complex_total} instances, {} nonzero",
            complex_bad.len()
        ));
        if let Some((inst, v)) = complex_bad.first() {
            passed = false;
            lines.push(format!("  first failure: {inst:?} residual {}", format_rational(v)));
        }
        let real_bad = real_wdvv::residual_sweep(&P3, &stores.complex, real, max_degree)?;
        lines.push(format!(
            "real relations: {} instances, {} nonzero",
            real_wdvv::instance_count(&P3, max_degree),
            real_bad.len()
        ));
        if let Some((p, v)) = real_bad.first() {
            passed = false;
            lines.push(format!("  first failure: {p} residual {}", format_rational(v)));
        }
        let parity_bad: Vec<_> = real
            .entries()
            .filter(|(k, v)| (k.degree + k.insertions.get(ProjectiveThreeSpace::LINE)) % 2 == 0 && !v.is_zero())
            .collect();
        lines.push(format!("parity vanishing: {} violations", parity_bad.len()));
        if let Some((k, v)) = parity_bad.first() {
            passed = false;
            lines.push(format!("  first failure: {k} = {}", format_rational(v)));
        }
        let reports = pde_reports(stores, max_degree, t_cap)?;
        let failing: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
        lines.push(format!(
            "pde: {} relations at q^{max_degree}, t-degree {t_cap}, {} failing",
            reports.len(),
            failing.len()
        ));
        if let Some(r) = failing.first() {
            passed = false;
            let (e, c) = r.first_offending.as_ref().expect("failing report");
            lines.push(format!(
                "  first failure: {} at exponent {:?} coefficient {}",
                r.tag,
                e,
                format_rational(c)
            ));
        }
    }
    lines.push(format!("verify: {}", if passed { "PASS" } else { "FAIL" }));
    let mut output = lines.join("\n");
    output.push('\n');
    Ok(Outcome { output, passed })
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (outcome, output_path) = match cli.command {
        Command::ComplexTable { max_degree, common } => {
            let stores = obtain_stores(max_degree, None, common.cache.as_deref())?;
            (
                Outcome::pass(render_complex(&stores.complex, max_degree, common.format)),
                common.output,
            )
        }
        Command::RealTable {
            max_degree,
            seed,
            common,
        } => {
            let stores = obtain_stores(max_degree, Some(seed), common.cache.as_deref())?;
            let real = stores.real.as_ref().expect("seeded");
            (
                Outcome::pass(render_real(real, max_degree, common.format)),
                common.output,
            )
        }
        Command::BoundsTable {
            max_degree,
            seed,
            common,
        } => {
            let stores = obtain_stores(max_degree, Some(seed), common.cache.as_deref())?;
            let reference = ReferenceDataset::load()?;
            let rows = bounds_rows(&stores, max_degree, &reference)?;
            // The reference is printed for the +1 seed only.
            let passed = seed == Seed::Minus || rows.iter().all(|(_, s)| !s.is_failure());
            (
                Outcome {
                    output: render_bounds(&rows, common.format),
                    passed,
                },
                common.output,
            )
        }
        Command::VerifyPde {
            max_degree,
            t_cap,
            seed,
            common,
        } => {
            let stores = obtain_stores(max_degree, Some(seed), common.cache.as_deref())?;
            let reports = pde_reports(&stores, max_degree, t_cap)?;
            (
                Outcome {
                    output: render_pde(&reports, common.format),
                    passed: reports.iter().all(|r| r.passed()),
                },
                common.output,
            )
        }
        Command::Verify {
            max_degree,
            t_cap,
            seed,
            skip_pde,
            common,
        } => {
            let stores = obtain_stores(max_degree, Some(seed), common.cache.as_deref())?;
            (verify(&stores, max_degree, t_cap, skip_pde)?, common.output)
        }
    };
    if let Some(path) = output_path {
        std::fs::write(&path, &outcome.output).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        return Ok(Outcome {
            output: String::new(),
            passed: outcome.passed,
        });
    }
    Ok(outcome)
}
