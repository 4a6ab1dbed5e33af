//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any FAIL.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use realwdvv::algebra::Rational;
use realwdvv::complex_gw::{self, solve_complex, ComplexStore};
use realwdvv::insertions::{emit_table, mixed, reassembled, swap_sign};
use realwdvv::real_wdvv::{self, solve_real, solve_real_with, RealStore, Seed, SolveOptions};
use realwdvv::target::ProjectiveThreeSpace;
use realwdvv_cli::archive::InvariantArchive;
use realwdvv_cli::reference::ReferenceDataset;

const P3: ProjectiveThreeSpace = ProjectiveThreeSpace;
const LINE: usize = ProjectiveThreeSpace::LINE;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn run_cli(args: &[&str]) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_realwdvv"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run realwdvv: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "realwdvv {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok((String::from_utf8(out.stdout).map_err(|e| e.to_string())?, elapsed))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.expect("csv record").iter().map(str::to_string).collect())
        .collect()
}

fn complex_corpus() -> Verdict {
    let (out, elapsed) = match run_cli(&["complex-table", "-d", "3"]) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let table: BTreeMap<(u32, u32, u32), String> = csv_rows(&out)
        .into_iter()
        .map(|r| {
            (
                (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()),
                r[3].clone(),
            )
        })
        .collect();
    let reference = ReferenceDataset::load().expect("reference table");
    let mut bad = Vec::new();
    for r in reference.rows() {
        let k = 2 * r.degree as i64 - r.lines as i64 - 2 * r.points as i64;
        let key = (r.degree, 2 * r.lines, 2 * r.points + k as u32);
        if table.get(&key).map(String::as_str) != Some(&r.complex.to_string()) {
            bad.push(format!("{key:?}"));
        }
    }
    let named = [
        ((1, 4, 0), "2"),
        ((2, 8, 0), "92"),
        ((2, 6, 1), "18"),
        ((3, 6, 3), "190"),
        ((3, 8, 2), "1312"),
        ((3, 10, 1), "9864"),
        ((3, 12, 0), "80160"),
    ];
    for (key, v) in named {
        if table.get(&key).map(String::as_str) != Some(v) {
            bad.push(format!("{key:?}"));
        }
    }
    let fast = elapsed < Duration::from_secs(5);
    verdict(
        bad.is_empty() && fast,
        format!(
            "{} reference cells + {} named values, {} mismatches, {:.2}s (limit 5s)",
            reference.rows().len(),
            named.len(),
            bad.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn real_corpus() -> Verdict {
    let (out, elapsed) = match run_cli(&["real-table", "-d", "3", "--seed", "+1"]) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let table: BTreeMap<(u32, u32, u32), String> = csv_rows(&out)
        .into_iter()
        .map(|r| {
            (
                (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()),
                r[4].clone(),
            )
        })
        .collect();
    let reference = ReferenceDataset::load().expect("reference table");
    let mut bad = Vec::new();
    for r in reference.rows() {
        let key = (r.degree, r.lines, r.points);
        if table.get(&key).map(String::as_str) != Some(&r.averaged.to_string()) {
            bad.push(format!("{key:?}"));
        }
    }
    for (key, v) in [((3, 2, 0), "5"), ((3, 2, 1), "-3"), ((3, 4, 0), "-13"), ((3, 6, 0), "-7")] {
        if table.get(&key).map(String::as_str) != Some(v) {
            bad.push(format!("{key:?}"));
        }
    }
    let fast = elapsed < Duration::from_secs(10);
    verdict(
        bad.is_empty() && fast,
        format!(
            "{} reference cells + 4 named values, {} mismatches, {:.2}s (limit 10s)",
            reference.rows().len(),
            bad.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn parity_violations(store: &RealStore) -> usize {
    store
        .entries()
        .filter(|(k, v)| (k.degree + k.insertions.get(LINE)) % 2 == 0 && !v.is_zero())
        .count()
}

fn parity(complex6: &ComplexStore, real6: &RealStore) -> Verdict {
    let imposed = parity_violations(real6);
    let keys = real6
        .entries()
        .filter(|(k, _)| (k.degree + k.insertions.get(LINE)) % 2 == 0)
        .count();
    let free = solve_real_with(&P3, complex6, 6, Seed::Plus, SolveOptions { impose_parity: false });
    let (free_violations, agrees) = match &free {
        Ok((s, _)) => (parity_violations(s), s == real6),
        Err(_) => (usize::MAX, false),
    };
    verdict(
        imposed == 0 && free_violations == 0 && agrees,
        format!(
            "{keys} keys with d+a even at d<=6: {imposed} nonzero; solve without imposing parity: {}",
            if free.is_ok() {
                format!("{free_violations} nonzero, identical store: {agrees}")
            } else {
                "failed".into()
            }
        ),
    )
}

fn expansion_corpus() -> Verdict {
    let (out, _) = match run_cli(&["bounds-table", "-d", "3"]) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let rows = csv_rows(&out);
    let reference = ReferenceDataset::load().expect("reference table");
    let mut bad = Vec::new();
    let mut seen = 0;
    for r in reference.rows() {
        let key = [r.degree.to_string(), r.lines.to_string(), r.points.to_string()];
        match rows.iter().find(|x| x[..3] == key) {
            Some(x) => {
                seen += 1;
                if x[5] != r.expansion_string() || x[6] != r.min.to_string() {
                    bad.push(format!("{key:?}"));
                }
            }
            None => bad.push(format!("{key:?} missing")),
        }
    }
    let named = rows.iter().any(|x| x[..3] == ["3", "4", "0"] && x[5] == "16,-12,-24,-12,16" && x[6] == "12")
        && rows.iter().any(|x| x[..3] == ["3", "3", "0"] && x[6] == "6");
    let typo = rows
        .iter()
        .any(|x| x[..3] == ["3", "1", "2"] && x[8].starts_with("match (printed as a=2 b=0)"));
    verdict(
        bad.is_empty() && seen == reference.rows().len() && named && typo,
        format!(
            "{seen} rows compared, {} mismatches; flagged row compared at (3,1,2): {typo}",
            bad.len()
        ),
    )
}

fn pde_oracle() -> Verdict {
    let (out, elapsed) = match run_cli(&["verify-pde", "-d", "4", "--t-cap", "8"]) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let rows = csv_rows(&out);
    let failing = rows.iter().filter(|r| r[1] != "pass" || r[2] != "0").count();
    let fast = elapsed < Duration::from_secs(60);
    verdict(
        rows.len() == 80 && failing == 0 && fast,
        format!(
            "{} relation/index tuples, {failing} nonzero residual series, {:.2}s (limit 60s)",
            rows.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn property_suites(complex6: &ComplexStore, real6: &RealStore) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let complex4 = solve_complex(&P3, 4).expect("complex solve");
    let real4 = solve_real(&P3, &complex4, 4, Seed::Plus).expect("real solve");
    let c_bad = complex_gw::residual_sweep(&P3, &complex4).expect("complex sweep");
    let r_bad = real_wdvv::residual_sweep(&P3, &complex4, &real4, 4).expect("real sweep");
    let r_total = real_wdvv::instance_count(&P3, 4);
    ok &= c_bad.is_empty() && r_bad.is_empty();
    notes.push(format!(
        "(a) {} real instances, {} nonzero; complex {} nonzero",
        r_total,
        r_bad.len(),
        c_bad.len()
    ));

    let rows = emit_table(&complex4, &real4, 4).expect("table");
    let mut swap_bad = 0;
    let mut reassembly_bad = 0;
    for r in &rows {
        for p in 0..=r.lines {
            let q = r.lines - p;
            let lhs = mixed(&real4, r.degree, p, q, r.points).unwrap();
            let rhs = swap_sign(r.degree, p, q) * mixed(&real4, r.degree, q, p, r.points).unwrap();
            if lhs != rhs {
                swap_bad += 1;
            }
        }
        let back = reassembled(&real4, r.degree, r.lines, r.points).unwrap();
        if back != Rational::from_integer(r.averaged.clone()) {
            reassembly_bad += 1;
        }
    }
    ok &= swap_bad == 0 && reassembly_bad == 0;
    notes.push(format!(
        "(b) swap failures {swap_bad}; (c) reassembly failures {reassembly_bad} over {} rows",
        rows.len()
    ));

    let archive = InvariantArchive::from_stores(Some(complex6), Some(real6)).with_timestamp();
    let back = InvariantArchive::from_json(&archive.to_json()).expect("archive parses");
    let round_trip = back == archive
        && back.complex_store().ok().as_ref() == Some(complex6)
        && back.real_store().ok().flatten().as_ref() == Some(real6);
    ok &= round_trip;
    notes.push(format!("(d) archive round trip identity: {round_trip}"));
    verdict(ok, notes.join("; "))
}

fn extrapolation(complex6: &ComplexStore) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for d in 4..=6 {
        match solve_real_with(&P3, complex6, d, Seed::Plus, SolveOptions::default()) {
            Ok((store, _)) => {
                let keys = real_wdvv::real_keys(&P3, d).len();
                let present = store.entries().filter(|(k, _)| k.degree == d).count();
                ok &= present == keys;
                notes.push(format!("d={d}: {present}/{keys} determined"));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("d={d}: {e}"));
            }
        }
    }
    verdict(ok, notes.join(", "))
}

fn main() {
    let complex6 = solve_complex(&P3, 6).expect("complex solve to degree 6");
    let real6 = solve_real(&P3, &complex6, 6, Seed::Plus).expect("real solve to degree 6");

    let criteria: Vec<(&str, Verdict)> = vec![
        ("complex corpus", complex_corpus()),
        ("real corpus", real_corpus()),
        ("parity vanishing", parity(&complex6, &real6)),
        ("expansion corpus", expansion_corpus()),
        ("pde oracle", pde_oracle()),
        ("property suites", property_suites(&complex6, &real6)),
        ("extrapolation sanity", extrapolation(&complex6)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in criteria.iter().enumerate() {
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({})",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
