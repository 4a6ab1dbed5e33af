use num_traits::Signed;
use realwdvv::algebra::{int, Rational};
use realwdvv::complex_gw::{self, solve_complex};
use realwdvv::insertions::{emit_table, expansion, lower_bound};
use realwdvv::real_wdvv::{self, solve_real, solve_real_with, Seed, SolveOptions};
use realwdvv::series::{build_potentials, verify_all, PotentialCaps};
use realwdvv::target::ProjectiveThreeSpace;
use realwdvv::Error;

const P3: ProjectiveThreeSpace = ProjectiveThreeSpace;

#[test]
fn complex_invariants_and_sweep() {
    let c = solve_complex(&P3, 4).unwrap();
    for (d, a, b, v) in [(1, 0, 2, 1), (2, 0, 4, 0), (3, 0, 6, 1), (3, 12, 0, 80160)] {
        assert_eq!(c.invariant(d, a, b).unwrap(), int(v), "({d},{a},{b})");
    }
    assert!(complex_gw::residual_sweep(&P3, &c).unwrap().is_empty());
}

#[test]
fn minus_seed_flips_sign_for_even_k() {
    let c = solve_complex(&P3, 3).unwrap();
    let plus = solve_real(&P3, &c, 3, Seed::Plus).unwrap();
    let minus = solve_real(&P3, &c, 3, Seed::Minus).unwrap();
    for (key, v) in plus.entries() {
        let sign = if key.k % 2 == 0 { -1 } else { 1 };
        assert_eq!(minus.invariant(key.degree, key.insertions.get(2), key.insertions.get(3)).unwrap(), v * int(sign));
    }
    assert!(real_wdvv::residual_sweep(&P3, &c, &minus, 3).unwrap().is_empty());
}

#[test]
fn parity_is_a_consequence_of_the_relations() {
    let c = solve_complex(&P3, 4).unwrap();
    let imposed = solve_real(&P3, &c, 4, Seed::Plus).unwrap();
    let (free, reports) =
        solve_real_with(&P3, &c, 4, Seed::Plus, SolveOptions { impose_parity: false }).unwrap();
    assert_eq!(free, imposed);
    assert_eq!(reports.len(), 5);
}

#[test]
fn table_columns_are_consistent() {
    let c = solve_complex(&P3, 4).unwrap();
    let r = solve_real(&P3, &c, 4, Seed::Plus).unwrap();
    for row in emit_table(&c, &r, 4).unwrap() {
        let exp = expansion(&r, row.degree, row.lines, row.points).unwrap();
        let min = exp.iter().map(|v| v.abs()).min().unwrap();
        assert_eq!(min, lower_bound(&r, row.degree, row.lines, row.points).unwrap());
        assert!(Rational::from_integer(row.min.clone()) <= Rational::from_integer(row.complex.clone()));
    }
}

#[test]
fn generating_functions_satisfy_both_pdes() {
    let c = solve_complex(&P3, 3).unwrap();
    let r = solve_real(&P3, &c, 3, Seed::Plus).unwrap();
    let pair = build_potentials(&P3, &c, &r, PotentialCaps::new(3, 6)).unwrap();
    let reports = verify_all(&P3, &pair).unwrap();
    assert_eq!(reports.len(), 80);
    assert!(reports.iter().all(|rep| rep.passed()));
}

#[test]
fn errors_surface_cleanly() {
    let c = solve_complex(&P3, 2).unwrap();
    assert!(matches!(c.invariant(3, 12, 0), Err(Error::NotSolved { .. })));
    let r = solve_real(&P3, &c, 2, Seed::Plus).unwrap();
    assert!(matches!(
        build_potentials(&P3, &c, &r, PotentialCaps::new(3, 4)),
        Err(Error::CapExceedsSolved { .. })
    ));
    assert!(matches!(solve_real(&P3, &c, 0, Seed::Plus), Err(Error::InvalidArgument(_))));
}
