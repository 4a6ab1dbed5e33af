//! Line classes in `H₂(ℙ³ − ℝℙ³)`: the two lines `ℓ₋`, `ℓ₊`, their average
//! `ℓ̃ = (ℓ₋ + ℓ₊)/2` and the normal sphere `s = ℓ₊ − ℓ₋`.
//!
//! An `s` insertion trades for one extra real point and a factor 2. Expanding
//! `ℓ_± = ℓ̃ ± s/2` turns any mixture of `ℓ₋`, `ℓ₊` into averaged-line
//! invariants.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::algebra::{big, binomial, format_rational, int, pow2, MultiIndex, Rational};
use crate::complex_gw::ComplexStore;
use crate::real_wdvv::RealStore;
use crate::target::{DegreeClass, ProjectiveThreeSpace, TargetModel};
use crate::{Error, Result};

/// `⟨ℓ₋^p ℓ₊^q pt^b⟩_d`
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineClassExpr {
    pub degree: u32,
    pub minus: u32,
    pub plus: u32,
    pub points: u32,
}

impl LineClassExpr {
    /// Number of real points fixed by dimension.
    pub fn real_points(&self) -> i64 {
        2 * self.degree as i64 - (self.minus + self.plus) as i64 - 2 * self.points as i64
    }
}

/// `c_m(p, q) = Σ_{i+j=m} (−1)^i C(p,i) C(q,j)`, the coefficient of `s^m`
/// in `(ℓ̃ − s/2)^p (ℓ̃ + s/2)^q` after clearing `2^{−m}`.
pub fn expansion_coefficient(p: u32, q: u32, m: u32) -> BigInt {
    (0..=m.min(p))
        .map(|i| {
            let term = binomial(p as u64, i as u64) * binomial(q as u64, (m - i) as u64);
            if i % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// `⟨λ, s^m⟩_{d,k} = 2^m ⟨λ⟩_{d,k+m}`.
///
/// Returns zero unless `k` is the dimension count of `λ` with `m` sphere
/// insertions, which is `k_B(λ) − m`.
pub fn sphere_trade<T: TargetModel + ?Sized>(
    target: &T,
    store: &RealStore,
    degree: u32,
    lambda: &MultiIndex,
    k: i64,
    m: u32,
) -> Result<Rational> {
    let kb = target.real_point_count(DegreeClass(degree as i64), lambda);
    if k < 0 || k + m as i64 != kb {
        return Ok(Rational::zero());
    }
    Ok(pow2(m as i64) * store.evaluate(target, degree as i64, lambda, k + m as i64)?)
}

/// `⟨ℓ₋^p ℓ₊^q pt^b⟩_d = Σ_m c_m(p,q) 2^{−m} ⟨ℓ̃^{p+q−m} pt^b s^m⟩_d`.
pub fn mixed_line_invariant(store: &RealStore, expr: LineClassExpr) -> Result<Rational> {
    let p3 = ProjectiveThreeSpace;
    let k = expr.real_points();
    if k < 0 {
        return Ok(Rational::zero());
    }
    let total = expr.minus + expr.plus;
    let mut acc = Rational::zero();
    for m in 0..=total {
        let c = expansion_coefficient(expr.minus, expr.plus, m);
        if c.is_zero() {
            continue;
        }
        let lambda = ProjectiveThreeSpace::insertions(total - m, expr.points);
        let traded = sphere_trade(&p3, store, expr.degree, &lambda, k, m)?;
        acc += big(c) * pow2(-(m as i64)) * traded;
    }
    Ok(acc)
}

pub fn mixed(store: &RealStore, d: u32, p: u32, q: u32, b: u32) -> Result<Rational> {
    mixed_line_invariant(
        store,
        LineClassExpr {
            degree: d,
            minus: p,
            plus: q,
            points: b,
        },
    )
}

/// The counts `⟨ℓ₋^{a−i} ℓ₊^i pt^b⟩_d` for `i = 0..=a`.
pub fn expansion(store: &RealStore, d: u32, a: u32, b: u32) -> Result<Vec<Rational>> {
    (0..=a).map(|i| mixed(store, d, a - i, i, b)).collect()
}

/// `min_i |⟨ℓ₋^{a−i} ℓ₊^i pt^b⟩_d|`
pub fn lower_bound(store: &RealStore, d: u32, a: u32, b: u32) -> Result<Rational> {
    Ok(expansion(store, d, a, b)?
        .into_iter()
        .map(|v| v.abs())
        .min()
        .expect("expansion is nonempty"))
}

/// One row of the table: real count, line expansion, bound, complex count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub degree: u32,
    pub lines: u32,
    pub points: u32,
    pub real_points: i64,
    pub averaged: BigInt,
    pub expansion: Vec<BigInt>,
    pub min: BigInt,
    pub complex: BigInt,
}

impl TableRow {
    pub fn expansion_string(&self) -> String {
        self.expansion
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn integral(what: impl FnOnce() -> String, value: Rational) -> Result<BigInt> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(Error::NonInteger {
            what: what(),
            value,
        })
    }
}

/// All rows with `2d − a − 2b ≥ 0` and `d ≤ max_degree`, ordered by
/// `(d, a, b)`. The complex column counts curves through `2a` lines and
/// `2b + k` points.
pub fn emit_table(complex: &ComplexStore, real: &RealStore, max_degree: u32) -> Result<Vec<TableRow>> {
    let mut cells = Vec::new();
    for d in 1..=max_degree {
        for a in 0..=2 * d {
            for b in 0..=(2 * d - a) / 2 {
                cells.push((d, a, b));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(d, a, b)| {
            let label = || format!("d={d} a={a} b={b}");
            let k = 2 * d as i64 - a as i64 - 2 * b as i64;
            let averaged = integral(label, real.invariant(d, a, b)?)?;
            let expansion = expansion(real, d, a, b)?
                .into_iter()
                .map(|v| integral(label, v))
                .collect::<Result<Vec<_>>>()?;
            let min = expansion.iter().map(|v| v.abs()).min().expect("nonempty");
            let complex = integral(label, complex.invariant(d, 2 * a, 2 * b + k as u32)?)?;
            Ok(TableRow {
                degree: d,
                lines: a,
                points: b,
                real_points: k,
                averaged,
                expansion,
                min,
                complex,
            })
        })
        .collect()
}

/// `Σ_i C(a,i) ⟨ℓ₋^{a−i} ℓ₊^i pt^b⟩ / 2^a`, which reassembles `⟨ℓ̃^a pt^b⟩`.
pub fn reassembled(store: &RealStore, d: u32, a: u32, b: u32) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (i, v) in expansion(store, d, a, b)?.into_iter().enumerate() {
        acc += big(binomial(a as u64, i as u64)) * v;
    }
    Ok(acc * pow2(-(a as i64)))
}

/// `(−1)^{d+p+q+1}`
pub fn swap_sign(d: u32, p: u32, q: u32) -> Rational {
    if (d + p + q + 1).is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

pub fn format_row_values(values: &[Rational]) -> String {
    values.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_gw::solve_complex;
    use crate::real_wdvv::{solve_real, Seed};
    use proptest::prelude::*;

    fn stores(max: u32) -> (ComplexStore, RealStore) {
        let c = solve_complex(&ProjectiveThreeSpace, max).unwrap();
        let r = solve_real(&ProjectiveThreeSpace, &c, max, Seed::Plus).unwrap();
        (c, r)
    }

    #[test]
    fn coefficients() {
        assert_eq!(expansion_coefficient(1, 0, 1), BigInt::from(-1));
        assert_eq!(expansion_coefficient(1, 1, 1), BigInt::from(0));
        assert_eq!(expansion_coefficient(1, 1, 2), BigInt::from(-1));
        assert_eq!(expansion_coefficient(3, 0, 1), BigInt::from(-3));
        assert_eq!(expansion_coefficient(3, 0, 3), BigInt::from(-1));
    }

    #[test]
    fn sphere_trade_examples() {
        let (_, r) = stores(2);
        let p3 = ProjectiveThreeSpace;
        let empty = MultiIndex::zeros(4);
        assert_eq!(sphere_trade(&p3, &r, 1, &empty, 1, 1).unwrap(), int(2));
        assert_eq!(sphere_trade(&p3, &r, 1, &empty, 0, 2).unwrap(), int(4));
        assert_eq!(sphere_trade(&p3, &r, 1, &empty, 2, 1).unwrap(), int(0));
        let two_lines = ProjectiveThreeSpace::insertions(2, 0);
        assert_eq!(sphere_trade(&p3, &r, 2, &two_lines, 1, 1).unwrap(), int(0));
    }

    #[test]
    fn mixed_examples() {
        let (_, r) = stores(3);
        assert_eq!(mixed(&r, 1, 1, 0, 0).unwrap(), int(-1));
        assert_eq!(mixed(&r, 1, 1, 1, 0).unwrap(), int(-2));
        assert_eq!(mixed(&r, 3, 3, 0, 0).unwrap(), int(-14));
        assert_eq!(mixed(&r, 3, 1, 1, 0).unwrap(), int(6));
        assert_eq!(lower_bound(&r, 3, 3, 0).unwrap(), int(6));
        assert_eq!(lower_bound(&r, 3, 4, 0).unwrap(), int(12));
        assert_eq!(lower_bound(&r, 1, 2, 0).unwrap(), int(0));
    }

    #[test]
    fn table_rows() {
        let (c, r) = stores(3);
        let rows = emit_table(&c, &r, 3).unwrap();
        assert_eq!(rows.len(), 4 + 9 + 16);
        let row = |d, a, b| rows.iter().find(|x| (x.degree, x.lines, x.points) == (d, a, b)).unwrap();
        assert_eq!(row(3, 4, 0).expansion_string(), "16,-12,-24,-12,16");
        assert_eq!(row(3, 4, 0).min, BigInt::from(12));
        assert_eq!(row(3, 4, 0).complex, BigInt::from(1312));
        assert_eq!(row(2, 4, 0).expansion_string(), "8,8,0,-8,-8");
        assert_eq!(row(2, 4, 0).complex, BigInt::from(92));
        assert_eq!(row(1, 2, 0).expansion_string(), "0,-2,0");
        assert_eq!(row(1, 0, 1).averaged, BigInt::from(-1));
    }

    #[test]
    fn swap_and_reassembly() {
        let (_, r) = stores(4);
        for d in 1..=4 {
            for a in 0..=2 * d {
                for b in 0..=(2 * d - a) / 2 {
                    assert_eq!(reassembled(&r, d, a, b).unwrap(), r.invariant(d, a, b).unwrap());
                    for i in 0..=a {
                        let p = a - i;
                        assert_eq!(
                            mixed(&r, d, p, i, b).unwrap(),
                            swap_sign(d, p, i) * mixed(&r, d, i, p, b).unwrap()
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn coefficient_reflection(p in 0u32..8, q in 0u32..8, m in 0u32..16) {
            let c = expansion_coefficient(p, q, m);
            let r = expansion_coefficient(q, p, m);
            prop_assert_eq!(c.clone(), if m % 2 == 0 { r } else { -r });
            // total mass: Σ_m c_m = (1 − 1)^p 2^q
            let sum: BigInt = (0..=p + q).map(|m| expansion_coefficient(p, q, m)).sum();
            let expected = if p == 0 { BigInt::from(1) << q } else { BigInt::zero() };
            prop_assert_eq!(sum, expected);
        }
    }
}
