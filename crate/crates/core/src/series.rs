//! The generating functions `Φ` and `Ω` as truncated series, and the two
//! PDEs they satisfy. This recomputes the relations by series arithmetic,
//! independently of the coefficient-level instance builder.
//!
//! Variables are `t_1..t_N, u, q` in that order. `Φ` carries `q^{𝔡(B′)}` and
//! `Ω` carries `q^B`, so products of the two line up on the real degree.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::truncated::TotalCap;
use crate::algebra::{big, factorial, pow2, MultiIndex, Rational, SeriesCaps, TruncatedSeries};
use crate::complex_gw::ComplexStore;
use crate::real_wdvv::{RealStore, RelationTag};
use crate::target::{DegreeClass, TargetModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialCaps {
    /// Highest power of `q`.
    pub degree: u32,
    /// Highest total degree in the `t_j`.
    pub t_total: u32,
    /// Highest power of `u`.
    pub u: u32,
}

impl PotentialCaps {
    /// `u` capped at `2D + 2`.
    pub fn new(degree: u32, t_total: u32) -> Self {
        PotentialCaps {
            degree,
            t_total,
            u: 2 * degree + 2,
        }
    }

    fn series_caps(&self, n: usize) -> SeriesCaps {
        let mut per_variable = vec![None; n + 2];
        per_variable[n] = Some(self.u as i64);
        per_variable[n + 1] = Some(self.degree as i64);
        SeriesCaps {
            per_variable,
            total: Some(TotalCap {
                variables: (0..n).collect(),
                cap: self.t_total as i64,
            }),
        }
    }
}

/// `1/λ!`, the weight of `t^λ q^{𝔡(B′)}` in `Φ` relative to `⟨μ^λ⟩_{B′}`.
pub fn phi_weight(lambda: &MultiIndex) -> Rational {
    Rational::new(1.into(), lambda.factorial())
}

/// `2^{1−|λ|}/(k! λ!)`, the weight of `t^λ u^k q^B` in `Ω` relative to
/// `⟨μ^λ⟩_{B,k}`.
pub fn omega_weight(k: u32, lambda: &MultiIndex) -> Rational {
    pow2(1 - lambda.total() as i64) / big(factorial(k as u64) * lambda.factorial())
}

/// Factor turning the PDE coefficient at [`relation_exponent`] into the
/// residual of the matching relation instance: `2^{|λ|} λ! (k−1)!` for M12
/// and `2^{|λ|+1} λ! k!` for M03.
pub fn instance_scale(tag: RelationTag, k: i64, lambda: &MultiIndex) -> Rational {
    let base = pow2(lambda.total() as i64) * big(lambda.factorial());
    match tag {
        RelationTag::M12 { .. } => base * big(factorial((k - 1) as u64)),
        RelationTag::M03 { .. } => base * pow2(1) * big(factorial(k as u64)),
    }
}

/// Exponent `(t^λ, u^{k−1}, q^d)` for M12 and `(t^λ, u^k, q^d)` for M03.
pub fn relation_exponent(tag: RelationTag, degree: u32, k: i64, lambda: &MultiIndex) -> Vec<u32> {
    let mut e: Vec<u32> = lambda.counts().to_vec();
    let upow = match tag {
        RelationTag::M12 { .. } => k - 1,
        RelationTag::M03 { .. } => k,
    };
    e.push(upow as u32);
    e.push(degree);
    e
}

#[derive(Debug, Clone)]
pub struct PotentialPair {
    pub phi: TruncatedSeries,
    pub omega: TruncatedSeries,
    pub caps: PotentialCaps,
    rank: usize,
}

impl PotentialPair {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn u_var(&self) -> usize {
        self.rank
    }

    pub fn q_var(&self) -> usize {
        self.rank + 1
    }
}

/// All `λ` over every slot with `|λ| ≤ cap`.
fn all_patterns(rank: usize, cap: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; rank];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == cur.len() {
            out.push(MultiIndex::from_counts(cur));
            return;
        }
        for n in 0..=left {
            cur[pos] = n;
            rec(pos + 1, left - n, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, cap, &mut cur, &mut out);
    out
}

pub fn variable_names<T: TargetModel + ?Sized>(target: &T) -> Vec<String> {
    let mut names: Vec<String> = (1..=target.rank()).map(|j| format!("t{j}")).collect();
    names.push("u".into());
    names.push("q".into());
    names
}

pub fn build_potentials<T: TargetModel + ?Sized>(
    target: &T,
    complex: &ComplexStore,
    real: &RealStore,
    caps: PotentialCaps,
) -> Result<PotentialPair> {
    if caps.degree > real.solved_up_to() {
        return Err(Error::CapExceedsSolved {
            cap: caps.degree,
            solved: real.solved_up_to(),
        });
    }
    let n = target.rank();
    let scaps = caps.series_caps(n);
    let names = variable_names(target);
    let patterns = all_patterns(n, caps.t_total);

    let mut phi = TruncatedSeries::new(names.clone(), scaps.clone());
    let mut dp = 0i64;
    loop {
        let qpow = target.doubling(DegreeClass(dp)).0;
        if qpow > caps.degree as i64 {
            break;
        }
        if dp > complex.solved_up_to() as i64 {
            return Err(Error::CapExceedsSolved {
                cap: caps.degree,
                solved: complex.solved_up_to(),
            });
        }
        let terms: Vec<(Vec<u32>, Rational)> = patterns
            .par_iter()
            .map(|lambda| -> Result<Option<(Vec<u32>, Rational)>> {
                let v = complex.evaluate(target, dp, lambda)?;
                if v.is_zero() {
                    return Ok(None);
                }
                let mut e = lambda.counts().to_vec();
                e.push(0);
                e.push(qpow as u32);
                Ok(Some((e, v * phi_weight(lambda))))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for (e, v) in terms {
            phi.add_term(e, v);
        }
        dp += 1;
    }

    let mut omega = TruncatedSeries::new(names, scaps);
    for d in 0..=caps.degree {
        let terms: Vec<(Vec<u32>, Rational)> = patterns
            .par_iter()
            .map(|lambda| -> Result<Option<(Vec<u32>, Rational)>> {
                let k = target.real_point_count(DegreeClass(d as i64), lambda);
                if k < 0 || k > caps.u as i64 {
                    return Ok(None);
                }
                let v = real.evaluate(target, d as i64, lambda, k)?;
                if v.is_zero() {
                    return Ok(None);
                }
                let mut e = lambda.counts().to_vec();
                e.push(k as u32);
                e.push(d);
                Ok(Some((e, v * omega_weight(k as u32, lambda))))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for (e, v) in terms {
            omega.add_term(e, v);
        }
    }
    Ok(PotentialPair {
        phi,
        omega,
        caps,
        rank: n,
    })
}

/// Partial derivatives needed by both PDEs, computed once.
pub struct Derivatives {
    rank: usize,
    /// `∂_x∂_y Ω` for `x ≤ y` over `t_1..t_N, u`.
    omega2: BTreeMap<(usize, usize), TruncatedSeries>,
    /// `∂_a∂_b∂_i Φ` for sorted triples.
    phi3: BTreeMap<(usize, usize, usize), TruncatedSeries>,
}

impl Derivatives {
    pub fn new(pair: &PotentialPair) -> Self {
        let n = pair.rank;
        let vars: Vec<usize> = (0..=n).collect();
        let omega1: Vec<TruncatedSeries> = vars.par_iter().map(|&x| pair.omega.partial(x)).collect();
        let pairs: Vec<(usize, usize)> = vars
            .iter()
            .flat_map(|&x| vars.iter().filter(move |&&y| y >= x).map(move |&y| (x, y)))
            .collect();
        let omega2 = pairs
            .par_iter()
            .map(|&(x, y)| ((x, y), omega1[x].partial(y)))
            .collect();
        let phi1: Vec<TruncatedSeries> = (0..n).into_par_iter().map(|a| pair.phi.partial(a)).collect();
        let mut triples = Vec::new();
        for a in 0..n {
            for b in a..n {
                for i in b..n {
                    triples.push((a, b, i));
                }
            }
        }
        let phi3 = triples
            .par_iter()
            .map(|&(a, b, i)| ((a, b, i), phi1[a].partial(b).partial(i)))
            .collect();
        Derivatives {
            rank: n,
            omega2,
            phi3,
        }
    }

    fn omega(&self, x: usize, y: usize) -> &TruncatedSeries {
        &self.omega2[&(x.min(y), x.max(y))]
    }

    fn phi(&self, a: usize, b: usize, i: usize) -> &TruncatedSeries {
        let mut t = [a, b, i];
        t.sort_unstable();
        &self.phi3[&(t[0], t[1], t[2])]
    }

    /// `Σ_{ij} Φ_{abi} g^{ij} Ω_{jx} + Ω_{ab} Ω_{xu}` with `x` the slot
    /// carried by the real factor.
    fn psi<T: TargetModel + ?Sized>(
        &self,
        target: &T,
        a: usize,
        b: usize,
        x: usize,
    ) -> Result<TruncatedSeries> {
        let u = self.rank;
        let mut acc = self.omega(a, b).mul(self.omega(x, u))?;
        for i in 0..self.rank {
            for j in 0..self.rank {
                let g = target.inverse_pairing(i, j);
                if g.is_zero() {
                    continue;
                }
                let term = self.phi(a, b, i).mul(self.omega(j, x))?.scale(&g);
                acc = acc.add(&term)?;
            }
        }
        Ok(acc)
    }
}

/// Left side minus right side of the PDE for `tag`.
pub fn pde_residual<T: TargetModel + ?Sized>(
    target: &T,
    derivs: &Derivatives,
    tag: RelationTag,
) -> Result<TruncatedSeries> {
    let u = derivs.rank;
    match tag {
        RelationTag::M12 { a, b } => {
            let left = derivs.psi(target, a, b, u)?;
            let right = derivs.omega(a, u).mul(derivs.omega(b, u))?;
            Ok(left.sub(&right)?)
        }
        RelationTag::M03 { a, b, c } => {
            let left = derivs.psi(target, a, b, c)?;
            let right = derivs.psi(target, a, c, b)?;
            Ok(left.sub(&right)?)
        }
    }
}

/// Outcome of one PDE check.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeReport {
    pub tag: RelationTag,
    pub nonzero_terms: usize,
    /// Lowest offending exponent and its coefficient.
    pub first_offending: Option<(Vec<u32>, Rational)>,
}

impl PdeReport {
    pub fn passed(&self) -> bool {
        self.first_offending.is_none()
    }
}

/// Every `M12(a,b)` and `M03(a,b,c)` over all basis indices.
pub fn all_relation_tags(rank: usize) -> Vec<RelationTag> {
    let mut tags = Vec::new();
    for a in 0..rank {
        for b in 0..rank {
            tags.push(RelationTag::M12 { a, b });
        }
    }
    for a in 0..rank {
        for b in 0..rank {
            for c in 0..rank {
                tags.push(RelationTag::M03 { a, b, c });
            }
        }
    }
    tags
}

pub fn verify_all<T: TargetModel + ?Sized>(target: &T, pair: &PotentialPair) -> Result<Vec<PdeReport>> {
    let derivs = Derivatives::new(pair);
    all_relation_tags(pair.rank)
        .into_par_iter()
        .map(|tag| {
            let r = pde_residual(target, &derivs, tag)?;
            Ok(PdeReport {
                tag,
                nonzero_terms: r.len(),
                first_offending: r.first_nonzero().map(|(e, c)| (e.clone(), c.clone())),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::complex_gw::solve_complex;
    use crate::real_wdvv::{solve_real, RealKey, RelationContext, RelationParams, Seed};
    use crate::target::ProjectiveThreeSpace;

    const P3: ProjectiveThreeSpace = ProjectiveThreeSpace;

    fn pair(max: u32, t: u32) -> (ComplexStore, RealStore, PotentialPair) {
        let c = solve_complex(&P3, max).unwrap();
        let r = solve_real(&P3, &c, max, Seed::Plus).unwrap();
        let p = build_potentials(&P3, &c, &r, PotentialCaps::new(max, t)).unwrap();
        (c, r, p)
    }

    #[test]
    fn potential_coefficients() {
        let (_, _, p) = pair(2, 4);
        // q u² with λ = 0: 2 · ⟨⟩₁ / 2!
        assert_eq!(p.omega.coefficient(&[0, 0, 0, 0, 2, 1]), int(1));
        // t₁ u from ⟨1⟩_{0,1}
        assert_eq!(p.omega.coefficient(&[1, 0, 0, 0, 1, 0]), int(1));
        // classical cubic t₁ t₂ t₃
        assert_eq!(p.phi.coefficient(&[1, 1, 1, 0, 0, 0]), int(1));
        for (e, _) in p.phi.iter() {
            assert_eq!(e[5] % 2, 0);
        }
        for (e, _) in p.omega.iter() {
            let lambda = MultiIndex::from_counts(&e[..4]);
            let k = P3.real_point_count(DegreeClass(e[5] as i64), &lambda);
            assert_eq!(k, e[4] as i64);
        }
    }

    #[test]
    fn cap_beyond_solved_degree() {
        let c = solve_complex(&P3, 1).unwrap();
        let r = solve_real(&P3, &c, 1, Seed::Plus).unwrap();
        assert!(matches!(
            build_potentials(&P3, &c, &r, PotentialCaps::new(2, 4)),
            Err(Error::CapExceedsSolved { .. })
        ));
    }

    #[test]
    fn second_derivative_matches_coefficient_table() {
        let (_, r, p) = pair(2, 5);
        for a in 0..4 {
            for b in 0..4 {
                let dd = p.omega.partial(a).partial(b);
                for (e, c) in dd.iter() {
                    let lambda = MultiIndex::from_counts(&e[..4]);
                    let full = lambda.with(a, 1).with(b, 1);
                    let k = e[4];
                    let v = r.evaluate(&P3, e[5] as i64, &full, k as i64).unwrap();
                    assert_eq!(*c, v * omega_weight(k, &lambda) * pow2(-2), "{a} {b} {e:?}");
                }
            }
        }
    }

    #[test]
    fn pde_vanishes_on_solved_stores() {
        let (_, _, p) = pair(3, 5);
        for rep in verify_all(&P3, &p).unwrap() {
            assert!(rep.passed(), "{:?}", rep);
        }
    }

    #[test]
    fn equal_slots_cancel_symbolically() {
        let (c, mut r, _) = pair(2, 4);
        r.set(RealKey::p3(2, 1, 0), int(7));
        let p = build_potentials(&P3, &c, &r, PotentialCaps::new(2, 4)).unwrap();
        let d = Derivatives::new(&p);
        for a in 0..4 {
            for b in 0..4 {
                let res = pde_residual(&P3, &d, RelationTag::M03 { a, b, c: b }).unwrap();
                assert!(res.is_zero());
            }
        }
    }

    #[test]
    fn corruption_is_reported_and_extraction_matches_instances() {
        let (c, mut r, _) = pair(3, 6);
        r.set(RealKey::p3(2, 1, 0), int(2));
        let p = build_potentials(&P3, &c, &r, PotentialCaps::new(3, 6)).unwrap();
        let reports = verify_all(&P3, &p).unwrap();
        assert!(reports.iter().any(|x| !x.passed()));
        let d = Derivatives::new(&p);
        let ctx = RelationContext {
            target: &P3,
            complex: &c,
            real: &r,
        };
        let mut checked = 0;
        let mut nonzero = 0;
        for tag in [
            RelationTag::M12 { a: 2, b: 2 },
            RelationTag::M12 { a: 3, b: 1 },
            RelationTag::M03 { a: 2, b: 1, c: 3 },
            RelationTag::M03 { a: 3, b: 2, c: 0 },
        ] {
            let res = pde_residual(&P3, &d, tag).unwrap();
            for degree in 1..=3u32 {
                for k in 0..=8i64 {
                    for l1 in 0..2 {
                        for l2 in 0..3 {
                            let lambda = MultiIndex::from_counts(&[0, l1, l2, 0]);
                            let params = RelationParams { tag, degree, k, lambda: lambda.clone() };
                            let Some(inst) = ctx.instance(&params).unwrap() else { continue };
                            let e = relation_exponent(tag, degree, k, &lambda);
                            if !res.caps().admits(&e) {
                                continue;
                            }
                            let scaled = res.coefficient(&e) * instance_scale(tag, k, &lambda);
                            assert!(inst.form.is_constant());
                            assert_eq!(scaled, inst.form.constant, "{params}");
                            checked += 1;
                            if !scaled.is_zero() {
                                nonzero += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked >= 20, "{checked}");
        assert!(nonzero > 0);
    }
}
