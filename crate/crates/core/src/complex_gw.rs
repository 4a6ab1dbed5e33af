//! Genus-0 complex Gromov–Witten invariants from WDVV associativity.
//!
//! Invariants are solved degree by degree. Every four-point associativity
//! instance of degree `d` is linear in the degree-`d` invariants because the
//! only way a degree-`d` invariant enters is through a degree-0 three-point
//! factor, which is a triple intersection number.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{
    int, multi_binomial, solve_linear, AlgebraError, LinearForm, MultiIndex, Rational,
    RationalLinearSystem,
};
use crate::target::{DegreeClass, ProjectiveThreeSpace, TargetModel};
use crate::{Error, Result};

/// Canonical key: degree and counts of insertions on the primary slots only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComplexKey {
    pub degree: u32,
    pub insertions: MultiIndex,
}

impl ComplexKey {
    /// ℙ³ key with `a` line and `b` point insertions.
    pub fn p3(degree: u32, a: u32, b: u32) -> Self {
        ComplexKey {
            degree,
            insertions: ProjectiveThreeSpace::insertions(a, b),
        }
    }
}

/// Result of stripping unit and divisor insertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexReduction {
    Zero,
    /// Fully evaluated (degree 0).
    Classical(Rational),
    /// `factor · ⟨key⟩`
    Key(ComplexKey, Rational),
}

/// Applies the fundamental-class, divisor and dimension rules.
pub fn reduce_complex<T: TargetModel + ?Sized>(
    target: &T,
    degree: i64,
    insertions: &MultiIndex,
) -> ComplexReduction {
    if degree < 0 {
        return ComplexReduction::Zero;
    }
    if degree == 0 {
        if insertions.total() != 3 {
            return ComplexReduction::Zero;
        }
        let idx = insertions.to_insertions();
        let v = target.triple_intersection(idx[0], idx[1], idx[2]);
        return if v.is_zero() {
            ComplexReduction::Zero
        } else {
            ComplexReduction::Classical(v)
        };
    }
    let b = DegreeClass(degree);
    let mut factor = Rational::one();
    let mut canonical = MultiIndex::zeros(insertions.len());
    let mut excess: i64 = 0;
    for (j, gen) in target.basis().iter().enumerate() {
        let n = insertions.get(j);
        if n == 0 {
            continue;
        }
        match gen.half_degree {
            0 => return ComplexReduction::Zero,
            1 => {
                let p = target.divisor_pairing(j, b);
                for _ in 0..n {
                    factor *= &p;
                }
            }
            h => {
                canonical.set(j, n);
                excess += (h as i64 - 1) * n as i64;
            }
        }
    }
    if factor.is_zero() || excess != target.ell_omega(b) + target.complex_dimension() as i64 - 3 {
        return ComplexReduction::Zero;
    }
    ComplexReduction::Key(
        ComplexKey {
            degree: degree as u32,
            insertions: canonical,
        },
        factor,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStore {
    target_id: String,
    rank: usize,
    values: BTreeMap<ComplexKey, Rational>,
    solved_up_to: u32,
}

impl ComplexStore {
    pub fn new(target_id: &str, rank: usize) -> Self {
        ComplexStore {
            target_id: target_id.to_string(),
            rank,
            values: BTreeMap::new(),
            solved_up_to: 0,
        }
    }

    /// Rebuilds a store from previously computed entries.
    pub fn from_entries(
        target_id: &str,
        rank: usize,
        solved_up_to: u32,
        entries: impl IntoIterator<Item = (ComplexKey, Rational)>,
    ) -> Self {
        ComplexStore {
            target_id: target_id.to_string(),
            rank,
            values: entries.into_iter().collect(),
            solved_up_to,
        }
    }

    pub fn target_id(&self) -> &str {
        &self.target_id
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn solved_up_to(&self) -> u32 {
        self.solved_up_to
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ComplexKey, &Rational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stored value of a canonical key.
    pub fn get(&self, key: &ComplexKey) -> Result<Rational> {
        if key.degree > self.solved_up_to {
            return Err(Error::NotSolved {
                degree: key.degree,
                solved_up_to: self.solved_up_to,
            });
        }
        Ok(self.values.get(key).cloned().unwrap_or_else(Rational::zero))
    }

    /// Overwrites one entry; used to build deliberately broken stores.
    pub fn set(&mut self, key: ComplexKey, value: Rational) {
        self.values.insert(key, value);
    }

    /// `⟨μ^λ⟩_d` for an arbitrary insertion multi-index.
    pub fn evaluate<T: TargetModel + ?Sized>(
        &self,
        target: &T,
        degree: i64,
        insertions: &MultiIndex,
    ) -> Result<Rational> {
        match reduce_complex(target, degree, insertions) {
            ComplexReduction::Zero => Ok(Rational::zero()),
            ComplexReduction::Classical(v) => Ok(v),
            ComplexReduction::Key(key, factor) => Ok(factor * self.get(&key)?),
        }
    }

    /// ℙ³ count of degree-`d` rational curves through `a` lines and `b` points.
    pub fn invariant(&self, d: u32, a: u32, b: u32) -> Result<Rational> {
        if d > self.solved_up_to {
            return Err(Error::NotSolved {
                degree: d,
                solved_up_to: self.solved_up_to,
            });
        }
        if a + 2 * b != 4 * d {
            return Ok(Rational::zero());
        }
        self.get(&ComplexKey::p3(d, a, b))
    }
}

/// `(a, b, c, e, λ)` of the identity
/// `Σ ⟨a,b,α,i⟩ g^{ij} ⟨j,c,e,β⟩ = Σ ⟨a,c,α,i⟩ g^{ij} ⟨j,b,e,β⟩`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssociativityInstance {
    pub degree: u32,
    pub slots: [usize; 4],
    pub lambda: MultiIndex,
}

/// Whether the dimension gate of a degree-`d` four-point instance holds.
pub fn associativity_gate<T: TargetModel + ?Sized>(
    target: &T,
    degree: u32,
    slots: [usize; 4],
    lambda: &MultiIndex,
) -> bool {
    let hd = target.half_degrees();
    let lhs: u32 = slots.iter().map(|&s| hd[s]).sum::<u32>() + lambda.weighted(&hd);
    let l = 4 + lambda.total() as i64;
    lhs as i64
        == target.ell_omega(DegreeClass(degree as i64)) + target.complex_dimension() as i64 + l - 4
}

/// Every gated instance of degree `d`, with `λ` on the primary slots.
pub fn associativity_instances<T: TargetModel + ?Sized>(
    target: &T,
    degree: u32,
) -> Vec<AssociativityInstance> {
    let n = target.rank();
    let hd = target.half_degrees();
    let top = target.ell_omega(DegreeClass(degree as i64)) + target.complex_dimension() as i64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in (b + 1)..n {
                for e in 0..n {
                    let slots = [a, b, c, e];
                    let base: i64 = slots.iter().map(|&s| hd[s] as i64).sum();
                    // Σ|slots| + ‖λ‖ − |λ| = top
                    let excess = top - base;
                    if excess < 0 {
                        continue;
                    }
                    for lambda in target.primary_patterns(excess as u32) {
                        debug_assert!(associativity_gate(target, degree, slots, &lambda));
                        out.push(AssociativityInstance {
                            degree,
                            slots,
                            lambda,
                        });
                    }
                }
            }
        }
    }
    out
}

fn complex_factor<T: TargetModel + ?Sized>(
    target: &T,
    store: &ComplexStore,
    degree: i64,
    insertions: &MultiIndex,
) -> LinearForm<ComplexKey> {
    match reduce_complex(target, degree, insertions) {
        ComplexReduction::Zero => LinearForm::zero(),
        ComplexReduction::Classical(v) => LinearForm::constant(v),
        ComplexReduction::Key(key, factor) => match store.values.get(&key) {
            Some(v) => LinearForm::constant(factor * v),
            None => LinearForm::unknown(key, factor),
        },
    }
}

fn half_sum<T: TargetModel + ?Sized>(
    target: &T,
    store: &ComplexStore,
    inst: &AssociativityInstance,
    [p, q, r, s]: [usize; 4],
    out: &mut LinearForm<ComplexKey>,
    sign: &Rational,
) -> std::result::Result<(), AlgebraError> {
    let n = target.rank();
    let d = inst.degree as i64;
    for (alpha, beta) in inst.lambda.splits() {
        let w = sign * multi_binomial(&inst.lambda, &alpha)?;
        let left_base = alpha.with(p, 1).with(q, 1);
        let right_base = beta.with(r, 1).with(s, 1);
        for d1 in 0..=d {
            for i in 0..n {
                let left = complex_factor(target, store, d1, &left_base.with(i, 1));
                if left.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let g = target.inverse_pairing(i, j);
                    if g.is_zero() {
                        continue;
                    }
                    let right = complex_factor(target, store, d - d1, &right_base.with(j, 1));
                    out.add_product(&(&w * g), &left, &right)?;
                }
            }
        }
    }
    Ok(())
}

/// Left side minus right side of an instance, with absent keys as unknowns.
pub fn associativity_form<T: TargetModel + ?Sized>(
    target: &T,
    store: &ComplexStore,
    inst: &AssociativityInstance,
) -> std::result::Result<LinearForm<ComplexKey>, AlgebraError> {
    let [a, b, c, e] = inst.slots;
    let mut out = LinearForm::zero();
    half_sum(target, store, inst, [a, b, c, e], &mut out, &int(1))?;
    half_sum(target, store, inst, [a, c, b, e], &mut out, &int(-1))?;
    Ok(out)
}

/// Canonical keys of degree `d`.
pub fn complex_keys<T: TargetModel + ?Sized>(target: &T, degree: u32) -> Vec<ComplexKey> {
    let excess = target.ell_omega(DegreeClass(degree as i64)) + target.complex_dimension() as i64 - 3;
    target
        .primary_patterns(excess as u32)
        .into_iter()
        .map(|insertions| ComplexKey { degree, insertions })
        .collect()
}

pub fn solve_complex<T: TargetModel + ?Sized>(target: &T, max_degree: u32) -> Result<ComplexStore> {
    let seeds = target
        .complex_seeds()
        .into_iter()
        .map(|(d, ins, v)| (ComplexKey { degree: d, insertions: ins }, v))
        .collect();
    solve_complex_with_seeds(target, max_degree, seeds)
}

/// Solves tier by tier from the given seeds. A key left undetermined by its
/// own tier is carried into the next one; solving fails only if a key of
/// degree `≤ max_degree` is still free after tier `max_degree + 1`.
pub fn solve_complex_with_seeds<T: TargetModel + ?Sized>(
    target: &T,
    max_degree: u32,
    seeds: BTreeMap<ComplexKey, Rational>,
) -> Result<ComplexStore> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    let mut store = ComplexStore::new(target.id(), target.rank());
    let mut pending: Vec<ComplexKey> = Vec::new();
    for degree in 1..=max_degree + 1 {
        let tier: Vec<ComplexKey> = complex_keys(target, degree);
        let mut unknowns: BTreeSet<ComplexKey> = pending.iter().cloned().collect();
        unknowns.extend(tier.iter().cloned());
        let mut system = RationalLinearSystem::new(unknowns.iter().cloned());
        for (key, value) in seeds.iter().filter(|(k, _)| k.degree == degree) {
            let mut f = LinearForm::unknown(key.clone(), int(1));
            f.constant = -value;
            system.push(f.into_equation())?;
        }
        let forms: Vec<_> = associativity_instances(target, degree)
            .par_iter()
            .map(|inst| associativity_form(target, &store, inst))
            .collect::<std::result::Result<_, _>>()?;
        for f in forms {
            if !f.is_zero() {
                system.push(f.into_equation())?;
            }
        }
        let solution = solve_linear(&system).map_err(|e| Error::Inconsistent {
            degree,
            detail: e.to_string(),
        })?;
        for (key, value) in solution.values {
            store.values.insert(key, value);
        }
        pending = solution.undetermined;
        store.solved_up_to = degree;
        if degree >= max_degree && pending.iter().all(|k| k.degree > max_degree) {
            break;
        }
    }
    if let Some(k) = pending.iter().find(|k| k.degree <= max_degree) {
        return Err(Error::Underdetermined {
            degree: k.degree,
            free: format!("{pending:?}"),
        });
    }
    store.values.retain(|k, _| k.degree <= max_degree);
    store.solved_up_to = max_degree;
    Ok(store)
}

/// Instances of degree `≤ store.solved_up_to()` that fail to vanish.
pub fn residual_sweep<T: TargetModel + ?Sized>(
    target: &T,
    store: &ComplexStore,
) -> Result<Vec<(AssociativityInstance, Rational)>> {
    let instances: Vec<_> = (1..=store.solved_up_to)
        .flat_map(|d| associativity_instances(target, d))
        .collect();
    let results: Vec<_> = instances
        .into_par_iter()
        .map(|inst| -> Result<Option<(AssociativityInstance, Rational)>> {
            let f = associativity_form(target, store, &inst)?;
            if !f.is_constant() {
                return Err(Error::NotSolved {
                    degree: inst.degree,
                    solved_up_to: store.solved_up_to,
                });
            }
            Ok((!f.constant.is_zero()).then_some((inst, f.constant)))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}
