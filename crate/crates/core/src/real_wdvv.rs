//! Disk invariants `⟨μ^λ⟩_{d,k}` of a real sixfold from the two real WDVV
//! relations, solved tier by tier from the single degree-1 seed.
//!
//! Each relation is a sum of products of two invariants. A product with both
//! factors in positive degree only involves strictly lower degrees, and the
//! degree-0 real factor is nonzero only for `⟨1⟩_{0,1} = 1`, so every relation
//! of total degree `d` is affine in the degree-`d` invariants. The product
//! routine rejects any term with two unknown factors, so this is checked on
//! every instance rather than assumed.
//!
//! A few invariants are not pinned by the relations of their own degree (for
//! ℙ³ the `k = 0` ones in degree 1 and `⟨⟩_d` for odd `d`). They are carried
//! as unknowns into the next tier, where they enter linearly, so solving
//! through degree `D` runs tier `D + 1` as well.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{
    binomial, big, int, multi_binomial, pow2, solve_linear, AlgebraError, LinearForm,
    MultiIndex, Rational, RationalLinearSystem,
};
use crate::complex_gw::ComplexStore;
use crate::target::{DegreeClass, ProjectiveThreeSpace, TargetModel};
use crate::{Error, Result};

/// Canonical key: degree, insertions on primary slots, and real-point count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RealKey {
    pub degree: u32,
    pub insertions: MultiIndex,
    pub k: i64,
}

impl RealKey {
    /// ℙ³ key `⟨ℓ̃^a pt^b⟩_d` with `k = 2d − a − 2b`.
    pub fn p3(degree: u32, a: u32, b: u32) -> Self {
        RealKey {
            degree,
            insertions: ProjectiveThreeSpace::insertions(a, b),
            k: 2 * degree as i64 - a as i64 - 2 * b as i64,
        }
    }
}

impl fmt::Display for RealKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>_{{{},k={}}}", self.insertions, self.degree, self.k)
    }
}

/// Sign fixed by the choice of OSpin structure: the value of `⟨⟩_{1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Seed {
    Plus,
    Minus,
}

impl Seed {
    pub fn value(self) -> Rational {
        match self {
            Seed::Plus => int(1),
            Seed::Minus => int(-1),
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Seed::Plus => 1,
            Seed::Minus => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Seed> {
        match sign {
            1 => Some(Seed::Plus),
            -1 => Some(Seed::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealReduction {
    Zero,
    /// Fully evaluated; only `⟨1⟩_{0,1} = 1`.
    Constant(Rational),
    /// `factor · ⟨key⟩`
    Key(RealKey, Rational),
}

fn reduce<T: TargetModel + ?Sized>(
    target: &T,
    degree: i64,
    insertions: &MultiIndex,
    k: i64,
    parity: bool,
) -> RealReduction {
    if degree < 0 || k < 0 {
        return RealReduction::Zero;
    }
    let b = DegreeClass(degree);
    if k != target.real_point_count(b, insertions) {
        return RealReduction::Zero;
    }
    if degree == 0 {
        let unit = MultiIndex::unit_vector(insertions.len(), target.unit_index());
        return if *insertions == unit && k == 1 {
            RealReduction::Constant(int(1))
        } else {
            RealReduction::Zero
        };
    }
    let mut factor = Rational::one();
    let mut canonical = MultiIndex::zeros(insertions.len());
    for (j, gen) in target.basis().iter().enumerate() {
        let n = insertions.get(j);
        if n == 0 {
            continue;
        }
        if target.real_vanishing_generator(j) {
            return RealReduction::Zero;
        }
        match gen.half_degree {
            0 => return RealReduction::Zero,
            1 => {
                let p = target.divisor_pairing(j, b);
                for _ in 0..n {
                    factor *= &p;
                }
            }
            _ => canonical.set(j, n),
        }
    }
    if factor.is_zero() || (parity && target.parity_vanishes(b, &canonical)) {
        return RealReduction::Zero;
    }
    RealReduction::Key(
        RealKey {
            degree: degree as u32,
            insertions: canonical,
            k,
        },
        factor,
    )
}

/// Reduces `⟨μ^λ⟩_{d,k}` to a canonical key and multiplier, applying the
/// divisor relation, both vanishing rules and parity vanishing.
pub fn normalize<T: TargetModel + ?Sized>(
    target: &T,
    degree: i64,
    insertions: &MultiIndex,
    k: i64,
) -> RealReduction {
    reduce(target, degree, insertions, k, true)
}

/// [`normalize`] for a raw insertion list, with `k` fixed by dimension.
pub fn normalize_list<T: TargetModel + ?Sized>(
    target: &T,
    degree: i64,
    insertions: &[usize],
) -> RealReduction {
    let m = MultiIndex::from_insertions(target.rank(), insertions);
    let k = target.real_point_count(DegreeClass(degree), &m);
    normalize(target, degree, &m, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealStore {
    target_id: String,
    rank: usize,
    seed: Seed,
    values: BTreeMap<RealKey, Rational>,
    solved_up_to: u32,
}

impl RealStore {
    pub fn new(target_id: &str, rank: usize, seed: Seed) -> Self {
        RealStore {
            target_id: target_id.to_string(),
            rank,
            seed,
            values: BTreeMap::new(),
            solved_up_to: 0,
        }
    }

    pub fn from_entries(
        target_id: &str,
        rank: usize,
        seed: Seed,
        solved_up_to: u32,
        entries: impl IntoIterator<Item = (RealKey, Rational)>,
    ) -> Self {
        RealStore {
            target_id: target_id.to_string(),
            rank,
            seed,
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

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn solved_up_to(&self) -> u32 {
        self.solved_up_to
    }

    pub fn entries(&self) -> impl Iterator<Item = (&RealKey, &Rational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, key: &RealKey) -> Result<Rational> {
        if key.degree > self.solved_up_to {
            return Err(Error::NotSolved {
                degree: key.degree,
                solved_up_to: self.solved_up_to,
            });
        }
        Ok(self.values.get(key).cloned().unwrap_or_else(Rational::zero))
    }

    /// Overwrites one entry; used to build deliberately broken stores.
    pub fn set(&mut self, key: RealKey, value: Rational) {
        self.values.insert(key, value);
    }

    /// `⟨μ^λ⟩_{d,k}` for arbitrary insertions.
    pub fn evaluate<T: TargetModel + ?Sized>(
        &self,
        target: &T,
        degree: i64,
        insertions: &MultiIndex,
        k: i64,
    ) -> Result<Rational> {
        match reduce(target, degree, insertions, k, false) {
            RealReduction::Zero => Ok(Rational::zero()),
            RealReduction::Constant(v) => Ok(v),
            RealReduction::Key(key, factor) => Ok(factor * self.get(&key)?),
        }
    }

    /// ℙ³ value `⟨ℓ̃^a pt^b⟩_d`; zero when `2d − a − 2b < 0`.
    pub fn invariant(&self, d: u32, a: u32, b: u32) -> Result<Rational> {
        let key = RealKey::p3(d, a, b);
        if key.k < 0 {
            if d > self.solved_up_to {
                return Err(Error::NotSolved {
                    degree: d,
                    solved_up_to: self.solved_up_to,
                });
            }
            return Ok(Rational::zero());
        }
        self.get(&key)
    }
}

/// Canonical keys of degree `d` (all `k ≥ 0`).
pub fn real_keys<T: TargetModel + ?Sized>(target: &T, degree: u32) -> Vec<RealKey> {
    let half = target.ell_omega(DegreeClass(degree as i64)) / 2;
    let mut out = Vec::new();
    for excess in 0..=half {
        for insertions in target.primary_patterns(excess as u32) {
            if (0..target.rank()).any(|j| insertions.get(j) > 0 && target.real_vanishing_generator(j)) {
                continue;
            }
            out.push(RealKey {
                degree,
                insertions,
                k: half - excess,
            });
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationTag {
    M12 { a: usize, b: usize },
    M03 { a: usize, b: usize, c: usize },
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationTag::M12 { a, b } => write!(f, "M12({a},{b})"),
            RelationTag::M03 { a, b, c } => write!(f, "M03({a},{b},{c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationParams {
    pub tag: RelationTag,
    pub degree: u32,
    pub k: i64,
    pub lambda: MultiIndex,
}

impl fmt::Display for RelationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} d={} k={} lambda={:?}",
            self.tag, self.degree, self.k, self.lambda
        )
    }
}

/// One instantiated relation: `form = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInstance {
    pub params: RelationParams,
    pub form: LinearForm<RealKey>,
}

/// Whether the dimension gate of the instance holds.
pub fn relation_gate<T: TargetModel + ?Sized>(target: &T, params: &RelationParams) -> bool {
    let hd = target.half_degrees();
    let half = target.ell_omega(DegreeClass(params.degree as i64)) / 2;
    let (slots, offset, kmin) = match params.tag {
        RelationTag::M12 { a, b } => (hd[a] + hd[b], 1, 1),
        RelationTag::M03 { a, b, c } => (hd[a] + hd[b] + hd[c], 2, 0),
    };
    params.k >= kmin
        && half - params.k + params.lambda.total() as i64 + offset
            == (slots + params.lambda.weighted(&hd)) as i64
}

/// Every gated relation of degree `d`, with `λ` on the primary slots.
///
/// `M03(a,b,c)` is antisymmetric in `b, c`, so only `b < c` is produced.
pub fn relation_instances<T: TargetModel + ?Sized>(target: &T, degree: u32) -> Vec<RelationParams> {
    let n = target.rank();
    let hd = target.half_degrees();
    let half = target.ell_omega(DegreeClass(degree as i64)) / 2;
    let mut out = Vec::new();
    let mut push = |tag: RelationTag, slots: u32, offset: i64, kmin: i64| {
        let top = half + offset - slots as i64;
        for k in kmin..=top {
            for lambda in target.primary_patterns((top - k) as u32) {
                out.push(RelationParams {
                    tag,
                    degree,
                    k,
                    lambda,
                });
            }
        }
    };
    for a in 0..n {
        for b in 0..n {
            push(RelationTag::M12 { a, b }, hd[a] + hd[b], 1, 1);
            for c in (b + 1)..n {
                push(RelationTag::M03 { a, b, c }, hd[a] + hd[b] + hd[c], 2, 0);
            }
        }
    }
    out
}

/// Source of invariant values while building relations. Keys absent from the
/// store become unknowns.
pub struct RelationContext<'a, T: TargetModel + ?Sized> {
    pub target: &'a T,
    pub complex: &'a ComplexStore,
    pub real: &'a RealStore,
}

impl<T: TargetModel + ?Sized> RelationContext<'_, T> {
    fn real(&self, degree: i64, insertions: &MultiIndex, k: i64) -> LinearForm<RealKey> {
        match reduce(self.target, degree, insertions, k, false) {
            RealReduction::Zero => LinearForm::zero(),
            RealReduction::Constant(v) => LinearForm::constant(v),
            RealReduction::Key(key, factor) => match self.real.values.get(&key) {
                Some(v) => LinearForm::constant(factor * v),
                None => LinearForm::unknown(key, factor),
            },
        }
    }

    fn k_of(&self, degree: i64, insertions: &MultiIndex) -> i64 {
        self.target.real_point_count(DegreeClass(degree), insertions)
    }

    /// `Σ_{d'} Σ_{α+β=λ} 2^{|α|} C(λ,α) Σ_{ij} ⟨a,b,α,i⟩_{d'} g^{ij} ⟨j,extra,β⟩_{d−𝔡(d'),k}`
    fn sphere_sum(
        &self,
        params: &RelationParams,
        a: usize,
        b: usize,
        extra: Option<usize>,
        out: &mut LinearForm<RealKey>,
        sign: &Rational,
    ) -> Result<()> {
        let n = self.target.rank();
        let d = params.degree as i64;
        let mut dp = 0i64;
        loop {
            let d0 = d - self.target.doubling(DegreeClass(dp)).0;
            if d0 < 0 {
                break;
            }
            for (alpha, beta) in params.lambda.splits() {
                let w = sign * pow2(alpha.total() as i64) * multi_binomial(&params.lambda, &alpha)?;
                let left = alpha.with(a, 1).with(b, 1);
                let mut right = match extra {
                    Some(c) => beta.with(c, 1),
                    None => beta.clone(),
                };
                for j in 0..n {
                    right = right.with(j, 1);
                    let r = self.real(d0, &right, params.k);
                    right.set(j, right.get(j) - 1);
                    if r.is_zero() {
                        continue;
                    }
                    for i in 0..n {
                        let g = self.target.inverse_pairing(i, j);
                        if g.is_zero() {
                            continue;
                        }
                        let c = self.complex.evaluate(self.target, dp, &left.with(i, 1))?;
                        if c.is_zero() {
                            continue;
                        }
                        out.add_scaled(&(&w * g * c), &r);
                    }
                }
            }
            dp += 1;
        }
        Ok(())
    }

    /// `Σ_{d1+d2=d} Σ_{k1+k2=ktot} C(ktot,k1) C(λ,α) ⟨left,α⟩_{d1,k1+s1} ⟨right,β⟩_{d2,k2+s2}`
    #[allow(clippy::too_many_arguments)]
    fn split_sum(
        &self,
        params: &RelationParams,
        left: &MultiIndex,
        right: &MultiIndex,
        ktot: i64,
        shifts: (i64, i64),
        out: &mut LinearForm<RealKey>,
        sign: &Rational,
    ) -> Result<()> {
        let d = params.degree as i64;
        for (alpha, beta) in params.lambda.splits() {
            let li = left.add(&alpha);
            let ri = right.add(&beta);
            let cl = multi_binomial(&params.lambda, &alpha)?;
            for d1 in 0..=d {
                let d2 = d - d1;
                // the left factor is nonzero only at its dimension count
                let k1 = self.k_of(d1, &li) - shifts.0;
                if k1 < 0 || k1 > ktot {
                    continue;
                }
                let k2 = ktot - k1;
                let x = self.real(d1, &li, k1 + shifts.0);
                if x.is_zero() {
                    continue;
                }
                let y = self.real(d2, &ri, k2 + shifts.1);
                if y.is_zero() {
                    continue;
                }
                let w = sign * big(binomial(ktot as u64, k1 as u64)) * &cl;
                out.add_product(&w, &x, &y)?;
            }
        }
        Ok(())
    }

    /// Builds the instance; `None` when the dimension gate fails.
    pub fn instance(&self, params: &RelationParams) -> Result<Option<LinearInstance>> {
        if !relation_gate(self.target, params) {
            return Ok(None);
        }
        let n = self.target.rank();
        let unit = |j: usize| MultiIndex::unit_vector(n, j);
        let mut form = LinearForm::zero();
        let plus = int(1);
        let minus = int(-1);
        match params.tag {
            RelationTag::M12 { a, b } => {
                let k = params.k;
                self.sphere_sum(params, a, b, None, &mut form, &plus)?;
                let ab = unit(a).with(b, 1);
                let zero = MultiIndex::zeros(n);
                self.split_sum(params, &ab, &zero, k - 1, (0, 2), &mut form, &plus)?;
                self.split_sum(params, &unit(a), &unit(b), k - 1, (1, 1), &mut form, &minus)?;
            }
            RelationTag::M03 { a, b, c } => {
                let k = params.k;
                for (p, q, sign) in [(b, c, &plus), (c, b, &minus)] {
                    self.sphere_sum(params, a, p, Some(q), &mut form, sign)?;
                    let ap = unit(a).with(p, 1);
                    self.split_sum(params, &ap, &unit(q), k, (0, 1), &mut form, sign)?;
                }
            }
        }
        Ok(Some(LinearInstance {
            params: params.clone(),
            form,
        }))
    }
}

pub fn m12_instance<T: TargetModel + ?Sized>(
    ctx: &RelationContext<'_, T>,
    a: usize,
    b: usize,
    degree: u32,
    k: i64,
    lambda: MultiIndex,
) -> Result<Option<LinearInstance>> {
    ctx.instance(&RelationParams {
        tag: RelationTag::M12 { a, b },
        degree,
        k,
        lambda,
    })
}

pub fn m03_instance<T: TargetModel + ?Sized>(
    ctx: &RelationContext<'_, T>,
    (a, b, c): (usize, usize, usize),
    degree: u32,
    k: i64,
    lambda: MultiIndex,
) -> Result<Option<LinearInstance>> {
    ctx.instance(&RelationParams {
        tag: RelationTag::M03 { a, b, c },
        degree,
        k,
        lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Add `x = 0` for every parity-vanishing key before solving.
    pub impose_parity: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            impose_parity: true,
        }
    }
}

/// Size of one solved tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierReport {
    pub degree: u32,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Keys left undetermined and carried into the next tier.
    pub carried: Vec<RealKey>,
}

pub fn solve_real<T: TargetModel + ?Sized>(
    target: &T,
    complex: &ComplexStore,
    max_degree: u32,
    seed: Seed,
) -> Result<RealStore> {
    solve_real_with(target, complex, max_degree, seed, SolveOptions::default()).map(|(s, _)| s)
}

/// Solves tiers `1..=max_degree + 1` and keeps degrees `≤ max_degree`.
pub fn solve_real_with<T: TargetModel + ?Sized>(
    target: &T,
    complex: &ComplexStore,
    max_degree: u32,
    seed: Seed,
    options: SolveOptions,
) -> Result<(RealStore, Vec<TierReport>)> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    if complex.target_id() != target.id() {
        return Err(Error::TargetMismatch {
            left: complex.target_id().to_string(),
            right: target.id().to_string(),
        });
    }
    let mut store = RealStore::new(target.id(), target.rank(), seed);
    let mut pending: Vec<RealKey> = Vec::new();
    let mut reports = Vec::new();
    for degree in 1..=max_degree + 1 {
        let tier = real_keys(target, degree);
        let unknowns: BTreeSet<RealKey> = pending.iter().chain(tier.iter()).cloned().collect();
        let mut system = RationalLinearSystem::new(unknowns.iter().cloned());
        if options.impose_parity {
            for key in &tier {
                if target.parity_vanishes(DegreeClass(degree as i64), &key.insertions) {
                    system.push(LinearForm::unknown(key.clone(), int(1)).into_equation())?;
                }
            }
        }
        if degree == 1 {
            let key = RealKey {
                degree: 1,
                insertions: MultiIndex::zeros(target.rank()),
                k: target.ell_omega(DegreeClass(1)) / 2,
            };
            let mut f = LinearForm::unknown(key, int(1));
            f.constant = -seed.value();
            system.push(f.into_equation())?;
        }
        let ctx = RelationContext {
            target,
            complex,
            real: &store,
        };
        let forms: Vec<LinearInstance> = relation_instances(target, degree)
            .par_iter()
            .map(|p| ctx.instance(p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for inst in forms {
            if !inst.form.is_zero() {
                system.push(inst.form.into_equation())?;
            }
        }
        let solution = solve_linear(&system).map_err(|e| match e {
            AlgebraError::Inconsistent { equation, residual } => Error::Inconsistent {
                degree,
                detail: format!("equation {equation} reduces to {residual} = 0"),
            },
            other => Error::Algebra(other),
        })?;
        reports.push(TierReport {
            degree,
            unknowns: system.unknowns().len(),
            equations: system.equations().len(),
            rank: solution.rank,
            carried: solution.undetermined.clone(),
        });
        for (key, value) in solution.values {
            store.values.insert(key, value);
        }
        pending = solution.undetermined;
        store.solved_up_to = degree;
    }
    if pending.iter().any(|k| k.degree <= max_degree) {
        let free: Vec<String> = pending
            .iter()
            .filter(|k| k.degree <= max_degree)
            .map(|k| k.to_string())
            .collect();
        return Err(Error::Underdetermined {
            degree: pending.iter().map(|k| k.degree).min().unwrap_or(0),
            free: free.join(", "),
        });
    }
    store.values.retain(|k, _| k.degree <= max_degree);
    store.solved_up_to = max_degree;
    Ok((store, reports))
}

/// Instances of degree `≤ max_degree` that do not vanish on the stores.
pub fn residual_sweep<T: TargetModel + ?Sized>(
    target: &T,
    complex: &ComplexStore,
    real: &RealStore,
    max_degree: u32,
) -> Result<Vec<(RelationParams, Rational)>> {
    let ctx = RelationContext {
        target,
        complex,
        real,
    };
    let params: Vec<RelationParams> = (1..=max_degree)
        .flat_map(|d| relation_instances(target, d))
        .collect();
    let found: Vec<Option<(RelationParams, Rational)>> = params
        .into_par_iter()
        .map(|p| {
            let Some(inst) = ctx.instance(&p)? else {
                return Ok(None);
            };
            if let Some(key) = inst.form.coefficients.keys().next() {
                return Err(Error::NotSolved {
                    degree: key.degree,
                    solved_up_to: real.solved_up_to,
                });
            }
            Ok((!inst.form.constant.is_zero()).then_some((p, inst.form.constant)))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Number of gated instances of degree `≤ max_degree`.
pub fn instance_count<T: TargetModel + ?Sized>(target: &T, max_degree: u32) -> usize {
    (1..=max_degree).map(|d| relation_instances(target, d).len()).sum()
}
