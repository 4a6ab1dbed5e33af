//! Sparse exact Gauss–Jordan elimination over ℚ.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Debug;

use num_traits::{Signed, Zero};

use super::{AlgebraError, Rational};

/// An affine expression `constant + Σ c_k · x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm<K: Ord> {
    pub constant: Rational,
    pub coefficients: BTreeMap<K, Rational>,
}

impl<K: Ord + Clone> LinearForm<K> {
    pub fn zero() -> Self {
        LinearForm {
            constant: Rational::zero(),
            coefficients: BTreeMap::new(),
        }
    }

    pub fn constant(value: Rational) -> Self {
        LinearForm {
            constant: value,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn unknown(key: K, coefficient: Rational) -> Self {
        let mut f = Self::zero();
        f.add_term(key, coefficient);
        f
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coefficients.is_empty()
    }

    pub fn add_term(&mut self, key: K, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        let slot = self.coefficients.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += coefficient;
        if slot.is_zero() {
            self.coefficients.remove(&key);
        }
    }

    /// `self += weight · other`
    pub fn add_scaled(&mut self, weight: &Rational, other: &LinearForm<K>) {
        if weight.is_zero() {
            return;
        }
        self.constant += weight * &other.constant;
        for (k, c) in &other.coefficients {
            self.add_term(k.clone(), weight * c);
        }
    }

    /// `self += weight · x · y`; fails if both factors carry unknowns.
    pub fn add_product(
        &mut self,
        weight: &Rational,
        x: &LinearForm<K>,
        y: &LinearForm<K>,
    ) -> Result<(), AlgebraError> {
        if weight.is_zero() || x.is_zero() || y.is_zero() {
            return Ok(());
        }
        match (x.is_constant(), y.is_constant()) {
            (true, _) => self.add_scaled(&(weight * &x.constant), y),
            (false, true) => self.add_scaled(&(weight * &y.constant), x),
            (false, false) => return Err(AlgebraError::Nonlinear),
        }
        Ok(())
    }

    pub fn into_equation(self) -> LinearEquation<K> {
        LinearEquation {
            coefficients: self.coefficients,
            constant: self.constant,
        }
    }
}

/// `Σ c_k · x_k + constant = 0`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearEquation<K: Ord> {
    pub coefficients: BTreeMap<K, Rational>,
    pub constant: Rational,
}

impl<K: Ord + Clone> LinearEquation<K> {
    /// Residual after substitution, or `None` if some unknown has no value.
    pub fn residual(&self, values: &BTreeMap<K, Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (k, c) in &self.coefficients {
            acc += c * values.get(k)?;
        }
        Some(acc)
    }
}

#[derive(Debug, Clone)]
pub struct RationalLinearSystem<K: Ord> {
    unknowns: Vec<K>,
    equations: Vec<LinearEquation<K>>,
}

impl<K: Ord + Clone + Debug> RationalLinearSystem<K> {
    pub fn new(unknowns: impl IntoIterator<Item = K>) -> Self {
        let set: BTreeSet<K> = unknowns.into_iter().collect();
        RationalLinearSystem {
            unknowns: set.into_iter().collect(),
            equations: Vec::new(),
        }
    }

    pub fn unknowns(&self) -> &[K] {
        &self.unknowns
    }

    pub fn equations(&self) -> &[LinearEquation<K>] {
        &self.equations
    }

    pub fn push(&mut self, equation: LinearEquation<K>) -> Result<(), AlgebraError> {
        for k in equation.coefficients.keys() {
            if self.unknowns.binary_search(k).is_err() {
                return Err(AlgebraError::UnknownKey {
                    equation: self.equations.len(),
                    key: format!("{k:?}"),
                });
            }
        }
        self.equations.push(equation);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<K: Ord> {
    /// Unknowns whose value is forced by the equations.
    pub values: BTreeMap<K, Rational>,
    /// Unknowns without a pivot.
    pub free: Vec<K>,
    /// Every unknown not in `values` (free ones plus those tied to them).
    pub undetermined: Vec<K>,
    pub rank: usize,
}

impl<K: Ord> Solution<K> {
    pub fn is_unique(&self) -> bool {
        self.undetermined.is_empty()
    }
}

struct Row {
    coeffs: BTreeMap<usize, Rational>,
    constant: Rational,
    origin: usize,
}

/// Solves the system exactly. Pivots on the entry with the largest numerator
/// magnitude in each column. Redundant equations are allowed; an inconsistent
/// one is reported with its index and reduced residual.
pub fn solve_linear<K: Ord + Clone + Debug>(
    system: &RationalLinearSystem<K>,
) -> Result<Solution<K>, AlgebraError> {
    let n = system.unknowns.len();
    let mut rows: Vec<Row> = Vec::new();
    let mut seen: HashSet<(Vec<(usize, Rational)>, Rational)> = HashSet::new();

    for (origin, eq) in system.equations.iter().enumerate() {
        let coeffs: BTreeMap<usize, Rational> = eq
            .coefficients
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (system.unknowns.binary_search(k).expect("validated on push"), c.clone()))
            .collect();
        if coeffs.is_empty() {
            if !eq.constant.is_zero() {
                return Err(AlgebraError::Inconsistent {
                    equation: origin,
                    residual: eq.constant.clone(),
                });
            }
            continue;
        }
        // dedupe on the monic normal form
        let lead = coeffs.values().next().unwrap().clone();
        let normal: Vec<(usize, Rational)> = coeffs.iter().map(|(&j, c)| (j, c / &lead)).collect();
        if !seen.insert((normal, &eq.constant / &lead)) {
            continue;
        }
        rows.push(Row {
            coeffs,
            constant: eq.constant.clone(),
            origin,
        });
    }

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; rows.len()];
    for col in 0..n {
        let pick = rows
            .iter()
            .enumerate()
            .filter(|(i, r)| !used[*i] && r.coeffs.contains_key(&col))
            .max_by(|(_, a), (_, b)| {
                let na = a.coeffs[&col].numer().abs();
                let nb = b.coeffs[&col].numer().abs();
                na.cmp(&nb).then(b.origin.cmp(&a.origin))
            })
            .map(|(i, _)| i);
        let Some(p) = pick else { continue };
        used[p] = true;
        pivot_of_col[col] = Some(p);

        let lead = rows[p].coeffs[&col].clone();
        for c in rows[p].coeffs.values_mut() {
            *c /= &lead;
        }
        rows[p].constant /= &lead;
        let pivot_coeffs = rows[p].coeffs.clone();
        let pivot_const = rows[p].constant.clone();

        for (i, row) in rows.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let Some(factor) = row.coeffs.get(&col).cloned() else { continue };
            for (&j, c) in &pivot_coeffs {
                let slot = row.coeffs.entry(j).or_insert_with(Rational::zero);
                *slot -= &factor * c;
                if slot.is_zero() {
                    row.coeffs.remove(&j);
                }
            }
            row.constant -= &factor * &pivot_const;
            if row.coeffs.is_empty() && !row.constant.is_zero() {
                return Err(AlgebraError::Inconsistent {
                    equation: row.origin,
                    residual: row.constant.clone(),
                });
            }
        }
    }

    let mut values = BTreeMap::new();
    let mut free = Vec::new();
    let mut undetermined = Vec::new();
    let mut rank = 0;
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        match pivot {
            None => {
                free.push(system.unknowns[col].clone());
                undetermined.push(system.unknowns[col].clone());
            }
            Some(p) => {
                rank += 1;
                let row = &rows[*p];
                if row.coeffs.len() == 1 {
                    values.insert(system.unknowns[col].clone(), -row.constant.clone());
                } else {
                    undetermined.push(system.unknowns[col].clone());
                }
            }
        }
    }
    Ok(Solution {
        values,
        free,
        undetermined,
        rank,
    })
}
