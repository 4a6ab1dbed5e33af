use std::fmt;

use super::{binomial, big, AlgebraError, Rational};

/// A vector of non-negative counts, one per basis element of the target.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        MultiIndex(counts.to_vec())
    }

    /// Builds the multi-index counting occurrences of each basis index in a
    /// raw insertion list.
    pub fn from_insertions(len: usize, insertions: &[usize]) -> Self {
        let mut m = Self::zeros(len);
        for &i in insertions {
            m.0[i] += 1;
        }
        m
    }

    /// Single basis element `j`.
    pub fn unit_vector(len: usize, j: usize) -> Self {
        let mut m = Self::zeros(len);
        m.0[j] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// |λ|
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// ‖λ‖ for the given per-slot weights.
    pub fn weighted(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(c, w)| c * w).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn with(&self, j: usize, extra: u32) -> Self {
        let mut m = self.clone();
        m.0[j] += extra;
        m
    }

    pub fn set(&mut self, j: usize, value: u32) {
        self.0[j] = value;
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn dominated_by(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self − other`, defined only when the result is non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.dominated_by(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// λ! = ∏ λ_j!
    pub fn factorial(&self) -> num_bigint::BigInt {
        self.0
            .iter()
            .map(|&c| super::factorial(c as u64))
            .product()
    }

    /// All decompositions `α + β = self`, in odometer order of `α`.
    pub fn splits(&self) -> Splits<'_> {
        Splits {
            whole: self,
            alpha: Some(vec![0; self.len()]),
        }
    }

    /// Expands into a sorted raw insertion list.
    pub fn to_insertions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
            .collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub struct Splits<'a> {
    whole: &'a MultiIndex,
    alpha: Option<Vec<u32>>,
}

impl Iterator for Splits<'_> {
    type Item = (MultiIndex, MultiIndex);

    fn next(&mut self) -> Option<Self::Item> {
        let alpha = self.alpha.as_mut()?;
        let beta: Vec<u32> = self.whole.0.iter().zip(alpha.iter()).map(|(l, a)| l - a).collect();
        let item = (MultiIndex(alpha.clone()), MultiIndex(beta));
        // advance odometer
        let mut j = 0;
        loop {
            if j == alpha.len() {
                self.alpha = None;
                break;
            }
            if alpha[j] < self.whole.0[j] {
                alpha[j] += 1;
                break;
            }
            alpha[j] = 0;
            j += 1;
        }
        Some(item)
    }
}

/// C(λ, α) = ∏_j C(λ_j, α_j); rejects α ≰ λ.
pub fn multi_binomial(lambda: &MultiIndex, alpha: &MultiIndex) -> Result<Rational, AlgebraError> {
    if lambda.len() != alpha.len() {
        return Err(AlgebraError::LengthMismatch {
            left: lambda.len(),
            right: alpha.len(),
        });
    }
    if !alpha.dominated_by(lambda) {
        return Err(AlgebraError::NotDominated {
            lambda: lambda.0.clone(),
            alpha: alpha.0.clone(),
        });
    }
    Ok(big(lambda
        .0
        .iter()
        .zip(&alpha.0)
        .map(|(&l, &a)| binomial(l as u64, a as u64))
        .product::<num_bigint::BigInt>()))
}
