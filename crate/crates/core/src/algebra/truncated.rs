//! Multivariate power series over ℚ, truncated by per-variable caps and an
//! optional total-degree cap over a group of variables.
//!
//! A series only claims knowledge of coefficients whose exponents lie inside
//! its caps. Differentiating by a variable lowers the caps that variable
//! participates in, so products and derivatives never report a coefficient
//! they could not compute exactly.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{AlgebraError, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalCap {
    pub variables: Vec<usize>,
    pub cap: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCaps {
    /// Highest exponent known exactly per variable; `None` is unbounded.
    pub per_variable: Vec<Option<i64>>,
    pub total: Option<TotalCap>,
}

impl SeriesCaps {
    pub fn unbounded(n: usize) -> Self {
        SeriesCaps {
            per_variable: vec![None; n],
            total: None,
        }
    }

    pub fn admits(&self, exps: &[u32]) -> bool {
        for (e, cap) in exps.iter().zip(&self.per_variable) {
            if let Some(c) = cap {
                if (*e as i64) > *c {
                    return false;
                }
            }
        }
        if let Some(t) = &self.total {
            let sum: i64 = t.variables.iter().map(|&v| exps[v] as i64).sum();
            if sum > t.cap {
                return false;
            }
        }
        true
    }

    fn meet(&self, other: &SeriesCaps) -> Result<SeriesCaps, AlgebraError> {
        let per_variable = self
            .per_variable
            .iter()
            .zip(&other.per_variable)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(*x.min(y)),
                (Some(x), None) | (None, Some(x)) => Some(*x),
                (None, None) => None,
            })
            .collect();
        let total = match (&self.total, &other.total) {
            (Some(a), Some(b)) => {
                if a.variables != b.variables {
                    return Err(AlgebraError::IncompatibleCaps);
                }
                Some(TotalCap {
                    variables: a.variables.clone(),
                    cap: a.cap.min(b.cap),
                })
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Ok(SeriesCaps {
            per_variable,
            total,
        })
    }

    fn lowered(&self, var: usize) -> SeriesCaps {
        let mut caps = self.clone();
        if let Some(c) = caps.per_variable[var].as_mut() {
            *c -= 1;
        }
        if let Some(t) = caps.total.as_mut() {
            if t.variables.contains(&var) {
                t.cap -= 1;
            }
        }
        caps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    variables: Vec<String>,
    caps: SeriesCaps,
    coefficients: BTreeMap<Vec<u32>, Rational>,
}

impl TruncatedSeries {
    pub fn new(variables: Vec<String>, caps: SeriesCaps) -> Self {
        assert_eq!(variables.len(), caps.per_variable.len());
        TruncatedSeries {
            variables,
            caps,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn zero_like(&self) -> Self {
        Self::new(self.variables.clone(), self.caps.clone())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn caps(&self) -> &SeriesCaps {
        &self.caps
    }

    pub fn var(&self, name: &str) -> Result<usize, AlgebraError> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// True when every coefficient inside the caps is zero.
    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.coefficients.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.coefficients.iter()
    }

    /// Adds `value` to the coefficient at `exps`; silently dropped outside the caps.
    pub fn add_term(&mut self, exps: Vec<u32>, value: Rational) {
        if value.is_zero() || !self.caps.admits(&exps) {
            return;
        }
        match self.coefficients.get_mut(&exps) {
            Some(c) => {
                *c += value;
                if c.is_zero() {
                    self.coefficients.remove(&exps);
                }
            }
            None => {
                self.coefficients.insert(exps, value);
            }
        }
    }

    fn check_vars(&self, other: &TruncatedSeries) -> Result<(), AlgebraError> {
        if self.variables != other.variables {
            return Err(AlgebraError::VariableMismatch {
                left: self.variables.clone(),
                right: other.variables.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_vars(other)?;
        let mut out = TruncatedSeries::new(self.variables.clone(), self.caps.meet(&other.caps)?);
        for (e, c) in self.iter().chain(other.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, factor: &Rational) -> TruncatedSeries {
        let mut out = self.zero_like();
        if factor.is_zero() {
            return out;
        }
        for (e, c) in self.iter() {
            out.coefficients.insert(e.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_vars(other)?;
        let mut out = TruncatedSeries::new(self.variables.clone(), self.caps.meet(&other.caps)?);
        let mut exps = vec![0u32; self.variables.len()];
        for (ea, ca) in self.iter() {
            if !out.caps.admits(ea) {
                continue;
            }
            for (eb, cb) in other.iter() {
                for (i, slot) in exps.iter_mut().enumerate() {
                    *slot = ea[i] + eb[i];
                }
                if out.caps.admits(&exps) {
                    out.add_term(exps.clone(), ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn partial(&self, var: usize) -> TruncatedSeries {
        let mut out = TruncatedSeries::new(self.variables.clone(), self.caps.lowered(var));
        for (e, c) in self.iter() {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c * Rational::from_integer(e[var].into()));
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<TruncatedSeries, AlgebraError> {
        Ok(self.partial(self.var(name)?))
    }

    /// Nonzero coefficient of least total degree (ties broken lexicographically).
    pub fn first_nonzero(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.coefficients
            .iter()
            .min_by(|(a, _), (b, _)| {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then(a.cmp(b))
            })
    }
}
