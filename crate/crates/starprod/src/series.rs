//! Formal series in ν with arbitrary coefficient values.

use crate::error::{Error, Result};
use crate::ring::CoeffRing;
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Sparse formal series Σ νᵏ·c_k. Orders may be negative (the trace lives in
/// ν^{-m}·R[[ν]]); absent orders are zero.
#[derive(Clone, PartialEq, Debug)]
pub struct NuSeries<T> {
    terms: BTreeMap<i32, T>,
}

impl<T: Clone> NuSeries<T> {
    pub fn new() -> Self {
        NuSeries {
            terms: BTreeMap::new(),
        }
    }

    pub fn single(order: i32, value: T) -> Self {
        let mut s = Self::new();
        s.terms.insert(order, value);
        s
    }

    pub fn set(&mut self, order: i32, value: T) {
        self.terms.insert(order, value);
    }

    pub fn get(&self, order: i32) -> Option<&T> {
        self.terms.get(&order)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &T)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn orders(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> NuSeries<U> {
        NuSeries {
            terms: self.terms.iter().map(|(k, v)| (*k, f(v))).collect(),
        }
    }

    /// Multiply by ν^k.
    pub fn shift(&self, k: i32) -> Self {
        NuSeries {
            terms: self.terms.iter().map(|(o, v)| (o + k, v.clone())).collect(),
        }
    }
}

impl<T: Clone> Default for NuSeries<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Ring-element series helpers; the ring handle supplies the arithmetic.
impl<T: Clone> NuSeries<T> {
    pub fn coeff<R>(&self, ring: &R, order: i32) -> T
    where
        R: CoeffRing<Elem = T>,
    {
        self.terms
            .get(&order)
            .cloned()
            .unwrap_or_else(|| ring.zero())
    }

    pub fn add_ring<R>(&self, ring: &R, other: &Self) -> Self
    where
        R: CoeffRing<Elem = T>,
    {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let merged = match out.terms.get(k) {
                Some(cur) => ring.add(cur, v),
                None => v.clone(),
            };
            if ring.is_zero(&merged) {
                out.terms.remove(k);
            } else {
                out.terms.insert(*k, merged);
            }
        }
        out
    }

    pub fn sub_ring<R>(&self, ring: &R, other: &Self) -> Self
    where
        R: CoeffRing<Elem = T>,
    {
        self.add_ring(ring, &other.map(|v| ring.neg(v)))
    }

    pub fn normalize_ring<R>(&self, ring: &R) -> Self
    where
        R: CoeffRing<Elem = T>,
    {
        NuSeries {
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| !ring.is_zero(v))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

impl NuSeries<Scalar> {
    pub fn scalar_coeff(&self, order: i32) -> Scalar {
        self.terms
            .get(&order)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn add_scalar(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let merged = match out.terms.get(k) {
                Some(cur) => cur.add(v),
                None => v.clone(),
            };
            if merged.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(*k, merged);
            }
        }
        out
    }

    pub fn sub_scalar(&self, other: &Self) -> Self {
        self.add_scalar(&other.map(|v| v.neg()))
    }

    pub fn mul_scalar_series(&self, other: &Self) -> Self {
        let mut out = NuSeries::new();
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let cur = out.scalar_coeff(ka + kb).add(&a.mul(b));
                if cur.is_zero() {
                    out.terms.remove(&(ka + kb));
                } else {
                    out.terms.insert(ka + kb, cur);
                }
            }
        }
        out
    }

    /// Formal inverse through `max_order` relative orders; the lowest-order
    /// coefficient must be an invertible scalar monomial.
    pub fn invert(&self, max_rel_order: u32) -> Result<NuSeries<Scalar>> {
        let (&lead_ord, lead) = self
            .terms
            .iter()
            .next()
            .ok_or(Error::SeriesNotInvertible)?;
        let lead_inv = lead.inv().map_err(|_| Error::SeriesNotInvertible)?;
        // write self = lead·ν^d (1 + u), invert the unit factor order by order
        let mut inv = NuSeries::single(0, Scalar::one());
        let mut u = NuSeries::new();
        for (k, v) in &self.terms {
            if *k != lead_ord {
                u.terms.insert(k - lead_ord, v.mul(&lead_inv));
            }
        }
        let mut power = NuSeries::single(0, Scalar::one());
        for _ in 1..=max_rel_order {
            power = power.mul_scalar_series(&u).map(|s| s.neg());
            power
                .terms
                .retain(|k, _| *k <= max_rel_order as i32);
            inv = inv.add_scalar(&power);
        }
        inv.terms.retain(|k, _| *k <= max_rel_order as i32);
        Ok(inv.map(|s| s.mul(&lead_inv)).shift(-lead_ord))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn series_inverse() {
        // (4π(1 - ν))⁻¹ = (1/4π)(1 + ν + ν² + ...)
        let mut s = NuSeries::single(0, Scalar::rat_tau(rat(2, 1), 1));
        s.set(1, Scalar::rat_tau(rat(-2, 1), 1));
        let inv = s.invert(3).unwrap();
        let prod = s.mul_scalar_series(&inv);
        assert_eq!(prod.scalar_coeff(0), Scalar::one());
        for k in 1..=3 {
            assert!(prod.scalar_coeff(k).is_zero(), "order {k}");
        }
    }
}
