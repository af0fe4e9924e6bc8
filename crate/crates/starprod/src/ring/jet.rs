//! Truncated polynomial jets on a flat chart.
//!
//! A [`JetPoly`] is a sparse polynomial in the chart coordinates with exact
//! [`Scalar`] coefficients, truncated at total degree `jet_order`. Products
//! re-truncate, so the ring is a finite-order model of smooth functions around
//! the base point.

use super::CoeffRing;
use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};
use num::traits::Zero;
use std::collections::BTreeMap;

/// Exponent multi-index, one entry per coordinate.
pub type MultiIndex = Vec<u16>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetPoly {
    /// multi-index → nonzero coefficient.
    terms: BTreeMap<MultiIndex, Scalar>,
}

/// The ring of jets: dimension, base point, truncation order.
#[derive(Clone, PartialEq, Debug)]
pub struct JetRing {
    pub n: usize,
    pub base_point: Vec<Rat>,
    pub jet_order: u32,
}

impl JetRing {
    pub fn new(n: usize, jet_order: u32) -> Self {
        JetRing {
            n,
            base_point: vec![Rat::zero(); n],
            jet_order,
        }
    }

    /// The coordinate function `x^i` (as an offset from the base point).
    pub fn var(&self, i: usize) -> JetPoly {
        let mut ix = vec![0u16; self.n];
        ix[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(ix, Scalar::one());
        JetPoly { terms }
    }

    /// Monomial `c · x^α`, truncated.
    pub fn monomial(&self, alpha: MultiIndex, c: Scalar) -> JetPoly {
        assert_eq!(alpha.len(), self.n);
        let mut terms = BTreeMap::new();
        if !c.is_zero() && total_degree(&alpha) <= self.jet_order {
            terms.insert(alpha, c);
        }
        JetPoly { terms }
    }

    /// Evaluate at an offset from the base point.
    pub fn eval(&self, a: &JetPoly, offset: &[Rat]) -> Scalar {
        let mut acc = Scalar::zero();
        for (ix, c) in &a.terms {
            let mut m = Rat::from_integer(1.into());
            for (i, &e) in ix.iter().enumerate() {
                for _ in 0..e {
                    m *= &offset[i];
                }
            }
            acc = acc.add(&c.mul_rat(&m));
        }
        acc
    }

    pub fn max_total_degree(&self, a: &JetPoly) -> u32 {
        a.terms.keys().map(|ix| total_degree(ix)).max().unwrap_or(0)
    }
}

fn total_degree(ix: &MultiIndex) -> u32 {
    ix.iter().map(|&e| e as u32).sum()
}

impl CoeffRing for JetRing {
    type Elem = JetPoly;

    fn dim(&self) -> usize {
        self.n
    }

    fn zero(&self) -> JetPoly {
        JetPoly {
            terms: BTreeMap::new(),
        }
    }

    fn one(&self) -> JetPoly {
        self.scalar(&Scalar::one())
    }

    fn scalar(&self, s: &Scalar) -> JetPoly {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(vec![0u16; self.n], s.clone());
        }
        JetPoly { terms }
    }

    fn add(&self, a: &JetPoly, b: &JetPoly) -> JetPoly {
        let mut terms = a.terms.clone();
        for (ix, c) in &b.terms {
            let e = terms.entry(ix.clone()).or_insert_with(Scalar::zero);
            *e = e.add(c);
            if e.is_zero() {
                terms.remove(ix);
            }
        }
        JetPoly { terms }
    }

    fn neg(&self, a: &JetPoly) -> JetPoly {
        JetPoly {
            terms: a.terms.iter().map(|(ix, c)| (ix.clone(), c.neg())).collect(),
        }
    }

    fn mul(&self, a: &JetPoly, b: &JetPoly) -> JetPoly {
        let mut terms: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (ia, ca) in &a.terms {
            for (ib, cb) in &b.terms {
                let ix: MultiIndex = ia.iter().zip(ib).map(|(x, y)| x + y).collect();
                if total_degree(&ix) > self.jet_order {
                    continue; // products re-truncate to the jet order
                }
                let e = terms.entry(ix).or_insert_with(Scalar::zero);
                *e = e.add(&ca.mul(cb));
            }
        }
        terms.retain(|_, c| !c.is_zero());
        JetPoly { terms }
    }

    fn scale(&self, s: &Scalar, a: &JetPoly) -> JetPoly {
        if s.is_zero() {
            return self.zero();
        }
        JetPoly {
            terms: a
                .terms
                .iter()
                .map(|(ix, c)| (ix.clone(), c.mul(s)))
                .collect(),
        }
    }

    fn derivative(&self, a: &JetPoly, i: usize) -> Result<JetPoly> {
        if i >= self.n {
            return Err(Error::UnsupportedIndex { index: i, dim: self.n });
        }
        let mut terms: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (ix, c) in &a.terms {
            if ix[i] == 0 {
                continue;
            }
            let mut nx = ix.clone();
            nx[i] -= 1;
            let dc = c.mul_rat(&Rat::from_integer((ix[i] as i64).into()));
            let e = terms.entry(nx).or_insert_with(Scalar::zero);
            *e = e.add(&dc);
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(JetPoly { terms })
    }

    fn div_exact(&self, a: &JetPoly, b: &JetPoly) -> Result<JetPoly> {
        // only division by an invertible constant is exact here
        let c = b
            .terms
            .iter()
            .filter(|(ix, _)| total_degree(ix) == 0)
            .map(|(_, c)| c.clone())
            .next()
            .unwrap_or_else(Scalar::zero);
        if b.terms.len() != 1 || c.is_zero() {
            return Err(Error::NotInvertible(self.render(b)));
        }
        Ok(self.scale(&c.inv()?, a))
    }

    fn is_zero(&self, a: &JetPoly) -> bool {
        a.terms.is_empty()
    }

    fn render(&self, a: &JetPoly) -> String {
        if a.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (ix, c) in &a.terms {
            let mut mono = String::new();
            for (i, &e) in ix.iter().enumerate() {
                match e {
                    0 => {}
                    1 => mono.push_str(&format!("x{}", i + 1)),
                    _ => mono.push_str(&format!("x{}^{}", i + 1, e)),
                }
            }
            if mono.is_empty() {
                parts.push(format!("({})", c.render()));
            } else {
                parts.push(format!("({})·{}", c.render(), mono));
            }
        }
        parts.join(" + ")
    }
}
