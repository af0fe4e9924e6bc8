//! Scalar-valued differential forms on a chart, sparse over increasing index
//! sets. Just enough exterior algebra for trace-density ratios: wedge
//! products, powers of 2-forms, the top component, and d.

use crate::error::Result;
use crate::ring::CoeffRing;
use std::collections::BTreeMap;

/// A differential form with ring-element components; keys are strictly
/// increasing index sets stored as bitmasks.
#[derive(Clone, PartialEq, Debug)]
pub struct KForm<R: CoeffRing> {
    pub n: usize,
    comps: BTreeMap<u32, R::Elem>,
}

fn wedge_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<R: CoeffRing> KForm<R> {
    pub fn zero(n: usize) -> Self {
        KForm {
            n,
            comps: BTreeMap::new(),
        }
    }

    pub fn one(ring: &R, n: usize) -> Self {
        let mut f = Self::zero(n);
        f.insert(ring, 0, ring.one());
        f
    }

    /// From an antisymmetric matrix A with the form = ½ A_{ij} dx^i∧dx^j.
    pub fn from_two_form(ring: &R, a: &[Vec<R::Elem>]) -> Self {
        let n = a.len();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                f.insert(ring, (1 << i) | (1 << j), a[i][j].clone());
            }
        }
        f
    }

    /// From 1-form components c_i dx^i.
    pub fn from_one_form(ring: &R, c: &[R::Elem]) -> Self {
        let n = c.len();
        let mut f = Self::zero(n);
        for (i, ci) in c.iter().enumerate() {
            f.insert(ring, 1 << i, ci.clone());
        }
        f
    }

    pub fn insert(&mut self, ring: &R, mask: u32, coeff: R::Elem) {
        if ring.is_zero(&coeff) {
            return;
        }
        let merged = match self.comps.get(&mask) {
            Some(cur) => ring.add(cur, &coeff),
            None => coeff,
        };
        if ring.is_zero(&merged) {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, merged);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.comps {
            out.insert(ring, *m, c.clone());
        }
        out
    }

    pub fn neg(&self, ring: &R) -> Self {
        KForm {
            n: self.n,
            comps: self.comps.iter().map(|(m, c)| (*m, ring.neg(c))).collect(),
        }
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn scale_elem(&self, ring: &R, f: &R::Elem) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.comps {
            out.insert(ring, *m, ring.mul(c, f));
        }
        out
    }

    pub fn wedge(&self, ring: &R, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.comps {
            for (mb, cb) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let mut c = ring.mul(ca, cb);
                if wedge_sign(*ma, *mb) < 0 {
                    c = ring.neg(&c);
                }
                out.insert(ring, ma | mb, c);
            }
        }
        out
    }

    pub fn wedge_power(&self, ring: &R, k: usize) -> Self {
        let mut acc = Self::one(ring, self.n);
        for _ in 0..k {
            acc = acc.wedge(ring, self);
        }
        acc
    }

    /// Coefficient of dx¹∧…∧dxⁿ.
    pub fn top_component(&self, ring: &R) -> R::Elem {
        let full = (1u32 << self.n) - 1;
        self.comps.get(&full).cloned().unwrap_or_else(|| ring.zero())
    }

    /// Exterior derivative.
    pub fn d(&self, ring: &R) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.comps {
            for i in 0..self.n {
                if m & (1 << i) != 0 {
                    continue;
                }
                let dc = ring.derivative(c, i)?;
                if ring.is_zero(&dc) {
                    continue;
                }
                let below = (m & ((1 << i) - 1)).count_ones();
                let coeff = if below % 2 == 0 { dc } else { ring.neg(&dc) };
                out.insert(ring, m | (1 << i), coeff);
            }
        }
        Ok(out)
    }

    /// Interior product with X = Σ X^k ∂/∂x^k.
    pub fn interior(&self, ring: &R, x: &[R::Elem]) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.comps {
            let mut bits = *m;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if ring.is_zero(&x[k]) {
                    continue;
                }
                let below = (m & ((1 << k) - 1)).count_ones();
                let mut coeff = ring.mul(c, &x[k]);
                if below % 2 == 1 {
                    coeff = ring.neg(&coeff);
                }
                out.insert(ring, m & !(1 << k), coeff);
            }
        }
        out
    }

    pub fn components(&self) -> impl Iterator<Item = (&u32, &R::Elem)> {
        self.comps.iter()
    }
}
