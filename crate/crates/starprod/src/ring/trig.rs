//! Trigonometric polynomials on the torus Tⁿ.
//!
//! Elements are finite sums `Σ c·cos⟨k,x⟩ + s·sin⟨k,x⟩` over integer frequency
//! vectors `k`, with exact scalar coefficients. Keys are canonicalized so that
//! the first nonzero frequency entry is positive (using cos(-k) = cos(k),
//! sin(-k) = -sin(k)); products use the product-to-sum identities exactly.

use super::{CoeffRing, ExactIntegrate};
use crate::error::{Error, Result};
use crate::scalar::{rat, Scalar};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Cos,
    Sin,
}

pub type Freq = Vec<i32>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrigPoly {
    terms: BTreeMap<(Freq, Wave), Scalar>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrigRing {
    pub n: usize,
}

impl TrigRing {
    pub fn new(n: usize) -> Self {
        TrigRing { n }
    }

    /// `c·cos⟨k,x⟩` or `c·sin⟨k,x⟩`, canonicalized.
    pub fn wave(&self, freq: Freq, kind: Wave, c: Scalar) -> TrigPoly {
        assert_eq!(freq.len(), self.n);
        let mut out = TrigPoly {
            terms: BTreeMap::new(),
        };
        add_wave(&mut out, freq, kind, c);
        out
    }

    pub fn cos(&self, freq: Freq) -> TrigPoly {
        self.wave(freq, Wave::Cos, Scalar::one())
    }

    pub fn sin(&self, freq: Freq) -> TrigPoly {
        self.wave(freq, Wave::Sin, Scalar::one())
    }

    pub fn terms_of<'a>(&self, a: &'a TrigPoly) -> impl Iterator<Item = (&'a (Freq, Wave), &'a Scalar)> {
        a.terms.iter()
    }
}

/// Insert with canonicalization, merging and dropping zeros.
fn add_wave(p: &mut TrigPoly, mut freq: Freq, kind: Wave, mut c: Scalar) {
    if c.is_zero() {
        return;
    }
    match freq.iter().find(|&&f| f != 0) {
        None => {
            if kind == Wave::Sin {
                return; // sin(0) = 0
            }
        }
        Some(&first) => {
            if first < 0 {
                for f in freq.iter_mut() {
                    *f = -*f;
                }
                if kind == Wave::Sin {
                    c = c.neg();
                }
            }
        }
    }
    let key = (freq, kind);
    let acc = match p.terms.get(&key) {
        Some(cur) => cur.add(&c),
        None => c,
    };
    if acc.is_zero() {
        p.terms.remove(&key);
    } else {
        p.terms.insert(key, acc);
    }
}

impl CoeffRing for TrigRing {
    type Elem = TrigPoly;

    fn dim(&self) -> usize {
        self.n
    }

    fn zero(&self) -> TrigPoly {
        TrigPoly {
            terms: BTreeMap::new(),
        }
    }

    fn one(&self) -> TrigPoly {
        self.scalar(&Scalar::one())
    }

    fn scalar(&self, s: &Scalar) -> TrigPoly {
        self.wave(vec![0; self.n], Wave::Cos, s.clone())
    }

    fn add(&self, a: &TrigPoly, b: &TrigPoly) -> TrigPoly {
        let mut out = a.clone();
        for ((f, k), c) in &b.terms {
            add_wave(&mut out, f.clone(), *k, c.clone());
        }
        out
    }

    fn neg(&self, a: &TrigPoly) -> TrigPoly {
        TrigPoly {
            terms: a.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    fn mul(&self, a: &TrigPoly, b: &TrigPoly) -> TrigPoly {
        let half = rat(1, 2);
        let mut out = self.zero();
        for ((fa, ka), ca) in &a.terms {
            for ((fb, kb), cb) in &b.terms {
                let c = ca.mul(cb).mul_rat(&half);
                let sum: Freq = fa.iter().zip(fb).map(|(x, y)| x + y).collect();
                let diff: Freq = fa.iter().zip(fb).map(|(x, y)| x - y).collect();
                match (ka, kb) {
                    (Wave::Cos, Wave::Cos) => {
                        add_wave(&mut out, diff, Wave::Cos, c.clone());
                        add_wave(&mut out, sum, Wave::Cos, c);
                    }
                    (Wave::Sin, Wave::Sin) => {
                        add_wave(&mut out, diff, Wave::Cos, c.clone());
                        add_wave(&mut out, sum, Wave::Cos, c.neg());
                    }
                    (Wave::Sin, Wave::Cos) => {
                        add_wave(&mut out, sum, Wave::Sin, c.clone());
                        add_wave(&mut out, diff, Wave::Sin, c);
                    }
                    (Wave::Cos, Wave::Sin) => {
                        add_wave(&mut out, sum, Wave::Sin, c.clone());
                        // cos A sin B = ½ sin(A+B) − ½ sin(A−B)
                        add_wave(&mut out, diff, Wave::Sin, c.neg());
                    }
                }
            }
        }
        out
    }

    fn scale(&self, s: &Scalar, a: &TrigPoly) -> TrigPoly {
        if s.is_zero() {
            return self.zero();
        }
        TrigPoly {
            terms: a.terms.iter().map(|(k, c)| (k.clone(), c.mul(s))).collect(),
        }
    }

    fn derivative(&self, a: &TrigPoly, i: usize) -> Result<TrigPoly> {
        if i >= self.n {
            return Err(Error::UnsupportedIndex { index: i, dim: self.n });
        }
        let mut out = self.zero();
        for ((f, k), c) in &a.terms {
            let fi = f[i] as i64;
            if fi == 0 {
                continue;
            }
            let dc = c.mul_rat(&rat(fi, 1));
            match k {
                Wave::Cos => add_wave(&mut out, f.clone(), Wave::Sin, dc.neg()),
                Wave::Sin => add_wave(&mut out, f.clone(), Wave::Cos, dc),
            }
        }
        Ok(out)
    }

    fn div_exact(&self, a: &TrigPoly, b: &TrigPoly) -> Result<TrigPoly> {
        let key = (vec![0; self.n], Wave::Cos);
        let c = b.terms.get(&key).cloned().unwrap_or_else(Scalar::zero);
        if b.terms.len() != 1 || c.is_zero() {
            return Err(Error::NotInvertible(self.render(b)));
        }
        Ok(self.scale(&c.inv()?, a))
    }

    fn is_zero(&self, a: &TrigPoly) -> bool {
        a.terms.is_empty()
    }

    fn render(&self, a: &TrigPoly) -> String {
        if a.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((f, k), c) in &a.terms {
            if f.iter().all(|&x| x == 0) {
                parts.push(format!("({})", c.render()));
                continue;
            }
            let arg = f
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| match x {
                    1 => format!("x{}", i + 1),
                    -1 => format!("-x{}", i + 1),
                    _ => format!("{}x{}", x, i + 1),
                })
                .collect::<Vec<_>>()
                .join("+");
            let head = match k {
                Wave::Cos => "cos",
                Wave::Sin => "sin",
            };
            parts.push(format!("({})·{}({})", c.render(), head, arg));
        }
        parts.join(" + ")
    }
}

impl ExactIntegrate for TrigRing {
    /// ∫_{Tⁿ} a dx = τⁿ · (constant Fourier coefficient), exactly.
    fn integrate_dv(&self, a: &TrigPoly) -> Result<Scalar> {
        let key = (vec![0; self.n], Wave::Cos);
        let c0 = a.terms.get(&key).cloned().unwrap_or_else(Scalar::zero);
        Ok(c0.mul_tau_pow(self.n as i32))
    }
}
