//! Exact scalars: rational numbers times integer powers of the symbol τ = 2π.
//!
//! A [`Scalar`] is a finite sum of terms `q·τ^k` with `q` an arbitrary-precision
//! rational and `k` an integer. τ is treated as a free transcendental, so two
//! scalars are equal iff they agree term by term. No rounding ever happens here;
//! τ is substituted by the float 2π only in [`Scalar::to_f64`].

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shorthand for the exact rational coefficient type.
pub type Rat = BigRational;

/// Build a rational from an integer pair.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Exact element of ℚ[τ, τ⁻¹] with τ standing for 2π.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    /// τ-power → nonzero rational coefficient.
    terms: BTreeMap<i32, Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_rat(Rat::one())
    }

    pub fn from_rat(q: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(0, q);
        }
        Scalar { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rat(Rat::from(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::from_rat(rat(p, q))
    }

    /// `q·τ^k`.
    pub fn rat_tau(q: Rat, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(k, q);
        }
        Scalar { terms }
    }

    /// τ^k.
    pub fn tau_pow(k: i32) -> Self {
        Scalar::rat_tau(Rat::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no τ-power other than 0 appears.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    /// The τ⁰ coefficient if the scalar is purely rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_rational() {
            self.terms.get(&0).cloned()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut terms = self.terms.clone();
        for (k, q) in &other.terms {
            let e = terms.entry(*k).or_insert_with(Rat::zero);
            *e += q;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Scalar { terms }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, q)| (*k, -q.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut terms: BTreeMap<i32, Rat> = BTreeMap::new();
        for (ka, qa) in &self.terms {
            for (kb, qb) in &other.terms {
                let e = terms.entry(ka + kb).or_insert_with(Rat::zero);
                *e += qa * qb;
            }
        }
        terms.retain(|_, q| !q.is_zero());
        Scalar { terms }
    }

    pub fn mul_rat(&self, q: &Rat) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    /// Multiply by τ^k (shift every τ-power).
    pub fn mul_tau_pow(&self, k: i32) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(p, c)| (p + k, c.clone())).collect(),
        }
    }

    /// Exact inverse, defined only for monomials `q·τ^k`.
    pub fn inv(&self) -> Result<Scalar> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let (k, q) = self.terms.iter().next().unwrap();
        Ok(Scalar::rat_tau(Rat::one() / q, -k))
    }

    /// Substitute τ = 2π numerically.
    pub fn to_f64(&self) -> f64 {
        let tau = std::f64::consts::TAU;
        self.terms
            .iter()
            .map(|(k, q)| q.to_f64().unwrap_or(f64::NAN) * tau.powi(*k))
            .sum()
    }

    /// Canonical exact rendering, e.g. `-1/24`, `3·(2π)^2`, `2π + 1/2·(2π)^-1`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, q)) in self.terms.iter().enumerate() {
            let mag = q.abs();
            if i == 0 {
                if q.is_negative() {
                    out.push('-');
                }
            } else if q.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let coeff = format!("{}", mag);
            match (*k, mag.is_one()) {
                (0, _) => out.push_str(&coeff),
                (1, true) => out.push_str("2π"),
                (1, false) => out.push_str(&format!("{}·2π", coeff)),
                (_, true) => out.push_str(&format!("(2π)^{}", k)),
                (_, false) => out.push_str(&format!("{}·(2π)^{}", coeff, k)),
            }
        }
        out
    }

    /// Parse the [`render`](Self::render) format back. Exact round trip.
    pub fn parse(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if s == "0" {
            return Ok(Scalar::zero());
        }
        let mut out = Scalar::zero();
        // split into signed terms
        let normalized = s.replace(" - ", " + -").replace("−", "-");
        for raw in normalized.split(" + ") {
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let (neg, body) = match raw.strip_prefix('-') {
                Some(b) => (true, b.trim()),
                None => (false, raw),
            };
            let (coeff_str, tau_k) = if let Some(idx) = body.find('·') {
                let (c, t) = body.split_at(idx);
                (c.trim(), parse_tau(&t['·'.len_utf8()..])?)
            } else if body.starts_with("2π") || body.starts_with("(2π)") {
                ("1", parse_tau(body)?)
            } else {
                (body, 0)
            };
            let q = Rat::from_str(coeff_str)
                .map_err(|_| Error::Parse(format!("bad rational {coeff_str:?}")))?;
            let q = if neg { -q } else { q };
            out = out.add(&Scalar::rat_tau(q, tau_k));
        }
        Ok(out)
    }
}

fn parse_tau(s: &str) -> Result<i32> {
    let s = s.trim();
    if s == "2π" {
        return Ok(1);
    }
    if let Some(rest) = s.strip_prefix("(2π)^") {
        return rest
            .parse::<i32>()
            .map_err(|_| Error::Parse(format!("bad τ power {rest:?}")));
    }
    Err(Error::Parse(format!("bad τ factor {s:?}")))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_is_free() {
        let a = Scalar::rat_tau(rat(1, 2), 1);
        let b = Scalar::rat_tau(rat(1, 2), 2);
        assert_ne!(a, b);
        assert_eq!(a.mul_tau_pow(1), b);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn arithmetic_is_exact() {
        // (1/3 + τ)·(3 - τ) = 1 + 3τ - τ/3 - τ² = 1 + (8/3)τ - τ²
        let a = Scalar::from_ratio(1, 3).add(&Scalar::tau_pow(1));
        let b = Scalar::from_int(3).sub(&Scalar::tau_pow(1));
        let p = a.mul(&b);
        let want = Scalar::from_int(1)
            .add(&Scalar::rat_tau(rat(8, 3), 1))
            .add(&Scalar::rat_tau(rat(-1, 1), 2));
        assert_eq!(p, want);
    }

    #[test]
    fn render_parse_round_trip() {
        let cases = [
            Scalar::zero(),
            Scalar::from_ratio(-1, 24),
            Scalar::tau_pow(2),
            Scalar::rat_tau(rat(3, 4), -1).add(&Scalar::from_int(2)),
            Scalar::rat_tau(rat(-5, 7), 3).sub(&Scalar::tau_pow(1)),
        ];
        for s in cases {
            let text = s.render();
            let back = Scalar::parse(&text).unwrap();
            assert_eq!(back, s, "round trip failed for {text}");
        }
    }

    #[test]
    fn inverse_of_monomial() {
        let s = Scalar::rat_tau(rat(3, 2), -2);
        let i = s.inv().unwrap();
        assert_eq!(s.mul(&i), Scalar::one());
        assert!(Scalar::from_int(1).add(&Scalar::tau_pow(1)).inv().is_err());
        assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn numeric_substitution() {
        let s = Scalar::rat_tau(rat(1, 2), 1); // π
        assert!((s.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}
