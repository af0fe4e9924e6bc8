//! Rational functions of the moment coordinate z on the toric S² model.
//!
//! The chart has coordinates (z, θ); every circle-invariant quantity is a
//! function of z alone, so the ring stores numerator/denominator polynomials
//! in z with exact scalar coefficients. The θ-derivative is zero. Fractions
//! are reduced by polynomial GCD whenever the coefficients are plain
//! rationals (they always are in the bundled models).

use super::{CoeffRing, ExactIntegrate};
use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};
use num::traits::Zero;

/// Dense polynomial in z, ascending powers, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly(pub Vec<Scalar>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    pub fn from_rats(coeffs: &[Rat]) -> Self {
        let mut p = Poly(coeffs.iter().map(|q| Scalar::from_rat(q.clone())).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        let mut p = Poly(self.0.iter().map(|c| c.mul(s)).collect());
        p.trim();
        p
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.0.len() - 1);
        for (k, c) in self.0.iter().enumerate().skip(1) {
            out.push(c.mul_rat(&Rat::from_integer((k as i64).into())));
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    /// Term-by-term antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Scalar::zero()];
        for (k, c) in self.0.iter().enumerate() {
            out.push(c.mul_rat(&Rat::new(1.into(), ((k + 1) as i64).into())));
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn eval_rat(&self, z: &Rat) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul_rat(z).add(c);
        }
        acc
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    fn as_rats(&self) -> Option<Vec<Rat>> {
        self.0.iter().map(|c| c.as_rat()).collect()
    }

    /// Exact ∫_{-1}^{1} of the polynomial.
    pub fn integrate_sym(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, c) in self.0.iter().enumerate() {
            if k % 2 == 0 {
                acc = acc.add(&c.mul_rat(&Rat::new(2.into(), ((k + 1) as i64).into())));
            }
        }
        acc
    }
}

/// GCD of rational-coefficient polynomials, monic.
fn rat_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim_rats(&mut a);
    trim_rats(&mut b);
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c /= &lead;
        }
    }
    a
}

fn trim_rats(v: &mut Vec<Rat>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn rat_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    trim_rats(&mut r);
    let db = b.len() - 1;
    let lead_b = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let q = &r[dr] / lead_b;
        for i in 0..=db {
            let v = &b[i] * &q;
            r[dr - db + i] -= v;
        }
        trim_rats(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn rat_div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    // exact quotient, used only when b divides a
    let mut r = a.to_vec();
    trim_rats(&mut r);
    let db = b.len() - 1;
    let lead_b = &b[db];
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / lead_b;
        q[dr - db] = c.clone();
        for i in 0..=db {
            let v = &b[i] * &c;
            r[dr - db + i] -= v;
        }
        trim_rats(&mut r);
        if r.is_empty() {
            break;
        }
    }
    trim_rats(&mut q);
    q
}

/// A reduced fraction of polynomials in z.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    fn new(num: Poly, den: Poly) -> RationalFn {
        assert!(!den.is_zero(), "zero denominator");
        let mut out = RationalFn { num, den };
        out.reduce();
        out
    }

    pub fn poly(p: Poly) -> RationalFn {
        RationalFn {
            num: p,
            den: Poly::constant(Scalar::one()),
        }
    }

    /// True when the denominator is a (nonzero) constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// The underlying polynomial, when the denominator is constant.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.num.is_zero() {
            return Some(Poly::zero());
        }
        if !self.is_polynomial() {
            return None;
        }
        let lead = self.den.0[0].inv().ok()?;
        Some(self.num.scale(&lead))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::constant(Scalar::one());
            return;
        }
        if let (Some(n), Some(d)) = (self.num.as_rats(), self.den.as_rats()) {
            let g = rat_gcd(&n, &d);
            if g.len() > 1 {
                let n2 = rat_div_exact(&n, &g);
                let d2 = rat_div_exact(&d, &g);
                self.num = Poly::from_rats(&n2);
                self.den = Poly::from_rats(&d2);
            }
        }
        // normalize: make the denominator's leading coefficient 1 when possible
        if let Some(d) = self.den.degree() {
            if let Ok(inv) = self.den.0[d].inv() {
                self.num = self.num.scale(&inv);
                self.den = self.den.scale(&inv);
            }
        }
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.num.eval_f64(z) / self.den.eval_f64(z)
    }

    pub fn eval_rat(&self, z: &Rat) -> Result<Scalar> {
        let d = self.den.eval_rat(z);
        let inv = d.inv()?;
        Ok(self.num.eval_rat(z).mul(&inv))
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        // cross-multiplied comparison is canonical-form independent
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

/// The S² coefficient ring: chart (z, θ), circle-invariant elements.
#[derive(Clone, PartialEq, Debug)]
pub struct ProfileRing;

impl ProfileRing {
    /// The coordinate function z.
    pub fn z(&self) -> RationalFn {
        RationalFn::poly(Poly(vec![Scalar::zero(), Scalar::one()]))
    }

    pub fn from_poly_rats(&self, coeffs: &[Rat]) -> RationalFn {
        RationalFn::poly(Poly::from_rats(coeffs))
    }

    pub fn div(&self, a: &RationalFn, b: &RationalFn) -> RationalFn {
        assert!(!b.num.is_zero(), "division by zero profile element");
        RationalFn::new(a.num.mul(&b.den), a.den.mul(&b.num))
    }

    /// Antiderivative in z with zero constant term; polynomial inputs only.
    pub fn antiderivative(&self, a: &RationalFn) -> Result<RationalFn> {
        match a.to_poly() {
            Some(p) => Ok(RationalFn::poly(p.antiderivative())),
            None => Err(Error::NotPolynomial(self.render(a))),
        }
    }
}

impl CoeffRing for ProfileRing {
    type Elem = RationalFn;

    fn dim(&self) -> usize {
        2
    }

    fn zero(&self) -> RationalFn {
        RationalFn::poly(Poly::zero())
    }

    fn one(&self) -> RationalFn {
        RationalFn::poly(Poly::constant(Scalar::one()))
    }

    fn scalar(&self, s: &Scalar) -> RationalFn {
        RationalFn::poly(Poly::constant(s.clone()))
    }

    fn add(&self, a: &RationalFn, b: &RationalFn) -> RationalFn {
        if a.den == b.den {
            return RationalFn::new(a.num.add(&b.num), a.den.clone());
        }
        RationalFn::new(
            a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            a.den.mul(&b.den),
        )
    }

    fn neg(&self, a: &RationalFn) -> RationalFn {
        RationalFn {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RationalFn, b: &RationalFn) -> RationalFn {
        RationalFn::new(a.num.mul(&b.num), a.den.mul(&b.den))
    }

    fn scale(&self, s: &Scalar, a: &RationalFn) -> RationalFn {
        if s.is_zero() {
            return self.zero();
        }
        RationalFn {
            num: a.num.scale(s),
            den: a.den.clone(),
        }
    }

    fn derivative(&self, a: &RationalFn, i: usize) -> Result<RationalFn> {
        match i {
            0 => {
                let n = a.num.derivative().mul(&a.den).sub(&a.num.mul(&a.den.derivative()));
                Ok(RationalFn::new(n, a.den.mul(&a.den)))
            }
            1 => Ok(self.zero()), // θ-derivative of an invariant function
            _ => Err(Error::UnsupportedIndex { index: i, dim: 2 }),
        }
    }

    fn div_exact(&self, a: &RationalFn, b: &RationalFn) -> Result<RationalFn> {
        if b.num.is_zero() {
            return Err(Error::NotInvertible("0".to_string()));
        }
        Ok(self.div(a, b))
    }

    fn is_zero(&self, a: &RationalFn) -> bool {
        a.num.is_zero()
    }

    fn render(&self, a: &RationalFn) -> String {
        let fmt_poly = |p: &Poly| -> String {
            if p.is_zero() {
                return "0".to_string();
            }
            let mut parts = Vec::new();
            for (k, c) in p.0.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                match k {
                    0 => parts.push(format!("({})", c.render())),
                    1 => parts.push(format!("({})·z", c.render())),
                    _ => parts.push(format!("({})·z^{}", c.render(), k)),
                }
            }
            parts.join(" + ")
        };
        if a.is_polynomial() || a.num.is_zero() {
            fmt_poly(&a.to_poly().unwrap_or_else(Poly::zero))
        } else {
            format!("[{}] / [{}]", fmt_poly(&a.num), fmt_poly(&a.den))
        }
    }
}

impl ExactIntegrate for ProfileRing {
    /// ∫ over the model: z ∈ [-1,1], θ ∈ [0,2π). Polynomial integrands only;
    /// genuinely rational integrands go through quadrature instead.
    fn integrate_dv(&self, a: &RationalFn) -> Result<Scalar> {
        match a.to_poly() {
            Some(p) => Ok(p.integrate_sym().mul_tau_pow(1)),
            None => Err(Error::NotPolynomial(self.render(a))),
        }
    }
}
