//! The formal Weyl algebra bundle over a chart: graded sections, the fiber
//! (Weyl-rule) product, δ and δ⁻¹, the exterior derivative, and graded
//! commutators.
//!
//! A [`WeylSection`] is a sparse sum of terms `νᵏ · c(x) · y^α · dx^β` with
//! coefficients in a pluggable ring. Terms are kept canonical: the dx factors
//! are a strictly increasing index set (stored as a bitmask, signs normalized
//! at insertion) and zero coefficients are never stored. Weyl degree is
//! `2k + |α|`.
//!
//! Truncation caps are carried by values and intersected on binary
//! operations; any term produced beyond the caps is silently dropped — the
//! caps are the contract. Operators of the form (1/ν)`[·,·]` need the product
//! computed with two extra Weyl degrees of headroom before dividing; callers
//! (the Fedosov layer) do that via [`Caps::expand`].

use crate::error::{Error, Result};
use crate::ring::CoeffRing;
use crate::scalar::{rat, Rat, Scalar};
use crate::series::NuSeries;
use std::collections::BTreeMap;

/// Truncation caps: ν-power cap and Weyl-degree cap.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Caps {
    pub nu_max: u32,
    pub weyl_max: u32,
}

impl Caps {
    pub fn new(nu_max: u32, weyl_max: u32) -> Self {
        Caps { nu_max, weyl_max }
    }

    /// Caps for a Weyl-degree cap D with the ν cap it implies (2k ≤ D).
    pub fn for_weyl(weyl_max: u32) -> Self {
        Caps {
            nu_max: weyl_max / 2,
            weyl_max,
        }
    }

    pub fn intersect(a: Caps, b: Caps) -> Caps {
        Caps {
            nu_max: a.nu_max.min(b.nu_max),
            weyl_max: a.weyl_max.min(b.weyl_max),
        }
    }

    /// Headroom for intermediates of (1/ν)-divided products.
    pub fn expand(&self, extra_weyl: u32) -> Caps {
        Caps {
            nu_max: self.nu_max + extra_weyl / 2,
            weyl_max: self.weyl_max + extra_weyl,
        }
    }

    pub fn admits(&self, nu: u32, ydeg: u32) -> bool {
        nu <= self.nu_max && 2 * nu + ydeg <= self.weyl_max
    }
}

/// Canonical key of one term: ν-power, y exponents, dx index set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TermKey {
    pub nu: u32,
    pub ys: Vec<u8>,
    pub dx: u32,
}

impl TermKey {
    pub fn y_degree(&self) -> u32 {
        self.ys.iter().map(|&e| e as u32).sum()
    }

    pub fn weyl_degree(&self) -> u32 {
        2 * self.nu + self.y_degree()
    }

    pub fn form_degree(&self) -> u32 {
        self.dx.count_ones()
    }
}

/// Sign of dx^A ∧ dx^B for disjoint increasing index sets (bitmask repr).
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

/// Sign of inserting dx^i into the increasing set `mask` (i not in mask):
/// (-1)^{#elements below i}.
fn insert_sign(mask: u32, i: usize) -> i32 {
    if (mask & ((1 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The fiber metric: ω and its inverse Λ, both antisymmetric matrices of
/// ring elements with Λ·ω = 1.
#[derive(Clone, Debug)]
pub struct FiberMetric<R: CoeffRing> {
    pub omega: Vec<Vec<R::Elem>>,
    pub lambda: Vec<Vec<R::Elem>>,
}

impl<R: CoeffRing> FiberMetric<R> {
    pub fn validate(&self, ring: &R) -> Result<()> {
        let n = self.omega.len();
        let mut problems = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let oij = &self.omega[i][j];
                let oji = &self.omega[j][i];
                if !ring.is_zero(&ring.add(oij, oji)) {
                    problems.push(format!("omega[{i}][{j}] not antisymmetric"));
                }
                let lij = &self.lambda[i][j];
                let lji = &self.lambda[j][i];
                if !ring.is_zero(&ring.add(lij, lji)) {
                    problems.push(format!("lambda[{i}][{j}] not antisymmetric"));
                }
                let mut acc = ring.zero();
                for k in 0..n {
                    acc = ring.add(&acc, &ring.mul(&self.lambda[i][k], &self.omega[k][j]));
                }
                let want = if i == j { ring.one() } else { ring.zero() };
                if acc != want {
                    problems.push(format!("(Λω)[{i}][{j}] != δ"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::ValidationFailed(problems))
        }
    }
}

/// A truncated section of Γ(W) ⊗ Λ.
#[derive(Clone, PartialEq, Debug)]
pub struct WeylSection<R: CoeffRing> {
    pub n: usize,
    pub caps: Caps,
    terms: BTreeMap<TermKey, R::Elem>,
}

impl<R: CoeffRing> WeylSection<R> {
    pub fn zero(n: usize, caps: Caps) -> Self {
        WeylSection {
            n,
            caps,
            terms: BTreeMap::new(),
        }
    }

    /// Single term; caps applied.
    pub fn monomial(ring: &R, n: usize, caps: Caps, key: TermKey, coeff: R::Elem) -> Self {
        let mut s = Self::zero(n, caps);
        s.insert_term(ring, key, coeff);
        s
    }

    /// A y-free, form-free function lifted to the bundle: Σ νᵏ f_k.
    pub fn from_series(ring: &R, n: usize, caps: Caps, f: &NuSeries<R::Elem>) -> Self {
        let mut s = Self::zero(n, caps);
        for (k, c) in f.iter() {
            assert!(k >= 0, "function series must have ν-order >= 0");
            s.insert_term(
                ring,
                TermKey {
                    nu: k as u32,
                    ys: vec![0; n],
                    dx: 0,
                },
                c.clone(),
            );
        }
        s
    }

    pub fn constant(ring: &R, n: usize, caps: Caps, s: &Scalar) -> Self {
        Self::monomial(
            ring,
            n,
            caps,
            TermKey {
                nu: 0,
                ys: vec![0; n],
                dx: 0,
            },
            ring.scalar(s),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &R::Elem)> {
        self.terms.iter()
    }

    pub fn insert_term(&mut self, ring: &R, key: TermKey, coeff: R::Elem) {
        if ring.is_zero(&coeff) || !self.caps.admits(key.nu, key.y_degree()) {
            return;
        }
        let merged = match self.terms.get(&key) {
            Some(cur) => ring.add(cur, &coeff),
            None => coeff,
        };
        if ring.is_zero(&merged) {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        let mut out = WeylSection {
            n: self.n,
            caps: Caps::intersect(self.caps, other.caps),
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            out.insert_term(ring, k.clone(), c.clone());
        }
        for (k, c) in &other.terms {
            out.insert_term(ring, k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, ring: &R) -> Self {
        WeylSection {
            n: self.n,
            caps: self.caps,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn scale_rat(&self, ring: &R, q: &Rat) -> Self {
        let mut out = WeylSection {
            n: self.n,
            caps: self.caps,
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            out.insert_term(ring, k.clone(), ring.scale_rat(q, c));
        }
        out
    }

    /// Multiply every coefficient by a ring element (central function).
    pub fn scale_elem(&self, ring: &R, f: &R::Elem) -> Self {
        let mut out = WeylSection {
            n: self.n,
            caps: self.caps,
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            out.insert_term(ring, k.clone(), ring.mul(c, f));
        }
        out
    }

    /// Multiply by ν^k; re-truncates.
    pub fn shift_nu(&self, ring: &R, k: u32) -> Self {
        let mut out = WeylSection {
            n: self.n,
            caps: self.caps,
            terms: BTreeMap::new(),
        };
        for (key, c) in &self.terms {
            let mut nk = key.clone();
            nk.nu += k;
            out.insert_term(ring, nk, c.clone());
        }
        out
    }

    /// Copy with new caps; existing beyond-cap terms are dropped.
    pub fn with_caps(&self, ring: &R, caps: Caps) -> Self {
        let mut out = WeylSection {
            n: self.n,
            caps,
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            out.insert_term(ring, k.clone(), c.clone());
        }
        out
    }

    /// Restriction to terms with Weyl degree ≤ `weyl_max` (caps unchanged).
    pub fn restrict_weyl(&self, weyl_max: u32) -> Self {
        WeylSection {
            n: self.n,
            caps: self.caps,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.weyl_degree() <= weyl_max)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn min_weyl_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.weyl_degree()).min()
    }

    pub fn max_weyl_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.weyl_degree()).max()
    }

    /// The common form degree, or an error if degrees are mixed.
    pub fn pure_form_degree(&self) -> Result<u32> {
        let mut deg = None;
        for k in self.terms.keys() {
            let d = k.form_degree();
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return Err(Error::MixedFormDegree),
                _ => {}
            }
        }
        Ok(deg.unwrap_or(0))
    }

    /// Split into pure-form-degree parts (degree → section).
    pub fn form_degree_parts(&self) -> BTreeMap<u32, Self> {
        let mut parts: BTreeMap<u32, Self> = BTreeMap::new();
        for (k, c) in &self.terms {
            parts
                .entry(k.form_degree())
                .or_insert_with(|| Self::zero(self.n, self.caps))
                .terms
                .insert(k.clone(), c.clone());
        }
        parts
    }

    /// δ = dx^ℓ ∧ ∂/∂y^ℓ.
    pub fn delta(&self, ring: &R) -> Self {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            for l in 0..self.n {
                if key.ys[l] == 0 || key.dx & (1 << l) != 0 {
                    continue;
                }
                let mut ys = key.ys.clone();
                ys[l] -= 1;
                let mut coeff = ring.scale_rat(&rat(key.ys[l] as i64, 1), c);
                if insert_sign(key.dx, l) < 0 {
                    coeff = ring.neg(&coeff);
                }
                out.insert_term(
                    ring,
                    TermKey {
                        nu: key.nu,
                        ys,
                        dx: key.dx | (1 << l),
                    },
                    coeff,
                );
            }
        }
        out
    }

    /// δ⁻¹ = (p+q)⁻¹ y^k i(∂/∂x^k) on the (p,q)-bidegree part, 0 on (0,0).
    pub fn delta_inv(&self, ring: &R) -> Self {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            let p = key.y_degree();
            let q = key.form_degree();
            if p + q == 0 {
                continue;
            }
            let factor = rat(1, (p + q) as i64);
            let mut bits = key.dx;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut ys = key.ys.clone();
                ys[k] += 1;
                let mut coeff = ring.scale_rat(&factor, c);
                if insert_sign(key.dx, k) < 0 {
                    // interior product picks up the position sign
                    coeff = ring.neg(&coeff);
                }
                out.insert_term(
                    ring,
                    TermKey {
                        nu: key.nu,
                        ys,
                        dx: key.dx & !(1 << k),
                    },
                    coeff,
                );
            }
        }
        out
    }

    /// Plain exterior derivative dx^i ∧ ∂/∂x^i on coefficients (y constant).
    pub fn d_ext(&self, ring: &R) -> Result<Self> {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            for i in 0..self.n {
                if key.dx & (1 << i) != 0 {
                    continue;
                }
                let dc = ring.derivative(c, i)?;
                if ring.is_zero(&dc) {
                    continue;
                }
                let coeff = if insert_sign(key.dx, i) < 0 {
                    ring.neg(&dc)
                } else {
                    dc
                };
                out.insert_term(
                    ring,
                    TermKey {
                        nu: key.nu,
                        ys: key.ys.clone(),
                        dx: key.dx | (1 << i),
                    },
                    coeff,
                );
            }
        }
        Ok(out)
    }

    /// Divide by ν; every term must carry ν-power ≥ 1.
    pub fn nu_divide(&self, ring: &R) -> Result<Self> {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            if key.nu == 0 {
                return Err(Error::NuNotDivisible);
            }
            let mut nk = key.clone();
            nk.nu -= 1;
            out.insert_term(ring, nk, c.clone());
        }
        Ok(out)
    }

    /// σ: the y-free part of a form-degree-0 section, as a ν-series.
    pub fn eval_y0(&self, ring: &R) -> Result<NuSeries<R::Elem>> {
        let mut out = NuSeries::new();
        for (key, c) in &self.terms {
            if key.dx != 0 {
                return Err(Error::NonzeroFormDegree);
            }
            if key.y_degree() == 0 {
                out.set(key.nu as i32, c.clone());
            }
        }
        Ok(out.normalize_ring(ring))
    }

    /// Interior product with the vector field X = Σ X^k ∂/∂x^k.
    pub fn interior(&self, ring: &R, x_comps: &[R::Elem]) -> Self {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            let mut bits = key.dx;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if ring.is_zero(&x_comps[k]) {
                    continue;
                }
                let mut coeff = ring.mul(c, &x_comps[k]);
                if insert_sign(key.dx, k) < 0 {
                    coeff = ring.neg(&coeff);
                }
                out.insert_term(
                    ring,
                    TermKey {
                        nu: key.nu,
                        ys: key.ys.clone(),
                        dx: key.dx & !(1 << k),
                    },
                    coeff,
                );
            }
        }
        out
    }

    /// Lie derivative along a constant-component vector field: the coefficient
    /// derivative Σ X^i ∂_i on every term (the y and dx parts are invariant
    /// because ∂X = 0). Model symmetries are all of this kind.
    pub fn lie_constant(&self, ring: &R, x_comps: &[Rat]) -> Result<Self> {
        let mut out = Self::zero(self.n, self.caps);
        for (key, c) in &self.terms {
            for (i, xi) in x_comps.iter().enumerate() {
                if num::traits::Zero::is_zero(xi) {
                    continue;
                }
                let dc = ring.scale_rat(xi, &ring.derivative(c, i)?);
                out.insert_term(ring, key.clone(), dc);
            }
        }
        Ok(out)
    }

    /// The Weyl-rule fiber product, extended to forms by wedging.
    pub fn fiber_product(
        ring: &R,
        a: &Self,
        b: &Self,
        metric: &FiberMetric<R>,
    ) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::DimensionMismatch(a.n, b.n));
        }
        let n = a.n;
        let caps = Caps::intersect(a.caps, b.caps);
        let mut out = Self::zero(n, caps);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                if ka.dx & kb.dx != 0 {
                    continue;
                }
                // every contraction order lands at this same Weyl degree
                if ka.weyl_degree() + kb.weyl_degree() > caps.weyl_max {
                    continue;
                }
                let dx = ka.dx | kb.dx;
                let mut c0 = ring.mul(ca, cb);
                if wedge_sign(ka.dx, kb.dx) < 0 {
                    c0 = ring.neg(&c0);
                }
                // DP over contraction count t: states map remaining exponent
                // pairs to accumulated coefficients.
                let mut states: BTreeMap<(Vec<u8>, Vec<u8>), R::Elem> = BTreeMap::new();
                states.insert((ka.ys.clone(), kb.ys.clone()), c0);
                let mut t: u32 = 0;
                let mut factor = Rat::from_integer(1.into()); // (1/2)^t / t!
                loop {
                    let nu = ka.nu + kb.nu + t;
                    if nu > caps.nu_max {
                        break;
                    }
                    for ((ya, yb), c) in &states {
                        let ys: Vec<u8> = ya.iter().zip(yb).map(|(p, q)| p + q).collect();
                        out.insert_term(
                            ring,
                            TermKey { nu, ys, dx },
                            ring.scale_rat(&factor, c),
                        );
                    }
                    let mut next: BTreeMap<(Vec<u8>, Vec<u8>), R::Elem> = BTreeMap::new();
                    for ((ya, yb), c) in &states {
                        for i in 0..n {
                            if ya[i] == 0 {
                                continue;
                            }
                            for j in 0..n {
                                if yb[j] == 0 || ring.is_zero(&metric.lambda[i][j]) {
                                    continue;
                                }
                                let mult = rat((ya[i] as i64) * (yb[j] as i64), 1);
                                let c2 = ring.scale_rat(&mult, &ring.mul(c, &metric.lambda[i][j]));
                                let mut ya2 = ya.clone();
                                ya2[i] -= 1;
                                let mut yb2 = yb.clone();
                                yb2[j] -= 1;
                                let key = (ya2, yb2);
                                let merged = match next.get(&key) {
                                    Some(cur) => ring.add(cur, &c2),
                                    None => c2,
                                };
                                if ring.is_zero(&merged) {
                                    next.remove(&key);
                                } else {
                                    next.insert(key, merged);
                                }
                            }
                        }
                    }
                    if next.is_empty() {
                        break;
                    }
                    states = next;
                    t += 1;
                    factor = factor / rat(2 * t as i64, 1);
                }
            }
        }
        Ok(out)
    }

    /// [s,s′] = s∘s′ − (−1)^{q₁q₂} s′∘s for pure form degrees.
    pub fn graded_commutator(
        ring: &R,
        a: &Self,
        b: &Self,
        metric: &FiberMetric<R>,
    ) -> Result<Self> {
        let q1 = a.pure_form_degree()?;
        let q2 = b.pure_form_degree()?;
        let ab = Self::fiber_product(ring, a, b, metric)?;
        let ba = Self::fiber_product(ring, b, a, metric)?;
        if (q1 * q2) % 2 == 0 {
            Ok(ab.sub(ring, &ba))
        } else {
            Ok(ab.add(ring, &ba))
        }
    }

    /// Graded commutator extended bilinearly over mixed form degrees.
    pub fn commutator_any(
        ring: &R,
        a: &Self,
        b: &Self,
        metric: &FiberMetric<R>,
    ) -> Result<Self> {
        let caps = Caps::intersect(a.caps, b.caps);
        let mut out = Self::zero(a.n, caps);
        for pa in a.form_degree_parts().values() {
            for pb in b.form_degree_parts().values() {
                out = out.add(ring, &Self::graded_commutator(ring, pa, pb, metric)?);
            }
        }
        Ok(out)
    }

    pub fn render(&self, ring: &R) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut piece = String::new();
            if k.nu > 0 {
                piece.push_str(&format!("ν^{}·", k.nu));
            }
            piece.push_str(&format!("({})", ring.render(c)));
            for (i, &e) in k.ys.iter().enumerate() {
                match e {
                    0 => {}
                    1 => piece.push_str(&format!("·y{}", i + 1)),
                    _ => piece.push_str(&format!("·y{}^{}", i + 1, e)),
                }
            }
            let mut bits = k.dx;
            while bits != 0 {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                piece.push_str(&format!("·dx{}", i + 1));
            }
            parts.push(piece);
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::jet::JetRing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring() -> JetRing {
        JetRing::new(2, 12)
    }

    /// Standard constant symplectic structure on R²: ω₁₂ = 1, Λ¹² = -1.
    fn metric(r: &JetRing) -> FiberMetric<JetRing> {
        FiberMetric {
            omega: vec![
                vec![r.zero(), r.one()],
                vec![r.from_int(-1), r.zero()],
            ],
            lambda: vec![
                vec![r.zero(), r.from_int(-1)],
                vec![r.one(), r.zero()],
            ],
        }
    }

    fn caps() -> Caps {
        Caps::for_weyl(8)
    }

    fn y(r: &JetRing, i: usize) -> WeylSection<JetRing> {
        let mut ys = vec![0u8; 2];
        ys[i] = 1;
        WeylSection::monomial(r, 2, caps(), TermKey { nu: 0, ys, dx: 0 }, r.one())
    }

    fn y_dx(r: &JetRing, yi: usize, di: usize) -> WeylSection<JetRing> {
        let mut ys = vec![0u8; 2];
        ys[yi] = 1;
        WeylSection::monomial(
            r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys,
                dx: 1 << di,
            },
            r.one(),
        )
    }

    fn nu_lambda12(r: &JetRing) -> WeylSection<JetRing> {
        // ν·Λ¹² = -ν on the standard structure
        WeylSection::monomial(
            r,
            2,
            caps(),
            TermKey {
                nu: 1,
                ys: vec![0, 0],
                dx: 0,
            },
            r.from_int(-1),
        )
    }

    #[test]
    fn metric_validates() {
        let r = ring();
        metric(&r).validate(&r).unwrap();
    }

    #[test]
    fn weyl_rule_one_contraction() {
        // y¹ ∘ y² = y¹y² + (ν/2)Λ¹²
        let r = ring();
        let m = metric(&r);
        let p = WeylSection::fiber_product(&r, &y(&r, 0), &y(&r, 1), &m).unwrap();
        let mut want = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![1, 1],
                dx: 0,
            },
            r.one(),
        );
        want.insert_term(
            &r,
            TermKey {
                nu: 1,
                ys: vec![0, 0],
                dx: 0,
            },
            r.scale_rat(&rat(-1, 2), &r.one()),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn unit_is_neutral() {
        let r = ring();
        let m = metric(&r);
        let one = WeylSection::constant(&r, 2, caps(), &Scalar::one());
        let b = y_dx(&r, 0, 1).add(&r, &y(&r, 1));
        assert_eq!(WeylSection::fiber_product(&r, &one, &b, &m).unwrap(), b);
        assert_eq!(WeylSection::fiber_product(&r, &b, &one, &m).unwrap(), b);
    }

    #[test]
    fn square_of_y1dx1_vanishes() {
        // hand expansion: t=0 has dx¹∧dx¹ = 0; t=1 carries Λ¹¹ = 0
        let r = ring();
        let m = metric(&r);
        let a = y_dx(&r, 0, 0);
        let p = WeylSection::fiber_product(&r, &a, &a, &m).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn commutator_of_fiber_coordinates() {
        // [y¹, y²] = νΛ¹²
        let r = ring();
        let m = metric(&r);
        let c = WeylSection::graded_commutator(&r, &y(&r, 0), &y(&r, 1), &m).unwrap();
        assert_eq!(c, nu_lambda12(&r));
    }

    #[test]
    fn commutator_with_central_form_vanishes() {
        let r = ring();
        let m = metric(&r);
        // central element: ν²·dx¹∧dx² with no y dependence
        let central = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 2,
                ys: vec![0, 0],
                dx: 0b11,
            },
            r.from_int(5),
        );
        let a = y(&r, 0).add(&r, &y(&r, 1)); // pure 0-form
        let c = WeylSection::graded_commutator(&r, &a, &central, &m).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn commutator_of_one_forms() {
        // Hand expansion of both orderings with the odd-odd sign:
        // [y¹dx¹, y²dx²] = y¹∘y² ⊗ dx¹∧dx² + y²∘y¹ ⊗ dx²∧dx¹
        //                = ([y¹,y²]) ⊗ dx¹∧dx² = νΛ¹² dx¹∧dx².
        let r = ring();
        let m = metric(&r);
        let c = WeylSection::graded_commutator(&r, &y_dx(&r, 0, 0), &y_dx(&r, 1, 1), &m).unwrap();
        let want = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 1,
                ys: vec![0, 0],
                dx: 0b11,
            },
            r.from_int(-1), // Λ¹² = -1
        );
        assert_eq!(c, want);
    }

    #[test]
    fn mixed_form_degree_is_rejected() {
        let r = ring();
        let m = metric(&r);
        let mixed = y(&r, 0).add(&r, &y_dx(&r, 0, 1));
        assert!(WeylSection::graded_commutator(&r, &mixed, &y(&r, 1), &m).is_err());
        // but the bilinear extension accepts it
        assert!(WeylSection::commutator_any(&r, &mixed, &y(&r, 1), &m).is_ok());
    }

    #[test]
    fn delta_examples() {
        let r = ring();
        // δ(½(y¹)²) = y¹dx¹
        let half_y1sq = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![2, 0],
                dx: 0,
            },
            r.scale_rat(&rat(1, 2), &r.one()),
        );
        assert_eq!(half_y1sq.delta(&r), y_dx(&r, 0, 0));
        // δ(y¹dx¹) = 0
        assert!(y_dx(&r, 0, 0).delta(&r).is_zero());
        // δ(f(x)) = 0
        let f = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![0, 0],
                dx: 0,
            },
            r.var(0),
        );
        assert!(f.delta(&r).is_zero());
    }

    #[test]
    fn delta_inv_examples() {
        let r = ring();
        // δ⁻¹(y¹dx¹) = ½(y¹)²
        let want = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![2, 0],
                dx: 0,
            },
            r.scale_rat(&rat(1, 2), &r.one()),
        );
        assert_eq!(y_dx(&r, 0, 0).delta_inv(&r), want);
        // δ⁻¹(f(x)) = 0 on the (0,0) part
        let f = WeylSection::constant(&r, 2, caps(), &Scalar::from_int(3));
        assert!(f.delta_inv(&r).is_zero());
        // δ⁻¹(dx¹) = y¹
        let dx1 = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![0, 0],
                dx: 1,
            },
            r.one(),
        );
        assert_eq!(dx1.delta_inv(&r), y(&r, 0));
    }

    #[test]
    fn d_ext_examples() {
        let r = ring();
        // d(x¹) = dx¹
        let x1 = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![0, 0],
                dx: 0,
            },
            r.var(0),
        );
        let dx1 = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![0, 0],
                dx: 1,
            },
            r.one(),
        );
        assert_eq!(x1.d_ext(&r).unwrap(), dx1);
        // d(x²·y¹) = y¹dx²
        let x2y1 = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![1, 0],
                dx: 0,
            },
            r.var(1),
        );
        assert_eq!(x2y1.d_ext(&r).unwrap(), y_dx(&r, 0, 1));
    }

    #[test]
    fn nu_divide_examples() {
        let r = ring();
        let nl = nu_lambda12(&r);
        let l = nl.nu_divide(&r).unwrap();
        assert_eq!(
            l,
            WeylSection::monomial(
                &r,
                2,
                caps(),
                TermKey {
                    nu: 0,
                    ys: vec![0, 0],
                    dx: 0
                },
                r.from_int(-1)
            )
        );
        assert!(WeylSection::<JetRing>::zero(2, caps())
            .nu_divide(&r)
            .unwrap()
            .is_zero());
        assert!(y(&r, 0).nu_divide(&r).is_err());
    }

    #[test]
    fn eval_y0_examples() {
        let r = ring();
        let f = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![0, 0],
                dx: 0,
            },
            r.var(0),
        );
        let s = f.add(&r, &y(&r, 0)).eval_y0(&r).unwrap();
        assert_eq!(s.coeff(&r, 0), r.var(0));
        // (y¹)² → 0
        let y1sq = WeylSection::monomial(
            &r,
            2,
            caps(),
            TermKey {
                nu: 0,
                ys: vec![2, 0],
                dx: 0,
            },
            r.one(),
        );
        assert!(y1sq.eval_y0(&r).unwrap().is_empty());
        // nonzero form degree is an error
        assert!(y_dx(&r, 0, 0).eval_y0(&r).is_err());
    }

    /// Random section kept one Weyl degree inside the cap, so δ⁻¹ has headroom
    /// and the Hodge identity is exact (at the cap itself, truncation bites).
    fn random_section(r: &JetRing, rng: &mut ChaCha8Rng, max_terms: usize) -> WeylSection<JetRing> {
        let pool = [rat(1, 1), rat(-1, 2), rat(2, 3), rat(-3, 1), rat(1, 4)];
        let mut s = WeylSection::zero(2, caps());
        for _ in 0..max_terms {
            let nu = rng.gen_range(0..3u32);
            let ys = vec![rng.gen_range(0..3u8), rng.gen_range(0..3u8)];
            if 2 * nu + (ys[0] + ys[1]) as u32 >= caps().weyl_max {
                continue;
            }
            let dx = rng.gen_range(0..4u32);
            let q = pool[rng.gen_range(0..pool.len())].clone();
            let mono = match rng.gen_range(0..3u8) {
                0 => r.one(),
                1 => r.var(0),
                _ => r.mul(&r.var(1), &r.var(0)),
            };
            s.insert_term(r, TermKey { nu, ys, dx }, r.scale_rat(&q, &mono));
        }
        s
    }

    /// The ν-series part with p = q = 0 (what the Hodge identity removes).
    fn part_00(r: &JetRing, a: &WeylSection<JetRing>) -> WeylSection<JetRing> {
        let mut out = WeylSection::zero(a.n, a.caps);
        for (k, c) in a.terms() {
            if k.y_degree() == 0 && k.dx == 0 {
                out.insert_term(r, k.clone(), c.clone());
            }
        }
        out
    }

    #[test]
    fn hodge_identity_on_random_sections() {
        let r = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let a = random_section(&r, &mut rng, 6);
            let lhs = a.delta(&r).delta_inv(&r).add(&r, &a.delta_inv(&r).delta(&r));
            let rhs = a.sub(&r, &part_00(&r, &a));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn delta_and_delta_inv_square_to_zero() {
        let r = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let a = random_section(&r, &mut rng, 6);
            assert!(a.delta(&r).delta(&r).is_zero());
            assert!(a.delta_inv(&r).delta_inv(&r).is_zero());
        }
    }

    #[test]
    fn fiber_product_is_associative_within_caps() {
        let r = ring();
        let m = metric(&r);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            // constant coefficients keep the check independent of the chart
            let mut make = |rng: &mut ChaCha8Rng| {
                let mut s = WeylSection::zero(2, caps());
                for _ in 0..4 {
                    let nu = rng.gen_range(0..2u32);
                    let ys = vec![rng.gen_range(0..3u8), rng.gen_range(0..3u8)];
                    let dx = rng.gen_range(0..4u32);
                    let q = rat(rng.gen_range(-3..4i64), rng.gen_range(1..4i64));
                    s.insert_term(&r, TermKey { nu, ys, dx }, r.rat(&q));
                }
                s
            };
            let a = make(&mut rng);
            let b = make(&mut rng);
            let c = make(&mut rng);
            let ab_c = WeylSection::fiber_product(
                &r,
                &WeylSection::fiber_product(&r, &a, &b, &m).unwrap(),
                &c,
                &m,
            )
            .unwrap();
            let a_bc = WeylSection::fiber_product(
                &r,
                &a,
                &WeylSection::fiber_product(&r, &b, &c, &m).unwrap(),
                &m,
            )
            .unwrap();
            assert_eq!(ab_c, a_bc);
        }
    }

    #[test]
    fn degree_bookkeeping() {
        let r = ring();
        let m = metric(&r);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let a = random_section(&r, &mut rng, 5);
            let b = random_section(&r, &mut rng, 5);
            let p = WeylSection::fiber_product(&r, &a, &b, &m).unwrap();
            for (k, _) in p.terms() {
                assert!(p.caps.admits(k.nu, k.y_degree()));
            }
            // δ⁻¹ raises Weyl degree by exactly 1 on homogeneous input
            let start = a.delta(&r); // anything with p+q > 0 termwise
            for (k, _) in start.delta_inv(&r).terms() {
                let d = k.weyl_degree();
                assert!(start
                    .terms()
                    .any(|(k0, _)| k0.weyl_degree() + 1 == d));
            }
        }
    }
}
