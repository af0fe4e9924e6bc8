//! The bundled chart models: flat ℝ^{2m}, the trig-perturbed torus T^{2m},
//! and the toric S² with a profile-parameterized Kähler metric.
//!
//! Each model is a single chart whose symmetry or periodicity supplies the
//! global integrals; there are no atlases or transition functions here.

use super::{forms::KForm, standard_metric, ChartGeometry};
use crate::error::{Error, Result};
use crate::quad;
use crate::ring::jet::JetRing;
use crate::ring::profile::{Poly, ProfileRing, RationalFn};
use crate::ring::trig::{TrigPoly, TrigRing};
use crate::ring::{CoeffRing, ExactIntegrate};
use crate::scalar::{rat, Rat, Scalar};
use num::traits::{Signed, Zero};

/// A chart model with an exact global integral for the Liouville volume.
pub trait SymplecticModel {
    type Ring: CoeffRing;
    fn ring(&self) -> &Self::Ring;
    fn geometry(&self) -> &ChartGeometry<Self::Ring>;
    /// ∫ f ω^m/m!, exact. Errors when the model (or integrand) lacks one.
    fn integrate_top(&self, f: &<Self::Ring as CoeffRing>::Elem) -> Result<Scalar>;
}

// ---------------------------------------------------------------------------
// Flat ℝ^{2m}
// ---------------------------------------------------------------------------

/// Flat chart: standard constant ω, Γ = 0, optional constant Ω coefficients.
#[derive(Clone, Debug)]
pub struct FlatModel {
    pub ring: JetRing,
    pub geom: ChartGeometry<JetRing>,
}

/// Build the flat model. `alphas[r]` is the constant antisymmetric matrix of
/// α_{r+1} in Ω = Σ ν^{r+1} α_{r+1}.
pub fn build_flat(m: usize, jet_order: u32, alphas: Vec<Vec<Vec<Rat>>>) -> Result<FlatModel> {
    let n = 2 * m;
    let ring = JetRing::new(n, jet_order);
    let metric = standard_metric(&ring, m);
    let gamma = vec![vec![vec![ring.zero(); n]; n]; n];
    let alphas = alphas
        .into_iter()
        .map(|a| {
            a.into_iter()
                .map(|row| row.into_iter().map(|q| ring.rat(&q)).collect())
                .collect()
        })
        .collect();
    let geom = ChartGeometry::new(ring.clone(), m, metric, gamma, alphas)?;
    geom.validate()?;
    Ok(FlatModel { ring, geom })
}

impl SymplecticModel for FlatModel {
    type Ring = JetRing;
    fn ring(&self) -> &JetRing {
        &self.ring
    }
    fn geometry(&self) -> &ChartGeometry<JetRing> {
        &self.geom
    }
    fn integrate_top(&self, _f: &<JetRing as CoeffRing>::Elem) -> Result<Scalar> {
        Err(Error::MissingCapability("integration on the flat chart"))
    }
}

// ---------------------------------------------------------------------------
// Torus T^{2m}
// ---------------------------------------------------------------------------

/// Torus chart: standard constant ω, connection Γ = Λ·T recovered from a
/// totally symmetric lowered 3-tensor T of trig polynomials.
#[derive(Clone, Debug)]
pub struct TorusModel {
    pub ring: TrigRing,
    pub geom: ChartGeometry<TrigRing>,
}

pub fn build_torus(
    m: usize,
    t_lowered: Vec<Vec<Vec<TrigPoly>>>,
    alphas: Vec<Vec<Vec<TrigPoly>>>,
) -> Result<TorusModel> {
    let n = 2 * m;
    let ring = TrigRing::new(n);
    let metric = standard_metric(&ring, m);
    // Γ^ℓ_{jk} = Λ^{ℓp} T_{pjk}
    let mut gamma = vec![vec![vec![ring.zero(); n]; n]; n];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = ring.zero();
                for p in 0..n {
                    acc = ring.add(&acc, &ring.mul(&metric.lambda[l][p], &t_lowered[p][j][k]));
                }
                gamma[l][j][k] = acc;
            }
        }
    }
    let geom = ChartGeometry::new(ring.clone(), m, metric, gamma, alphas)?;
    geom.validate()?;
    Ok(TorusModel { ring, geom })
}

impl TorusModel {
    /// Exact ∫ of a scalar 2m-form (given as a [`KForm`]).
    pub fn integrate_form(&self, f: &KForm<TrigRing>) -> Result<Scalar> {
        self.ring.integrate_dv(&f.top_component(&self.ring))
    }
}

impl SymplecticModel for TorusModel {
    type Ring = TrigRing;
    fn ring(&self) -> &TrigRing {
        &self.ring
    }
    fn geometry(&self) -> &ChartGeometry<TrigRing> {
        &self.geom
    }
    fn integrate_top(&self, f: &TrigPoly) -> Result<Scalar> {
        // ω^m/m! is the coordinate volume on the standard torus
        let vol = self.geom.volume_form().top_component(&self.ring);
        self.ring.integrate_dv(&self.ring.mul(f, &vol))
    }
}

/// A totally symmetric lowered 3-tensor with a single generator placed into
/// every index permutation of (i,j,k).
pub fn symmetric_three_tensor(
    ring: &TrigRing,
    entries: &[((usize, usize, usize), TrigPoly)],
) -> Vec<Vec<Vec<TrigPoly>>> {
    let n = ring.n;
    let mut t = vec![vec![vec![ring.zero(); n]; n]; n];
    for ((i, j, k), v) in entries {
        let perms = [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ];
        let mut seen: Vec<(usize, usize, usize)> = Vec::new();
        for (a, b, c) in perms {
            if seen.contains(&(*a, *b, *c)) {
                continue;
            }
            seen.push((*a, *b, *c));
            t[*a][*b][*c] = ring.add(&t[*a][*b][*c], v);
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Toric S²
// ---------------------------------------------------------------------------

/// Toric S² model in moment/angle coordinates (z, θ):
/// ω = dz∧dθ, metric g = φ⁻¹dz² + φdθ², Levi-Civita connection, and the
/// formal 2-form Ω = ν·k·Ric(ω).
#[derive(Clone, Debug)]
pub struct KahlerModelS2 {
    pub ring: ProfileRing,
    pub geom: ChartGeometry<ProfileRing>,
    pub phi: RationalFn,
    pub k: Rat,
    /// Relative tolerance for quadrature-backed integrals.
    pub quad_tol: f64,
}

/// Build the toric S² model from the profile polynomial φ (coefficients in
/// ascending powers of z) and the Ricci coupling k.
///
/// Admissibility (φ(±1) = 0, φ′(−1) = 2, φ′(1) = −2, φ > 0 inside) is what
/// makes the chart close up into a round-topology sphere; each condition is
/// checked exactly, positivity on a sample grid.
pub fn build_s2(phi_coeffs: &[Rat], k: Rat) -> Result<KahlerModelS2> {
    let ring = ProfileRing;
    let phi = ring.from_poly_rats(phi_coeffs);
    let phi_poly = phi.to_poly().ok_or_else(|| {
        Error::ValidationFailed(vec!["profile must be polynomial".to_string()])
    })?;
    let dphi = phi_poly.derivative();
    let mut problems = Vec::new();
    let one = Rat::from_integer(1.into());
    if phi_poly.eval_rat(&one) != Scalar::zero() {
        problems.push("φ(1) ≠ 0".to_string());
    }
    if phi_poly.eval_rat(&(-one.clone())) != Scalar::zero() {
        problems.push("φ(-1) ≠ 0".to_string());
    }
    if dphi.eval_rat(&(-one.clone())) != Scalar::from_int(2) {
        problems.push("φ'(-1) ≠ 2".to_string());
    }
    if dphi.eval_rat(&one) != Scalar::from_int(-2) {
        problems.push("φ'(1) ≠ -2".to_string());
    }
    for i in -9..=9i64 {
        let z = rat(i, 10);
        let v = phi_poly.eval_rat(&z).as_rat().unwrap_or_else(Rat::zero);
        if !v.is_positive() {
            problems.push(format!("φ({i}/10) ≤ 0"));
        }
    }
    if !problems.is_empty() {
        return Err(Error::ValidationFailed(problems));
    }

    let metric = standard_metric(&ring, 1);
    // metric g = diag(1/φ, φ); Levi-Civita symbols via the standard formula
    // with only z-derivatives surviving.
    let inv_phi = ring.div(&ring.one(), &phi);
    let g = [inv_phi.clone(), phi.clone()];
    let ginv = [phi.clone(), inv_phi.clone()];
    let dg = [
        ring.derivative(&g[0], 0)?, // (1/φ)'
        ring.derivative(&g[1], 0)?, // φ'
    ];
    let mut gamma = vec![vec![vec![ring.zero(); 2]; 2]; 2];
    // Γ^k_{ij} = ½ g^{kk}(∂_i g_{kj} + ∂_j g_{ki} − ∂_k g_{ij}), diagonal g
    let half = rat(1, 2);
    gamma[0][0][0] = ring.scale_rat(&half, &ring.mul(&ginv[0], &dg[0]));
    gamma[0][1][1] = ring.scale_rat(&half, &ring.neg(&ring.mul(&ginv[0], &dg[1])));
    let g101 = ring.scale_rat(&half, &ring.mul(&ginv[1], &dg[1]));
    gamma[1][0][1] = g101.clone();
    gamma[1][1][0] = g101;

    let geom_no_omega = ChartGeometry::new(ring.clone(), 1, metric.clone(), gamma.clone(), vec![])?;
    geom_no_omega.validate()?;

    // Ω = ν·k·Ric(ω)
    let alphas = if k.is_zero() {
        vec![]
    } else {
        let rf = ricci_form_of(&geom_no_omega, &phi)?;
        vec![vec![
            vec![ring.zero(), ring.scale_rat(&k, &rf)],
            vec![ring.neg(&ring.scale_rat(&k, &rf)), ring.zero()],
        ]]
    };
    let geom = ChartGeometry::new(ring.clone(), 1, metric, gamma, alphas)?;
    geom.validate()?;
    Ok(KahlerModelS2 {
        ring,
        geom,
        phi,
        k,
        quad_tol: 1e-12,
    })
}

/// The dz∧dθ component of Ric(ω) = Ric(J·,·).
fn ricci_form_of(geom: &ChartGeometry<ProfileRing>, phi: &RationalFn) -> Result<RationalFn> {
    let r = &geom.ring;
    // (Ric(ω))_{01} = Ric(J∂_z, ∂_θ) with J∂_z = φ⁻¹ ∂_θ
    let inv_phi = r.div(&r.one(), phi);
    Ok(r.mul(&inv_phi, &geom.ricci[1][1]))
}

impl KahlerModelS2 {
    /// Scalar curvature S = g^{ij} Ric_{ij}.
    pub fn scalar_curvature(&self) -> RationalFn {
        let r = &self.ring;
        let inv_phi = r.div(&r.one(), &self.phi);
        let a = r.mul(&self.phi, &self.geom.ricci[0][0]);
        let b = r.mul(&inv_phi, &self.geom.ricci[1][1]);
        r.add(&a, &b)
    }

    /// The dz∧dθ component of the Ricci form.
    pub fn ricci_form(&self) -> Result<RationalFn> {
        ricci_form_of(&self.geom, &self.phi)
    }

    /// Geometer's (positive) Laplacian: Δf = −(φ f′)′ for circle-invariant f.
    pub fn laplacian(&self, f: &RationalFn) -> Result<RationalFn> {
        let r = &self.ring;
        let df = r.derivative(f, 0)?;
        let flux = r.mul(&self.phi, &df);
        Ok(r.neg(&r.derivative(&flux, 0)?))
    }

    /// The rotation field X = ∂/∂θ (constant components).
    pub fn rotation_field(&self) -> Vec<RationalFn> {
        vec![self.ring.zero(), self.ring.one()]
    }

    /// Quadrature ∫ f ω with doubling-certified tolerance: 2π ∫_{-1}^{1} f dz.
    pub fn integrate_quad(&self, f: &RationalFn) -> Result<f64> {
        let g = |z: f64| f.eval_f64(z);
        let v = quad::integrate_adaptive(&g, 8, self.quad_tol)?;
        Ok(std::f64::consts::TAU * v)
    }

    /// Quadrature ∫ of a 2-form given by its dz∧dθ component.
    pub fn integrate_quad_2form(&self, comp: &RationalFn) -> Result<f64> {
        self.integrate_quad(comp)
    }
}

impl SymplecticModel for KahlerModelS2 {
    type Ring = ProfileRing;
    fn ring(&self) -> &ProfileRing {
        &self.ring
    }
    fn geometry(&self) -> &ChartGeometry<ProfileRing> {
        &self.geom
    }
    /// Exact for polynomial integrands (ω/1! is the coordinate volume).
    fn integrate_top(&self, f: &RationalFn) -> Result<Scalar> {
        self.ring.integrate_dv(f)
    }
}

/// The round profile 1 − z².
pub fn round_profile() -> Vec<Rat> {
    vec![rat(1, 1), rat(0, 1), rat(-1, 1)]
}

/// Admissible perturbed profiles in the round class:
/// φ = (1 − z²)(1 + ε·z·(1 − z²)·p(z)) stays admissible for small ε because
/// the correction and its first derivative vanish at z = ±1.
pub fn perturbed_profile(eps: Rat, p: &[Rat]) -> Vec<Rat> {
    let ring = ProfileRing;
    let round = ring.from_poly_rats(&round_profile());
    let z = ring.z();
    let zp = ring.mul(&z, &ring.from_poly_rats(p));
    let corr = ring.scale_rat(&eps, &ring.mul(&round, &zp));
    let total = ring.mul(&round, &ring.add(&ring.one(), &corr));
    let poly = total.to_poly().expect("product of polynomials");
    poly_coeffs(&poly)
}

fn poly_coeffs(p: &Poly) -> Vec<Rat> {
    p.0.iter()
        .map(|c| c.as_rat().expect("rational profile coefficients"))
        .collect()
}
