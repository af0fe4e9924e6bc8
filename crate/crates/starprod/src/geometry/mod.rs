//! Chart-level symplectic data: the symplectic form and its inverse,
//! symplectic connections, curvature and Ricci tensors, the formal 2-form Ω,
//! the Cahen–Gutt momentum, and the Γ̄ / R̄ lifts into the Weyl bundle.

pub mod forms;
pub mod models;

use crate::error::{Error, Result};
use crate::ring::CoeffRing;
use crate::scalar::{rat, Rat};
use crate::weyl::{Caps, FiberMetric, TermKey, WeylSection};
use forms::KForm;

/// One chart of a symplectic model: everything is a ring element over the
/// chart's coefficient ring. Derived curvature tensors are computed eagerly.
#[derive(Clone, Debug)]
pub struct ChartGeometry<R: CoeffRing> {
    pub ring: R,
    /// Half-dimension; the chart has n = 2m coordinates.
    pub m: usize,
    pub metric: FiberMetric<R>,
    /// Christoffel symbols Γ^k_{ij}, symmetric in (i,j): `gamma[k][i][j]`.
    pub gamma: Vec<Vec<Vec<R::Elem>>>,
    /// ν-expansion of Ω: `alphas[r]` is the antisymmetric matrix of α_{r+1},
    /// so Ω = Σ ν^{r+1}·(½ α_{r+1,ij} dx^i ∧ dx^j).
    pub alphas: Vec<Vec<Vec<R::Elem>>>,
    /// Curvature R^r_{jkl} = ∂_k Γ^r_{lj} − ∂_l Γ^r_{kj} + Γ^r_{kp}Γ^p_{lj} −
    /// Γ^r_{lp}Γ^p_{kj}; the convention is pinned by the operator identity
    /// ∂² = (1/ν)[R̄,·], which is enforced by test.
    pub riemann: Vec<Vec<Vec<Vec<R::Elem>>>>,
    /// Ric_{ij} = Σ_p R^p_{jpi} (the trace of V ↦ R(V,·)·).
    pub ricci: Vec<Vec<R::Elem>>,
}

impl<R: CoeffRing> ChartGeometry<R> {
    pub fn new(
        ring: R,
        m: usize,
        metric: FiberMetric<R>,
        gamma: Vec<Vec<Vec<R::Elem>>>,
        alphas: Vec<Vec<Vec<R::Elem>>>,
    ) -> Result<Self> {
        let n = 2 * m;
        if metric.omega.len() != n || gamma.len() != n {
            return Err(Error::DimensionMismatch(metric.omega.len(), n));
        }
        let (riemann, ricci) = curvature_from_christoffel(&ring, &gamma);
        Ok(ChartGeometry {
            ring,
            m,
            metric,
            gamma,
            alphas,
            riemann,
            ricci,
        })
    }

    pub fn n(&self) -> usize {
        2 * self.m
    }

    /// ω as a scalar 2-form.
    pub fn omega_form(&self) -> KForm<R> {
        KForm::from_two_form(&self.ring, &self.metric.omega)
    }

    pub fn alpha_form(&self, order: usize) -> KForm<R> {
        match self.alphas.get(order - 1) {
            Some(a) => KForm::from_two_form(&self.ring, a),
            None => KForm::zero(self.n()),
        }
    }

    /// ω^m / m!, the Liouville volume form.
    pub fn volume_form(&self) -> KForm<R> {
        let mut v = self.omega_form().wedge_power(&self.ring, self.m);
        let mut inv_fact = Rat::from_integer(1.into());
        for k in 2..=self.m as i64 {
            inv_fact /= rat(k, 1);
        }
        v = v.scale_elem(&self.ring, &self.ring.rat(&inv_fact));
        v
    }

    /// Named exactness/symmetry checks; every violated condition is reported.
    pub fn validate(&self) -> Result<()> {
        let r = &self.ring;
        let n = self.n();
        let mut problems = Vec::new();
        if let Err(Error::ValidationFailed(mut v)) = self.metric.validate(r) {
            problems.append(&mut v);
        }
        match self.omega_form().d(r) {
            Ok(d) if !d.is_zero() => problems.push("dω ≠ 0".to_string()),
            Err(e) => problems.push(format!("dω check failed: {e}")),
            _ => {}
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if self.gamma[k][i][j] != self.gamma[k][j][i] {
                        problems.push(format!("Γ^{k}_{{{i}{j}}} not symmetric in lower indices"));
                    }
                }
            }
        }
        // ω_{iℓ}Γ^ℓ_{jk} totally symmetric in i, j, k
        let t = self.lowered_gamma();
        'sym: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if t[i][j][k] != t[j][i][k] || t[i][j][k] != t[i][k][j] {
                        problems.push("ω_{iℓ}Γ^ℓ_{jk} not totally symmetric".to_string());
                        break 'sym;
                    }
                }
            }
        }
        // ∇ω = 0 componentwise
        'nabla: for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = match r.derivative(&self.metric.omega[i][j], k) {
                        Ok(d) => d,
                        Err(e) => {
                            problems.push(format!("∇ω check failed: {e}"));
                            break 'nabla;
                        }
                    };
                    for p in 0..n {
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][i], &self.metric.omega[p][j]));
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][j], &self.metric.omega[i][p]));
                    }
                    if !r.is_zero(&acc) {
                        problems.push(format!("(∇ω)_{{{k};{i}{j}}} ≠ 0"));
                        break 'nabla;
                    }
                }
            }
        }
        for (idx, a) in self.alphas.iter().enumerate() {
            let f = KForm::from_two_form(r, a);
            match f.d(r) {
                Ok(d) if !d.is_zero() => problems.push(format!("α_{} not closed", idx + 1)),
                Err(e) => problems.push(format!("α_{} closedness check failed: {e}", idx + 1)),
                _ => {}
            }
            for i in 0..n {
                for j in 0..n {
                    if !r.is_zero(&r.add(&a[i][j], &a[j][i])) {
                        problems.push(format!("α_{} not antisymmetric", idx + 1));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            problems.dedup();
            Err(Error::ValidationFailed(problems))
        }
    }

    /// T_{ijk} = ω_{iℓ} Γ^ℓ_{jk}.
    pub fn lowered_gamma(&self) -> Vec<Vec<Vec<R::Elem>>> {
        let r = &self.ring;
        let n = self.n();
        let mut t = vec![vec![vec![r.zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = r.zero();
                    for l in 0..n {
                        acc = r.add(&acc, &r.mul(&self.metric.omega[i][l], &self.gamma[l][j][k]));
                    }
                    t[i][j][k] = acc;
                }
            }
        }
        t
    }

    /// Γ̄ = ½ ω_{ℓk} Γ^k_{ij} y^ℓ y^j dx^i as a Weyl section.
    pub fn gamma_bar(&self, caps: Caps) -> WeylSection<R> {
        gamma_bar_of(&self.ring, &self.lowered_gamma(), caps)
    }

    /// R̄ = ¼ ω_{ir} R^r_{jkl} y^i y^j dx^k ∧ dx^l as a Weyl section.
    pub fn r_bar(&self, caps: Caps) -> WeylSection<R> {
        let r = &self.ring;
        let n = self.n();
        let mut out = WeylSection::zero(n, caps);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in (k + 1)..n {
                        // R antisymmetric in (k,l): the k<l slot carries ½ω_{ir}R^r_{jkl}
                        let mut c = r.zero();
                        for rr in 0..n {
                            c = r.add(&c, &r.mul(&self.metric.omega[i][rr], &self.riemann[rr][j][k][l]));
                        }
                        if r.is_zero(&c) {
                            continue;
                        }
                        let mut ys = vec![0u8; n];
                        ys[i] += 1;
                        ys[j] += 1;
                        out.insert_term(
                            r,
                            TermKey {
                                nu: 0,
                                ys,
                                dx: (1 << k) | (1 << l),
                            },
                            r.scale_rat(&rat(1, 2), &c),
                        );
                    }
                }
            }
        }
        out
    }

    /// ω = ½ ω_{ij} dx^i ∧ dx^j as a central Weyl section.
    pub fn omega_weyl(&self, caps: Caps) -> WeylSection<R> {
        two_form_weyl(&self.ring, &self.metric.omega, 0, caps)
    }

    /// Ω = Σ_r ν^r α_r as a central Weyl section.
    pub fn omega_series_weyl(&self, caps: Caps) -> WeylSection<R> {
        let r = &self.ring;
        let n = self.n();
        let mut out = WeylSection::zero(n, caps);
        for (idx, a) in self.alphas.iter().enumerate() {
            out = out.add(r, &two_form_weyl(r, a, (idx + 1) as u32, caps));
        }
        out
    }

    /// Hamiltonian vector field components: X_f^k = Λ^{ik} ∂_i f,
    /// i.e. i(X_f)ω = df.
    pub fn hamiltonian_field(&self, f: &R::Elem) -> Result<Vec<R::Elem>> {
        let r = &self.ring;
        let n = self.n();
        let mut x = vec![r.zero(); n];
        for k in 0..n {
            let mut acc = r.zero();
            for i in 0..n {
                acc = r.add(&acc, &r.mul(&self.metric.lambda[i][k], &r.derivative(f, i)?));
            }
            x[k] = acc;
        }
        Ok(x)
    }

    /// {f,g} = Λ^{ij} ∂_i f ∂_j g = −ω(X_f, X_g).
    pub fn poisson(&self, f: &R::Elem, g: &R::Elem) -> Result<R::Elem> {
        let r = &self.ring;
        let n = self.n();
        let mut acc = r.zero();
        for i in 0..n {
            for j in 0..n {
                if r.is_zero(&self.metric.lambda[i][j]) {
                    continue;
                }
                let t = r.mul(&r.derivative(f, i)?, &r.derivative(g, j)?);
                acc = r.add(&acc, &r.mul(&self.metric.lambda[i][j], &t));
            }
        }
        Ok(acc)
    }

    /// Covariant Hessian ∇²_{ij} f = ∂_i∂_j f − Γ^k_{ij} ∂_k f.
    pub fn hessian(&self, f: &R::Elem) -> Result<Vec<Vec<R::Elem>>> {
        let r = &self.ring;
        let n = self.n();
        let mut h = vec![vec![r.zero(); n]; n];
        for i in 0..n {
            let di = r.derivative(f, i)?;
            for j in 0..n {
                let mut acc = r.derivative(&di, j)?;
                for k in 0..n {
                    acc = r.sub(&acc, &r.mul(&self.gamma[k][i][j], &r.derivative(f, k)?));
                }
                h[i][j] = acc;
            }
        }
        Ok(h)
    }

    /// (∇_k α)_{ij} for an antisymmetric 2-tensor α.
    pub fn nabla_two_form(&self, a: &[Vec<R::Elem>]) -> Result<Vec<Vec<Vec<R::Elem>>>> {
        let r = &self.ring;
        let n = self.n();
        let mut out = vec![vec![vec![r.zero(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = r.derivative(&a[i][j], k)?;
                    for p in 0..n {
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][i], &a[p][j]));
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][j], &a[i][p]));
                    }
                    out[k][i][j] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Lie derivative of the connection along X, as the (1,2)-tensor
    /// (L_X∇)^k_{ij} = X^p ∂_p Γ^k_{ij} − Γ^p_{ij} ∂_p X^k + Γ^k_{pj} ∂_i X^p
    /// + Γ^k_{ip} ∂_j X^p + ∂_i ∂_j X^k.
    pub fn lie_connection(&self, x: &[R::Elem]) -> Result<Vec<Vec<Vec<R::Elem>>>> {
        let r = &self.ring;
        let n = self.n();
        let mut out = vec![vec![vec![r.zero(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = r.zero();
                    for p in 0..n {
                        acc = r.add(&acc, &r.mul(&x[p], &r.derivative(&self.gamma[k][i][j], p)?));
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][i][j], &r.derivative(&x[k], p)?));
                        acc = r.add(&acc, &r.mul(&self.gamma[k][p][j], &r.derivative(&x[p], i)?));
                        acc = r.add(&acc, &r.mul(&self.gamma[k][i][p], &r.derivative(&x[p], j)?));
                    }
                    let dij = r.derivative(&r.derivative(&x[k], i)?, j)?;
                    out[k][i][j] = r.add(&acc, &dij);
                }
            }
        }
        Ok(out)
    }

    /// L_X∇ lowered with ω: (L_X∇)_{ℓij} = ω_{ℓk}(L_X∇)^k_{ij}. Totally
    /// symmetric for symplectic X and ∇.
    pub fn lie_connection_lowered(&self, x: &[R::Elem]) -> Result<Vec<Vec<Vec<R::Elem>>>> {
        let r = &self.ring;
        let n = self.n();
        let up = self.lie_connection(x)?;
        let mut out = vec![vec![vec![r.zero(); n]; n]; n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = r.zero();
                    for k in 0..n {
                        acc = r.add(&acc, &r.mul(&self.metric.omega[l][k], &up[k][i][j]));
                    }
                    out[l][i][j] = acc;
                }
            }
        }
        Ok(out)
    }

    /// The Cahen–Gutt momentum
    /// μ(∇) = (∇²_{(p,q)} Ric)^{pq} − ½ Ric_{pq}Ric^{pq} + ¼ R_{pqrs}R^{pqrs},
    /// all indices raised with Λ (left slot first) and the curvature lowered
    /// with ω. The sign of the ∇² term is pinned by the trace-property test.
    pub fn cahen_gutt_momentum(&self) -> Result<R::Elem> {
        let r = &self.ring;
        let n = self.n();
        let lam = &self.metric.lambda;
        let om = &self.metric.omega;

        // ∇Ric
        let mut dric = vec![vec![vec![r.zero(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = r.derivative(&self.ricci[i][j], k)?;
                    for p in 0..n {
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][i], &self.ricci[p][j]));
                        acc = r.sub(&acc, &r.mul(&self.gamma[p][k][j], &self.ricci[i][p]));
                    }
                    dric[k][i][j] = acc;
                }
            }
        }
        // ∇²Ric, slots (l,k;i,j)
        let mut d2ric = vec![vec![vec![vec![r.zero(); n]; n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = r.derivative(&dric[k][i][j], l)?;
                        for p in 0..n {
                            acc = r.sub(&acc, &r.mul(&self.gamma[p][l][k], &dric[p][i][j]));
                            acc = r.sub(&acc, &r.mul(&self.gamma[p][l][i], &dric[k][p][j]));
                            acc = r.sub(&acc, &r.mul(&self.gamma[p][l][j], &dric[k][i][p]));
                        }
                        d2ric[l][k][i][j] = acc;
                    }
                }
            }
        }
        // (∇²Ric)^{pq}: contract derivative slots against Ricci slots via Λ
        let mut term1 = r.zero();
        for l in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let w = r.mul(&lam[l][a], &lam[k][b]);
                        if r.is_zero(&w) {
                            continue;
                        }
                        term1 = r.add(&term1, &r.mul(&w, &d2ric[l][k][a][b]));
                    }
                }
            }
        }
        // Ric_{pq}Ric^{pq}
        let mut term2 = r.zero();
        for p in 0..n {
            for q in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let w = r.mul(&lam[p][a], &lam[q][b]);
                        if r.is_zero(&w) {
                            continue;
                        }
                        let rr = r.mul(&self.ricci[p][q], &self.ricci[a][b]);
                        term2 = r.add(&term2, &r.mul(&w, &rr));
                    }
                }
            }
        }
        // R_{pqrs}R^{pqrs} with R lowered by ω on the left
        let mut rlow = vec![vec![vec![vec![r.zero(); n]; n]; n]; n];
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    for t in 0..n {
                        let mut acc = r.zero();
                        for u in 0..n {
                            acc = r.add(&acc, &r.mul(&om[p][u], &self.riemann[u][q][s][t]));
                        }
                        rlow[p][q][s][t] = acc;
                    }
                }
            }
        }
        let mut term3 = r.zero();
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    for t in 0..n {
                        if r.is_zero(&rlow[p][q][s][t]) {
                            continue;
                        }
                        for a in 0..n {
                            for b in 0..n {
                                for c in 0..n {
                                    for d in 0..n {
                                        let raised = r.mul(
                                            &r.mul(&lam[p][a], &lam[q][b]),
                                            &r.mul(&lam[s][c], &lam[t][d]),
                                        );
                                        if r.is_zero(&raised) {
                                            continue;
                                        }
                                        let prod = r.mul(&rlow[p][q][s][t], &rlow[a][b][c][d]);
                                        term3 = r.add(&term3, &r.mul(&raised, &prod));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let half = r.scale_rat(&rat(1, 2), &term2);
        let quarter = r.scale_rat(&rat(1, 4), &term3);
        Ok(r.add(&r.sub(&term1, &half), &quarter))
    }

    /// A new geometry with Γ replaced by Γ + Λ·T for a totally symmetric
    /// lowered 3-tensor T (the affine structure on symplectic connections).
    pub fn with_added_symmetric(&self, t_lowered: &[Vec<Vec<R::Elem>>]) -> Result<Self> {
        let r = &self.ring;
        let n = self.n();
        let mut gamma = self.gamma.clone();
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = gamma[l][j][k].clone();
                    for p in 0..n {
                        acc = r.add(&acc, &r.mul(&self.metric.lambda[l][p], &t_lowered[p][j][k]));
                    }
                    gamma[l][j][k] = acc;
                }
            }
        }
        ChartGeometry::new(
            self.ring.clone(),
            self.m,
            self.metric.clone(),
            gamma,
            self.alphas.clone(),
        )
    }
}

/// Curvature and Ricci from Christoffel symbols.
pub fn curvature_from_christoffel<R: CoeffRing>(
    ring: &R,
    gamma: &[Vec<Vec<R::Elem>>],
) -> (Vec<Vec<Vec<Vec<R::Elem>>>>, Vec<Vec<R::Elem>>) {
    let n = gamma.len();
    let mut riem = vec![vec![vec![vec![ring.zero(); n]; n]; n]; n];
    for rr in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = ring
                        .derivative(&gamma[rr][l][j], k)
                        .expect("derivative within chart dimension");
                    acc = ring.sub(
                        &acc,
                        &ring
                            .derivative(&gamma[rr][k][j], l)
                            .expect("derivative within chart dimension"),
                    );
                    for p in 0..n {
                        acc = ring.add(&acc, &ring.mul(&gamma[rr][k][p], &gamma[p][l][j]));
                        acc = ring.sub(&acc, &ring.mul(&gamma[rr][l][p], &gamma[p][k][j]));
                    }
                    riem[rr][j][k][l] = acc;
                }
            }
        }
    }
    let mut ric = vec![vec![ring.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = ring.zero();
            for p in 0..n {
                acc = ring.add(&acc, &riem[p][j][p][i]);
            }
            ric[i][j] = acc;
        }
    }
    (riem, ric)
}

/// ½ T_{ℓij} y^ℓ y^j dx^i from a lowered-Γ style 3-tensor.
pub fn gamma_bar_of<R: CoeffRing>(
    ring: &R,
    t: &[Vec<Vec<R::Elem>>],
    caps: Caps,
) -> WeylSection<R> {
    let n = t.len();
    let mut out = WeylSection::zero(n, caps);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                if ring.is_zero(&t[l][i][j]) {
                    continue;
                }
                let mut ys = vec![0u8; n];
                ys[l] += 1;
                ys[j] += 1;
                out.insert_term(
                    ring,
                    TermKey {
                        nu: 0,
                        ys,
                        dx: 1 << i,
                    },
                    ring.scale_rat(&rat(1, 2), &t[l][i][j]),
                );
            }
        }
    }
    out
}

/// ½ a_{ij} dx^i ∧ dx^j as a central Weyl section at ν-power `nu`.
pub fn two_form_weyl<R: CoeffRing>(
    ring: &R,
    a: &[Vec<R::Elem>],
    nu: u32,
    caps: Caps,
) -> WeylSection<R> {
    let n = a.len();
    let mut out = WeylSection::zero(n, caps);
    for i in 0..n {
        for j in (i + 1)..n {
            out.insert_term(
                ring,
                TermKey {
                    nu,
                    ys: vec![0; n],
                    dx: (1 << i) | (1 << j),
                },
                a[i][j].clone(),
            );
        }
    }
    out
}

/// A 1-form Σ c_i dx^i as a central Weyl section at ν-power `nu`.
pub fn one_form_weyl<R: CoeffRing>(
    ring: &R,
    c: &[R::Elem],
    nu: u32,
    caps: Caps,
) -> WeylSection<R> {
    let n = c.len();
    let mut out = WeylSection::zero(n, caps);
    for (i, ci) in c.iter().enumerate() {
        out.insert_term(
            ring,
            TermKey {
                nu,
                ys: vec![0; n],
                dx: 1 << i,
            },
            ci.clone(),
        );
    }
    out
}

/// The standard constant symplectic matrix on ℝ^{2m}: ω = Σ dx^{2i+1}∧dx^{2i+2}.
pub fn standard_metric<R: CoeffRing>(ring: &R, m: usize) -> FiberMetric<R> {
    let n = 2 * m;
    let mut omega = vec![vec![ring.zero(); n]; n];
    let mut lambda = vec![vec![ring.zero(); n]; n];
    for i in 0..m {
        omega[2 * i][2 * i + 1] = ring.one();
        omega[2 * i + 1][2 * i] = ring.from_int(-1);
        lambda[2 * i][2 * i + 1] = ring.from_int(-1);
        lambda[2 * i + 1][2 * i] = ring.one();
    }
    FiberMetric { omega, lambda }
}
