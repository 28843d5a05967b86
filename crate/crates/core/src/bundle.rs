//! Trivialized Hermitian bundles over flat `ℍⁿ` charts: connections,
//! curvature, and the hyperholomorphic / `ℍ`-hyperholomorphic tests.
//!
//! The fiber is `ℝ^{4k} ≅ ℍ^k` with complex structure `I_f` given by left
//! multiplication by `i` and quaternionic structure `𝒥_fib` by left
//! multiplication by `j`; the fiber metric is the identity. A connection is
//! `∇ = d + A` with `A = Σ_μ A_μ dx_μ`, each `A_μ` a real `4k × 4k` matrix.
//! `Sp(k)`-valued connections act by right quaternionic multiplication.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::Form;
use crate::jet::{seed, Real};
use crate::linalg::Mat;
use crate::pointwise::{type_component, weight_decompose, Hypercomplex};
use crate::quaternion::{qconj, qmul, right_matrix_generic};
use crate::report::{relative, worst, Record, VerificationReport};

#[derive(Debug, Error, PartialEq)]
pub enum BundleError {
    #[error("unknown bundle {0:?}; known: flat, tangent, bpst, direct-sum(F,F*), nonholo-demo")]
    UnknownBundle(String),
    #[error("base dimension n must be at least 1")]
    EmptyBase,
}

/// Built-in connections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConnectionKind {
    /// Trivial line of quaternions, `A = 0`.
    Flat,
    /// `TM` of flat `ℍⁿ` with the flat connection.
    Tangent,
    /// BPST instanton of scale `λ` pulled back from the first `ℍ` factor.
    Bpst { scale: f64 },
    /// `F ⊕ F*` for a line bundle `F` with anti-self-dual curvature of strength `s`.
    DirectSum { strength: f64 },
    /// `A = x_1 dx_0 ⊗ R_i`, whose curvature is not of type (1,1) for `J`.
    NonholoDemo,
}

impl ConnectionKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::Tangent => "tangent",
            Self::Bpst { .. } => "bpst",
            Self::DirectSum { .. } => "direct-sum(F,F*)",
            Self::NonholoDemo => "nonholo-demo",
        }
    }
}

impl FromStr for ConnectionKind {
    type Err = BundleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "flat" => Ok(Self::Flat),
            "tangent" | "TM" => Ok(Self::Tangent),
            "bpst" => Ok(Self::Bpst { scale: 1.0 }),
            "direct-sum(F,F*)" | "direct-sum" => Ok(Self::DirectSum { strength: 1.0 }),
            "nonholo-demo" => Ok(Self::NonholoDemo),
            other => Err(BundleError::UnknownBundle(other.into())),
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    n: usize,
    k: usize,
    kind: ConnectionKind,
}

fn imag<R: Real>(v: [R; 4]) -> [R; 4] {
    [R::zero(), v[1], v[2], v[3]]
}

fn unit<R: Real>(mu: usize) -> [R; 4] {
    let mut e = [R::zero(); 4];
    e[mu] = R::one();
    e
}

impl ConnectionData {
    pub fn new(kind: ConnectionKind, n: usize) -> Result<Self, BundleError> {
        if n == 0 {
            return Err(BundleError::EmptyBase);
        }
        let k = if kind == ConnectionKind::Tangent { n } else { 1 };
        Ok(Self { n, k, kind })
    }

    pub fn from_name(name: &str, n: usize) -> Result<Self, BundleError> {
        Self::new(name.parse()?, n)
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Quaternionic dimension of the base.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Quaternionic rank of the fiber (complex rank `2k`).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base_dim(&self) -> usize {
        4 * self.n
    }

    pub fn fiber_dim(&self) -> usize {
        4 * self.k
    }

    /// `(I_f, 𝒥_fib, K_f)` on the fiber.
    pub fn fiber_structure(&self) -> Hypercomplex<f64> {
        Hypercomplex::flat(self.k)
    }

    pub fn base_structure(&self) -> Hypercomplex<f64> {
        Hypercomplex::flat(self.n)
    }

    /// `A_μ(m)` for `μ = 0..4n`.
    pub fn a_matrices<R: Real>(&self, m: &[R]) -> Vec<Mat<R>> {
        let f = self.fiber_dim();
        let mut out = vec![Mat::zeros(f, f); self.base_dim()];
        match self.kind {
            ConnectionKind::Flat | ConnectionKind::Tangent => {}
            ConnectionKind::Bpst { scale } => {
                // A_μ = R(β_μ), β = Im(dq̄ q) / (λ² + |q|²).
                let q = [m[0], m[1], m[2], m[3]];
                let denom = R::from_f64(scale * scale) + q.iter().fold(R::zero(), |a, &x| a + x * x);
                for (mu, slot) in out.iter_mut().take(4).enumerate() {
                    let beta = imag(qmul(qconj(unit::<R>(mu)), q)).map(|x| x / denom);
                    *slot = right_matrix_generic(beta);
                }
            }
            ConnectionKind::DirectSum { strength } => {
                // a = s(x0 dx1 − x1 dx0 − x2 dx3 + x3 dx2)/2 + d(x0 x2 x3), A = a ⊗ R_i.
                let s = R::from_f64(strength / 2.0);
                let a = [
                    -s * m[1] + m[2] * m[3],
                    s * m[0],
                    s * m[3] + m[0] * m[3],
                    -s * m[2] + m[0] * m[2],
                ];
                let ri = right_matrix_generic([R::zero(), R::one(), R::zero(), R::zero()]);
                for mu in 0..4 {
                    out[mu] = ri.scale(a[mu]);
                }
            }
            ConnectionKind::NonholoDemo => {
                out[0] = right_matrix_generic([R::zero(), R::one(), R::zero(), R::zero()]).scale(m[1]);
            }
        }
        out
    }

    /// `A(v) = Σ v_μ A_μ`.
    pub fn a_of<R: Real>(&self, m: &[R], v: &[R]) -> Mat<R> {
        let f = self.fiber_dim();
        self.a_matrices(m).iter().zip(v).fold(Mat::zeros(f, f), |acc, (a, &c)| &acc + &a.scale(c))
    }

    /// `Θ_μν = ∂_μ A_ν − ∂_ν A_μ + [A_μ, A_ν]`, exact through jets.
    pub fn curvature_components<R: Real>(&self, m: &[R]) -> Vec<Vec<Mat<R>>> {
        let n = self.base_dim();
        let a = self.a_matrices(m);
        let da: Vec<Vec<Mat<R>>> = (0..n)
            .map(|mu| self.a_matrices(&seed(m, mu)).into_iter().map(|x| x.map(|d| d.eps)).collect())
            .collect();
        (0..n)
            .map(|mu| {
                (0..n)
                    .map(|nu| &(&da[mu][nu] - &da[nu][mu]) + &a[mu].commutator(&a[nu]))
                    .collect()
            })
            .collect()
    }

    pub fn curvature(&self, m: &[f64]) -> CurvatureElement {
        CurvatureElement { point: m.to_vec(), components: self.curvature_components(m) }
    }

    /// `max |cyclic(∂_λ Θ_μν + [A_λ, Θ_μν])|`, the Bianchi identity residual.
    pub fn bianchi_residual(&self, m: &[f64]) -> f64 {
        let n = self.base_dim();
        let theta = self.curvature_components(m);
        let a = self.a_matrices(m);
        let dtheta: Vec<Vec<Vec<Mat<f64>>>> = (0..n)
            .map(|l| {
                self.curvature_components(&seed(m, l))
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| x.map(|d| d.eps)).collect())
                    .collect()
            })
            .collect();
        let term = |l: usize, mu: usize, nu: usize| &dtheta[l][mu][nu] + &a[l].commutator(&theta[mu][nu]);
        let mut worst_val = 0.0f64;
        for l in 0..n {
            for mu in (l + 1)..n {
                for nu in (mu + 1)..n {
                    let s = &(&term(l, mu, nu) + &term(mu, nu, l)) + &term(nu, l, mu);
                    worst_val = worst_val.max(s.max_abs());
                }
            }
        }
        worst_val
    }
}

/// Curvature at a point: `Θ = Σ_{μ<ν} Θ_μν dx_μ ∧ dx_ν` with matrix values.
#[derive(Clone, Debug)]
pub struct CurvatureElement {
    pub point: Vec<f64>,
    pub components: Vec<Vec<Mat<f64>>>,
}

impl CurvatureElement {
    pub fn base_dim(&self) -> usize {
        self.components.len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.components[0][0].rows()
    }

    /// The real 2-form `Θ^a_b`.
    pub fn entry_form(&self, a: usize, b: usize) -> Form<f64> {
        let n = self.base_dim();
        Form::from_antisymmetric(&Mat::from_fn(n, n, |mu, nu| self.components[mu][nu][(a, b)]))
    }

    /// `Θ(v, w) = Σ v_μ w_ν Θ_μν`.
    pub fn value(&self, v: &[f64], w: &[f64]) -> Mat<f64> {
        let f = self.fiber_dim();
        let mut out = Mat::zeros(f, f);
        for (mu, row) in self.components.iter().enumerate() {
            for (nu, t) in row.iter().enumerate() {
                out = &out + &t.scale(v[mu] * w[nu]);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, t| m.max(t.max_abs()))
    }

    /// Largest `(2,0) + (0,2)` component over all entries and `L ∈ {I, J, K}`.
    pub fn non_11_residual(&self, base: &Hypercomplex<f64>) -> f64 {
        let f = self.fiber_dim();
        let mut out = 0.0f64;
        for a in 0..f {
            for b in 0..f {
                let form = self.entry_form(a, b).complexify();
                for l in [&base.i, &base.j, &base.k] {
                    out = out
                        .max(type_component(&form, l, 2, 0).max_norm())
                        .max(type_component(&form, l, 0, 2).max_norm());
                }
            }
        }
        out
    }

    /// Largest component of nonzero su(2) weight over all entries.
    pub fn non_invariant_residual(&self, base: &Hypercomplex<f64>) -> f64 {
        let f = self.fiber_dim();
        let mut out = 0.0f64;
        for a in 0..f {
            for b in 0..f {
                let form = self.entry_form(a, b).complexify();
                let d = weight_decompose(base, &form).expect("flat Casimir is exact");
                for (w, c) in &d.components {
                    if *w != 0 {
                        out = out.max(c.max_norm());
                    }
                }
            }
        }
        out
    }
}

/// Hodge star on `Λ²(ℝ⁴)` for the orientation `dx_0 ∧ dx_1 ∧ dx_2 ∧ dx_3`.
pub fn hodge_star_2(w: &Mat<f64>) -> Mat<f64> {
    let mut out = Mat::zeros(4, 4);
    let pairs = [((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2))];
    for ((a, b), (c, d)) in pairs {
        out[(c, d)] = w[(a, b)];
        out[(d, c)] = -w[(a, b)];
        out[(a, b)] = w[(c, d)];
        out[(b, a)] = -w[(c, d)];
    }
    out
}

fn scale_of(points: &[Vec<f64>], c: &ConnectionData) -> Vec<(f64, f64, f64)> {
    let base = c.base_structure();
    points
        .par_iter()
        .map(|m| {
            let theta = c.curvature(m);
            let s = theta.max_abs();
            (relative(theta.non_11_residual(&base), s), relative(theta.non_invariant_residual(&base), s), s)
        })
        .collect()
}

/// Type (1,1) for each of `I, J, K`, and su(2)-invariance, at every point.
pub fn hyperholomorphic_check(c: &ConnectionData, points: &[Vec<f64>], tol: f64) -> VerificationReport {
    let per_point = scale_of(points, c);
    let r11 = worst(per_point.iter().map(|p| p.0));
    let rinv = worst(per_point.iter().map(|p| p.1));
    let disagreements = per_point.iter().filter(|p| (p.0 <= tol) != (p.1 <= tol)).count();
    let name = c.name();
    VerificationReport::new(
        "bundle",
        vec![
            Record::residual(
                &format!("bundle.{name}.curvature_11_ijk"),
                "Θ of type (1,1) for I, J and K",
                points.len(),
                r11,
                tol,
            ),
            Record::residual(
                &format!("bundle.{name}.curvature_su2_invariant"),
                "Θ is SU(2)-invariant (pure weight 0)",
                points.len(),
                rinv,
                tol,
            ),
            Record::residual(
                &format!("bundle.{name}.criteria_agree"),
                "(1,1) for I,J,K ⟺ SU(2)-invariant",
                points.len(),
                disagreements as f64,
                0.0,
            ),
        ],
    )
}

/// Commutators with the fiber structures, relative to `1 + |X|`.
fn sp_residual(x: &Mat<f64>, fiber: &Hypercomplex<f64>) -> f64 {
    let skew = (&x.transpose() + x).max_abs();
    let ci = x.commutator(&fiber.i).max_abs();
    let cj = x.commutator(&fiber.j).max_abs();
    relative(skew.max(ci).max(cj), x.max_abs())
}

/// Infinitesimal `Sp(k)` condition on `A` and `Θ`.
pub fn h_hyperholomorphic_check(c: &ConnectionData, points: &[Vec<f64>], tol: f64) -> VerificationReport {
    let fiber = c.fiber_structure();
    let (ra, rt): (Vec<f64>, Vec<f64>) = points
        .par_iter()
        .map(|m| {
            let a = worst(c.a_matrices(m).iter().map(|x| sp_residual(x, &fiber)));
            let t = worst(c.curvature(m).components.iter().flatten().map(|x| sp_residual(x, &fiber)));
            (a, t)
        })
        .unzip();
    let name = c.name();
    VerificationReport::new(
        "bundle",
        vec![
            Record::residual(
                &format!("bundle.{name}.connection_sp"),
                "A skew, commutes with I_f and 𝒥_fib",
                points.len(),
                worst(ra),
                tol,
            ),
            Record::residual(
                &format!("bundle.{name}.curvature_sp"),
                "Θ skew, commutes with I_f and 𝒥_fib",
                points.len(),
                worst(rt),
                tol,
            ),
        ],
    )
}

/// Bianchi identity at every point.
pub fn bianchi_check(c: &ConnectionData, points: &[Vec<f64>], tol: f64) -> VerificationReport {
    let r = worst(points.par_iter().map(|m| c.bianchi_residual(m)).collect::<Vec<_>>());
    VerificationReport::new(
        "bundle",
        vec![Record::residual(&format!("bundle.{}.bianchi", c.name()), "dΘ = Θ∧A − A∧Θ", points.len(), r, tol)],
    )
}
