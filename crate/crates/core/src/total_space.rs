//! The total space of a bundle from [`crate::bundle`] as a chart
//! `ℝ^{4n} × ℝ^{4k}` with coordinates `(m, b)`.
//!
//! Horizontal lift `hor(v) = (v, −A(v) b)`. The adapted frame map
//! `P(v, w) = (v, w + A(v) b)` sends horizontal vectors to `ℝ^{4n} × 0` and
//! fixes vertical ones; in that frame the induced structures are the flat
//! `L ⊕ L_f` and the natural metric is the identity.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::bundle::ConnectionData;
use crate::exterior::Form;
use crate::fields::{Dolbeault, DolbeaultD, FormField, Function, PartialJ, ScalarField, StructureField};
use crate::hermitian::{canonical_form, hermitian_form, invariance_residual, MetricField};
use crate::jet::{seed, Real};
use crate::linalg::Mat;
use crate::pointwise::{
    cx, q_positive_check, raising_r, weight_decompose, ExteriorElement, Hypercomplex, Su2Generator,
};
use crate::quaternion::ImaginaryUnit;
use crate::report::{least, relative, worst, Record, Tolerances, VerificationReport};

#[derive(Clone, Debug)]
pub struct TotalSpaceChart {
    bundle: ConnectionData,
}

/// Horizontal / vertical decomposition of `T_{(m,b)} Tot B`.
#[derive(Clone, Debug)]
pub struct SplitTangent {
    pub point: Vec<f64>,
    /// Columns `hor(e_μ)`.
    pub horizontal: Mat<f64>,
    /// Columns `(0, e_i)`.
    pub vertical: Mat<f64>,
    pub proj_horizontal: Mat<f64>,
    pub proj_vertical: Mat<f64>,
}

/// Which part of the natural metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricPart {
    Full,
    Horizontal,
    Vertical,
}

/// `g`, `g_hor` or `g_ver` as a metric field.
#[derive(Clone, Copy, Debug)]
pub struct NaturalMetric<'a> {
    pub chart: &'a TotalSpaceChart,
    pub part: MetricPart,
}

/// `Ψ(m, b) = |b|²`.
#[derive(Clone, Copy, Debug)]
pub struct Psi {
    base_dim: usize,
    dim: usize,
}

impl ScalarField for Psi {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<R: Real>(&self, x: &[R]) -> Complex<R> {
        Complex::new(x[self.base_dim..].iter().fold(R::zero(), |a, &b| a + b * b), R::zero())
    }
}

impl TotalSpaceChart {
    pub fn new(bundle: ConnectionData) -> Self {
        Self { bundle }
    }

    pub fn bundle(&self) -> &ConnectionData {
        &self.bundle
    }

    pub fn base_dim(&self) -> usize {
        self.bundle.base_dim()
    }

    pub fn dim(&self) -> usize {
        self.bundle.base_dim() + self.bundle.fiber_dim()
    }

    /// `M` with column `μ` equal to `A_μ b`.
    fn tilt<R: Real>(&self, x: &[R]) -> Mat<R> {
        let (nb, f) = (self.base_dim(), self.bundle.fiber_dim());
        let a = self.bundle.a_matrices(&x[..nb]);
        let b = &x[nb..];
        let cols: Vec<Vec<R>> = a.iter().map(|am| am.mul_vec(b)).collect();
        Mat::from_fn(f, nb, |i, mu| cols[mu][i])
    }

    /// `P` (or `P⁻¹` when `inverse`).
    pub fn adapted_frame<R: Real>(&self, x: &[R], inverse: bool) -> Mat<R> {
        let nb = self.base_dim();
        let mut p = Mat::identity(self.dim());
        let m = self.tilt(x);
        p.set_block(nb, 0, &if inverse { m.scale(-R::one()) } else { m });
        p
    }

    fn flat_block<R: Real>(&self, l: &Mat<f64>, lf: &Mat<f64>) -> Mat<R> {
        let nb = self.base_dim();
        let mut out = Mat::zeros(self.dim(), self.dim());
        out.set_block(0, 0, &l.map(R::from_f64));
        out.set_block(nb, nb, &lf.map(R::from_f64));
        out
    }

    fn hat<R: Real>(&self, x: &[R], l: &Mat<f64>, lf: &Mat<f64>) -> Mat<R> {
        let p = self.adapted_frame(x, false);
        let pinv = self.adapted_frame(x, true);
        &(&pinv * &self.flat_block(l, lf)) * &p
    }

    /// `L̂` for any unit imaginary quaternion `L`.
    pub fn induced_complex_structure(&self, l: ImaginaryUnit, x: &[f64]) -> Mat<f64> {
        let base = self.bundle.base_structure().induced(l);
        let fiber = self.bundle.fiber_structure().induced(l);
        self.hat(x, &base, &fiber)
    }

    fn metric_part<R: Real>(&self, x: &[R], part: MetricPart) -> Mat<R> {
        let nb = self.base_dim();
        let d = self.dim();
        let p = self.adapted_frame(x, false);
        let mask = Mat::from_fn(d, d, |r, c| {
            let keep = r == c
                && match part {
                    MetricPart::Full => true,
                    MetricPart::Horizontal => r < nb,
                    MetricPart::Vertical => r >= nb,
                };
            if keep {
                R::one()
            } else {
                R::zero()
            }
        });
        &(&p.transpose() * &mask) * &p
    }

    /// `g = Pᵀ P`.
    pub fn natural_metric<R: Real>(&self, x: &[R]) -> Mat<R> {
        self.metric_part(x, MetricPart::Full)
    }

    pub fn metric_field(&self, part: MetricPart) -> NaturalMetric<'_> {
        NaturalMetric { chart: self, part }
    }

    pub fn psi_field(&self) -> Psi {
        Psi { base_dim: self.base_dim(), dim: self.dim() }
    }

    pub fn split(&self, x: &[f64]) -> SplitTangent {
        let (nb, d) = (self.base_dim(), self.dim());
        let pinv = self.adapted_frame(x, true);
        let p = self.adapted_frame(x, false);
        let horizontal = pinv.block(0, 0, d, nb);
        let vertical = pinv.block(0, nb, d, d - nb);
        let sel = |hor: bool| Mat::from_fn(d, d, |r, c| if r == c && (r < nb) == hor { 1.0 } else { 0.0 });
        SplitTangent {
            point: x.to_vec(),
            horizontal,
            vertical,
            proj_horizontal: &(&pinv * &sel(true)) * &p,
            proj_vertical: &(&pinv * &sel(false)) * &p,
        }
    }

    /// `ξ_curv(X, Y) = −⟨I_f Θ(v_X, v_Y) b, b⟩`, with `v` the base components.
    pub fn xi_curv(&self, x: &[f64]) -> ExteriorElement {
        let (nb, d) = (self.base_dim(), self.dim());
        let theta = self.bundle.curvature(&x[..nb]);
        let b = &x[nb..];
        let i_f = self.bundle.fiber_structure().i;
        let mut w = Mat::zeros(d, d);
        for mu in 0..nb {
            for nu in 0..nb {
                let tb = i_f.mul_vec(&theta.components[mu][nu].mul_vec(b));
                w[(mu, nu)] = -tb.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
            }
        }
        Form::from_antisymmetric(&w).complexify()
    }

    /// Pulls a form back to the adapted frame, where the structure is flat.
    pub fn to_adapted(&self, x: &[f64], eta: &ExteriorElement) -> ExteriorElement {
        let pinv = self.adapted_frame(x, true).map(|v| Complex64::new(v, 0.0));
        eta.automorphism(&pinv)
    }

    /// Largest Nijenhuis tensor entry of `L̂`, with `L̂` and `∂L̂` from jets.
    pub fn nijenhuis_residual(&self, which: Su2Generator, x: &[f64]) -> f64 {
        let d = self.dim();
        let l = self.structure(x).get(which).clone();
        let dl: Vec<Mat<f64>> =
            (0..d).map(|e| self.structure(&seed(x, e)).get(which).map(|v| v.eps)).collect();
        let mut out = 0.0f64;
        for a in 0..d {
            for b in (a + 1)..d {
                for c in 0..d {
                    let mut s = 0.0;
                    for e in 0..d {
                        s += l[(e, a)] * dl[e][(c, b)] - l[(e, b)] * dl[e][(c, a)];
                        s += l[(c, e)] * (dl[b][(e, a)] - dl[a][(e, b)]);
                    }
                    out = out.max(s.abs());
                }
            }
        }
        out
    }
}

impl StructureField for TotalSpaceChart {
    fn dim(&self) -> usize {
        TotalSpaceChart::dim(self)
    }
    fn structure<R: Real>(&self, x: &[R]) -> Hypercomplex<R> {
        let base = self.bundle.base_structure();
        let fiber = self.bundle.fiber_structure();
        Hypercomplex {
            i: self.hat(x, &base.i, &fiber.i),
            j: self.hat(x, &base.j, &fiber.j),
            k: self.hat(x, &base.k, &fiber.k),
        }
    }
}

impl MetricField for NaturalMetric<'_> {
    fn dim(&self) -> usize {
        self.chart.dim()
    }
    fn metric<R: Real>(&self, x: &[R]) -> Mat<R> {
        self.chart.metric_part(x, self.part)
    }
}

/// `Ω` of `g`, `g_hor` or `g_ver`.
#[derive(Clone, Copy, Debug)]
pub struct PartForm<'a>(pub NaturalMetric<'a>);

impl FormField for PartForm<'_> {
    fn dim(&self) -> usize {
        self.0.chart.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        canonical_form(&self.0.metric(x), &self.0.chart.structure(x))
    }
}

/// Pointwise values used by both verifications.
struct PsiJets {
    ddbar: ExteriorElement,
    ddj: ExteriorElement,
    omega_ver: ExteriorElement,
    big_omega_ver: ExteriorElement,
    xi: ExteriorElement,
    structure: Hypercomplex<f64>,
}

fn psi_jets(t: &TotalSpaceChart, x: &[f64]) -> PsiJets {
    let psi = Function(t.psi_field());
    let dbar = DolbeaultD::new(&psi, t, Dolbeault::Antiholomorphic);
    let ddbar = DolbeaultD::new(&dbar, t, Dolbeault::Holomorphic).eval(x).scale(Complex64::i());
    let dj = PartialJ { inner: &psi, structure: t };
    let ddj = DolbeaultD::new(&dj, t, Dolbeault::Holomorphic).eval(x);
    let structure = t.structure(x);
    let g_ver = t.metric_part(x, MetricPart::Vertical);
    PsiJets {
        ddbar,
        ddj,
        omega_ver: hermitian_form(&g_ver, &structure.i),
        big_omega_ver: canonical_form(&g_ver, &structure),
        xi: t.xi_curv(x),
        structure,
    }
}

/// `√−1 ∂∂̄Ψ = 2ω_ver + ξ_curv` at every sample point.
pub fn verify_ddbar_psi(t: &TotalSpaceChart, points: &[Vec<f64>], tol: f64) -> VerificationReport {
    let r = worst(
        points
            .par_iter()
            .map(|x| {
                let j = psi_jets(t, x);
                let rhs = j.omega_ver.scale(cx(2.0, 0.0)).add(&j.xi);
                relative(j.ddbar.distance(&rhs), j.ddbar.max_norm())
            })
            .collect::<Vec<_>>(),
    );
    VerificationReport::new(
        "totspace",
        vec![Record::residual(
            &format!("totspace.{}.ddbar_psi", t.bundle.name()),
            "√−1∂∂̄Ψ = 2ω_ver + ξ_curv",
            points.len(),
            r,
            tol,
        )],
    )
}

#[derive(Default)]
struct PointResiduals {
    structure: f64,
    nijenhuis: f64,
    metric: f64,
    ddj_r: f64,
    r_xi: f64,
    xi_invariant: f64,
    r_omega_ver: f64,
    ddj_ver: f64,
    del_hor: f64,
    del_omega: f64,
    margin: f64,
}

fn point_residuals(t: &TotalSpaceChart, x: &[f64]) -> PointResiduals {
    let j = psi_jets(t, x);
    let s = &j.structure;
    let g = t.natural_metric(x);
    let nijenhuis = [Su2Generator::I, Su2Generator::J, Su2Generator::K]
        .into_iter()
        .map(|w| t.nijenhuis_residual(w, x))
        .fold(0.0, f64::max);
    let r_ddbar = raising_r(s, &j.ddbar);
    let r_xi = raising_r(s, &j.xi);
    let adapted = t.to_adapted(x, &j.xi);
    let xi_invariant = weight_decompose(&Hypercomplex::flat(t.dim() / 4), &adapted)
        .map(|d| d.components.iter().filter(|(w, _)| *w != 0).map(|(_, c)| c.max_norm()).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let hor = PartForm(t.metric_field(MetricPart::Horizontal));
    let full = PartForm(t.metric_field(MetricPart::Full));
    let omega = full.eval(x);
    let margin = match q_positive_check(s, &omega, true) {
        Ok(q) => q.margin,
        Err(_) => f64::NAN,
    };
    PointResiduals {
        structure: s.quaternionic_residual(),
        nijenhuis: relative(nijenhuis, s.i.max_abs()),
        metric: invariance_residual(&g, s).1,
        ddj_r: relative(j.ddj.distance(&r_ddbar), j.ddj.max_norm()),
        r_xi: relative(r_xi.max_norm(), j.xi.max_norm()),
        xi_invariant: relative(xi_invariant, j.xi.max_norm()),
        r_omega_ver: relative(raising_r(s, &j.omega_ver).distance(&j.big_omega_ver), j.big_omega_ver.max_norm()),
        ddj_ver: relative(j.ddj.distance(&j.big_omega_ver.scale(cx(2.0, 0.0))), j.ddj.max_norm()),
        del_hor: crate::hermitian::del_residual(&hor, t, x),
        del_omega: crate::hermitian::del_residual(&full, t, x),
        margin,
    }
}

/// The HKT chain for the natural metric on `Tot B`.
pub fn verify_tot_hkt(t: &TotalSpaceChart, points: &[Vec<f64>], tol: &Tolerances) -> VerificationReport {
    let res: Vec<PointResiduals> = points.par_iter().map(|x| point_residuals(t, x)).collect();
    let name = t.bundle.name();
    let n = points.len();
    let rec = |id: &str, anchor: &str, f: fn(&PointResiduals) -> f64, tolerance: f64| {
        Record::residual(&format!("totspace.{name}.{id}"), anchor, n, worst(res.iter().map(f)), tolerance)
    };
    VerificationReport::new(
        "totspace",
        vec![
            rec("quaternionic_relations", "Î² = Ĵ² = −1, ÎĴ = K̂", |r| r.structure, tol.algebra),
            rec("nijenhuis", "N(Î) = N(Ĵ) = N(K̂) = 0", |r| r.nijenhuis, tol.second_order),
            rec("metric_invariance", "g(L̂x, L̂y) = g(x, y)", |r| r.metric, tol.algebra),
            rec("ddj_psi_r_ddbar", "∂∂_JΨ = 𝓡(√−1∂∂̄Ψ)", |r| r.ddj_r, tol.second_order),
            rec("r_xi_curv", "𝓡(ξ_curv) = 0", |r| r.r_xi, tol.algebra),
            rec("xi_curv_invariant", "ξ_curv is SU(2)-invariant", |r| r.xi_invariant, tol.algebra),
            rec("r_omega_ver", "𝓡(ω_ver) = Ω_ver", |r| r.r_omega_ver, tol.sl2.max(tol.algebra)),
            rec("ddj_psi_vertical", "∂∂_JΨ = 2Ω_ver", |r| r.ddj_ver, tol.second_order),
            rec("del_omega_hor", "∂Ω_hor = 0", |r| r.del_hor, tol.second_order),
            rec("del_omega", "∂(Ω_hor + Ω_ver) = 0", |r| r.del_omega, tol.second_order),
            Record::residual(
                &format!("totspace.{name}.strict_q_positive"),
                "Ω_hor + Ω_ver strictly q-positive",
                n,
                0.0,
                tol.positivity,
            )
            .with_margin(least(res.iter().map(|r| r.margin))),
        ],
    )
}
