//! Hypercomplex Hermitian structures: metric ↔ canonical `(2,0)`-form, and
//! the HKT condition `∂Ω = 0`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::exterior::Form;
use crate::fields::{Dolbeault, DolbeaultD, FormField, StructureField};
use crate::jet::Real;
use crate::linalg::Mat;
use crate::pointwise::{complexify_mat, cx, q_positive_check, ExteriorElement, Hypercomplex, PointwiseError};
use crate::report::{relative, worst, Record, VerificationReport};

#[derive(Debug, Error, PartialEq)]
pub enum HermitianError {
    #[error("metric is not invariant under {which} (residual {residual:e})")]
    NotQuaternionHermitian { which: char, residual: f64 },
    #[error("metric is not positive definite")]
    NotPositive,
    #[error("form is not strictly q-positive (least eigenvalue {0:e})")]
    NotStrictlyQPositive(f64),
    #[error(transparent)]
    Pointwise(#[from] PointwiseError),
}

/// `ω_L(X, Y) = g(LX, Y)`, the form with antisymmetric matrix `Lᵀ g`.
pub fn hermitian_form<R: Real>(g: &Mat<R>, l: &Mat<R>) -> Form<Complex<R>> {
    Form::from_antisymmetric(&complexify_mat(&(&l.transpose() * g)))
}

/// `Ω = ω_J + √−1 ω_K`; on flat `ℍⁿ` with the Euclidean metric this is
/// `Σ ξ_{2m} ∧ ξ_{2m+1}`.
pub fn canonical_form<R: Real>(g: &Mat<R>, s: &Hypercomplex<R>) -> Form<Complex<R>> {
    hermitian_form(g, &s.j).add(&hermitian_form(g, &s.k).scale(cx(0.0, 1.0)))
}

/// The three Hermitian forms `(ω_I, ω_J, ω_K)`.
pub fn hermitian_triple<R: Real>(g: &Mat<R>, s: &Hypercomplex<R>) -> [Form<Complex<R>>; 3] {
    [hermitian_form(g, &s.i), hermitian_form(g, &s.j), hermitian_form(g, &s.k)]
}

/// Largest `|g(Lx, Ly) − g(x, y)|` entry over `L ∈ {I, J, K}`, tagged with
/// the worst `L`.
pub fn invariance_residual(g: &Mat<f64>, s: &Hypercomplex<f64>) -> (char, f64) {
    let scale = 1.0 + g.max_abs();
    [('I', &s.i), ('J', &s.j), ('K', &s.k)]
        .into_iter()
        .map(|(c, l)| (c, (&(&l.transpose() * &(g * l)) - g).max_abs() / scale))
        .fold(('I', 0.0), |a, b| if b.1 > a.1 { b } else { a })
}

pub fn validate_metric(g: &Mat<f64>, s: &Hypercomplex<f64>, tol: f64) -> Result<(), HermitianError> {
    let (which, residual) = invariance_residual(g, s);
    if residual > tol {
        return Err(HermitianError::NotQuaternionHermitian { which, residual });
    }
    let sym = g.to_nalgebra();
    let sym = (&sym + sym.transpose()) * 0.5;
    if sym.cholesky().is_none() {
        return Err(HermitianError::NotPositive);
    }
    Ok(())
}

/// The canonical form of a checked quaternion-Hermitian metric.
pub fn metric_to_omega(g: &Mat<f64>, s: &Hypercomplex<f64>) -> Result<ExteriorElement, HermitianError> {
    validate_metric(g, s, 1e-10)?;
    Ok(canonical_form(g, s))
}

/// `h(x, y) = Re Ω(x^{1,0}, J y^{0,1})` with `x^{1,0} = (x − √−1 Ix)/2`,
/// `y^{0,1} = (y + √−1 Iy)/2`. Unchecked and generic.
pub fn metric_from_canonical<R: Real>(omega: &Form<Complex<R>>, s: &Hypercomplex<R>) -> Mat<R> {
    let n = s.dim();
    let w = omega.grade(2).to_antisymmetric();
    let half = cx::<R>(0.5, 0.0);
    let i = complexify_mat(&s.i);
    let id = Mat::<Complex<R>>::identity(n);
    let x10 = (&id - &i.scale(cx(0.0, 1.0))).scale(half);
    let y01 = &complexify_mat(&s.j) * &(&id + &i.scale(cx(0.0, 1.0))).scale(half);
    let h = &(&x10.transpose() * &w) * &y01;
    h.map(|z| z.re)
}

/// Inverse of [`metric_to_omega`] on strictly q-positive forms.
pub fn omega_to_metric(omega: &ExteriorElement, s: &Hypercomplex<f64>) -> Result<Mat<f64>, HermitianError> {
    let q = q_positive_check(s, omega, true)?;
    if !q.positive {
        return Err(HermitianError::NotStrictlyQPositive(q.min_eigenvalue));
    }
    Ok(metric_from_canonical(omega, s))
}

/// A field of symmetric matrices on a chart.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    fn metric<R: Real>(&self, x: &[R]) -> Mat<R>;
}

impl<G: MetricField + ?Sized> MetricField for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn metric<R: Real>(&self, x: &[R]) -> Mat<R> {
        (**self).metric(x)
    }
}

#[derive(Clone, Debug)]
pub struct ConstantMetric(pub Mat<f64>);

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.rows()
    }
    fn metric<R: Real>(&self, _x: &[R]) -> Mat<R> {
        self.0.map(R::from_f64)
    }
}

/// The metric `h` reconstructed pointwise from a `(2,0)`-form field.
#[derive(Clone, Debug)]
pub struct ReconstructedMetric<F, S> {
    pub omega: F,
    pub structure: S,
}

impl<F: FormField, S: StructureField> MetricField for ReconstructedMetric<F, S> {
    fn dim(&self) -> usize {
        self.omega.dim()
    }
    fn metric<R: Real>(&self, x: &[R]) -> Mat<R> {
        metric_from_canonical(&self.omega.eval(x), &self.structure.structure(x))
    }
}

/// `Ω` of a metric field, as a form field.
#[derive(Clone, Debug)]
pub struct CanonicalForm<G, S> {
    pub metric: G,
    pub structure: S,
}

impl<G: MetricField, S: StructureField> FormField for CanonicalForm<G, S> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        canonical_form(&self.metric.metric(x), &self.structure.structure(x))
    }
}

/// Relative `∂Ω` residual `max|∂Ω| / (1 + max|Ω|)` at one point.
pub fn del_residual<F: FormField, S: StructureField>(omega: &F, structure: &S, x: &[f64]) -> f64 {
    let value = omega.eval(x);
    let mut del = DolbeaultD::new(omega, structure, Dolbeault::Holomorphic);
    del.max_degree = 2;
    relative(del.eval(x).max_norm(), value.max_norm())
}

/// Evaluates `∂Ω` at every sample point.
pub fn hkt_check<G: MetricField, S: StructureField>(
    metric: &G,
    structure: &S,
    points: &[Vec<f64>],
    tol: f64,
) -> VerificationReport {
    let omega = CanonicalForm { metric, structure };
    let residual = worst(points.par_iter().map(|x| del_residual(&omega, structure, x)).collect::<Vec<_>>());
    let invariance = worst(
        points
            .par_iter()
            .map(|x| invariance_residual(&metric.metric(x), &structure.structure(x)).1)
            .collect::<Vec<_>>(),
    );
    VerificationReport::new(
        "hkt",
        vec![
            Record::residual("metric.quaternion_hermitian", "g(Lx,Ly) = g(x,y) for L = I,J,K", points.len(), invariance, 1e-10),
            Record::residual("hkt.del_omega", "∂(ω_J + √−1 ω_K) = 0", points.len(), residual, tol),
        ],
    )
}

/// Random positive definite quaternion-Hermitian metric: a random SPD matrix
/// averaged over `{1, I, J, K}`.
pub fn random_qh_metric(s: &Hypercomplex<f64>, rng: &mut impl rand::Rng) -> Mat<f64> {
    let n = s.dim();
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let base = Mat::from_nalgebra(&(a.transpose() * &a + DMatrix::identity(n, n) * 0.5));
    let mut g = base.clone();
    for l in [&s.i, &s.j, &s.k] {
        g = &g + &(&l.transpose() * &(&base * l));
    }
    g.scale(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::fields::{FlatStructure, PolyForm, Polynomial};
    use crate::pointwise::{flat_big_omega, flat_omega_i, q_real_check, raising_r, xi_form};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn flat_metric_gives_flat_omega() {
        for n in 1..=2 {
            let s = Hypercomplex::flat(n);
            let omega = metric_to_omega(&Mat::identity(4 * n), &s).unwrap();
            assert!(omega.distance(&flat_big_omega(n)) < 1e-14);
            let scaled = metric_to_omega(&Mat::identity(4 * n).scale(3.0), &s).unwrap();
            assert!(scaled.distance(&flat_big_omega(n).scale(c(3.0))) < 1e-14);
            assert!(hermitian_form(&Mat::identity(4 * n), &s.i).distance(&flat_omega_i(n)) < 1e-14);
        }
    }

    fn diag_metric(a1: f64, a3: f64) -> Mat<f64> {
        Mat::from_fn(8, 8, |r, cc| if r != cc { 0.0 } else if r < 4 { a1 } else { a3 })
    }

    fn diag_omega(a1: f64, a3: f64) -> ExteriorElement {
        let x = |a| xi_form(2, a);
        x(0).wedge(&x(1)).scale(c(a1)).add(&x(2).wedge(&x(3)).scale(c(a3)))
    }

    #[test]
    fn block_diagonal_metric() {
        let s = Hypercomplex::flat(2);
        let omega = metric_to_omega(&diag_metric(2.0, 5.0), &s).unwrap();
        assert!(omega.distance(&diag_omega(2.0, 5.0)) < 1e-14);
        let g = omega_to_metric(&diag_omega(2.0, 5.0), &s).unwrap();
        assert!((&g - &diag_metric(2.0, 5.0)).max_abs() < 1e-14);
        let flat = omega_to_metric(&flat_big_omega(1), &Hypercomplex::flat(1)).unwrap();
        assert!((&flat - &Mat::identity(4)).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = Hypercomplex::flat(1);
        let mut g = Mat::identity(4);
        g[(0, 1)] = 0.3;
        g[(1, 0)] = 0.3;
        assert!(matches!(metric_to_omega(&g, &s), Err(HermitianError::NotQuaternionHermitian { .. })));
        assert!(matches!(
            omega_to_metric(&flat_big_omega(1).scale(c(-1.0)), &s),
            Err(HermitianError::NotStrictlyQPositive(_))
        ));
    }

    #[test]
    fn round_trip_and_raising_on_random_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2 {
            let s = Hypercomplex::flat(n);
            for _ in 0..50 {
                let g = random_qh_metric(&s, &mut rng);
                let omega = metric_to_omega(&g, &s).unwrap();
                assert!(q_real_check(&s, &omega, 1e-12).unwrap());
                let back = omega_to_metric(&omega, &s).unwrap();
                assert!((&back - &g).max_abs() < 1e-10);
                let [wi, _, _] = hermitian_triple(&g, &s);
                assert!(raising_r(&s, &wi).distance(&omega) < 1e-12);
            }
        }
    }

    #[test]
    fn hkt_on_flat_and_four_dimensional_charts() {
        let pts: Vec<Vec<f64>> = vec![vec![0.1, 0.2, -0.3, 0.4], vec![1.0, 0.0, 0.5, -0.5]];
        let flat = FlatStructure::new(1);
        let r = hkt_check(&ConstantMetric(Mat::identity(4)), &flat, &pts, 1e-8);
        assert!(r.pass);
        assert_eq!(r.record("hkt.del_omega").unwrap().max_residual, 0.0);
        // Any quaternion-Hermitian metric on ℍ: ∂Ω is a (3,0)-form, which vanishes in complex dimension 2.
        let f = Polynomial::constant(4, c(2.0)).add(&Polynomial::coordinate(4, 0).mul(&Polynomial::coordinate(4, 3)));
        let omega = PolyForm::from_constant(f, &flat_big_omega(1));
        let r = hkt_check(&ReconstructedMetric { omega: &omega, structure: &flat }, &flat, &pts, 1e-8);
        assert!(r.pass, "{}", r.to_text());
    }

    #[test]
    fn perturbed_metric_is_not_hkt() {
        // Ω' = (1 + x_4/2) ξ_0∧ξ_1 + ξ_2∧ξ_3 has ∂Ω' = ¼ ξ_2∧ξ_0∧ξ_1 ≠ 0.
        let flat = FlatStructure::new(2);
        let f = Polynomial::constant(8, c(1.0)).add(&Polynomial::coordinate(8, 4).scale(c(0.5)));
        let omega = PolyForm::from_constant(f, &xi_form(2, 0).wedge(&xi_form(2, 1)))
            .plus(PolyForm::from_constant(Polynomial::constant(8, c(1.0)), &xi_form(2, 2).wedge(&xi_form(2, 3))));
        let pts = vec![vec![0.1; 8]];
        let metric = ReconstructedMetric { omega: &omega, structure: &flat };
        let r = hkt_check(&metric, &flat, &pts, 1e-8);
        assert!(!r.pass);
        assert!(r.record("metric.quaternion_hermitian").unwrap().pass);
        let expected = 0.25 / (1.0 + 1.05);
        assert!((r.record("hkt.del_omega").unwrap().max_residual - expected).abs() < 1e-12);
    }
}
