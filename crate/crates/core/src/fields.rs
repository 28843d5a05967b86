//! Differential forms on chart domains with exactly differentiable
//! coefficients, and the operators `d, ∂, ∂̄, ∂_J, d₊`.
//!
//! A [`FormField`] is evaluated generically over [`Real`]. Operators are
//! themselves fields: [`ExteriorD`] evaluates its inner field on jets seeded
//! along each coordinate, so `ExteriorD<ExteriorD<F>>` differentiates twice
//! through nested jets with no finite differences involved.

use num_complex::{Complex, Complex64};
use thiserror::Error;

use crate::exterior::{monomials, Form};
use crate::jet::{complex_eps, seed, Dual, Real};
use crate::pointwise::{
    cx, hodge_type, j_action, j_inverse, raising_r, raising_r_bar, type_component, ExteriorElement,
    Hypercomplex, WeightProjectors,
};

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("point has dimension {got}, chart has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected a form of type {expected}, found types {found:?}")]
    WrongType { expected: String, found: Vec<(usize, usize)> },
    #[error("form is not in the top-weight subspace (off-weight residual {0:e})")]
    NotTopWeight(f64),
    #[error("field evaluation produced a non-finite coefficient")]
    NonFinite,
}

/// A complex function on a chart of `ℝ^N`.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<R: Real>(&self, x: &[R]) -> Complex<R>;
}

/// A complex differential form on a chart of `ℝ^N`, `N ≤ 32`.
pub trait FormField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>>;
}

/// A point-dependent hypercomplex structure on the chart.
pub trait StructureField: Send + Sync {
    fn dim(&self) -> usize;
    fn structure<R: Real>(&self, x: &[R]) -> Hypercomplex<R>;
}

impl<F: FormField + ?Sized> FormField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        (**self).eval(x)
    }
}

impl<S: ScalarField + ?Sized> ScalarField for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Complex<R> {
        (**self).eval(x)
    }
}

impl<S: StructureField + ?Sized> StructureField for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn structure<R: Real>(&self, x: &[R]) -> Hypercomplex<R> {
        (**self).structure(x)
    }
}

/// Lifts an `f64` matrix structure into any scalar type.
pub fn lift_structure<R: Real>(s: &Hypercomplex<f64>) -> Hypercomplex<R> {
    let f = |m: &crate::linalg::Mat<f64>| m.map(R::from_f64);
    Hypercomplex { i: f(&s.i), j: f(&s.j), k: f(&s.k) }
}

/// The constant structure of `ℍⁿ`.
#[derive(Clone, Debug)]
pub struct FlatStructure {
    n: usize,
    s: Hypercomplex<f64>,
}

impl FlatStructure {
    pub fn new(n: usize) -> Self {
        Self { n, s: Hypercomplex::flat(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl StructureField for FlatStructure {
    fn dim(&self) -> usize {
        4 * self.n
    }
    fn structure<R: Real>(&self, _x: &[R]) -> Hypercomplex<R> {
        lift_structure(&self.s)
    }
}

/// A scalar field viewed as a 0-form.
#[derive(Clone, Debug)]
pub struct Function<S>(pub S);

impl<S: ScalarField> FormField for Function<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        Form::scalar(self.0.dim(), self.0.eval(x))
    }
}

/// Sparse complex polynomial in the real coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(Complex64, Vec<u8>)>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self { dim, terms: vec![(c, vec![0; dim])] }
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self { dim, terms: vec![(Complex64::new(1.0, 0.0), e)] }
    }

    pub fn with_term(mut self, c: Complex64, exponents: &[u8]) -> Self {
        assert_eq!(exponents.len(), self.dim);
        self.terms.push((c, exponents.to_vec()));
        self
    }

    pub fn terms(&self) -> &[(Complex64, Vec<u8>)] {
        &self.terms
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ea) in &self.terms {
            for (b, eb) in &o.terms {
                out.terms.push((a * b, ea.iter().zip(eb).map(|(x, y)| x + y).collect()));
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, terms: self.terms.iter().map(|(c, e)| (c * s, e.clone())).collect() }
    }

    /// Random polynomial with up to `count` monomials of total degree ≤ `degree`.
    pub fn random(dim: usize, degree: u8, count: usize, rng: &mut impl rand::Rng) -> Self {
        let mut out = Self::zero(dim);
        for _ in 0..count {
            let mut e = vec![0u8; dim];
            let total = rng.gen_range(0..=degree);
            for _ in 0..total {
                e[rng.gen_range(0..dim)] += 1;
            }
            out.terms.push((Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), e));
        }
        out
    }
}

impl ScalarField for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<R: Real>(&self, x: &[R]) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for (c, e) in &self.terms {
            let mut m = R::one();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m *= xi.powi(k as i32);
                }
            }
            acc = acc + Complex::new(R::from_f64(c.re) * m, R::from_f64(c.im) * m);
        }
        acc
    }
}

/// A form whose coefficients (in the `dx` basis) are polynomials.
#[derive(Clone, Debug)]
pub struct PolyForm {
    dim: usize,
    terms: Vec<(u32, Polynomial)>,
}

impl PolyForm {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn with_term(mut self, mask: u32, coeff: Polynomial) -> Self {
        self.terms.push((mask, coeff));
        self
    }

    /// Polynomial coefficients times a constant pointwise form.
    pub fn from_constant(coeff: Polynomial, form: &ExteriorElement) -> Self {
        let mut out = Self::new(form.dim());
        for (m, c) in form.terms() {
            out.terms.push((m, coeff.scale(c)));
        }
        out
    }

    pub fn plus(mut self, o: PolyForm) -> Self {
        self.terms.extend(o.terms);
        self
    }

    /// Random `(p,0)`-form `Σ f_A ξ_A` on `ℍⁿ` with polynomial coefficients.
    pub fn random_holomorphic(n: usize, p: usize, degree: u8, rng: &mut impl rand::Rng) -> Self {
        let mut out = Self::new(4 * n);
        for mask in monomials(2 * n, p) {
            let mut xi_mono = Form::scalar(4 * n, Complex64::new(1.0, 0.0));
            for a in crate::exterior::bits(mask) {
                xi_mono = xi_mono.wedge(&crate::pointwise::xi_form(n, a));
            }
            out = out.plus(Self::from_constant(Polynomial::random(4 * n, degree, 3, rng), &xi_mono));
        }
        out
    }

    /// Random degree-`p` form with polynomial coefficients of degree ≤ `degree`.
    pub fn random(dim: usize, p: usize, degree: u8, rng: &mut impl rand::Rng) -> Self {
        let mut out = Self::new(dim);
        for m in monomials(dim, p) {
            out.terms.push((m, Polynomial::random(dim, degree, 3, rng)));
        }
        out
    }
}

impl FormField for PolyForm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let mut out = Form::zero(self.dim);
        for (m, p) in &self.terms {
            out.add_term(*m, p.eval(x));
        }
        out
    }
}

/// Sum of two fields.
#[derive(Clone, Debug)]
pub struct Sum<A, B>(pub A, pub B);

impl<A: FormField, B: FormField> FormField for Sum<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        self.0.eval(x).add(&self.1.eval(x))
    }
}

/// Constant multiple of a field.
#[derive(Clone, Debug)]
pub struct Scaled<F>(pub Complex64, pub F);

impl<F: FormField> FormField for Scaled<F> {
    fn dim(&self) -> usize {
        self.1.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        self.1.eval(x).scale(cx(self.0.re, self.0.im))
    }
}

fn jet_eps<R: Real>(f: &Form<Complex<Dual<R>>>) -> Form<Complex<R>> {
    f.map(complex_eps)
}

/// `∂_i ω`: coefficientwise partial derivative.
pub fn partial<R: Real, F: FormField>(f: &F, x: &[R], i: usize) -> Form<Complex<R>> {
    jet_eps(&f.eval(&seed(x, i)))
}

/// Exterior derivative as a field.
#[derive(Clone, Debug)]
pub struct ExteriorD<F>(pub F);

impl<F: FormField> FormField for ExteriorD<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let n = self.0.dim();
        let mut out = Form::zero(n);
        for i in 0..n {
            let di = partial(&self.0, x, i);
            if di.is_empty() {
                continue;
            }
            out = out.add(&Form::monomial(n, 1 << i, Complex::new(R::one(), R::zero())).wedge(&di));
        }
        out
    }
}

/// The `(p,q)`-component of a field for the structure's `I`.
#[derive(Clone, Debug)]
pub struct TypePart<F, S> {
    pub inner: F,
    pub structure: S,
    pub p: usize,
    pub q: usize,
}

impl<F: FormField, S: StructureField> FormField for TypePart<F, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let s = self.structure.structure(x);
        type_component(&self.inner.eval(x), &s.i, self.p, self.q)
    }
}

/// Degrees carried by the value of `f` or by a first partial at `x`. The
/// differential of any other degree part vanishes at `x`, even where the
/// value itself is zero.
fn active_degrees<R: Real, F: FormField>(f: &F, x: &[R]) -> Vec<usize> {
    let mut out = f.eval(x).degrees();
    out.extend((0..x.len()).flat_map(|i| f.eval(&seed(x, i)).degrees()));
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dolbeault {
    Holomorphic,
    Antiholomorphic,
}

/// `∂` or `∂̄` as a field: `Σ_{p,q} Π^{p+1,q} d Π^{p,q}` (resp. `Π^{p,q+1}`),
/// so mixed inputs are split into pure types first.
#[derive(Clone, Debug)]
pub struct DolbeaultD<F, S> {
    pub inner: F,
    pub structure: S,
    pub kind: Dolbeault,
    /// Largest form degree to consider in the type split.
    pub max_degree: usize,
}

impl<F: FormField, S: StructureField> DolbeaultD<F, S> {
    pub fn new(inner: F, structure: S, kind: Dolbeault) -> Self {
        let max_degree = inner.dim();
        Self { inner, structure, kind, max_degree }
    }
}

impl<F: FormField, S: StructureField> FormField for DolbeaultD<F, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let n = self.inner.dim();
        let s = self.structure.structure(x);
        let mut out = Form::zero(n);
        for deg in active_degrees(&self.inner, x).into_iter().filter(|&d| d <= self.max_degree && d < n) {
            for q in 0..=deg {
                let part = TypePart { inner: &self.inner, structure: &self.structure, p: deg - q, q };
                let d = ExteriorD(part).eval(x);
                let (pp, qq) = match self.kind {
                    Dolbeault::Holomorphic => (deg - q + 1, q),
                    Dolbeault::Antiholomorphic => (deg - q, q + 1),
                };
                out = out.add(&type_component(&d, &s.i, pp, qq));
            }
        }
        out
    }
}

/// `∂_J` on the `(p,0)`-components of a field: `Π^{p+1,0} ∘ J ∘ ∂̄ ∘ J⁻¹`.
#[derive(Clone, Debug)]
pub struct PartialJ<F, S> {
    pub inner: F,
    pub structure: S,
}

struct JInverseOfHolomorphicPart<'a, F, S> {
    inner: &'a F,
    structure: &'a S,
    p: usize,
}

impl<F: FormField, S: StructureField> FormField for JInverseOfHolomorphicPart<'_, F, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let s = self.structure.structure(x);
        let hol = type_component(&self.inner.eval(x), &s.i, self.p, 0);
        j_inverse(&s, &hol, self.p)
    }
}

impl<F: FormField, S: StructureField> FormField for PartialJ<F, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let n = self.inner.dim();
        let s = self.structure.structure(x);
        let mut out = Form::zero(n);
        for p in active_degrees(&self.inner, x).into_iter().filter(|&p| p < n) {
            let pulled = JInverseOfHolomorphicPart { inner: &self.inner, structure: &self.structure, p };
            let dbar = DolbeaultD::new(pulled, &self.structure, Dolbeault::Antiholomorphic).eval(x);
            out = out.add(&type_component(&j_action(&s, &dbar), &s.i, p + 1, 0));
        }
        out
    }
}

/// `d₊ = Π_{top weight} ∘ d` on flat `ℍⁿ`, as a field.
#[derive(Clone, Debug)]
pub struct DPlus<F> {
    pub inner: F,
    pub n: usize,
}

impl<F: FormField> FormField for DPlus<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let d = ExteriorD(&self.inner).eval(x);
        let mut out = Form::zero(4 * self.n);
        for p in d.degrees() {
            out = out.add(&WeightProjectors::flat(self.n, p).project(&d, p));
        }
        out
    }
}

fn check_dim(f: &impl FormField, x: &[f64]) -> Result<(), FieldError> {
    if f.dim() != x.len() {
        return Err(FieldError::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    Ok(())
}

fn finite(f: ExteriorElement) -> Result<ExteriorElement, FieldError> {
    if f.terms().all(|(_, c)| c.re.is_finite() && c.im.is_finite()) {
        Ok(f)
    } else {
        Err(FieldError::NonFinite)
    }
}

pub fn exterior_d(f: &impl FormField, at: &[f64]) -> Result<ExteriorElement, FieldError> {
    check_dim(f, at)?;
    finite(ExteriorD(f).eval(at))
}

/// `(∂ω, ∂̄ω)` at a point, mixed inputs split componentwise.
pub fn dolbeault_split<F: FormField, S: StructureField>(
    f: &F,
    structure: &S,
    at: &[f64],
) -> Result<(ExteriorElement, ExteriorElement), FieldError> {
    check_dim(f, at)?;
    let del = DolbeaultD::new(f, structure, Dolbeault::Holomorphic).eval(at);
    let delbar = DolbeaultD::new(f, structure, Dolbeault::Antiholomorphic).eval(at);
    Ok((finite(del)?, finite(delbar)?))
}

/// `∂_J ω` for a field of pure type `(p,0)` at the point.
pub fn partial_j<F: FormField, S: StructureField>(f: &F, structure: &S, at: &[f64]) -> Result<ExteriorElement, FieldError> {
    check_dim(f, at)?;
    let value = f.eval(at);
    let s = structure.structure(at);
    match hodge_type(&value, &s.i) {
        Ok((_, 0)) => {}
        Ok(t) => return Err(FieldError::WrongType { expected: "(p,0)".into(), found: vec![t] }),
        Err(found) => return Err(FieldError::WrongType { expected: "(p,0)".into(), found }),
    }
    finite(PartialJ { inner: f, structure }.eval(at))
}

/// `(d′₊ω, d″₊ω)` on flat `ℍⁿ` for a field with values in `Λ*₊`.
pub fn quaternionic_d_plus<F: FormField>(f: &F, n: usize, at: &[f64]) -> Result<(ExteriorElement, ExteriorElement), FieldError> {
    check_dim(f, at)?;
    let value = f.eval(at);
    let mut off = 0.0f64;
    for p in value.degrees() {
        let top = WeightProjectors::flat(n, p).project(&value, p);
        off = off.max(top.distance(&value.grade(p)));
    }
    if off > 1e-9 * (1.0 + value.max_norm()) {
        return Err(FieldError::NotTopWeight(off));
    }
    let flat = FlatStructure::new(n);
    let i = flat.structure::<f64>(at).i;
    let mut first = Form::zero(4 * n);
    let mut second = Form::zero(4 * n);
    for deg in value.degrees() {
        for q in 0..=deg {
            let part = TypePart { inner: f, structure: &flat, p: deg - q, q };
            let dp = DPlus { inner: part, n }.eval(at);
            first = first.add(&type_component(&dp, &i, deg - q + 1, q));
            second = second.add(&type_component(&dp, &i, deg - q, q + 1));
        }
    }
    Ok((finite(first)?, finite(second)?))
}

/// `c_{p,q} = Π_{s=1}^{q} s(p+q−s+1)`.
pub fn ladder_constant(p: usize, q: usize) -> f64 {
    (1..=q).map(|s| (s * (p + q - s + 1)) as f64).product()
}

/// Ladder identification `Λ^{p+q,0} → Λ^{p,q}₊`, `θ ↦ (√−1 𝓡̄)^q θ / c_{p,q}`.
pub fn ladder_down<R: Real>(s: &Hypercomplex<R>, theta: &Form<Complex<R>>, p: usize, q: usize) -> Form<Complex<R>> {
    let mut out = theta.clone();
    for _ in 0..q {
        out = raising_r_bar(s, &out).scale(cx(0.0, 1.0));
    }
    out.scale(cx(1.0 / ladder_constant(p, q), 0.0))
}

/// Inverse of [`ladder_down`] on `Λ^{p,q}₊`: `(√−1 𝓡)^q`.
pub fn ladder_up<R: Real>(s: &Hypercomplex<R>, omega: &Form<Complex<R>>, q: usize) -> Form<Complex<R>> {
    let mut out = omega.clone();
    for _ in 0..q {
        out = raising_r(s, &out).scale(cx(0.0, 1.0));
    }
    out
}

/// [`ladder_down`] applied pointwise to a field of type `(p+q, 0)` on flat `ℍⁿ`.
#[derive(Clone, Debug)]
pub struct LadderDown<F> {
    pub inner: F,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl<F: FormField> FormField for LadderDown<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let s = lift_structure(&Hypercomplex::flat(self.n));
        ladder_down(&s, &self.inner.eval(x), self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::fd_gradient;
    use crate::pointwise::{xi_bar_form, xi_form};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    /// `z_a` as a polynomial on `ℍⁿ`.
    fn z(n: usize, a: usize) -> Polynomial {
        Polynomial::coordinate(4 * n, 2 * a).add(&Polynomial::coordinate(4 * n, 2 * a + 1).scale(c(0.0, 1.0)))
    }

    fn zbar(n: usize, a: usize) -> Polynomial {
        Polynomial::coordinate(4 * n, 2 * a).add(&Polynomial::coordinate(4 * n, 2 * a + 1).scale(c(0.0, -1.0)))
    }

    #[test]
    fn d_of_simple_one_form() {
        // d(x_0 dx_1) = dx_0 ∧ dx_1
        let f = PolyForm::new(4).with_term(0b10, Polynomial::coordinate(4, 0));
        let d = exterior_d(&f, &[0.3, 0.1, -0.2, 0.7]).unwrap();
        assert!(d.distance(&Form::monomial(4, 0b11, c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Polynomial::random(4, 3, 6, &mut rng);
        let x = point(&mut rng, 4);
        let d = exterior_d(&Function(p.clone()), &x).unwrap();
        let fd_re = fd_gradient(|y| p.eval(y).re, &x, 1e-4);
        let fd_im = fd_gradient(|y| p.eval(y).im, &x, 1e-4);
        for i in 0..4 {
            let v = d.coeff(1 << i);
            assert!((v.re - fd_re[i]).abs() / (1.0 + v.re.abs()) < 1e-6);
            assert!((v.im - fd_im[i]).abs() / (1.0 + v.im.abs()) < 1e-6);
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in 0..3 {
            let f = PolyForm::random(8, p, 4, &mut rng);
            let x = point(&mut rng, 8);
            let dd = ExteriorD(ExteriorD(&f)).eval(&x);
            assert!(dd.max_norm() < 1e-9);
        }
    }

    #[test]
    fn dolbeault_of_z0_zbar1() {
        let flat = FlatStructure::new(1);
        let f = Function(z(1, 0).mul(&zbar(1, 1)));
        let x = [0.2, -0.4, 0.9, 0.5];
        let (del, delbar) = dolbeault_split(&f, &flat, &x).unwrap();
        let z0 = c(x[0], x[1]);
        let zb1 = c(x[2], -x[3]);
        assert!(del.distance(&xi_form(1, 0).scale(zb1)) < 1e-14);
        assert!(delbar.distance(&xi_bar_form(1, 1).scale(z0)) < 1e-14);
    }

    #[test]
    fn second_derivatives_at_a_critical_point() {
        // ∂̄|z|² vanishes at the origin but its derivative does not.
        let flat = FlatStructure::new(1);
        let r2 = Function((0..4).fold(Polynomial::zero(4), |p, i| {
            p.add(&Polynomial::coordinate(4, i).mul(&Polynomial::coordinate(4, i)))
        }));
        let dbar = DolbeaultD::new(&r2, &flat, Dolbeault::Antiholomorphic);
        let ddbar = DolbeaultD::new(&dbar, &flat, Dolbeault::Holomorphic).eval(&[0.0; 4]);
        let expected = crate::pointwise::flat_omega_i(1).scale(c(0.0, -2.0));
        assert!(ddbar.distance(&expected) < 1e-14);
        let ddj = DolbeaultD::new(PartialJ { inner: &r2, structure: &flat }, &flat, Dolbeault::Holomorphic);
        assert!(ddj.eval(&[0.0; 4]).distance(&crate::pointwise::flat_big_omega(1).scale(c(2.0, 0.0))) < 1e-14);
    }

    #[test]
    fn partial_j_of_coordinates() {
        // z_0 is holomorphic, so ∂_J z_0 = 0. For antiholomorphic coordinates
        // ∂_J z̄_0 = J·ξ̄_0 = conj(J·ξ_0) = ξ_1 and ∂_J z̄_1 = conj(J·ξ_1) = −ξ_0.
        let flat = FlatStructure::new(1);
        let x = [0.1, 0.2, 0.3, 0.4];
        assert!(partial_j(&Function(z(1, 0)), &flat, &x).unwrap().max_norm() == 0.0);
        let got = partial_j(&Function(zbar(1, 0)), &flat, &x).unwrap();
        assert!(got.distance(&xi_form(1, 1)) < 1e-14);
        let got = partial_j(&Function(zbar(1, 1)), &flat, &x).unwrap();
        assert!(got.distance(&xi_form(1, 0).scale(c(-1.0, 0.0))) < 1e-14);
        let constant = Function(Polynomial::constant(4, c(2.0, 1.0)));
        assert!(partial_j(&constant, &flat, &x).unwrap().max_norm() == 0.0);
    }

    #[test]
    fn partial_j_rejects_mixed_types() {
        let flat = FlatStructure::new(1);
        let f = PolyForm::from_constant(Polynomial::constant(4, c(1.0, 0.0)), &xi_bar_form(1, 0));
        assert!(matches!(partial_j(&f, &flat, &[0.0; 4]), Err(FieldError::WrongType { .. })));
    }

    #[test]
    fn partial_j_is_leibniz_on_monomials() {
        // ∂_J(f ξ_a) = ∂_J f ∧ ξ_a for constant-coefficient ξ_a.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let flat = FlatStructure::new(2);
        for a in 0..4 {
            let f = Polynomial::random(8, 3, 5, &mut rng);
            let form = PolyForm::from_constant(f.clone(), &xi_form(2, a));
            let x = point(&mut rng, 8);
            let lhs = partial_j(&form, &flat, &x).unwrap();
            let rhs = partial_j(&Function(f), &flat, &x).unwrap().wedge(&xi_form(2, a));
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn dolbeault_parts_sum_to_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let flat = FlatStructure::new(1);
        for p in 0..3 {
            let f = PolyForm::random(4, p, 3, &mut rng);
            let x = point(&mut rng, 4);
            let (a, b) = dolbeault_split(&f, &flat, &x).unwrap();
            assert!(a.add(&b).distance(&exterior_d(&f, &x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn ladder_round_trip_is_identity() {
        let s = Hypercomplex::flat(2);
        let theta = xi_form(2, 0).wedge(&xi_form(2, 2)).add(&xi_form(2, 1).wedge(&xi_form(2, 3)).scale(c(0.5, -2.0)));
        for q in 0..=2 {
            let down = ladder_down(&s, &theta, 2 - q, q);
            assert_eq!(hodge_type(&down, &s.i), Ok((2 - q, q)));
            assert!(ladder_up(&s, &down, q).distance(&theta) < 1e-12);
        }
    }

    #[test]
    fn d_plus_of_constant_vanishes() {
        let f = PolyForm::from_constant(Polynomial::constant(4, c(1.0, 2.0)), &Form::scalar(4, c(1.0, 0.0)));
        let (a, b) = quaternionic_d_plus(&f, 1, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(a.max_norm() == 0.0 && b.max_norm() == 0.0);
    }

    #[test]
    fn d_plus_rejects_off_weight_input() {
        // ξ_0∧ξ̄_0 − ξ_1∧ξ̄_1 is a multiple of the anti-self-dual dx_01 − dx_23, of weight 0.
        let w = xi_form(1, 0).wedge(&xi_bar_form(1, 0)).sub(&xi_form(1, 1).wedge(&xi_bar_form(1, 1)));
        let f = PolyForm::from_constant(Polynomial::coordinate(4, 0), &w);
        assert!(matches!(quaternionic_d_plus(&f, 1, &[0.1, 0.2, 0.3, 0.4]), Err(FieldError::NotTopWeight(_))));
    }
}
