//! The complexified exterior algebra at a point: Hodge types, the su(2)
//! operators `𝓘, 𝓙, 𝓚, 𝓡`, weight decomposition and q-positivity.
//!
//! Elements are [`Form`]s with complex coefficients in the real `dx` basis;
//! the holomorphic coframe `ξ_a` is available through [`xi_form`]. Everything
//! that only needs ring operations is generic over [`Real`] so it can run on
//! jets; spectral work (weights, positivity) is `f64`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use thiserror::Error;

use crate::exterior::{binomial, monomials, Form};
use crate::jet::Real;
use crate::linalg::Mat;
use crate::quaternion::ImaginaryUnit;

pub type ExteriorElement = Form<Complex64>;

#[derive(Debug, Error, PartialEq)]
pub enum PointwiseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected Hodge type {expected:?}, found components of type {found:?}")]
    WrongType { expected: (usize, usize), found: Vec<(usize, usize)> },
    #[error("form is not q-real (residual {0:e})")]
    NotQReal(f64),
    #[error("Casimir eigenvalue {value} is {residual:e} away from any w(w+2)")]
    NumericalFailure { value: f64, residual: f64 },
    #[error("Casimir is not symmetric in the coordinate basis (asymmetry {0:e}); use an orthonormal frame")]
    NonOrthogonalStructure(f64),
}

pub fn cx<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

pub fn complexify_mat<R: Real>(m: &Mat<R>) -> Mat<Complex<R>> {
    m.map(|x| Complex::new(x, R::zero()))
}

pub fn conj_form<R: Real>(f: &Form<Complex<R>>) -> Form<Complex<R>> {
    f.map(|c| Complex::new(c.re, -c.im))
}

/// A pointwise hypercomplex structure: three endomorphisms of `ℝ^N` acting on
/// tangent vectors, with `IJ = K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypercomplex<R> {
    pub i: Mat<R>,
    pub j: Mat<R>,
    pub k: Mat<R>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Su2Generator {
    I,
    J,
    K,
}

impl Hypercomplex<f64> {
    pub fn flat(n: usize) -> Self {
        Self {
            i: ImaginaryUnit::I.tangent_matrix(n),
            j: ImaginaryUnit::J.tangent_matrix(n),
            k: ImaginaryUnit::K.tangent_matrix(n),
        }
    }

    pub fn induced(&self, l: ImaginaryUnit) -> Mat<f64> {
        let [a, b, c] = l.coefficients();
        &(&self.i.scale(a) + &self.j.scale(b)) + &self.k.scale(c)
    }
}

impl<R: Real> Hypercomplex<R> {
    pub fn dim(&self) -> usize {
        self.i.rows()
    }

    pub fn get(&self, which: Su2Generator) -> &Mat<R> {
        match which {
            Su2Generator::I => &self.i,
            Su2Generator::J => &self.j,
            Su2Generator::K => &self.k,
        }
    }

    /// Largest violation of `L² = −1` and `IJ = K`.
    pub fn quaternionic_residual(&self) -> f64 {
        let n = self.dim();
        let id = Mat::<R>::identity(n);
        let mut worst = 0.0f64;
        for l in [&self.i, &self.j, &self.k] {
            let sq = &(l * l) + &id;
            worst = worst.max(sq.as_slice().iter().fold(0.0, |m, x| m.max(x.value().abs())));
        }
        let ijk = &(&self.i * &self.j) - &self.k;
        worst.max(ijk.as_slice().iter().fold(0.0, |m, x| m.max(x.value().abs())))
    }
}

/// `𝓛`: the derivation of Λ* extending `α ↦ α ∘ L`.
pub fn su2_operator<R: Real>(s: &Hypercomplex<R>, which: Su2Generator, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    eta.derivation(&complexify_mat(s.get(which)))
}

/// `H = −√−1 𝓘`, acting on `(p,q)`-forms by `p − q`.
pub fn weight_h<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    su2_operator(s, Su2Generator::I, eta).scale(cx(0.0, -1.0))
}

/// The raising operator `𝓡 = (√−1 𝓙 − 𝓚)/2`, of type `(1,−1)`.
pub fn raising_r<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    let j = su2_operator(s, Su2Generator::J, eta).scale(cx(0.0, 0.5));
    let k = su2_operator(s, Su2Generator::K, eta).scale(cx(-0.5, 0.0));
    j.add(&k)
}

/// The complex conjugate operator `𝓡̄ = (−√−1 𝓙 − 𝓚)/2`.
pub fn raising_r_bar<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    let j = su2_operator(s, Su2Generator::J, eta).scale(cx(0.0, -0.5));
    let k = su2_operator(s, Su2Generator::K, eta).scale(cx(-0.5, 0.0));
    j.add(&k)
}

/// The lowering operator `−𝓡̄`, normalized so that `[𝓡, lowering] = H`.
pub fn lowering<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    raising_r_bar(s, eta).scale(cx(-1.0, 0.0))
}

/// Multiplicative action of `J` on forms, `J·α = −α ∘ J` on covectors.
pub fn j_action<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    eta.automorphism(&complexify_mat(&s.j.scale(-R::one())))
}

/// Inverse of [`j_action`] on a form of pure degree `p`.
pub fn j_inverse<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>, p: usize) -> Form<Complex<R>> {
    let x = j_action(s, eta);
    if p.is_multiple_of(2) {
        x
    } else {
        x.scale(cx(-1.0, 0.0))
    }
}

/// Component of `eta` of Hodge type `(p,q)` for the complex structure `l`.
///
/// Uses the derivation `N̂` extending `α ↦ (α + √−1 α∘L)/2`, which counts
/// antiholomorphic degree, and the Lagrange projector onto its eigenvalue `q`.
pub fn type_component<R: Real>(eta: &Form<Complex<R>>, l: &Mat<R>, p: usize, q: usize) -> Form<Complex<R>> {
    let deg = p + q;
    let n = l.rows();
    let counter = Mat::from_fn(n, n, |r, c| {
        let diag = if r == c { R::from_f64(0.5) } else { R::zero() };
        Complex::new(diag, l[(r, c)] * R::from_f64(0.5))
    });
    let mut out = eta.grade(deg);
    for r in 0..=deg {
        if r == q || out.is_empty() {
            continue;
        }
        let shifted = out.derivation(&counter).sub(&out.scale(cx(r as f64, 0.0)));
        out = shifted.scale(cx(1.0 / (q as f64 - r as f64), 0.0));
    }
    out
}

/// Splits an element into its nonzero Hodge components for `l`.
pub fn type_decompose(eta: &ExteriorElement, l: &Mat<f64>) -> BTreeMap<(usize, usize), ExteriorElement> {
    let mut out = BTreeMap::new();
    for deg in eta.degrees() {
        for q in 0..=deg {
            let c = type_component(eta, l, deg - q, q);
            if c.max_norm() > 1e-13 * (1.0 + eta.max_norm()) {
                out.insert((deg - q, q), c);
            }
        }
    }
    out
}

/// Hodge type of a pure element, or the list of types present.
pub fn hodge_type(eta: &ExteriorElement, l: &Mat<f64>) -> Result<(usize, usize), Vec<(usize, usize)>> {
    let types: Vec<_> = type_decompose(eta, l).into_keys().collect();
    match types.as_slice() {
        [t] => Ok(*t),
        [] => Ok((0, 0)),
        _ => Err(types),
    }
}

pub fn expect_type(eta: &ExteriorElement, l: &Mat<f64>, expected: (usize, usize)) -> Result<(), PointwiseError> {
    match hodge_type(eta, l) {
        Ok(t) if t == expected || eta.max_norm() == 0.0 => Ok(()),
        Ok(t) => Err(PointwiseError::WrongType { expected, found: vec![t] }),
        Err(found) => Err(PointwiseError::WrongType { expected, found }),
    }
}

/// `ξ_a = dz_a` on `ℍⁿ`, `a = 0..2n`.
pub fn xi_form(n: usize, a: usize) -> ExteriorElement {
    Form::from_covector(&crate::quaternion::xi(n, a))
}

pub fn xi_bar_form(n: usize, a: usize) -> ExteriorElement {
    Form::from_covector(&crate::quaternion::xi_bar(n, a))
}

/// `ω_I = (√−1/2) Σ ξ_a ∧ ξ̄_a` on flat `ℍⁿ`.
pub fn flat_omega_i(n: usize) -> ExteriorElement {
    let mut out = Form::zero(4 * n);
    for a in 0..2 * n {
        out = out.add(&xi_form(n, a).wedge(&xi_bar_form(n, a)));
    }
    out.scale(Complex64::new(0.0, 0.5))
}

/// `Ω = ξ_0∧ξ_1 + ξ_2∧ξ_3 + …` on flat `ℍⁿ`.
pub fn flat_big_omega(n: usize) -> ExteriorElement {
    let mut out = Form::zero(4 * n);
    for m in 0..n {
        out = out.add(&xi_form(n, 2 * m).wedge(&xi_form(n, 2 * m + 1)));
    }
    out
}

/// Matrix of a linear operator on Λ^p in the monomial basis (columns are images).
pub fn operator_matrix(dim: usize, p: usize, op: impl Fn(&ExteriorElement) -> ExteriorElement) -> DMatrix<Complex64> {
    let basis = monomials(dim, p);
    let index: HashMap<u32, usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut out = DMatrix::zeros(basis.len(), basis.len());
    for (c, &m) in basis.iter().enumerate() {
        let image = op(&Form::monomial(dim, m, Complex64::new(1.0, 0.0)));
        for (mask, v) in image.terms() {
            let r = *index.get(&mask).expect("operator must preserve degree");
            out[(r, c)] += v;
        }
    }
    out
}

/// Casimir `C = H² + 2(𝓡·low + low·𝓡) = −(𝓘² + 𝓙² + 𝓚²)`, with eigenvalue
/// `w(w+2)` on weight-`w` isotypic components.
pub fn casimir<R: Real>(s: &Hypercomplex<R>, eta: &Form<Complex<R>>) -> Form<Complex<R>> {
    let h = weight_h(s, &weight_h(s, eta));
    let rl = raising_r(s, &lowering(s, eta));
    let lr = lowering(s, &raising_r(s, eta));
    h.add(&rl.add(&lr).scale(cx(2.0, 0.0)))
}

/// Orthogonal projectors onto the weight spaces of Λ^p.
#[derive(Debug)]
pub struct WeightProjectors {
    pub dim: usize,
    pub degree: usize,
    pub basis: Vec<u32>,
    /// `(w, P_w)` in increasing `w`; each `P_w` is real symmetric.
    pub projectors: Vec<(usize, DMatrix<f64>)>,
    /// Largest distance of a Casimir eigenvalue from its snapped value.
    pub snap_residual: f64,
}

type ProjectorCache = HashMap<(usize, usize), Arc<WeightProjectors>>;

impl WeightProjectors {
    pub fn new(s: &Hypercomplex<f64>, p: usize) -> Result<Self, PointwiseError> {
        let dim = s.dim();
        let basis = monomials(dim, p);
        let c = operator_matrix(dim, p, |e| {
            let mut acc = Form::zero(dim);
            for g in [Su2Generator::I, Su2Generator::J, Su2Generator::K] {
                acc = acc.sub(&su2_operator(s, g, &su2_operator(s, g, e)));
            }
            acc
        });
        let real = c.map(|z| z.re);
        let imag = c.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let asym = (&real - real.transpose()).amax().max(imag);
        if asym > 1e-12 {
            return Err(PointwiseError::NonOrthogonalStructure(asym));
        }
        let eig = real.symmetric_eigen();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut snap_residual = 0.0f64;
        for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
            let w = ((1.0 + lambda.max(0.0)).sqrt() - 1.0).round().max(0.0) as usize;
            let residual = (lambda - (w * (w + 2)) as f64).abs();
            if residual > 1e-9 {
                return Err(PointwiseError::NumericalFailure { value: lambda, residual });
            }
            snap_residual = snap_residual.max(residual);
            groups.entry(w).or_default().push(idx);
        }
        let n = basis.len();
        let projectors = groups
            .into_iter()
            .map(|(w, cols)| {
                let mut proj = DMatrix::zeros(n, n);
                for c in cols {
                    let v = eig.eigenvectors.column(c);
                    proj += v * v.transpose();
                }
                (w, proj)
            })
            .collect();
        Ok(Self { dim, degree: p, basis, projectors, snap_residual })
    }

    /// Cached projectors for the flat structure on `ℍⁿ`.
    pub fn flat(n: usize, p: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<ProjectorCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().expect("cache poisoned").get(&(n, p)) {
            return hit.clone();
        }
        let fresh = Arc::new(Self::new(&Hypercomplex::flat(n), p).expect("flat Casimir is exact"));
        cache.lock().expect("cache poisoned").insert((n, p), fresh.clone());
        fresh
    }

    pub fn weight_dimension(&self, w: usize) -> usize {
        self.projectors
            .iter()
            .find(|(ww, _)| *ww == w)
            .map(|(_, p)| p.trace().round() as usize)
            .unwrap_or(0)
    }

    fn to_vector<R: Real>(&self, eta: &Form<Complex<R>>) -> (DVector<R>, DVector<R>) {
        let re = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&m| eta.coeff(m).re));
        let im = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&m| eta.coeff(m).im));
        (re, im)
    }

    /// Applies `P_w` to the degree-`p` part of `eta`; generic so jets pass through.
    pub fn project<R: Real + nalgebra::Scalar>(&self, eta: &Form<Complex<R>>, w: usize) -> Form<Complex<R>> {
        let mut out = Form::zero(self.dim);
        let Some((_, proj)) = self.projectors.iter().find(|(ww, _)| *ww == w) else {
            return out;
        };
        let (re, im) = self.to_vector(eta);
        for (r, &m) in self.basis.iter().enumerate() {
            let mut a = R::zero();
            let mut b = R::zero();
            for c in 0..self.basis.len() {
                let pc = proj[(r, c)];
                if pc == 0.0 {
                    continue;
                }
                let pc = R::from_f64(pc);
                a += pc * re[c];
                b += pc * im[c];
            }
            out.add_term(m, Complex::new(a, b));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct WeightDecomposition {
    pub components: Vec<(usize, ExteriorElement)>,
}

impl WeightDecomposition {
    pub fn component(&self, w: usize) -> Option<&ExteriorElement> {
        self.components.iter().find(|(ww, _)| *ww == w).map(|(_, c)| c)
    }

    pub fn sum(&self, dim: usize) -> ExteriorElement {
        self.components.iter().fold(Form::zero(dim), |acc, (_, c)| acc.add(c))
    }
}

/// Splits a degree-`p` element into su(2) isotypic components.
pub fn weight_decompose(s: &Hypercomplex<f64>, eta: &ExteriorElement) -> Result<WeightDecomposition, PointwiseError> {
    let degrees = eta.degrees();
    let p = match degrees.as_slice() {
        [] => 0,
        [p] => *p,
        _ => {
            return Err(PointwiseError::WrongType { expected: (degrees[0], 0), found: vec![] });
        }
    };
    if p > s.dim() {
        return Err(PointwiseError::DimensionMismatch { expected: s.dim(), got: p });
    }
    let proj = if *s == Hypercomplex::flat(s.dim() / 4) {
        WeightProjectors::flat(s.dim() / 4, p)
    } else {
        Arc::new(WeightProjectors::new(s, p)?)
    };
    let negligible = 1e-13 * (1.0 + eta.max_norm());
    let components = proj
        .projectors
        .iter()
        .map(|(w, _)| (*w, proj.project(eta, *w)))
        .filter(|(_, c)| c.max_norm() > negligible)
        .collect();
    Ok(WeightDecomposition { components })
}

/// `dim Λ^p₊ = (p+1)·C(2n, p)`.
pub fn top_weight_dimension_formula(n: usize, p: usize) -> usize {
    (p + 1) * binomial(2 * n, p)
}

/// Residual of `J(η̄) = η` for a `(2,0)`-form.
pub fn q_real_residual(s: &Hypercomplex<f64>, eta: &ExteriorElement) -> Result<f64, PointwiseError> {
    expect_type(eta, &s.i, (2, 0))?;
    Ok(j_action(s, &eta.conj()).distance(eta))
}

pub fn q_real_check(s: &Hypercomplex<f64>, eta: &ExteriorElement, tol: f64) -> Result<bool, PointwiseError> {
    Ok(q_real_residual(s, eta)? <= tol * (1.0 + eta.max_norm()))
}

/// Basis `t_a = (v − √−1 I v)/2` of `T^{1,0}_I`, chosen greedily from the
/// coordinate vectors.
pub fn holomorphic_frame(i: &Mat<f64>) -> Vec<Vec<Complex64>> {
    let n = i.rows();
    let mut frame: Vec<Vec<Complex64>> = Vec::new();
    let mut ortho: Vec<DVector<Complex64>> = Vec::new();
    for r in 0..n {
        let t: Vec<Complex64> = (0..n)
            .map(|c| Complex64::new(if c == r { 0.5 } else { 0.0 }, -0.5 * i[(c, r)]))
            .collect();
        let mut v = DVector::from_vec(t.clone());
        for u in &ortho {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            ortho.push(v / Complex64::new(norm, 0.0));
            frame.push(t);
        }
        if frame.len() == n / 2 {
            break;
        }
    }
    frame
}

/// `η(x, J x̄)` for a complex vector `x`.
pub fn hermitian_value(s: &Hypercomplex<f64>, eta: &ExteriorElement, x: &[Complex64]) -> Complex64 {
    let xbar: Vec<Complex64> = x.iter().map(|c| c.conj()).collect();
    let jx = complexify_mat(&s.j).mul_vec(&xbar);
    eta.grade(2).eval(&[x, &jx])
}

/// `H_η(a,b) = η(t_a, J t̄_b)` on the holomorphic frame.
pub fn hermitian_matrix(s: &Hypercomplex<f64>, eta: &ExteriorElement) -> (Vec<Vec<Complex64>>, DMatrix<Complex64>) {
    let frame = holomorphic_frame(&s.i);
    let jm = complexify_mat(&s.j);
    let eta2 = eta.grade(2);
    let m = frame.len();
    let jbar: Vec<Vec<Complex64>> = frame
        .iter()
        .map(|t| jm.mul_vec(&t.iter().map(|c| c.conj()).collect::<Vec<_>>()))
        .collect();
    let h = DMatrix::from_fn(m, m, |a, b| eta2.eval(&[&frame[a], &jbar[b]]));
    (frame, h)
}

#[derive(Clone, Debug)]
pub struct QPositivity {
    pub positive: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `λ_min − floor`; positive iff the test passed.
    pub margin: f64,
    pub hermitian_residual: f64,
    /// A `(1,0)`-vector `v` with `η(v, J v̄)` below the threshold.
    pub witness: Option<Vec<Complex64>>,
}

pub const PSD_FLOOR: f64 = 1e-10;

/// Decides (strict) q-positivity of a q-real `(2,0)`-form.
pub fn q_positive_check(s: &Hypercomplex<f64>, eta: &ExteriorElement, strict: bool) -> Result<QPositivity, PointwiseError> {
    let residual = q_real_residual(s, eta)?;
    if residual > 1e-9 * (1.0 + eta.max_norm()) {
        return Err(PointwiseError::NotQReal(residual));
    }
    let (frame, h) = hermitian_matrix(s, eta);
    let hermitian_residual = (&h - h.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let sym = (&h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let (mut imin, mut imax) = (0, 0);
    for (idx, &l) in eig.eigenvalues.iter().enumerate() {
        if l < eig.eigenvalues[imin] {
            imin = idx;
        }
        if l > eig.eigenvalues[imax] {
            imax = idx;
        }
    }
    let (lmin, lmax) = (eig.eigenvalues[imin], eig.eigenvalues[imax]);
    let scale = PSD_FLOOR * (1.0 + lmax.abs());
    let floor = if strict { scale } else { -scale };
    let margin = lmin - floor;
    let positive = if strict { margin > 0.0 } else { margin >= 0.0 };
    let witness = (!positive).then(|| {
        let coeffs = eig.eigenvectors.column(imin);
        let n = s.dim();
        (0..n).map(|r| (0..frame.len()).map(|a| coeffs[a] * frame[a][r]).sum()).collect()
    });
    Ok(QPositivity { positive, min_eigenvalue: lmin, max_eigenvalue: lmax, margin, hermitian_residual, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_form(dim: usize, p: usize, rng: &mut ChaCha8Rng) -> ExteriorElement {
        let mut f = Form::zero(dim);
        for m in monomials(dim, p) {
            f.add_term(m, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        f
    }

    #[test]
    fn i_operator_on_simple_types() {
        let s = Hypercomplex::flat(1);
        let x = xi_form(1, 0).wedge(&xi_form(1, 1));
        assert!(su2_operator(&s, Su2Generator::I, &x).distance(&x.scale(c(0.0, 2.0))) < 1e-14);
        let y = xi_form(1, 0).wedge(&xi_bar_form(1, 0));
        assert!(su2_operator(&s, Su2Generator::I, &y).max_norm() < 1e-14);
    }

    #[test]
    fn su2_commutators_on_two_forms() {
        let s = Hypercomplex::flat(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eta = random_form(8, 2, &mut rng);
        let op = |g, e: &ExteriorElement| su2_operator(&s, g, e);
        use Su2Generator::*;
        // Precomposition reverses products, so the derivations satisfy
        // [𝓘, 𝓙] = −2𝓚 when IJ = K.
        for (a, b, cc) in [(I, J, K), (J, K, I), (K, I, J)] {
            let lhs = op(a, &op(b, &eta)).sub(&op(b, &op(a, &eta)));
            let rhs = op(cc, &eta).scale(c(-2.0, 0.0));
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn raising_omega_i_gives_big_omega() {
        for n in 1..=3 {
            let s = Hypercomplex::flat(n);
            let r = raising_r(&s, &flat_omega_i(n));
            assert!(r.distance(&flat_big_omega(n)) < 1e-12);
        }
    }

    #[test]
    fn raising_kills_holomorphic_forms_and_raises_type() {
        let s = Hypercomplex::flat(2);
        let x = xi_form(2, 0).wedge(&xi_form(2, 3));
        assert!(raising_r(&s, &x).max_norm() < 1e-14);
        // 𝓡(ξ_0 ∧ ξ̄_0): oracle from 𝓡ξ̄_a = −√−1 J·ξ̄_a and J·ξ̄_0 = ξ_1.
        let y = xi_form(1, 0).wedge(&xi_bar_form(1, 0));
        let expected = xi_form(1, 0).wedge(&xi_form(1, 1)).scale(c(0.0, -1.0));
        let s1 = Hypercomplex::flat(1);
        assert!(raising_r(&s1, &y).distance(&expected) < 1e-14);
    }

    #[test]
    fn sl2_relations_on_all_degrees() {
        for n in 1..=2 {
            let s = Hypercomplex::flat(n);
            let dim = 4 * n;
            for p in 0..=dim {
                for m in monomials(dim, p) {
                    let e = Form::monomial(dim, m, c(1.0, 0.0));
                    let h_r = weight_h(&s, &raising_r(&s, &e)).sub(&raising_r(&s, &weight_h(&s, &e)));
                    assert!(h_r.distance(&raising_r(&s, &e).scale(c(2.0, 0.0))) < 1e-12);
                    let h_l = weight_h(&s, &lowering(&s, &e)).sub(&lowering(&s, &weight_h(&s, &e)));
                    assert!(h_l.distance(&lowering(&s, &e).scale(c(-2.0, 0.0))) < 1e-12);
                    let r_l = raising_r(&s, &lowering(&s, &e)).sub(&lowering(&s, &raising_r(&s, &e)));
                    assert!(r_l.distance(&weight_h(&s, &e)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weight_dimensions_match_formula() {
        let two = WeightProjectors::flat(1, 2);
        assert_eq!(two.weight_dimension(2), 3);
        assert_eq!(two.weight_dimension(0), 3);
        for p in 0..=4 {
            let w = WeightProjectors::flat(2, p);
            assert_eq!(w.weight_dimension(p), top_weight_dimension_formula(2, p));
        }
    }

    #[test]
    fn scalar_has_single_weight_zero_component() {
        let s = Hypercomplex::flat(1);
        let d = weight_decompose(&s, &Form::scalar(4, c(2.5, -1.0))).unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].0, 0);
        assert!(d.components[0].1.distance(&Form::scalar(4, c(2.5, -1.0))) < 1e-14);
    }

    #[test]
    fn hermitian_forms_span_weight_two() {
        let s = Hypercomplex::flat(2);
        let g = Mat::<f64>::identity(8);
        for l in [&s.i, &s.j, &s.k] {
            let w = Form::from_antisymmetric(&(&l.transpose() * &g)).complexify();
            let d = weight_decompose(&s, &w).unwrap();
            assert_eq!(d.components.len(), 1);
            assert_eq!(d.components[0].0, 2);
        }
    }

    #[test]
    fn wedge_of_omega_with_itself() {
        let o = flat_big_omega(2);
        let expected = xi_form(2, 0).wedge(&xi_form(2, 1)).wedge(&xi_form(2, 2)).wedge(&xi_form(2, 3)).scale(c(2.0, 0.0));
        assert!(o.wedge(&o).distance(&expected) < 1e-14);
    }

    #[test]
    fn q_reality() {
        let s = Hypercomplex::flat(2);
        let o = flat_big_omega(2);
        assert!(q_real_check(&s, &o, 1e-12).unwrap());
        assert!(!q_real_check(&s, &o.scale(c(0.0, 1.0)), 1e-12).unwrap());
        // Oracle: J(conj(ξ0∧ξ2 + ξ3∧ξ1)) = ξ1∧ξ3 + ξ2∧ξ0 = −(ξ0∧ξ2 + ξ3∧ξ1).
        let x = |a| xi_form(2, a);
        let eta = x(0).wedge(&x(2)).add(&x(3).wedge(&x(1)));
        assert!(j_action(&s, &eta.conj()).distance(&eta.scale(c(-1.0, 0.0))) < 1e-14);
        assert!(!q_real_check(&s, &eta, 1e-12).unwrap());
        assert!(q_real_check(&s, &eta.scale(c(0.0, 1.0)), 1e-12).unwrap());
        assert!(matches!(q_real_check(&s, &x(0), 1e-12), Err(PointwiseError::WrongType { .. })));
    }

    #[test]
    fn q_positivity_examples() {
        let s = Hypercomplex::flat(2);
        let o = flat_big_omega(2);
        assert!(q_positive_check(&s, &o, true).unwrap().positive);
        let zero = Form::zero(8);
        assert!(q_positive_check(&s, &zero, false).unwrap().positive);
        assert!(!q_positive_check(&s, &zero, true).unwrap().positive);

        let x = |a| xi_form(2, a);
        let eta = x(0).wedge(&x(1)).scale(c(2.0, 0.0)).add(&x(2).wedge(&x(3)).scale(c(-1.0, 0.0)));
        let res = q_positive_check(&s, &eta, false).unwrap();
        assert!(!res.positive);
        // Eigenvalue oracle: in the frame dual to ξ, J t̄_0 = t_1 and J t̄_1 = −t_0,
        // so H_η = diag(2, 2, −1, −1).
        assert!((res.min_eigenvalue + 1.0).abs() < 1e-12, "{}", res.min_eigenvalue);
        assert!((res.max_eigenvalue - 2.0).abs() < 1e-12);
        let w = res.witness.unwrap();
        assert!(w[..4].iter().all(|z| z.norm() < 1e-12));
        assert!(hermitian_value(&s, &eta, &w).re < 0.0);
    }

    #[test]
    fn hodge_type_detection() {
        let s = Hypercomplex::flat(1);
        assert_eq!(hodge_type(&xi_form(1, 0).wedge(&xi_bar_form(1, 1)), &s.i), Ok((1, 1)));
        assert_eq!(hodge_type(&xi_form(1, 0).wedge(&xi_form(1, 1)), &s.i), Ok((2, 0)));
        let mixed = Form::dx(4, 0).wedge(&Form::dx(4, 2)).complexify();
        assert!(hodge_type(&mixed, &s.i).is_err());
    }

    /// The invariant (1,1)-forms are the kernel of 𝓡 on Λ^{1,1}.
    fn invariant_11_basis(n: usize) -> (Vec<ExteriorElement>, Vec<ExteriorElement>) {
        let s = Hypercomplex::flat(n);
        let proj = WeightProjectors::flat(n, 2);
        let mut inv = Vec::new();
        let mut rest = Vec::new();
        for a in 0..2 * n {
            for b in 0..2 * n {
                let e = xi_form(n, a).wedge(&xi_bar_form(n, b));
                inv.push(proj.project(&e, 0));
                let top = proj.project(&e, 2);
                rest.push(type_component(&top, &s.i, 1, 1));
            }
        }
        (inv, rest)
    }

    #[test]
    fn invariant_11_forms_are_killed_by_r_and_conversely() {
        let n = 2;
        let s = Hypercomplex::flat(n);
        let (inv, rest) = invariant_11_basis(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut a = Form::zero(8);
            let mut b = Form::zero(8);
            for f in &inv {
                a = a.add(&f.scale(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
            for f in &rest {
                b = b.add(&f.scale(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
            assert!(raising_r(&s, &a).max_norm() < 1e-12);
            let d = weight_decompose(&s, &a).unwrap();
            assert!(d.components.iter().all(|(w, c)| *w == 0 || c.max_norm() < 1e-12));
            let mixed = a.add(&b);
            assert!(raising_r(&s, &mixed).max_norm() > 1e-3);
        }
    }

    #[test]
    fn raising_is_isomorphism_between_top_weight_types() {
        let n = 2;
        let s = Hypercomplex::flat(n);
        for p in 1..=3usize {
            let proj = WeightProjectors::flat(n, p);
            let basis = monomials(8, p);
            for q in 1..=p {
                let span: Vec<ExteriorElement> = basis
                    .iter()
                    .map(|&m| type_component(&proj.project(&Form::monomial(8, m, c(1.0, 0.0)), p), &s.i, p - q, q))
                    .collect();
                let images: Vec<ExteriorElement> = span.iter().map(|e| raising_r(&s, e)).collect();
                let rank = |fs: &[ExteriorElement]| {
                    let m = DMatrix::from_fn(basis.len(), fs.len(), |r, col| fs[col].coeff(basis[r]));
                    m.rank(1e-9)
                };
                assert_eq!(rank(&span), binomial(4, p));
                assert_eq!(rank(&images), binomial(4, p));
            }
        }
    }

    proptest! {
        #[test]
        fn weight_components_sum_to_input(seed in 0u64..1000, p in 0usize..=4) {
            let s = Hypercomplex::flat(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = random_form(4, p, &mut rng);
            let d = weight_decompose(&s, &eta).unwrap();
            prop_assert!(d.sum(4).distance(&eta) < 1e-12);
            for (w, comp) in &d.components {
                prop_assert!(*w <= p);
                let cas = casimir(&s, comp);
                prop_assert!(cas.distance(&comp.scale(c((w * (w + 2)) as f64, 0.0))) < 1e-10);
            }
        }

        #[test]
        fn type_components_sum_to_input(seed in 0u64..1000, p in 0usize..=4) {
            let s = Hypercomplex::flat(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = random_form(4, p, &mut rng);
            let parts = type_decompose(&eta, &s.i);
            let total = parts.values().fold(Form::zero(4), |a, b| a.add(b));
            prop_assert!(total.distance(&eta) < 1e-12);
            for ((pp, qq), part) in &parts {
                let h = weight_h(&s, part);
                prop_assert!(h.distance(&part.scale(c(*pp as f64 - *qq as f64, 0.0))) < 1e-12);
            }
        }

        #[test]
        fn diagonal_forms_are_q_positive_iff_coefficients_are(a1 in -3.0f64..3.0, a3 in -3.0f64..3.0) {
            let s = Hypercomplex::flat(2);
            let x = |a| xi_form(2, a);
            let eta = x(0).wedge(&x(1)).scale(c(a1, 0.0)).add(&x(2).wedge(&x(3)).scale(c(a3, 0.0)));
            let res = q_positive_check(&s, &eta, true).unwrap();
            prop_assert_eq!(res.positive, a1.min(a3) > PSD_FLOOR * (1.0 + a1.max(a3).abs()));
            prop_assert!(res.hermitian_residual < 1e-12);
        }
    }
}
