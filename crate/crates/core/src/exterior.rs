//! Sparse exterior algebra over a real coordinate coframe `dx_0 .. dx_{N-1}`.
//!
//! A basis monomial `dx_{i1} ∧ .. ∧ dx_{ik}` (with `i1 < .. < ik`) is stored as
//! the bitmask with bits `i1..ik` set, so `N ≤ 32`. Coefficients are generic:
//! `f64`, `Complex<f64>`, or complex jets for differentiable fields.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex64;
use num_traits::Num;

use crate::linalg::Mat;

/// Coefficient ring for forms.
pub trait Coeff: Copy + Num + Neg<Output = Self> + Send + Sync + Debug + 'static {}
impl<T> Coeff for T where T: Copy + Num + Neg<Output = T> + Send + Sync + Debug + 'static {}

pub const MAX_DIM: usize = 32;

/// Sign of `dx_a ∧ dx_b` relative to the sorted monomial `dx_{a|b}`.
/// Caller guarantees `a & b == 0`.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j >> 1).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign picked up when `dx_from` (a member of `mask`) is replaced in place by
/// `dx_to` (not a member) and the monomial is re-sorted.
fn replace_sign(mask: u32, from: u32, to: u32) -> i32 {
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = if hi - lo <= 1 { 0 } else { ((1u32 << hi) - 1) & !((1u32 << (lo + 1)) - 1) };
    if (mask & between).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            Some(j as usize)
        }
    })
}

/// All monomials of degree `p` in `dim` variables, in increasing mask order.
pub fn monomials(dim: usize, p: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(start: usize, dim: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..dim {
            rec(i + 1, dim, left - 1, acc | (1 << i), out);
        }
    }
    rec(0, dim, p, 0, &mut out);
    out.sort_unstable();
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form<T> {
    dim: usize,
    terms: BTreeMap<u32, T>,
}

impl<T: Coeff> Form<T> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "form dimension {dim} exceeds {MAX_DIM}");
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: T) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(0, c);
        f
    }

    pub fn dx(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut f = Self::zero(dim);
        f.add_term(1 << i, T::one());
        f
    }

    pub fn monomial(dim: usize, mask: u32, c: T) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(mask, c);
        f
    }

    pub fn from_covector(coeffs: &[T]) -> Self {
        let mut f = Self::zero(coeffs.len());
        for (i, &c) in coeffs.iter().enumerate() {
            f.add_term(1 << i, c);
        }
        f
    }

    /// The 2-form `Σ_{i<j} W_ij dx_i ∧ dx_j` of an antisymmetric matrix, i.e.
    /// the form with `ω(X, Y) = Xᵀ W Y`.
    pub fn from_antisymmetric(w: &Mat<T>) -> Self {
        let n = w.rows();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                f.add_term((1 << i) | (1 << j), w[(i, j)]);
            }
        }
        f
    }

    /// Antisymmetric matrix of the degree-2 part.
    pub fn to_antisymmetric(&self) -> Mat<T> {
        let mut w = Mat::zeros(self.dim, self.dim);
        for (&m, &c) in &self.terms {
            if m.count_ones() == 2 {
                let i = m.trailing_zeros() as usize;
                let j = 31 - m.leading_zeros() as usize;
                w[(i, j)] = c;
                w[(j, i)] = -c;
            }
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u32) -> T {
        self.terms.get(&mask).copied().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, mask: u32, c: T) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(T::zero);
        *e = *e + c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    /// Degrees present with a nonzero coefficient.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn grade(&self, p: usize) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.count_ones() as usize == p)
                .map(|(&m, &c)| (m, c))
                .collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = self.clone();
        for (m, c) in o.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> Form<U> {
        let mut out = Form::zero(self.dim);
        for (m, c) in self.terms() {
            out.add_term(m, f(c));
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in o.terms() {
                if a & b != 0 {
                    continue;
                }
                let p = ca * cb;
                out.add_term(a | b, if wedge_sign(a, b) > 0 { p } else { -p });
            }
        }
        out
    }

    /// Extends a linear map on covectors to Λ* as a derivation. Row `r` of
    /// `map` holds the image of `dx_r` in the `dx` basis.
    pub fn derivation(&self, map: &Mat<T>) -> Self {
        assert_eq!(map.rows(), self.dim);
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            for i in bits(m) {
                for j in 0..self.dim {
                    let a = map[(i, j)];
                    if a.is_zero() {
                        continue;
                    }
                    if j == i {
                        out.add_term(m, c * a);
                    } else if m & (1 << j) == 0 {
                        let nm = (m & !(1 << i)) | (1 << j);
                        let v = c * a;
                        out.add_term(nm, if replace_sign(m, i as u32, j as u32) > 0 { v } else { -v });
                    }
                }
            }
        }
        out
    }

    /// Extends a linear map on covectors to Λ* multiplicatively.
    pub fn automorphism(&self, map: &Mat<T>) -> Self {
        assert_eq!(map.rows(), self.dim);
        let images: Vec<Self> = (0..self.dim)
            .map(|r| Self::from_covector(&(0..self.dim).map(|c| map[(r, c)]).collect::<Vec<_>>()))
            .collect();
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            let mut acc = Self::scalar(self.dim, c);
            for i in bits(m) {
                acc = acc.wedge(&images[i]);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Evaluates the degree-`k` part on `k` vectors (`k = vectors.len()`).
    pub fn eval(&self, vectors: &[&[T]]) -> T {
        let k = vectors.len();
        let mut total = T::zero();
        for (m, c) in self.terms() {
            if m.count_ones() as usize != k {
                continue;
            }
            let idx: Vec<usize> = bits(m).collect();
            let sub = Mat::from_fn(k, k, |r, s| vectors[s][idx[r]]);
            total = total + c * determinant(&sub);
        }
        total
    }

    /// Contraction `ι_v` of a vector into the first slot.
    pub fn interior(&self, v: &[T]) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            for (pos, i) in bits(m).enumerate() {
                let s = if pos % 2 == 0 { c * v[i] } else { -(c * v[i]) };
                out.add_term(m & !(1 << i), s);
            }
        }
        out
    }
}

/// Determinant by cofactor expansion; only used for tiny matrices.
pub fn determinant<T: Coeff>(m: &Mat<T>) -> T {
    let n = m.rows();
    match n {
        0 => T::one(),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => {
            let mut acc = T::zero();
            for c in 0..n {
                let minor = Mat::from_fn(n - 1, n - 1, |r, s| m[(r + 1, if s < c { s } else { s + 1 })]);
                let t = m[(0, c)] * determinant(&minor);
                acc = if c % 2 == 0 { acc + t } else { acc - t };
            }
            acc
        }
    }
}

impl Form<f64> {
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn complexify(&self) -> Form<Complex64> {
        self.map(|c| Complex64::new(c, 0.0))
    }
}

impl Form<Complex64> {
    pub fn max_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn real_part(&self) -> Form<f64> {
        self.map(|c| c.re)
    }

    /// Drops coefficients below `eps` in modulus.
    pub fn pruned(&self, eps: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > eps).map(|(&m, &c)| (m, c)).collect(),
        }
    }

    /// Max-modulus distance to another form.
    pub fn distance(&self, o: &Self) -> f64 {
        self.sub(o).max_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basic_wedge() {
        let a = Form::<f64>::dx(4, 0);
        let b = Form::<f64>::dx(4, 1);
        assert_eq!(a.wedge(&b).coeff(0b11), 1.0);
        assert_eq!(b.wedge(&a).coeff(0b11), -1.0);
        assert!(a.wedge(&a).is_empty());
    }

    #[test]
    fn signs_of_three_forms() {
        let e = |i| Form::<f64>::dx(5, i);
        // dx2 ∧ dx0 ∧ dx4 = - dx0 ∧ dx2 ∧ dx4
        let f = e(2).wedge(&e(0)).wedge(&e(4));
        assert_eq!(f.coeff(0b10101), -1.0);
    }

    #[test]
    fn eval_matches_antisymmetric_matrix() {
        let w = Form::<f64>::dx(4, 0).wedge(&Form::dx(4, 2)).scale(3.0);
        let u = [1.0, 2.0, 3.0, 4.0];
        let v = [0.5, -1.0, 2.0, 0.0];
        let direct = 3.0 * (u[0] * v[2] - u[2] * v[0]);
        assert!((w.eval(&[&u, &v]) - direct).abs() < 1e-14);
        let m = w.to_antisymmetric();
        let via = (0..4).map(|i| (0..4).map(|j| u[i] * m[(i, j)] * v[j]).sum::<f64>()).sum::<f64>();
        assert!((via - direct).abs() < 1e-14);
    }

    #[test]
    fn derivation_is_leibniz() {
        let dim = 4;
        let map = Mat::from_fn(dim, dim, |r, s| c((r * 3 + s * 7) as f64 % 5.0 - 2.0));
        let a = Form::from_covector(&[c(1.0), c(2.0), c(0.0), c(-1.0)]);
        let b = Form::from_covector(&[c(0.0), c(1.0), c(3.0), c(1.0)]);
        let lhs = a.wedge(&b).derivation(&map);
        let rhs = a.derivation(&map).wedge(&b).add(&a.wedge(&b.derivation(&map)));
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn automorphism_is_multiplicative() {
        let dim = 5;
        let map = Mat::from_fn(dim, dim, |r, s| c(((r + 2 * s) % 3) as f64 - 1.0));
        let a = Form::from_covector(&[c(1.0), c(2.0), c(0.0), c(-1.0), c(0.5)]);
        let b = Form::from_covector(&[c(0.0), c(1.0), c(3.0), c(1.0), c(-2.0)]);
        let lhs = a.wedge(&b).automorphism(&map);
        let rhs = a.automorphism(&map).wedge(&b.automorphism(&map));
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn monomial_counts() {
        for p in 0..=8 {
            assert_eq!(monomials(8, p).len(), binomial(8, p));
        }
    }

    fn arb_form(dim: usize, p: usize) -> impl Strategy<Value = Form<f64>> {
        let mons = monomials(dim, p);
        proptest::collection::vec(-2.0f64..2.0, mons.len()).prop_map(move |cs| {
            let mut f = Form::zero(dim);
            for (m, c) in mons.iter().zip(cs) {
                f.add_term(*m, c);
            }
            f
        })
    }

    proptest! {
        #[test]
        fn graded_commutativity(a in arb_form(6, 1), b in arb_form(6, 2), c in arb_form(6, 3)) {
            let pairs = [(&a, 1usize, &b, 2usize), (&a, 1, &c, 3), (&b, 2, &c, 3), (&c, 3, &c, 3)];
            for (x, p, y, q) in pairs {
                let xy = x.wedge(y);
                let yx = y.wedge(x).scale(if (p * q) % 2 == 0 { 1.0 } else { -1.0 });
                prop_assert!(xy.sub(&yx).max_abs() < 1e-12);
            }
        }

        #[test]
        fn wedge_is_associative(a in arb_form(5, 1), b in arb_form(5, 2), c in arb_form(5, 1)) {
            let l = a.wedge(&b).wedge(&c);
            let r = a.wedge(&b.wedge(&c));
            prop_assert!(l.sub(&r).max_abs() < 1e-12);
        }
    }
}
