//! Quaternions and the flat hypercomplex model `ℝ^{4n} ≅ ℍⁿ`.
//!
//! Conventions (see `docs/CONVENTIONS.md`):
//! * coordinate block `m` carries `q_m = x_{4m} + i x_{4m+1} + j x_{4m+2} + k x_{4m+3}`;
//! * `I, J, K` act on tangent vectors by *left* multiplication by `i, j, k`,
//!   so `IJ = K` and the `I`-holomorphic coordinates are
//!   `z_{2m} = x_{4m} + √−1 x_{4m+1}`, `z_{2m+1} = x_{4m+2} + √−1 x_{4m+3}`;
//! * covectors are acted on by pullback, `L·α = α ∘ L⁻¹ = −α ∘ L`, which gives
//!   `J·ξ_{2m} = ξ̄_{2m+1}` and `J·ξ_{2m+1} = −ξ̄_{2m}`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Real;
use crate::linalg::Mat;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("imaginary unit has norm {0}, expected 1")]
    NotUnit(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn imaginary(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    /// Matrix of `v ↦ self · v` on `ℝ⁴` in the basis `1, i, j, k`.
    pub fn left_matrix(self) -> Mat<f64> {
        left_matrix_generic(self.to_array())
    }

    /// Matrix of `v ↦ v · self`.
    pub fn right_matrix(self) -> Mat<f64> {
        right_matrix_generic(self.to_array())
    }
}

/// Hamilton product on coefficient arrays, generic so jets can flow through.
pub fn qmul<R: Real>(a: [R; 4], b: [R; 4]) -> [R; 4] {
    let [w1, x1, y1, z1] = a;
    let [w2, x2, y2, z2] = b;
    [
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ]
}

pub fn qconj<R: Real>(a: [R; 4]) -> [R; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

fn unit<R: Real>(i: usize) -> [R; 4] {
    let mut e = [R::zero(); 4];
    e[i] = R::one();
    e
}

pub fn left_matrix_generic<R: Real>(a: [R; 4]) -> Mat<R> {
    let mut m = Mat::zeros(4, 4);
    for c in 0..4 {
        let col = qmul(a, unit(c));
        for r in 0..4 {
            m[(r, c)] = col[r];
        }
    }
    m
}

pub fn right_matrix_generic<R: Real>(a: [R; 4]) -> Mat<R> {
    let mut m = Mat::zeros(4, 4);
    for c in 0..4 {
        let col = qmul(unit(c), a);
        for r in 0..4 {
            m[(r, c)] = col[r];
        }
    }
    m
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let [w, x, y, z] = qmul(self.to_array(), o.to_array());
        Self::new(w, x, y, z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// A point `L = aI + bJ + cK` of the 2-sphere of induced complex structures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryUnit {
    a: f64,
    b: f64,
    c: f64,
}

impl ImaginaryUnit {
    pub const I: Self = Self { a: 1.0, b: 0.0, c: 0.0 };
    pub const J: Self = Self { a: 0.0, b: 1.0, c: 0.0 };
    pub const K: Self = Self { a: 0.0, b: 0.0, c: 1.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, AlgebraError> {
        let n = (a * a + b * b + c * c).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(AlgebraError::NotUnit(n));
        }
        Ok(Self { a, b, c })
    }

    /// Normalizes a nonzero direction onto the sphere.
    pub fn normalized(a: f64, b: f64, c: f64) -> Self {
        let n = (a * a + b * b + c * c).sqrt();
        Self { a: a / n, b: b / n, c: c / n }
    }

    pub fn coefficients(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.a, self.b, self.c)
    }

    /// The induced endomorphism of `ℝ^{4n}`.
    pub fn tangent_matrix(self, n: usize) -> Mat<f64> {
        block_diagonal(&self.quaternion().left_matrix(), n)
    }

    /// Orthogonality as imaginary quaternions.
    pub fn dot(self, o: Self) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c
    }
}

pub fn block_diagonal<T: Copy + num_traits::Num>(block: &Mat<T>, copies: usize) -> Mat<T> {
    let b = block.rows();
    let mut m = Mat::zeros(b * copies, b * copies);
    for i in 0..copies {
        m.set_block(i * b, i * b, block);
    }
    m
}

fn quaternionic_dim(len: usize) -> Result<usize, AlgebraError> {
    if len == 0 || !len.is_multiple_of(4) {
        return Err(AlgebraError::DimensionMismatch { expected: 4 * (len / 4).max(1), got: len });
    }
    Ok(len / 4)
}

/// `L · v` for a tangent vector of `ℝ^{4n}`.
pub fn act_on_tangent(l: ImaginaryUnit, v: &[f64]) -> Result<Vec<f64>, AlgebraError> {
    let n = quaternionic_dim(v.len())?;
    Ok(l.tangent_matrix(n).mul_vec(v))
}

/// `L · α = α ∘ L⁻¹` for a complexified covector given by its `dx`-components.
pub fn act_on_covector(l: ImaginaryUnit, alpha: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
    let n = quaternionic_dim(alpha.len())?;
    let m = l.tangent_matrix(n);
    Ok((0..alpha.len())
        .map(|c| -(0..alpha.len()).map(|r| alpha[r] * m[(r, c)]).sum::<Complex64>())
        .collect())
}

/// `dx`-components of the `I`-holomorphic coframe `ξ_a = dz_a` on `ℍⁿ`.
pub fn xi(n: usize, a: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 4 * n];
    v[2 * a] = Complex64::new(1.0, 0.0);
    v[2 * a + 1] = Complex64::new(0.0, 1.0);
    v
}

pub fn xi_bar(n: usize, a: usize) -> Vec<Complex64> {
    xi(n, a).into_iter().map(|c| c.conj()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(j * j, -Quaternion::ONE);
        assert_eq!(k * k, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn structure_matrices_are_quaternionic() {
        let i = ImaginaryUnit::I.tangent_matrix(2);
        let j = ImaginaryUnit::J.tangent_matrix(2);
        let k = ImaginaryUnit::K.tangent_matrix(2);
        assert_eq!(&i * &j, k);
        assert_eq!(&(&i * &i) + &Mat::identity(8), Mat::zeros(8, 8));
    }

    #[test]
    fn i_maps_e0_to_e1() {
        let v = act_on_tangent(ImaginaryUnit::I, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn j_on_holomorphic_coframe() {
        for n in 1..=2 {
            for m in 0..n {
                let a = 2 * m;
                let j1 = act_on_covector(ImaginaryUnit::J, &xi(n, a)).unwrap();
                let j2 = act_on_covector(ImaginaryUnit::J, &xi(n, a + 1)).unwrap();
                assert!(close(&j1, &xi_bar(n, a + 1)));
                let minus: Vec<_> = xi_bar(n, a).into_iter().map(|c| -c).collect();
                assert!(close(&j2, &minus));
            }
        }
    }

    #[test]
    fn j_tangent_on_dual_vectors() {
        // ∂/∂z_0 = (e0 - i e1)/2; J maps it to the vector dual to ξ̄_1 under the
        // pullback pairing, i.e. J(∂_{z0}) = ∂_{z̄1} (real form checked via the 4×4 block).
        let j = ImaginaryUnit::J.tangent_matrix(1);
        let dz0 = [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5), 0.0.into(), 0.0.into()];
        let image: Vec<Complex64> = (0..4).map(|r| (0..4).map(|c| dz0[c] * j[(r, c)]).sum()).collect();
        let dzbar1 = [0.0.into(), 0.0.into(), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)];
        assert!(close(&image, &dzbar1));
    }

    #[test]
    fn k_is_composite_of_i_and_j_on_covectors() {
        let x = xi(1, 0);
        let kx = act_on_covector(ImaginaryUnit::K, &x).unwrap();
        let ijx = act_on_covector(ImaginaryUnit::I, &act_on_covector(ImaginaryUnit::J, &x).unwrap()).unwrap();
        assert!(close(&kx, &ijx));
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(matches!(
            act_on_tangent(ImaginaryUnit::I, &[1.0, 2.0, 3.0]),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
        assert!(ImaginaryUnit::new(1.0, 1.0, 0.0).is_err());
    }

    fn unit_strategy() -> impl Strategy<Value = ImaginaryUnit> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| ImaginaryUnit::normalized(a, b, c))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in proptest::array::uniform4(-3.0f64..3.0), b in proptest::array::uniform4(-3.0f64..3.0)) {
            let (p, q) = (Quaternion::from_slice(&a), Quaternion::from_slice(&b));
            prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() < 1e-12 * (1.0 + p.norm() * q.norm()));
        }

        #[test]
        fn unit_squares_to_minus_one(l in unit_strategy(), v in proptest::collection::vec(-2.0f64..2.0, 8)) {
            let q = l.quaternion();
            prop_assert!(((q * q) + Quaternion::ONE).norm() < 1e-12);
            let twice = act_on_tangent(l, &act_on_tangent(l, &v).unwrap()).unwrap();
            for (a, b) in twice.iter().zip(&v) {
                prop_assert!((a + b).abs() < 1e-12);
            }
        }

        #[test]
        fn orthogonal_units_anticommute(l in unit_strategy(), m in unit_strategy()) {
            // Gram-Schmidt m against l.
            let [a, b, c] = m.coefficients();
            let d = l.dot(m);
            let [la, lb, lc] = l.coefficients();
            let (x, y, z) = (a - d * la, b - d * lb, c - d * lc);
            prop_assume!(x * x + y * y + z * z > 1e-4);
            let m = ImaginaryUnit::normalized(x, y, z);
            let (lm, ml) = (l.tangent_matrix(2), m.tangent_matrix(2));
            let anti = &(&lm * &ml) + &(&ml * &lm);
            prop_assert!(anti.max_abs() < 1e-12);
        }

        #[test]
        fn covector_action_is_dual(l in unit_strategy(), a in proptest::collection::vec(-2.0f64..2.0, 4), v in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let alpha: Vec<Complex64> = a.iter().map(|&x| x.into()).collect();
            let la = act_on_covector(l, &alpha).unwrap();
            let lv = act_on_tangent(l, &v).unwrap();
            let lhs: Complex64 = la.iter().zip(&lv).map(|(x, y)| x * y).sum();
            let rhs: Complex64 = alpha.iter().zip(&v).map(|(x, y)| x * y).sum();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
