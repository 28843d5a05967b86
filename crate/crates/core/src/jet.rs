//! Forward-mode automatic differentiation.
//!
//! [`Dual`] carries a value and one directional derivative. Because `Dual<R>`
//! is itself a [`Real`] whenever `R` is, second and third derivatives come
//! from nesting (`Dual<Dual<f64>>`, ...). Every field in this crate is written
//! generically over [`Real`], so the same code path is evaluated with plain
//! `f64` or with jets.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, One, Zero};

/// Scalar type usable for field evaluation.
pub trait Real:
    Copy
    + Debug
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + PartialOrd
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    /// The underlying `f64` value with all derivative parts discarded.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// First-order jet `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Dual<R> {
    pub re: R,
    pub eps: R,
}

impl<R: Real> Dual<R> {
    pub fn new(re: R, eps: R) -> Self {
        Self { re, eps }
    }

    pub fn constant(re: R) -> Self {
        Self { re, eps: R::zero() }
    }

    pub fn variable(re: R) -> Self {
        Self { re, eps: R::one() }
    }
}

impl<R: Real> Add for Dual<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<R: Real> Sub for Dual<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<R: Real> Mul for Dual<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<R: Real> Div for Dual<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = R::one() / o.re;
        Self::new(self.re * inv, (self.eps * o.re - self.re * o.eps) * inv * inv)
    }
}

// Only needed to satisfy `Num`; the derivative of `x mod y` is taken with `y`
// held locally constant.
impl<R: Real> Rem for Dual<R> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        Self::new(self.re % o.re, self.eps)
    }
}

impl<R: Real> Neg for Dual<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<R: Real> AddAssign for Dual<R> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<R: Real> SubAssign for Dual<R> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<R: Real> MulAssign for Dual<R> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<R: Real> Zero for Dual<R> {
    fn zero() -> Self {
        Self::constant(R::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<R: Real> One for Dual<R> {
    fn one() -> Self {
        Self::constant(R::one())
    }
}

impl<R: Real> Num for Dual<R> {
    type FromStrRadixErr = R::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        R::from_str_radix(s, radix).map(Self::constant)
    }
}

impl<R: Real> Real for Dual<R> {
    fn from_f64(x: f64) -> Self {
        Self::constant(R::from_f64(x))
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Self::new(s, self.eps / (R::from_f64(2.0) * s))
    }
    fn ln(self) -> Self {
        Self::new(self.re.ln(), self.eps / self.re)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Self::new(e, self.eps * e)
    }
    fn sin(self) -> Self {
        Self::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Self::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
}

/// Lifts a point into jets seeded along coordinate `dir`.
pub fn seed<R: Real>(x: &[R], dir: usize) -> Vec<Dual<R>> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if i == dir { Dual::variable(v) } else { Dual::constant(v) })
        .collect()
}

pub fn lift<R: Real>(x: &[R]) -> Vec<Dual<R>> {
    x.iter().map(|&v| Dual::constant(v)).collect()
}

pub fn lift_complex<R: Real>(z: Complex<R>) -> Complex<Dual<R>> {
    Complex::new(Dual::constant(z.re), Dual::constant(z.im))
}

pub fn complex_re<R: Real>(z: Complex<Dual<R>>) -> Complex<R> {
    Complex::new(z.re.re, z.im.re)
}

pub fn complex_eps<R: Real>(z: Complex<Dual<R>>) -> Complex<R> {
    Complex::new(z.re.eps, z.im.eps)
}

/// Gradient of a real function by one forward pass per coordinate.
pub fn gradient<R, F>(f: F, x: &[R]) -> Vec<R>
where
    R: Real,
    F: Fn(&[Dual<R>]) -> Dual<R>,
{
    (0..x.len()).map(|i| f(&seed(x, i)).eps).collect()
}

/// Central finite-difference gradient, used as an independent cross-check.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let x0 = p[i];
            p[i] = x0 + h;
            let fp = f(&p);
            p[i] = x0 - h;
            let fm = f(&p);
            p[i] = x0;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}
