//! Forward-mode automatic differentiation.
//!
//! Exact-solution fields are written once, generically over [`Scalar`], and
//! differentiated by evaluating them on nested [`Dual`] numbers. Nesting
//! `Dual<Dual<f64>>` gives mixed second derivatives, three levels give third
//! derivatives, which is what the manufactured viscous term needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like number type accepted by the analytic field definitions.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn cst(v: f64) -> Self;
    /// Primal part, stripping every derivative level.
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::cst(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    fn scale(self, s: f64) -> Self {
        self * Self::cst(s)
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    /// A variable seeded with unit tangent.
    #[inline]
    pub fn var(re: T) -> Self {
        Self { re, eps: T::cst(1.0) }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Self { re, eps: T::cst(0.0) }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::cst(1.0) / o.re;
        let q = self.re * inv;
        Self::new(q, (self.eps - q * o.eps) * inv)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    #[inline]
    fn re(&self) -> f64 {
        self.re.re()
    }
    #[inline]
    fn sin(self) -> Self {
        Self::new(self.re.sin(), self.eps * self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        Self::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Self::new(s, self.eps / (s + s))
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        Self::new(self.re.scale(s), self.eps.scale(s))
    }
}

/// Lifts a point into dual numbers with the tangent `dir`.
#[inline]
pub fn seed<T: Scalar>(x: [T; 3], dir: [f64; 3]) -> [Dual<T>; 3] {
    [
        Dual::new(x[0], T::cst(dir[0])),
        Dual::new(x[1], T::cst(dir[1])),
        Dual::new(x[2], T::cst(dir[2])),
    ]
}

#[inline]
pub fn lift<T: Scalar>(x: [T; 3]) -> [Dual<T>; 3] {
    seed(x, [0.0; 3])
}

pub const AXES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

// small vector helpers on generic scalars

#[inline]
pub fn dot<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn axpy<T: Scalar>(a: T, x: [T; 3], y: [T; 3]) -> [T; 3] {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

#[inline]
pub fn scal<T: Scalar>(a: T, x: [T; 3]) -> [T; 3] {
    [a * x[0], a * x[1], a * x[2]]
}

#[inline]
pub fn sub3<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn cst3<T: Scalar>(v: [f64; 3]) -> [T; 3] {
    [T::cst(v[0]), T::cst(v[1]), T::cst(v[2])]
}

/// Projection `(I - n⊗n) v`.
#[inline]
pub fn tangential<T: Scalar>(n: [T; 3], v: [T; 3]) -> [T; 3] {
    axpy(-dot(n, v), n, v)
}
