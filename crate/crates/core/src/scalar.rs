//! Scalar abstraction shared by every numerical module.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real field used throughout the numerical core (f32 or f64 in practice).
pub trait Real: RealField + Copy + ToPrimitive {}

impl<T: RealField + Copy + ToPrimitive> Real for T {}

/// Complex numbers over a [`Real`].
pub type Cx<T> = Complex<T>;

/// Converts an f64 literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion used for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cxr<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

pub(crate) fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    lit(z)
}

pub(crate) fn normal_cx<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    cx(normal(rng), normal(rng))
}

/// Frobenius norm of a complex matrix.
pub fn cnorm<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    let mut s = T::zero();
    for z in m.iter() {
        s += z.re * z.re + z.im * z.im;
    }
    s.sqrt()
}

/// Largest entry modulus of a real matrix (0 for empty).
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, &x| a.max(x.abs()))
}

pub fn adjoint<T: Real>(m: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    m.map(|z| z.conj()).transpose()
}

pub fn ctrace<T: Real>(m: &DMatrix<Cx<T>>) -> Cx<T> {
    let mut s = Cx::new(T::zero(), T::zero());
    for k in 0..m.nrows().min(m.ncols()) {
        s += m[(k, k)];
    }
    s
}

pub(crate) fn czeros<T: Real>(r: usize, c: usize) -> DMatrix<Cx<T>> {
    DMatrix::from_element(r, c, Cx::new(T::zero(), T::zero()))
}

pub(crate) fn cident<T: Real>(n: usize) -> DMatrix<Cx<T>> {
    let mut m = czeros(n, n);
    for k in 0..n {
        m[(k, k)] = Cx::new(T::one(), T::zero());
    }
    m
}


pub(crate) fn commutator<T: Real>(a: &DMatrix<Cx<T>>, b: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    a * b - b * a
}

#[inline]
pub fn cabs<T: Real>(z: Cx<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
