//! Finite-difference diagnostics for G-invariance of α and for the
//! homomorphism property of (Jα)_𝔤, (Kα)_𝔤.

use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::Structure;
use crate::scalar::{lit, normal, to_f64, Real};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Labels of the eight equivalent invariance conditions.
pub const INVARIANCE_CONDITIONS: [&str; 8] = [
    "[X, Y*] = 0",
    "L_{Y*} α = 0",
    "d(X·μ_I^Y) = 0",
    "d(X·μ_J^Y + μ_K^Y) = 0",
    "d(X·μ_K^Y − μ_J^Y) = 0",
    "d(α(Y*)) = 0",
    "d(Jα(Y*) + μ_J^Y) = 0",
    "d(Kα(Y*) + μ_K^Y) = 0",
];

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceDiagnostics {
    /// Largest finite-difference value of each condition over the probe directions.
    pub values: [f64; 8],
    pub passed: [bool; 8],
}

impl InvarianceDiagnostics {
    /// True when all eight conditions give the same verdict.
    pub fn consistent(&self) -> bool {
        self.passed.iter().all(|&p| p == self.passed[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticOptions {
    pub step: f64,
    pub directions: usize,
    pub tol: f64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        Self { step: 1e-5, directions: 3, tol: 1e-6 }
    }
}

/// Evaluates the eight conditions at x for the gauge direction `y` (basis coefficients).
pub fn invariance_diagnostics<T: Real, P: HkAction<T> + ?Sized>(
    p: &P,
    x: &DVector<T>,
    y: &DVector<T>,
    seed: u64,
    opts: &DiagnosticOptions,
) -> Result<InvarianceDiagnostics> {
    let g = p.group_dim();
    if y.len() != g {
        return Err(Error::ShapeMismatch { what: "gauge coefficients", expected: g.to_string(), found: y.len().to_string() });
    }
    let d = p.space().dim();
    let eps = lit::<T>(opts.step);
    let two_eps = eps * lit(2.0);
    let ystar = |z: &DVector<T>| p.action_matrix(z) * y;
    let xf = |z: &DVector<T>| p.s1_field(z);
    // directional derivative of a vector-valued map
    let dir = |f: &dyn Fn(&DVector<T>) -> DVector<T>, at: &DVector<T>, w: &DVector<T>| -> DVector<T> {
        (f(&(at + w * eps)) - f(&(at - w * eps))) / two_eps
    };
    let mu = |z: &DVector<T>, s: usize| -> T {
        if g == 0 {
            return T::zero();
        }
        p.moment(z).rows(s * g, g).dot(y)
    };
    let dmu_x = |z: &DVector<T>, s: usize| -> T {
        if g == 0 {
            return T::zero();
        }
        (p.moment_jacobian(z).rows(s * g, g).transpose() * y).dot(&xf(z))
    };
    let pair = |z: &DVector<T>, st: Option<Structure>| -> T {
        let t = ystar(z);
        let t = match st {
            None => t,
            Some(s) => p.space().structure(s) * t,
        };
        p.alpha(z).dot(&t)
    };
    let scalars: [Box<dyn Fn(&DVector<T>) -> T + '_>; 6] = [
        Box::new(|z| dmu_x(z, 0)),
        Box::new(|z| dmu_x(z, 1) + mu(z, 2)),
        Box::new(|z| dmu_x(z, 2) - mu(z, 1)),
        Box::new(|z| pair(z, None)),
        Box::new(|z| pair(z, Some(Structure::J)) + mu(z, 1)),
        Box::new(|z| pair(z, Some(Structure::K)) + mu(z, 2)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = [0.0f64; 8];
    for _ in 0..opts.directions {
        let mut w = DVector::from_fn(d, |_, _| normal::<T, _>(&mut rng));
        let nw = w.norm();
        w /= nw;
        let ys = ystar(x);
        let xs = xf(x);
        let bracket = dir(&ystar, x, &xs) - dir(&xf, x, &ys);
        values[0] = values[0].max(to_f64(bracket.norm()));
        let alpha_w = |z: &DVector<T>| DVector::from_element(1, p.alpha(z).dot(&w));
        let lie = dir(&alpha_w, x, &ys)[0] + p.alpha(x).dot(&dir(&ystar, x, &w));
        values[1] = values[1].max(to_f64(lie.abs()));
        for (n, f) in scalars.iter().enumerate() {
            let v = (f(&(x + &w * eps)) - f(&(x - &w * eps))) / two_eps;
            values[n + 2] = values[n + 2].max(to_f64(v.abs()));
        }
    }
    let passed = values.map(|v| v <= opts.tol);
    Ok(InvarianceDiagnostics { values, passed })
}

/// The problem with α replaced by α + c for a fixed covector c.
pub struct PerturbedAlpha<'a, T: Real, P: HkAction<T> + ?Sized> {
    pub inner: &'a P,
    pub shift: DVector<T>,
}

impl<'a, T: Real, P: HkAction<T> + ?Sized> PerturbedAlpha<'a, T, P> {
    /// Seeded unit-norm shift.
    pub fn seeded(inner: &'a P, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = inner.space().dim();
        let mut c = DVector::from_fn(d, |_, _| normal::<T, _>(&mut rng));
        let n = c.norm();
        c /= n;
        Self { inner, shift: c }
    }
}

impl<'a, T: Real, P: HkAction<T> + ?Sized> HkAction<T> for PerturbedAlpha<'a, T, P> {
    fn space(&self) -> &crate::hk::HkSpace<T> {
        self.inner.space()
    }
    fn group_dim(&self) -> usize {
        self.inner.group_dim()
    }
    fn action_matrix(&self, x: &DVector<T>) -> DMatrix<T> {
        self.inner.action_matrix(x)
    }
    fn moment(&self, x: &DVector<T>) -> DVector<T> {
        self.inner.moment(x)
    }
    fn alpha(&self, x: &DVector<T>) -> DVector<T> {
        self.inner.alpha(x) + &self.shift
    }
    fn bracket(&self, a: &DVector<T>, b: &DVector<T>) -> DVector<T> {
        self.inner.bracket(a, b)
    }
}

/// max over random unit Y₁, Y₂ of |(Jα)([Y₁,Y₂]*)| + |(Kα)([Y₁,Y₂]*)| at a level-set point.
pub fn rep_homomorphism_check<T: Real, P: HkAction<T> + ?Sized>(p: &P, x: &DVector<T>, pairs: usize, seed: u64) -> Result<f64> {
    let r = p.moment(x).norm();
    if r > lit(1e-9) {
        return Err(Error::InvalidInput(format!("point is off the level set (|μ| = {:e})", to_f64(r))));
    }
    let g = p.group_dim();
    if g == 0 {
        return Ok(0.0);
    }
    let (j, k) = p.alpha_pairings(x);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || {
        let mut v = DVector::from_fn(g, |_, _| normal::<T, _>(&mut rng));
        let n = v.norm();
        v /= n;
        v
    };
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let (a, b) = (unit(), unit());
        let c = p.bracket(&a, &b);
        worst = worst.max(to_f64(j.dot(&c).abs() + k.dot(&c).abs()));
    }
    Ok(worst)
}
