//! Flat hyperkähler linear algebra and the cotangent model T*V = V × V*.

use crate::error::{Error, Result};
use crate::scalar::{lit, max_abs, to_f64, Cx, Real};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// One of the three distinguished complex structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    I,
    J,
    K,
}

impl Structure {
    pub const ALL: [Structure; 3] = [Structure::I, Structure::J, Structure::K];
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Structure::I => "I",
            Structure::J => "J",
            Structure::K => "K",
        };
        f.write_str(s)
    }
}

/// Euclidean space with a compatible quaternionic triple.
#[derive(Debug, Clone, PartialEq)]
pub struct HkSpace<T: Real> {
    metric: DMatrix<T>,
    i: DMatrix<T>,
    j: DMatrix<T>,
    k: DMatrix<T>,
}

impl<T: Real> HkSpace<T> {
    /// Validates the quaternion relations and metric compatibility to `tol` (entrywise).
    pub fn new(metric: DMatrix<T>, i: DMatrix<T>, j: DMatrix<T>, k: DMatrix<T>, tol: T) -> Result<Self> {
        let d = metric.nrows();
        if d == 0 || !d.is_multiple_of(4) {
            return Err(Error::InvalidInput(format!("dimension {d} is not a positive multiple of 4")));
        }
        for (name, m) in [("metric", &metric), ("I", &i), ("J", &j), ("K", &k)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch {
                    what: name,
                    expected: format!("{d}x{d}"),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        if max_abs(&(&metric - metric.transpose())) > tol {
            return Err(Error::InvalidInput("metric is not symmetric".into()));
        }
        if metric.clone().cholesky().is_none() {
            return Err(Error::InvalidInput("metric is not positive definite".into()));
        }
        let s = Self { metric, i, j, k };
        let v = s.invariant_violation();
        if v > tol {
            return Err(Error::NotComplexStructure { residual: to_f64(v) });
        }
        Ok(s)
    }

    /// Euclidean metric with the given triple.
    pub fn euclidean(i: DMatrix<T>, j: DMatrix<T>, k: DMatrix<T>, tol: T) -> Result<Self> {
        let d = i.nrows();
        Self::new(DMatrix::identity(d, d), i, j, k, tol)
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn metric(&self) -> &DMatrix<T> {
        &self.metric
    }

    pub fn structure(&self, s: Structure) -> &DMatrix<T> {
        match s {
            Structure::I => &self.i,
            Structure::J => &self.j,
            Structure::K => &self.k,
        }
    }

    /// Worst entrywise violation of I²=J²=K²=−1, IJ=K, JK=I, KI=J and A*g = g.
    pub fn invariant_violation(&self) -> T {
        let d = self.dim();
        let id = DMatrix::<T>::identity(d, d);
        let (i, j, k) = (&self.i, &self.j, &self.k);
        let mut v = T::zero();
        for a in [i, j, k] {
            v = v.max(max_abs(&(a * a + &id)));
            v = v.max(max_abs(&(a.transpose() * &self.metric * a - &self.metric)));
        }
        v = v.max(max_abs(&(i * j - k)));
        v = v.max(max_abs(&(j * k - i)));
        v = v.max(max_abs(&(k * i - j)));
        v
    }

    /// ω_A(u, v) = g(Au, v).
    pub fn kahler_form(&self, s: Structure) -> TwoForm<T> {
        TwoForm::from_matrix_unchecked(self.structure(s).transpose() * &self.metric)
    }

    /// I_ζ = aI + bJ + cK.
    pub fn izeta(&self, dir: &SphereDirection<T>) -> DMatrix<T> {
        &self.i * dir.a + &self.j * dir.b + &self.k * dir.c
    }

    /// Kähler form of I_ζ.
    pub fn kahler_form_dir(&self, dir: &SphereDirection<T>) -> TwoForm<T> {
        TwoForm::from_matrix_unchecked(self.izeta(dir).transpose() * &self.metric)
    }

    /// (ω_J + iω_K)(u, v).
    pub fn holomorphic_pairing(&self, u: &DVector<T>, v: &DVector<T>) -> Cx<T> {
        let gv = &self.metric * v;
        Cx::new((&self.j * u).dot(&gv), (&self.k * u).dot(&gv))
    }
}

pub fn kahler_form<T: Real>(space: &HkSpace<T>, which: Structure) -> TwoForm<T> {
    space.kahler_form(which)
}

pub fn izeta<T: Real>(space: &HkSpace<T>, dir: &SphereDirection<T>) -> DMatrix<T> {
    space.izeta(dir)
}

/// Antisymmetric bilinear form, F(u, v) = uᵀ M v.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm<T: Real> {
    m: DMatrix<T>,
}

impl<T: Real> TwoForm<T> {
    /// Rejects matrices whose symmetric part exceeds 1e-14 relative.
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch {
                what: "two-form",
                expected: "square".into(),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let sym = max_abs(&(&m + m.transpose()));
        if sym > lit::<T>(1e-14) * max_abs(&m).max(T::one()) {
            return Err(Error::InvalidInput(format!("matrix is not antisymmetric ({:e})", to_f64(sym))));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<T>) -> Self {
        Self { m }
    }

    /// Antisymmetrizes `m`.
    pub fn from_antisymmetrized(m: DMatrix<T>) -> Self {
        Self { m: (&m - m.transpose()) * lit::<T>(0.5) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn eval(&self, u: &DVector<T>, v: &DVector<T>) -> T {
        u.dot(&(&self.m * v))
    }

    /// (A*F)(u, v) = F(Au, Av).
    pub fn pullback(&self, a: &DMatrix<T>) -> Self {
        Self { m: a.transpose() * &self.m * a }
    }

    pub fn norm(&self) -> T {
        self.m.norm()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: &self.m * s }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { m: &self.m + &o.m }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { m: &self.m - &o.m }
    }
}

/// Covector, β(t) = β·t.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm<T: Real>(pub DVector<T>);

impl<T: Real> OneForm<T> {
    pub fn eval(&self, t: &DVector<T>) -> T {
        self.0.dot(t)
    }

    /// (Aβ)(t) = β(At).
    pub fn compose(&self, a: &DMatrix<T>) -> Self {
        OneForm(a.transpose() * &self.0)
    }
}

/// Affine 1-form β_x(t) = tᵀ(Ax + b) with an exact exterior derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOneForm<T: Real> {
    pub a: DMatrix<T>,
    pub b: DVector<T>,
}

impl<T: Real> LinearOneForm<T> {
    pub fn at(&self, x: &DVector<T>) -> OneForm<T> {
        OneForm(&self.a * x + &self.b)
    }

    /// dβ(u, v) = uᵀ(Aᵀ − A)v.
    pub fn d(&self) -> TwoForm<T> {
        TwoForm::from_matrix_unchecked(self.a.transpose() - &self.a)
    }

    /// x ↦ β_x ∘ S.
    pub fn compose(&self, s: &DMatrix<T>) -> Self {
        Self { a: s.transpose() * &self.a, b: s.transpose() * &self.b }
    }
}

/// The ½(F + A*F) and ½(F − A*F) parts of F.
pub fn type_parts<T: Real>(f: &TwoForm<T>, a: &DMatrix<T>) -> Result<(TwoForm<T>, TwoForm<T>)> {
    check_complex_structure(a, lit(1e-10))?;
    let pb = f.pullback(a);
    let half = lit::<T>(0.5);
    Ok((
        TwoForm::from_matrix_unchecked((f.matrix() + pb.matrix()) * half),
        TwoForm::from_matrix_unchecked((f.matrix() - pb.matrix()) * half),
    ))
}

fn check_complex_structure<T: Real>(a: &DMatrix<T>, tol: T) -> Result<()> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::NotComplexStructure { residual: f64::INFINITY });
    }
    let r = max_abs(&(a * a + DMatrix::identity(d, d)));
    if r > tol {
        return Err(Error::NotComplexStructure { residual: to_f64(r) });
    }
    Ok(())
}

/// ‖F − A*F‖ (Frobenius).
pub fn type_violation<T: Real>(f: &TwoForm<T>, a: &DMatrix<T>) -> T {
    (f.matrix() - f.pullback(a).matrix()).norm()
}

/// Outcome of a (1,1)-in-all-structures test.
#[derive(Debug, Clone, PartialEq)]
pub struct OneOneReport {
    pub passed: bool,
    /// Worst ‖F − A*F‖ / ‖F‖ (0 when F = 0).
    pub max_violation: f64,
    /// Absolute violations, labelled by structure.
    pub per_structure: Vec<(String, f64)>,
}

/// The complex structures used by (1,1) sweeps: I, J, K followed by seeded random I_ζ.
pub fn sweep_structures<T: Real>(space: &HkSpace<T>, n_random: usize, seed: u64) -> Vec<(String, DMatrix<T>)> {
    let mut out: Vec<(String, DMatrix<T>)> =
        Structure::ALL.iter().map(|&s| (s.to_string(), space.structure(s).clone())).collect();
    for (n, dir) in SphereDirection::sample(n_random, seed).iter().enumerate() {
        out.push((format!("I_zeta[{n}]"), space.izeta(dir)));
    }
    out
}

pub fn is_one_one_all<T: Real>(f: &TwoForm<T>, space: &HkSpace<T>, n_random: usize, seed: u64, tol: f64) -> OneOneReport {
    let scale = to_f64(f.norm());
    let mut per = Vec::new();
    let mut worst = 0.0f64;
    for (label, a) in sweep_structures(space, n_random, seed) {
        let v = to_f64(type_violation(f, &a));
        per.push((label, v));
        if scale > 0.0 {
            worst = worst.max(v / scale);
        }
    }
    OneOneReport { passed: worst <= tol, max_violation: worst, per_structure: per }
}

/// Point (a, b, c) of the unit sphere of complex structures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDirection<T: Real> {
    a: T,
    b: T,
    c: T,
}

impl<T: Real> SphereDirection<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        let n = (a * a + b * b + c * c).sqrt();
        if (n - T::one()).abs() > lit(1e-12) {
            return Err(Error::InvalidInput(format!("direction has norm {}", to_f64(n))));
        }
        Ok(Self { a, b, c })
    }

    pub fn normalized(a: T, b: T, c: T) -> Result<Self> {
        let n = (a * a + b * b + c * c).sqrt();
        if !(n > T::zero()) {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        Ok(Self { a: a / n, b: b / n, c: c / n })
    }

    pub fn coords(&self) -> (T, T, T) {
        (self.a, self.b, self.c)
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let (a, b, c) = (crate::scalar::normal::<T, _>(rng), crate::scalar::normal(rng), crate::scalar::normal(rng));
            if let Ok(d) = Self::normalized(a, b, c) {
                return d;
            }
        }
    }

    pub fn sample(n: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Self::random(&mut rng)).collect()
    }
}

/// T*V ≃ V × V* with coordinates (Re v, Im v, Re w, Im w) per hermitian direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentModel<T: Real> {
    space: HkSpace<T>,
    n: usize,
}

pub fn build_flat_cotangent<T: Real>(hermitian_dim: usize) -> Result<CotangentModel<T>> {
    CotangentModel::new(hermitian_dim)
}

impl<T: Real> CotangentModel<T> {
    pub fn new(hermitian_dim: usize) -> Result<Self> {
        if hermitian_dim == 0 {
            return Err(Error::InvalidInput("hermitian_dim must be at least 1".into()));
        }
        let o = T::one();
        let z = T::zero();
        #[rustfmt::skip]
        let bi = [
            z, -o, z, z,
            o, z, z, z,
            z, z, z, -o,
            z, z, o, z,
        ];
        // J(v, w) = (-w̄, v̄)
        #[rustfmt::skip]
        let bj = [
            z, z, -o, z,
            z, z, z, o,
            o, z, z, z,
            z, -o, z, z,
        ];
        let bi = DMatrix::from_row_slice(4, 4, &bi);
        let bj = DMatrix::from_row_slice(4, 4, &bj);
        let bk = &bi * &bj;
        let d = 4 * hermitian_dim;
        let mut i = DMatrix::zeros(d, d);
        let mut j = DMatrix::zeros(d, d);
        let mut k = DMatrix::zeros(d, d);
        for p in 0..hermitian_dim {
            i.view_mut((4 * p, 4 * p), (4, 4)).copy_from(&bi);
            j.view_mut((4 * p, 4 * p), (4, 4)).copy_from(&bj);
            k.view_mut((4 * p, 4 * p), (4, 4)).copy_from(&bk);
        }
        let space = HkSpace::euclidean(i, j, k, lit(1e-12))?;
        Ok(Self { space, n: hermitian_dim })
    }

    pub fn space(&self) -> &HkSpace<T> {
        &self.space
    }

    pub fn hermitian_dim(&self) -> usize {
        self.n
    }

    pub fn point(&self, v: &[Cx<T>], w: &[Cx<T>]) -> Result<DVector<T>> {
        if v.len() != self.n || w.len() != self.n {
            return Err(Error::ShapeMismatch {
                what: "cotangent point",
                expected: format!("{} + {}", self.n, self.n),
                found: format!("{} + {}", v.len(), w.len()),
            });
        }
        let mut x = DVector::zeros(4 * self.n);
        for p in 0..self.n {
            x[4 * p] = v[p].re;
            x[4 * p + 1] = v[p].im;
            x[4 * p + 2] = w[p].re;
            x[4 * p + 3] = w[p].im;
        }
        Ok(x)
    }

    pub fn split(&self, x: &DVector<T>) -> (Vec<Cx<T>>, Vec<Cx<T>>) {
        let v = (0..self.n).map(|p| Cx::new(x[4 * p], x[4 * p + 1])).collect();
        let w = (0..self.n).map(|p| Cx::new(x[4 * p + 2], x[4 * p + 3])).collect();
        (v, w)
    }

    /// Orthogonal projector onto the V* factor.
    pub fn fiber_projector(&self) -> DMatrix<T> {
        DMatrix::from_fn(4 * self.n, 4 * self.n, |r, c| if r == c && r % 4 >= 2 { T::one() } else { T::zero() })
    }

    /// μ(v, w) = −½|w|².
    pub fn s1_moment(&self, x: &DVector<T>) -> T {
        let w = self.fiber_projector() * x;
        -w.norm_squared() * lit(0.5)
    }

    /// α_x(t) = −g((0, w), (0, w′)) as an affine form in x.
    pub fn alpha_form(&self) -> LinearOneForm<T> {
        let d = 4 * self.n;
        LinearOneForm { a: -self.fiber_projector(), b: DVector::zeros(d) }
    }

    /// X = −Iα, the rotation w ↦ e^{iθ}w.
    pub fn s1_field(&self, x: &DVector<T>) -> DVector<T> {
        self.space.structure(Structure::I) * (self.fiber_projector() * x)
    }
}

/// (μ, α) at the point (v, w).
pub fn flat_s1_data<T: Real>(model: &CotangentModel<T>, v: &[Cx<T>], w: &[Cx<T>]) -> Result<(T, OneForm<T>)> {
    let x = model.point(v, w)?;
    Ok((model.s1_moment(&x), model.alpha_form().at(&x)))
}
