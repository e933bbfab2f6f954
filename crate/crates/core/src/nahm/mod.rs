//! Nahm's equations on a truncated half-line [0, L].
//!
//! A path is T₀ + iT₁ + jT₂ + kT₃ sampled on a uniform grid with values in su(m).
//! I, J, K act on tangents by right multiplication by −i, −j, −k.

mod algebra;
mod banded;
mod closed;
mod solve;

pub use algebra::{inner, SuAlgebra};
pub use closed::{coth_limit, coth_profile, inverse_profile, su2_triple};
pub use solve::{solve_nahm, NahmSolveOptions};

use crate::error::{Error, Result};
use crate::hk::Structure;
use crate::scalar::{adjoint, cident, cnorm, commutator, czeros, lit, to_f64, Cx, Real};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Mat<T> = DMatrix<Cx<T>>;

/// Largest |integrand| allowed at s = L before truncation is declared unsound.
pub const TAIL_TOL: f64 = 1e-6;
/// Residual below which a path counts as a solution.
pub const SOLUTION_TOL: f64 = 1e-8;


/// Algebra, limits (τ₁, τ₂, τ₃), truncation length and grid size.
#[derive(Debug, Clone)]
pub struct NahmConfig<T: Real> {
    algebra: SuAlgebra<T>,
    tau: [Mat<T>; 3],
    length: T,
    points: usize,
    cartan: DMatrix<T>,
}

impl<T: Real> NahmConfig<T> {
    /// Requires the common centralizer of the τ_a to be a Cartan subalgebra.
    pub fn new(m: usize, tau: [Mat<T>; 3], length: T, points: usize) -> Result<Self> {
        let c = Self::degenerate(m, tau, length, points)?;
        if c.cartan.ncols() != c.algebra.rank() {
            return Err(Error::InvalidInput(format!(
                "common centralizer of tau has dimension {}, expected rank {}",
                c.cartan.ncols(),
                c.algebra.rank()
            )));
        }
        Ok(c)
    }

    /// Same as [`NahmConfig::new`] without the regularity requirement (e.g. τ = 0).
    pub fn degenerate(m: usize, tau: [Mat<T>; 3], length: T, points: usize) -> Result<Self> {
        let algebra = SuAlgebra::new(m)?;
        if length <= T::zero() {
            return Err(Error::InvalidInput("truncation length must be positive".into()));
        }
        if points < 5 {
            return Err(Error::InvalidInput(format!("need at least 5 grid points, got {points}")));
        }
        for (a, t) in tau.iter().enumerate() {
            let r = algebra.membership(t);
            if r > lit::<T>(1e-12) * cnorm(t).max(T::one()) {
                return Err(Error::InvalidInput(format!("tau_{} is not in su({m}) (residual {:e})", a + 1, to_f64(r))));
            }
        }
        let cartan = algebra.centralizer(&tau);
        Ok(Self { algebra, tau, length, points, cartan })
    }

    pub fn algebra(&self) -> &SuAlgebra<T> {
        &self.algebra
    }

    pub fn tau(&self) -> &[Mat<T>; 3] {
        &self.tau
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> T {
        self.length / lit((self.points - 1) as f64)
    }

    pub fn grid(&self) -> Vec<T> {
        grid(self.length, self.points)
    }

    /// Orthonormal coordinate basis of 𝔥, the common centralizer.
    pub fn cartan(&self) -> &DMatrix<T> {
        &self.cartan
    }

    pub fn is_regular(&self) -> bool {
        self.cartan.ncols() == self.algebra.rank()
    }

    /// Orthogonal projection onto 𝔥 and the distance removed.
    pub fn project_cartan(&self, a: &Mat<T>) -> (Mat<T>, T) {
        let c = self.algebra.coords(a);
        let p = &self.cartan * (self.cartan.transpose() * &c);
        let r = (&c - &p).norm();
        (self.algebra.matrix(&p), r)
    }
}

fn grid<T: Real>(length: T, points: usize) -> Vec<T> {
    let h = length / lit((points - 1) as f64);
    (0..points).map(|i| if i + 1 == points { length } else { h * lit(i as f64) }).collect()
}

/// Samples of (T₀, T₁, T₂, T₃); also used for tangent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NahmPath<T: Real> {
    length: T,
    t: [Vec<Mat<T>>; 4],
}

/// Tangent vectors (t₀, t₁, t₂, t₃) share the path layout.
pub type NahmTangent<T> = NahmPath<T>;

impl<T: Real> NahmPath<T> {
    pub fn new(length: T, t: [Vec<Mat<T>>; 4]) -> Result<Self> {
        let n = t[0].len();
        if n < 5 || t.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch {
                what: "Nahm path samples",
                expected: "four components of equal length >= 5".into(),
                found: format!("{:?}", t.iter().map(Vec::len).collect::<Vec<_>>()),
            });
        }
        if length <= T::zero() {
            return Err(Error::InvalidInput("truncation length must be positive".into()));
        }
        let m = t[0][0].nrows();
        for c in &t {
            for a in c {
                if a.nrows() != m || a.ncols() != m {
                    return Err(Error::ShapeMismatch { what: "Nahm path value", expected: format!("{m}x{m}"), found: format!("{}x{}", a.nrows(), a.ncols()) });
                }
                let r = cnorm(&(a + adjoint(a)));
                if r > lit::<T>(1e-12) * cnorm(a).max(T::one()) {
                    return Err(Error::InvalidInput(format!("path value is not skew-hermitian (residual {:e})", to_f64(r))));
                }
            }
        }
        Ok(Self { length, t })
    }

    pub fn from_fn(length: T, points: usize, f: impl Fn(T) -> [Mat<T>; 4]) -> Result<Self> {
        let mut t: [Vec<Mat<T>>; 4] = Default::default();
        for s in grid(length, points) {
            for (c, v) in t.iter_mut().zip(f(s)) {
                c.push(v);
            }
        }
        Self::new(length, t)
    }

    /// T₀ = 0, T_a ≡ τ_a.
    pub fn constant(config: &NahmConfig<T>) -> Self {
        let m = config.algebra.m();
        let n = config.points;
        let t = [vec![czeros(m, m); n], vec![config.tau[0].clone(); n], vec![config.tau[1].clone(); n], vec![config.tau[2].clone(); n]];
        Self { length: config.length, t }
    }

    pub fn zeros_like(&self) -> Self {
        let m = self.size();
        Self { length: self.length, t: std::array::from_fn(|_| vec![czeros(m, m); self.points()]) }
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn points(&self) -> usize {
        self.t[0].len()
    }

    pub fn size(&self) -> usize {
        self.t[0][0].nrows()
    }

    pub fn step(&self) -> T {
        self.length / lit((self.points() - 1) as f64)
    }

    pub fn component(&self, a: usize) -> &[Mat<T>] {
        &self.t[a]
    }

    pub fn components(&self) -> &[Vec<Mat<T>>; 4] {
        &self.t
    }

    /// max(‖T₀(L)‖, ‖T_a(L) − τ_a‖).
    pub fn boundary_violation(&self, config: &NahmConfig<T>) -> T {
        let last = self.points() - 1;
        let mut v = cnorm(&self.t[0][last]);
        for a in 0..3 {
            v = v.max(cnorm(&(&self.t[a + 1][last] - &config.tau[a])));
        }
        v
    }

    /// Image of a tangent under I, J or K.
    pub fn apply(&self, s: Structure) -> Self {
        let [t0, t1, t2, t3] = &self.t;
        let neg = |v: &Vec<Mat<T>>| v.iter().map(|m| -m).collect::<Vec<_>>();
        let t = match s {
            Structure::I => [t1.clone(), neg(t0), neg(t3), t2.clone()],
            Structure::J => [t2.clone(), t3.clone(), neg(t0), neg(t1)],
            Structure::K => [t3.clone(), neg(t2), t1.clone(), neg(t0)],
        };
        Self { length: self.length, t }
    }

    /// L² inner product Σ_a ∫⟨t_a, u_a⟩ by Simpson's rule.
    pub fn l2_inner(&self, other: &Self) -> T {
        let f: Vec<T> = (0..self.points())
            .map(|i| (0..4).fold(T::zero(), |acc, a| acc + inner(&self.t[a][i], &other.t[a][i])))
            .collect();
        simpson(&f, self.step())
    }
}

/// Five-point weights (to be divided by 12h) and the first sample they touch.
pub(crate) fn stencil(i: usize, n: usize) -> (usize, [f64; 5]) {
    match i {
        0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
        _ if i + 2 == n => (n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0]),
        _ if i + 1 == n => (n - 5, [3.0, -16.0, 36.0, -48.0, 25.0]),
        _ => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
    }
}

/// Fourth-order derivative of grid samples; one-sided at the two ends.
pub fn derivative<T: Real>(f: &[Mat<T>], h: T) -> Vec<Mat<T>> {
    let n = f.len();
    let scale = T::one() / (lit::<T>(12.0) * h);
    (0..n)
        .map(|i| {
            let (s, w) = stencil(i, n);
            let mut out = czeros(f[0].nrows(), f[0].ncols());
            // differences against f[i] keep constants exact
            for (k, &wk) in w.iter().enumerate() {
                if wk != 0.0 && s + k != i {
                    let c = lit::<T>(wk) * scale;
                    out += (&f[s + k] - &f[i]).map(|z| z * c);
                }
            }
            out
        })
        .collect()
}

/// Composite Simpson rule; a 3/8 panel closes an odd number of intervals.
pub fn simpson<T: Real>(f: &[T], h: T) -> T {
    let n = f.len().saturating_sub(1);
    match n {
        0 => T::zero(),
        1 => (f[0] + f[1]) * h / lit(2.0),
        _ => {
            let even = if n.is_multiple_of(2) { n } else { n - 3 };
            let mut s = T::zero();
            let mut i = 0;
            while i + 2 <= even {
                s += f[i] + lit::<T>(4.0) * f[i + 1] + f[i + 2];
                i += 2;
            }
            let mut total = s * h / lit(3.0);
            if even < n {
                let k = even;
                total += (f[k] + lit::<T>(3.0) * (f[k + 1] + f[k + 2]) + f[k + 3]) * h * lit(3.0 / 8.0);
            }
            total
        }
    }
}

/// (μ_I, μ_J, μ_K) at every grid point: Ṫ_a + [T₀, T_a] − [T_b, T_c] for cyclic (a, b, c).
pub fn nahm_residual<T: Real>(path: &NahmPath<T>) -> [Vec<Mat<T>>; 3] {
    let h = path.step();
    let t = &path.t;
    std::array::from_fn(|a| {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        derivative(&t[a + 1], h)
            .into_iter()
            .enumerate()
            .map(|(i, d)| d + commutator(&t[0][i], &t[a + 1][i]) - commutator(&t[b + 1][i], &t[c + 1][i]))
            .collect()
    })
}

fn sup_over<T: Real>(r: &[Vec<Mat<T>>; 3], range: std::ops::Range<usize>) -> T {
    let mut m = T::zero();
    for c in r {
        for x in &c[range.clone()] {
            m = m.max(cnorm(x));
        }
    }
    m
}

/// Largest Frobenius norm of the residual over the grid.
pub fn residual_sup<T: Real>(path: &NahmPath<T>) -> T {
    sup_over(&nahm_residual(path), 0..path.points())
}

/// As [`residual_sup`] over s_1, …, s_L: the equations a solved path satisfies.
pub fn collocation_residual_sup<T: Real>(path: &NahmPath<T>) -> T {
    sup_over(&nahm_residual(path), 1..path.points())
}

/// As [`residual_sup`], restricted to points where the centred stencil is used.
pub fn interior_residual_sup<T: Real>(path: &NahmPath<T>) -> T {
    sup_over(&nahm_residual(path), 2..path.points() - 2)
}

/// g·T = (Ad_g T₀ − ġg⁻¹, Ad_g T₁, Ad_g T₂, Ad_g T₃) for g: [0, L] → SU(m) with g(0) = e.
pub fn gauge_act<T: Real>(g: &[Mat<T>], path: &NahmPath<T>) -> Result<NahmPath<T>> {
    let n = path.points();
    let m = path.size();
    if g.len() != n || g.iter().any(|x| x.nrows() != m || x.ncols() != m) {
        return Err(Error::ShapeMismatch { what: "gauge path", expected: format!("{n} samples of {m}x{m}"), found: format!("{} samples", g.len()) });
    }
    let e = cnorm(&(&g[0] - cident::<T>(m)));
    if e > lit(1e-12) {
        return Err(Error::InvalidInput(format!("gauge path must start at the identity (|g(0) - e| = {:e})", to_f64(e))));
    }
    let gd = derivative(g, path.step());
    let ginv: Vec<Mat<T>> = g.iter().map(adjoint).collect();
    let ad = |i: usize, x: &Mat<T>| &g[i] * x * &ginv[i];
    let mut t: [Vec<Mat<T>>; 4] = Default::default();
    for i in 0..n {
        t[0].push(ad(i, &path.t[0][i]) - &gd[i] * &ginv[i]);
        for a in 1..4 {
            t[a].push(ad(i, &path.t[a][i]));
        }
    }
    // ġg⁻¹ is skew-hermitian only up to the stencil error; restore it exactly.
    for x in t[0].iter_mut() {
        *x = (&*x - adjoint(x)).map(|z| z * lit::<T>(0.5));
    }
    NahmPath::new(path.length, t)
}

/// An element Y of the gauge Lie algebra: Y(0) = 0, Y(L) ∈ 𝔥.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePathElement<T: Real> {
    y: Vec<Mat<T>>,
}

impl<T: Real> GaugePathElement<T> {
    /// Projects Y(L) onto 𝔥 after checking it lies within `tol` of it.
    pub fn new(config: &NahmConfig<T>, mut y: Vec<Mat<T>>, tol: T) -> Result<Self> {
        if y.len() != config.points {
            return Err(Error::ShapeMismatch { what: "gauge element", expected: format!("{} samples", config.points), found: format!("{}", y.len()) });
        }
        for x in &y {
            let r = config.algebra.membership(x);
            if r > tol.max(lit(1e-12)) {
                return Err(Error::InvalidInput(format!("gauge element leaves su(m) (residual {:e})", to_f64(r))));
            }
        }
        if cnorm(&y[0]) > tol {
            return Err(Error::InvalidInput("gauge element must vanish at s = 0".into()));
        }
        let last = y.len() - 1;
        let (p, r) = config.project_cartan(&y[last]);
        if r > tol {
            return Err(Error::NotInCartan { residual: to_f64(r) });
        }
        y[last] = p;
        Ok(Self { y })
    }

    pub fn zeros(config: &NahmConfig<T>) -> Self {
        let m = config.algebra.m();
        Self { y: vec![czeros(m, m); config.points] }
    }

    /// Y(s) = φ(s) H + sin²(πs/L) e^{−s/2} Z, φ(s) = (1 − e^{−2s})/(1 − e^{−2L}), with H ∈ 𝔥 and
    /// Z ∈ su(m) drawn from the seed.
    pub fn random(config: &NahmConfig<T>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &config.algebra;
        let hc = DVector::from_fn(config.cartan.ncols(), |_, _| crate::scalar::normal::<T, _>(&mut rng));
        let h = g.matrix(&(&config.cartan * hc));
        let z = g.random(&mut rng);
        let l = config.length;
        let pi: T = lit(std::f64::consts::PI);
        let half: T = lit(0.5);
        let two: T = lit(2.0);
        let norm = T::one() - (-two * l).exp();
        let mut y: Vec<Mat<T>> = config
            .grid()
            .into_iter()
            .map(|s| {
                let sn = (pi * s / l).sin();
                let (a, b) = ((T::one() - (-two * s).exp()) / norm, sn * sn * (-s * half).exp());
                h.map(|w| w * a) + z.map(|w| w * b)
            })
            .collect();
        let last = y.len() - 1;
        y[last] = h;
        Self { y }
    }

    pub fn values(&self) -> &[Mat<T>] {
        &self.y
    }

    pub fn at_end(&self) -> &Mat<T> {
        &self.y[self.y.len() - 1]
    }
}

/// Y* = ([Y, T₀] − Ẏ, [Y, T₁], [Y, T₂], [Y, T₃]).
pub fn action_field<T: Real>(path: &NahmPath<T>, y: &GaugePathElement<T>) -> Result<NahmTangent<T>> {
    if y.y.len() != path.points() {
        return Err(Error::ShapeMismatch { what: "gauge element", expected: format!("{} samples", path.points()), found: format!("{}", y.y.len()) });
    }
    let yd = derivative(&y.y, path.step());
    let t = std::array::from_fn(|a| {
        (0..path.points())
            .map(|i| {
                let c = commutator(&y.y[i], &path.t[a][i]);
                if a == 0 { c - &yd[i] } else { c }
            })
            .collect()
    });
    Ok(NahmPath { length: path.length, t })
}

/// α_T(t) = −∫₀^L (⟨T₂, t₂⟩ + ⟨T₃, t₃⟩) ds, refusing tangents whose integrand survives at L.
pub fn alpha_nahm<T: Real>(path: &NahmPath<T>, tangent: &NahmTangent<T>) -> Result<T> {
    alpha_nahm_with(path, tangent, lit(TAIL_TOL))
}

pub fn alpha_nahm_with<T: Real>(path: &NahmPath<T>, tangent: &NahmTangent<T>, tail_tol: T) -> Result<T> {
    if tangent.points() != path.points() {
        return Err(Error::ShapeMismatch { what: "tangent", expected: format!("{} samples", path.points()), found: format!("{}", tangent.points()) });
    }
    let f: Vec<T> = (0..path.points())
        .map(|i| inner(&path.t[2][i], &tangent.t[2][i]) + inner(&path.t[3][i], &tangent.t[3][i]))
        .collect();
    let tail = f[f.len() - 1].abs();
    if tail > tail_tol {
        return Err(Error::TailTooLarge { tail: to_f64(tail), tol: to_f64(tail_tol) });
    }
    Ok(-simpson(&f, path.step()))
}

/// (Aα)(t) = α(At); `None` gives α itself.
pub fn structured_alpha<T: Real>(path: &NahmPath<T>, tangent: &NahmTangent<T>, which: Option<Structure>) -> Result<T> {
    match which {
        None => alpha_nahm(path, tangent),
        Some(s) => alpha_nahm(path, &tangent.apply(s)),
    }
}

/// Both sides of (Jα)(Y*) = −⟨τ₂, Y(L)⟩ and (Kα)(Y*) = −⟨τ₃, Y(L)⟩, plus α(Y*).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPairing {
    pub j_alpha: f64,
    pub k_alpha: f64,
    pub j_boundary: f64,
    pub k_boundary: f64,
    pub alpha: f64,
}

impl BoundaryPairing {
    pub fn j_residual(&self) -> f64 {
        (self.j_alpha - self.j_boundary).abs()
    }

    pub fn k_residual(&self) -> f64 {
        (self.k_alpha - self.k_boundary).abs()
    }

    pub fn max_residual(&self) -> f64 {
        self.j_residual().max(self.k_residual()).max(self.alpha.abs())
    }
}

pub fn boundary_pairing_check<T: Real>(config: &NahmConfig<T>, path: &NahmPath<T>, y: &GaugePathElement<T>) -> Result<BoundaryPairing> {
    let r = collocation_residual_sup(path);
    if r > lit(SOLUTION_TOL) {
        return Err(Error::InvalidInput(format!("path does not solve Nahm's equations (residual {:e})", to_f64(r))));
    }
    let ys = action_field(path, y)?;
    let yl = y.at_end();
    Ok(BoundaryPairing {
        j_alpha: to_f64(structured_alpha(path, &ys, Some(Structure::J))?),
        k_alpha: to_f64(structured_alpha(path, &ys, Some(Structure::K))?),
        j_boundary: -to_f64(inner(&config.tau[1], yl)),
        k_boundary: -to_f64(inner(&config.tau[2], yl)),
        alpha: to_f64(alpha_nahm(path, &ys)?),
    })
}

#[cfg(test)]
mod tests;
