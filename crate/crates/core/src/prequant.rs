//! Arithmetic prequantization criteria for ω_J and ω_K.
//!
//! Lattice membership is generic over [`LatticeCoord`]: floats compare to a tolerance,
//! `Ratio<i64>` compares exactly and ignores it.

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Cx, Real};
use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Num, Signed};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    J,
    K,
}

impl Which {
    /// Im for J, Re for K.
    pub fn part<C: Clone>(self, z: &Complex<C>) -> C {
        match self {
            Which::J => z.im.clone(),
            Which::K => z.re.clone(),
        }
    }
}

pub trait LatticeCoord: Num + Signed + Copy + std::fmt::Debug {
    fn frac(num: i64, den: i64) -> Self;
    /// Whether `self` lies within `tol` of `spacing·ℤ`.
    fn on_lattice(self, spacing: Self, tol: f64) -> bool;
    fn within(self, tol: f64) -> bool;
}

macro_rules! float_coord {
    ($t:ty) => {
        impl LatticeCoord for $t {
            fn frac(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn on_lattice(self, spacing: Self, tol: f64) -> bool {
                if !self.is_finite() {
                    return false;
                }
                let q = (self / spacing).round();
                ((self - q * spacing).abs() as f64) <= tol
            }
            fn within(self, tol: f64) -> bool {
                (self.abs() as f64) <= tol
            }
        }
    };
}

float_coord!(f32);
float_coord!(f64);

impl LatticeCoord for Ratio<i64> {
    fn frac(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn on_lattice(self, spacing: Self, _tol: f64) -> bool {
        (self / spacing).is_integer()
    }
    fn within(self, _tol: f64) -> bool {
        self == Ratio::from_integer(0)
    }
}

/// ω_J (ω_K) on the quiver quotient is prequantizable if every Im (Re) (ζ_ℂ)_k ∈ ½ℤ.
pub fn quiver_prequant<C: LatticeCoord>(zeta_c: &[Complex<C>], which: Which, tol: f64) -> bool {
    let half = C::frac(1, 2);
    zeta_c.iter().all(|z| which.part(z).on_lattice(half, tol))
}

/// Higgs residue eigenvalues, one row of r values per puncture: Im (Re) λ_k^{(j)} ∈ (r/2)ℤ.
pub fn higgs_prequant<C: LatticeCoord>(lambdas: &[Vec<Complex<C>>], r: usize, which: Which, tol: f64) -> Result<bool> {
    if r == 0 {
        return Err(Error::InvalidInput("rank must be positive".into()));
    }
    for (j, row) in lambdas.iter().enumerate() {
        if row.len() != r {
            return Err(Error::ShapeMismatch { what: "residue eigenvalues", expected: r.to_string(), found: row.len().to_string() });
        }
        let s = row.iter().fold(Complex::new(C::zero(), C::zero()), |a, &z| a + z);
        if !(s.re.within(tol) && s.im.within(tol)) {
            return Err(Error::TraceNotZero { puncture: j + 1, trace: format!("{:?}", s) });
        }
    }
    let spacing = C::frac(r as i64, 2);
    Ok(lambdas.iter().flatten().all(|z| which.part(z).on_lattice(spacing, tol)))
}

/// τ = i·diag(t): the functional ⟨τ, ·⟩ on the diagonal Cartan, with ⟨A, B⟩ = −Re tr(AB), takes
/// t_k − t_{k+1} on the simple coroots H_k = i(E_kk − E_{k+1,k+1}). These are its coordinates in the
/// fundamental weights, and it is a weight iff all are integers.
pub fn weight_coordinates<C: LatticeCoord>(t: &[C]) -> Vec<C> {
    t.windows(2).map(|w| w[0] - w[1]).collect()
}

pub fn nahm_prequant_diag<C: LatticeCoord>(t: &[C], tol: f64) -> Result<bool> {
    let s = t.iter().fold(C::zero(), |a, &x| a + x);
    if !s.within(tol) {
        return Err(Error::NotInCartan { residual: f64::NAN });
    }
    Ok(weight_coordinates(t).into_iter().all(|c| c.on_lattice(C::one(), tol)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NahmPrequant {
    pub prequantizable: bool,
    /// t with τ ~ i·diag(t), descending.
    pub eigenvalues: Vec<f64>,
    pub weight_coords: Vec<f64>,
    /// Distance of τ from su(m) plus the diagonalization error.
    pub residual: f64,
}

/// Conjugates τ into the diagonal Cartan (the lattice is Weyl invariant) and tests the
/// weight coordinates. `which` only labels τ₂ versus τ₃.
pub fn nahm_prequant<T: Real>(tau: &DMatrix<Cx<T>>, _which: Which, tol: f64) -> Result<NahmPrequant> {
    let m = tau.nrows();
    if m == 0 || tau.ncols() != m {
        return Err(Error::ShapeMismatch { what: "tau", expected: "square".into(), found: format!("{}x{}", m, tau.ncols()) });
    }
    let anti = tau + tau.adjoint();
    let tr = tau.trace();
    let mut residual = to_f64(crate::scalar::cnorm(&anti)) / 2.0 + to_f64(crate::scalar::cabs(tr));
    let h = (tau.adjoint() - tau).map(|z| z * Cx::new(T::zero(), lit_half()));
    // h = −i·(skew part of τ) is hermitian with eigenvalues t.
    let eig = h.clone().symmetric_eigen();
    let mut t: Vec<f64> = eig.eigenvalues.iter().map(|&x| to_f64(x)).collect();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Cx::new(x, T::zero())));
    let rec = &eig.eigenvectors * d * eig.eigenvectors.adjoint() - &h;
    residual += to_f64(crate::scalar::cnorm(&rec));
    if residual > tol {
        return Err(Error::NotInCartan { residual });
    }
    t.sort_by(|a, b| b.total_cmp(a));
    let weight_coords = weight_coordinates(&t);
    let prequantizable = weight_coords.iter().all(|c| c.on_lattice(1.0, tol));
    Ok(NahmPrequant { prequantizable, eigenvalues: t, weight_coords, residual })
}

fn lit_half<T: Real>() -> T {
    crate::scalar::lit(0.5)
}
