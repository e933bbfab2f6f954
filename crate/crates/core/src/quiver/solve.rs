//! Level-set solver and the complex pairing identity.

use super::{GaugeElement, QuiverProblem, RepPoint};
use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::Structure;
use crate::linalg::{lstsq_vec, sigma_min};
use crate::scalar::{cabs, lit, to_f64, Cx, Real};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub free_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, free_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedPoint<T: Real> {
    pub point: RepPoint<T>,
    pub x: DVector<T>,
    /// ‖μ_ℝ‖ + ‖μ_ℂ‖ at the returned point.
    pub residual: T,
    pub iterations: usize,
}

/// Damped Gauss–Newton on μ = 0 together with the slice A(x₀)ᵀ(x − x₀) = 0.
pub fn solve_moment<T: Real>(p: &QuiverProblem<T>, init: &RepPoint<T>, opts: &SolveOptions) -> Result<SolvedPoint<T>> {
    let x0 = p.to_real(init)?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial point is not finite".into()));
    }
    let g = p.group_dim();
    let a0t = p.action_matrix(&x0).transpose();
    let system = |x: &DVector<T>| -> DVector<T> {
        let mut f = DVector::zeros(4 * g);
        f.rows_mut(0, 3 * g).copy_from(&p.moment(x));
        f.rows_mut(3 * g, g).copy_from(&(&a0t * (x - &x0)));
        f
    };
    let residual = |x: &DVector<T>| p.moment_residual(&p.from_real(x).expect("length")).expect("shapes");
    let tol = lit::<T>(opts.tol);
    let mut x = x0.clone();
    let mut it = 0;
    loop {
        let r = residual(&x);
        if r <= tol {
            break;
        }
        if it >= opts.max_iter {
            return Err(Error::NonConvergence { iterations: it, residual: to_f64(r) });
        }
        it += 1;
        let f = system(&x);
        let mut jac = DMatrix::zeros(4 * g, x.len());
        jac.view_mut((0, 0), (3 * g, x.len())).copy_from(&p.moment_jacobian(&x));
        jac.view_mut((3 * g, 0), (g, x.len())).copy_from(&a0t);
        let (step, _) = lstsq_vec(&jac, &(-&f));
        let f0 = f.norm_squared();
        let mut t = T::one();
        let c = lit::<T>(1e-4);
        loop {
            let trial = &x + &step * t;
            let ft = system(&trial).norm_squared();
            if ft <= f0 * (T::one() - c * t * lit(2.0)) || ft == T::zero() {
                x = trial;
                break;
            }
            t *= lit(0.5);
            if t < lit(1e-12) {
                return Err(Error::NonConvergence { iterations: it, residual: to_f64(r) });
            }
        }
    }
    let smin = sigma_min(&p.action_matrix(&x));
    if smin < lit(opts.free_tol) {
        return Err(Error::SmallStabilizer { sigma_min: to_f64(smin), threshold: opts.free_tol });
    }
    let point = p.from_real(&x)?;
    let residual = residual(&x);
    Ok(SolvedPoint { point, x, residual, iterations: it })
}

/// Both sides of the complex pairing identity at a level-set point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingCheck<T: Real> {
    /// (Jα + iKα)(Y*).
    pub lhs: Cx<T>,
    /// Σ_k ζ_ℂ,k tr(Y_k).
    pub zeta_trace: Cx<T>,
    /// |lhs + 2 Σ ζ_ℂ,k tr(Y_k)|.
    pub residual: T,
    /// |α(Y*)|.
    pub alpha_on_orbit: T,
}

impl<T: Real> PairingCheck<T> {
    /// lhs / Σ ζ tr Y when the denominator is nonzero.
    pub fn measured_factor(&self) -> Option<Cx<T>> {
        (cabs(self.zeta_trace) > lit(1e-12)).then(|| self.lhs / self.zeta_trace)
    }
}

pub fn pairing_identity_check<T: Real>(p: &QuiverProblem<T>, x: &RepPoint<T>, y: &GaugeElement<T>) -> Result<PairingCheck<T>> {
    let r = p.moment_residual(x)?;
    if r > lit(1e-9) {
        return Err(Error::InvalidInput(format!("point is off the level set (residual {:e})", to_f64(r))));
    }
    let xr = p.to_real(x)?;
    let t = p.to_real(&p.action_field(x, y)?)?;
    let al = p.alpha(&xr);
    let sp = p.space();
    let lhs = Cx::new(al.dot(&(sp.structure(Structure::J) * &t)), al.dot(&(sp.structure(Structure::K) * &t)));
    let zt = p.zeta_trace(y);
    let two = lit::<T>(2.0);
    Ok(PairingCheck { lhs, zeta_trace: zt, residual: cabs(lhs + zt * two), alpha_on_orbit: al.dot(&t).abs() })
}
