//! Local charts on the quotient: horizontal frame at a level-set point plus a
//! Newton retraction onto the level set along the normal directions.

use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{HkSpace, Structure};
use crate::linalg::{lstsq, orthogonal_complement, orthonormal_span, polar_orthogonal, sigma_min};
use crate::scalar::{lit, max_abs, to_f64, Real};
use nalgebra::{DMatrix, DVector};

/// Ambient point on μ⁻¹(0).
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetPoint<T: Real> {
    pub x: DVector<T>,
    pub residual: T,
}

impl<T: Real> LevelSetPoint<T> {
    pub fn new<P: HkAction<T> + ?Sized>(problem: &P, x: DVector<T>, tol: T) -> Result<Self> {
        if x.len() != problem.space().dim() {
            return Err(Error::ShapeMismatch {
                what: "level-set point",
                expected: problem.space().dim().to_string(),
                found: x.len().to_string(),
            });
        }
        let residual = problem.moment(&x).norm();
        if residual > tol {
            return Err(Error::InvalidInput(format!("point is off the level set (|μ| = {:e})", to_f64(residual))));
        }
        Ok(Self { x, residual })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetractionOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Largest |u| accepted by the chart.
    pub max_radius: f64,
    pub free_tol: f64,
}

impl Default for RetractionOptions {
    fn default() -> Self {
        Self { max_iter: 50, tol: 1e-11, max_radius: 0.5, free_tol: 1e-6 }
    }
}

/// Everything known about the chart map at one coordinate value.
#[derive(Debug, Clone)]
pub struct ChartPoint<T: Real> {
    /// R(u).
    pub x: DVector<T>,
    /// ∂_a R(u), one column per chart coordinate.
    pub tangent: DMatrix<T>,
    /// Fundamental fields at R(u).
    pub action: DMatrix<T>,
    /// θ(∂_a R(u)): gauge-algebra coefficients, one column per chart coordinate.
    pub theta: DMatrix<T>,
    /// Horizontal parts ∂_a R − (θ_a)*.
    pub horizontal: DMatrix<T>,
}

/// Chart R(u) = x₀ + Eu + N c(u) with μ(R(u)) = 0.
pub struct ReducedChart<'a, T: Real, P: HkAction<T> + ?Sized> {
    problem: &'a P,
    base: LevelSetPoint<T>,
    frame: DMatrix<T>,
    normal: DMatrix<T>,
    h: T,
    opts: RetractionOptions,
    quotient: HkSpace<T>,
}

pub fn build_chart<'a, T: Real, P: HkAction<T> + ?Sized>(
    problem: &'a P,
    base: LevelSetPoint<T>,
    h: T,
) -> Result<ReducedChart<'a, T, P>> {
    ReducedChart::new(problem, base, h, RetractionOptions::default())
}

impl<'a, T: Real, P: HkAction<T> + ?Sized> ReducedChart<'a, T, P> {
    pub fn new(problem: &'a P, base: LevelSetPoint<T>, h: T, opts: RetractionOptions) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::InvalidInput("step h must be positive".into()));
        }
        let sp = problem.space();
        let d = sp.dim();
        let g = problem.group_dim();
        let a = problem.action_matrix(&base.x);
        if g > 0 {
            let smin = sigma_min(&a);
            if smin < lit(opts.free_tol) {
                return Err(Error::Freeness { sigma_min: to_f64(smin), threshold: opts.free_tol });
            }
        }
        let mut quat = DMatrix::zeros(d, 4 * g);
        let mut grads = DMatrix::zeros(d, 3 * g);
        quat.view_mut((0, 0), (d, g)).copy_from(&a);
        for (n, s) in Structure::ALL.iter().enumerate() {
            let sa = sp.structure(*s) * &a;
            quat.view_mut((0, (n + 1) * g), (d, g)).copy_from(&sa);
            grads.view_mut((0, n * g), (d, g)).copy_from(&sa);
        }
        let q = orthonormal_span(&quat, lit(1e-10));
        if q.ncols() != 4 * g {
            return Err(Error::Freeness { sigma_min: 0.0, threshold: opts.free_tol });
        }
        let frame = orthogonal_complement(&q, d);
        let normal = orthonormal_span(&grads, lit(1e-10));
        let mut ops = Vec::with_capacity(3);
        for s in Structure::ALL {
            let st = sp.structure(s);
            let leak = max_abs(&(st * &frame - &frame * (frame.transpose() * st * &frame)));
            if leak > lit(1e-9) {
                return Err(Error::InvalidInput(format!(
                    "horizontal space is not preserved by {s} (leak {:e})",
                    to_f64(leak)
                )));
            }
            let mut r = frame.transpose() * st * &frame;
            let m = r.nrows();
            if max_abs(&(&r * &r + DMatrix::identity(m, m))) > lit(1e-12) {
                r = polar_orthogonal(&r);
            }
            ops.push(r);
        }
        let k = ops.pop().expect("three structures");
        let j = ops.pop().expect("three structures");
        let i = ops.pop().expect("three structures");
        let quotient = HkSpace::euclidean(i, j, k, lit(1e-9))?;
        let mut chart = Self { problem, base, frame, normal, h, opts, quotient };
        let polished = chart.project(&chart.base.x.clone(), 0.0)?;
        chart.base.residual = problem.moment(&polished).norm();
        chart.base.x = polished;
        Ok(chart)
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn base(&self) -> &LevelSetPoint<T> {
        &self.base
    }

    pub fn frame(&self) -> &DMatrix<T> {
        &self.frame
    }

    /// Real dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn step(&self) -> T {
        self.h
    }

    /// Quotient tangent space at the base with the induced structures Î, Ĵ, K̂.
    pub fn quotient_space(&self) -> &HkSpace<T> {
        &self.quotient
    }

    /// R(u).
    pub fn retract(&self, u: &DVector<T>) -> Result<DVector<T>> {
        if u.len() != self.dim() {
            return Err(Error::ShapeMismatch {
                what: "chart coordinates",
                expected: self.dim().to_string(),
                found: u.len().to_string(),
            });
        }
        let radius = to_f64(u.norm());
        if radius > self.opts.max_radius {
            return Err(Error::ProjectionDivergence { radius, residual: f64::NAN });
        }
        if radius == 0.0 {
            return Ok(self.base.x.clone());
        }
        self.project(&(&self.base.x + &self.frame * u), radius)
    }

    /// Newton along the normal directions from `y` until the steps stall.
    fn project(&self, y: &DVector<T>, radius: f64) -> Result<DVector<T>> {
        let m = self.normal.ncols();
        if m == 0 {
            return Ok(y.clone());
        }
        let mut c = DVector::zeros(m);
        let mut last = T::max_value().unwrap_or(T::one());
        for _ in 0..self.opts.max_iter {
            let x = y + &self.normal * &c;
            let f = self.problem.moment(&x);
            let r = f.norm();
            if r == T::zero() {
                return Ok(x);
            }
            let jac = self.problem.moment_jacobian(&x) * &self.normal;
            let step = jac.lu().solve(&f).ok_or(Error::ProjectionDivergence { radius, residual: to_f64(r) })?;
            c -= &step;
            let sn = step.norm();
            if r <= lit(self.opts.tol) && (sn <= lit::<T>(4.0) * T::default_epsilon() * (T::one() + c.norm()) || sn >= last) {
                return Ok(y + &self.normal * &c);
            }
            last = sn;
            if !c.iter().all(|v| v.is_finite()) || c.norm() > lit(1e3 * (1.0 + radius)) {
                return Err(Error::ProjectionDivergence { radius, residual: to_f64(r) });
            }
        }
        let x = y + &self.normal * &c;
        let r = self.problem.moment(&x).norm();
        if r <= lit(self.opts.tol) {
            Ok(x)
        } else {
            Err(Error::ProjectionDivergence { radius, residual: to_f64(r) })
        }
    }

    /// R(u) with its exact derivative, connection form and horizontal parts.
    pub fn eval(&self, u: &DVector<T>) -> Result<ChartPoint<T>> {
        let x = self.retract(u)?;
        let action = self.problem.action_matrix(&x);
        let tangent = if self.normal.ncols() == 0 {
            self.frame.clone()
        } else {
            let dmu = self.problem.moment_jacobian(&x);
            let lu = (&dmu * &self.normal).lu();
            let corr = lu.solve(&(&dmu * &self.frame)).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
            &self.frame - &self.normal * corr
        };
        let (theta, cond) = lstsq(&action, &tangent);
        if cond > lit(1e12) {
            return Err(Error::IllConditioned { condition: to_f64(cond) });
        }
        let horizontal = &tangent - &action * &theta;
        Ok(ChartPoint { x, tangent, action, theta, horizontal })
    }

    /// Orthogonal projection onto the horizontal space at an ambient point.
    pub fn horizontal_projector(&self, x: &DVector<T>) -> DMatrix<T> {
        let sp = self.problem.space();
        let a = self.problem.action_matrix(x);
        let g = a.ncols();
        let d = sp.dim();
        let mut quat = DMatrix::zeros(d, 4 * g);
        quat.view_mut((0, 0), (d, g)).copy_from(&a);
        for (n, s) in Structure::ALL.iter().enumerate() {
            quat.view_mut((0, (n + 1) * g), (d, g)).copy_from(&(sp.structure(*s) * &a));
        }
        let q = orthonormal_span(&quat, lit(1e-10));
        DMatrix::identity(d, d) - &q * q.transpose()
    }
}
