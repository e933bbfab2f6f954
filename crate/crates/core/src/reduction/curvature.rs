//! Curvature of the level-set connection and the two routes to F₁, F₂.

use super::chart::ReducedChart;
use super::forms::{alpha_field, chart_d, horizontal_one_form, kahler_chart_form, AmbientOneForm, ChartForm};
use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{Structure, TwoForm};
use crate::scalar::{lit, max_abs, to_f64, Real};
use nalgebra::{DMatrix, DVector};

/// Distance from the base at which constancy of (Jα)(Y*), (Kα)(Y*) is probed.
pub const CONSTANCY_RADIUS: f64 = 1e-2;
/// Allowed variation of (Jα)(Y*), (Kα)(Y*) across the probe points.
pub const CONSTANCY_TOL: f64 = 1e-8;

/// (Jα)_𝔤 and (Kα)_𝔤 as coefficient vectors in the gauge basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFunctionals<T: Real> {
    pub j: DVector<T>,
    pub k: DVector<T>,
    /// Largest deviation observed across the probe points.
    pub variation: T,
}

pub fn alpha_functionals<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>) -> Result<AlphaFunctionals<T>> {
    let p = chart.problem();
    let (j, k) = p.alpha_pairings(&chart.base().x);
    let mut variation = T::zero();
    let n = chart.dim();
    let r = lit::<T>(CONSTANCY_RADIUS);
    for a in 0..n {
        for s in [r, -r] {
            let mut u = DVector::zeros(n);
            u[a] = s;
            let x = chart.retract(&u)?;
            let (j2, k2) = p.alpha_pairings(&x);
            variation = variation.max((&j2 - &j).amax()).max((&k2 - &k).amax());
        }
    }
    let scale = T::one() + j.amax().max(k.amax());
    if variation > lit::<T>(CONSTANCY_TOL) * scale {
        return Err(Error::ConstancyViolation { variation: to_f64(variation), tol: CONSTANCY_TOL * to_f64(scale) });
    }
    Ok(AlphaFunctionals { j, k, variation })
}

/// Ω(∂_a, ∂_b) at one chart point, one 2-form per gauge basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample<T: Real> {
    pub omega: Vec<TwoForm<T>>,
    /// Worst condition number of the vertical solves involved.
    pub condition: T,
}

impl<T: Real> CurvatureSample<T> {
    /// Σ_c λ_c Ω^c.
    pub fn contract(&self, lambda: &DVector<T>) -> TwoForm<T> {
        let n = self.omega.first().map(|w| w.dim()).unwrap_or(0);
        let mut m = DMatrix::zeros(n, n);
        for (c, w) in self.omega.iter().enumerate() {
            m += w.matrix() * lambda[c];
        }
        TwoForm::from_antisymmetrized(m)
    }
}

/// Ω = −d(σ*θ) + [σ*θ ∧ σ*θ] in chart coordinates, the sign fixed so that
/// d(β̂) = γ + β_𝔤∘Ω for β = Jα, Kα.
pub fn curvature_at<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>, u: &DVector<T>) -> Result<CurvatureSample<T>> {
    let p = chart.problem();
    let g = p.group_dim();
    let n = chart.dim();
    if g == 0 {
        return Ok(CurvatureSample { omega: Vec::new(), condition: T::one() });
    }
    let h = chart.step();
    let two_h = h * lit(2.0);
    let centre = chart.eval(u)?;
    let mut dtheta = Vec::with_capacity(n);
    let mut cond = T::one();
    for a in 0..n {
        let mut up = u.clone();
        let mut um = u.clone();
        up[a] += h;
        um[a] -= h;
        let (tp, tm) = (chart.eval(&up)?.theta, chart.eval(&um)?.theta);
        dtheta.push((tp - tm) / two_h);
    }
    let (_, c0) = crate::linalg::lstsq(&centre.action, &centre.tangent);
    cond = cond.max(c0);
    let mut omega = vec![DMatrix::zeros(n, n); g];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let br = p.bracket(&centre.theta.column(a).into_owned(), &centre.theta.column(b).into_owned());
            for c in 0..g {
                omega[c][(a, b)] = -(dtheta[a][(c, b)] - dtheta[b][(c, a)]) + br[c];
            }
        }
    }
    Ok(CurvatureSample { omega: omega.into_iter().map(TwoForm::from_antisymmetrized).collect(), condition: cond })
}

pub fn curvature_sample<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>) -> Result<CurvatureSample<T>> {
    curvature_at(chart, &DVector::zeros(chart.dim()))
}

/// F₁ and F₂ as chart forms.
#[derive(Clone)]
pub struct FPair<'c, T: Real> {
    pub f1: ChartForm<'c, T>,
    pub f2: ChartForm<'c, T>,
}

impl<'c, T: Real> FPair<'c, T> {
    pub fn at_origin(&self) -> Result<(TwoForm<T>, TwoForm<T>)> {
        Ok((self.f1.two_form_at_origin()?, self.f2.two_form_at_origin()?))
    }
}

/// F₁ = d(Ĵα̂) − ω̂_J, F₂ = d(K̂α̂) − ω̂_K.
pub fn compute_f_via_d<'c, T: Real, P: HkAction<T> + ?Sized>(chart: &'c ReducedChart<'_, T, P>) -> Result<FPair<'c, T>> {
    alpha_functionals(chart)?;
    let ja = horizontal_one_form(chart, alpha_field(chart, Some(Structure::J)));
    let ka = horizontal_one_form(chart, alpha_field(chart, Some(Structure::K)));
    let f1 = chart_d(chart, &ja)?.sub(&kahler_chart_form(chart, Structure::J))?;
    let f2 = chart_d(chart, &ka)?.sub(&kahler_chart_form(chart, Structure::K))?;
    Ok(FPair { f1, f2 })
}

/// F₁ = (Jα)_𝔤∘Ω, F₂ = (Kα)_𝔤∘Ω.
pub fn compute_f_via_omega<'c, T: Real, P: HkAction<T> + ?Sized>(chart: &'c ReducedChart<'_, T, P>) -> Result<FPair<'c, T>> {
    let fun = alpha_functionals(chart)?;
    let n = chart.dim();
    let make = |lambda: DVector<T>| {
        ChartForm::new(2, n, move |u| {
            let s = curvature_at(chart, u)?;
            if s.omega.is_empty() {
                return Ok(DMatrix::zeros(n, n));
            }
            Ok(s.contract(&lambda).matrix().clone())
        })
    };
    Ok(FPair { f1: make(fun.j)?, f2: make(fun.k)? })
}

/// |dβ̂ − γ − β_𝔤∘Ω| at the base, for β(Y*) constant and dβ = γ on the level set.
pub fn structure_equation_residual<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    beta: AmbientOneForm<'c, T>,
    gamma: &ChartForm<'c, T>,
) -> Result<T> {
    let x = &chart.base().x;
    let a = chart.problem().action_matrix(x);
    let bg = a.transpose() * beta(x);
    let db = chart_d(chart, &horizontal_one_form(chart, beta))?.at_origin()?;
    let mut r = db - gamma.at_origin()?;
    if !bg.is_empty() {
        r -= curvature_sample(chart)?.contract(&bg).matrix();
    }
    Ok(max_abs(&r))
}
