//! The (1,1) statement for ω̂_I − d(Îα̂), its Lie-derivative form and the
//! curvature representative of the hyperholomorphic bundle.

use super::chart::ReducedChart;
use super::curvature::compute_f_via_omega;
use super::forms::{alpha_field, chart_d, closedness_defect, horizontal_one_form, kahler_chart_form, ChartForm};
use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{sweep_structures, type_violation, Structure, TwoForm};
use crate::linalg::lstsq_vec;
use crate::scalar::{lit, to_f64, Real};
use nalgebra::{DMatrix, DVector};

/// Worst (2,0)+(0,2) part of ω̂_I − d(Îα̂) relative to ‖ω̂_I‖.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub passed: bool,
    pub max_violation: f64,
    pub omega_i_norm: f64,
    pub per_structure: Vec<(String, f64)>,
}

/// ω̂_I − d(Îα̂).
pub fn theorem_form<'c, T: Real, P: HkAction<T> + ?Sized>(chart: &'c ReducedChart<'_, T, P>) -> Result<ChartForm<'c, T>> {
    let ia = horizontal_one_form(chart, alpha_field(chart, Some(Structure::I)));
    kahler_chart_form(chart, Structure::I).sub(&chart_d(chart, &ia)?)
}

pub fn verify_theorem<T: Real, P: HkAction<T> + ?Sized>(
    chart: &ReducedChart<'_, T, P>,
    n_zeta: usize,
    seed: u64,
    tol: f64,
) -> Result<TheoremCheck> {
    let t = theorem_form(chart)?.two_form_at_origin()?;
    let wi = kahler_chart_form(chart, Structure::I).two_form_at_origin()?;
    let scale = to_f64(wi.norm());
    let mut per = Vec::new();
    let mut worst = 0.0f64;
    for (label, a) in sweep_structures(chart.quotient_space(), n_zeta, seed) {
        let v = to_f64(type_violation(&t, &a)) / scale.max(f64::MIN_POSITIVE);
        worst = worst.max(v);
        per.push((label, v));
    }
    Ok(TheoremCheck { passed: worst <= tol, max_violation: worst, omega_i_norm: scale, per_structure: per })
}

/// Chart components ξ(u) of the descended field X̂ (horizontal part of X).
pub fn descended_field<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>, u: &DVector<T>) -> Result<DVector<T>> {
    let p = chart.eval(u)?;
    let x = chart.problem().s1_field(&p.x);
    let hx = chart.horizontal_projector(&p.x) * x;
    Ok(lstsq_vec(&p.horizontal, &hx).0)
}

/// ℒ_ξ of a 2-form at the origin from symmetric Euler flows u ↦ u ± sξ(u).
pub fn lie_derivative_at_origin<T: Real, P: HkAction<T> + ?Sized>(
    chart: &ReducedChart<'_, T, P>,
    form: &ChartForm<'_, T>,
    s: T,
) -> Result<DMatrix<T>> {
    let n = chart.dim();
    let h = chart.step();
    let zero = DVector::zeros(n);
    let xi0 = descended_field(chart, &zero)?;
    let mut dxi = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut up = zero.clone();
        let mut um = zero.clone();
        up[a] += h;
        um[a] -= h;
        let col = (descended_field(chart, &up)? - descended_field(chart, &um)?) / (h * lit(2.0));
        dxi.set_column(a, &col);
    }
    let id = DMatrix::<T>::identity(n, n);
    let pull = |sign: T| -> Result<DMatrix<T>> {
        let u = &xi0 * (s * sign);
        if to_f64(u.norm()) > 0.5 {
            return Err(Error::FlowLeftChart { radius: to_f64(u.norm()) });
        }
        let jac = &id + &dxi * (s * sign);
        Ok(jac.transpose() * form.eval(&u)? * jac)
    };
    Ok((pull(T::one())? - pull(-T::one())?) / (s * lit(2.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieResiduals {
    /// ‖ℒω̂_I‖.
    pub r_i: f64,
    /// ‖ℒω̂_J + ω̂_K + F₂‖.
    pub r_j: f64,
    /// ‖ℒω̂_K − ω̂_J − F₁‖.
    pub r_k: f64,
}

impl LieResiduals {
    pub fn max(&self) -> f64 {
        self.r_i.max(self.r_j).max(self.r_k)
    }
}

/// Lie derivatives of ω̂_I, ω̂_J, ω̂_K along X̂ at the base, and F₁, F₂ there.
pub struct LieData<T: Real> {
    pub l_i: DMatrix<T>,
    pub l_j: DMatrix<T>,
    pub l_k: DMatrix<T>,
    pub omega: [TwoForm<T>; 3],
    pub f1: TwoForm<T>,
    pub f2: TwoForm<T>,
}

pub fn lie_data<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>) -> Result<LieData<T>> {
    let s = chart.step();
    let forms = [Structure::I, Structure::J, Structure::K].map(|w| kahler_chart_form(chart, w));
    let l_i = lie_derivative_at_origin(chart, &forms[0], s)?;
    let l_j = lie_derivative_at_origin(chart, &forms[1], s)?;
    let l_k = lie_derivative_at_origin(chart, &forms[2], s)?;
    let omega = [forms[0].two_form_at_origin()?, forms[1].two_form_at_origin()?, forms[2].two_form_at_origin()?];
    let (f1, f2) = compute_f_via_omega(chart)?.at_origin()?;
    Ok(LieData { l_i, l_j, l_k, omega, f1, f2 })
}

pub fn lie_derivative_check<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>) -> Result<LieResiduals> {
    let d = lie_data(chart)?;
    let [_, wj, wk] = &d.omega;
    Ok(LieResiduals {
        r_i: to_f64(d.l_i.norm()),
        r_j: to_f64((&d.l_j + wk.matrix() + d.f2.matrix()).norm()),
        r_k: to_f64((&d.l_k - wj.matrix() - d.f1.matrix()).norm()),
    })
}

/// 2(ω̂_I − d(Îα̂)); the bundle curvature is `scalar_factor` times this real form.
pub struct CurvatureRepresentative<'c, T: Real> {
    pub form: ChartForm<'c, T>,
    pub scalar_factor: &'static str,
    /// max |d(form)| at the base.
    pub closedness: f64,
}

pub fn hyperholomorphic_curvature<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
) -> Result<CurvatureRepresentative<'c, T>> {
    let form = theorem_form(chart)?.scale(lit(2.0));
    let closedness = to_f64(closedness_defect(&form, &DVector::zeros(chart.dim()), chart.step())?);
    Ok(CurvatureRepresentative { form, scalar_factor: "i", closedness })
}
