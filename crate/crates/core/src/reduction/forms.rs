//! Differential forms in chart coordinates and their finite-difference calculus.

use super::chart::ReducedChart;
use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{Structure, TwoForm};
use crate::scalar::{lit, max_abs, to_f64, Real};
use nalgebra::{DMatrix, DVector};
use std::rc::Rc;

type Evaluator<'c, T> = Rc<dyn Fn(&DVector<T>) -> Result<DMatrix<T>> + 'c>;

/// A form of degree 0, 1 or 2 given by its components in chart coordinates:
/// 1×1, n×1 and n×n matrices respectively.
#[derive(Clone)]
pub struct ChartForm<'c, T: Real> {
    degree: usize,
    dim: usize,
    eval: Evaluator<'c, T>,
}

impl<'c, T: Real> ChartForm<'c, T> {
    pub fn new(degree: usize, dim: usize, f: impl Fn(&DVector<T>) -> Result<DMatrix<T>> + 'c) -> Result<Self> {
        if degree > 2 {
            return Err(Error::InvalidInput(format!("degree {degree} is not supported")));
        }
        Ok(Self { degree, dim, eval: Rc::new(f) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, u: &DVector<T>) -> Result<DMatrix<T>> {
        (self.eval)(u)
    }

    pub fn at_origin(&self) -> Result<DMatrix<T>> {
        self.eval(&DVector::zeros(self.dim))
    }

    /// Value at the origin of a degree-2 form.
    pub fn two_form_at_origin(&self) -> Result<TwoForm<T>> {
        if self.degree != 2 {
            return Err(Error::InvalidInput("not a 2-form".into()));
        }
        Ok(TwoForm::from_antisymmetrized(self.at_origin()?))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, -T::one())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, T::one())
    }

    fn combine(&self, o: &Self, s: T) -> Result<Self> {
        if self.degree != o.degree || self.dim != o.dim {
            return Err(Error::InvalidInput("forms of different degree or dimension".into()));
        }
        let (a, b) = (self.eval.clone(), o.eval.clone());
        Ok(Self { degree: self.degree, dim: self.dim, eval: Rc::new(move |u| Ok(a(u)? + b(u)? * s)) })
    }

    pub fn scale(&self, s: T) -> Self {
        let a = self.eval.clone();
        Self { degree: self.degree, dim: self.dim, eval: Rc::new(move |u| Ok(a(u)? * s)) }
    }
}

/// Covector field on the ambient space.
pub type AmbientOneForm<'c, T> = Rc<dyn Fn(&DVector<T>) -> DVector<T> + 'c>;

/// u ↦ β_{R(u)}(hor ∂_a R(u)), with no basic-ness check.
pub fn horizontal_one_form<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    beta: AmbientOneForm<'c, T>,
) -> ChartForm<'c, T> {
    let n = chart.dim();
    ChartForm {
        degree: 1,
        dim: n,
        eval: Rc::new(move |u| {
            let p = chart.eval(u)?;
            let v = p.horizontal.transpose() * beta(&p.x);
            Ok(DMatrix::from_column_slice(n, 1, v.as_slice()))
        }),
    }
}

/// Descends a basic 1-form; rejects β with |β(Y*)| > tol at the base.
pub fn descend_one_form<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    beta: AmbientOneForm<'c, T>,
    tol: T,
) -> Result<ChartForm<'c, T>> {
    let x = &chart.base().x;
    let a = chart.problem().action_matrix(x);
    let v = if a.ncols() == 0 { T::zero() } else { (a.transpose() * beta(x)).amax() };
    if v > tol {
        return Err(Error::NotBasic { violation: to_f64(v), tol: to_f64(tol) });
    }
    Ok(horizontal_one_form(chart, beta))
}

/// α, Iα, Jα or Kα of the problem as an ambient covector field (Aβ = β∘A).
pub fn alpha_field<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    which: Option<Structure>,
) -> AmbientOneForm<'c, T> {
    let p = chart.problem();
    match which {
        None => Rc::new(move |x| p.alpha(x)),
        Some(s) => Rc::new(move |x| p.space().structure(s).transpose() * p.alpha(x)),
    }
}

/// ω̂_A: the ambient Kähler form restricted to horizontal lifts.
pub fn kahler_chart_form<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    which: Structure,
) -> ChartForm<'c, T> {
    let w = chart.problem().space().kahler_form(which).matrix().clone();
    ChartForm {
        degree: 2,
        dim: chart.dim(),
        eval: Rc::new(move |u| {
            let p = chart.eval(u)?;
            let m = p.horizontal.transpose() * &w * &p.horizontal;
            Ok((&m - m.transpose()) * lit::<T>(0.5))
        }),
    }
}

/// Exterior derivative by central differences with the chart step.
pub fn chart_d<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &ReducedChart<'_, T, P>,
    f: &ChartForm<'c, T>,
) -> Result<ChartForm<'c, T>> {
    d_with_step(f, chart.step())
}

pub fn d_with_step<'c, T: Real>(f: &ChartForm<'c, T>, h: T) -> Result<ChartForm<'c, T>> {
    let n = f.dim;
    let g = f.eval.clone();
    let two_h = h * lit(2.0);
    let partials = move |u: &DVector<T>| -> Result<Vec<DMatrix<T>>> {
        (0..n)
            .map(|a| {
                let mut up = u.clone();
                let mut um = u.clone();
                up[a] += h;
                um[a] -= h;
                Ok((g(&up)? - g(&um)?) / two_h)
            })
            .collect()
    };
    match f.degree {
        0 => Ok(ChartForm {
            degree: 1,
            dim: n,
            eval: Rc::new(move |u| {
                let p = partials(u)?;
                Ok(DMatrix::from_fn(n, 1, |a, _| p[a][(0, 0)]))
            }),
        }),
        1 => Ok(ChartForm {
            degree: 2,
            dim: n,
            eval: Rc::new(move |u| {
                let p = partials(u)?;
                Ok(DMatrix::from_fn(n, n, |a, b| p[a][(b, 0)] - p[b][(a, 0)]))
            }),
        }),
        _ => Err(Error::InvalidInput("chart_d takes forms of degree 0 or 1".into())),
    }
}

/// max |dF_abc| at u for a 2-form F, by central differences with step h.
pub fn closedness_defect<T: Real>(f: &ChartForm<'_, T>, u: &DVector<T>, h: T) -> Result<T> {
    if f.degree != 2 {
        return Err(Error::InvalidInput("closedness is tested on 2-forms".into()));
    }
    let n = f.dim;
    let two_h = h * lit(2.0);
    let mut p = Vec::with_capacity(n);
    for a in 0..n {
        let mut up = u.clone();
        let mut um = u.clone();
        up[a] += h;
        um[a] -= h;
        p.push((f.eval(&up)? - f.eval(&um)?) / two_h);
    }
    let mut worst = T::zero();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = p[a][(b, c)] - p[b][(a, c)] + p[c][(a, b)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest entry of a matrix-valued form at u.
pub fn sup_at<T: Real>(f: &ChartForm<'_, T>, u: &DVector<T>) -> Result<T> {
    Ok(max_abs(&f.eval(u)?))
}
