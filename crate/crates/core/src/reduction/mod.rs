//! Charts on hyperkähler quotients and the finite-difference calculus of the
//! forms α̂, Ĵα̂, K̂α̂, ω̂_A, F₁, F₂ on them.

mod chart;
mod curvature;
mod diagnostics;
mod forms;
mod theorem;

pub use chart::{build_chart, ChartPoint, LevelSetPoint, ReducedChart, RetractionOptions};
pub use curvature::{
    alpha_functionals, compute_f_via_d, compute_f_via_omega, curvature_at, curvature_sample, structure_equation_residual,
    AlphaFunctionals, CurvatureSample, FPair, CONSTANCY_RADIUS, CONSTANCY_TOL,
};
pub use diagnostics::{
    invariance_diagnostics, rep_homomorphism_check, DiagnosticOptions, InvarianceDiagnostics, PerturbedAlpha,
    INVARIANCE_CONDITIONS,
};
pub use forms::{
    alpha_field, chart_d, closedness_defect, d_with_step, descend_one_form, horizontal_one_form, kahler_chart_form,
    sup_at, AmbientOneForm, ChartForm,
};
pub use theorem::{
    descended_field, hyperholomorphic_curvature, lie_data, lie_derivative_at_origin, lie_derivative_check, theorem_form,
    verify_theorem, CurvatureRepresentative, LieData, LieResiduals, TheoremCheck,
};

use crate::action::HkAction;
use crate::error::Result;
use crate::hk::{CotangentModel, HkSpace};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};

/// The cotangent model with the trivial group; α is the S¹ form of the fiber rotation.
#[derive(Debug, Clone)]
pub struct FlatS1Problem<T: Real> {
    model: CotangentModel<T>,
}

impl<T: Real> FlatS1Problem<T> {
    pub fn new(hermitian_dim: usize) -> Result<Self> {
        Ok(Self { model: CotangentModel::new(hermitian_dim)? })
    }

    pub fn model(&self) -> &CotangentModel<T> {
        &self.model
    }
}

impl<T: Real> HkAction<T> for FlatS1Problem<T> {
    fn space(&self) -> &HkSpace<T> {
        self.model.space()
    }
    fn group_dim(&self) -> usize {
        0
    }
    fn action_matrix(&self, x: &DVector<T>) -> DMatrix<T> {
        DMatrix::zeros(x.len(), 0)
    }
    fn moment(&self, _x: &DVector<T>) -> DVector<T> {
        DVector::zeros(0)
    }
    fn alpha(&self, x: &DVector<T>) -> DVector<T> {
        self.model.alpha_form().at(x).0
    }
    fn bracket(&self, _a: &DVector<T>, _b: &DVector<T>) -> DVector<T> {
        DVector::zeros(0)
    }
}

#[cfg(test)]
mod tests;
