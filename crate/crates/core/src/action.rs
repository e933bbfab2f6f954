//! Tri-Hamiltonian group actions on flat hyperkähler spaces.

use crate::hk::{HkSpace, Structure};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};

/// A compact group acting on a flat hyperkähler space with a hyperkähler moment map
/// and a distinguished 1-form α. Lie algebra elements are coefficient vectors in a
/// fixed orthonormal basis.
pub trait HkAction<T: Real> {
    fn space(&self) -> &HkSpace<T>;

    fn group_dim(&self) -> usize;

    /// Columns are the fundamental fields Y_a* at x.
    fn action_matrix(&self, x: &DVector<T>) -> DMatrix<T>;

    /// (μ_I, μ_J, μ_K) paired with the basis, stacked in that order.
    fn moment(&self, x: &DVector<T>) -> DVector<T>;

    /// α_x as a covector.
    fn alpha(&self, x: &DVector<T>) -> DVector<T>;

    fn bracket(&self, a: &DVector<T>, b: &DVector<T>) -> DVector<T>;

    /// Rows are the differentials of the moment components: dμ_A^Y = g(A Y*, ·).
    fn moment_jacobian(&self, x: &DVector<T>) -> DMatrix<T> {
        let a = self.action_matrix(x);
        let g = self.group_dim();
        let d = a.nrows();
        let sp = self.space();
        let mut out = DMatrix::zeros(3 * g, d);
        for (blk, s) in Structure::ALL.iter().enumerate() {
            let rows = (sp.structure(*s) * &a).transpose() * sp.metric();
            out.view_mut((blk * g, 0), (g, d)).copy_from(&rows);
        }
        out
    }

    /// X with α = i_X ω_I, i.e. X = (gI)⁻¹α.
    fn s1_field(&self, x: &DVector<T>) -> DVector<T> {
        let sp = self.space();
        let gi = sp.metric() * sp.structure(Structure::I);
        gi.lu().solve(&self.alpha(x)).expect("g·I is invertible")
    }

    /// (Jα)(Y_a*) and (Kα)(Y_a*) for every basis element.
    fn alpha_pairings(&self, x: &DVector<T>) -> (DVector<T>, DVector<T>) {
        let a = self.action_matrix(x);
        let al = self.alpha(x);
        let sp = self.space();
        let j = (sp.structure(Structure::J) * &a).transpose() * &al;
        let k = (sp.structure(Structure::K) * &a).transpose() * &al;
        (j, k)
    }
}
