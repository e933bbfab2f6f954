//! Explicit su(2) solutions used as oracles.

use super::NahmPath;
use crate::error::{Error, Result};
use crate::scalar::{cx, czeros, lit, Cx, Real};
use nalgebra::{DMatrix, Matrix3};

type Mat<T> = DMatrix<Cx<T>>;

/// σ̂_a = −iσ_a, so [σ̂_a, σ̂_b] = 2ε_abc σ̂_c.
pub fn su2_triple<T: Real>() -> [Mat<T>; 3] {
    let (o, z) = (T::one(), T::zero());
    let m = |v: [Cx<T>; 4]| DMatrix::from_row_slice(2, 2, &v);
    [
        m([cx(z, z), cx(z, -o), cx(z, -o), cx(z, z)]),
        m([cx(z, z), cx(-o, z), cx(o, z), cx(z, z)]),
        m([cx(z, -o), cx(z, z), cx(z, z), cx(z, o)]),
    ]
}

/// T₀ = 0, T_a(s) = −σ̂_a / (2(s + 1)); limits τ = 0.
pub fn inverse_profile<T: Real>(length: T, points: usize) -> Result<NahmPath<T>> {
    let sig = su2_triple::<T>();
    NahmPath::from_fn(length, points, |s| {
        let c = -T::one() / (lit::<T>(2.0) * (s + T::one()));
        [czeros(2, 2), sig[0].map(|z| z * c), sig[1].map(|z| z * c), sig[2].map(|z| z * c)]
    })
}

// ê = (σ̂₃, σ̂₁, σ̂₂)/2 satisfies [ê_a, ê_b] = ε_abc ê_c and makes the limit diagonal.
fn frame<T: Real>() -> [Mat<T>; 3] {
    let [s1, s2, s3] = su2_triple::<T>();
    let h: T = lit(0.5);
    [s3.map(|z| z * h), s1.map(|z| z * h), s2.map(|z| z * h)]
}

fn check_rotation<T: Real>(r: &Matrix3<T>) -> Result<()> {
    let e = (r.transpose() * r - Matrix3::identity()).amax();
    if e > lit(1e-12) || r.determinant() < T::zero() {
        return Err(Error::InvalidInput("rotation must be in SO(3)".into()));
    }
    Ok(())
}

/// T_a(s) = Σ_b R_ab f_b(s) ê_b with f = (λ coth λ(s+s₀), λ csch λ(s+s₀), −λ csch λ(s+s₀)).
pub fn coth_profile<T: Real>(lambda: T, s0: T, rot: &Matrix3<T>, length: T, points: usize) -> Result<NahmPath<T>> {
    if lambda <= T::zero() || s0 <= T::zero() {
        return Err(Error::InvalidInput("need lambda > 0 and s0 > 0".into()));
    }
    check_rotation(rot)?;
    let e = frame::<T>();
    NahmPath::from_fn(length, points, |s| {
        let x = lambda * (s + s0);
        let csch = T::one() / x.sinh();
        let f = [lambda * x.cosh() * csch, lambda * csch, -lambda * csch];
        let comp = |a: usize| {
            let mut m = czeros(2, 2);
            for b in 0..3 {
                let c = rot[(a, b)] * f[b];
                m += e[b].map(|z| z * c);
            }
            m
        };
        [czeros(2, 2), comp(0), comp(1), comp(2)]
    })
}

/// Limits of [`coth_profile`] as s → ∞: τ_a = λ R_a1 ê₁.
pub fn coth_limit<T: Real>(lambda: T, rot: &Matrix3<T>) -> [Mat<T>; 3] {
    let e1 = frame::<T>()[0].clone();
    std::array::from_fn(|a| e1.map(|z| z * (lambda * rot[(a, 0)])))
}
