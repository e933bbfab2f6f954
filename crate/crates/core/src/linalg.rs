//! Small dense helpers on top of nalgebra's decompositions.

use crate::scalar::{lit, Real};
use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(a.clone(), false, false).singular_values.iter().copied().collect()
}

/// Smallest singular value over the column space (0 columns gives +inf-like `max`).
pub fn sigma_min<T: Real>(a: &DMatrix<T>) -> T {
    let s = singular_values(a);
    if a.ncols() > a.nrows() {
        return T::zero();
    }
    s.last().copied().unwrap_or(T::max_value().unwrap_or(T::one()))
}

/// Orthonormal basis of the column span, dropping directions below `rel_tol * sigma_max`.
pub fn orthonormal_span<T: Real>(a: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let d = a.nrows();
    if a.ncols() == 0 || d == 0 {
        return DMatrix::zeros(d, 0);
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > rel_tol * smax && smax > T::zero())
        .collect();
    DMatrix::from_fn(d, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of the orthogonal complement of the orthonormal columns `q` in R^d.
pub fn orthogonal_complement<T: Real>(q: &DMatrix<T>, d: usize) -> DMatrix<T> {
    let p = DMatrix::identity(d, d) - q * q.transpose();
    let eig = SymmetricEigen::new(p);
    let half = lit::<T>(0.5);
    let mut keep: Vec<usize> = (0..d).filter(|&k| eig.eigenvalues[k] > half).collect();
    keep.sort_unstable();
    let mut out = DMatrix::from_fn(d, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    // fix signs so the frame is reproducible: largest entry of each column positive
    for c in 0..out.ncols() {
        let mut best = 0;
        for r in 0..d {
            if out[(r, c)].abs() > out[(best, c)].abs() + lit(1e-12) {
                best = r;
            }
        }
        if out[(best, c)] < T::zero() {
            let mut col = out.column_mut(c);
            col.neg_mut();
        }
    }
    out
}

/// Least-squares solution of `a x = b` with the 2-norm condition number of `a`.
pub fn lstsq<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> (DMatrix<T>, T) {
    if a.ncols() == 0 {
        return (DMatrix::zeros(0, b.ncols()), T::one());
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let smin = svd.singular_values.iter().fold(smax, |m, &s| m.min(s));
    let eps = smax * lit(1e-14);
    let x = svd.solve(b, eps).expect("u and v requested");
    let cond = if smin > T::zero() { smax / smin } else { T::max_value().unwrap_or(smax) };
    (x, cond)
}

pub fn lstsq_vec<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> (DVector<T>, T) {
    let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let (x, c) = lstsq(a, &bm);
    (x.column(0).into_owned(), c)
}

/// Orthogonal factor of the polar decomposition.
pub fn polar_orthogonal<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("u");
    let vt = svd.v_t.expect("v_t");
    u * vt
}

pub fn antisym_part<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    (a - a.transpose()) * lit::<T>(0.5)
}
