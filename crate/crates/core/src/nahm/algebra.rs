use crate::error::{Error, Result};
use crate::scalar::{adjoint, cnorm, commutator, ctrace, cx, czeros, lit, normal, Cx, Real};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// ⟨A, B⟩ = −Re tr(AB), positive definite on su(m).
pub fn inner<T: Real>(a: &DMatrix<Cx<T>>, b: &DMatrix<Cx<T>>) -> T {
    let mut s = T::zero();
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    -s
}

/// su(m) with a basis orthonormal for [`inner`].
///
/// The first m−1 elements are diagonal (i times normalised generalised Gell-Mann
/// diagonals), so the diagonal Cartan subalgebra is spanned by coordinates 0..m−1.
#[derive(Debug, Clone)]
pub struct SuAlgebra<T: Real> {
    m: usize,
    basis: Vec<DMatrix<Cx<T>>>,
    // f[(l * d + j) * d + k] = ⟨e_k, [e_l, e_j]⟩
    f: Vec<T>,
}

impl<T: Real> SuAlgebra<T> {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("su(m) needs m >= 2, got {m}")));
        }
        let mut basis = Vec::with_capacity(m * m - 1);
        for l in 1..m {
            let mut e = czeros(m, m);
            let c: T = lit(1.0 / ((l * (l + 1)) as f64).sqrt());
            for r in 0..l {
                e[(r, r)] = cx(T::zero(), c);
            }
            e[(l, l)] = cx(T::zero(), -c * lit(l as f64));
            basis.push(e);
        }
        let h: T = lit(std::f64::consts::FRAC_1_SQRT_2);
        for r in 0..m {
            for c in r + 1..m {
                let mut a = czeros(m, m);
                a[(r, c)] = cx(h, T::zero());
                a[(c, r)] = cx(-h, T::zero());
                basis.push(a);
                let mut s = czeros(m, m);
                s[(r, c)] = cx(T::zero(), h);
                s[(c, r)] = cx(T::zero(), h);
                basis.push(s);
            }
        }
        let d = basis.len();
        let mut f = vec![T::zero(); d * d * d];
        for l in 0..d {
            for j in 0..d {
                let br = commutator(&basis[l], &basis[j]);
                for k in 0..d {
                    f[(l * d + j) * d + k] = inner(&basis[k], &br);
                }
            }
        }
        Ok(Self { m, basis, f })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.m - 1
    }

    pub fn basis(&self) -> &[DMatrix<Cx<T>>] {
        &self.basis
    }

    pub fn coords(&self, a: &DMatrix<Cx<T>>) -> DVector<T> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|e| inner(e, a)))
    }

    pub fn matrix(&self, v: &DVector<T>) -> DMatrix<Cx<T>> {
        let mut out = czeros(self.m, self.m);
        for (e, &c) in self.basis.iter().zip(v.iter()) {
            out += e.map(|z| z * c);
        }
        out
    }

    /// Coordinates of [x, y].
    pub fn bracket(&self, x: &DVector<T>, y: &DVector<T>) -> DVector<T> {
        let d = self.dim();
        let mut out = DVector::zeros(d);
        for l in 0..d {
            if x[l] == T::zero() {
                continue;
            }
            for j in 0..d {
                let c = x[l] * y[j];
                if c == T::zero() {
                    continue;
                }
                let base = (l * d + j) * d;
                for k in 0..d {
                    out[k] += c * self.f[base + k];
                }
            }
        }
        out
    }

    /// Matrix of ad(x) in the basis.
    pub fn ad(&self, x: &DVector<T>) -> DMatrix<T> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for l in 0..d {
            if x[l] == T::zero() {
                continue;
            }
            for j in 0..d {
                let base = (l * d + j) * d;
                for k in 0..d {
                    out[(k, j)] += x[l] * self.f[base + k];
                }
            }
        }
        out
    }

    /// |A + A†| + |tr A|: distance from su(m).
    pub fn membership(&self, a: &DMatrix<Cx<T>>) -> T {
        if a.nrows() != self.m || a.ncols() != self.m {
            return T::max_value().unwrap_or(T::one() / T::zero());
        }
        let t = ctrace(a);
        cnorm(&(a + adjoint(a))) + (t.re * t.re + t.im * t.im).sqrt()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<Cx<T>> {
        let v = DVector::from_fn(self.dim(), |_, _| normal::<T, _>(rng));
        self.matrix(&v)
    }

    /// Orthonormal coordinate basis (columns) of the common centralizer of `xs`.
    pub fn centralizer(&self, xs: &[DMatrix<Cx<T>>]) -> DMatrix<T> {
        let d = self.dim();
        let mut stacked = DMatrix::zeros(d * xs.len().max(1), d);
        for (a, x) in xs.iter().enumerate() {
            let ad = self.ad(&self.coords(x));
            stacked.view_mut((a * d, 0), (d, d)).copy_from(&ad);
        }
        let svd = stacked.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let smax = svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s));
        let tol = lit::<T>(1e-10) * smax.max(T::one());
        let cols: Vec<DVector<T>> = (0..d)
            .filter(|&k| svd.singular_values[k] <= tol)
            .map(|k| vt.row(k).transpose())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(d, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}
