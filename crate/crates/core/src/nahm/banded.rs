//! Banded LU with partial pivoting (row interchanges touch only columns ≥ k, so
//! multipliers stay where they were written).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct BandMatrix<T: Real> {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    a: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Self { n, kl, ku, w, a: vec![T::zero(); n * w] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.w + (j + self.kl - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.a[k] += v;
    }

    pub fn factor(mut self) -> Result<BandLu<T>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0; n];
        for k in 0..n {
            let rmax = (k + kl + 1).min(n);
            let mut p = k;
            let mut best = T::zero();
            for r in k..rmax {
                let v = self.a[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == T::zero() {
                return Err(Error::IllConditioned { condition: f64::INFINITY });
            }
            piv[k] = p;
            let cmax = (k + kl + ku + 1).min(n);
            if p != k {
                for j in k..cmax {
                    let (x, y) = (self.idx(k, j), self.idx(p, j));
                    self.a.swap(x, y);
                }
            }
            let pivot = self.a[self.idx(k, k)];
            for r in k + 1..rmax {
                let ir = self.idx(r, k);
                let l = self.a[ir] / pivot;
                self.a[ir] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..cmax {
                    let kj = self.a[self.idx(k, j)];
                    let rj = self.idx(r, j);
                    self.a[rj] -= l * kj;
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BandLu<T: Real> {
    m: BandMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn solve(&self, b: &mut [T]) {
        let m = &self.m;
        let n = m.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for r in k + 1..(k + m.kl + 1).min(n) {
                b[r] -= m.a[m.idx(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..(k + m.kl + m.ku + 1).min(n) {
                s -= m.a[m.idx(k, j)] * b[j];
            }
            b[k] = s / m.a[m.idx(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, kl, ku) in &[(1, 0, 0), (7, 2, 3), (40, 5, 1), (60, 9, 11)] {
            let mut dense = DMatrix::<f64>::zeros(n, n);
            let mut band = BandMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    // small diagonal forces pivoting
                    let v: f64 = rng.random_range(-1.0..1.0) * if i == j { 1e-3 } else { 1.0 };
                    dense[(i, j)] = v;
                    band.add(i, j, v);
                }
            }
            let rhs = DVector::from_fn(n, |i, _| (i as f64).sin() + 0.5);
            let want = dense.clone().lu().solve(&rhs).unwrap();
            let mut got = rhs.as_slice().to_vec();
            band.factor().unwrap().solve(&mut got);
            let err = (DVector::from_vec(got) - &want).amax();
            assert!(err < 1e-9 * want.amax().max(1.0), "n={n} err={err}");
        }
    }

    #[test]
    fn singular_is_reported() {
        let b = BandMatrix::<f64>::zeros(3, 1, 1);
        assert!(matches!(b.factor(), Err(Error::IllConditioned { .. })));
    }
}
