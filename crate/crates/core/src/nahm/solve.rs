use super::banded::BandMatrix;
use super::{collocation_residual_sup, stencil, NahmConfig, NahmPath, SOLUTION_TOL};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NahmSolveOptions {
    /// Newton stops once the collocation residual (sup over coordinates) is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Required sup of [`residual_sup`] on the returned path.
    pub accept: f64,
}

impl Default for NahmSolveOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 40, accept: SOLUTION_TOL }
    }
}

struct System<'a, T: Real> {
    cfg: &'a NahmConfig<T>,
    n: usize,
    d: usize,
    scale: T,
    t0: Vec<DVector<T>>,
}

impl<T: Real> System<'_, T> {
    fn block(&self) -> usize {
        3 * self.d
    }

    // z[i][a]: coordinates of T_{a+1}(s_i). The value at L is pinned and the
    // equations are imposed at s_1, …, s_L; T(0) is left free.
    fn residual(&self, z: &[[DVector<T>; 3]]) -> Vec<T> {
        let g = self.cfg.algebra();
        let (n, d, b) = (self.n, self.d, self.block());
        let mut out = vec![T::zero(); (n - 1) * b];
        for i in 1..n {
            let ri = i - 1;
            let (s, w) = stencil(i, n);
            for a in 0..3 {
                let (bb, cc) = ((a + 1) % 3, (a + 2) % 3);
                let mut r = g.bracket(&self.t0[i], &z[i][a]) - g.bracket(&z[i][bb], &z[i][cc]);
                for (k, &wk) in w.iter().enumerate() {
                    if wk != 0.0 {
                        r.axpy(lit::<T>(wk) * self.scale, &z[s + k][a], T::one());
                    }
                }
                out[ri * b + a * d..ri * b + (a + 1) * d].copy_from_slice(r.as_slice());
            }
        }
        out
    }

    fn jacobian(&self, z: &[[DVector<T>; 3]]) -> BandMatrix<T> {
        let g = self.cfg.algebra();
        let (n, d, b) = (self.n, self.d, self.block());
        let mut jac = BandMatrix::zeros((n - 1) * b, 4 * b, 5 * b);
        for i in 1..n {
            let ri = i - 1;
            let (s, w) = stencil(i, n);
            for (k, &wk) in w.iter().enumerate() {
                let j = s + k;
                if wk == 0.0 || j == n - 1 {
                    continue;
                }
                let c = lit::<T>(wk) * self.scale;
                for r in 0..b {
                    jac.add(ri * b + r, j * b + r, c);
                }
            }
            if i == n - 1 {
                continue;
            }
            let ad0 = g.ad(&self.t0[i]);
            let ads: Vec<_> = (0..3).map(|a| g.ad(&z[i][a])).collect();
            for a in 0..3 {
                let (bb, cc) = ((a + 1) % 3, (a + 2) % 3);
                for p in 0..d {
                    for q in 0..d {
                        let row = ri * b + a * d + p;
                        jac.add(row, i * b + a * d + q, ad0[(p, q)]);
                        // −[X, T_c] = ad(T_c)X and −[T_b, X] = −ad(T_b)X
                        jac.add(row, i * b + bb * d + q, ads[cc][(p, q)]);
                        jac.add(row, i * b + cc * d + q, -ads[bb][(p, q)]);
                    }
                }
            }
        }
        jac
    }
}

fn sup<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Newton collocation for T₁, T₂, T₃ with T₀ held at its initial profile and
/// T_a(L) pinned to `init`'s values at L. Succeeds when [`collocation_residual_sup`]
/// of the result is at most `opts.accept`.
pub fn solve_nahm<T: Real>(config: &NahmConfig<T>, init: &NahmPath<T>, opts: &NahmSolveOptions) -> Result<NahmPath<T>> {
    let g = config.algebra();
    let n = config.points();
    if init.points() != n || init.size() != g.m() || (init.length() - config.length()).abs() > lit::<T>(1e-12) * config.length() {
        return Err(Error::ShapeMismatch {
            what: "initial path",
            expected: format!("{n} samples of su({}) on [0, {}]", g.m(), to_f64(config.length())),
            found: format!("{} samples of {}x{} on [0, {}]", init.points(), init.size(), init.size(), to_f64(init.length())),
        });
    }
    let sys = System {
        cfg: config,
        n,
        d: g.dim(),
        scale: T::one() / (lit::<T>(12.0) * init.step()),
        t0: init.component(0).iter().map(|m| g.coords(m)).collect(),
    };
    let (d, b) = (sys.d, sys.block());
    let mut z: Vec<[DVector<T>; 3]> = (0..n).map(|i| std::array::from_fn(|a| g.coords(&init.component(a + 1)[i]))).collect();
    let tol: T = lit(opts.tol);
    let mut f = sys.residual(&z);
    let mut norm = sup(&f);
    let mut it = 0;
    while norm > tol {
        if it == opts.max_iter {
            return Err(Error::NonConvergence { iterations: it, residual: to_f64(norm) });
        }
        it += 1;
        let lu = sys.jacobian(&z).factor()?;
        let mut step: Vec<T> = f.iter().map(|&x| -x).collect();
        lu.solve(&mut step);
        let mut lambda = T::one();
        loop {
            let trial: Vec<[DVector<T>; 3]> = z
                .iter()
                .enumerate()
                .map(|(i, zi)| {
                    if i == n - 1 {
                        return zi.clone();
                    }
                    std::array::from_fn(|a| {
                        let sl = &step[i * b + a * d..i * b + (a + 1) * d];
                        &zi[a] + DVector::from_column_slice(sl) * lambda
                    })
                })
                .collect();
            let ft = sys.residual(&trial);
            let nt = sup(&ft);
            if nt.is_finite() && nt < norm {
                z = trial;
                f = ft;
                norm = nt;
                break;
            }
            lambda *= lit(0.5);
            if lambda < lit(1e-6) {
                return Err(Error::NonConvergence { iterations: it, residual: to_f64(norm) });
            }
        }
    }
    if it == 0 {
        let r = collocation_residual_sup(init);
        if r > lit(opts.accept) {
            return Err(Error::NonConvergence { iterations: 0, residual: to_f64(r) });
        }
        return Ok(init.clone());
    }
    let mut t: [Vec<_>; 4] = Default::default();
    t[0] = init.component(0).to_vec();
    for a in 0..3 {
        t[a + 1] = z.iter().map(|zi| g.matrix(&zi[a])).collect();
    }
    let out = NahmPath::new(init.length(), t)?;
    let r = collocation_residual_sup(&out);
    if r > lit(opts.accept) {
        return Err(Error::NonConvergence { iterations: it, residual: to_f64(r) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nahm::inverse_profile;
    use crate::scalar::czeros;

    #[test]
    fn jacobian_matches_differences() {
        let n = 7;
        let cfg = NahmConfig::degenerate(2, std::array::from_fn(|_| czeros(2, 2)), 3.0, n).unwrap();
        let init = inverse_profile::<f64>(3.0, n).unwrap();
        let g = cfg.algebra();
        let sys = System { cfg: &cfg, n, d: 3, scale: 1.0 / (12.0 * init.step()), t0: (0..n).map(|i| DVector::from_vec(vec![0.1 * i as f64, 0.2, -0.3])).collect() };
        let z: Vec<[DVector<f64>; 3]> = (0..n).map(|i| std::array::from_fn(|a| g.coords(&init.component(a + 1)[i]) + DVector::from_element(3, 0.01 * (i + a) as f64))).collect();
        let b = 9;
        let jac = sys.jacobian(&z);
        let f0 = sys.residual(&z);
        let m = (n - 1) * b;
        let mut worst: f64 = 0.0;
        for col in 0..m {
            let (i, a, k) = (col / b, (col % b) / 3, col % 3);
            let mut zp = z.clone();
            zp[i][a][k] += 1e-7;
            let fp = sys.residual(&zp);
            let mut e = vec![0.0; m];
            e[col] = 1.0;
            // J e via a dense reconstruction: solve is the only access, so compare J⁻¹(fd column) = e
            let mut fd: Vec<f64> = fp.iter().zip(&f0).map(|(x, y)| (x - y) / 1e-7).collect();
            jac.clone().factor().unwrap().solve(&mut fd);
            worst = worst.max(fd.iter().zip(&e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
        assert!(worst < 1e-5, "{worst}");
    }
}
