//! Framed doubled quiver representations, their gauge action and moment maps.

mod solve;

pub use solve::{pairing_identity_check, solve_moment, PairingCheck, SolveOptions, SolvedPoint};

use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{CotangentModel, HkSpace};
use crate::scalar::{adjoint, cident, cnorm, commutator, ctrace, cx, czeros, lit, normal_cx, Cx, Real};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Directed multigraph on vertices `0..n` (loops allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Quiver {
    /// `edges` are (source, target) pairs of 0-based vertex indices.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("quiver needs at least one vertex".into()));
        }
        if let Some(&(s, t)) = edges.iter().find(|&&(s, t)| s >= n || t >= n) {
            return Err(Error::InvalidInput(format!("edge ({s}, {t}) out of range for {n} vertices")));
        }
        Ok(Self { n, edges })
    }

    /// One vertex, one loop.
    pub fn jordan() -> Self {
        Self { n: 1, edges: vec![(0, 0)] }
    }

    /// One vertex, no edges.
    pub fn a1() -> Self {
        Self { n: 1, edges: vec![] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Arrow of the doubled quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoubledEdge {
    pub source: usize,
    pub target: usize,
    /// +1 on original arrows, −1 on reversals.
    pub sign: i8,
    /// Index of the reversed arrow h̄.
    pub reverse: usize,
}

/// Arrow `2e` is the original edge `e`, arrow `2e + 1` its reversal.
pub fn double_quiver(q: &Quiver) -> Vec<DoubledEdge> {
    let mut h = Vec::with_capacity(2 * q.edges.len());
    for (e, &(s, t)) in q.edges.iter().enumerate() {
        h.push(DoubledEdge { source: s, target: t, sign: 1, reverse: 2 * e + 1 });
        h.push(DoubledEdge { source: t, target: s, sign: -1, reverse: 2 * e });
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedDims {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

impl FramedDims {
    pub fn new(v: Vec<usize>, w: Vec<usize>) -> Result<Self> {
        if v.len() != w.len() {
            return Err(Error::ShapeMismatch {
                what: "framed dimensions",
                expected: format!("{} framing entries", v.len()),
                found: w.len().to_string(),
            });
        }
        if v.iter().all(|&d| d == 0) {
            return Err(Error::InvalidInput("dimension vector v is zero".into()));
        }
        Ok(Self { v, w })
    }
}

/// ζ_ℝ as real scalars (central elements of the gauge algebra), ζ_ℂ complex.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityParams<T: Real> {
    pub zeta_r: Vec<T>,
    pub zeta_c: Vec<Cx<T>>,
}

impl<T: Real> StabilityParams<T> {
    pub fn new(zeta_r: Vec<T>, zeta_c: Vec<Cx<T>>) -> Result<Self> {
        if zeta_r.len() != zeta_c.len() {
            return Err(Error::ShapeMismatch {
                what: "stability parameters",
                expected: format!("{} complex entries", zeta_r.len()),
                found: zeta_c.len().to_string(),
            });
        }
        if zeta_r.iter().any(|z| !z.is_finite()) || zeta_c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite stability parameter".into()));
        }
        Ok(Self { zeta_r, zeta_c })
    }
}

/// (B_h, i_k, j_k) for h in the doubled edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct RepPoint<T: Real> {
    pub b: Vec<DMatrix<Cx<T>>>,
    pub i: Vec<DMatrix<Cx<T>>>,
    pub j: Vec<DMatrix<Cx<T>>>,
}

impl<T: Real> RepPoint<T> {
    pub fn zeros(h: &[DoubledEdge], d: &FramedDims) -> Self {
        Self {
            b: h.iter().map(|e| czeros(d.v[e.target], d.v[e.source])).collect(),
            i: (0..d.v.len()).map(|k| czeros(d.v[k], d.w[k])).collect(),
            j: (0..d.v.len()).map(|k| czeros(d.w[k], d.v[k])).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(h: &[DoubledEdge], d: &FramedDims, rng: &mut R, scale: T) -> Self {
        let mut p = Self::zeros(h, d);
        for m in p.b.iter_mut().chain(p.i.iter_mut()).chain(p.j.iter_mut()) {
            for z in m.iter_mut() {
                *z = normal_cx::<T, _>(rng) * scale;
            }
        }
        p
    }

    fn check_shapes(&self, h: &[DoubledEdge], d: &FramedDims) -> Result<()> {
        let bad = |what: &'static str, r: usize, c: usize, m: &DMatrix<Cx<T>>| Error::ShapeMismatch {
            what,
            expected: format!("{r}x{c}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        };
        let n = d.v.len();
        if self.b.len() != h.len() || self.i.len() != n || self.j.len() != n {
            return Err(Error::ShapeMismatch {
                what: "representation",
                expected: format!("{} arrows and {n} vertices", h.len()),
                found: format!("{} arrows, {} i, {} j", self.b.len(), self.i.len(), self.j.len()),
            });
        }
        for (e, m) in h.iter().zip(&self.b) {
            if m.shape() != (d.v[e.target], d.v[e.source]) {
                return Err(bad("B_h", d.v[e.target], d.v[e.source], m));
            }
        }
        for k in 0..n {
            if self.i[k].shape() != (d.v[k], d.w[k]) {
                return Err(bad("i_k", d.v[k], d.w[k], &self.i[k]));
            }
            if self.j[k].shape() != (d.w[k], d.v[k]) {
                return Err(bad("j_k", d.w[k], d.v[k], &self.j[k]));
            }
        }
        Ok(())
    }
}

/// Y_k skew-hermitian per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeElement<T: Real> {
    pub y: Vec<DMatrix<Cx<T>>>,
}

impl<T: Real> GaugeElement<T> {
    pub fn new(y: Vec<DMatrix<Cx<T>>>) -> Result<Self> {
        for m in &y {
            if m.nrows() != m.ncols() || cnorm(&(m + adjoint(m))) > lit(1e-12) {
                return Err(Error::InvalidInput("gauge element is not skew-hermitian".into()));
            }
        }
        Ok(Self { y })
    }

    pub fn zeros(d: &FramedDims) -> Self {
        Self { y: d.v.iter().map(|&n| czeros(n, n)).collect() }
    }

    pub fn bracket(&self, o: &Self) -> Self {
        Self { y: self.y.iter().zip(&o.y).map(|(a, b)| commutator(a, b)).collect() }
    }

    /// Σ_k Re tr(A_k* B_k).
    pub fn inner(&self, o: &Self) -> T {
        self.y.iter().zip(&o.y).fold(T::zero(), |s, (a, b)| s + ctrace(&(adjoint(a) * b)).re)
    }

    /// Unitary group element exp(Y).
    pub fn exp(&self) -> Vec<DMatrix<Cx<T>>> {
        self.y.iter().map(|m| if m.nrows() == 0 { m.clone() } else { m.exp() }).collect()
    }

    pub fn traces(&self) -> Vec<Cx<T>> {
        self.y.iter().map(ctrace).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    B(usize, usize, usize),
    I(usize, usize, usize),
    J(usize, usize, usize),
}

/// Quiver, dimensions and stability parameters with the induced flat hyperkähler data.
#[derive(Debug, Clone)]
pub struct QuiverProblem<T: Real> {
    quiver: Quiver,
    arrows: Vec<DoubledEdge>,
    dims: FramedDims,
    params: StabilityParams<T>,
    model: CotangentModel<T>,
    coords: Vec<(Slot, Slot)>,
    basis: Vec<GaugeElement<T>>,
}

impl<T: Real> QuiverProblem<T> {
    pub fn new(quiver: Quiver, dims: FramedDims, params: StabilityParams<T>) -> Result<Self> {
        let n = quiver.vertex_count();
        if dims.v.len() != n {
            return Err(Error::ShapeMismatch {
                what: "dimension vector",
                expected: n.to_string(),
                found: dims.v.len().to_string(),
            });
        }
        if params.zeta_r.len() != n {
            return Err(Error::ShapeMismatch {
                what: "stability parameters",
                expected: n.to_string(),
                found: params.zeta_r.len().to_string(),
            });
        }
        let arrows = double_quiver(&quiver);
        let mut coords = Vec::new();
        for (e, &(s, t)) in quiver.edges().iter().enumerate() {
            for r in 0..dims.v[t] {
                for c in 0..dims.v[s] {
                    coords.push((Slot::B(2 * e, r, c), Slot::B(2 * e + 1, c, r)));
                }
            }
        }
        for k in 0..n {
            for r in 0..dims.v[k] {
                for c in 0..dims.w[k] {
                    coords.push((Slot::I(k, r, c), Slot::J(k, c, r)));
                }
            }
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("representation space is zero-dimensional".into()));
        }
        let model = CotangentModel::new(coords.len())?;
        let basis = gauge_basis(&dims);
        Ok(Self { quiver, arrows, dims, params, model, coords, basis })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn arrows(&self) -> &[DoubledEdge] {
        &self.arrows
    }

    pub fn dims(&self) -> &FramedDims {
        &self.dims
    }

    pub fn params(&self) -> &StabilityParams<T> {
        &self.params
    }

    pub fn model(&self) -> &CotangentModel<T> {
        &self.model
    }

    /// Orthonormal basis of the gauge algebra for ⟨A,B⟩ = Σ Re tr(A*B).
    pub fn gauge_basis(&self) -> &[GaugeElement<T>] {
        &self.basis
    }

    pub fn zero_point(&self) -> RepPoint<T> {
        RepPoint::zeros(&self.arrows, &self.dims)
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: T) -> RepPoint<T> {
        RepPoint::random(&self.arrows, &self.dims, rng, scale)
    }

    pub fn random_gauge<R: Rng + ?Sized>(&self, rng: &mut R) -> GaugeElement<T> {
        let c = DVector::from_fn(self.basis.len(), |_, _| crate::scalar::normal::<T, _>(rng));
        self.gauge_from_coeffs(&c)
    }

    fn slot(&self, x: &RepPoint<T>, s: Slot) -> Cx<T> {
        match s {
            Slot::B(h, r, c) => x.b[h][(r, c)],
            Slot::I(k, r, c) => x.i[k][(r, c)],
            Slot::J(k, r, c) => x.j[k][(r, c)],
        }
    }

    fn slot_mut<'a>(&self, x: &'a mut RepPoint<T>, s: Slot) -> &'a mut Cx<T> {
        match s {
            Slot::B(h, r, c) => &mut x.b[h][(r, c)],
            Slot::I(k, r, c) => &mut x.i[k][(r, c)],
            Slot::J(k, r, c) => &mut x.j[k][(r, c)],
        }
    }

    /// Real coordinates of a point (or tangent vector) in the ambient model.
    pub fn to_real(&self, x: &RepPoint<T>) -> Result<DVector<T>> {
        x.check_shapes(&self.arrows, &self.dims)?;
        let mut out = DVector::zeros(4 * self.coords.len());
        for (p, &(sv, sw)) in self.coords.iter().enumerate() {
            let (v, w) = (self.slot(x, sv), self.slot(x, sw));
            out[4 * p] = v.re;
            out[4 * p + 1] = v.im;
            out[4 * p + 2] = w.re;
            out[4 * p + 3] = w.im;
        }
        Ok(out)
    }

    pub fn from_real(&self, x: &DVector<T>) -> Result<RepPoint<T>> {
        if x.len() != 4 * self.coords.len() {
            return Err(Error::ShapeMismatch {
                what: "ambient vector",
                expected: (4 * self.coords.len()).to_string(),
                found: x.len().to_string(),
            });
        }
        let mut p = self.zero_point();
        for (q, &(sv, sw)) in self.coords.iter().enumerate() {
            *self.slot_mut(&mut p, sv) = cx(x[4 * q], x[4 * q + 1]);
            *self.slot_mut(&mut p, sw) = cx(x[4 * q + 2], x[4 * q + 3]);
        }
        Ok(p)
    }

    /// Hermitian representatives H_k; the 𝔲(v_k)-valued moment is −i·H_k.
    pub fn moment_real(&self, x: &RepPoint<T>) -> Result<Vec<DMatrix<Cx<T>>>> {
        x.check_shapes(&self.arrows, &self.dims)?;
        let half = cx(lit::<T>(0.5), T::zero());
        let mut out = Vec::with_capacity(self.dims.v.len());
        for k in 0..self.dims.v.len() {
            let mut m = czeros::<T>(self.dims.v[k], self.dims.v[k]);
            for (h, e) in self.arrows.iter().enumerate() {
                if e.target == k {
                    let bh = &x.b[h];
                    let bb = &x.b[e.reverse];
                    m += bh * adjoint(bh) - adjoint(bb) * bb;
                }
            }
            m += &x.i[k] * adjoint(&x.i[k]) - adjoint(&x.j[k]) * &x.j[k];
            m *= half;
            m -= cident::<T>(self.dims.v[k]) * cx(self.params.zeta_r[k], T::zero());
            out.push(m);
        }
        Ok(out)
    }

    /// (μ_J + iμ_K)_k.
    pub fn moment_complex(&self, x: &RepPoint<T>) -> Result<Vec<DMatrix<Cx<T>>>> {
        x.check_shapes(&self.arrows, &self.dims)?;
        let mut out = Vec::with_capacity(self.dims.v.len());
        for k in 0..self.dims.v.len() {
            let mut m = czeros::<T>(self.dims.v[k], self.dims.v[k]);
            for (h, e) in self.arrows.iter().enumerate() {
                if e.target == k {
                    let s = if e.sign > 0 { T::one() } else { -T::one() };
                    m += (&x.b[h] * &x.b[e.reverse]) * cx(s, T::zero());
                }
            }
            m += &x.i[k] * &x.j[k];
            m -= cident::<T>(self.dims.v[k]) * self.params.zeta_c[k];
            out.push(m);
        }
        Ok(out)
    }

    /// ‖μ_ℝ‖ + ‖μ_ℂ‖ (Frobenius over all vertices).
    pub fn moment_residual(&self, x: &RepPoint<T>) -> Result<T> {
        let f = |ms: Vec<DMatrix<Cx<T>>>| ms.iter().fold(T::zero(), |s, m| s + cnorm(m).powi(2)).sqrt();
        Ok(f(self.moment_real(x)?) + f(self.moment_complex(x)?))
    }

    /// (Y_t B_h − B_h Y_s, Y_k i_k, −j_k Y_k).
    pub fn action_field(&self, x: &RepPoint<T>, y: &GaugeElement<T>) -> Result<RepPoint<T>> {
        x.check_shapes(&self.arrows, &self.dims)?;
        self.check_gauge(y)?;
        Ok(RepPoint {
            b: self.arrows.iter().zip(&x.b).map(|(e, b)| &y.y[e.target] * b - b * &y.y[e.source]).collect(),
            i: x.i.iter().zip(&y.y).map(|(i, yk)| yk * i).collect(),
            j: x.j.iter().zip(&y.y).map(|(j, yk)| -(j * yk)).collect(),
        })
    }

    /// Action of a unitary gauge transformation g = (g_k).
    pub fn act(&self, g: &[DMatrix<Cx<T>>], x: &RepPoint<T>) -> Result<RepPoint<T>> {
        x.check_shapes(&self.arrows, &self.dims)?;
        if g.len() != self.dims.v.len() {
            return Err(Error::ShapeMismatch {
                what: "gauge transformation",
                expected: self.dims.v.len().to_string(),
                found: g.len().to_string(),
            });
        }
        Ok(RepPoint {
            b: self.arrows.iter().zip(&x.b).map(|(e, b)| &g[e.target] * b * adjoint(&g[e.source])).collect(),
            i: x.i.iter().zip(g).map(|(i, gk)| gk * i).collect(),
            j: x.j.iter().zip(g).map(|(j, gk)| j * adjoint(gk)).collect(),
        })
    }

    /// (ω_J + iω_K)(t1, t2) = Σ_h ε(h) tr(B_h B′_h̄) + Σ_k tr(i_k j′_k − i′_k j_k).
    pub fn holo_pairing(&self, t1: &RepPoint<T>, t2: &RepPoint<T>) -> Result<Cx<T>> {
        t1.check_shapes(&self.arrows, &self.dims)?;
        t2.check_shapes(&self.arrows, &self.dims)?;
        let mut s = cx(T::zero(), T::zero());
        for (h, e) in self.arrows.iter().enumerate() {
            let eps = if e.sign > 0 { T::one() } else { -T::one() };
            s += ctrace(&(&t1.b[h] * &t2.b[e.reverse])) * eps;
        }
        for k in 0..self.dims.v.len() {
            s += ctrace(&(&t1.i[k] * &t2.j[k])) - ctrace(&(&t2.i[k] * &t1.j[k]));
        }
        Ok(s)
    }

    fn check_gauge(&self, y: &GaugeElement<T>) -> Result<()> {
        if y.y.len() != self.dims.v.len() || y.y.iter().zip(&self.dims.v).any(|(m, &n)| m.shape() != (n, n)) {
            return Err(Error::ShapeMismatch {
                what: "gauge element",
                expected: format!("{:?}", self.dims.v),
                found: format!("{:?}", y.y.iter().map(|m| m.nrows()).collect::<Vec<_>>()),
            });
        }
        Ok(())
    }

    pub fn gauge_coeffs(&self, y: &GaugeElement<T>) -> DVector<T> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|e| e.inner(y)))
    }

    pub fn gauge_from_coeffs(&self, c: &DVector<T>) -> GaugeElement<T> {
        let mut y = GaugeElement::zeros(&self.dims);
        for (a, e) in self.basis.iter().enumerate() {
            for (yk, ek) in y.y.iter_mut().zip(&e.y) {
                *yk += ek * cx(c[a], T::zero());
            }
        }
        y
    }

    /// Σ_k ζ_ℂ,k tr(Y_k).
    pub fn zeta_trace(&self, y: &GaugeElement<T>) -> Cx<T> {
        y.traces().iter().zip(&self.params.zeta_c).fold(cx(T::zero(), T::zero()), |s, (t, z)| s + t * z)
    }
}

fn gauge_basis<T: Real>(d: &FramedDims) -> Vec<GaugeElement<T>> {
    let r2 = lit::<T>(0.5).sqrt();
    let mut out = Vec::new();
    for (k, &n) in d.v.iter().enumerate() {
        let unit = |r: usize, c: usize, z: Cx<T>| {
            let mut g = GaugeElement::zeros(d);
            g.y[k][(r, c)] += z;
            g
        };
        for r in 0..n {
            out.push(unit(r, r, cx(T::zero(), T::one())));
        }
        for r in 0..n {
            for s in r + 1..n {
                let mut g = unit(r, s, cx(r2, T::zero()));
                g.y[k][(s, r)] = cx(-r2, T::zero());
                out.push(g);
                let mut g = unit(r, s, cx(T::zero(), r2));
                g.y[k][(s, r)] = cx(T::zero(), r2);
                out.push(g);
            }
        }
    }
    out
}

impl<T: Real> HkAction<T> for QuiverProblem<T> {
    fn space(&self) -> &HkSpace<T> {
        self.model.space()
    }

    fn group_dim(&self) -> usize {
        self.basis.len()
    }

    fn action_matrix(&self, x: &DVector<T>) -> DMatrix<T> {
        let p = self.from_real(x).expect("ambient vector of the right length");
        let cols: Vec<DVector<T>> = self
            .basis
            .iter()
            .map(|e| self.to_real(&self.action_field(&p, e).expect("shapes")).expect("shapes"))
            .collect();
        DMatrix::from_fn(x.len(), cols.len(), |r, c| cols[c][r])
    }

    fn moment(&self, x: &DVector<T>) -> DVector<T> {
        let p = self.from_real(x).expect("ambient vector of the right length");
        let hr = self.moment_real(&p).expect("shapes");
        let hc = self.moment_complex(&p).expect("shapes");
        let g = self.basis.len();
        let mut out = DVector::zeros(3 * g);
        for (a, e) in self.basis.iter().enumerate() {
            let mut mi = T::zero();
            let mut mc = cx(T::zero(), T::zero());
            for k in 0..hr.len() {
                mi += ctrace(&(&e.y[k] * &hr[k])).im;
                mc += ctrace(&(&e.y[k] * &hc[k]));
            }
            // Re tr(i Y H) = −Im tr(Y H)
            out[a] = -mi;
            out[g + a] = mc.re;
            out[2 * g + a] = mc.im;
        }
        out
    }

    fn alpha(&self, x: &DVector<T>) -> DVector<T> {
        -(self.model.fiber_projector() * x)
    }

    fn bracket(&self, a: &DVector<T>, b: &DVector<T>) -> DVector<T> {
        self.gauge_coeffs(&self.gauge_from_coeffs(a).bracket(&self.gauge_from_coeffs(b)))
    }
}

/// Flat model of real dimension 2·(Σ_h v_t v_s + 2 Σ_k v_k w_k).
pub fn ambient_space<T: Real>(q: &Quiver, dims: &FramedDims) -> Result<CotangentModel<T>> {
    let zr = vec![T::zero(); q.vertex_count()];
    let zc = vec![cx(T::zero(), T::zero()); q.vertex_count()];
    Ok(QuiverProblem::new(q.clone(), dims.clone(), StabilityParams::new(zr, zc)?)?.model().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jordan(zr: f64, zc: Cx<f64>) -> QuiverProblem<f64> {
        QuiverProblem::new(
            Quiver::jordan(),
            FramedDims::new(vec![1], vec![1]).unwrap(),
            StabilityParams::new(vec![zr], vec![zc]).unwrap(),
        )
        .unwrap()
    }

    fn a1(v: usize, w: usize, zr: f64, zc: Cx<f64>) -> QuiverProblem<f64> {
        QuiverProblem::new(
            Quiver::a1(),
            FramedDims::new(vec![v], vec![w]).unwrap(),
            StabilityParams::new(vec![zr], vec![zc]).unwrap(),
        )
        .unwrap()
    }

    fn s(re: f64) -> DMatrix<Cx<f64>> {
        DMatrix::from_element(1, 1, Cx::new(re, 0.0))
    }

    #[test]
    fn doubling() {
        let h = double_quiver(&Quiver::jordan());
        assert_eq!(h.len(), 2);
        assert_eq!((h[0].sign, h[1].sign), (1, -1));
        assert!(double_quiver(&Quiver::a1()).is_empty());
        let q = Quiver::new(2, vec![(0, 1)]).unwrap();
        let h = double_quiver(&q);
        assert_eq!((h[0].source, h[0].target, h[1].source, h[1].target), (0, 1, 1, 0));
        for (n, e) in h.iter().enumerate() {
            assert_eq!(h[e.reverse].reverse, n);
        }
        assert!(Quiver::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn ambient_dimensions() {
        let d = ambient_space::<f64>(&Quiver::a1(), &FramedDims::new(vec![1], vec![2]).unwrap()).unwrap();
        assert_eq!(d.space().dim(), 8);
        let d = ambient_space::<f64>(&Quiver::jordan(), &FramedDims::new(vec![1], vec![1]).unwrap()).unwrap();
        assert_eq!(d.space().dim(), 8);
        assert!(FramedDims::new(vec![0], vec![2]).is_err());
    }

    #[test]
    fn moment_examples() {
        let p = jordan(0.0, Cx::new(0.0, 0.0));
        let z = p.zero_point();
        assert_eq!(p.moment_residual(&z).unwrap(), 0.0);
        // loop terms cancel in rank one
        let p = jordan(0.5, Cx::new(0.0, 0.0));
        let mut x = p.zero_point();
        x.b[0] = s(1.0);
        assert_eq!(p.moment_real(&x).unwrap()[0][(0, 0)], Cx::new(-0.5, 0.0));
        let p = jordan(0.0, Cx::new(1.0, 0.0));
        let mut x = p.zero_point();
        x.b[0] = s(2.0);
        x.b[1] = s(-3.0);
        x.i[0] = s(1.0);
        x.j[0] = s(1.0);
        assert!(p.moment_complex(&x).unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn a1_complex_moment_is_ij_minus_zeta() {
        let p = a1(1, 2, 0.5, Cx::new(1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = p.random_point(&mut rng, 1.0);
        let ij = (&x.i[0] * &x.j[0])[(0, 0)];
        assert!((p.moment_complex(&x).unwrap()[0][(0, 0)] - (ij - Cx::new(1.0, 1.0))).norm() < 1e-14);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let p = a1(1, 2, 0.5, Cx::new(0.0, 0.0));
        let mut x = p.zero_point();
        x.i[0] = czeros(2, 2);
        assert!(matches!(p.moment_real(&x), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn action_field_jordan() {
        let p = jordan(0.5, Cx::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = p.random_point(&mut rng, 1.0);
        let th = 0.7;
        let y = GaugeElement::new(vec![DMatrix::from_element(1, 1, Cx::new(0.0, th))]).unwrap();
        let t = p.action_field(&x, &y).unwrap();
        assert!(t.b[0].norm() < 1e-15 && t.b[1].norm() < 1e-15);
        assert!((t.i[0][(0, 0)] - Cx::new(0.0, th) * x.i[0][(0, 0)]).norm() < 1e-15);
        assert!((t.j[0][(0, 0)] + Cx::new(0.0, th) * x.j[0][(0, 0)]).norm() < 1e-15);
        let z = p.action_field(&x, &GaugeElement::zeros(p.dims())).unwrap();
        assert_eq!(p.to_real(&z).unwrap().norm(), 0.0);
    }

    #[test]
    fn action_field_matches_flow_derivative() {
        let p = QuiverProblem::new(
            Quiver::new(2, vec![(0, 1), (1, 1)]).unwrap(),
            FramedDims::new(vec![2, 1], vec![1, 2]).unwrap(),
            StabilityParams::new(vec![0.3, -0.2], vec![Cx::new(0.1, 0.0), Cx::new(0.0, 0.4)]).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = p.random_point(&mut rng, 1.0);
        let y = p.random_gauge(&mut rng);
        let eps = 1e-5;
        let scaled = |t: f64| GaugeElement { y: y.y.iter().map(|m| m * Cx::new(t, 0.0)).collect() };
        let fp = p.to_real(&p.act(&scaled(eps).exp(), &x).unwrap()).unwrap();
        let fm = p.to_real(&p.act(&scaled(-eps).exp(), &x).unwrap()).unwrap();
        let fd = (fp - fm) / (2.0 * eps);
        let an = p.to_real(&p.action_field(&x, &y).unwrap()).unwrap();
        assert!((fd - an).norm() < 1e-8);
    }

    #[test]
    fn holo_pairing_matches_kahler_forms() {
        let p = QuiverProblem::new(
            Quiver::new(2, vec![(0, 1), (0, 0)]).unwrap(),
            FramedDims::new(vec![2, 1], vec![1, 1]).unwrap(),
            StabilityParams::new(vec![0.0, 0.0], vec![Cx::new(0.0, 0.0); 2]).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t1 = p.random_point(&mut rng, 1.0);
        let t2 = p.random_point(&mut rng, 1.0);
        let a = p.holo_pairing(&t1, &t2).unwrap();
        let b = p.space().holomorphic_pairing(&p.to_real(&t1).unwrap(), &p.to_real(&t2).unwrap());
        assert!((a - b).norm() < 1e-12);
        assert!((a + p.holo_pairing(&t2, &t1).unwrap()).norm() < 1e-12);
        assert!(p.holo_pairing(&t1, &t1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gauge_basis_is_orthonormal() {
        let d = FramedDims::new(vec![3, 1], vec![0, 1]).unwrap();
        let b = gauge_basis::<f64>(&d);
        assert_eq!(b.len(), 10);
        for (m, x) in b.iter().enumerate() {
            assert!(GaugeElement::new(x.y.clone()).is_ok());
            for (n, y) in b.iter().enumerate() {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((x.inner(y) - want).abs() < 1e-15);
            }
        }
    }
}
