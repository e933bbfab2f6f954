//! Pointwise identities of the twistor family ω(ζ) = ζ⁻¹c₋₁ + c₀ + ζc₁.

use crate::action::HkAction;
use crate::error::{Error, Result};
use crate::hk::{is_one_one_all, HkSpace, OneOneReport, SphereDirection, Structure, TwoForm};
use crate::reduction::{hyperholomorphic_curvature, lie_data, CurvatureRepresentative, ReducedChart};
use crate::scalar::{cabs, cx, lit, to_f64, Cx, Real};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CMat<T> = DMatrix<Cx<T>>;

fn complexify<T: Real>(m: &DMatrix<T>) -> CMat<T> {
    m.map(|x| cx(x, T::zero()))
}

fn cfro<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |s, z| s + z.re * z.re + z.im * z.im).sqrt()
}

fn mul<T: Real>(m: &CMat<T>, z: Cx<T>) -> CMat<T> {
    m.map(|w| w * z)
}

/// Complex 2-forms (as antisymmetric complex matrices) attached to ζ⁻¹, 1, ζ.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<T: Real> {
    pub coeffs: [CMat<T>; 3],
}

impl<T: Real> Laurent<T> {
    /// ω(ζ): c₋₁ = −i(ω_J + iω_K), c₀ = 2ω_I, c₁ = −i(ω_J − iω_K).
    pub fn twistor_form(omega: &[TwoForm<T>; 3]) -> Self {
        let [wi, wj, wk] = omega.each_ref().map(|w| complexify(w.matrix()));
        let i = cx(T::zero(), T::one());
        let mi = cx(T::zero(), -T::one());
        Self {
            coeffs: [
                mul(&(&wj + mul(&wk, i)), mi),
                mul(&wi, cx(lit(2.0), T::zero())),
                mul(&(&wj - mul(&wk, i)), mi),
            ],
        }
    }

    /// F̃ = ζ⁻¹F − ζF̄ with F = F₁ + iF₂.
    pub fn f_tilde(f1: &TwoForm<T>, f2: &TwoForm<T>) -> Self {
        let f = complexify(f1.matrix()) + mul(&complexify(f2.matrix()), cx(T::zero(), T::one()));
        let n = f.nrows();
        Self { coeffs: [f.clone(), DMatrix::from_element(n, n, cx(T::zero(), T::zero())), -f.map(|z| z.conj())] }
    }

    /// ζ⁻¹F + ζF̄, the combination that changes sign under the real structure.
    pub fn f_plus(f1: &TwoForm<T>, f2: &TwoForm<T>) -> Self {
        let mut l = Self::f_tilde(f1, f2);
        l.coeffs[2] = -&l.coeffs[2];
        l
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn eval(&self, zeta: Cx<T>) -> Result<CMat<T>> {
        if cabs(zeta) == T::zero() || !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::Pole { zeta: format!("{}{:+}i", to_f64(zeta.re), to_f64(zeta.im)) });
        }
        let [a, b, c] = &self.coeffs;
        Ok(mul(a, Cx::new(T::one(), T::zero()) / zeta) + b + mul(c, zeta))
    }

    /// Residue at ζ = 0.
    pub fn residue(&self) -> &CMat<T> {
        &self.coeffs[0]
    }

    /// Coefficients of the conjugated pullback under ζ ↦ −1/ζ̄.
    pub fn involution(&self) -> Self {
        let [a, b, c] = &self.coeffs;
        let conj = |m: &CMat<T>| m.map(|z| z.conj());
        Self { coeffs: [-conj(c), conj(b), -conj(a)] }
    }

    /// iζ ∂/∂ζ acting on the ζ-dependence: c_k ↦ i k c_k.
    pub fn zeta_rotation(&self) -> Self {
        let i = cx(T::zero(), T::one());
        Self { coeffs: [mul(&self.coeffs[0], -i), self.coeffs[1].map(|_| cx(T::zero(), T::zero())), mul(&self.coeffs[2], i)] }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { coeffs: std::array::from_fn(|k| &self.coeffs[k] - &o.coeffs[k]) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { coeffs: std::array::from_fn(|k| &self.coeffs[k] + &o.coeffs[k]) }
    }

    /// Frobenius norms of the three coefficients.
    pub fn norms(&self) -> [f64; 3] {
        self.coeffs.each_ref().map(|c| to_f64(cfro(c)))
    }

    /// ‖c₁ + conj(c₋₁)‖ and ‖Im c₀‖.
    pub fn reality_violation(&self) -> f64 {
        let [a, b, c] = &self.coeffs;
        let s = to_f64(cfro(&(c + a.map(|z| z.conj()))));
        let im = b.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
        s.max(to_f64(im))
    }
}

/// ω(ζ) built from the Kähler forms of a flat space.
pub fn omega_zeta<T: Real>(space: &HkSpace<T>, zeta: Cx<T>) -> Result<CMat<T>> {
    Laurent::twistor_form(&Structure::ALL.map(|s| space.kahler_form(s))).eval(zeta)
}

/// Candidate (ζ ↦ (a, b, c)) conventions: a = (1 − |ζ|²)/(1 + |ζ|²) and (b, c) as listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StereographicMap {
    /// (b, c) = (2 Re ζ, 2 Im ζ)/(1 + |ζ|²).
    ReIm,
    /// (b, c) = (2 Re ζ, −2 Im ζ)/(1 + |ζ|²).
    ReNegIm,
    /// (b, c) = (2 Im ζ, −2 Re ζ)/(1 + |ζ|²).
    ImNegRe,
}

impl StereographicMap {
    pub const CANDIDATES: [StereographicMap; 3] = [Self::ReIm, Self::ReNegIm, Self::ImNegRe];

    pub fn coords<T: Real>(self, zeta: Cx<T>) -> (T, T, T) {
        let r2 = zeta.re * zeta.re + zeta.im * zeta.im;
        let den = T::one() + r2;
        let two: T = lit(2.0);
        let a = (T::one() - r2) / den;
        let (b, c) = match self {
            Self::ReIm => (two * zeta.re, two * zeta.im),
            Self::ReNegIm => (two * zeta.re, -two * zeta.im),
            Self::ImNegRe => (two * zeta.im, -two * zeta.re),
        };
        (a, b / den, c / den)
    }

    pub fn direction<T: Real>(self, zeta: Cx<T>) -> Result<SphereDirection<T>> {
        let (a, b, c) = self.coords(zeta);
        SphereDirection::normalized(a, b, c)
    }

    /// |map(−1/ζ̄) + map(ζ)|; ζ ≠ 0.
    pub fn antipodal_violation<T: Real>(self, zeta: Cx<T>) -> f64 {
        let r2 = zeta.re * zeta.re + zeta.im * zeta.im;
        let anti = cx(-zeta.re / r2, -zeta.im / r2);
        let (a, b, c) = self.coords(zeta);
        let (x, y, z) = self.coords(anti);
        to_f64(((a + x) * (a + x) + (b + y) * (b + y) + (c + z) * (c + z)).sqrt())
    }

    /// The candidate whose directions make ω(ζ) of type (2,0) on `space` at every sample.
    pub fn calibrate<T: Real>(space: &HkSpace<T>, samples: usize, seed: u64, tol: f64) -> Result<Self> {
        let zetas = zeta_samples::<T>(samples, seed);
        let mut best = f64::INFINITY;
        for m in Self::CANDIDATES {
            let mut worst: f64 = 0.0;
            for z in &zetas {
                worst = worst.max(check_20_type(space, &Laurent::twistor_form(&Structure::ALL.map(|s| space.kahler_form(s))), *z, m)?);
            }
            if worst <= tol {
                return Ok(m);
            }
            best = best.min(worst);
        }
        Err(Error::Convention { violation: best })
    }
}

/// Seeded ζ with |ζ| spread over [0.2, 5] and uniform argument.
pub fn zeta_samples<T: Real>(n: usize, seed: u64) -> Vec<Cx<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r: f64 = (rng.random_range(-1.0f64..1.0) * 5f64.ln()).exp();
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            cx(lit(r * t.cos()), lit(r * t.sin()))
        })
        .collect()
}

/// ‖β(A·,·) − iβ‖/‖β‖ for β = ω(ζ) and A = I_{map(ζ)}: zero iff β is of type (2,0).
pub fn check_20_type<T: Real>(space: &HkSpace<T>, form: &Laurent<T>, zeta: Cx<T>, map: StereographicMap) -> Result<f64> {
    let beta = form.eval(zeta)?;
    let a = complexify(&space.izeta(&map.direction(zeta)?));
    Ok(twenty_violation(&beta, &a))
}

fn twenty_violation<T: Real>(beta: &CMat<T>, a: &CMat<T>) -> f64 {
    let r = a.transpose() * beta - mul(beta, cx(T::zero(), T::one()));
    let n = cfro(beta);
    if n == T::zero() {
        0.0
    } else {
        to_f64(cfro(&r) / n)
    }
}

/// (2,0) violation of the residue (ζ → 0 limit) with respect to I.
pub fn residue_20_violation<T: Real>(space: &HkSpace<T>) -> f64 {
    let l = Laurent::twistor_form(&Structure::ALL.map(|s| space.kahler_form(s)));
    twenty_violation(l.residue(), &complexify(space.structure(Structure::I)))
}

/// Coefficient-wise ℒ_Y ω − F̃ with Y = X̂ + iζ∂/∂ζ, at the chart base.
#[derive(Debug, Clone, PartialEq)]
pub struct LieYResiduals {
    /// Frobenius norms for the ζ⁻¹, 1, ζ coefficients.
    pub coeffs: [f64; 3],
    pub f_norm: f64,
}

impl LieYResiduals {
    pub fn max(&self) -> f64 {
        self.coeffs.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn lie_y_check<T: Real, P: HkAction<T> + ?Sized>(chart: &ReducedChart<'_, T, P>) -> Result<LieYResiduals> {
    let d = lie_data(chart)?;
    let lx = Laurent::twistor_form(&[
        TwoForm::from_antisymmetrized(d.l_i.clone()),
        TwoForm::from_antisymmetrized(d.l_j.clone()),
        TwoForm::from_antisymmetrized(d.l_k.clone()),
    ]);
    let omega = Laurent::twistor_form(&d.omega);
    let ly = lx.add(&omega.zeta_rotation());
    let ft = Laurent::f_tilde(&d.f1, &d.f2);
    Ok(LieYResiduals { coeffs: ly.sub(&ft).norms(), f_norm: to_f64(d.f1.norm() + d.f2.norm()) })
}

/// 2iω̂_I − 2id(Îα̂) with its (1,1) report over I, J, K and sampled I_ζ.
pub struct AtiyahRepresentative<'c, T: Real> {
    pub curvature: CurvatureRepresentative<'c, T>,
    pub one_one: OneOneReport,
}

pub fn atiyah_representative<'c, T: Real, P: HkAction<T> + ?Sized>(
    chart: &'c ReducedChart<'_, T, P>,
    n_zeta: usize,
    seed: u64,
    tol: f64,
) -> Result<AtiyahRepresentative<'c, T>> {
    let curvature = hyperholomorphic_curvature(chart)?;
    let f = curvature.form.two_form_at_origin()?;
    let one_one = is_one_one_all(&f, chart.quotient_space(), n_zeta, seed, tol);
    Ok(AtiyahRepresentative { curvature, one_one })
}
