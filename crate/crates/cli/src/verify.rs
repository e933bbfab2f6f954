//! Runs the checks requested by a spec and collects them into a report.

use crate::error::CliError;
use crate::report::{CheckRecord, VerificationReport};
use crate::spec::{complex_matrix, complex_vec, Kind, NahmSpec, PrequantSpec, Profile, ProblemSpec, QuiverSpec, Variant, VerifySpec};
use hkreduce::action::HkAction;
use hkreduce::hk::{is_one_one_all, CotangentModel, HkSpace, Structure};
use hkreduce::nahm::{
    boundary_pairing_check, coth_limit, coth_profile, gauge_act, interior_residual_sup, inverse_profile, nahm_residual, residual_sup,
    collocation_residual_sup, solve_nahm, GaugePathElement, NahmConfig, NahmPath, NahmSolveOptions, SuAlgebra,
};
use hkreduce::prequant::{higgs_prequant, nahm_prequant, quiver_prequant, Which};
use hkreduce::quiver::{pairing_identity_check, solve_moment, FramedDims, Quiver, QuiverProblem, SolveOptions, StabilityParams};
use hkreduce::reduction::{
    alpha_field, build_chart, compute_f_via_d, compute_f_via_omega, hyperholomorphic_curvature, invariance_diagnostics, kahler_chart_form,
    lie_derivative_check, rep_homomorphism_check, structure_equation_residual, verify_theorem, DiagnosticOptions, LevelSetPoint, PerturbedAlpha,
    ReducedChart,
};
use hkreduce::scalar::{cnorm, Cx};
use hkreduce::twistor::{atiyah_representative, check_20_type, lie_y_check, zeta_samples, Laurent, StereographicMap};
use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Everything the spec asks for.
    Verify,
    /// Only the solver stage.
    Solve,
    /// Only the prequantization payloads.
    Prequant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Replaces every default tolerance.
    pub tol: Option<f64>,
    pub stage: Stage,
}

pub struct RunOutput {
    pub report: VerificationReport,
    /// csv of the solved point or path, when a solve ran.
    pub solution: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Result of one check before it is turned into a record.
struct Outcome {
    violation: f64,
    /// Verdict when it is not `violation <= tol`.
    pass: Option<bool>,
    note: String,
}

impl Outcome {
    fn value(violation: f64) -> Self {
        Self { violation, pass: None, note: String::new() }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.note = n.into();
        self
    }
}

type CheckResult = Result<Outcome, CliError>;

struct Runner<'a> {
    report: VerificationReport,
    verify: &'a VerifySpec,
    tol: Option<f64>,
    seed: u64,
}

impl Runner<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn wants(&self, id: &str) -> bool {
        self.verify.wants(id)
    }

    /// Runs `f` in isolation and records it; returns whether it passed.
    fn check(&mut self, id: &str, anchor: &str, default_tol: f64, f: impl FnOnce(f64) -> CheckResult) -> bool {
        if !self.wants(id) {
            return true;
        }
        let tol = self.tol(default_tol);
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(|| f(tol)));
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (violation, pass, note) = match res {
            Ok(Ok(o)) => {
                let pass = o.pass.unwrap_or(o.violation <= tol);
                (o.violation, pass, o.note)
            }
            Ok(Err(e)) => (f64::INFINITY, false, format!("error: {e}")),
            Err(p) => {
                let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
                (f64::INFINITY, false, format!("panic: {msg}"))
            }
        };
        self.report.push(CheckRecord { id: id.into(), anchor: anchor.into(), violation, tol, pass, runtime_ms, note });
        pass
    }

    fn skipped(&mut self, id: &str, anchor: &str, default_tol: f64, why: &str) {
        if self.wants(id) {
            let tol = self.tol(default_tol);
            self.report.push(CheckRecord { id: id.into(), anchor: anchor.into(), violation: f64::INFINITY, tol, pass: false, runtime_ms: 0.0, note: format!("not run: {why}") });
        }
    }
}

pub fn run_verify(spec: &ProblemSpec, spec_bytes: &[u8], opts: &RunOptions) -> RunOutput {
    let mut r = Runner { report: VerificationReport::new(sha256_hex(spec_bytes), opts.seed), verify: &spec.verify, tol: opts.tol.or(spec.verify.tol), seed: opts.seed };
    let mut solution = None;
    if opts.stage != Stage::Prequant {
        match spec.kind {
            Kind::Flat => {
                if opts.stage == Stage::Verify {
                    flat_checks(&mut r, spec.flat.as_ref().expect("validated").hermitian_dim);
                }
            }
            Kind::Quiver => solution = quiver_checks(&mut r, spec.quiver.as_ref().expect("validated"), opts.stage),
            Kind::Nahm => solution = nahm_checks(&mut r, spec.nahm.as_ref().expect("validated"), opts.stage),
        }
    }
    if opts.stage != Stage::Solve {
        for (k, p) in spec.prequant.iter().enumerate() {
            prequant_check(&mut r, k, p);
        }
    }
    RunOutput { report: r.report, solution }
}

fn twistor_flat_checks(r: &mut Runner, space: &HkSpace<f64>, prefix: &str) {
    let n = r.verify.twistor_samples;
    let seed = r.seed;
    let forms = Structure::ALL.map(|s| space.kahler_form(s));
    let l = Laurent::twistor_form(&forms);
    r.check(&format!("{prefix}.twistor.reality"), "ω(ζ) is real for ζ ↦ −1/ζ̄", 1e-12, |_| {
        Ok(Outcome::value(l.involution().sub(&l).norms().into_iter().fold(l.reality_violation(), f64::max)))
    });
    r.check(&format!("{prefix}.twistor.antipodal"), "ζ ↦ −1/ζ̄ is the antipodal map of the sphere of complex structures", 1e-12, |_| {
        Ok(Outcome::value(zeta_samples::<f64>(n, seed).into_iter().map(|z| StereographicMap::ImNegRe.antipodal_violation(z)).fold(0.0, f64::max)))
    });
    r.check(&format!("{prefix}.twistor.twenty_type"), "ω(ζ) is of type (2,0) in I_ζ", 1e-10, |tol| {
        let map = StereographicMap::calibrate(space, n, seed, tol)?;
        let mut worst: f64 = 0.0;
        for z in zeta_samples::<f64>(n, seed ^ 0x9e37) {
            worst = worst.max(check_20_type(space, &l, z, map)?);
        }
        Ok(Outcome::value(worst).note(format!("convention {map:?}")))
    });
}

fn flat_checks(r: &mut Runner, n: usize) {
    let model = match CotangentModel::<f64>::new(n) {
        Ok(m) => m,
        Err(e) => {
            r.check("flat.invariants", "A² = −1, IJ = K, g(A·,·) antisymmetric", 1e-12, |_| Err(e.into()));
            return;
        }
    };
    let s = model.space().clone();
    let (nz, seed) = (r.verify.n_zeta, r.seed);
    r.check("flat.invariants", "A² = −1, IJ = K, g(A·,·) antisymmetric", 1e-12, |_| Ok(Outcome::value(s.invariant_violation())));
    let alpha = model.alpha_form();
    r.check("flat.d_alpha", "dα = 0", 1e-12, |_| Ok(Outcome::value(alpha.d().norm())));
    r.check("flat.d_j_alpha", "d(Jα) = ω_J", 1e-12, |_| {
        Ok(Outcome::value(alpha.compose(s.structure(Structure::J)).d().sub(&s.kahler_form(Structure::J)).norm()))
    });
    r.check("flat.d_k_alpha", "d(Kα) = ω_K", 1e-12, |_| {
        Ok(Outcome::value(alpha.compose(s.structure(Structure::K)).d().sub(&s.kahler_form(Structure::K)).norm()))
    });
    r.check("flat.theorem", "ω_I − d(Iα) is of type (1,1) in every I_ζ", 1e-10, |tol| {
        let f = s.kahler_form(Structure::I).sub(&alpha.compose(s.structure(Structure::I)).d());
        let rep = is_one_one_all(&f, &s, nz, seed, tol);
        Ok(Outcome::value(rep.max_violation))
    });
    twistor_flat_checks(r, &s, "flat");
}

fn quiver_problem(q: &QuiverSpec) -> Result<QuiverProblem<f64>, CliError> {
    let edges = q.edges.iter().map(|e| (e[0] - 1, e[1] - 1)).collect();
    let quiver = Quiver::new(q.vertices, edges)?;
    let zc = complex_vec("quiver.zeta_c", &q.zeta_c)?.into_iter().map(|z| Cx::new(z.re, z.im)).collect();
    Ok(QuiverProblem::new(quiver, FramedDims::new(q.v.clone(), q.w.clone())?, StabilityParams::new(q.zeta_r.clone(), zc)?)?)
}

const SOLVE_ANCHOR: &str = "μ_I = μ_J = μ_K = 0 at a point with free G-action";

fn quiver_checks(r: &mut Runner, q: &QuiverSpec, stage: Stage) -> Option<String> {
    let mut solved = None;
    let seed = r.seed;
    r.check("quiver.solve", SOLVE_ANCHOR, 1e-10, |tol| {
        let p = quiver_problem(q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = solve_moment(&p, &p.random_point(&mut rng, 1.0), &SolveOptions { tol: tol.min(1e-10), ..SolveOptions::default() })?;
        let v = s.residual;
        let it = s.iterations;
        solved = Some((p, s));
        Ok(Outcome::value(v).note(format!("{it} Newton steps")))
    });
    let Some((p, s)) = solved else {
        if stage == Stage::Verify {
            for (id, anchor, tol) in quiver_dependents() {
                r.skipped(id, anchor, tol, "quiver.solve failed");
            }
        }
        return None;
    };
    let solution = {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "value"]).expect("in-memory");
        for (i, v) in s.x.iter().enumerate() {
            w.write_record([i.to_string(), format!("{v:e}")]).expect("in-memory");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    };
    if stage == Stage::Verify {
        quiver_verify(r, &p, &s.x);
    }
    Some(solution)
}

fn quiver_dependents() -> Vec<(&'static str, &'static str, f64)> {
    vec![
        ("quiver.alpha_orbit", "α(Y*) = 0", 1e-11),
        ("quiver.pairing", "(Jα + iKα)(Y*) = −2 Σ_k (ζ_ℂ)_k tr Y_k", 1e-9),
        ("reduction.chart", "chart through the base with g-orthonormal horizontal frame", 1e-10),
    ]
}

fn quiver_verify(r: &mut Runner, p: &QuiverProblem<f64>, x: &DVector<f64>) {
    let (seed, samples) = (r.seed, r.verify.samples);
    let point = p.from_real(x).expect("solved point");
    let gauges: Vec<_> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        (0..samples).map(|_| p.random_gauge(&mut rng)).collect()
    };
    r.check("quiver.alpha_orbit", "α(Y*) = 0", 1e-11, |_| {
        let mut worst: f64 = 0.0;
        for y in &gauges {
            worst = worst.max(pairing_identity_check(p, &point, y)?.alpha_on_orbit);
        }
        Ok(Outcome::value(worst))
    });
    r.check("quiver.pairing", "(Jα + iKα)(Y*) = −2 Σ_k (ζ_ℂ)_k tr Y_k", 1e-9, |_| {
        let mut worst: f64 = 0.0;
        let mut factor = None;
        for y in &gauges {
            let c = pairing_identity_check(p, &point, y)?;
            worst = worst.max(c.residual);
            factor = factor.or(c.measured_factor());
        }
        let note = factor.map(|f| format!("measured (Jα + iKα)(Y*) / Σ ζ tr Y = {:.6}{:+.6}i", f.re, f.im)).unwrap_or_default();
        Ok(Outcome::value(worst).note(note))
    });
    let h = r.verify.h;
    let mut chart = None;
    r.check("reduction.chart", "chart through the base with g-orthonormal horizontal frame", 1e-10, |_| {
        let c = build_chart(p, LevelSetPoint::new(p, x.clone(), 1e-9)?, h)?;
        let e = c.frame();
        let gram = e.transpose() * p.space().metric() * e;
        let mut v = (gram - DMatrix::identity(c.dim(), c.dim())).amax();
        v = v.max((c.retract(&DVector::zeros(c.dim()))? - x).amax());
        let d = c.dim();
        chart = Some(c);
        Ok(Outcome::value(v).note(format!("quotient dimension {d}")))
    });
    match &chart {
        Some(c) => reduction_checks(r, p, c),
        None => {
            for (id, anchor, tol) in reduction_ids(p) {
                r.skipped(id, anchor, tol, "reduction.chart failed");
            }
        }
    }
    diagnostics_checks(r, p, x);
}

fn zeta_c_vanishes(p: &QuiverProblem<f64>) -> bool {
    p.params().zeta_c.iter().all(|z| z.norm() == 0.0)
}

fn reduction_ids(p: &QuiverProblem<f64>) -> Vec<(&'static str, &'static str, f64)> {
    let mut v = vec![
        ("reduction.theorem", "ω̂_I − d(Îα̂) is of type (1,1) in every I_ζ", 1e-5),
        ("reduction.f_cross", "d(Ĵα̂) − ω̂_J = (Jα)_𝔤∘Ω and d(K̂α̂) − ω̂_K = (Kα)_𝔤∘Ω", 1e-5),
        ("reduction.f_one_one", "F₁ and F₂ are of type (1,1) in every I_ζ", 1e-5),
        ("reduction.lie", "ℒ_X ω_I = 0, ℒ_X ω_J = −ω_K − F₂, ℒ_X ω_K = ω_J + F₁", 1e-4),
        ("reduction.structure_equation", "dβ̂ = γ + β_𝔤∘Ω", 1e-6),
        ("reduction.curvature_closed", "2ω̂_I − 2d(Îα̂) is closed", 1e-6),
        ("quotient.twistor.lie_y", "ℒ_Y ω = F̃ with Y = X̂ + iζ∂_ζ", 1e-4),
        ("quotient.twistor.f_tilde", "F̃ = ζ⁻¹F − ζF̄ is real and ζ⁻¹F + ζF̄ is imaginary for ζ ↦ −1/ζ̄", 1e-12),
        ("quotient.twistor.atiyah", "2iω̂_I − 2id(Îα̂) is of type (1,1) in every I_ζ", 1e-5),
    ];
    if zeta_c_vanishes(p) {
        v.push(("reduction.degeneration", "ζ_ℂ = 0: d(Ĵα̂) = ω̂_J and d(K̂α̂) = ω̂_K", 1e-5));
    }
    v
}

fn reduction_checks(r: &mut Runner, p: &QuiverProblem<f64>, c: &ReducedChart<'_, f64, QuiverProblem<f64>>) {
    let (nz, seed, h) = (r.verify.n_zeta, r.seed, r.verify.h);
    let ids = reduction_ids(p);
    let anchor = |id: &str| ids.iter().find(|e| e.0 == id).expect("known id").1;
    r.check("reduction.theorem", anchor("reduction.theorem"), 1e-5f64.max(50.0 * h * h), |tol| {
        let t = verify_theorem(c, nz, seed, tol)?;
        Ok(Outcome::value(t.max_violation).note("relative to ‖ω̂_I‖"))
    });
    let fs = (|| -> Result<_, CliError> { Ok((compute_f_via_d(c)?.at_origin()?, compute_f_via_omega(c)?.at_origin()?)) })();
    let wj = kahler_chart_form(c, Structure::J).two_form_at_origin();
    r.check("reduction.f_cross", anchor("reduction.f_cross"), 1e-5, |_| {
        let ((d1, d2), (o1, o2)) = fs.clone()?;
        let wj = wj.clone()?;
        let scale = [d1.norm(), d2.norm(), o1.norm(), o2.norm(), wj.norm()].into_iter().fold(f64::MIN_POSITIVE, f64::max);
        let v = d1.sub(&o1).norm().max(d2.sub(&o2).norm()) / scale;
        Ok(Outcome::value(v).note(format!("‖F₁‖ = {:.6e}, ‖F₂‖ = {:.6e}", o1.norm(), o2.norm())))
    });
    r.check("reduction.f_one_one", anchor("reduction.f_one_one"), 1e-5, |tol| {
        let ((d1, d2), (o1, o2)) = fs.clone()?;
        let wj = wj.clone()?.norm();
        let mut worst: f64 = 0.0;
        for f in [&d1, &d2, &o1, &o2] {
            let rep = is_one_one_all(f, c.quotient_space(), nz, seed, tol);
            let abs = rep.per_structure.iter().map(|e| e.1).fold(0.0, f64::max);
            worst = worst.max(abs / f.norm().max(wj).max(f64::MIN_POSITIVE));
        }
        Ok(Outcome::value(worst).note("relative to max(‖F‖, ‖ω̂_J‖)"))
    });
    if zeta_c_vanishes(p) {
        r.check("reduction.degeneration", anchor("reduction.degeneration"), 1e-5, |_| {
            let ((d1, d2), (o1, o2)) = fs.clone()?;
            let scale = wj.clone()?.norm().max(f64::MIN_POSITIVE);
            Ok(Outcome::value((d1.norm() + d2.norm()).max(o1.norm() + o2.norm()) / scale))
        });
    }
    r.check("reduction.lie", anchor("reduction.lie"), 1e-4, |_| Ok(Outcome::value(lie_derivative_check(c)?.max())));
    r.check("reduction.structure_equation", anchor("reduction.structure_equation"), 1e-6, |_| {
        let mut worst: f64 = 0.0;
        for s in [Structure::J, Structure::K] {
            let gamma = kahler_chart_form(c, s);
            worst = worst.max(structure_equation_residual(c, alpha_field(c, Some(s)), &gamma)?);
        }
        Ok(Outcome::value(worst))
    });
    r.check("reduction.curvature_closed", anchor("reduction.curvature_closed"), 1e-6, |_| Ok(Outcome::value(hyperholomorphic_curvature(c)?.closedness)));
    r.check("quotient.twistor.lie_y", anchor("quotient.twistor.lie_y"), 1e-4, |_| {
        let l = lie_y_check(c)?;
        Ok(Outcome::value(l.max()).note(format!("coefficient residuals {:?}", l.coeffs)))
    });
    r.check("quotient.twistor.f_tilde", anchor("quotient.twistor.f_tilde"), 1e-12, |_| {
        let ((_, _), (o1, o2)) = fs.clone()?;
        let ft = Laurent::f_tilde(&o1, &o2);
        let fp = Laurent::f_plus(&o1, &o2);
        let v = ft.involution().sub(&ft).norms().into_iter().chain(fp.involution().add(&fp).norms()).fold(0.0, f64::max);
        Ok(Outcome::value(v))
    });
    r.check("quotient.twistor.atiyah", anchor("quotient.twistor.atiyah"), 1e-5, |tol| {
        let a = atiyah_representative(c, nz, seed, tol)?;
        Ok(Outcome { violation: a.one_one.max_violation, pass: Some(a.one_one.passed), note: String::new() })
    });
    twistor_flat_checks(r, c.quotient_space(), "quotient");
}

fn diagnostics_checks(r: &mut Runner, p: &QuiverProblem<f64>, x: &DVector<f64>) {
    let seed = r.seed;
    let y = DVector::from_fn(p.group_dim(), |i, _| 0.3 + i as f64);
    r.check("reduction.diagnostics", "the eight G-invariance conditions on α agree", 1e-6, |tol| {
        let d = invariance_diagnostics(p, x, &y, seed, &DiagnosticOptions { tol, ..DiagnosticOptions::default() })?;
        let v = d.values.iter().cloned().fold(0.0, f64::max);
        Ok(Outcome { violation: v, pass: Some(d.passed.iter().all(|&b| b)), note: format!("{:?}", d.passed) })
    });
    r.check("reduction.negative_control", "a perturbed α fails all eight G-invariance conditions", 1e-6, |tol| {
        let pa = PerturbedAlpha::seeded(p, seed);
        let d = invariance_diagnostics(&pa, x, &y, seed, &DiagnosticOptions { tol, ..DiagnosticOptions::default() })?;
        let v = d.values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Outcome { violation: v, pass: Some(d.passed.iter().all(|&b| !b)), note: "violation is the smallest of the eight values".into() })
    });
    r.check("reduction.homomorphism", "(Jα)_𝔤 and (Kα)_𝔤 vanish on [𝔤, 𝔤]", 1e-9, |_| Ok(Outcome::value(rep_homomorphism_check(p, x, 10, seed)?)));
}

fn rotation(n: &NahmSpec) -> Result<Matrix3<f64>, CliError> {
    let r = match &n.rotation {
        None => return Ok(Matrix3::identity()),
        Some(r) => Matrix3::from_fn(|i, j| r[i][j]),
    };
    if (r.transpose() * r - Matrix3::identity()).amax() > 1e-9 || r.determinant() < 0.0 {
        return Err(CliError::Schema { line: None, field: "nahm.rotation".into(), message: "not a rotation".into() });
    }
    Ok(r)
}

fn nahm_setup(n: &NahmSpec) -> Result<(NahmConfig<f64>, NahmPath<f64>, Option<NahmPath<f64>>), CliError> {
    Ok(match n.profile {
        Profile::Constant => {
            let tau = n.tau.as_ref().expect("validated");
            let t: Vec<DMatrix<Complex64>> = tau.iter().map(|m| complex_matrix("nahm.tau", m, n.m)).collect::<Result<_, _>>()?;
            let t = [t[0].clone(), t[1].clone(), t[2].clone()];
            let cfg = NahmConfig::new(n.m, t.clone(), n.length, n.points).or_else(|_| NahmConfig::degenerate(n.m, t, n.length, n.points))?;
            let p = NahmPath::constant(&cfg);
            (cfg, p.clone(), Some(p))
        }
        Profile::Inverse => {
            let z = || DMatrix::<Complex64>::zeros(2, 2);
            let cfg = NahmConfig::degenerate(2, [z(), z(), z()], n.length, n.points)?;
            let exact = inverse_profile(n.length, n.points)?;
            let bump = hkreduce::nahm::su2_triple::<f64>()[1].map(|z| z * 0.05);
            let mut t = exact.components().clone();
            for (i, s) in cfg.grid().iter().enumerate() {
                t[2][i] += bump.map(|z| z * (std::f64::consts::PI * s / n.length).sin());
            }
            (cfg, NahmPath::new(n.length, t)?, Some(exact))
        }
        Profile::Coth => {
            let (l, s0, rot) = (n.lambda.expect("validated"), n.s0.expect("validated"), rotation(n)?);
            let cfg = NahmConfig::new(2, coth_limit(l, &rot), n.length, n.points)?;
            let exact = coth_profile(l, s0, &rot, n.length, n.points)?;
            (cfg, exact.clone(), Some(exact))
        }
    })
}

fn path_csv(p: &NahmPath<f64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "s", "a", "row", "col", "re", "im"]).expect("in-memory");
    let h = p.step();
    for a in 0..4 {
        for (i, m) in p.component(a).iter().enumerate() {
            for ((row, col), z) in (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).zip(m.transpose().iter()) {
                w.write_record([i.to_string(), format!("{:e}", h * i as f64), a.to_string(), row.to_string(), col.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])
                    .expect("in-memory");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn nahm_checks(r: &mut Runner, n: &NahmSpec, stage: Stage) -> Option<String> {
    let setup = nahm_setup(n);
    let mut solved = None;
    r.check("nahm.solve", "Ṫ_a + [T₀, T_a] = [T_b, T_c] for cyclic (a, b, c)", 1e-8, |tol| {
        let (cfg, init, _) = setup.clone()?;
        let sol = solve_nahm(&cfg, &init, &NahmSolveOptions { accept: tol, ..NahmSolveOptions::default() })?;
        let v = collocation_residual_sup(&sol);
        let bv = sol.boundary_violation(&cfg);
        solved = Some(sol);
        Ok(Outcome::value(v).note(format!("|T(L) − τ| = {bv:.3e}")))
    });
    let Some(sol) = solved else {
        if stage == Stage::Verify {
            r.skipped("nahm.boundary_pairing", "(Jα)(Y*) = −⟨τ₂, Y(∞)⟩ and (Kα)(Y*) = −⟨τ₃, Y(∞)⟩", 1e-4, "nahm.solve failed");
        }
        return None;
    };
    let (cfg, _, exact) = setup.expect("solve succeeded");
    let exact_tol = if n.profile == Profile::Constant { 0.0 } else { 1e-6 };
    r.check("nahm.reference", "the solver reproduces the closed-form solution", exact_tol, |_| {
        let e = exact.as_ref().expect("every profile has a reference");
        let mut err: f64 = 0.0;
        for a in 0..4 {
            for (x, y) in sol.component(a).iter().zip(e.component(a)) {
                err = err.max(cnorm(&(x - y)));
            }
        }
        if n.profile == Profile::Constant {
            err = err.max(residual_sup(&sol));
        }
        Ok(Outcome::value(err))
    });
    let solution = Some(path_csv(&sol));
    if stage != Stage::Verify {
        return solution;
    }
    if n.profile != Profile::Constant {
        r.check("nahm.order", "halving Δs divides the interior residual by at least 8", 1.0, |_| {
            let make = |pts: usize| -> Result<NahmPath<f64>, CliError> {
                Ok(match n.profile {
                    Profile::Inverse => inverse_profile(n.length, pts)?,
                    _ => coth_profile(n.lambda.expect("validated"), n.s0.expect("validated"), &rotation(n)?, n.length, pts)?,
                })
            };
            let coarse = (n.points / 2).max(5);
            let (rc, rf) = (interior_residual_sup(&make(coarse)?), interior_residual_sup(&make(2 * coarse - 1)?));
            let ratio = rc / rf;
            Ok(Outcome::value(8.0 / ratio).note(format!("ratio {ratio:.3} between {coarse} and {} points", 2 * coarse - 1)))
        });
    }
    let seed = r.seed;
    r.check("nahm.gauge", "the residual transforms by Ad_g under gauge transformations", 1e-5, |_| {
        let alg = SuAlgebra::<f64>::new(n.m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = alg.random(&mut rng);
        let x = x0.map(|z| z * (0.5 / cnorm(&x0)));
        let g: Vec<_> = cfg.grid().iter().map(|&s| x.map(|z| z * (1.0 - (-s).exp())).exp()).collect();
        let q = gauge_act(&g, &sol)?;
        let (rp, rq) = (nahm_residual(&sol), nahm_residual(&q));
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for i in 2..sol.points() - 2 {
                worst = worst.max(cnorm(&(&g[i] * &rp[a][i] * g[i].adjoint() - &rq[a][i])));
            }
        }
        Ok(Outcome::value(worst))
    });
    if cfg.is_regular() {
        let samples = r.verify.samples.clamp(1, 5);
        r.check("nahm.boundary_pairing", "(Jα)(Y*) = −⟨τ₂, Y(∞)⟩ and (Kα)(Y*) = −⟨τ₃, Y(∞)⟩", 1e-4, |_| {
            let mut worst: f64 = 0.0;
            let mut alpha: f64 = 0.0;
            for k in 0..samples {
                let b = boundary_pairing_check(&cfg, &sol, &GaugePathElement::random(&cfg, seed.wrapping_add(k as u64)))?;
                worst = worst.max(b.max_residual());
                alpha = alpha.max(b.alpha.abs());
            }
            Ok(Outcome::value(worst).note(format!("max |α(Y*)| = {alpha:.3e} over {samples} gauge elements")))
        });
    }
    solution
}

fn lattice_distance(x: f64, spacing: f64) -> f64 {
    (x - spacing * (x / spacing).round()).abs()
}

fn prequant_check(r: &mut Runner, k: usize, p: &PrequantSpec) {
    let id = format!("prequant.{}.{}", k + 1, p.variant.label());
    let which = match p.variant {
        Variant::QuiverJ | Variant::NahmJ | Variant::HiggsJ => Which::J,
        _ => Which::K,
    };
    let anchor = match p.variant {
        Variant::QuiverJ | Variant::QuiverK => "ω_J (ω_K) prequantizable when Im ζ_ℂ (Re ζ_ℂ) ∈ ½ℤ",
        Variant::NahmJ | Variant::NahmK => "ω_J (ω_K) prequantizable when the dual of τ₂ (τ₃) is a weight",
        Variant::HiggsJ | Variant::HiggsK => "ω_J (ω_K) prequantizable when Im λ (Re λ) ∈ (r/2)ℤ",
    };
    let default_tol = p.tol.unwrap_or(hkreduce::prequant::DEFAULT_TOL);
    let tol_override = p.tol.is_some();
    let global = r.tol;
    let tol = if tol_override { Some(default_tol) } else { global };
    let saved = std::mem::replace(&mut r.tol, tol);
    r.check(&id, anchor, default_tol, |tol| {
        let (verdict, dist) = match p.variant {
            Variant::QuiverJ | Variant::QuiverK => {
                let z = complex_vec("zeta_c", p.zeta_c.as_ref().expect("validated"))?;
                let d = z.iter().map(|c| lattice_distance(which.part(c), 0.5)).fold(0.0, f64::max);
                (quiver_prequant(&z, which, tol), d)
            }
            Variant::NahmJ | Variant::NahmK => {
                let t = p.tau.as_ref().expect("validated");
                let m = complex_matrix("tau", t, t.len())?;
                let q = nahm_prequant(&m, which, tol)?;
                let d = q.weight_coords.iter().map(|&c| lattice_distance(c, 1.0)).fold(0.0, f64::max);
                (q.prequantizable, d)
            }
            Variant::HiggsJ | Variant::HiggsK => {
                let rank = p.rank.expect("validated");
                let l: Vec<Vec<Complex64>> = p.lambdas.as_ref().expect("validated").iter().map(|row| complex_vec("lambdas", row)).collect::<Result<_, _>>()?;
                let d = l.iter().flatten().map(|c| lattice_distance(which.part(c), rank as f64 / 2.0)).fold(0.0, f64::max);
                (higgs_prequant(&l, rank, which, tol)?, d)
            }
        };
        let pass = p.expect.map_or(verdict, |e| e == verdict);
        Ok(Outcome { violation: dist, pass: Some(pass), note: format!("prequantizable = {verdict}") })
    });
    r.tol = saved;
}
