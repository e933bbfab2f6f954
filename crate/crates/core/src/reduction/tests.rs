use super::*;
use crate::hk::{is_one_one_all, Structure};
use crate::quiver::{solve_moment, FramedDims, Quiver, QuiverProblem, SolveOptions, StabilityParams};
use crate::scalar::Cx;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quiver(q: Quiver, v: usize, w: usize, zc: Cx<f64>) -> (QuiverProblem<f64>, DVector<f64>) {
    let p = QuiverProblem::new(q, FramedDims::new(vec![v], vec![w]).unwrap(), StabilityParams::new(vec![0.5], vec![zc]).unwrap())
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = solve_moment(&p, &p.random_point(&mut rng, 1.0), &SolveOptions::default()).unwrap();
    (p, s.x)
}

fn flat() -> (FlatS1Problem<f64>, DVector<f64>) {
    let p = FlatS1Problem::new(2).unwrap();
    let x = DVector::from_vec(vec![0.3, -0.2, 1.0, 0.5, -0.7, 0.1, 0.4, -1.2]);
    (p, x)
}

#[test]
fn flat_chart_is_identity_affine() {
    let (p, x) = flat();
    let chart = build_chart(&p, LevelSetPoint::new(&p, x.clone(), 1e-12).unwrap(), 1e-4).unwrap();
    assert_eq!(chart.dim(), 8);
    let u = DVector::from_fn(8, |i, _| 0.01 * i as f64);
    let r = chart.retract(&u).unwrap();
    assert!((r - (&x + chart.frame() * &u)).norm() < 1e-15);
    assert!((chart.frame().transpose() * chart.frame() - DMatrix::identity(8, 8)).norm() < 1e-12);
}

#[test]
fn flat_d_matches_symbolic() {
    let (p, x) = flat();
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-12).unwrap(), 1e-4).unwrap();
    let e = chart.frame();
    let ja = horizontal_one_form(&chart, alpha_field(&chart, Some(Structure::J)));
    let fd = chart_d(&chart, &ja).unwrap().at_origin().unwrap();
    let exact = p.model().alpha_form().compose(p.space().structure(Structure::J)).d();
    let want = e.transpose() * exact.matrix() * e;
    assert!((fd - want).amax() < 1e-10);
}

#[test]
fn flat_theorem_and_lie_equations() {
    let (p, x) = flat();
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-12).unwrap(), 1e-4).unwrap();
    let t = verify_theorem(&chart, 20, 3, 1e-10).unwrap();
    assert!(t.passed, "{}", t.max_violation);
    let l = lie_derivative_check(&chart).unwrap();
    assert!(l.max() < 1e-8, "{l:?}");
    let (f1, f2) = compute_f_via_d(&chart).unwrap().at_origin().unwrap();
    assert!(f1.norm() < 1e-9 && f2.norm() < 1e-9);
    let (o1, o2) = compute_f_via_omega(&chart).unwrap().at_origin().unwrap();
    assert_eq!(o1.norm() + o2.norm(), 0.0);
}

#[test]
fn d_squared_vanishes() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x.clone(), 1e-9).unwrap(), 1e-4).unwrap();
    let f = ChartForm::new(0, chart.dim(), |u| {
        let r = chart.retract(u)?;
        Ok(DMatrix::from_element(1, 1, r.dot(&r).sin()))
    })
    .unwrap();
    let dd = chart_d(&chart, &chart_d(&chart, &f).unwrap()).unwrap();
    assert!(sup_at(&dd, &DVector::zeros(chart.dim())).unwrap() < 1e-6);
    let u1 = ChartForm::new(0, chart.dim(), |u| Ok(DMatrix::from_element(1, 1, u[0]))).unwrap();
    let dd = chart_d(&chart, &chart_d(&chart, &u1).unwrap()).unwrap();
    assert!(sup_at(&dd, &DVector::zeros(chart.dim())).unwrap() < 1e-12);
}

#[test]
fn chart_frame_invariants() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x.clone(), 1e-9).unwrap(), 1e-4).unwrap();
    assert_eq!(chart.dim(), 4);
    let e = chart.frame();
    let a = p.action_matrix(&chart.base().x);
    assert!((e.transpose() * e - DMatrix::identity(4, 4)).amax() < 1e-10);
    assert!((a.transpose() * e).amax() < 1e-10);
    assert!((p.moment_jacobian(&chart.base().x) * e).amax() < 1e-8);
    assert_eq!(chart.retract(&DVector::zeros(4)).unwrap(), chart.base().x);
    let u = DVector::from_vec(vec![1e-3, 0.0, 0.0, 0.0]);
    let r = chart.retract(&u).unwrap();
    assert!(p.moment(&r).norm() < 1e-9);
    assert!(matches!(chart.retract(&DVector::from_element(4, 10.0)), Err(crate::error::Error::ProjectionDivergence { .. })));
}

#[test]
fn origin_is_not_free() {
    let p = QuiverProblem::new(
        Quiver::a1(),
        FramedDims::new(vec![1], vec![2]).unwrap(),
        StabilityParams::new(vec![0.0], vec![Cx::new(0.0, 0.0)]).unwrap(),
    )
    .unwrap();
    let lp = LevelSetPoint::new(&p, DVector::zeros(8), 1e-12).unwrap();
    assert!(matches!(build_chart(&p, lp, 1e-4), Err(crate::error::Error::Freeness { .. })));
}

#[test]
fn descent_rejects_non_basic_forms() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-9).unwrap(), 1e-4).unwrap();
    assert!(descend_one_form(&chart, alpha_field(&chart, None), 1e-9).is_ok());
    for s in [Structure::J, Structure::K] {
        let e = descend_one_form(&chart, alpha_field(&chart, Some(s)), 1e-9);
        assert!(matches!(e, Err(crate::error::Error::NotBasic { .. })));
    }
    let zero: AmbientOneForm<f64> = std::rc::Rc::new(|x: &DVector<f64>| DVector::zeros(x.len()));
    let z = descend_one_form(&chart, zero, 1e-12).unwrap();
    assert_eq!(z.at_origin().unwrap().norm(), 0.0);
    let da = chart_d(&chart, &descend_one_form(&chart, alpha_field(&chart, None), 1e-9).unwrap()).unwrap();
    assert!(sup_at(&da, &DVector::zeros(4)).unwrap() < 1e-7);
}

#[test]
fn zero_zeta_c_degenerates() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(0.0, 0.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-9).unwrap(), 1e-4).unwrap();
    let (f1, f2) = compute_f_via_d(&chart).unwrap().at_origin().unwrap();
    let wj = kahler_chart_form(&chart, Structure::J).two_form_at_origin().unwrap();
    assert!(f1.norm() + f2.norm() <= 1e-5 * wj.norm());
}

#[test]
fn f_routes_agree_and_are_one_one() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-9).unwrap(), 1e-4).unwrap();
    let (d1, d2) = compute_f_via_d(&chart).unwrap().at_origin().unwrap();
    let (o1, o2) = compute_f_via_omega(&chart).unwrap().at_origin().unwrap();
    assert!(o1.norm() > 0.1);
    assert!(d1.sub(&o1).norm() < 1e-5 * o1.norm());
    assert!(d2.sub(&o2).norm() < 1e-5 * o2.norm());
    for f in [&d1, &o1, &d2, &o2] {
        assert!(is_one_one_all(f, chart.quotient_space(), 20, 5, 1e-5).passed);
    }
    let c = curvature_sample(&chart).unwrap();
    for w in &c.omega {
        assert!(is_one_one_all(w, chart.quotient_space(), 10, 6, 1e-5).passed);
    }
    let gamma = kahler_chart_form(&chart, Structure::J);
    let r = structure_equation_residual(&chart, alpha_field(&chart, Some(Structure::J)), &gamma).unwrap();
    assert!(r < 1e-6);
}

#[test]
fn constancy_is_enforced() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let pa = PerturbedAlpha::seeded(&p, 4);
    let chart = build_chart(&pa, LevelSetPoint::new(&pa, x, 1e-9).unwrap(), 1e-4).unwrap();
    assert!(matches!(compute_f_via_d(&chart), Err(crate::error::Error::ConstancyViolation { .. })));
}

// Ω is tensorial: its value at R(u) computed in a chart based at the origin agrees
// with the value at the base of a chart re-centred at R(u).
#[test]
fn curvature_is_tensorial() {
    let (p, x) = quiver(Quiver::a1(), 2, 4, Cx::new(1.0, 1.0));
    let c1 = build_chart(&p, LevelSetPoint::new(&p, x, 1e-9).unwrap(), 1e-4).unwrap();
    let n = c1.dim();
    let u = DVector::from_fn(n, |i, _| 0.02 * ((i % 3) as f64 - 1.0));
    let pt = c1.eval(&u).unwrap();
    let w1 = curvature_at(&c1, &u).unwrap();
    let c2 = build_chart(&p, LevelSetPoint::new(&p, pt.x.clone(), 1e-9).unwrap(), 1e-4).unwrap();
    let w2 = curvature_sample(&c2).unwrap();
    let coords = c2.frame().transpose() * &pt.horizontal;
    let mut worst: f64 = 0.0;
    for g in 0..w1.omega.len() {
        let pulled = coords.transpose() * w2.omega[g].matrix() * &coords;
        worst = worst.max((pulled - w1.omega[g].matrix()).amax());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn homomorphism_on_nonabelian_quiver() {
    let (p, x) = quiver(Quiver::a1(), 2, 4, Cx::new(1.0, 1.0));
    assert!(rep_homomorphism_check(&p, &x, 10, 1).unwrap() < 1e-9);
    let (p, x) = quiver(Quiver::jordan(), 1, 1, Cx::new(1.0, 0.0));
    assert_eq!(rep_homomorphism_check(&p, &x, 10, 1).unwrap(), 0.0);
}

#[test]
fn diagnostics_agree() {
    let (p, x) = quiver(Quiver::jordan(), 1, 1, Cx::new(1.0, 0.0));
    let y = DVector::from_element(1, 0.8);
    let d = invariance_diagnostics(&p, &x, &y, 3, &DiagnosticOptions::default()).unwrap();
    assert!(d.consistent() && d.passed[0]);
    let pa = PerturbedAlpha::seeded(&p, 9);
    let d = invariance_diagnostics(&pa, &x, &y, 3, &DiagnosticOptions::default()).unwrap();
    assert!(d.consistent() && !d.passed[0]);
    let d = invariance_diagnostics(&pa, &x, &DVector::zeros(1), 3, &DiagnosticOptions::default()).unwrap();
    assert!(d.passed.iter().all(|&b| b));
}

#[test]
fn curvature_representative_is_closed() {
    let (p, x) = quiver(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0));
    let chart = build_chart(&p, LevelSetPoint::new(&p, x, 1e-9).unwrap(), 1e-4).unwrap();
    let c = hyperholomorphic_curvature(&chart).unwrap();
    assert!(c.closedness < 100.0 * 1e-8);
    let f = c.form.two_form_at_origin().unwrap();
    assert!(is_one_one_all(&f, chart.quotient_space(), 20, 2, 1e-5).passed);
}
