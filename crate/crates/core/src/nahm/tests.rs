use super::*;
use crate::scalar::cxr;
use nalgebra::{Matrix3, Rotation3, Vector3};

fn rot() -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Vector3::y_axis(), 0.7).matrix() * Rotation3::from_axis_angle(&Vector3::z_axis(), -0.4).matrix()
}

fn diag(v: &[f64]) -> Mat<f64> {
    let mut m = czeros(v.len(), v.len());
    for (k, &x) in v.iter().enumerate() {
        m[(k, k)] = cxr(0.0, x);
    }
    m
}

fn coth_case(s0: f64, r: &Matrix3<f64>, points: usize) -> (NahmConfig<f64>, NahmPath<f64>) {
    let cfg = NahmConfig::new(2, coth_limit(1.0, r), 15.0, points).unwrap();
    let init = coth_profile(1.0, s0, r, 15.0, points).unwrap();
    let sol = solve_nahm(&cfg, &init, &NahmSolveOptions::default()).unwrap();
    (cfg, sol)
}

#[test]
fn config_validation() {
    let zero = || czeros::<f64>(2, 2);
    assert!(NahmConfig::new(2, [zero(), zero(), zero()], 15.0, 50).is_err());
    let c = NahmConfig::degenerate(2, [zero(), zero(), zero()], 15.0, 50).unwrap();
    assert!(!c.is_regular() && c.cartan().ncols() == 3);
    let t = diag(&[1.0, -1.0]);
    assert!(NahmConfig::new(2, [t.clone(), zero(), zero()], 15.0, 50).unwrap().is_regular());
    assert!(NahmConfig::new(2, [t.clone(), zero(), zero()], -1.0, 50).is_err());
    assert!(NahmConfig::new(2, [t.clone(), zero(), zero()], 1.0, 4).is_err());
    assert!(NahmConfig::new(2, [diag(&[1.0, 1.0]), zero(), zero()], 1.0, 10).is_err());
    let mut h = zero();
    h[(0, 1)] = cxr(1.0, 0.0);
    assert!(NahmConfig::new(2, [t, h, zero()], 1.0, 10).is_err());
}

#[test]
fn quadrature_and_stencils_are_exact_on_polynomials() {
    for n in [5, 6, 7, 10, 11] {
        let h = 2.0 / (n - 1) as f64;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3) - i as f64 * h).collect();
        assert!((simpson(&f, h) - 2.0).abs() < 1e-13, "n = {n}");
        let p: Vec<Mat<f64>> = (0..n).map(|i| diag(&[(i as f64 * h).powi(4), 0.0])).collect();
        let d = derivative(&p, h);
        for (i, di) in d.iter().enumerate() {
            let s = i as f64 * h;
            assert!((di[(0, 0)].im - 4.0 * s.powi(3)).abs() < 1e-11);
        }
    }
}

#[test]
fn commuting_constants_are_exact_solutions() {
    let tau = [diag(&[1.0, 0.5, -1.5]), diag(&[0.2, -0.1, -0.1]), czeros(3, 3)];
    let cfg = NahmConfig::new(3, tau, 15.0, 60).unwrap();
    let p = NahmPath::constant(&cfg);
    assert_eq!(residual_sup(&p), 0.0);
    assert_eq!(p.boundary_violation(&cfg), 0.0);
    let s = solve_nahm(&cfg, &p, &NahmSolveOptions::default()).unwrap();
    assert_eq!(s, p);
}

#[test]
fn inverse_profile_converges_at_fourth_order() {
    let coarse = inverse_profile::<f64>(15.0, 151).unwrap();
    let fine = inverse_profile::<f64>(15.0, 301).unwrap();
    let (rc, rf) = (interior_residual_sup(&coarse), interior_residual_sup(&fine));
    assert!(rc < 1e-3 && rc / rf >= 8.0, "{rc} {rf}");
}

#[test]
fn solver_recovers_inverse_profile() {
    let n = 600;
    let cfg = NahmConfig::degenerate(2, std::array::from_fn(|_| czeros(2, 2)), 15.0, n).unwrap();
    let exact = inverse_profile::<f64>(15.0, n).unwrap();
    let grid = cfg.grid();
    let bump = su2_triple::<f64>()[1].map(|z| z * 0.05);
    let mut t = exact.components().clone();
    for (i, s) in grid.iter().enumerate() {
        t[2][i] += bump.map(|z| z * (std::f64::consts::PI * s / 15.0).sin());
    }
    let init = NahmPath::new(15.0, t).unwrap();
    assert!(residual_sup(&init) > 1e-3);
    let sol = solve_nahm(&cfg, &init, &NahmSolveOptions::default()).unwrap();
    assert!(collocation_residual_sup(&sol) <= SOLUTION_TOL);
    let mut err: f64 = 0.0;
    for a in 0..4 {
        for (x, y) in sol.component(a).iter().zip(exact.component(a)) {
            err = err.max(cnorm(&(x - y)));
        }
    }
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn rough_init_never_returns_a_bad_path() {
    let n = 80;
    let cfg = NahmConfig::degenerate(2, std::array::from_fn(|_| czeros(2, 2)), 5.0, n).unwrap();
    let g = cfg.algebra().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = std::array::from_fn(|a| (0..n).map(|_| if a == 0 { czeros(2, 2) } else { g.random(&mut rng).map(|z| z * 3.0) }).collect());
    let init = NahmPath::new(5.0, t).unwrap();
    match solve_nahm(&cfg, &init, &NahmSolveOptions::default()) {
        Ok(p) => assert!(collocation_residual_sup(&p) <= SOLUTION_TOL),
        Err(e) => assert!(matches!(e, Error::NonConvergence { .. } | Error::IllConditioned { .. }), "{e}"),
    }
}

fn gauge_path(cfg: &NahmConfig<f64>, x: &Mat<f64>, decay: bool) -> Vec<Mat<f64>> {
    cfg.grid()
        .into_iter()
        .map(|s| {
            let phi = if decay { 1.0 - (-2.0 * s).exp() } else { (0.5 * s).sin() };
            x.map(|z| z * phi).exp()
        })
        .collect()
}

#[test]
fn gauge_action_transports_residual() {
    let n = 400;
    let cfg = NahmConfig::degenerate(2, std::array::from_fn(|_| czeros(2, 2)), 6.0, n).unwrap();
    let base = inverse_profile::<f64>(6.0, n).unwrap();
    let mut t = base.components().clone();
    t[0] = cfg.grid().iter().map(|s: &f64| su2_triple::<f64>()[2].map(|z| z * (0.3 * s.cos()))).collect();
    let p = NahmPath::new(6.0, t).unwrap();
    let ident = vec![cident::<f64>(2); n];
    assert_eq!(gauge_act(&ident, &p).unwrap(), p);
    let g = gauge_path(&cfg, &su2_triple::<f64>()[0].map(|z| z * 0.8), false);
    let q = gauge_act(&g, &p).unwrap();
    let (rp, rq) = (nahm_residual(&p), nahm_residual(&q));
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for i in 2..n - 2 {
            let moved = &g[i] * &rp[a][i] * adjoint(&g[i]);
            worst = worst.max(cnorm(&(&moved - &rq[a][i])));
        }
    }
    assert!(worst < 1e-6, "{worst}");
    assert!(residual_sup(&p) > 0.1);
    let mut bad = g.clone();
    bad[0] = g[5].clone();
    assert!(gauge_act(&bad, &p).is_err());
}

#[test]
fn cartan_valued_gauge_preserves_limits() {
    let (cfg, sol) = coth_case(1.0, &rot(), 600);
    let h = cfg.algebra().matrix(&cfg.cartan().column(0).into_owned());
    let g = gauge_path(&cfg, &h, true);
    let q = gauge_act(&g, &sol).unwrap();
    assert!(q.boundary_violation(&cfg) < 1e-6);
    // ġg⁻¹ carries the stencil error of φ(s) = 1 − e^{−2s}
    assert!(collocation_residual_sup(&q) < 1e-4);
}

#[test]
fn structures_satisfy_quaternion_relations() {
    let p = inverse_profile::<f64>(3.0, 9).unwrap();
    let mut t = p.components().clone();
    t[0] = t[3].iter().map(|m| m.map(|z| z * 2.0)).collect();
    let p = NahmPath::new(3.0, t).unwrap();
    // right multiplication reverses composition: I(J t) = K t
    assert_eq!(p.apply(Structure::J).apply(Structure::I), p.apply(Structure::K));
    let mut neg = p.clone();
    for c in neg.t.iter_mut() {
        for m in c.iter_mut() {
            *m = -&*m;
        }
    }
    for s in Structure::ALL {
        assert_eq!(p.apply(s).apply(s), neg);
        // isometries
        assert!((p.apply(s).l2_inner(&p.apply(s)) - p.l2_inner(&p)).abs() < 1e-12);
        assert!(p.apply(s).l2_inner(&p).abs() < 1e-12);
    }
}

#[test]
fn alpha_trivial_cases() {
    let (cfg, sol) = coth_case(1.0, &Matrix3::identity(), 200);
    // T₂ = T₃ = 0
    let mut t = sol.components().clone();
    t[2] = vec![czeros(2, 2); 200];
    t[3] = vec![czeros(2, 2); 200];
    let flat = NahmPath::new(15.0, t).unwrap();
    let y = GaugePathElement::random(&cfg, 3);
    let ys = action_field(&sol, &y).unwrap();
    assert_eq!(alpha_nahm(&flat, &ys).unwrap(), 0.0);
    let mut tan = ys.clone();
    tan.t[2] = vec![czeros(2, 2); 200];
    tan.t[3] = vec![czeros(2, 2); 200];
    assert_eq!(alpha_nahm(&sol, &tan).unwrap(), 0.0);
    let cfg2 = NahmConfig::new(2, coth_limit(1.0, &rot()), 15.0, 200).unwrap();
    let p2 = solve_nahm(&cfg2, &coth_profile(1.0, 1.0, &rot(), 15.0, 200).unwrap(), &NahmSolveOptions::default()).unwrap();
    assert!(matches!(alpha_nahm(&p2, &NahmPath::constant(&cfg2)), Err(Error::TailTooLarge { .. })));
}

#[test]
fn gauge_element_validation() {
    let (cfg, _) = coth_case(1.0, &rot(), 50);
    let y = GaugePathElement::random(&cfg, 1);
    assert!(cfg.project_cartan(y.at_end()).1 < 1e-14);
    assert_eq!(y.values()[0], czeros(2, 2));
    let mut v = y.values().to_vec();
    v[49] = su2_triple::<f64>()[0].clone();
    assert!(matches!(GaugePathElement::new(&cfg, v.clone(), 1e-9), Err(Error::NotInCartan { .. })));
    v[49] = y.at_end().clone();
    v[0] = su2_triple::<f64>()[0].clone();
    assert!(GaugePathElement::new(&cfg, v, 1e-9).is_err());
    assert!(GaugePathElement::new(&cfg, y.values().to_vec(), 1e-9).is_ok());
}

#[test]
fn boundary_pairing_with_commuting_limits() {
    let (cfg, sol) = coth_case(1.0, &rot(), 600);
    assert!(sol.boundary_violation(&cfg) < 1e-6);
    for seed in 0..5 {
        let y = GaugePathElement::random(&cfg, seed);
        let b = boundary_pairing_check(&cfg, &sol, &y).unwrap();
        assert!(b.max_residual() <= 1e-4, "{b:?}");
        assert!(b.j_boundary.abs() > 1e-3 && b.k_boundary.abs() > 1e-3);
        assert!(b.alpha.abs() < 1e-12);
    }
    let z = boundary_pairing_check(&cfg, &sol, &GaugePathElement::zeros(&cfg)).unwrap();
    assert_eq!(z.max_residual(), 0.0);
}

#[test]
fn boundary_pairing_vanishes_without_tau23() {
    let (cfg, sol) = coth_case(1.0, &Matrix3::identity(), 600);
    for seed in 0..3 {
        let b = boundary_pairing_check(&cfg, &sol, &GaugePathElement::random(&cfg, seed)).unwrap();
        assert_eq!(b.j_boundary.abs() + b.k_boundary.abs(), 0.0);
        assert!(b.j_alpha.abs() < 1e-4 && b.k_alpha.abs() < 1e-4);
    }
}

#[test]
fn pairing_depends_only_on_boundary_data() {
    let (cfg, a) = coth_case(0.5, &rot(), 600);
    let (_, b) = coth_case(2.0, &rot(), 600);
    assert!(cnorm(&(&a.component(1)[0] - &b.component(1)[0])) > 0.1);
    let y = GaugePathElement::random(&cfg, 9);
    let pa = boundary_pairing_check(&cfg, &a, &y).unwrap();
    let pb = boundary_pairing_check(&cfg, &b, &y).unwrap();
    assert!((pa.j_alpha - pb.j_alpha).abs() < 1e-4 && (pa.k_alpha - pb.k_alpha).abs() < 1e-4);
}

#[test]
fn pairing_rejects_non_solutions() {
    let (cfg, _) = coth_case(1.0, &rot(), 100);
    let rough = coth_profile(1.0, 1.0, &rot(), 15.0, 100).unwrap();
    let y = GaugePathElement::random(&cfg, 0);
    assert!(boundary_pairing_check(&cfg, &rough, &y).is_err());
}

