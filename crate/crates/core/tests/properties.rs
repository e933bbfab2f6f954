use hkreduce::action::HkAction;
use hkreduce::hk::{type_parts, type_violation, CotangentModel, SphereDirection, Structure, TwoForm};
use hkreduce::nahm::{gauge_act, inverse_profile, nahm_residual, structured_alpha, NahmPath, SuAlgebra};
use hkreduce::prequant::{higgs_prequant, nahm_prequant_diag, quiver_prequant, Which};
use hkreduce::quiver::{solve_moment, FramedDims, Quiver, QuiverProblem, SolveOptions, StabilityParams};
use hkreduce::scalar::{adjoint, cnorm, Cx};
use hkreduce::twistor::{check_20_type, Laurent, StereographicMap};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(n: usize, r: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0))
}

fn random_form(n: usize, r: &mut ChaCha8Rng) -> TwoForm<f64> {
    TwoForm::from_antisymmetrized(DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0)))
}

fn problem(q: Quiver, v: usize, w: usize, zc: Cx<f64>) -> QuiverProblem<f64> {
    QuiverProblem::new(q, FramedDims::new(vec![v], vec![w]).unwrap(), StabilityParams::new(vec![0.5], vec![zc]).unwrap()).unwrap()
}

fn quivers() -> impl Strategy<Value = QuiverProblem<f64>> {
    prop_oneof![
        Just(problem(Quiver::jordan(), 1, 1, Cx::new(1.0, 0.0))),
        Just(problem(Quiver::jordan(), 2, 1, Cx::new(0.5, -0.5))),
        Just(problem(Quiver::a1(), 1, 2, Cx::new(1.0, 1.0))),
        Just(problem(Quiver::a1(), 2, 3, Cx::new(0.0, 0.7))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quaternion_relations_and_izeta(n in 1usize..5, seed in any::<u64>()) {
        let m = CotangentModel::<f64>::new(n).unwrap();
        let s = m.space();
        prop_assert!(s.invariant_violation() <= 1e-12);
        let mut r = rng(seed);
        let a = s.izeta(&SphereDirection::random(&mut r));
        let id = DMatrix::<f64>::identity(4 * n, 4 * n);
        prop_assert!((&a * &a + &id).amax() <= 1e-12);
        let w = s.metric() * &a;
        prop_assert!((&w + w.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn complex_alpha_is_holomorphic_pairing_with_fiber(n in 1usize..4, seed in any::<u64>()) {
        let m = CotangentModel::<f64>::new(n).unwrap();
        let s = m.space();
        let mut r = rng(seed);
        let x = random_vec(4 * n, &mut r);
        let t = random_vec(4 * n, &mut r);
        let a = m.alpha_form().at(&x);
        let lhs = Cx::new(a.compose(s.structure(Structure::J)).eval(&t), a.compose(s.structure(Structure::K)).eval(&t));
        let rhs = s.holomorphic_pairing(&(m.fiber_projector() * &x), &t);
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn flat_differentials(n in 1usize..4) {
        let m = CotangentModel::<f64>::new(n).unwrap();
        let s = m.space();
        let al = m.alpha_form();
        prop_assert_eq!(al.d().norm(), 0.0);
        prop_assert!(al.compose(s.structure(Structure::J)).d().sub(&s.kahler_form(Structure::J)).norm() <= 1e-12);
        prop_assert!(al.compose(s.structure(Structure::K)).d().sub(&s.kahler_form(Structure::K)).norm() <= 1e-12);
    }

    #[test]
    fn type_parts_is_a_projection(n in 1usize..4, seed in any::<u64>()) {
        let s = CotangentModel::<f64>::new(n).unwrap().space().clone();
        let mut r = rng(seed);
        let f = random_form(4 * n, &mut r);
        let a = s.izeta(&SphereDirection::random(&mut r));
        let (p11, p20) = type_parts(&f, &a).unwrap();
        prop_assert!(p11.add(&p20).sub(&f).norm() <= 1e-12);
        let (q11, q20) = type_parts(&p11, &a).unwrap();
        prop_assert!(q11.sub(&p11).norm() <= 1e-12 && q20.norm() <= 1e-12);
        prop_assert!(type_violation(&p11, &a) <= 1e-12);
    }

    #[test]
    fn moment_maps_are_equivariant(p in quivers(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = p.random_point(&mut r, 1.0);
        let g = p.random_gauge(&mut r).exp();
        let gx = p.act(&g, &x).unwrap();
        for (mu, mug) in [(p.moment_real(&x).unwrap(), p.moment_real(&gx).unwrap()), (p.moment_complex(&x).unwrap(), p.moment_complex(&gx).unwrap())] {
            for k in 0..mu.len() {
                let ad = &g[k] * &mu[k] * adjoint(&g[k]);
                prop_assert!(cnorm(&(ad - &mug[k])) <= 1e-10);
            }
        }
    }

    #[test]
    fn moment_differential_is_dual_to_the_action(p in quivers(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = p.to_real(&p.random_point(&mut r, 1.0)).unwrap();
        let t = random_vec(x.len(), &mut r);
        let h = 1e-6;
        let fd = (p.moment(&(&x + &t * h)) - p.moment(&(&x - &t * h))) / (2.0 * h);
        let a = p.action_matrix(&x);
        let s = p.space();
        let g = p.group_dim();
        for (blk, st) in Structure::ALL.iter().enumerate() {
            let w = s.kahler_form(*st);
            for y in 0..g {
                let want = w.eval(&a.column(y).into_owned(), &t);
                prop_assert!((fd[blk * g + y] - want).abs() <= 1e-8, "{:?} {} {}", st, fd[blk * g + y], want);
            }
        }
    }

    #[test]
    fn alpha_annihilates_fundamental_fields(p in quivers(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = p.to_real(&p.random_point(&mut r, 2.0)).unwrap();
        let v = p.action_matrix(&x).transpose() * p.alpha(&x);
        prop_assert!(v.amax() <= 1e-12);
    }

    #[test]
    fn quotient_dimension(p in quivers(), seed in 0u64..1000) {
        let mut r = rng(seed);
        if let Ok(s) = solve_moment(&p, &p.random_point(&mut r, 1.0), &SolveOptions::default()) {
            let g = p.group_dim();
            let d = p.space().dim();
            let jac = p.moment_jacobian(&s.x);
            let rank = |m: &DMatrix<f64>| m.clone().svd(false, false).singular_values.iter().filter(|&&v| v > 1e-8).count();
            prop_assert_eq!(rank(&jac), 3 * g);
            prop_assert_eq!(rank(&p.action_matrix(&s.x)), g);
            prop_assert_eq!(d - 3 * g - g, d - 4 * g);
            let kernel = d - rank(&jac);
            prop_assert_eq!(kernel - g, d - 4 * g);
        }
    }

    #[test]
    fn nahm_gauge_invariance(seed in any::<u64>(), amp in 0.1f64..1.5) {
        let n = 300;
        let path = inverse_profile::<f64>(4.0, n).unwrap();
        let alg = SuAlgebra::<f64>::new(2).unwrap();
        let mut r = rng(seed);
        let x0 = alg.random(&mut r);
        let x = x0.map(|z| z * (amp / cnorm(&x0)));
        let grid: Vec<f64> = (0..n).map(|i| 4.0 * i as f64 / (n - 1) as f64).collect();
        let g: Vec<_> = grid.iter().map(|&s| x.map(|z| z * (1.0 - (-s).exp())).exp()).collect();
        let q = gauge_act(&g, &path).unwrap();
        let (rp, rq) = (nahm_residual(&path), nahm_residual(&q));
        for a in 0..3 {
            for i in 2..n - 2 {
                prop_assert!((cnorm(&rp[a][i]) - cnorm(&rq[a][i])).abs() <= 1e-5);
            }
        }
        let comps: [Vec<_>; 4] = std::array::from_fn(|_| (0..n).map(|_| alg.random(&mut r)).collect());
        let t = NahmPath::new(4.0, comps.clone()).unwrap();
        let moved: [Vec<_>; 4] = std::array::from_fn(|a| comps[a].iter().zip(&g).map(|(m, gi)| gi * m * adjoint(gi)).collect());
        let tm = NahmPath::new(4.0, moved).unwrap();
        for which in [None, Some(Structure::J), Some(Structure::K)] {
            let (u, v) = (structured_alpha(&path, &t, which), structured_alpha(&q, &tm, which));
            match (u, v) {
                (Ok(u), Ok(v)) => prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs())),
                (u, v) => prop_assert_eq!(u.is_ok(), v.is_ok()),
            }
        }
    }

    #[test]
    fn twistor_symmetries(n in 1usize..4, seed in any::<u64>()) {
        let s = CotangentModel::<f64>::new(n).unwrap().space().clone();
        let mut r = rng(seed);
        let l = Laurent::twistor_form(&Structure::ALL.map(|w| s.kahler_form(w)));
        prop_assert!(l.involution().sub(&l).norms().iter().all(|&v| v <= 1e-12));
        let (f1, f2) = (random_form(4 * n, &mut r), random_form(4 * n, &mut r));
        let ft = Laurent::f_tilde(&f1, &f2);
        prop_assert!(ft.involution().sub(&ft).norms().iter().all(|&v| v <= 1e-12));
        let fp = Laurent::f_plus(&f1, &f2);
        prop_assert!(fp.involution().add(&fp).norms().iter().all(|&v| v <= 1e-12));
        let z = Cx::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        if z.norm() > 1e-3 {
            prop_assert!(check_20_type(&s, &l, z, StereographicMap::ImNegRe).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn prequant_scale_consistency(num in -40i64..40, den in 1i64..7, k in -5i64..6, mult in 1i64..5) {
        let x = Ratio::new(num, den);
        let half = Ratio::new(1, 2);
        let z = |v: Ratio<i64>| vec![Complex::new(v, v)];
        for w in [Which::J, Which::K] {
            let base = quiver_prequant(&z(x), w, 0.0);
            prop_assert_eq!(quiver_prequant(&z(x + half * k), w, 0.0), base);
            if base {
                prop_assert!(quiver_prequant(&z(x * mult), w, 0.0));
            }
            let xf = num as f64 / den as f64;
            prop_assert_eq!(quiver_prequant(&[Complex::new(xf, xf)], w, 1e-9), base);
        }
        for r in 1usize..4 {
            let sp = Ratio::new(r as i64, 2);
            let mut row = vec![Complex::new(Ratio::from_integer(0), Ratio::from_integer(0)); r];
            row[0] = Complex::new(x, x);
            if r > 1 {
                row[1] = -row[0];
            }
            let base = higgs_prequant(&[row.clone()], r, Which::J, 0.0);
            if r == 1 {
                prop_assert_eq!(base.is_err(), num != 0);
                continue;
            }
            let base = base.unwrap();
            let mut shifted = row.clone();
            shifted[0] += Complex::new(sp * k, sp * k);
            shifted[1] -= Complex::new(sp * k, sp * k);
            prop_assert_eq!(higgs_prequant(&[shifted], r, Which::J, 0.0).unwrap(), base);
        }
        let t = [x, -x];
        let base = nahm_prequant_diag(&t, 0.0).unwrap();
        let one = Ratio::from_integer(k);
        prop_assert_eq!(nahm_prequant_diag(&[x + one, -x - one], 0.0).unwrap(), base);
        if base {
            prop_assert!(nahm_prequant_diag(&[x * mult, -x * mult], 0.0).unwrap());
        }
    }
}
