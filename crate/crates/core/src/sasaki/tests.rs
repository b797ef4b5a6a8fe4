use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::base_manifold::ZooSpec;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn vec_close(a: &SplitTangentVector, b: &SplitTangentVector, tol: f64) -> bool {
    let scale = 1f64.max(a.max_abs()).max(b.max_abs());
    (a.clone() - b.clone()).max_abs() <= tol * scale
}

fn random_split<R: Rng>(rng: &mut R, m: usize) -> SplitTangentVector {
    let h: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    SplitTangentVector::from_slices(&h, &v)
}

fn random_point<R: Rng>(rng: &mut R, base: &ChartedManifold) -> TangentBundlePoint {
    let x = base.sample_point(rng);
    let u: Vec<f64> = (0..base.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    TangentBundlePoint::new(x, u)
}

fn sphere_metric(m: usize, f1: f64, f2: f64) -> WeightedSasakiMetric {
    WeightedSasakiMetric::new(ZooSpec::constant_curvature(m, 1.0).build().unwrap(), f1, f2).unwrap()
}

fn zoo() -> Vec<ZooSpec> {
    vec![
        ZooSpec::euclidean(2),
        ZooSpec::constant_curvature(2, 1.0),
        ZooSpec::constant_curvature(3, 1.0),
        ZooSpec::constant_curvature(2, -1.0),
        ZooSpec::product(ZooSpec::constant_curvature(2, 1.0), ZooSpec::euclidean(1)),
        ZooSpec::perturbed(2, 0.3),
        ZooSpec::perturbed(3, 0.2),
    ]
}

#[test]
fn weights_must_be_positive() {
    let base = ZooSpec::euclidean(2).build().unwrap();
    assert!(WeightedSasakiMetric::new(base.clone(), 0.0, 1.0).is_err());
    assert!(WeightedSasakiMetric::new(base.clone(), 1.0, -2.0).is_err());
    assert!(WeightedSasakiMetric::new(base, f64::NAN, 1.0).is_err());
}

#[test]
fn delta_is_ratio() {
    let g = sphere_metric(2, 4.0, 3.0);
    assert_eq!(g.delta(), 3.0 / 4.0);
}

#[test]
fn theta_maps() {
    let x = SplitTangentVector::from_slices(&[1.0, 2.0], &[3.0, 4.0]);
    assert_eq!(x.theta(), SplitTangentVector::from_slices(&[0.0, 0.0], &[1.0, 2.0]));
    assert_eq!(x.theta_t(), SplitTangentVector::from_slices(&[3.0, 4.0], &[0.0, 0.0]));
}

#[test]
fn flat_base_everything_vanishes() {
    let g = WeightedSasakiMetric::new(ZooSpec::euclidean(3).build().unwrap(), 2.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_point(&mut rng, g.base());
    let at = g.at(&p).unwrap();
    for _ in 0..5 {
        let (x, y, z) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
        assert!(at.script_r(&x, &y).max_abs() == 0.0);
        assert!(at.tensor_a(&x, &y).max_abs() == 0.0);
        assert!(at.a_nabla_r(&x, &y, &z).max_abs() == 0.0);
        assert!(at.curvature_rg(&x, &y, &z).max_abs() == 0.0);
        assert!(at.assemble_rg_from_pieces(&x, &y, &z).max_abs() == 0.0);
        assert_eq!(at.ricci_g(&x, &y), 0.0);
    }
    assert_eq!(at.scalar_g(), 0.0);
}

#[test]
fn script_r_on_round_sphere() {
    let g = sphere_metric(3, 1.0, 1.0);
    let x = vec![1.0, 1.2, 0.3];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let r = 0.7;
    // u ⟂ e1, e2
    let p = TangentBundlePoint::new(x.clone(), (&frame.e[2] * r).iter().copied().collect());
    let at = g.at_with_frame(&p, frame.clone()).unwrap();
    let out = at.script_r(&frame.horizontal(0), &frame.horizontal(1));
    assert!(out.max_abs() < 1e-12);
    // u along e2: R(e1,e2)e2 = c·e1
    let p = TangentBundlePoint::new(x, (&frame.e[1] * r).iter().copied().collect());
    let at = g.at_with_frame(&p, frame.clone()).unwrap();
    let out = at.script_r(&frame.horizontal(0), &frame.horizontal(1));
    let expected = SplitTangentVector::vertical(&frame.e[0] * r);
    assert!(vec_close(&out, &expected, 1e-12), "{out:?}");
}

#[test]
fn tensor_a_matches_direct_expansion() {
    let g = sphere_metric(3, 1.0, 1.0);
    let x = vec![1.0, 1.2, 0.3];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let p = TangentBundlePoint::new(x, frame.e[2].iter().copied().collect());
    let at = g.at_with_frame(&p, frame.clone()).unwrap();
    let (xs, ys) = (frame.horizontal(0), frame.vertical(0));
    let a = at.tensor_a(&xs, &ys);
    // ⟨ℛ(e1, e_i), e1⟩ = g(R(e1,e_i)e3, e1) = c(g(e_i,e3)g(e1,e1) - ...) picks i = 3 with value −1·(−1)...
    // R(e1,e3)e3 = e1 so ⟨R(e1,e3)u, e1⟩ = 1; A = ½·1·e3
    let expected = SplitTangentVector::horizontal(&frame.e[2] * 0.5);
    assert!(vec_close(&a, &expected, 1e-12), "{a:?}");
    assert!(a.v.amax() == 0.0);
    // both vertical: zero
    assert!(at.tensor_a(&frame.vertical(0), &frame.vertical(1)).max_abs() == 0.0);
    assert!(vec_close(&a, &at.tensor_a(&ys, &xs), 1e-14));
}

#[test]
fn tensor_b_examples() {
    let g = sphere_metric(3, 1.0, 1.0);
    let p = TangentBundlePoint::new(vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]);
    let at = g.at(&p).unwrap();
    let lam = 0.6;
    let grad = DVector::from_vec(vec![lam, 0.0, 0.0]);
    let w = DVector::from_vec(vec![0.3, -0.2, 0.9]);
    let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let out = at.tensor_b(&grad, &SplitTangentVector::vertical(w.clone()), &SplitTangentVector::horizontal(e1));
    assert_eq!(out, SplitTangentVector::vertical(&w * lam));
    assert!(at.tensor_b(&DVector::zeros(3), &SplitTangentVector::vertical(w.clone()), &SplitTangentVector::vertical(w)).max_abs() == 0.0);
}

#[test]
fn tensor_b_vertical_pair_in_flat_chart() {
    let g = WeightedSasakiMetric::new(ZooSpec::euclidean(3).build().unwrap(), 1.0, 1.0).unwrap();
    let at = g.at(&TangentBundlePoint::new(vec![0.0; 3], vec![0.0; 3])).unwrap();
    let lam = 0.6;
    let grad = DVector::from_vec(vec![lam, 0.0, 0.0]);
    let e2 = SplitTangentVector::from_slices(&[0.0; 3], &[0.0, 1.0, 0.0]);
    let out = at.tensor_b(&grad, &e2, &e2);
    assert_eq!(out, SplitTangentVector::from_slices(&[-lam, 0.0, 0.0], &[0.0; 3]));
}

#[test]
fn a_nabla_r_vanishes_on_symmetric_base_for_horizontal_direction() {
    let g = sphere_metric(3, 1.0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = random_point(&mut rng, g.base());
    let at = g.at(&p).unwrap();
    for _ in 0..5 {
        let d = random_split(&mut rng, 3).h_part();
        let (y, z) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
        assert!(at.a_nabla_r(&d, &y, &z).max_abs() < 1e-6);
    }
}

#[test]
fn a_nabla_r_matches_expansion_on_perturbed_base() {
    let g = WeightedSasakiMetric::new(ZooSpec::perturbed(3, 0.3).build().unwrap(), 1.5, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_point(&mut rng, g.base());
    let at = g.at(&p).unwrap();
    let frame = at.frame().clone();
    for _ in 0..5 {
        let (d, y, z) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
        let got = at.a_nabla_r(&d, &y, &z);
        // ⟨A^{∇_Dℛ}(Y,Z), W⟩ = (δ/2)(⟨(∇_Dℛ)(Y,W),Z⟩ + ⟨(∇_Dℛ)(Z,W),Y⟩), tested on every frame vector
        for (i, _) in frame.e.iter().enumerate() {
            let w = frame.horizontal(i);
            let lhs = at.sasaki_inner(&got, &w);
            let rhs = 0.5
                * g.delta()
                * (at.sasaki_inner(&at.nabla_script_r(&d, &y, &w), &z) + at.sasaki_inner(&at.nabla_script_r(&d, &z, &w), &y));
            assert!(rel_close(lhs, rhs, 1e-10));
        }
        // mixed-slot property
        let hh = at.a_nabla_r(&d, &y.h_part(), &z.h_part());
        let vv = at.a_nabla_r(&d, &y.v_part(), &z.v_part());
        assert!(hh.max_abs() < 1e-14 && vv.max_abs() < 1e-14);
    }
}

#[test]
fn all_vertical_curvature_is_exactly_zero() {
    let g = WeightedSasakiMetric::new(ZooSpec::perturbed(3, 0.3).build().unwrap(), 1.5, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = random_point(&mut rng, g.base());
    let at = g.at(&p).unwrap();
    let (x, y, z) = (random_split(&mut rng, 3).v_part(), random_split(&mut rng, 3).v_part(), random_split(&mut rng, 3).v_part());
    assert_eq!(at.curvature_rg(&x, &y, &z).max_abs(), 0.0);
}

#[test]
fn hvvv_and_vvvh_vanish() {
    let g = sphere_metric(3, 2.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_point(&mut rng, g.base());
    let at = g.at(&p).unwrap();
    let (x, y, w) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
    let v = at.curvature_rg4(&x.h_part(), &y.v_part(), &y.v_part(), &w.v_part());
    assert!(v.abs() < 1e-12);
    let v = at.curvature_rg4(&x.v_part(), &y.v_part(), &y.v_part(), &w.h_part());
    assert!(v.abs() < 1e-12);
}

#[test]
fn pattern_hvvh_on_sphere() {
    let g = sphere_metric(3, 2.0, 1.0);
    let x = vec![1.1, 0.8, -0.4];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let p = TangentBundlePoint::new(x, frame.e[2].iter().copied().collect());
    let at = g.at_with_frame(&p, frame.clone()).unwrap();
    let (xs, ys) = (frame.horizontal(0), frame.vertical(1));
    let closed = at.curvature_rg4_pattern(Rg4Pattern::Hvvh, &xs, &ys, &xs);
    let generic = at.curvature_rg4(&xs, &ys, &ys, &xs);
    assert!(rel_close(closed, generic, 1e-8), "{closed} vs {generic}");
}

#[test]
fn patterns_agree_with_generic_path_on_zoo() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for spec in zoo() {
        let m = spec.dim();
        let g = WeightedSasakiMetric::new(spec.build().unwrap(), 1.7, 0.6).unwrap();
        let p = random_point(&mut rng, g.base());
        let at = g.at(&p).unwrap();
        for pattern in Rg4Pattern::ALL {
            let (x, y, w) = (random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m));
            let (xv, yv, wv) = pattern.parts();
            let pick = |a: &SplitTangentVector, v: bool| if v { a.v_part() } else { a.h_part() };
            let (xp, yp, wp) = (pick(&x, xv), pick(&y, yv), pick(&w, wv));
            let closed = at.curvature_rg4_pattern(pattern, &x, &y, &w);
            let generic = at.curvature_rg4(&xp, &yp, &yp, &wp);
            assert!(rel_close(closed, generic, 1e-8), "{spec:?} {pattern:?}: {closed} vs {generic}");
        }
    }
}

#[test]
fn curvature_symmetries_and_bianchi_on_zoo() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in zoo() {
        let m = spec.dim();
        let g = WeightedSasakiMetric::new(spec.build().unwrap(), 0.8, 1.9).unwrap();
        for _ in 0..3 {
            let p = random_point(&mut rng, g.base());
            let at = g.at(&p).unwrap();
            let (x, y, z, w) =
                (random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m));
            let r = at.curvature_rg4(&x, &y, &z, &w);
            assert!(rel_close(r, -at.curvature_rg4(&y, &x, &z, &w), 1e-6), "{spec:?}");
            assert!(rel_close(r, -at.curvature_rg4(&x, &y, &w, &z), 1e-6), "{spec:?}");
            assert!(rel_close(r, at.curvature_rg4(&z, &w, &x, &y), 1e-6), "{spec:?}");
            let cyc = at.curvature_rg(&x, &y, &z) + at.curvature_rg(&y, &z, &x) + at.curvature_rg(&z, &x, &y);
            let scale = at.curvature_rg(&x, &y, &z).max_abs();
            assert!(cyc.max_abs() <= 1e-6 * scale.max(1.0), "{spec:?}: bianchi {}", cyc.max_abs());
        }
    }
}

#[test]
fn two_paths_agree_on_zoo() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for spec in zoo() {
        let m = spec.dim();
        let g = WeightedSasakiMetric::new(spec.build().unwrap(), 1.3, 0.9).unwrap();
        let p = random_point(&mut rng, g.base());
        let at = g.at(&p).unwrap();
        for _ in 0..4 {
            let (x, y, z) = (random_split(&mut rng, m), random_split(&mut rng, m), random_split(&mut rng, m));
            let a = at.curvature_rg(&x, &y, &z);
            let b = at.assemble_rg_from_pieces(&x, &y, &z);
            assert!(vec_close(&a, &b, 1e-8), "{spec:?}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn ricci_formula_matches_trace_of_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in zoo() {
        let m = spec.dim();
        let g = WeightedSasakiMetric::new(spec.build().unwrap(), 1.4, 0.5).unwrap();
        let p = random_point(&mut rng, g.base());
        let at = g.at(&p).unwrap();
        let frame = at.g_orthonormal_frame();
        for _ in 0..3 {
            let (x, y) = (random_split(&mut rng, m), random_split(&mut rng, m));
            let traced: f64 = frame.iter().map(|e| at.curvature_rg4(&x, e, e, &y)).sum();
            let formula = at.ricci_g(&x, &y);
            assert!(rel_close(formula, traced, 1e-6), "{spec:?}: {formula} vs {traced}");
            assert!(rel_close(formula, at.ricci_g(&y, &x), 1e-12));
        }
    }
}

#[test]
fn scalar_equals_trace_of_ricci() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for spec in zoo() {
        let g = WeightedSasakiMetric::new(spec.build().unwrap(), 2.0, 0.7).unwrap();
        let p = random_point(&mut rng, g.base());
        let at = g.at(&p).unwrap();
        let trace = at.ricci_matrix_orthonormal().trace();
        assert!(rel_close(at.scalar_g(), trace, 1e-8), "{spec:?}: {} vs {trace}", at.scalar_g());
    }
}

#[test]
fn ricci_vv_example() {
    let g = sphere_metric(3, 1.0, 1.0);
    let x = vec![1.0, 1.3, 0.2];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let r = 0.8;
    let p = TangentBundlePoint::new(x, (&frame.e[2] * r).iter().copied().collect());
    let at = g.at_with_frame(&p, frame.clone()).unwrap();
    let v = frame.vertical(0);
    assert!(rel_close(at.ricci_g(&v, &v), r * r / 2.0, 1e-10));
    assert!(at.ricci_g(&frame.horizontal(0), &frame.vertical(1)).abs() < 1e-6);
}

#[test]
fn scalar_constant_curvature_closed_form() {
    for (m, c, f1, f2, rho) in [(2, 1.0, 1.0, 1.0, 1.0), (3, 1.0, 2.0, 0.5, 0.7), (2, -1.0, 1.5, 3.0, 1.2), (3, -1.0, 1.0, 1.0, 0.4)] {
        let g = WeightedSasakiMetric::new(ZooSpec::constant_curvature(m, c).build().unwrap(), f1, f2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = g.base().sample_point(&mut rng);
        let gx = g.base().metric(&x).unwrap();
        let frame = AdaptedFrame::standard(&gx).unwrap();
        let p = TangentBundlePoint::new(x, (&frame.e[0] * rho).iter().copied().collect());
        let at = g.at(&p).unwrap();
        let mf = m as f64;
        let expected = mf * (mf - 1.0) * c / f1 - f2 / (4.0 * f1 * f1) * 2.0 * (mf - 1.0) * c * c * rho * rho;
        assert!(rel_close(at.scalar_g(), expected, 1e-8), "{m} {c}: {} vs {expected}", at.scalar_g());
        assert!(rel_close(at.script_r_square_sum(), 2.0 * (mf - 1.0) * c * c * rho * rho, 1e-8));
    }
}

#[test]
fn scalar_two_sphere_unit_fiber_is_three_halves() {
    let g = sphere_metric(2, 1.0, 1.0);
    let x = vec![1.0, 0.5];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let p = TangentBundlePoint::new(x, frame.e[1].iter().copied().collect());
    assert!(rel_close(g.at(&p).unwrap().scalar_g(), 1.5, 1e-10));
}

#[test]
fn non_einstein_witness_and_flat_einstein() {
    let g = sphere_metric(3, 1.0, 1.0);
    let x = vec![1.0, 1.3, 0.2];
    let gx = g.base().metric(&x).unwrap();
    let frame = AdaptedFrame::standard(&gx).unwrap();
    let p = TangentBundlePoint::new(x, frame.e[0].iter().copied().collect());
    assert!(g.at(&p).unwrap().trace_free_ricci_norm() > 0.1);

    let flat = WeightedSasakiMetric::new(ZooSpec::euclidean(3).build().unwrap(), 2.0, 3.0).unwrap();
    let p = TangentBundlePoint::new(vec![0.2, 0.1, 0.0], vec![1.0, 0.0, 0.0]);
    assert!(flat.at(&p).unwrap().ricci_matrix_orthonormal().amax() == 0.0);
}

#[test]
fn frame_independence_of_ricci_and_scalar() {
    let g = WeightedSasakiMetric::new(ZooSpec::perturbed(3, 0.3).build().unwrap(), 1.2, 0.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = random_point(&mut rng, g.base());
    let gx = g.base().metric(&p.x).unwrap();
    let seed: Vec<DVector<f64>> = (0..3).map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0))).collect();
    let a = g.at(&p).unwrap();
    let b = g.at_with_frame(&p, AdaptedFrame::from_seed(&gx, &seed).unwrap()).unwrap();
    assert!(rel_close(a.scalar_g(), b.scalar_g(), 1e-8));
    for _ in 0..3 {
        let (x, y) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
        assert!(rel_close(a.ricci_g(&x, &y), b.ricci_g(&x, &y), 1e-8));
        let z = random_split(&mut rng, 3);
        assert!(vec_close(&a.curvature_rg(&x, &y, &z), &b.curvature_rg(&x, &y, &z), 1e-8));
    }
}

#[test]
fn sectional_rejects_degenerate_plane() {
    let g = sphere_metric(2, 1.0, 1.0);
    let at = g.at(&TangentBundlePoint::new(vec![1.0, 0.0], vec![0.3, 0.1])).unwrap();
    let x = SplitTangentVector::from_slices(&[1.0, 0.0], &[0.0, 1.0]);
    assert!(matches!(at.sectional_g(&x, &(2.0 * x.clone())), Err(GeoError::Rank(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_symmetries_on_hyperbolic(
        f1 in 0.3f64..3.0, f2 in 0.3f64..3.0, seed in any::<u64>()
    ) {
        let g = WeightedSasakiMetric::new(ZooSpec::constant_curvature(3, -1.0).build().unwrap(), f1, f2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_point(&mut rng, g.base());
        let at = g.at(&p).unwrap();
        let (x, y, z, w) = (random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3), random_split(&mut rng, 3));
        let r = at.curvature_rg4(&x, &y, &z, &w);
        prop_assert!(rel_close(r, -at.curvature_rg4(&y, &x, &z, &w), 1e-6));
        prop_assert!(rel_close(r, -at.curvature_rg4(&x, &y, &w, &z), 1e-6));
        prop_assert!(rel_close(r, at.curvature_rg4(&z, &w, &x, &y), 1e-6));
        let cyc = at.curvature_rg(&x, &y, &z) + at.curvature_rg(&y, &z, &x) + at.curvature_rg(&z, &x, &y);
        prop_assert!(cyc.max_abs() < 1e-6 * at.curvature_rg(&x, &y, &z).max_abs().max(1.0));
        let a = at.curvature_rg(&x, &y, &z);
        let b = at.assemble_rg_from_pieces(&x, &y, &z);
        prop_assert!(vec_close(&a, &b, 1e-8));
    }

    #[test]
    fn prop_scalar_closed_form_on_sphere(
        f1 in 0.3f64..3.0, f2 in 0.3f64..3.0, rho in 0.0f64..2.0, seed in any::<u64>()
    ) {
        let g = sphere_metric(3, f1, f2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.base().sample_point(&mut rng);
        let gx = g.base().metric(&x).unwrap();
        let dir = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
        let norm = (dir.transpose() * &gx * &dir)[(0, 0)].sqrt();
        prop_assume!(norm > 1e-3);
        let u = &dir * (rho / norm);
        let p = TangentBundlePoint::new(x, u.iter().copied().collect());
        let at = g.at(&p).unwrap();
        let expected = 6.0 / f1 - f2 / (4.0 * f1 * f1) * 4.0 * rho * rho;
        prop_assert!(rel_close(at.scalar_g(), expected, 1e-8));
    }

    #[test]
    fn prop_ricci_frame_independent(seed in any::<u64>()) {
        let g = WeightedSasakiMetric::new(ZooSpec::constant_curvature(3, 1.0).build().unwrap(), 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_point(&mut rng, g.base());
        let gx = g.base().metric(&p.x).unwrap();
        let seed_vecs: Vec<DVector<f64>> = (0..3).map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0))).collect();
        let frame = match AdaptedFrame::from_seed(&gx, &seed_vecs) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let a = g.at(&p).unwrap();
        let b = g.at_with_frame(&p, frame).unwrap();
        let (x, y) = (random_split(&mut rng, 3), random_split(&mut rng, 3));
        prop_assert!(rel_close(a.ricci_g(&x, &y), b.ricci_g(&x, &y), 1e-8));
        prop_assert!(rel_close(a.scalar_g(), b.scalar_g(), 1e-8));
    }
}
