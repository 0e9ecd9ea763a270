use flowknots::confint::*;
use flowknots::curves::{shapes, PolyCurve};
use flowknots::diagrams::{enumerate, TrivalentDiagram};
use flowknots::{Mat3, Vec3};
use proptest::prelude::*;

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rigid(c: &PolyCurve<f64>, axis: [f64; 3], angle: f64, shift: [f64; 3]) -> PolyCurve<f64> {
    let r = Mat3::rotation(Vec3::from_f64(axis), angle);
    c.map(|p| r.apply(p) + Vec3::from_f64(shift)).unwrap()
}

#[test]
fn hopf_link_has_linking_number_one() {
    let (a, b) = shapes::hopf::<f64>(512);
    let lk = linking_number(&a, &b, &q()).unwrap();
    let oracle = crossing_projection_lk(&a, &b).unwrap();
    assert_eq!(oracle, 1);
    assert!((lk.value - oracle as f64).abs() < 1e-2, "{}", lk.value);
    assert_eq!(lk.method, Method::Grid);
    assert_eq!(lk.std_error, 0.0);
}

#[test]
fn split_link_is_unlinked() {
    let (a, b) = shapes::split_link::<f64>(512);
    assert!(linking_number(&a, &b, &q()).unwrap().value.abs() < 1e-3);
    assert_eq!(crossing_projection_lk(&a, &b).unwrap(), 0);
}

#[test]
fn torus_link_2_4_has_linking_number_two() {
    let (a, b) = shapes::torus_link_2_4::<f64>(512);
    let lk = linking_number(&a, &b, &q()).unwrap().value;
    let oracle = crossing_projection_lk(&a, &b).unwrap();
    assert_eq!(oracle, 2);
    assert!((lk - 2.0).abs() < 2e-2, "{lk}");
}

#[test]
fn linking_number_is_exactly_symmetric() {
    for (a, b) in [shapes::hopf::<f64>(200), shapes::torus_link_2_4::<f64>(300)] {
        let ab = linking_number(&a, &b, &q()).unwrap().value;
        let ba = linking_number(&b, &a, &q()).unwrap().value;
        assert_eq!(ab.to_bits(), ba.to_bits());
    }
}

#[test]
fn intersecting_curves_are_rejected() {
    let a = shapes::circle::<f64>(64, 1.0, [0.0; 3]);
    let b = shapes::circle::<f64>(64, 1.0, [0.0; 3]);
    assert!(matches!(linking_number(&a, &b, &q()), Err(ConfintError::Intersecting(_))));
}

#[test]
fn linking_and_writhe_are_rigid_motion_invariant() {
    let (a, b) = shapes::hopf::<f64>(256);
    let lk0 = linking_number(&a, &b, &q()).unwrap().value;
    let k = shapes::trefoil::<f64>(256);
    let w0 = writhe(&k, &q()).unwrap().value;
    for (axis, angle, shift) in [([1.0, 2.0, -0.5], 0.7, [3.0, -1.0, 2.0]), ([0.0, 0.0, 1.0], 2.5, [0.0, 10.0, 0.0])] {
        let lk = linking_number(&rigid(&a, axis, angle, shift), &rigid(&b, axis, angle, shift), &q()).unwrap().value;
        assert!((lk - lk0).abs() < 1e-9);
        let w = writhe(&rigid(&k, axis, angle, shift), &q()).unwrap().value;
        assert!((w - w0).abs() < 1e-9);
    }
}

#[test]
fn planar_circle_has_zero_writhe() {
    let c = shapes::circle::<f64>(512, 1.0, [0.0; 3]);
    let w = writhe(&c, &q()).unwrap();
    assert!(w.value.abs() < 1e-3);
    assert!(w.warning.is_none());
}

#[test]
fn trefoil_writhe_matches_refined_quadrature() {
    let coarse = writhe(&shapes::trefoil::<f64>(1024), &q()).unwrap().value;
    let fine = writhe(&shapes::trefoil::<f64>(4096), &q()).unwrap().value;
    assert!(((coarse - fine) / fine).abs() < 5e-3, "{coarse} vs {fine}");
}

#[test]
fn writhe_is_unchanged_by_quarter_turn() {
    let k = shapes::trefoil::<f64>(1024);
    let w0 = writhe(&k, &q()).unwrap().value;
    let w1 = writhe(&rigid(&k, [1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2, [0.0; 3]), &q()).unwrap().value;
    assert!((w0 - w1).abs() < 1e-6);
}

#[test]
fn writhe_flags_near_self_intersection() {
    // A planar figure-eight lifted by a tiny amount at its crossing.
    let lift = 1e-9;
    let k = shapes::parametric::<f64>(400, |t| [(t).sin(), (t).sin() * (t).cos(), lift * (t).cos()]);
    let w = writhe(&k, &q()).unwrap();
    assert!(w.warning.is_some());
}

#[test]
fn open_curve_is_rejected() {
    let c = PolyCurve::open(vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)]).unwrap();
    assert!(matches!(writhe(&c, &q()), Err(ConfintError::NotClosed)));
}

#[test]
fn polyak_viro_oracle_values() {
    assert_eq!(polyak_viro_v2(&shapes::unknot::<f64>(100)).unwrap(), 0);
    assert_eq!(polyak_viro_v2(&shapes::trefoil::<f64>(300)).unwrap(), 1);
    assert_eq!(polyak_viro_v2(&shapes::figure_eight::<f64>(300)).unwrap(), -1);
    assert_eq!(polyak_viro_v2(&shapes::granny::<f64>(600)).unwrap(), 2);
}

#[test]
fn polyak_viro_does_not_depend_on_base_point() {
    let k = shapes::figure_eight::<f64>(300);
    for base in [0.5, 37.25, 151.5, 299.5] {
        assert_eq!(polyak_viro_v2_based(&k, base).unwrap(), -1);
    }
}

#[test]
fn single_chord_integral_is_the_writhe() {
    let k = shapes::trefoil::<f64>(300);
    let d1 = TrivalentDiagram::single_chord();
    let a = integral_i_d(&k, &d1, &q()).unwrap().value;
    let b = writhe(&k, &q()).unwrap().value;
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn crossed_chord_integral_self_converges_on_round_circle() {
    let x = TrivalentDiagram::crossed();
    let a = integral_i_d(&shapes::unknot::<f64>(512), &x, &q()).unwrap();
    let b = integral_i_d(&shapes::unknot::<f64>(2048), &x, &q()).unwrap();
    assert_eq!(a.method, Method::Grid);
    // Deterministic grid values: both errors are zero, so the refined run
    // must agree to rounding.
    assert!((a.value - b.value).abs() < 1e-9, "{} vs {}", a.value, b.value);
}

#[test]
fn tripod_integral_is_reproducible_and_self_converges() {
    let y = TrivalentDiagram::tripod();
    let cfg = q().with_samples(100_000).with_seed(11);
    let a = integral_i_d(&shapes::unknot::<f64>(256), &y, &cfg).unwrap();
    let again = integral_i_d(&shapes::unknot::<f64>(256), &y, &cfg).unwrap();
    assert_eq!(a, again);
    assert_eq!(a.method, Method::Hybrid);
    let b = integral_i_d(&shapes::unknot::<f64>(1024), &y, &cfg.clone().with_samples(400_000).with_seed(12)).unwrap();
    let tol = 2.0 * a.std_error.hypot(b.std_error);
    assert!((a.value - b.value).abs() < tol, "{a:?} vs {b:?}");
}

#[test]
fn tripod_std_error_scales_as_inverse_sqrt_samples() {
    let y = TrivalentDiagram::tripod();
    let k = shapes::unknot::<f64>(64);
    let errs: Vec<f64> = [10_000usize, 100_000, 1_000_000]
        .iter()
        .map(|&n| integral_i_d(&k, &y, &q().with_samples(n).with_seed(5)).unwrap().std_error)
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        let ideal = 10f64.sqrt();
        assert!(ratio > ideal / 2.0 && ratio < ideal * 2.0, "{errs:?}");
    }
}

#[test]
fn integral_respects_relabeling_signs() {
    let k = shapes::trefoil::<f64>(24);
    let cfg = q().with_samples(500);
    for d in enumerate(2).unwrap() {
        let n = d.circle().len() + d.free().len();
        let base = integral_i_d(&k, &d, &cfg).unwrap().value;
        for r in 1..n {
            let mut map = vec![0u8];
            map.extend((0..n).map(|i| ((i + r) % n + 1) as u8));
            let (d2, sign) = d.relabel(&map);
            let v = integral_i_d(&k, &d2, &cfg).unwrap().value;
            assert!((v - sign as f64 * base).abs() < 1e-9 * (1.0 + base.abs()), "{d} -> {d2}");
        }
        let mut swap: Vec<u8> = (0..=n as u8).collect();
        swap.swap(1, 2);
        let (d2, sign) = d.relabel(&swap);
        let v = integral_i_d(&k, &d2, &cfg).unwrap().value;
        assert!((v - sign as f64 * base).abs() < 1e-9 * (1.0 + base.abs()), "{d} -> {d2}");
    }
}

#[test]
fn v2_vanishes_on_round_unknot() {
    let cfg = q().with_samples(20_000);
    let v = v2(&shapes::unknot::<f64>(128), &cfg).unwrap();
    assert_eq!(v.value, 0.0);
}

#[test]
fn v2_is_invariant_on_deformed_unknot() {
    let cfg = q().with_samples(200_000).with_seed(3);
    let v = v2(&shapes::wobbly_unknot::<f64>(256, 0.8), &cfg).unwrap();
    assert!(v.value.abs() < 3.0 * v.std_error + 2e-3, "{v:?}");
}

#[test]
fn v2_matches_polyak_viro_on_knots() {
    let cfg = q().with_samples(200_000).with_seed(9);
    for (k, tol) in [(shapes::trefoil::<f64>(512), 0.1), (shapes::figure_eight::<f64>(512), 0.1)] {
        let pv = polyak_viro_v2(&k).unwrap() as f64;
        let v = v2(&k, &cfg).unwrap();
        assert!((v.value - pv).abs() < tol, "{v:?} vs {pv}");
        assert!((v.value - pv).abs() < 2.0 * v.std_error + 2e-3, "{v:?} vs {pv}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linking_number_is_rotation_invariant(ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in 0.0f64..6.28) {
        let (a, b) = shapes::hopf::<f64>(96);
        let lk0 = linking_number(&a, &b, &q()).unwrap().value;
        let lk = linking_number(&rigid(&a, [ax, ay, az], angle, [0.3, 0.0, -1.0]), &rigid(&b, [ax, ay, az], angle, [0.3, 0.0, -1.0]), &q()).unwrap().value;
        prop_assert!((lk - lk0).abs() < 1e-9);
    }

    #[test]
    fn crossing_oracle_agrees_with_gauss_sum(shift in 0.6f64..1.4, tilt in -0.4f64..0.4) {
        let a = shapes::circle::<f64>(128, 1.0, [0.0; 3]);
        let b = shapes::parametric::<f64>(128, |t| [shift + t.cos(), tilt * t.cos(), -t.sin()]);
        let lk = linking_number(&a, &b, &q()).unwrap().value;
        let oracle = crossing_projection_lk(&a, &b).unwrap() as f64;
        prop_assert!((lk - oracle).abs() < 1e-6);
    }
}
