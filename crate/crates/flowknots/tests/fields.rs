use std::f64::consts::PI;

use flowknots::confint::{linking_number, QuadratureConfig};
use flowknots::curves::shapes;
use flowknots::fields::*;
use flowknots::{Field, Vec3};
use proptest::prelude::*;

fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
    Vec3::new(x, y, z)
}

fn field_b() -> Field {
    Field::tube_pair(1.0, 0.4).unwrap()
}

fn field_c() -> Field {
    Field::beltrami_ball(1.0).unwrap()
}

fn shipped() -> Vec<Field> {
    vec![
        Field::rigid_rotation(),
        field_b(),
        field_c(),
        pushforward(&field_b(), &VolumeDiffeo::shear_xz(0.2)),
    ]
}

#[test]
fn rigid_rotation_is_divergence_free() {
    let a = Field::rigid_rotation();
    for p in seed_sampler(&a.domain, 200, 1) {
        if let Ok(d) = divergence(&a, p, 1e-4) {
            assert!(d.abs() < 1e-8);
        }
    }
}

#[test]
fn tube_pair_is_divergence_free() {
    let b = field_b();
    let mut checked = 0;
    for p in seed_sampler(&b.domain, 1000, 2) {
        if let Ok(d) = divergence(&b, p, 1e-6) {
            assert!(d.abs() < 1e-6, "{p:?}: {d}");
            checked += 1;
        }
    }
    assert!(checked > 950);
}

#[test]
fn constant_field_has_zero_divergence() {
    let f = VectorField::constant(v(1.0, -2.0, 0.5), Domain::ball(Vec3::zero(), 1.0));
    assert!(divergence(&f, v(0.1, 0.2, 0.3), 1e-3).unwrap().abs() < 1e-12);
}

#[test]
fn divergence_stencil_must_stay_inside() {
    let f = Field::rigid_rotation();
    assert!(matches!(divergence(&f, v(2.9999, 0.0, 0.0), 1e-3), Err(FieldError::OutsideDomain(_))));
}

#[test]
fn shipped_fields_are_solenoidal_at_many_points() {
    for f in shipped() {
        for p in seed_sampler(&f.domain, 10_000, 3) {
            if let Ok(d) = divergence(&f, p, 1e-6) {
                assert!(d.abs() < 1e-6, "{:?} at {p:?}: {d}", f.kind);
            }
        }
    }
}

#[test]
fn shipped_fields_are_tangent_to_the_boundary() {
    for f in shipped() {
        let r = tangency_residual(&f, 10_000, 4);
        assert!(r <= 1e-8, "{:?}: {r}", f.kind);
    }
}

#[test]
fn beltrami_eigenvalue_solves_tan_x_eq_x() {
    let l = first_j1_zero();
    assert!((l.tan() - l).abs() < 1e-9 * l);
    assert!(l > PI && l < 1.5 * PI);
    assert!((l - 4.4934).abs() < 1e-4);
}

#[test]
fn beltrami_field_is_an_eigenfield() {
    let c = field_c();
    let lambda = c.beltrami_eigenvalue().unwrap();
    assert!((c.eval(Vec3::zero()).norm() - 1.0).abs() < 1e-12);
    for p in seed_sampler(&c.domain, 500, 5) {
        if let Ok(w) = curl(&c, p, 1e-5) {
            let x = c.eval(p) * lambda;
            assert!((w - x).norm() < 1e-6, "{p:?}");
        }
    }
}

#[test]
fn tube_cores_are_linked_once_along_the_flow() {
    let (c1, c2) = shapes::hopf::<f64>(512);
    // The hopf shapes are exactly the two tube cores.
    for p in c1.points().iter().chain(c2.points()) {
        assert!(field_b().eval(*p).norm() > 0.999);
    }
    let t1 = field_b().eval(c1.points()[0]);
    let t1c = c1.points()[1] - c1.points()[0];
    let t2 = field_b().eval(c2.points()[0]);
    let t2c = c2.points()[1] - c2.points()[0];
    assert!(t1.dot(t1c) > 0.0 && t2.dot(t2c) > 0.0, "field runs along the core orientation");
    let lk = linking_number(&c1, &c2, &QuadratureConfig::default()).unwrap().value;
    assert!((lk - 1.0).abs() < 1e-2);
}

#[test]
fn rotation_orbit_closes_after_one_period() {
    let a = Field::rigid_rotation();
    let x0 = v(2.5, 0.0, 0.0);
    let full = integrate_orbit(&a, x0, 2.0 * PI, 1e-3).unwrap();
    let end = *full.curve.points().last().unwrap();
    assert!(end.dist(x0) < 1e-8, "{end:?}");
    let half = flow(&a, x0, PI, 1e-3).unwrap();
    assert!(half.dist(v(-2.5, 0.0, 0.0)) < 1e-8);
}

#[test]
fn core_orbit_wraps_at_speed_v0() {
    let b = field_b();
    let t = 50.0;
    let o = integrate_orbit(&b, v(1.0, 0.0, 0.0), t, 1e-2).unwrap();
    let mut angle = 0.0;
    for w in o.curve.points().windows(2) {
        let (a0, a1) = (w[0].y.atan2(w[0].x), w[1].y.atan2(w[1].x));
        let mut d = a1 - a0;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        angle += d;
    }
    let wraps = angle / (2.0 * PI);
    let expected = t * 1.0 / (2.0 * PI);
    assert!((wraps / expected - 1.0).abs() < 1e-3, "{wraps} vs {expected}");
}

#[test]
fn orbit_samples_respect_spacing_bound() {
    let b = field_b();
    let dt = 1e-2;
    let o = integrate_orbit(&b, v(1.1, 0.0, 0.1), 20.0, dt).unwrap();
    let vmax = 1.0;
    for w in o.curve.points().windows(2) {
        assert!(w[0].dist(w[1]) <= vmax * dt * (1.0 + 1e-9));
    }
}

#[test]
fn flow_has_the_group_property() {
    let a = Field::rigid_rotation();
    let x0 = v(2.2, 0.3, 0.4);
    let two = flow(&a, x0, 2.0, 1e-3).unwrap();
    let one = flow(&a, flow(&a, x0, 1.0, 1e-3).unwrap(), 1.0, 1e-3).unwrap();
    assert!(two.dist(one) < 1e-9);
}

#[test]
fn orbit_must_start_inside() {
    let a = Field::rigid_rotation();
    assert!(matches!(integrate_orbit(&a, v(0.0, 0.0, 0.0), 1.0, 1e-2), Err(FieldError::OutsideDomain(_))));
}

#[test]
fn escaping_orbit_is_reported() {
    let f = VectorField::constant(v(1.0, 0.0, 0.0), Domain::ball(Vec3::zero(), 1.0));
    assert!(matches!(integrate_orbit(&f, Vec3::zero(), 3.0, 1e-2), Err(FieldError::Escaped { .. })));
}

#[test]
fn flows_preserve_volume() {
    let a = Field::rigid_rotation();
    assert!(volume_preservation_check(&a, v(2.4, 0.2, 0.3), 10.0, 1e-2).unwrap() < 1e-6);
    let b = field_b();
    assert!(volume_preservation_check(&b, v(1.1, 0.05, 0.1), 10.0, 1e-2).unwrap() < 1e-5);
    let c = field_c();
    assert!(volume_preservation_check(&c, v(0.3, -0.2, 0.1), 10.0, 1e-2).unwrap() < 1e-5);
}

#[test]
fn expanding_fixture_fails_the_volume_check() {
    let f = Field::rigid_rotation().expanding(0.01);
    let dev = volume_preservation_check(&f, v(2.2, 0.0, 0.0), 10.0, 1e-2).unwrap();
    assert!(dev > 1e-3);
    assert!((dev - (0.3f64.exp() - 1.0)).abs() < 1e-4, "{dev}");
}

#[test]
fn identity_pushforward_is_the_same_field() {
    let b = field_b();
    let g = pushforward(&b, &VolumeDiffeo::Identity);
    for p in seed_sampler(&b.domain, 100, 6) {
        assert_eq!(g.eval(p), b.eval(p));
    }
}

#[test]
fn quarter_turn_pushforward_of_rotation_is_itself() {
    let a = Field::rigid_rotation();
    let g = VolumeDiffeo::rotation(v(0.0, 0.0, 1.0), PI / 2.0).unwrap();
    let pa = pushforward(&a, &g);
    for p in seed_sampler(&a.domain, 200, 7) {
        assert!(pa.eval(p).dist(a.eval(p)) < 1e-12);
        assert!(pa.domain.contains(p, 1e-12));
    }
}

#[test]
fn sheared_tube_pair_stays_solenoidal() {
    let s = pushforward(&field_b(), &VolumeDiffeo::shear_xz(0.2));
    let mut checked = 0;
    for p in seed_sampler(&s.domain, 1000, 8) {
        if let Ok(d) = divergence(&s, p, 1e-6) {
            assert!(d.abs() < 1e-5);
            checked += 1;
        }
    }
    assert!(checked > 950);
}

#[test]
fn pushforward_conjugates_the_flow() {
    let b = field_b();
    let g = VolumeDiffeo::shear_xz(0.2);
    let gb = pushforward(&b, &g);
    let x0 = v(0.05, 1.1, 0.1);
    let o = integrate_orbit(&b, x0, 10.0, 1e-2).unwrap();
    let go = integrate_orbit(&gb, g.forward(x0), 10.0, 1e-2).unwrap();
    assert_eq!(o.curve.len(), go.curve.len());
    for (p, q) in o.curve.points().iter().zip(go.curve.points()) {
        assert!(g.forward(*p).dist(*q) < 1e-6);
    }
}

#[test]
fn diffeos_invert_and_preserve_volume() {
    let maps = [
        VolumeDiffeo::Identity,
        VolumeDiffeo::rotation(v(1.0, 2.0, -0.5), 0.9).unwrap(),
        VolumeDiffeo::shear_xz(0.2),
        VolumeDiffeo::shear(1, 0, -0.7, 2.5).unwrap(),
    ];
    for g in &maps {
        for p in [v(0.3, -1.2, 2.0), v(-4.0, 0.1, 0.0), v(1.0, 1.0, 1.0)] {
            assert!(g.forward(g.inverse(p)).dist(p) < 1e-12);
            assert!((g.jacobian(p).det() - 1.0).abs() < 1e-12);
        }
    }
    assert!(VolumeDiffeo::shear(2, 2, 1.0, 1.0).is_err());
}

#[test]
fn rotation_energy_matches_closed_form() {
    let e = energy(&Field::rigid_rotation(), EnergyExponent::Two, 10_000_000, 9);
    let exact = 19.0 * PI * PI;
    assert!((e.value / exact - 1.0).abs() < 1e-2, "{e:?}");
    assert!((e.value - exact).abs() < 4.0 * e.std_error);
}

#[test]
fn rotation_energy_matches_radial_quadrature() {
    // ∫ρ² over the torus as a 2D quadrature in the tube cross-section.
    let n = 2000;
    let mut sum = 0.0;
    for i in 0..n {
        let s = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let th = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            let rho: f64 = 2.0 + s * th.cos();
            sum += rho.powi(3) * s;
        }
    }
    let quad = 2.0 * PI * sum * (1.0 / n as f64) * (2.0 * PI / n as f64);
    assert!((quad / (19.0 * PI * PI) - 1.0).abs() < 1e-6);
}

#[test]
fn zero_field_has_zero_energy() {
    let z = VectorField::zero(Domain::<f64>::solid_torus());
    let e = energy(&z, EnergyExponent::Two, 10_000, 1);
    assert_eq!(e.value, 0.0);
    assert_eq!(e.std_error, 0.0);
}

#[test]
fn tube_energy_self_converges() {
    let b = field_b();
    let a = energy(&b, EnergyExponent::ThreeHalves, 200_000, 10);
    let f = energy(&b, EnergyExponent::ThreeHalves, 2_000_000, 11);
    assert!((a.value - f.value).abs() < 2.0 * a.std_error.hypot(f.std_error), "{a:?} vs {f:?}");
}

#[test]
fn energies_satisfy_hoelder() {
    for f in shipped() {
        let e2 = energy(&f, EnergyExponent::Two, 400_000, 12);
        let e32 = energy(&f, EnergyExponent::ThreeHalves, 400_000, 12);
        let vol = f.domain.volume();
        assert!(e32.value <= vol.powf(0.25) * e2.value.powf(0.75) * (1.0 + 1e-12));
    }
}

#[test]
fn energy_is_deterministic() {
    let b = field_b();
    assert_eq!(energy(&b, EnergyExponent::Two, 300_000, 3), energy(&b, EnergyExponent::Two, 300_000, 3));
}

#[test]
fn ball_samples_are_centred() {
    let pts = seed_sampler(&Domain::ball(Vec3::zero(), 1.0), 1_000_000, 13);
    let n = pts.len() as f64;
    // Each coordinate of a uniform point in the unit ball has variance 1/5.
    let sigma = (0.2 / n).sqrt();
    for i in 0..3 {
        let m = pts.iter().map(|p| p.get(i)).sum::<f64>() / n;
        assert!(m.abs() < 3.0 * sigma, "coordinate {i}: {m}");
    }
    assert!(pts.iter().all(|p| p.norm() <= 1.0));
}

#[test]
fn torus_acceptance_rate_matches_volume_ratio() {
    let d = Domain::<f64>::solid_torus();
    let (pts, attempts) = seed_sampler_counted(&d, 1_000_000, 14);
    let rate = pts.len() as f64 / attempts as f64;
    let exact = 4.0 * PI * PI / (6.0 * 6.0 * 2.0);
    assert!((rate / exact - 1.0).abs() < 1e-2);
}

#[test]
fn sampler_is_deterministic() {
    let d = Domain::<f64>::tube_pair(0.4);
    assert_eq!(seed_sampler(&d, 1000, 15), seed_sampler(&d, 1000, 15));
    assert_ne!(seed_sampler(&d, 1000, 15), seed_sampler(&d, 1000, 16));
}

#[test]
fn dt_max_is_a_tenth_of_the_inverse_gradient() {
    let a = Field::rigid_rotation();
    // ∇X for the rotation has Frobenius norm √2 everywhere.
    assert!((dt_max(&a, 1) - 0.1 / 2f64.sqrt()).abs() < 1e-6);
    let b = dt_max(&field_b(), 1);
    assert!(b > 0.01 && b < 0.05, "{b}");
}

#[test]
fn fields_work_in_single_precision() {
    let b = VectorField::<f32>::tube_pair(1.0, 0.4).unwrap();
    let b64 = field_b();
    let p = Vec3::<f32>::new(1.1, 0.05, 0.1);
    assert!((b.eval(p).cast::<f64>() - b64.eval(p.cast())).norm() < 1e-5);
    let o = integrate_orbit(&b, p, 1.0, 1e-2).unwrap();
    assert!(o.curve.len() > 90);
}

#[test]
fn config_files_parse() {
    let c = parse_field_config("field=tube_pair\nv0=1.0\nr = 0.4 # tube radius\n\n").unwrap();
    assert_eq!(c, FieldConfig { field: FieldSpec::TubePair { v0: 1.0, r: 0.4 }, diffeo: DiffeoSpec::Identity });
    let c = parse_field_config("field=beltrami_ball\nradius=1.0\ndiffeo=shear\namplitude=0.2").unwrap();
    assert_eq!(c.diffeo, DiffeoSpec::Shear { amplitude: 0.2 });
    let f = c.build().unwrap();
    assert!(matches!(f.kind, FieldKind::Pushforward { .. }));
    let c = parse_field_config("field=rotation_torus\ndiffeo=rotation\naxis=1,0,0\nangle=0.5").unwrap();
    assert_eq!(c.diffeo, DiffeoSpec::Rotation { axis: [1.0, 0.0, 0.0], angle: 0.5 });
    assert_eq!(parse_field_config("field=rotation_torus").unwrap().build().unwrap(), Field::rigid_rotation());
}

#[test]
fn config_errors_are_specific() {
    assert!(matches!(parse_field_config("field=tube_pair\ncolour=red"), Err(ConfigError::UnknownKey(k)) if k == "colour"));
    assert!(matches!(parse_field_config("field=rotation_torus\nv0=2"), Err(ConfigError::Inapplicable { .. })));
    assert!(matches!(parse_field_config("field tube_pair"), Err(ConfigError::Syntax { line: 1, .. })));
    assert!(matches!(parse_field_config("v0=1"), Err(ConfigError::Missing(_))));
    assert!(matches!(parse_field_config("field=tube_pair\nr=abc"), Err(ConfigError::BadValue { .. })));
    assert!(matches!(parse_field_config("field=tube_pair\nr=0.9").unwrap().build(), Err(ConfigError::Field(_))));
    assert!(matches!(parse_field_config("field=tube_pair\nr=0.3\nr=0.2"), Err(ConfigError::Syntax { line: 3, .. })));
    let missing = read_field_config(std::path::Path::new("/nonexistent/missing.cfg")).unwrap_err();
    assert!(missing.to_string().starts_with("config not found"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fields_are_tangent_at_random_boundary_points(seed in 0u64..1000, which in 0usize..4) {
        let f = &shipped()[which];
        prop_assert!(tangency_residual(f, 200, seed) <= 1e-8);
    }

    #[test]
    fn hoelder_holds_for_random_tube_speeds(v0 in 0.1f64..3.0, r in 0.1f64..0.4, seed in 0u64..100) {
        let f = Field::tube_pair(v0, r).unwrap();
        let e2 = energy(&f, EnergyExponent::Two, 20_000, seed);
        let e32 = energy(&f, EnergyExponent::ThreeHalves, 20_000, seed);
        prop_assert!(e32.value <= f.domain.volume().powf(0.25) * e2.value.powf(0.75) * (1.0 + 1e-12));
    }

    #[test]
    fn shear_round_trips(a in -1.0f64..1.0, k in 0.1f64..3.0, x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let g = VolumeDiffeo::shear(0, 2, a, k).unwrap();
        let p = v(x, y, z);
        prop_assert!(g.inverse(g.forward(p)).dist(p) < 1e-12);
    }
}
