//! Standard test curves.

use std::f64::consts::PI;

use super::PolyCurve;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Closed curve sampled at `n` equally spaced parameter values in [0, 2π).
pub fn parametric<S: Scalar>(n: usize, f: impl Fn(f64) -> [f64; 3]) -> PolyCurve<S> {
    let pts = (0..n).map(|i| Vec3::from_f64(f(2.0 * PI * i as f64 / n as f64))).collect();
    PolyCurve::closed(pts).expect("parametrization is injective at sample points")
}

/// Circle of radius `r` about `center` in the xy-plane, counterclockwise.
pub fn circle<S: Scalar>(n: usize, r: f64, center: [f64; 3]) -> PolyCurve<S> {
    parametric(n, |t| [center[0] + r * t.cos(), center[1] + r * t.sin(), center[2]])
}

/// Unit circle in the xy-plane and unit circle in the xz-plane through the
/// origin, oriented so the linking number is +1.
pub fn hopf<S: Scalar>(n: usize) -> (PolyCurve<S>, PolyCurve<S>) {
    (circle(n, 1.0, [0.0; 3]), parametric(n, |t| [1.0 + t.cos(), 0.0, -t.sin()]))
}

/// Two coaxial unit circles at heights 0 and 10.
pub fn split_link<S: Scalar>(n: usize) -> (PolyCurve<S>, PolyCurve<S>) {
    (circle(n, 1.0, [0.0; 3]), circle(n, 1.0, [0.0, 0.0, 10.0]))
}

/// (2,4) torus link: two parallel curves on the torus with radii 2 and 1,
/// each going once along the core and twice around the tube, half a
/// meridian turn apart. The tube winding is chosen so the linking number
/// is +2.
pub fn torus_link_2_4<S: Scalar>(n: usize) -> (PolyCurve<S>, PolyCurve<S>) {
    let comp = |phase: f64| {
        move |t: f64| {
            let u = t;
            let v = phase - 2.0 * t;
            let rho = 2.0 + v.cos();
            [rho * u.cos(), rho * u.sin(), v.sin()]
        }
    };
    (parametric(n, comp(0.0)), parametric(n, comp(PI)))
}

/// Trefoil (sin t + 2 sin 2t, cos t − 2 cos 2t, −sin 3t).
pub fn trefoil<S: Scalar>(n: usize) -> PolyCurve<S> {
    parametric(n, trefoil_point)
}

pub fn trefoil_point(t: f64) -> [f64; 3] {
    [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()]
}

/// Figure-eight knot ((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t).
pub fn figure_eight<S: Scalar>(n: usize) -> PolyCurve<S> {
    parametric(n, |t| {
        let r = 2.0 + (2.0 * t).cos();
        [r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin()]
    })
}

/// Round unit circle.
pub fn unknot<S: Scalar>(n: usize) -> PolyCurve<S> {
    circle(n, 1.0, [0.0; 3])
}

/// Unknot with a non-planar wobble, for invariance checks.
pub fn wobbly_unknot<S: Scalar>(n: usize, amp: f64) -> PolyCurve<S> {
    parametric(n, |t| {
        let r = 1.0 + 0.3 * amp * (3.0 * t).cos();
        [r * t.cos(), r * t.sin(), amp * (2.0 * t).sin()]
    })
}

/// Connected sum of two trefoils: two scaled copies side by side along x, each
/// cut open at the point facing the other and joined by two short bridges.
pub fn granny<S: Scalar>(n: usize) -> PolyCurve<S> {
    let half = n / 2;
    let copy = |t: f64, shift: f64| {
        let p = trefoil_point(t);
        [p[0] / 3.2 + shift, p[1] / 3.2, p[2] / 3.2]
    };
    let mut pts = Vec::with_capacity(2 * half);
    for (start, shift) in [(extreme_param(1.0), -1.3), (extreme_param(-1.0), 1.3)] {
        for i in 0..half {
            let t = start + 2.0 * PI * (i as f64 + 0.5) / half as f64;
            pts.push(Vec3::from_f64(copy(t, shift)));
        }
    }
    PolyCurve::closed(pts).expect("granny samples are distinct")
}

/// Parameter of the trefoil point with extreme x in direction `dir`.
fn extreme_param(dir: f64) -> f64 {
    let m = 20000;
    (0..m)
        .map(|i| 2.0 * PI * i as f64 / m as f64)
        .max_by(|a, b| (dir * trefoil_point(*a)[0]).total_cmp(&(dir * trefoil_point(*b)[0])))
        .unwrap()
}
