//! Spherical Bessel functions and the spheromak field in a ball.

use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// (j0(x), j1(x), x·j1'(x) + j1(x)), with series near 0.
fn bessel<S: Scalar>(x: S) -> (S, S, S) {
    if x.abs() < S::of(1e-2) {
        let x2 = x * x;
        let j0 = S::one() - x2 / S::of(6.0) + x2 * x2 / S::of(120.0);
        let j1 = x * (S::one() / S::of(3.0) - x2 / S::of(30.0) + x2 * x2 / S::of(840.0));
        return (j0, j1, x * j0 - j1);
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    // x j1' = x j0 − 2 j1
    (j0, j1, x * j0 - j1)
}

/// First positive zero of j1, i.e. the first root of tan x = x past π.
pub fn first_j1_zero() -> f64 {
    let f = |x: f64| x.sin() - x * x.cos();
    let (mut lo, mut hi) = (std::f64::consts::PI, 1.5 * std::f64::consts::PI - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Spheromak field B = ∇ψ×∇φ + λψ∇φ with ψ = A r j1(λr) sin²θ, which
/// satisfies curl B = λB and is tangent to the sphere where j1(λr) = 0.
pub(crate) fn spheromak<S: Scalar>(p: Vec3<S>, lambda: S, amplitude: S) -> Vec3<S> {
    let r = p.norm();
    let x = lambda * r;
    if r == S::zero() {
        return Vec3::new(S::zero(), S::zero(), S::of(2.0) * amplitude * lambda / S::of(3.0));
    }
    let (_, j1, g) = bessel(x);
    let r2 = r * r;
    // B_r ê_r = 2A j1 cosθ / r · p/r
    let br = S::of(2.0) * amplitude * j1 * p.z / (r2 * r);
    // B_θ ê_θ = −A g / r · (sinθ ê_θ), sinθ ê_θ = (zx, zy, −ρ²)/r²
    let bt = -amplitude * g / (r * r2);
    // B_φ ê_φ = λ A j1 · (sinθ ê_φ), sinθ ê_φ = (−y, x, 0)/r
    let bp = lambda * amplitude * j1 / r;
    let rho2 = p.x * p.x + p.y * p.y;
    Vec3::new(
        br * p.x + bt * p.z * p.x - bp * p.y,
        br * p.y + bt * p.z * p.y + bp * p.x,
        br * p.z - bt * rho2,
    )
}
