use std::f64::consts::PI;

use crate::rng;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

use super::diffeo::VolumeDiffeo;

/// Compact region carrying a vector field.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain<S> {
    Ball { center: Vec3<S>, radius: S },
    /// Solid torus around the z axis.
    SolidTorus { major: S, minor: S },
    /// Two disjoint solid tubes of radius `radius` around the unit circle C1
    /// in the xy plane and the circle C2(t) = (1 + cos t, 0, −sin t).
    TubePair { radius: S },
    /// g(inner) for a volume-preserving g.
    Image { inner: Box<Domain<S>>, map: VolumeDiffeo<S> },
}

/// (distance to the core, distance from the core's axis) for the tube
/// around C1.
#[inline]
pub(crate) fn tube1_coords<S: Scalar>(p: Vec3<S>) -> (S, S) {
    let rho = p.x.hypot(p.y);
    ((rho - S::one()).hypot(p.z), rho)
}

/// Same for C2, whose axis is the line through (1, 0, 0) parallel to y.
#[inline]
pub(crate) fn tube2_coords<S: Scalar>(p: Vec3<S>) -> (S, S) {
    let qx = p.x - S::one();
    let rho = qx.hypot(p.z);
    ((rho - S::one()).hypot(p.y), rho)
}

impl<S: Scalar> Domain<S> {
    pub fn ball(center: Vec3<S>, radius: S) -> Self {
        Domain::Ball { center, radius }
    }

    /// Solid torus with major radius 2 and minor radius 1.
    pub fn solid_torus() -> Self {
        Domain::SolidTorus { major: S::of(2.0), minor: S::one() }
    }

    pub fn tube_pair(radius: S) -> Self {
        Domain::TubePair { radius }
    }

    pub fn image(self, map: VolumeDiffeo<S>) -> Self {
        match map {
            VolumeDiffeo::Identity => self,
            map => Domain::Image { inner: Box::new(self), map },
        }
    }

    pub fn volume(&self) -> S {
        let pi = S::PI();
        match self {
            Domain::Ball { radius, .. } => S::of(4.0 / 3.0) * pi * radius.powi(3),
            Domain::SolidTorus { major, minor } => S::of(2.0) * pi * pi * *major * *minor * *minor,
            Domain::TubePair { radius } => S::of(4.0) * pi * pi * *radius * *radius,
            Domain::Image { inner, .. } => inner.volume(),
        }
    }

    /// Signed level function: ≤ 0 inside, and close to the distance to the
    /// boundary near it.
    pub fn level(&self, p: Vec3<S>) -> S {
        match self {
            Domain::Ball { center, radius } => p.dist(*center) - *radius,
            Domain::SolidTorus { major, minor } => (p.x.hypot(p.y) - *major).hypot(p.z) - *minor,
            Domain::TubePair { radius } => tube1_coords(p).0.min(tube2_coords(p).0) - *radius,
            Domain::Image { inner, map } => inner.level(map.inverse(p)),
        }
    }

    pub fn contains(&self, p: Vec3<S>, tol: S) -> bool {
        self.level(p) <= tol
    }

    pub fn bounding_box(&self) -> (Vec3<S>, Vec3<S>) {
        match self {
            Domain::Ball { center, radius } => {
                let r = Vec3::new(*radius, *radius, *radius);
                (*center - r, *center + r)
            }
            Domain::SolidTorus { major, minor } => {
                let a = *major + *minor;
                (Vec3::new(-a, -a, -*minor), Vec3::new(a, a, *minor))
            }
            Domain::TubePair { radius } => {
                let o = S::one() + *radius;
                (Vec3::new(-o, -o, -o), Vec3::new(S::one() + o, o, o))
            }
            Domain::Image { inner, map } => {
                let (lo, hi) = inner.bounding_box();
                map.image_box(lo, hi)
            }
        }
    }

    /// Diameter of the bounding box (an upper bound for the true diameter).
    pub fn diameter(&self) -> S {
        let (lo, hi) = self.bounding_box();
        lo.dist(hi)
    }

    /// Boundary points with outward unit normals, deterministic in `seed`.
    pub fn boundary_samples(&self, n: usize, seed: u64) -> Vec<(Vec3<S>, Vec3<S>)> {
        let mut r = rng::stream(seed, 0);
        (0..n).map(|_| self.boundary_point(&mut r)).collect()
    }

    fn boundary_point(&self, r: &mut rng::Stream) -> (Vec3<S>, Vec3<S>) {
        let ang = |r: &mut rng::Stream| S::of(2.0 * PI * rng::uniform(r));
        match self {
            Domain::Ball { center, radius } => {
                let u: Vec3<S> = rng::unit_vector(r);
                (*center + u * *radius, u)
            }
            Domain::SolidTorus { major, minor } => {
                let (u, v) = (ang(r), ang(r));
                let n = Vec3::new(v.cos() * u.cos(), v.cos() * u.sin(), v.sin());
                let core = Vec3::new(*major * u.cos(), *major * u.sin(), S::zero());
                (core + n * *minor, n)
            }
            Domain::TubePair { radius } => {
                let (u, v) = (ang(r), ang(r));
                if rng::uniform(r) < 0.5 {
                    let n = Vec3::new(v.cos() * u.cos(), v.cos() * u.sin(), v.sin());
                    (Vec3::new(u.cos(), u.sin(), S::zero()) + n * *radius, n)
                } else {
                    // C2 lies in the xz plane around (1, 0, 0); its binormal is ±y.
                    let radial = Vec3::new(u.cos(), S::zero(), -u.sin());
                    let n = radial * v.cos() + Vec3::new(S::zero(), v.sin(), S::zero());
                    (Vec3::new(S::one(), S::zero(), S::zero()) + radial + n * *radius, n)
                }
            }
            Domain::Image { inner, map } => {
                let (p, n) = inner.boundary_point(r);
                (map.forward(p), map.push_normal(p, n))
            }
        }
    }
}
