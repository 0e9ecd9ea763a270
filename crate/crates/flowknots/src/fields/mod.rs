//! Divergence-free vector fields on compact domains, their flows, energies
//! and pushforwards by volume-preserving maps.

mod beltrami;
mod config;
mod diffeo;
mod domain;

use rayon::prelude::*;
use thiserror::Error;

use crate::confint::{IntegralEstimate, Method};
use crate::curves::{OpenOrbit, PolyCurve};
use crate::rng;
use crate::scalar::Scalar;
use crate::stats::Accum;
use crate::vec3::{Mat3, Vec3};

pub use beltrami::first_j1_zero;
pub use config::{parse_field_config, read_field_config, ConfigError, DiffeoSpec, FieldConfig, FieldSpec};
pub use diffeo::VolumeDiffeo;
pub use domain::Domain;

use domain::{tube1_coords, tube2_coords};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FieldError {
    #[error("point {0:?} lies outside the domain")]
    OutsideDomain([f64; 3]),
    #[error("orbit left the domain at t = {t} (overshoot {overshoot:e})")]
    Escaped { t: f64, overshoot: f64 },
    #[error("orbit is stationary")]
    Stagnant,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid diffeomorphism: {0}")]
    InvalidDiffeo(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind<S> {
    /// (−y, x, 0).
    RigidRotation,
    /// Circulation v0 (1 − (s/r)²)² along each core of a tube pair, s being
    /// the distance to the core.
    TubePair { v0: S, r: S },
    /// Eigenfield curl X = λX with |X(0)| = 1.
    BeltramiBall { lambda: S, amplitude: S },
    Pushforward { inner: Box<VectorField<S>>, map: VolumeDiffeo<S> },
    /// Test fixture, not tangent to the boundary in general.
    Constant(Vec3<S>),
    /// Test fixture: inner field plus rate·p, with divergence 3·rate.
    Expanding { inner: Box<VectorField<S>>, rate: S },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<S> {
    pub kind: FieldKind<S>,
    pub domain: Domain<S>,
}

impl<S: Scalar> VectorField<S> {
    /// Field A: rigid rotation on the (2, 1) solid torus.
    pub fn rigid_rotation() -> Self {
        VectorField { kind: FieldKind::RigidRotation, domain: Domain::solid_torus() }
    }

    /// Field B: linked flux tubes.
    pub fn tube_pair(v0: S, r: S) -> Result<Self, FieldError> {
        if !(r > S::zero() && r <= S::of(0.4)) {
            return Err(FieldError::InvalidParameter(format!("tube radius must lie in (0, 0.4], got {r}")));
        }
        if !v0.is_finite() {
            return Err(FieldError::InvalidParameter("v0 must be finite".into()));
        }
        Ok(VectorField { kind: FieldKind::TubePair { v0, r }, domain: Domain::tube_pair(r) })
    }

    /// Field C: Beltrami field in the ball of the given radius about the
    /// origin, normalized to unit speed at the centre.
    pub fn beltrami_ball(radius: S) -> Result<Self, FieldError> {
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(FieldError::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        let lambda = S::of(first_j1_zero()) / radius;
        let amplitude = S::of(1.5) / lambda;
        Ok(VectorField {
            kind: FieldKind::BeltramiBall { lambda, amplitude },
            domain: Domain::ball(Vec3::zero(), radius),
        })
    }

    pub fn constant(v: Vec3<S>, domain: Domain<S>) -> Self {
        VectorField { kind: FieldKind::Constant(v), domain }
    }

    pub fn zero(domain: Domain<S>) -> Self {
        Self::constant(Vec3::zero(), domain)
    }

    pub fn expanding(self, rate: S) -> Self {
        let domain = self.domain.clone();
        VectorField { kind: FieldKind::Expanding { inner: Box::new(self), rate }, domain }
    }

    /// Eigenvalue λ for Beltrami fields (also through pushforwards).
    pub fn beltrami_eigenvalue(&self) -> Option<S> {
        match &self.kind {
            FieldKind::BeltramiBall { lambda, .. } => Some(*lambda),
            FieldKind::Pushforward { inner, .. } => inner.beltrami_eigenvalue(),
            _ => None,
        }
    }

    /// The field at `p`. Defined on all of R³; outside the domain the
    /// analytic expression is simply continued (zero for the tube pair).
    pub fn eval(&self, p: Vec3<S>) -> Vec3<S> {
        match &self.kind {
            FieldKind::RigidRotation => Vec3::new(-p.y, p.x, S::zero()),
            FieldKind::TubePair { v0, r } => {
                let profile = |s: S| {
                    let u = s / *r;
                    let w = S::one() - u * u;
                    *v0 * w * w
                };
                let (s1, rho1) = tube1_coords(p);
                if s1 < *r {
                    return Vec3::new(-p.y, p.x, S::zero()) * (profile(s1) / rho1);
                }
                let (s2, rho2) = tube2_coords(p);
                if s2 < *r {
                    let qx = p.x - S::one();
                    return Vec3::new(p.z, S::zero(), -qx) * (profile(s2) / rho2);
                }
                Vec3::zero()
            }
            FieldKind::BeltramiBall { lambda, amplitude } => beltrami::spheromak(p, *lambda, *amplitude),
            FieldKind::Pushforward { inner, map } => {
                let q = map.inverse(p);
                map.jacobian(q).apply(inner.eval(q))
            }
            FieldKind::Constant(v) => *v,
            FieldKind::Expanding { inner, rate } => inner.eval(p) + p * *rate,
        }
    }

    pub fn diameter(&self) -> S {
        self.domain.diameter()
    }
}

/// g_*X, living on g(S).
pub fn pushforward<S: Scalar>(x: &VectorField<S>, g: &VolumeDiffeo<S>) -> VectorField<S> {
    if *g == VolumeDiffeo::Identity {
        return x.clone();
    }
    VectorField {
        kind: FieldKind::Pushforward { inner: Box::new(x.clone()), map: g.clone() },
        domain: x.domain.clone().image(g.clone()),
    }
}

fn check_inside<S: Scalar>(x: &VectorField<S>, p: Vec3<S>) -> Result<(), FieldError> {
    if x.domain.contains(p, S::zero()) {
        Ok(())
    } else {
        Err(FieldError::OutsideDomain(p.to_f64()))
    }
}

fn jacobian_raw<S: Scalar>(x: &VectorField<S>, p: Vec3<S>, h: S) -> Mat3<S> {
    let mut m = Mat3::identity();
    let two_h = h + h;
    for j in 0..3 {
        let e = Vec3::<S>::axis(j) * h;
        let d = (x.eval(p + e) - x.eval(p - e)) / two_h;
        for i in 0..3 {
            m.m[i][j] = d.get(i);
        }
    }
    m
}

/// Central-difference Jacobian ∂X_i/∂x_j. The whole stencil must lie in the
/// domain.
pub fn jacobian_fd<S: Scalar>(x: &VectorField<S>, p: Vec3<S>, h: S) -> Result<Mat3<S>, FieldError> {
    for j in 0..3 {
        let e = Vec3::<S>::axis(j) * h;
        check_inside(x, p + e)?;
        check_inside(x, p - e)?;
    }
    Ok(jacobian_raw(x, p, h))
}

pub fn divergence<S: Scalar>(x: &VectorField<S>, p: Vec3<S>, h: S) -> Result<S, FieldError> {
    Ok(jacobian_fd(x, p, h)?.trace())
}

pub fn curl<S: Scalar>(x: &VectorField<S>, p: Vec3<S>, h: S) -> Result<Vec3<S>, FieldError> {
    let m = jacobian_fd(x, p, h)?.m;
    Ok(Vec3::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]))
}

#[inline]
fn rk4_step<S: Scalar>(x: &VectorField<S>, p: Vec3<S>, h: S) -> Vec3<S> {
    let half = h * S::of(0.5);
    let k1 = x.eval(p);
    let k2 = x.eval(p + k1 * half);
    let k3 = x.eval(p + k2 * half);
    let k4 = x.eval(p + k3 * h);
    p + (k1 + (k2 + k3) * S::of(2.0) + k4) * (h / S::of(6.0))
}

/// Integrates from `x0` for time `t` with fixed RK4 steps, calling `visit`
/// with (step index, time, point) after every step. The last step is
/// shortened so the orbit ends exactly at `t`.
fn integrate<S: Scalar>(
    x: &VectorField<S>,
    x0: Vec3<S>,
    t: f64,
    dt: f64,
    mut visit: impl FnMut(usize, Vec3<S>),
) -> Result<Vec3<S>, FieldError> {
    if !(dt > 0.0) || !(t >= 0.0) || !t.is_finite() {
        return Err(FieldError::InvalidParameter(format!("need dt > 0 and finite T ≥ 0, got dt = {dt}, T = {t}")));
    }
    check_inside(x, x0)?;
    let tol = S::of(1e-6) * x.diameter();
    let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
    let mut p = x0;
    for k in 0..steps {
        let h = if k + 1 == steps { t - dt * k as f64 } else { dt };
        p = rk4_step(x, p, S::of(h));
        let over = x.domain.level(p);
        if !(over <= tol) {
            return Err(FieldError::Escaped { t: dt * k as f64 + h, overshoot: over.as_f64() });
        }
        visit(k + 1, p);
    }
    Ok(p)
}

/// φ_t(x0).
pub fn flow<S: Scalar>(x: &VectorField<S>, x0: Vec3<S>, t: f64, dt: f64) -> Result<Vec3<S>, FieldError> {
    integrate(x, x0, t, dt, |_, _| {})
}

/// Every RK4 step from `x0` up to `steps · dt`, starting with `x0` itself.
pub fn orbit_steps<S: Scalar>(x: &VectorField<S>, x0: Vec3<S>, steps: usize, dt: f64) -> Result<Vec<Vec3<S>>, FieldError> {
    let mut pts = Vec::with_capacity(steps + 1);
    pts.push(x0);
    integrate(x, x0, dt * steps as f64, dt, |_, p| pts.push(p))?;
    Ok(pts)
}

/// Orbit segment of length `t` through `x0`, sampled at every step.
pub fn integrate_orbit<S: Scalar>(x: &VectorField<S>, x0: Vec3<S>, t: f64, dt: f64) -> Result<OpenOrbit<S>, FieldError> {
    integrate_orbit_strided(x, x0, t, dt, 1)
}

/// As [`integrate_orbit`] but keeping every `stride`-th step (and the
/// endpoint). Points that repeat the previous sample are dropped.
pub fn integrate_orbit_strided<S: Scalar>(
    x: &VectorField<S>,
    x0: Vec3<S>,
    t: f64,
    dt: f64,
    stride: usize,
) -> Result<OpenOrbit<S>, FieldError> {
    let stride = stride.max(1);
    let mut pts = vec![x0];
    let end = integrate(x, x0, t, dt, |k, p| {
        if k % stride == 0 && pts.last() != Some(&p) {
            pts.push(p);
        }
    })?;
    if pts.last() != Some(&end) {
        pts.push(end);
    }
    let curve = PolyCurve::open(pts).map_err(|_| FieldError::Stagnant)?;
    Ok(OpenOrbit { curve, t, dt })
}

/// |det(∂φ_T/∂x) − 1| at `x0`, with the flow Jacobian from central
/// differences of step 1e-5.
pub fn volume_preservation_check<S: Scalar>(x: &VectorField<S>, x0: Vec3<S>, t: f64, dt: f64) -> Result<S, FieldError> {
    let h = S::of(1e-5);
    let mut cols = [Vec3::zero(); 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let e = Vec3::<S>::axis(j) * h;
        let a = flow(x, x0 + e, t, dt)?;
        let b = flow(x, x0 - e, t, dt)?;
        *col = (a - b) / (h + h);
    }
    Ok((Mat3::from_cols(cols[0], cols[1], cols[2]).det() - S::one()).abs())
}

const SAMPLER_TAG: u64 = 0x5eed;
const ENERGY_TAG: u64 = 0xe4e7;
const ENERGY_BLOCK: usize = 1 << 16;

pub(crate) fn draw_inside<S: Scalar>(d: &Domain<S>, lo: Vec3<S>, hi: Vec3<S>, r: &mut rng::Stream, attempts: &mut u64) -> Vec3<S> {
    loop {
        *attempts += 1;
        let p = rng::in_box(r, lo, hi);
        if d.contains(p, S::zero()) {
            return p;
        }
    }
}

/// `n` i.i.d. uniform points in the domain by rejection from its bounding
/// box, with the number of box draws used.
pub fn seed_sampler_counted<S: Scalar>(d: &Domain<S>, n: usize, seed: u64) -> (Vec<Vec3<S>>, u64) {
    let (lo, hi) = d.bounding_box();
    let mut r = rng::stream(rng::subseed(seed, SAMPLER_TAG), 0);
    let mut attempts = 0;
    let pts = (0..n).map(|_| draw_inside(d, lo, hi, &mut r, &mut attempts)).collect();
    (pts, attempts)
}

pub fn seed_sampler<S: Scalar>(d: &Domain<S>, n: usize, seed: u64) -> Vec<Vec3<S>> {
    seed_sampler_counted(d, n, seed).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyExponent {
    Two,
    ThreeHalves,
}

impl EnergyExponent {
    pub fn value(self) -> f64 {
        match self {
            EnergyExponent::Two => 2.0,
            EnergyExponent::ThreeHalves => 1.5,
        }
    }
}

/// Monte Carlo ∫_S |X|^p dμ over `mc` uniform samples.
pub fn energy<S: Scalar>(x: &VectorField<S>, exponent: EnergyExponent, mc: usize, seed: u64) -> IntegralEstimate {
    let d = &x.domain;
    let (lo, hi) = d.bounding_box();
    let base = rng::subseed(seed, ENERGY_TAG);
    let blocks = mc.div_ceil(ENERGY_BLOCK);
    let parts: Vec<(Accum, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(base, b as u64);
            let count = ENERGY_BLOCK.min(mc - b * ENERGY_BLOCK);
            let mut acc = Accum::default();
            let mut attempts = 0;
            for _ in 0..count {
                let p = draw_inside(d, lo, hi, &mut r, &mut attempts);
                let s = x.eval(p).norm().as_f64();
                acc.push(match exponent {
                    EnergyExponent::Two => s * s,
                    EnergyExponent::ThreeHalves => s * s.sqrt(),
                });
            }
            (acc, attempts - count as u64)
        })
        .collect();
    let (acc, rejections) = parts.into_iter().fold((Accum::default(), 0), |(a, r), (b, s)| (a.merge(b), r + s));
    let vol = d.volume().as_f64();
    IntegralEstimate {
        value: vol * acc.mean(),
        std_error: vol * acc.std_error(),
        samples: acc.n,
        rejections,
        method: Method::MonteCarlo,
        warning: None,
    }
}

/// Largest Frobenius norm of ∇X over `samples` uniform points.
pub fn max_gradient<S: Scalar>(x: &VectorField<S>, samples: usize, seed: u64) -> S {
    let h = S::of(1e-6) * x.diameter();
    seed_sampler(&x.domain, samples, seed)
        .into_iter()
        .map(|p| {
            let m = jacobian_raw(x, p, h).m;
            m.iter().flatten().map(|v| *v * *v).sum::<S>().sqrt()
        })
        .fold(S::zero(), |a, b| a.max(b))
}

/// Largest speed over `samples` uniform points.
pub fn max_speed<S: Scalar>(x: &VectorField<S>, samples: usize, seed: u64) -> S {
    seed_sampler(&x.domain, samples, seed).into_iter().map(|p| x.eval(p).norm()).fold(S::zero(), |a, b| a.max(b))
}

/// Step bound 0.1 / max|∇X|, with the maximum estimated from 10⁴ samples.
pub fn dt_max<S: Scalar>(x: &VectorField<S>, seed: u64) -> S {
    let g = max_gradient(x, 10_000, seed);
    if g > S::zero() { S::of(0.1) / g } else { S::infinity() }
}

/// max |X·n| / |X| over boundary samples (0/0 counts as 0).
pub fn tangency_residual<S: Scalar>(x: &VectorField<S>, n: usize, seed: u64) -> S {
    x.domain
        .boundary_samples(n, seed)
        .into_iter()
        .map(|(p, nrm)| {
            let v = x.eval(p);
            let s = v.norm();
            if s > S::zero() { v.dot(nrm).abs() / s } else { S::zero() }
        })
        .fold(S::zero(), |a, b| a.max(b))
}
