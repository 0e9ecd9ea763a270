//! One long integration per seed, cut into closed knots at each rung.

use crate::confint::{count_crossings, CrossingCount, CrossingIndex, Projection};
use crate::curves::{close_orbit, OpenOrbit, PolyCurve, ShortPathSystem};
use crate::fields::{max_speed, orbit_steps, FieldError, VectorField};
use crate::vec3::Vec3;

use super::AsymptoticError;

pub(crate) struct OrbitSteps {
    pts: Vec<Vec3<f64>>,
    dt: f64,
}

/// Projection attempts per pair before the configuration counts as
/// degenerate and T is jittered.
const PROJECTION_TRIES: u64 = 16;

impl OrbitSteps {
    pub fn new(x: &VectorField<f64>, x0: Vec3<f64>, steps: usize, dt: f64) -> Result<Self, FieldError> {
        Ok(OrbitSteps { pts: orbit_steps(x, x0, steps, dt)?, dt })
    }

    /// Open orbit up to step `k`, keeping every `stride`-th sample. None
    /// when the orbit does not move.
    pub fn open(&self, k: usize, stride: usize) -> Option<OpenOrbit<f64>> {
        let k = k.min(self.pts.len() - 1);
        let mut pts: Vec<Vec3<f64>> = Vec::with_capacity(k / stride + 2);
        for (i, p) in self.pts[..=k].iter().enumerate() {
            if (i % stride == 0 || i == k) && pts.last() != Some(p) {
                pts.push(*p);
            }
        }
        let curve = PolyCurve::open(pts).ok()?;
        Some(OpenOrbit { curve, t: k as f64 * self.dt, dt: self.dt })
    }

    /// Orbit up to step `k` closed by `sp`. None for orbits too short to
    /// form a polygon, which are treated as points.
    pub fn closed(&self, k: usize, stride: usize, sp: &ShortPathSystem) -> Option<PolyCurve<f64>> {
        let o = self.open(k, stride)?;
        close_orbit(&o, sp).ok().map(|k| k.closed_curve)
    }
}

/// Sample stride giving a spacing near 1% of the domain diameter.
pub(crate) fn stride_for(x: &VectorField<f64>, dt: f64, seed: u64) -> usize {
    let v = max_speed(x, 2000, seed);
    if v <= 0.0 {
        return 1;
    }
    ((0.01 * x.diameter() / (v * dt)).floor() as usize).max(1)
}

/// Largest divisor of the gcd of the rung step counts not above the stride
/// from [`stride_for`], so that every rung ends on a sample.
pub(crate) fn ladder_stride(x: &VectorField<f64>, dt: f64, steps: &[usize], seed: u64) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = steps.iter().fold(0, |g, &k| gcd(g, k)).max(1);
    let target = stride_for(x, dt, seed);
    (1..=target.min(g)).rev().find(|d| g % d == 0).unwrap_or(1)
}

/// Crossings of the closed orbits of `a` and `b` at step `k` in a random
/// projection. If no generic projection is found, k is moved by ±1 step.
/// Returns the counts and whether k was moved.
pub(crate) fn pair_crossings(
    a: &OrbitSteps,
    b: &OrbitSteps,
    k: usize,
    stride: usize,
    sp: &ShortPathSystem,
    proj_seed: u64,
) -> Result<(CrossingCount, bool), AsymptoticError> {
    for (jitter, kk) in [(false, Some(k)), (true, Some(k + 1)), (true, k.checked_sub(1))] {
        let Some(kk) = kk else { continue };
        let (Some(ca), Some(cb)) = (a.closed(kk, stride, sp), b.closed(kk, stride, sp)) else {
            return Ok((CrossingCount::default(), false));
        };
        let scale = ca.diameter().max(cb.diameter()).max(1e-300);
        for attempt in 0..PROJECTION_TRIES {
            let pr = Projection::random(proj_seed, attempt);
            if let Some(c) = count_crossings(&ca, &cb, &pr, 1e-10 * scale) {
                return Ok((c, jitter));
            }
        }
    }
    Err(AsymptoticError::Intersecting(k as f64 * a.dt))
}

/// Crossing counts of the closed orbits at every rung. When the rungs fall
/// on the sampling grid, one search between the full open orbits serves all
/// rungs: prefixes keep the crossings with both segment indices in range and
/// only the short closing arcs are searched per rung. Otherwise each rung is
/// counted separately.
pub(crate) fn ladder_crossings(
    a: &OrbitSteps,
    b: &OrbitSteps,
    steps: &[usize],
    stride: usize,
    sp: &ShortPathSystem,
    proj_seed: u64,
) -> Result<(Vec<CrossingCount>, bool), AsymptoticError> {
    if let Some(c) = prefix_crossings(a, b, steps, stride, sp, proj_seed) {
        return Ok((c, false));
    }
    let mut out = Vec::with_capacity(steps.len());
    let mut moved = false;
    for &k in steps {
        let (c, jit) = pair_crossings(a, b, k, stride, sp, proj_seed)?;
        out.push(c);
        moved |= jit;
    }
    Ok((out, moved))
}

impl OrbitSteps {
    /// Every `stride`-th sample up to the last multiple of the stride.
    fn sampled(&self, stride: usize) -> Option<PolyCurve<f64>> {
        PolyCurve::open(self.pts.iter().step_by(stride).copied().collect()).ok()
    }

    fn closure(&self, k: usize, sp: &ShortPathSystem) -> Option<PolyCurve<f64>> {
        let mut corners = sp.corners(self.pts[k], self.pts[0]);
        corners.dedup();
        PolyCurve::open(corners).ok()
    }
}

fn prefix_crossings(
    a: &OrbitSteps,
    b: &OrbitSteps,
    steps: &[usize],
    stride: usize,
    sp: &ShortPathSystem,
    proj_seed: u64,
) -> Option<Vec<CrossingCount>> {
    let len = a.pts.len().min(b.pts.len());
    if steps.iter().any(|&k| k % stride != 0 || k == 0 || k >= len) {
        return None;
    }
    let (fa, fb) = (a.sampled(stride)?, b.sampled(stride)?);
    let scale = fa.diameter().max(fb.diameter()).max(1e-300);
    let tol = 1e-10 * scale;
    let mut closures = Vec::with_capacity(steps.len());
    for &k in steps {
        closures.push((a.closure(k, sp), b.closure(k, sp)));
    }
    'attempt: for attempt in 0..PROJECTION_TRIES {
        let pr = Projection::random(proj_seed, attempt);
        let (ia, ib) = (CrossingIndex::new(&fa, &pr, tol), CrossingIndex::new(&fb, &pr, tol));
        let Some(body) = ib.events(&fa) else { continue };
        let mut out = Vec::with_capacity(steps.len());
        for (&k, (ca, cb)) in steps.iter().zip(&closures) {
            let n = (k / stride) as u32;
            let mut c = CrossingCount::default();
            let mut add = |a_over: bool, sign: i8| {
                c.total += 1;
                if a_over {
                    c.over_signed += sign as i64;
                }
            };
            for e in body.iter().filter(|e| e.i < n && e.j < n) {
                add(e.a_over, e.sign);
            }
            if let Some(ca) = ca {
                let Some(ev) = ib.events(ca) else { continue 'attempt };
                ev.iter().filter(|e| e.j < n).for_each(|e| add(e.a_over, e.sign));
            }
            if let Some(cb) = cb {
                let Some(ev) = ia.events(cb) else { continue 'attempt };
                ev.iter().filter(|e| e.j < n).for_each(|e| add(!e.a_over, e.sign));
                if let Some(ca) = ca {
                    let Some(ev) = CrossingIndex::new(cb, &pr, tol).events(ca) else { continue 'attempt };
                    ev.iter().for_each(|e| add(e.a_over, e.sign));
                }
            }
            out.push(c);
        }
        return Some(out);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::seed_sampler;

    #[test]
    fn prefix_counts_match_per_rung_counts() {
        let cases = [
            (VectorField::tube_pair(1.0, 0.4).unwrap(), ShortPathSystem::Straight),
            (VectorField::beltrami_ball(1.0).unwrap(), ShortPathSystem::Dogleg { waypoint: [0.1, -0.2, 0.3] }),
        ];
        for (x, sp) in cases {
            let steps = [500, 1000, 2000];
            let mut checked = 0;
            for p in 0..8u64 {
                let s = seed_sampler(&x.domain, 2, 40 + p);
                let a = OrbitSteps::new(&x, s[0], 2001, 0.01).unwrap();
                let b = OrbitSteps::new(&x, s[1], 2001, 0.01).unwrap();
                // Orbits stalled near a tube wall repeat samples and take the
                // per-rung path instead.
                let Some(fast) = prefix_crossings(&a, &b, &steps, 5, &sp, p) else { continue };
                checked += 1;
                for (r, &k) in steps.iter().enumerate() {
                    let (slow, _) = pair_crossings(&a, &b, k, 5, &sp, p).unwrap();
                    assert_eq!(fast[r].over_signed, slow.over_signed);
                    assert_eq!(fast[r].total, slow.total);
                }
            }
            assert!(checked >= 4);
        }
    }
}
