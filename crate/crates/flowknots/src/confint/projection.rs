//! Planar projections and crossing counts: the combinatorial oracles for the
//! linking number and the Casson invariant, and a bucketed crossing search
//! for long curves.

use super::gauss::ConfintError;
use crate::curves::PolyCurve;
use crate::rng;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

pub const MAX_PROJECTION_ATTEMPTS: usize = 64;

/// Orthonormal frame (e1, e2, d); the viewer sits at +d.
#[derive(Clone, Copy, Debug)]
pub struct Projection {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub d: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl Projection {
    pub fn new(d: [f64; 3]) -> Self {
        let n = dot(d, d).sqrt();
        let d = [d[0] / n, d[1] / n, d[2] / n];
        let helper = if d[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = cross(helper, d);
        let l = dot(e1, e1).sqrt();
        let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
        let e2 = cross(d, e1);
        Projection { e1, e2, d }
    }

    pub fn random(seed: u64, attempt: u64) -> Self {
        let mut r = rng::stream(seed, attempt);
        let v: Vec3<f64> = rng::unit_vector(&mut r);
        Projection::new(v.to_f64())
    }

    /// Plane coordinates and height of a point.
    #[inline]
    pub fn apply(&self, p: [f64; 3]) -> (f64, f64, f64) {
        (dot(p, self.e1), dot(p, self.e2), dot(p, self.d))
    }
}

/// A crossing between segment `i` of one curve and segment `j` of another
/// (or the same) curve, at fractional positions `i + s`, `j + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub pos_a: f64,
    pub pos_b: f64,
    /// True when the first strand passes over the second.
    pub a_over: bool,
    /// Right-hand-rule sign: positive when (over × under) points at the viewer.
    pub sign: i32,
}

struct Projected {
    xy: Vec<(f64, f64)>,
    h: Vec<f64>,
    dir: Vec<[f64; 3]>,
    closed: bool,
}

impl Projected {
    fn new<S: Scalar>(c: &PolyCurve<S>, pr: &Projection) -> Self {
        let pts: Vec<[f64; 3]> = c.points().iter().map(|p| p.to_f64()).collect();
        let mut xy = Vec::with_capacity(pts.len());
        let mut h = Vec::with_capacity(pts.len());
        for p in &pts {
            let (x, y, z) = pr.apply(*p);
            xy.push((x, y));
            h.push(z);
        }
        let n = pts.len();
        let nseg = c.segment_count();
        let dir = (0..nseg)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
            })
            .collect();
        Projected { xy, h, dir, closed: c.is_closed() }
    }

    fn nseg(&self) -> usize {
        self.dir.len()
    }

    fn seg(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        (self.xy[i], self.xy[(i + 1) % self.xy.len()])
    }

    fn height(&self, i: usize, s: f64) -> f64 {
        let j = (i + 1) % self.h.len();
        self.h[i] + s * (self.h[j] - self.h[i])
    }
}

#[derive(Debug)]
struct NotGeneric;

/// Intersection of two projected segments; Err if the configuration is not
/// generic at tolerance `tol` (relative to the picture size).
fn intersect(p: &Projected, i: usize, q: &Projected, j: usize, pr: &Projection, tol: f64) -> Result<Option<Crossing>, NotGeneric> {
    let ((ax, ay), (bx, by)) = p.seg(i);
    let ((cx, cy), (dx, dy)) = q.seg(j);
    let (rx, ry) = (bx - ax, by - ay);
    let (sx, sy) = (dx - cx, dy - cy);
    let denom = rx * sy - ry * sx;
    let (qx, qy) = (cx - ax, cy - ay);
    let lr = (rx * rx + ry * ry).sqrt();
    let ls = (sx * sx + sy * sy).sqrt();
    if denom.abs() <= 1e-12 * lr * ls {
        // Parallel in projection: generic only if the lines are apart.
        let dist = (qx * ry - qy * rx).abs() / lr.max(f64::MIN_POSITIVE);
        if dist > tol {
            return Ok(None);
        }
        // Collinear: overlapping is degenerate.
        let t0 = (qx * rx + qy * ry) / (lr * lr);
        let t1 = ((dx - ax) * rx + (dy - ay) * ry) / (lr * lr);
        if t0.max(t1) < -1e-9 || t0.min(t1) > 1.0 + 1e-9 {
            return Ok(None);
        }
        return Err(NotGeneric);
    }
    let s = (qx * sy - qy * sx) / denom;
    let t = (qx * ry - qy * rx) / denom;
    let eps_s = tol / lr.max(f64::MIN_POSITIVE);
    let eps_t = tol / ls.max(f64::MIN_POSITIVE);
    if s < -eps_s || s > 1.0 + eps_s || t < -eps_t || t > 1.0 + eps_t {
        return Ok(None);
    }
    if s < eps_s || s > 1.0 - eps_s || t < eps_t || t > 1.0 - eps_t {
        return Err(NotGeneric);
    }
    let ha = p.height(i, s);
    let hb = q.height(j, t);
    if (ha - hb).abs() <= tol {
        return Err(NotGeneric);
    }
    let a_over = ha > hb;
    let (o, u) = if a_over { (p.dir[i], q.dir[j]) } else { (q.dir[j], p.dir[i]) };
    let sign = if dot(cross(o, u), pr.d) > 0.0 { 1 } else { -1 };
    Ok(Some(Crossing { pos_a: i as f64 + s, pos_b: j as f64 + t, a_over, sign }))
}

fn scale<S: Scalar>(curves: &[&PolyCurve<S>]) -> f64 {
    curves.iter().map(|c| c.diameter().as_f64()).fold(0.0, f64::max).max(1e-300)
}

/// All crossings between `a` and `b` under projection `pr`, by brute force.
fn crossings_between(a: &Projected, b: &Projected, pr: &Projection, tol: f64) -> Result<Vec<Crossing>, NotGeneric> {
    let mut out = Vec::new();
    for i in 0..a.nseg() {
        for j in 0..b.nseg() {
            if let Some(c) = intersect(a, i, b, j, pr, tol)? {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Self-crossings of one curve, each reported once with `pos_a < pos_b`.
fn self_crossings(a: &Projected, pr: &Projection, tol: f64) -> Result<Vec<Crossing>, NotGeneric> {
    let n = a.nseg();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if a.closed && i == 0 && j == n - 1 {
                continue;
            }
            if let Some(c) = intersect(a, i, a, j, pr, tol)? {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Linking number as half the signed count of crossings between the two
/// components of a generic projection.
pub fn crossing_projection_lk<S: Scalar>(k1: &PolyCurve<S>, k2: &PolyCurve<S>) -> Result<i64, ConfintError> {
    let tol = 1e-10 * scale(&[k1, k2]);
    for attempt in 0..MAX_PROJECTION_ATTEMPTS {
        let pr = Projection::random(0x51ab, attempt as u64);
        let (a, b) = (Projected::new(k1, &pr), Projected::new(k2, &pr));
        if let Ok(cs) = crossings_between(&a, &b, &pr, tol) {
            let total: i64 = cs.iter().map(|c| c.sign as i64).sum();
            return Ok(total / 2);
        }
    }
    Err(ConfintError::NoGenericProjection(MAX_PROJECTION_ATTEMPTS))
}

/// Casson invariant from a generic knot diagram by the Gauss-diagram formula:
/// count signed pairs of crossings met, from the base point, in the order
/// (first under, second over, first over, second under).
pub fn polyak_viro_v2<S: Scalar>(k: &PolyCurve<S>) -> Result<i64, ConfintError> {
    polyak_viro_v2_based(k, 0.0)
}

/// As [`polyak_viro_v2`] with the base point at fractional vertex position
/// `base`; the result does not depend on it.
pub fn polyak_viro_v2_based<S: Scalar>(k: &PolyCurve<S>, base: f64) -> Result<i64, ConfintError> {
    if !k.is_closed() {
        return Err(ConfintError::NotClosed);
    }
    let tol = 1e-10 * scale(&[k]);
    let n = k.segment_count() as f64;
    for attempt in 0..MAX_PROJECTION_ATTEMPTS {
        let pr = Projection::random(0x9e3779, attempt as u64);
        let p = Projected::new(k, &pr);
        let Ok(cs) = self_crossings(&p, &pr, tol) else { continue };
        if cs.iter().any(|c| (c.pos_a - base).abs() < 1e-9 || (c.pos_b - base).abs() < 1e-9) {
            continue;
        }
        let rel = |x: f64| (x - base).rem_euclid(n);
        let events: Vec<(f64, f64, i32)> = cs
            .iter()
            .map(|c| {
                let (over, under) = if c.a_over { (c.pos_a, c.pos_b) } else { (c.pos_b, c.pos_a) };
                (rel(over), rel(under), c.sign)
            })
            .collect();
        let mut total = 0i64;
        for (i, &(o1, u1, s1)) in events.iter().enumerate() {
            for (j, &(o2, u2, s2)) in events.iter().enumerate() {
                if i != j && u1 < o2 && o2 < o1 && o1 < u2 {
                    total += (s1 * s2) as i64;
                }
            }
        }
        return Ok(total);
    }
    Err(ConfintError::NoGenericProjection(MAX_PROJECTION_ATTEMPTS))
}

/// Crossings between two curves in one projection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossingCount {
    /// Signed count of crossings where the first curve passes over.
    pub over_signed: i64,
    /// All crossings, unsigned.
    pub total: u64,
}

/// Signed count of crossings where `a` passes over `b`; for closed curves in
/// a generic projection this equals their linking number. Returns None if
/// the projection is not generic.
pub fn over_crossing_lk<S: Scalar>(a: &PolyCurve<S>, b: &PolyCurve<S>, pr: &Projection, tol: f64) -> Option<i64> {
    count_crossings(a, b, pr, tol).map(|c| c.over_signed)
}

/// Crossing counts between `a` and `b`. Segments are bucketed on a uniform
/// grid so long curves cost close to linear time. Averaged over uniformly
/// random directions, `total / 2` is the absolute Gauss integral
/// (1/4π)∬|ω|. Returns None if the projection is not generic.
pub fn count_crossings<S: Scalar>(a: &PolyCurve<S>, b: &PolyCurve<S>, pr: &Projection, tol: f64) -> Option<CrossingCount> {
    let index = CrossingIndex::new(b, pr, tol);
    let mut count = CrossingCount::default();
    for e in index.events(a)? {
        count.total += 1;
        if e.a_over {
            count.over_signed += e.sign as i64;
        }
    }
    Some(count)
}

/// One crossing between segment `i` of a query curve and segment `j` of an
/// indexed curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct CrossingEvent {
    pub i: u32,
    pub j: u32,
    pub a_over: bool,
    pub sign: i8,
}

const MAX_CELLS_PER_AXIS: f64 = 512.0;

/// A projected curve with its segments bucketed on a dense grid, queried by
/// other curves in the same projection.
pub(crate) struct CrossingIndex {
    proj: Projected,
    pr: Projection,
    tol: f64,
    lo: (f64, f64),
    cell: f64,
    nx: i64,
    ny: i64,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl CrossingIndex {
    pub fn new<S: Scalar>(b: &PolyCurve<S>, pr: &Projection, tol: f64) -> Self {
        let proj = Projected::new(b, pr);
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for (x, y) in &proj.xy {
            lo = (lo.0.min(*x), lo.1.min(*y));
            hi = (hi.0.max(*x), hi.1.max(*y));
        }
        let mut step = 0.0;
        for j in 0..proj.nseg() {
            let ((ax, ay), (bx, by)) = proj.seg(j);
            step += (bx - ax).abs().max((by - ay).abs());
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-300);
        // Cells about twice the mean projected step.
        let cell = (2.0 * step / proj.nseg().max(1) as f64).max(span / MAX_CELLS_PER_AXIS).max(1e-300);
        let nx = ((hi.0 - lo.0) / cell).floor() as i64 + 1;
        let ny = ((hi.1 - lo.1) / cell).floor() as i64 + 1;
        let mut idx = CrossingIndex { proj, pr: *pr, tol, lo, cell, nx, ny, start: Vec::new(), items: Vec::new() };
        let ncell = (nx * ny) as usize;
        let mut counts = vec![0u32; ncell + 1];
        for j in 0..idx.proj.nseg() {
            idx.visit_cells(idx.proj.seg(j), |c| counts[c] += 1);
        }
        let mut acc = 0u32;
        for c in counts.iter_mut() {
            let n = *c;
            *c = acc;
            acc += n;
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; acc as usize];
        for j in 0..idx.proj.nseg() {
            idx.visit_cells(idx.proj.seg(j), |c| {
                items[fill[c] as usize] = j as u32;
                fill[c] += 1;
            });
        }
        idx.start = counts;
        idx.items = items;
        idx
    }

    /// Calls `f` with every grid cell the padded bounding box of a segment
    /// touches, clipped to the grid.
    fn visit_cells(&self, ((ax, ay), (bx, by)): ((f64, f64), (f64, f64)), mut f: impl FnMut(usize)) {
        let t = self.tol;
        let cx0 = (((ax.min(bx) - t - self.lo.0) / self.cell).floor() as i64).max(0);
        let cy0 = (((ay.min(by) - t - self.lo.1) / self.cell).floor() as i64).max(0);
        let cx1 = (((ax.max(bx) + t - self.lo.0) / self.cell).floor() as i64).min(self.nx - 1);
        let cy1 = (((ay.max(by) + t - self.lo.1) / self.cell).floor() as i64).min(self.ny - 1);
        for cx in cx0..=cx1 {
            for cy in cy0..=cy1 {
                f((cx * self.ny + cy) as usize);
            }
        }
    }

    /// Crossings of `a` with the indexed curve. None if the projection is
    /// not generic for the pair.
    pub fn events<S: Scalar>(&self, a: &PolyCurve<S>) -> Option<Vec<CrossingEvent>> {
        let pa = Projected::new(a, &self.pr);
        let mut out = Vec::new();
        let mut seen: Vec<u32> = Vec::new();
        for i in 0..pa.nseg() {
            seen.clear();
            self.visit_cells(pa.seg(i), |c| {
                seen.extend_from_slice(&self.items[self.start[c] as usize..self.start[c + 1] as usize]);
            });
            seen.sort_unstable();
            seen.dedup();
            for &j in &seen {
                match intersect(&pa, i, &self.proj, j as usize, &self.pr, self.tol) {
                    Ok(Some(c)) => out.push(CrossingEvent { i: i as u32, j, a_over: c.a_over, sign: c.sign as i8 }),
                    Ok(None) => {}
                    Err(NotGeneric) => return None,
                }
            }
        }
        Some(out)
    }
}
