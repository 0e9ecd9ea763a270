//! Sampled space curves, links, knot files and orbit closure.

mod io;
pub mod shapes;

use thiserror::Error;

use crate::geom::segment_distance;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

pub use io::{read_knot_file, read_knot_text, write_knot_file, write_knot_text};

/// Relative separation below which link components count as touching.
pub const EPS_SEP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CurveError {
    #[error("curve needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("consecutive points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("degenerate curve (zero length)")]
    ZeroLength,
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("components {0} and {1} come within {2:e} of each other")]
    ComponentsTooClose(usize, usize, f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// Polygonal curve. A closed curve has an implicit segment from the last
/// point back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve<S> {
    points: Vec<Vec3<S>>,
    closed: bool,
    arclength: Vec<S>,
}

impl<S: Scalar> PolyCurve<S> {
    pub fn new(points: Vec<Vec3<S>>, closed: bool) -> Result<Self, CurveError> {
        let needed = if closed { 3 } else { 2 };
        if points.len() < needed {
            return Err(CurveError::TooFewPoints { needed, got: points.len() });
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(CurveError::NonFinite(i));
        }
        let n = points.len();
        let nseg = if closed { n } else { n - 1 };
        let mut arclength = Vec::with_capacity(nseg + 1);
        let mut acc = S::zero();
        arclength.push(acc);
        for i in 0..nseg {
            let j = (i + 1) % n;
            let l = points[i].dist(points[j]);
            if l <= S::zero() {
                return Err(CurveError::RepeatedPoint(i, j));
            }
            acc = acc + l;
            arclength.push(acc);
        }
        Ok(PolyCurve { points, closed, arclength })
    }

    pub fn closed(points: Vec<Vec3<S>>) -> Result<Self, CurveError> {
        Self::new(points, true)
    }

    pub fn open(points: Vec<Vec3<S>>) -> Result<Self, CurveError> {
        Self::new(points, false)
    }

    pub fn points(&self) -> &[Vec3<S>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec3<S>> {
        self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.arclength.len() - 1
    }

    pub fn segment(&self, i: usize) -> (Vec3<S>, Vec3<S>) {
        (self.points[i], self.points[(i + 1) % self.points.len()])
    }

    /// Cumulative arclength at each vertex, ending with the total length.
    pub fn cumulative_arclength(&self) -> &[S] {
        &self.arclength
    }

    pub fn length(&self) -> S {
        *self.arclength.last().unwrap()
    }

    pub fn bounding_box(&self) -> (Vec3<S>, Vec3<S>) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (lo, hi)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> S {
        let (lo, hi) = self.bounding_box();
        let box_diag = lo.dist(hi);
        if self.points.len() > 2048 {
            return box_diag;
        }
        let mut best = S::zero();
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.max(p.dist(*q));
            }
        }
        best
    }

    pub fn centroid(&self) -> Vec3<S> {
        let mut c = Vec3::zero();
        for p in &self.points {
            c += *p;
        }
        c / S::of(self.points.len() as f64)
    }

    /// Point at arclength `s` measured from the first vertex.
    pub fn point_at(&self, s: S) -> Vec3<S> {
        let total = self.length();
        let s = if self.closed { s - (s / total).floor() * total } else { s.max(S::zero()).min(total) };
        let i = match self.arclength.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.points[i % self.points.len()],
            Err(i) => i - 1,
        };
        let (a, b) = self.segment(i);
        let f = (s - self.arclength[i]) / (self.arclength[i + 1] - self.arclength[i]);
        a + (b - a) * f
    }

    pub fn map(&self, f: impl Fn(Vec3<S>) -> Vec3<S>) -> Result<Self, CurveError> {
        PolyCurve::new(self.points.iter().map(|p| f(*p)).collect(), self.closed)
    }

    pub fn cast<T: Scalar>(&self) -> PolyCurve<T> {
        PolyCurve::new(self.points.iter().map(|p| p.cast()).collect(), self.closed).expect("cast keeps validity")
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut p = self.points.clone();
        p.reverse();
        PolyCurve::new(p, self.closed).expect("reversal keeps validity")
    }
}

/// Arclength-uniform resampling to `m` points. Closed curves start at the
/// first vertex; open curves keep both endpoints.
pub fn resample<S: Scalar>(c: &PolyCurve<S>, m: usize) -> Result<PolyCurve<S>, CurveError> {
    let needed = if c.closed { 3 } else { 2 };
    if m < needed {
        return Err(CurveError::TooFewPoints { needed, got: m });
    }
    let total = c.length();
    if total <= S::zero() {
        return Err(CurveError::ZeroLength);
    }
    let denom = if c.closed { m } else { m - 1 };
    let mut pts = Vec::with_capacity(m);
    let mut seg = 0;
    for i in 0..m {
        let s = total * S::of(i as f64) / S::of(denom as f64);
        while seg + 1 < c.segment_count() && c.arclength[seg + 1] <= s {
            seg += 1;
        }
        let (a, b) = c.segment(seg);
        let len = c.arclength[seg + 1] - c.arclength[seg];
        let f = ((s - c.arclength[seg]) / len).min(S::one());
        pts.push(if f == S::zero() { a } else if f == S::one() { b } else { a + (b - a) * f });
    }
    PolyCurve::new(pts, c.closed)
}

/// Unit direction of segment `i`.
pub fn tangent<S: Scalar>(c: &PolyCurve<S>, i: usize) -> Vec3<S> {
    let (a, b) = c.segment(i);
    (b - a).normalized()
}

/// Unit central-difference tangent at vertex `i`; one-sided at the ends of
/// an open curve.
pub fn tangent_central<S: Scalar>(c: &PolyCurve<S>, i: usize) -> Vec3<S> {
    let n = c.points.len();
    let (prev, next) = if c.closed {
        ((i + n - 1) % n, (i + 1) % n)
    } else {
        (i.saturating_sub(1), (i + 1).min(n - 1))
    };
    (c.points[next] - c.points[prev]).normalized()
}

/// Closed curves whose pairwise separation exceeds `EPS_SEP` times the
/// overall diameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Link<S> {
    components: Vec<PolyCurve<S>>,
}

impl<S: Scalar> Link<S> {
    pub fn new(components: Vec<PolyCurve<S>>) -> Result<Self, CurveError> {
        if components.iter().any(|c| !c.closed) {
            return Err(CurveError::TooFewPoints { needed: 3, got: 0 });
        }
        let diam = components.iter().map(|c| c.diameter()).fold(S::zero(), |a, b| a.max(b));
        let eps = S::of(EPS_SEP) * diam;
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                let d = min_distance(&components[i], &components[j]);
                if d <= eps {
                    return Err(CurveError::ComponentsTooClose(i, j, d.as_f64()));
                }
            }
        }
        Ok(Link { components })
    }

    pub fn components(&self) -> &[PolyCurve<S>] {
        &self.components
    }
}

/// Smallest distance between segments of two curves.
pub fn min_distance<S: Scalar>(a: &PolyCurve<S>, b: &PolyCurve<S>) -> S {
    let mut best = S::infinity();
    for i in 0..a.segment_count() {
        let (p0, p1) = a.segment(i);
        for j in 0..b.segment_count() {
            let (q0, q1) = b.segment(j);
            best = best.min(segment_distance(p0, p1, q0, q1));
        }
    }
    best
}

/// Rule producing the short arc that closes an orbit segment.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortPathSystem {
    /// Straight segment from the orbit's end back to its start.
    Straight,
    /// Two straight legs meeting halfway between a fixed waypoint and the
    /// midpoint of the chord. In a convex domain the corner stays inside,
    /// and arcs of different orbits do not all meet at one point.
    Dogleg { waypoint: [f64; 3] },
}

impl ShortPathSystem {
    /// Corners of the arc from `from` to `to`, endpoints included.
    pub fn corners<S: Scalar>(&self, from: Vec3<S>, to: Vec3<S>) -> Vec<Vec3<S>> {
        match self {
            ShortPathSystem::Straight => vec![from, to],
            ShortPathSystem::Dogleg { waypoint } => {
                let half = S::of(0.5);
                let mid = (from + to) * half;
                vec![from, (Vec3::from_f64(*waypoint) + mid) * half, to]
            }
        }
    }

    /// Arc from `from` to `to` (both included), subdivided so that no piece
    /// is longer than `spacing`.
    pub fn arc<S: Scalar>(&self, from: Vec3<S>, to: Vec3<S>, spacing: S) -> Vec<Vec3<S>> {
        let corners = self.corners(from, to);
        let mut out = vec![from];
        for w in corners.windows(2) {
            let len = w[0].dist(w[1]);
            let pieces = (len / spacing).ceil().to_usize().unwrap_or(1).max(1);
            for p in 1..pieces {
                let f = S::of(p as f64 / pieces as f64);
                out.push(w[0] + (w[1] - w[0]) * f);
            }
            out.push(w[1]);
        }
        out
    }
}

/// Open orbit segment with its integration parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenOrbit<S> {
    pub curve: PolyCurve<S>,
    pub t: f64,
    pub dt: f64,
}

/// Orbit segment closed by a short arc.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitKnot<S> {
    pub seed: Vec3<S>,
    pub t: f64,
    pub dt: f64,
    pub orbit: PolyCurve<S>,
    /// Closing arc from the orbit's end to its start, endpoints included.
    /// Empty when the orbit returned to its seed.
    pub closure: Vec<Vec3<S>>,
    pub closed_curve: PolyCurve<S>,
}

impl<S: Scalar> OrbitKnot<S> {
    pub fn closure_length(&self) -> S {
        self.closure.windows(2).map(|w| w[0].dist(w[1])).sum()
    }
}

/// Closes an open orbit with the short path `sp`, subdividing the arc at the
/// mean sample spacing of the orbit.
pub fn close_orbit<S: Scalar>(o: &OpenOrbit<S>, sp: &ShortPathSystem) -> Result<OrbitKnot<S>, CurveError> {
    let pts = o.curve.points();
    let n = pts.len();
    let start = pts[0];
    let end = pts[n - 1];
    let spacing = o.curve.length() / S::of((n - 1) as f64);
    let tiny = S::of(1e-12) * (S::one() + o.curve.diameter());
    let mut closed_pts: Vec<Vec3<S>> = pts.to_vec();
    let closure = if end.dist(start) <= tiny && matches!(sp, ShortPathSystem::Straight) {
        closed_pts.pop();
        Vec::new()
    } else {
        let arc = sp.arc(end, start, spacing);
        closed_pts.extend_from_slice(&arc[1..arc.len() - 1]);
        arc
    };
    Ok(OrbitKnot {
        seed: start,
        t: o.t,
        dt: o.dt,
        orbit: o.curve.clone(),
        closure,
        closed_curve: PolyCurve::closed(closed_pts)?,
    })
}
