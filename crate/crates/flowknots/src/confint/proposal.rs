//! Importance sampling density for free-vertex positions around a knot.
//!
//! The mixture has three parts: a tube around the polygon whose density grows
//! like 1/ρ at distance ρ from the curve (matching the singularity of the
//! integrand), Gaussians centred on curve samples, and a heavy tail decaying
//! like r⁻⁴ so the estimator keeps finite variance far from the knot. Free
//! vertices joined to an earlier free vertex also draw from a point kernel
//! around it.

use std::f64::consts::PI;

use crate::rng::{self, Stream};

pub(crate) type P3 = [f64; 3];

#[inline]
pub(crate) fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn add(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub(crate) fn scale(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm2(a: P3) -> f64 {
    dot(a, a)
}

const W_TUBE: f64 = 0.5;
const W_GAUSS: f64 = 0.3;
const W_TAIL: f64 = 0.2;
const W_POINT: f64 = 0.3;
const MAX_CENTERS: usize = 64;

pub(crate) struct Proposal {
    pts: Vec<P3>,
    seg_cdf: Vec<f64>,
    seg_len: Vec<f64>,
    seg_dir: Vec<P3>,
    length: f64,
    tube_radius: f64,
    centers: Vec<P3>,
    sigma: f64,
    centroid: P3,
    tail_scale: f64,
    point_radius: f64,
}

impl Proposal {
    pub fn new(pts: &[P3], diameter: f64) -> Self {
        let n = pts.len();
        let mut seg_len = Vec::with_capacity(n);
        let mut seg_dir = Vec::with_capacity(n);
        for i in 0..n {
            let d = sub(pts[(i + 1) % n], pts[i]);
            let l = norm2(d).sqrt();
            seg_len.push(l);
            seg_dir.push(scale(d, 1.0 / l));
        }
        let length: f64 = seg_len.iter().sum();
        let mut acc = 0.0;
        let seg_cdf = seg_len
            .iter()
            .map(|l| {
                acc += l / length;
                acc
            })
            .collect();
        let stride = n.div_ceil(MAX_CENTERS).max(1);
        let centers: Vec<P3> = pts.iter().step_by(stride).copied().collect();
        let mut centroid = [0.0; 3];
        for p in pts {
            centroid = add(centroid, *p);
        }
        centroid = scale(centroid, 1.0 / n as f64);
        Proposal {
            pts: pts.to_vec(),
            seg_cdf,
            seg_len,
            seg_dir,
            length,
            tube_radius: 0.25 * diameter,
            centers,
            sigma: 0.25 * diameter,
            centroid,
            tail_scale: diameter,
            point_radius: 0.25 * diameter,
        }
    }

    fn mixture(has_points: usize) -> (f64, f64, f64, f64) {
        if has_points == 0 {
            (W_TUBE, W_GAUSS, W_TAIL, 0.0)
        } else {
            let f = 1.0 - W_POINT;
            (W_TUBE * f, W_GAUSS * f, W_TAIL * f, W_POINT / has_points as f64)
        }
    }

    /// Draws a position given the already placed free neighbours.
    pub fn sample(&self, r: &mut Stream, near: &[P3]) -> P3 {
        let (wt, wg, wl, wp) = Self::mixture(near.len());
        let u = rng::uniform(r);
        if u < wt {
            let v = rng::uniform(r);
            let i = self.seg_cdf.partition_point(|&c| c < v).min(self.pts.len() - 1);
            let s = rng::uniform(r) * self.seg_len[i];
            let c = add(self.pts[i], scale(self.seg_dir[i], s));
            let rad = rng::uniform(r) * self.tube_radius;
            add(c, scale(rng::unit_vector::<f64>(r).to_f64(), rad))
        } else if u < wt + wg {
            let c = self.centers[(rng::uniform(r) * self.centers.len() as f64) as usize % self.centers.len()];
            let g = [rng::normal(r), rng::normal(r), rng::normal(r)];
            add(c, scale(g, self.sigma))
        } else if u < wt + wg + wl {
            let rad = self.tail_scale * (0.5 * PI * rng::uniform(r)).tan();
            add(self.centroid, scale(rng::unit_vector::<f64>(r).to_f64(), rad))
        } else {
            let k = ((u - wt - wg - wl) / wp) as usize;
            let c = near[k.min(near.len() - 1)];
            let rad = rng::uniform(r) * self.point_radius;
            add(c, scale(rng::unit_vector::<f64>(r).to_f64(), rad))
        }
    }

    pub fn density(&self, y: P3, near: &[P3]) -> f64 {
        let (wt, wg, wl, wp) = Self::mixture(near.len());
        let mut p = wt * self.tube_density(y) + wg * self.gauss_density(y) + wl * self.tail_density(y);
        for c in near {
            let r2 = norm2(sub(y, *c));
            if r2 < self.point_radius * self.point_radius {
                p += wp / (4.0 * PI * self.point_radius * r2);
            }
        }
        p
    }

    fn tube_density(&self, y: P3) -> f64 {
        let r0 = self.tube_radius;
        let mut acc = 0.0;
        for i in 0..self.pts.len() {
            let ra = sub(y, self.pts[i]);
            let alpha = dot(ra, self.seg_dir[i]);
            let rho2 = (norm2(ra) - alpha * alpha).max(0.0);
            if rho2 >= r0 * r0 {
                continue;
            }
            let h = (r0 * r0 - rho2).sqrt();
            let lo = (alpha - h).max(0.0);
            let hi = (alpha + h).min(self.seg_len[i]);
            if hi <= lo {
                continue;
            }
            let rho = rho2.sqrt();
            if rho == 0.0 {
                return f64::INFINITY;
            }
            // ∫ ds / (ρ² + (s − α)²) over the part of the segment inside the ball
            acc += (((hi - alpha) / rho).atan() - ((lo - alpha) / rho).atan()) / rho;
        }
        acc / (4.0 * PI * r0 * self.length)
    }

    fn gauss_density(&self, y: P3) -> f64 {
        let s2 = self.sigma * self.sigma;
        let norm = (2.0 * PI * s2).powf(-1.5) / self.centers.len() as f64;
        self.centers.iter().map(|c| (-norm2(sub(y, *c)) / (2.0 * s2)).exp()).sum::<f64>() * norm
    }

    fn tail_density(&self, y: P3) -> f64 {
        let r2 = norm2(sub(y, self.centroid));
        let s = self.tail_scale;
        s / (2.0 * PI * PI * r2 * (s * s + r2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// E[g(Y)/p(Y)] = ∫g for Y drawn from the proposal; with g a normalized
    /// Gaussian the estimate must be 1.
    fn check_normalization(near: &[P3]) {
        let pts: Vec<P3> = (0..40)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 40.0;
                [t.cos(), t.sin(), 0.3 * (2.0 * t).sin()]
            })
            .collect();
        let prop = Proposal::new(&pts, 2.0);
        let mut r = rng::stream(7, 0);
        let s2: f64 = 0.6 * 0.6;
        let g = |y: P3| (2.0 * PI * s2).powf(-1.5) * (-norm2(sub(y, [0.5, 0.2, 0.1])) / (2.0 * s2)).exp();
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let y = prop.sample(&mut r, near);
            let w = g(y) / prop.density(y, near);
            sum += w;
            sum2 += w * w;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se + 1e-3, "{mean} ± {se}");
    }

    #[test]
    fn density_matches_sampler() {
        check_normalization(&[]);
    }

    #[test]
    fn density_matches_sampler_with_point_kernels() {
        check_normalization(&[[0.4, 0.1, 0.0], [-1.0, 0.5, 0.2]]);
    }
}
