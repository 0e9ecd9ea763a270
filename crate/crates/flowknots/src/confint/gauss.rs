use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{min_distance, resample, CurveError, PolyCurve, EPS_SEP};
use crate::geom::{segment_distance, segment_pair_solid_angle};
use crate::scalar::Scalar;

use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Points per knot after arclength resampling; 0 keeps the input vertices.
    pub circle_subdivision: usize,
    /// Monte Carlo samples for the free vertices.
    pub free_vertex_samples: usize,
    /// Diagonal cutoff relative to the knot diameter.
    pub diagonal_cutoff: f64,
    pub rng_seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { circle_subdivision: 0, free_vertex_samples: 100_000, diagonal_cutoff: 1e-6, rng_seed: 0 }
    }
}

impl QuadratureConfig {
    pub fn with_points(mut self, n: usize) -> Self {
        self.circle_subdivision = n;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.free_vertex_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid,
    MonteCarlo,
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Zero for deterministic methods.
    pub std_error: f64,
    pub samples: u64,
    pub rejections: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl IntegralEstimate {
    pub fn grid(value: f64, samples: u64) -> Self {
        IntegralEstimate { value, std_error: 0.0, samples, rejections: 0, method: Method::Grid, warning: None }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfintError {
    #[error("curves intersect: separation {0:e} is below the tolerance")]
    Intersecting(f64),
    #[error("curve must be closed")]
    NotClosed,
    #[error("no generic projection found after {0} attempts")]
    NoGenericProjection(usize),
    #[error("non-finite integrand")]
    NonFinite,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("{0}")]
    Unsupported(String),
}

pub(crate) fn prepared<S: Scalar>(k: &PolyCurve<S>, q: &QuadratureConfig) -> Result<PolyCurve<S>, ConfintError> {
    if !k.is_closed() {
        return Err(ConfintError::NotClosed);
    }
    if q.circle_subdivision == 0 || q.circle_subdivision == k.len() {
        Ok(k.clone())
    } else {
        Ok(resample(k, q.circle_subdivision)?)
    }
}

/// Gauss linking integral of two closed polygons, summing exact segment-pair
/// solid angles. Symmetric in its arguments.
pub fn linking_number<S: Scalar>(k1: &PolyCurve<S>, k2: &PolyCurve<S>, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let a = prepared(k1, q)?;
    let b = prepared(k2, q)?;
    let diam = a.diameter().max(b.diameter());
    let sep = min_distance(&a, &b);
    if sep <= S::of(EPS_SEP) * diam {
        return Err(ConfintError::Intersecting(sep.as_f64()));
    }
    let value = linking_sum(&a, &b);
    Ok(IntegralEstimate::grid(value, (a.segment_count() * b.segment_count()) as u64))
}

/// Sum of solid angles over all segment pairs divided by 4π. The curves are
/// put in a canonical order first, so swapping them gives a bitwise identical
/// result.
pub(crate) fn linking_sum<S: Scalar>(a: &PolyCurve<S>, b: &PolyCurve<S>) -> f64 {
    let key = |c: &PolyCurve<S>| -> Vec<f64> { c.points().iter().flat_map(|p| p.to_f64()).collect() };
    let (a, b) = match key(a).partial_cmp(&key(b)) {
        Some(std::cmp::Ordering::Greater) => (b, a),
        _ => (a, b),
    };
    let rows: Vec<f64> = (0..a.segment_count())
        .into_par_iter()
        .map(|i| {
            let (p1, p2) = a.segment(i);
            let mut s = 0.0;
            for j in 0..b.segment_count() {
                let (p3, p4) = b.segment(j);
                s += segment_pair_solid_angle(p1, p2, p3, p4).as_f64();
            }
            s
        })
        .collect();
    rows.iter().sum::<f64>() / (4.0 * PI)
}

/// Writhe: Gauss self-integral over ordered pairs of distinct segments.
pub fn writhe<S: Scalar>(k: &PolyCurve<S>, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let c = prepared(k, q)?;
    Ok(writhe_prepared(&c, q.diagonal_cutoff))
}

pub(crate) fn writhe_prepared<S: Scalar>(c: &PolyCurve<S>, cutoff: f64) -> IntegralEstimate {
    let n = c.segment_count();
    let eps = S::of(cutoff) * c.diameter();
    let rows: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p1, p2) = c.segment(i);
            let mut s = 0.0;
            let mut close = false;
            for j in i + 1..n {
                let (p3, p4) = c.segment(j);
                s += segment_pair_solid_angle(p1, p2, p3, p4).as_f64();
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && !close && segment_distance(p1, p2, p3, p4) < eps {
                    close = true;
                }
            }
            (s, close)
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let mut est = IntegralEstimate::grid(2.0 * total / (4.0 * PI), (n * n) as u64);
    if rows.iter().any(|r| r.1) {
        est.warning = Some("near self-intersection below the diagonal cutoff".into());
    }
    est
}

/// Matrix of segment-pair solid angles divided by 4π; entry (i,j) integrates
/// the Gauss kernel over segments i and j.
pub fn gauss_matrix<S: Scalar>(c: &PolyCurve<S>) -> Vec<Vec<f64>> {
    let n = c.segment_count();
    let mut m: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p1, p2) = c.segment(i);
            let mut row = vec![0.0; n];
            for (j, r) in row.iter_mut().enumerate().skip(i + 1) {
                let (p3, p4) = c.segment(j);
                *r = segment_pair_solid_angle(p1, p2, p3, p4).as_f64() / (4.0 * PI);
            }
            row
        })
        .collect();
    for i in 0..n {
        for j in 0..i {
            m[i][j] = m[j][i];
        }
    }
    m
}
