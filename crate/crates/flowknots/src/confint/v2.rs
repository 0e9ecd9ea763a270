use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::gauss::{prepared, ConfintError, IntegralEstimate, Method, QuadratureConfig};
use super::integral::integral_i_d;
use crate::curves::shapes;
use crate::curves::PolyCurve;
use crate::diagrams::{enumerate, WeightSystem};
use crate::scalar::Scalar;

/// Uncalibrated degree-2 combination Σ W(D) I_D / |Aut D| with the Casson
/// weight system. Terms whose weight vanishes are skipped.
pub fn v2_raw<S: Scalar>(k: &PolyCurve<S>, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let w = WeightSystem::casson();
    let mut value = 0.0;
    let mut var = 0.0;
    let mut samples = 0;
    let mut rejections = 0;
    let diagrams = enumerate(2).map_err(|e| ConfintError::Unsupported(e.to_string()))?;
    for d in diagrams {
        let c = w.value(&d) / d.automorphism_count() as f64;
        if c == 0.0 {
            continue;
        }
        let e = integral_i_d(k, &d, q)?;
        value += c * e.value;
        var += c * c * e.std_error * e.std_error;
        if e.method != Method::Grid {
            samples += e.samples;
        }
        rejections += e.rejections;
    }
    Ok(IntegralEstimate { value, std_error: var.sqrt(), samples, rejections, method: Method::Hybrid, warning: None })
}

type CacheKey = (usize, usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, IntegralEstimate>> {
    static C: OnceLock<Mutex<HashMap<CacheKey, IntegralEstimate>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Raw value of a round circle at the same resolution, cached per
/// (points, samples, cutoff, seed).
fn calibration(points: usize, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let key = (points, q.free_vertex_samples, q.diagonal_cutoff.to_bits(), q.rng_seed);
    if let Some(e) = cache().lock().unwrap().get(&key) {
        return Ok(e.clone());
    }
    let circle = shapes::circle::<f64>(points, 1.0, [0.0; 3]);
    let qc = QuadratureConfig { circle_subdivision: 0, ..q.clone() };
    let e = v2_raw(&circle, &qc)?;
    cache().lock().unwrap().insert(key, e.clone());
    Ok(e)
}

/// Casson invariant of a knot: the raw degree-2 combination minus its value
/// on the round unknot at the same resolution.
pub fn v2<S: Scalar>(k: &PolyCurve<S>, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let c = prepared(k, q)?;
    let raw = v2_raw(&c, &QuadratureConfig { circle_subdivision: 0, ..q.clone() })?;
    let cal = calibration(c.len(), q)?;
    Ok(IntegralEstimate {
        value: raw.value - cal.value,
        std_error: raw.std_error.hypot(cal.std_error),
        samples: raw.samples,
        rejections: raw.rejections,
        method: Method::Hybrid,
        warning: raw.warning,
    })
}
