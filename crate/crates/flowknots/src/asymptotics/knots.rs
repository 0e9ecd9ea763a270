//! Single-orbit invariants, closure sensitivity and diffeomorphism
//! invariance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confint::{integral_i_d, QuadratureConfig};
use crate::curves::ShortPathSystem;
use crate::diagrams::TrivalentDiagram;
use crate::fields::{pushforward, seed_sampler, VectorField, VolumeDiffeo};
use crate::rng;
use crate::stats::{loglog_slope, mean_se, LineFit};
use crate::vec3::Vec3;

use super::orbit::{ladder_crossings, ladder_stride, stride_for, OrbitSteps};
use super::pairs::{pair_survey, PairQuantity, PairSurvey, SurveyConfig};
use super::report::{ConvergenceReport, Normalization, RungEstimate, TLadder, ValueSe};
use super::AsymptoticError;

const KNOT_SEED_TAG: u64 = 0x1d_5eed;
const KNOT_PROJ_TAG: u64 = 0x1d_9e0;
/// Polygon size used for I_D when the quadrature config leaves it open.
const DEFAULT_ORBIT_POINTS: usize = 256;

/// vol · mean over seeds of I_D(closed orbit)/T^order along the ladder.
/// `order` defaults to the number of circle vertices of `d`. Closed orbits
/// are resampled to `q.circle_subdivision` points (256 when unset).
pub fn asymptotic_i_d(
    x: &VectorField<f64>,
    d: &TrivalentDiagram,
    order: Option<usize>,
    ladder: &TLadder,
    n_seeds: usize,
    seed: u64,
    sp: &ShortPathSystem,
    q: &QuadratureConfig,
) -> Result<ConvergenceReport, AsymptoticError> {
    if n_seeds == 0 {
        return Err(AsymptoticError::InvalidArgument("need at least one seed".into()));
    }
    let order = order.unwrap_or_else(|| d.k());
    let steps = ladder.steps();
    let last = *steps.last().expect("ladder has rungs");
    let stride = stride_for(x, ladder.dt, seed);
    let mut q = q.clone();
    if q.circle_subdivision == 0 {
        q.circle_subdivision = DEFAULT_ORBIT_POINTS;
    }
    let seeds = seed_sampler(&x.domain, n_seeds, rng::subseed(seed, KNOT_SEED_TAG));
    let per_seed: Vec<Result<Vec<f64>, AsymptoticError>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let o = OrbitSteps::new(x, *s, last, ladder.dt)?;
            let qi = q.clone().with_seed(rng::subseed(q.rng_seed, i as u64));
            steps
                .iter()
                .zip(&ladder.times)
                .map(|(&k, &t)| match o.closed(k, stride, sp) {
                    Some(c) => Ok(integral_i_d(&c, d, &qi)?.value / t.powi(order as i32)),
                    None => Ok(0.0),
                })
                .collect()
        })
        .collect();
    let table = per_seed.into_iter().collect::<Result<Vec<_>, _>>()?;
    let vol = x.domain.volume();
    let rungs = (0..steps.len())
        .map(|r| {
            let col: Vec<f64> = table.iter().map(|row| row[r]).collect();
            let m = mean_se(&col);
            RungEstimate { t: ladder.times[r], estimate: vol * m.mean, std_error: vol * m.std_error, n: n_seeds }
        })
        .collect();
    Ok(ConvergenceReport::from_rungs(&format!("I_D[{d}]"), order, rungs, Vec::new()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRung {
    pub t: f64,
    /// Mean over pairs of |lk₁ − lk₂|/T² for the two closure rules.
    pub gap: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub rungs: Vec<SensitivityRung>,
    /// Log-log slope of the gap against T over rungs with a nonzero gap.
    pub slope: Option<LineFit>,
}

/// Closure dependence of the pairwise asymptotic linking number, averaged
/// over the given seed pairs.
pub fn short_path_sensitivity(
    x: &VectorField<f64>,
    pairs: &[(Vec3<f64>, Vec3<f64>)],
    ladder: &TLadder,
    sp1: &ShortPathSystem,
    sp2: &ShortPathSystem,
) -> Result<SensitivityReport, AsymptoticError> {
    if pairs.is_empty() {
        return Err(AsymptoticError::InvalidArgument("need at least one seed pair".into()));
    }
    let steps = ladder.steps();
    let last = *steps.last().expect("ladder has rungs");
    let stride = ladder_stride(x, ladder.dt, &steps, KNOT_PROJ_TAG);
    let gaps: Vec<Result<Vec<f64>, AsymptoticError>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let oa = OrbitSteps::new(x, *a, last + 1, ladder.dt)?;
            let ob = OrbitSteps::new(x, *b, last + 1, ladder.dt)?;
            if sp1 == sp2 {
                return Ok(vec![0.0; steps.len()]);
            }
            let ps = rng::subseed(KNOT_PROJ_TAG, i as u64);
            let (c1, _) = ladder_crossings(&oa, &ob, &steps, stride, sp1, ps)?;
            let (c2, _) = ladder_crossings(&oa, &ob, &steps, stride, sp2, ps)?;
            Ok(c1
                .iter()
                .zip(&c2)
                .zip(&ladder.times)
                .map(|((a, b), &t)| (a.over_signed - b.over_signed).abs() as f64 / (t * t))
                .collect())
        })
        .collect();
    let table = gaps.into_iter().collect::<Result<Vec<_>, _>>()?;
    let rungs: Vec<SensitivityRung> = (0..steps.len())
        .map(|r| {
            let col: Vec<f64> = table.iter().map(|row| row[r]).collect();
            let m = mean_se(&col);
            SensitivityRung { t: ladder.times[r], gap: m.mean, std_error: m.std_error }
        })
        .collect();
    let pos: Vec<&SensitivityRung> = rungs.iter().filter(|r| r.gap > 0.0).collect();
    let slope = if pos.len() >= 2 {
        let t: Vec<f64> = pos.iter().map(|r| r.t).collect();
        let g: Vec<f64> = pos.iter().map(|r| r.gap).collect();
        loglog_slope(&t, &g)
    } else {
        None
    };
    Ok(SensitivityReport { rungs, slope })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub quantity: PairQuantity,
    pub original: ValueSe,
    pub transformed: ValueSe,
    pub difference: f64,
    pub combined_std_error: f64,
    /// |difference| ≤ 2 combined std errors.
    pub consistent: bool,
}

/// Compares a pair quantity for X and g_*X with the same budget. The two
/// surveys draw their seeds independently, each in its own domain.
pub fn invariance_check(
    x: &VectorField<f64>,
    g: &VolumeDiffeo<f64>,
    quantity: PairQuantity,
    cfg: &SurveyConfig,
) -> Result<InvarianceReport, AsymptoticError> {
    let gx = pushforward(x, g);
    let original = pair_survey(x, cfg)?;
    let transformed = pair_survey(&gx, &SurveyConfig { seed: rng::subseed(cfg.seed, 1), ..cfg.clone() })?;
    Ok(invariance_from_surveys(&original, &transformed, quantity))
}

/// As [`invariance_check`] for existing surveys of X and g_*X.
pub fn invariance_from_surveys(original: &PairSurvey, transformed: &PairSurvey, quantity: PairQuantity) -> InvarianceReport {
    let original = original.estimate(quantity, Normalization::Raw).value_se();
    let transformed = transformed.estimate(quantity, Normalization::Raw).value_se();
    let difference = transformed.value - original.value;
    let combined_std_error = original.std_error.hypot(transformed.std_error);
    InvarianceReport {
        quantity,
        original,
        transformed,
        difference,
        combined_std_error,
        consistent: difference.abs() <= 2.0 * combined_std_error,
    }
}
