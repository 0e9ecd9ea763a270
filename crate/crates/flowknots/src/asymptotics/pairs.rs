//! Seed-pair statistics: helicity, quadratic helicity and the asymptotic
//! crossing number from one table of pairwise linking numbers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::ShortPathSystem;
use crate::fields::{seed_sampler, VectorField};
use crate::rng;
use crate::stats::Accum;
use crate::vec3::Vec3;

use super::orbit::{ladder_crossings, ladder_stride, OrbitSteps};
use super::report::{AsymptoticEstimate, ConvergenceReport, Normalization, RungEstimate, TLadder, ValueSe};
use super::AsymptoticError;

const SEED_TAG: u64 = 0x5eed_9a1e;
const PROJ_TAG: u64 = 0x9e0_1ec7;
const STRIDE_TAG: u64 = 0x57_81de;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub ladder: TLadder,
    pub n_pairs: usize,
    pub seed: u64,
    pub short_path: ShortPathSystem,
}

impl SurveyConfig {
    pub fn new(ladder: TLadder, n_pairs: usize, seed: u64) -> Self {
        SurveyConfig { ladder, n_pairs, seed, short_path: ShortPathSystem::Straight }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub x: [f64; 3],
    pub y: [f64; 3],
    /// Linking number of the closed orbits at each rung.
    pub lk: Vec<i64>,
    /// Crossings of the closed orbits in one random projection, per rung.
    pub crossings: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairQuantity {
    Helicity,
    QuadraticHelicity,
    CrossingNumber,
}

impl PairQuantity {
    pub fn name(self) -> &'static str {
        match self {
            PairQuantity::Helicity => "helicity",
            PairQuantity::QuadraticHelicity => "quadratic_helicity",
            PairQuantity::CrossingNumber => "crossing_number",
        }
    }

    fn of(self, row: &PairRow, rung: usize, t: f64) -> f64 {
        let t2 = t * t;
        match self {
            PairQuantity::Helicity => row.lk[rung] as f64 / t2,
            PairQuantity::QuadraticHelicity => (row.lk[rung] as f64 / t2).powi(2),
            // Half the crossing count in a uniformly random direction is an
            // unbiased estimate of (1/4π)∬|ω| for the two curves.
            PairQuantity::CrossingNumber => row.crossings[rung] as f64 / (2.0 * t2),
        }
    }
}

/// Table of pairwise linking numbers and crossing counts along a ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSurvey {
    pub ladder: TLadder,
    pub volume: f64,
    pub seed: u64,
    pub rows: Vec<PairRow>,
    /// Pairs whose rung time was moved by ±dt to avoid a degenerate
    /// configuration.
    pub jittered: usize,
}

impl PairSurvey {
    pub fn n_pairs(&self) -> usize {
        self.rows.len()
    }

    /// Mean of the per-pair quantity at `rung` with its standard error.
    /// Pairs are independent, each with its own two seeds.
    pub fn mean(&self, q: PairQuantity, rung: usize) -> ValueSe {
        let t = self.ladder.times[rung];
        let mut acc = Accum::default();
        for r in &self.rows {
            acc.push(q.of(r, rung, t));
        }
        ValueSe::new(acc.mean(), acc.std_error())
    }

    pub fn estimate(&self, q: PairQuantity, norm: Normalization) -> AsymptoticEstimate {
        let scale = match norm {
            Normalization::Raw => self.volume * self.volume,
            Normalization::Probability => 1.0,
        };
        let rungs: Vec<RungEstimate> = (0..self.ladder.times.len())
            .map(|i| {
                let v = self.mean(q, i).scale(scale);
                RungEstimate { t: self.ladder.times[i], estimate: v.value, std_error: v.std_error, n: self.n_pairs() }
            })
            .collect();
        let top = rungs.last().expect("ladder has rungs");
        AsymptoticEstimate {
            quantity: q.name().into(),
            normalization: norm,
            value: top.estimate,
            std_error: top.std_error,
            t_max: self.ladder.t_max(),
            n_pairs: self.n_pairs(),
            rungs,
        }
    }
}

/// Integrates two fresh seed orbits per pair and records, for every rung,
/// the linking number and crossing count of the closed orbits.
pub fn pair_survey(x: &VectorField<f64>, cfg: &SurveyConfig) -> Result<PairSurvey, AsymptoticError> {
    if cfg.n_pairs == 0 {
        return Err(AsymptoticError::InvalidArgument("need at least one pair".into()));
    }
    let ladder = &cfg.ladder;
    let steps = ladder.steps();
    let last = *steps.last().expect("ladder has rungs");
    let stride = ladder_stride(x, ladder.dt, &steps, rng::subseed(cfg.seed, STRIDE_TAG));
    let seed_base = rng::subseed(cfg.seed, SEED_TAG);
    let proj_base = rng::subseed(cfg.seed, PROJ_TAG);
    let results: Vec<Result<(PairRow, bool), AsymptoticError>> = (0..cfg.n_pairs)
        .into_par_iter()
        .map(|p| {
            let seeds = seed_sampler(&x.domain, 2, rng::subseed(seed_base, p as u64));
            let oa = OrbitSteps::new(x, seeds[0], last + 1, ladder.dt)?;
            let ob = OrbitSteps::new(x, seeds[1], last + 1, ladder.dt)?;
            let proj_seed = rng::subseed(proj_base, p as u64);
            let (counts, moved) = ladder_crossings(&oa, &ob, &steps, stride, &cfg.short_path, proj_seed)?;
            let row = PairRow {
                x: seeds[0].to_f64(),
                y: seeds[1].to_f64(),
                lk: counts.iter().map(|c| c.over_signed).collect(),
                crossings: counts.iter().map(|c| c.total).collect(),
            };
            Ok((row, moved))
        })
        .collect();
    let mut rows = Vec::with_capacity(cfg.n_pairs);
    let mut jittered = 0;
    for r in results {
        let (row, moved) = r?;
        rows.push(row);
        jittered += moved as usize;
    }
    Ok(PairSurvey { ladder: ladder.clone(), volume: x.domain.volume(), seed: cfg.seed, rows, jittered })
}

/// (1/T²)·lk of the closed orbits through `x` and `y` along the ladder.
pub fn pairwise_asymptotic_lk(
    x: &VectorField<f64>,
    a: Vec3<f64>,
    b: Vec3<f64>,
    ladder: &TLadder,
    sp: &ShortPathSystem,
) -> Result<ConvergenceReport, AsymptoticError> {
    if a == b {
        return Err(AsymptoticError::InvalidArgument("seeds must differ".into()));
    }
    let steps = ladder.steps();
    let last = *steps.last().expect("ladder has rungs");
    let oa = OrbitSteps::new(x, a, last + 1, ladder.dt)?;
    let ob = OrbitSteps::new(x, b, last + 1, ladder.dt)?;
    let stride = ladder_stride(x, ladder.dt, &steps, STRIDE_TAG);
    let (counts, moved) = ladder_crossings(&oa, &ob, &steps, stride, sp, PROJ_TAG)?;
    let mut flags = Vec::new();
    if moved {
        flags.push("some rungs were jittered by one step".to_string());
    }
    let rungs = counts
        .iter()
        .zip(&ladder.times)
        .map(|(c, &t)| RungEstimate { t, estimate: c.over_signed as f64 / (t * t), std_error: 0.0, n: 1 })
        .collect();
    Ok(ConvergenceReport::from_rungs("pairwise_lk", 2, rungs, flags))
}

fn checked(n_pairs: usize) -> Result<(), AsymptoticError> {
    if n_pairs < 30 {
        return Err(AsymptoticError::InvalidArgument(format!("need at least 30 seed pairs, got {n_pairs}")));
    }
    Ok(())
}

/// Helicity as vol² times the mean asymptotic linking number of seed pairs.
pub fn helicity(x: &VectorField<f64>, ladder: &TLadder, n_pairs: usize, seed: u64) -> Result<AsymptoticEstimate, AsymptoticError> {
    checked(n_pairs)?;
    let s = pair_survey(x, &SurveyConfig::new(ladder.clone(), n_pairs, seed))?;
    Ok(s.estimate(PairQuantity::Helicity, Normalization::Raw))
}

/// vol² times the mean squared asymptotic linking number.
pub fn quadratic_helicity(
    x: &VectorField<f64>,
    ladder: &TLadder,
    n_pairs: usize,
    seed: u64,
) -> Result<AsymptoticEstimate, AsymptoticError> {
    checked(n_pairs)?;
    let s = pair_survey(x, &SurveyConfig::new(ladder.clone(), n_pairs, seed))?;
    Ok(s.estimate(PairQuantity::QuadraticHelicity, Normalization::Raw))
}

/// vol² times the mean absolute Gauss integral between orbit pairs, per T².
pub fn crossing_number(x: &VectorField<f64>, n_pairs: usize, ladder: &TLadder, seed: u64) -> Result<AsymptoticEstimate, AsymptoticError> {
    checked(n_pairs)?;
    let s = pair_survey(x, &SurveyConfig::new(ladder.clone(), n_pairs, seed))?;
    Ok(s.estimate(PairQuantity::CrossingNumber, Normalization::Raw))
}
