use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::AsymptoticError;
use crate::stats::{loglog_slope, LineFit};

/// Flow times at which a quantity is measured, all multiples of `dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TLadder {
    pub times: Vec<f64>,
    pub dt: f64,
}

impl TLadder {
    pub fn new(times: Vec<f64>, dt: f64) -> Result<Self, AsymptoticError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(AsymptoticError::InvalidLadder(format!("dt must be positive, got {dt}")));
        }
        if times.len() < 3 {
            return Err(AsymptoticError::InvalidLadder(format!("need at least 3 rungs, got {}", times.len())));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(AsymptoticError::InvalidLadder("times must increase".into()));
            }
        }
        for &t in &times {
            if !(t > 0.0) || !t.is_finite() {
                return Err(AsymptoticError::InvalidLadder(format!("times must be positive, got {t}")));
            }
            let k = (t / dt).round();
            if k < 1.0 || (k * dt - t).abs() > 1e-6 * t {
                return Err(AsymptoticError::InvalidLadder(format!("T = {t} is not a multiple of dt = {dt}")));
            }
        }
        Ok(TLadder { times, dt })
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("ladder has rungs")
    }

    /// Step count of each rung.
    pub fn steps(&self) -> Vec<usize> {
        self.times.iter().map(|t| (t / self.dt).round() as usize).collect()
    }

    /// The same ladder with every time multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, AsymptoticError> {
        TLadder::new(self.times.iter().map(|t| t * factor).collect(), self.dt)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValueSe {
    pub value: f64,
    pub std_error: f64,
}

impl ValueSe {
    pub fn new(value: f64, std_error: f64) -> Self {
        ValueSe { value, std_error }
    }

    pub fn scale(self, s: f64) -> Self {
        ValueSe { value: self.value * s, std_error: self.std_error * s.abs() }
    }
}

/// How a double integral over S × S is normalized: by Lebesgue measure
/// (vol² times the pair mean) or by the probability measure (the mean).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    Probability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungEstimate {
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Estimates along a ladder. The reported value is the largest-T rung; the
/// decay of |est(T) − est(T_max)| is a diagnostic only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub quantity: String,
    /// Power m in the 1/T^m scaling.
    pub order: usize,
    pub rungs: Vec<RungEstimate>,
    pub value: f64,
    pub std_error: f64,
    /// Log-log fit of |est(T) − est(T_max)| against T, kept only when the
    /// fit residual is small.
    pub decay: Option<LineFit>,
    /// C in |est(T) − est(T_max)| ≈ C/T, least squares.
    pub tail_constant: f64,
    /// Estimates grow steadily in magnitude along the ladder, which suggests
    /// the order is too low.
    pub growing: bool,
    pub flags: Vec<String>,
}

const DECAY_RESIDUAL_MAX: f64 = 0.5;

impl ConvergenceReport {
    pub fn from_rungs(quantity: &str, order: usize, rungs: Vec<RungEstimate>, flags: Vec<String>) -> Self {
        let last = rungs.last().expect("ladder has rungs").clone();
        let head = &rungs[..rungs.len() - 1];
        let gaps: Vec<(f64, f64)> =
            head.iter().map(|r| (r.t, (r.estimate - last.estimate).abs())).filter(|(_, g)| *g > 0.0).collect();
        let decay = if gaps.len() >= 2 {
            let (x, y): (Vec<f64>, Vec<f64>) = gaps.iter().copied().unzip();
            loglog_slope(&x, &y).filter(|f| f.residual <= DECAY_RESIDUAL_MAX)
        } else {
            None
        };
        let num: f64 = head.iter().map(|r| (r.estimate - last.estimate).abs() / r.t).sum();
        let den: f64 = head.iter().map(|r| 1.0 / (r.t * r.t)).sum();
        let tail_constant = if den > 0.0 { num / den } else { 0.0 };
        let mags: Vec<f64> = rungs.iter().map(|r| r.estimate.abs()).collect();
        let growing = mags.windows(2).all(|w| w[1] > w[0])
            && mags[mags.len() - 1] > 2.0 * mags[0] + 2.0 * last.std_error.hypot(rungs[0].std_error);
        ConvergenceReport {
            quantity: quantity.into(),
            order,
            value: last.estimate,
            std_error: last.std_error,
            rungs,
            decay,
            tail_constant,
            growing,
            flags,
        }
    }

    /// |est(T_max) − est(T_max/2)| ≤ 2·(combined std error + C/T_max), when
    /// the ladder contains T_max/2.
    pub fn stabilized(&self) -> Option<bool> {
        let last = self.rungs.last()?;
        let half = self.rungs.iter().find(|r| (r.t - last.t / 2.0).abs() < 1e-9 * last.t)?;
        let bound = 2.0 * (last.std_error.hypot(half.std_error) + self.tail_constant / last.t);
        Some((last.estimate - half.estimate).abs() <= bound)
    }
}

/// Monte Carlo estimate over seeds or seed pairs at the top rung, with the
/// whole ladder retained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub quantity: String,
    pub normalization: Normalization,
    pub value: f64,
    pub std_error: f64,
    pub t_max: f64,
    pub n_pairs: usize,
    pub rungs: Vec<RungEstimate>,
}

impl AsymptoticEstimate {
    pub fn value_se(&self) -> ValueSe {
        ValueSe::new(self.value, self.std_error)
    }
}

pub const CSV_HEADER: &str = "quantity,T,estimate,std_error,n_pairs,dt,seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub quantity: String,
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n_pairs: usize,
    pub dt: f64,
    pub seed: u64,
}

pub fn csv_rows(e: &AsymptoticEstimate, dt: f64, seed: u64) -> Vec<CsvRow> {
    e.rungs
        .iter()
        .map(|r| CsvRow {
            quantity: e.quantity.clone(),
            t: r.t,
            estimate: r.estimate,
            std_error: r.std_error,
            n_pairs: r.n,
            dt,
            seed,
        })
        .collect()
}

/// CSV text with header. Floats use the shortest round-trip form, so
/// reruns produce identical bytes.
pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", r.quantity, r.t, r.estimate, r.std_error, r.n_pairs, r.dt, r.seed);
    }
    s
}
