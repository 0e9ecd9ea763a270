//! The energy inequality chain: E_{3/2} against the crossing number, the
//! quadratic helicity and the helicity.

use serde::{Deserialize, Serialize};

use crate::fields::{energy, EnergyExponent, VectorField};
use crate::rng;

use super::pairs::{pair_survey, PairQuantity, PairSurvey, SurveyConfig};
use super::report::{Normalization, ValueSe};
use super::AsymptoticError;

const ENERGY_TAG: u64 = 0xe32;
/// The one link of the chain that is Cauchy–Schwarz on the pair measure.
pub const CAUCHY_SCHWARZ: &str = "K (H2)^(3/8) >= K |H|^(3/4)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub survey: SurveyConfig,
    pub energy_samples: usize,
}

/// lhs ≥ rhs, judged by the margin in combined standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub normalization: Normalization,
    pub lhs: ValueSe,
    pub rhs: ValueSe,
    /// (lhs − rhs) / combined std error; infinite when both are exact.
    pub margin_sigma: f64,
    /// False only for a violation beyond 3σ.
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, normalization: Normalization, lhs: ValueSe, rhs: ValueSe) -> Self {
        let gap = lhs.value - rhs.value;
        let se = lhs.std_error.hypot(rhs.std_error);
        let margin_sigma = if se > 0.0 {
            gap / se
        } else if gap >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        Inequality { name: name.into(), normalization, lhs, rhs, margin_sigma, holds: gap >= -3.0 * se }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedBounds {
    pub normalization: Normalization,
    pub e32: ValueSe,
    pub crossing_number: ValueSe,
    pub helicity: ValueSe,
    pub quadratic_helicity: ValueSe,
    pub inequalities: Vec<Inequality>,
}

impl NormalizedBounds {
    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub volume: f64,
    pub t_max: f64,
    pub n_pairs: usize,
    pub raw: NormalizedBounds,
    pub probability: NormalizedBounds,
}

impl BoundsReport {
    /// Each inequality in the normalization its derivation lives in:
    /// Cauchy–Schwarz needs the pair measure to be a probability measure,
    /// while the crossing-number bounds and c² ≥ H² are stated for the raw
    /// measure μ×μ.
    pub fn canonical(&self) -> Vec<&Inequality> {
        self.raw
            .inequalities
            .iter()
            .zip(&self.probability.inequalities)
            .map(|(r, p)| if r.name == CAUCHY_SCHWARZ { p } else { r })
            .collect()
    }

    pub fn canonical_holds(&self) -> bool {
        self.canonical().iter().all(|i| i.holds)
    }
}

/// f(x) with a spread from f(x ± se), clipping x at 0.
fn through(v: ValueSe, f: impl Fn(f64) -> f64) -> ValueSe {
    let x = v.value.max(0.0);
    let hi = f(x + v.std_error);
    let lo = f((x - v.std_error).max(0.0));
    ValueSe::new(f(x), 0.5 * (hi - lo).abs())
}

fn chain(norm: Normalization, e32: ValueSe, c: ValueSe, h: ValueSe, h2: ValueSe) -> NormalizedBounds {
    let k = (16.0 / std::f64::consts::PI).powf(0.25);
    let abs_h = ValueSe::new(h.value.abs(), h.std_error);
    let kc = through(c, |x| k * x.powf(0.75));
    let kh = through(abs_h, |x| k * x.powf(0.75));
    let kq = through(h2, |x| k * x.powf(0.375));
    let c2 = through(c, |x| x * x);
    let inequalities = vec![
        Inequality::new("E32 >= K c^(3/4)", norm, e32, kc),
        Inequality::new("K c^(3/4) >= K |H|^(3/4)", norm, kc, kh),
        Inequality::new("E32 >= K (H2)^(3/8)", norm, e32, kq),
        Inequality::new(CAUCHY_SCHWARZ, norm, kq, kh),
        Inequality::new("c^2 >= H2", norm, c2, h2),
    ];
    NormalizedBounds { normalization: norm, e32, crossing_number: c, helicity: h, quadratic_helicity: h2, inequalities }
}

/// Computes E_{3/2}, c, H and H² (one pair survey for the last three) and
/// evaluates the inequality chain E_{3/2} ≥ K c^{3/4} ≥ K |H|^{3/4},
/// E_{3/2} ≥ K (H²)^{3/8} ≥ K |H|^{3/4} and c² ≥ H², K = (16/π)^{1/4}, in
/// both normalizations.
pub fn bounds_report(x: &VectorField<f64>, cfg: &BoundsConfig) -> Result<BoundsReport, AsymptoticError> {
    let s = pair_survey(x, &cfg.survey)?;
    Ok(bounds_from_survey(x, &s, cfg.energy_samples))
}

/// As [`bounds_report`] for an existing survey of `x`.
pub fn bounds_from_survey(x: &VectorField<f64>, s: &PairSurvey, energy_samples: usize) -> BoundsReport {
    let top = s.ladder.times.len() - 1;
    let vol = s.volume;
    let e = energy(x, EnergyExponent::ThreeHalves, energy_samples, rng::subseed(s.seed, ENERGY_TAG));
    let e32 = ValueSe::new(e.value, e.std_error);
    let c = s.mean(PairQuantity::CrossingNumber, top);
    let h = s.mean(PairQuantity::Helicity, top);
    let h2 = s.mean(PairQuantity::QuadraticHelicity, top);
    let v2 = vol * vol;
    BoundsReport {
        volume: vol,
        t_max: s.ladder.t_max(),
        n_pairs: s.n_pairs(),
        raw: chain(Normalization::Raw, e32, c.scale(v2), h.scale(v2), h2.scale(v2)),
        probability: chain(Normalization::Probability, e32.scale(1.0 / vol), c, h, h2),
    }
}
