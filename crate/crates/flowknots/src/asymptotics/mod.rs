//! Asymptotic quantities of flows: long orbit segments are closed by short
//! paths, measured with knot and link invariants, and scaled by powers of
//! the flow time.

mod bounds;
mod knots;
mod oracles;
mod orbit;
mod pairs;
mod report;

use thiserror::Error;

use crate::confint::ConfintError;
use crate::curves::CurveError;
use crate::fields::FieldError;

pub use bounds::{bounds_from_survey, bounds_report, BoundsConfig, CAUCHY_SCHWARZ, BoundsReport, Inequality, NormalizedBounds};
pub use knots::{asymptotic_i_d, invariance_check, invariance_from_surveys, short_path_sensitivity, InvarianceReport, SensitivityReport, SensitivityRung};
pub use oracles::{biot_savart_helicity, tube_pair_flux, tube_pair_helicity, tube_pair_q, tube_pair_quadratic_helicity};
pub use pairs::{
    crossing_number, helicity, pair_survey, pairwise_asymptotic_lk, quadratic_helicity, PairQuantity, PairRow, PairSurvey,
    SurveyConfig,
};
pub use report::{
    csv_rows, write_csv, AsymptoticEstimate, ConvergenceReport, CsvRow, Normalization, RungEstimate, TLadder, ValueSe,
    CSV_HEADER,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("closed orbits intersect at T = {0} even after jittering by ±dt")]
    Intersecting(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Confint(#[from] ConfintError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}
