//! Configuration-space integrals on knots and their combinatorial oracles.

mod gauss;
mod integral;
mod projection;
mod proposal;
mod v2;

pub use gauss::{gauss_matrix, linking_number, writhe, ConfintError, IntegralEstimate, Method, QuadratureConfig};
pub use integral::integral_i_d;
pub use projection::{
    count_crossings, crossing_projection_lk, over_crossing_lk, CrossingCount, polyak_viro_v2, polyak_viro_v2_based, Crossing, Projection, MAX_PROJECTION_ATTEMPTS,
};
pub use v2::{v2, v2_raw};
pub(crate) use projection::CrossingIndex;
