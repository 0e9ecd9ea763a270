//! Finite-type knot invariants from configuration-space integrals, and their
//! asymptotic counterparts (helicity, quadratic helicity, crossing number,
//! energy bounds) for divergence-free fields on compact domains.

pub mod asymptotics;
pub mod confint;
pub mod curves;
pub mod diagrams;
pub mod fields;
pub mod geom;
pub mod rng;
pub mod scalar;
pub mod selftest;
pub mod stats;
pub mod vec3;

pub use scalar::Scalar;
pub use vec3::{Mat3, Vec3};

pub type Vec3d = Vec3<f64>;
pub type Curve = curves::PolyCurve<f64>;
pub type Field = fields::VectorField<f64>;
pub type Diffeo = fields::VolumeDiffeo<f64>;
