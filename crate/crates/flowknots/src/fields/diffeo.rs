use crate::scalar::Scalar;
use crate::vec3::{Mat3, Vec3};

use super::FieldError;

/// Volume-preserving diffeomorphism of R³ with closed-form inverse and
/// Jacobian.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeDiffeo<S> {
    Identity,
    /// Rotation by `angle` about the unit axis through the origin.
    Rotation { axis: Vec3<S>, angle: S },
    /// Adds `amplitude * sin(wavenumber * p[transverse])` to `p[direction]`.
    Shear { direction: usize, transverse: usize, amplitude: S, wavenumber: S },
}

impl<S: Scalar> VolumeDiffeo<S> {
    pub fn rotation(axis: Vec3<S>, angle: S) -> Result<Self, FieldError> {
        if !(axis.norm() > S::zero()) || !axis.is_finite() || !angle.is_finite() {
            return Err(FieldError::InvalidDiffeo("rotation axis must be a finite nonzero vector".into()));
        }
        Ok(VolumeDiffeo::Rotation { axis: axis.normalized(), angle })
    }

    pub fn shear(direction: usize, transverse: usize, amplitude: S, wavenumber: S) -> Result<Self, FieldError> {
        if direction > 2 || transverse > 2 || direction == transverse {
            return Err(FieldError::InvalidDiffeo(format!(
                "shear needs distinct axes in 0..3, got {direction} and {transverse}"
            )));
        }
        if !amplitude.is_finite() || !wavenumber.is_finite() {
            return Err(FieldError::InvalidDiffeo("shear parameters must be finite".into()));
        }
        Ok(VolumeDiffeo::Shear { direction, transverse, amplitude, wavenumber })
    }

    /// The shear (x, y, z) ↦ (x + a sin z, y, z).
    pub fn shear_xz(amplitude: S) -> Self {
        VolumeDiffeo::Shear { direction: 0, transverse: 2, amplitude, wavenumber: S::one() }
    }

    fn matrix(&self, angle: S) -> Mat3<S> {
        match self {
            VolumeDiffeo::Rotation { axis, .. } => Mat3::rotation(*axis, angle),
            _ => Mat3::identity(),
        }
    }

    pub fn forward(&self, p: Vec3<S>) -> Vec3<S> {
        match self {
            VolumeDiffeo::Identity => p,
            VolumeDiffeo::Rotation { angle, .. } => self.matrix(*angle).apply(p),
            VolumeDiffeo::Shear { direction, transverse, amplitude, wavenumber } => {
                let d = *amplitude * (*wavenumber * p.get(*transverse)).sin();
                p.with(*direction, p.get(*direction) + d)
            }
        }
    }

    pub fn inverse(&self, p: Vec3<S>) -> Vec3<S> {
        match self {
            VolumeDiffeo::Identity => p,
            VolumeDiffeo::Rotation { angle, .. } => self.matrix(-*angle).apply(p),
            VolumeDiffeo::Shear { direction, transverse, amplitude, wavenumber } => {
                let d = *amplitude * (*wavenumber * p.get(*transverse)).sin();
                p.with(*direction, p.get(*direction) - d)
            }
        }
    }

    /// Dg at `p`.
    pub fn jacobian(&self, p: Vec3<S>) -> Mat3<S> {
        match self {
            VolumeDiffeo::Identity => Mat3::identity(),
            VolumeDiffeo::Rotation { angle, .. } => self.matrix(*angle),
            VolumeDiffeo::Shear { direction, transverse, amplitude, wavenumber } => {
                let mut m = Mat3::identity();
                m.m[*direction][*transverse] = *amplitude * *wavenumber * (*wavenumber * p.get(*transverse)).cos();
                m
            }
        }
    }

    /// Transforms a normal at `p` (a point of the source) to the unit normal
    /// at `forward(p)`: n ↦ Dg⁻ᵀ n, renormalized.
    pub fn push_normal(&self, p: Vec3<S>, n: Vec3<S>) -> Vec3<S> {
        match self {
            VolumeDiffeo::Identity => n,
            VolumeDiffeo::Rotation { angle, .. } => self.matrix(*angle).apply(n),
            VolumeDiffeo::Shear { direction, transverse, .. } => {
                // Dg = I + c e_d e_tᵀ, so Dg⁻ᵀ = I − c e_t e_dᵀ.
                let c = self.jacobian(p).m[*direction][*transverse];
                n.with(*transverse, n.get(*transverse) - c * n.get(*direction)).normalized()
            }
        }
    }

    /// Box containing the image of the box [lo, hi].
    pub(crate) fn image_box(&self, lo: Vec3<S>, hi: Vec3<S>) -> (Vec3<S>, Vec3<S>) {
        match self {
            VolumeDiffeo::Identity => (lo, hi),
            VolumeDiffeo::Rotation { .. } => {
                let mut a = Vec3::new(S::infinity(), S::infinity(), S::infinity());
                let mut b = -a;
                for k in 0..8 {
                    let c = Vec3::new(
                        if k & 1 == 0 { lo.x } else { hi.x },
                        if k & 2 == 0 { lo.y } else { hi.y },
                        if k & 4 == 0 { lo.z } else { hi.z },
                    );
                    let q = self.forward(c);
                    for i in 0..3 {
                        a = a.with(i, a.get(i).min(q.get(i)));
                        b = b.with(i, b.get(i).max(q.get(i)));
                    }
                }
                (a, b)
            }
            VolumeDiffeo::Shear { direction, amplitude, .. } => {
                let a = amplitude.abs();
                (lo.with(*direction, lo.get(*direction) - a), hi.with(*direction, hi.get(*direction) + a))
            }
        }
    }
}
