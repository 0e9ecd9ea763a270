use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;
use crate::vec3::Vec3;

pub type Stream = ChaCha8Rng;

/// Independent generator for task `index` under `seed`. Results depend only on
/// (seed, index), so parallel schedules reproduce serial output.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Derive a sub-seed for a named purpose, so unrelated consumers of one user
/// seed never share streams.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn uniform(r: &mut Stream) -> f64 {
    r.random::<f64>()
}

#[inline]
pub fn normal(r: &mut Stream) -> f64 {
    r.sample(StandardNormal)
}

pub fn unit_vector<S: Scalar>(r: &mut Stream) -> Vec3<S> {
    let z = 2.0 * uniform(r) - 1.0;
    let phi = 2.0 * std::f64::consts::PI * uniform(r);
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::from_f64([s * phi.cos(), s * phi.sin(), z])
}

pub fn in_box<S: Scalar>(r: &mut Stream, lo: Vec3<S>, hi: Vec3<S>) -> Vec3<S> {
    let (l, h) = (lo.to_f64(), hi.to_f64());
    Vec3::from_f64([
        l[0] + (h[0] - l[0]) * uniform(r),
        l[1] + (h[1] - l[1]) * uniform(r),
        l[2] + (h[2] - l[2]) * uniform(r),
    ])
}
