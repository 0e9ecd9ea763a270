//! Small geometric kernels shared by the curve and integral code.

use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Distance between segments [p0,p1] and [q0,q1].
pub fn segment_distance<S: Scalar>(p0: Vec3<S>, p1: Vec3<S>, q0: Vec3<S>, q1: Vec3<S>) -> S {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm2();
    let e = d2.norm2();
    let f = d2.dot(r);
    let zero = S::zero();
    let one = S::one();
    let clamp = |x: S| x.max(zero).min(one);
    let (s, t);
    if a <= S::epsilon() && e <= S::epsilon() {
        return r.norm();
    }
    if a <= S::epsilon() {
        s = zero;
        t = clamp(f / e);
    } else {
        let c = d1.dot(r);
        if e <= S::epsilon() {
            t = zero;
            s = clamp(-c / a);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > zero { clamp((b * f - c * e) / denom) } else { zero };
            let mut t0 = (b * s0 + f) / e;
            if t0 < zero {
                t0 = zero;
                s0 = clamp(-c / a);
            } else if t0 > one {
                t0 = one;
                s0 = clamp((b - c) / a);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Signed solid angle subtended by the segment pair (p1,p2), (p3,p4) in the
/// Gauss map; summing over all pairs of two closed polygons and dividing by
/// 4π gives their linking number exactly. Degenerate (coplanar or touching)
/// pairs contribute 0.
#[inline]
pub fn segment_pair_solid_angle<S: Scalar>(p1: Vec3<S>, p2: Vec3<S>, p3: Vec3<S>, p4: Vec3<S>) -> S {
    let r13 = p3 - p1;
    let r14 = p4 - p1;
    let r23 = p3 - p2;
    let r24 = p4 - p2;
    let r12 = p2 - p1;
    let r34 = p4 - p3;
    let s = r34.cross(r12).dot(r13);
    if s == S::zero() {
        return S::zero();
    }
    let n1 = r13.cross(r14);
    let n2 = r14.cross(r24);
    let n3 = r24.cross(r23);
    let n4 = r23.cross(r13);
    let (l1, l2, l3, l4) = (n1.norm(), n2.norm(), n3.norm(), n4.norm());
    let zero = S::zero();
    if l1 == zero || l2 == zero || l3 == zero || l4 == zero {
        return zero;
    }
    let (n1, n2, n3, n4) = (n1 / l1, n2 / l2, n3 / l3, n4 / l4);
    let one = S::one();
    let asin = |x: S| x.max(-one).min(one).asin();
    let omega = asin(n1.dot(n2)) + asin(n2.dot(n3)) + asin(n3.dot(n4)) + asin(n4.dot(n1));
    if s > zero {
        omega
    } else {
        -omega
    }
}

/// Biot–Savart integral of the segment [a,b] at point y:
/// ∫ t × (y − x)/|y − x|³ ds over the segment, with t the unit direction.
#[inline]
pub fn segment_biot_savart<S: Scalar>(a: Vec3<S>, b: Vec3<S>, y: Vec3<S>) -> Vec3<S> {
    let d = b - a;
    let len = d.norm();
    let u = d / len;
    let ra = y - a;
    let rb = y - b;
    // Component of (y - a) perpendicular to the segment.
    let c = u.cross(ra);
    let rho2 = c.norm2();
    if rho2 == S::zero() {
        return Vec3::zero();
    }
    let na = ra.norm();
    let nb = rb.norm();
    let f = (ra.dot(u) / na - rb.dot(u) / nb) / rho2;
    c * f
}
