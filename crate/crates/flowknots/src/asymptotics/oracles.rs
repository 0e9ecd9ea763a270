//! Independent helicity oracles: the Biot–Savart double integral and closed
//! forms for the linked tube pair.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::confint::{IntegralEstimate, Method};
use crate::fields::{draw_inside, VectorField};
use crate::rng;
use crate::stats::Accum;

const BS_TAG: u64 = 0xb10_7a5a;
const BS_BLOCK: usize = 1 << 16;
/// Pairs closer than this fraction of the diameter are redrawn.
const BS_CUTOFF: f64 = 1e-6;

/// Monte Carlo of (1/4π)∬ (X(x) × X(y))·(x − y)/|x − y|³ dμ dμ over
/// uniform pairs. Near the diagonal the integrand grows only like
/// 1/|x − y|, so plain uniform sampling has finite variance.
pub fn biot_savart_helicity(x: &VectorField<f64>, mc_pairs: usize, seed: u64) -> IntegralEstimate {
    let d = &x.domain;
    let (lo, hi) = d.bounding_box();
    let cutoff = BS_CUTOFF * d.diameter();
    let base = rng::subseed(seed, BS_TAG);
    let blocks = mc_pairs.div_ceil(BS_BLOCK);
    let parts: Vec<(Accum, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(base, b as u64);
            let count = BS_BLOCK.min(mc_pairs - b * BS_BLOCK);
            let mut acc = Accum::default();
            let mut attempts = 0;
            let mut rejected = 0;
            for _ in 0..count {
                let p = draw_inside(d, lo, hi, &mut r, &mut attempts);
                let q = loop {
                    let q = draw_inside(d, lo, hi, &mut r, &mut attempts);
                    if p.dist(q) >= cutoff {
                        break q;
                    }
                    rejected += 1;
                };
                let diff = p - q;
                let r3 = diff.norm().powi(3);
                acc.push(x.eval(p).cross(x.eval(q)).dot(diff) / (4.0 * PI * r3));
            }
            (acc, rejected)
        })
        .collect();
    let (acc, rejections) = parts.into_iter().fold((Accum::default(), 0), |(a, r), (b, s)| (a.merge(b), r + s));
    let v2 = d.volume().powi(2);
    IntegralEstimate {
        value: v2 * acc.mean(),
        std_error: v2 * acc.std_error(),
        samples: acc.n,
        rejections,
        method: Method::MonteCarlo,
        warning: None,
    }
}

/// Flux of one tube: ∫ v0 (1 − (s/r)²)² dA = π v0 r²/3.
pub fn tube_pair_flux(v0: f64, r: f64) -> f64 {
    PI * v0 * r * r / 3.0
}

/// 2Φ²: two once-linked tubes, each pair of fibres counted in both orders.
pub fn tube_pair_helicity(v0: f64, r: f64) -> f64 {
    2.0 * tube_pair_flux(v0, r).powi(2)
}

/// Q = ∫_tube (v/L)² dμ with L = 2πρ the length of the fibre through the
/// point. With ρ = 1 + s cos θ, integrating the fibre angle and θ in closed
/// form leaves ∫₀^r v(s)² s/√(1 − s²) ds, done here by Gauss–Legendre.
pub fn tube_pair_q(v0: f64, r: f64) -> f64 {
    // 20-point Gauss-Legendre on [0, r], applied on 8 panels.
    let (nodes, weights) = gauss_legendre_20();
    let panels = 8;
    let h = r / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            let s = a + 0.5 * h * (x + 1.0);
            let u = s / r;
            let v = v0 * (1.0 - u * u).powi(2);
            sum += 0.5 * h * w * v * v * s / (1.0 - s * s).sqrt();
        }
    }
    sum
}

/// 2Q², from the same fibre-counting argument as the helicity.
pub fn tube_pair_quadratic_helicity(v0: f64, r: f64) -> f64 {
    2.0 * tube_pair_q(v0, r).powi(2)
}

fn gauss_legendre_20() -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_20 from the Chebyshev guesses.
    let n = 20;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}
