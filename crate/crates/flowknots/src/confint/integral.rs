//! Configuration-space integral I_D(K) for a trivalent diagram.
//!
//! Circle vertices are integrated on a product grid over the polygon's
//! segments (segment-integrated kernels, exact for chords), free vertices by
//! importance-sampled Monte Carlo in R³. The pulled-back form is expanded
//! into terms: each edge contributes one 2-form component, chosen so that
//! every vertex receives exactly its dimension (1 for a circle vertex, 3 for
//! a free one). A term's sign is the parity of the resulting slot order.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::gauss::{gauss_matrix, prepared, writhe_prepared, ConfintError, IntegralEstimate, Method, QuadratureConfig};
use super::proposal::{dot, norm2, sub, Proposal, P3};
use crate::curves::PolyCurve;
use crate::diagrams::{canonicalize, Label, TrivalentDiagram};
use crate::geom::segment_biot_savart;
use crate::rng;
use crate::scalar::Scalar;
use crate::stats::Accum;
use crate::vec3::Vec3;

const BLOCK: usize = 1024;

#[derive(Clone, Copy, Debug)]
enum EdgeKind {
    /// Circle position of the other end.
    Chord(usize),
    /// Circle position and free index.
    Leg(usize, usize),
    /// Free indices, lower label first.
    Inner(usize, usize),
}

/// One term of the expanded form: directions of the leg ends (indexed by
/// circle position) and the component taken on each inner edge.
#[derive(Clone, Debug)]
struct Term {
    sign: f64,
    leg_dir: Vec<u8>,
    inner: Vec<InnerComp>,
}

#[derive(Clone, Copy, Debug)]
enum InnerComp {
    /// dy_f,a ∧ dy_g,b
    Split(u8, u8),
    /// dy_f,a ∧ dy_f,b with a < b
    Lower(u8, u8),
    /// dy_g,a ∧ dy_g,b with a < b
    Upper(u8, u8),
}

struct Plan {
    k: usize,
    s: usize,
    /// For each circle position: partner circle position (chord) or free index (leg).
    partner: Vec<EdgeKind>,
    inner: Vec<(usize, usize)>,
    terms: Vec<Term>,
    /// Earlier free neighbours of each free vertex, for the proposal.
    earlier: Vec<Vec<usize>>,
    has_chord: bool,
}

fn parity(p: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

impl Plan {
    fn new(d: &TrivalentDiagram) -> Plan {
        let circle = d.circle();
        let free = d.free();
        let k = circle.len();
        let s = free.len();
        let cpos = |l: Label| circle.iter().position(|&c| c == l);
        let fidx = |l: Label| free.iter().position(|&f| f == l);

        // Slots ordered by label: one per circle vertex, three per free vertex.
        let mut labels: Vec<Label> = circle.iter().chain(free).copied().collect();
        labels.sort_unstable();
        let mut base = std::collections::HashMap::new();
        let mut next = 0usize;
        for l in &labels {
            base.insert(*l, next);
            next += if cpos(*l).is_some() { 1 } else { 3 };
        }

        let mut kinds = Vec::new();
        let mut partner = vec![EdgeKind::Chord(0); k];
        let mut inner = Vec::new();
        for &(a, b) in d.edges() {
            let kind = match (cpos(a), cpos(b)) {
                (Some(i), Some(j)) => {
                    partner[i] = EdgeKind::Chord(j);
                    partner[j] = EdgeKind::Chord(i);
                    EdgeKind::Chord(j)
                }
                (Some(i), None) => {
                    let f = fidx(b).unwrap();
                    partner[i] = EdgeKind::Leg(i, f);
                    EdgeKind::Leg(i, f)
                }
                (None, Some(j)) => {
                    let f = fidx(a).unwrap();
                    partner[j] = EdgeKind::Leg(j, f);
                    EdgeKind::Leg(j, f)
                }
                (None, None) => {
                    let (f, g) = (fidx(a).unwrap(), fidx(b).unwrap());
                    inner.push((f, g));
                    EdgeKind::Inner(f, g)
                }
            };
            kinds.push((a, b, kind));
        }

        // How many of a free vertex's three slots each inner edge end takes:
        // 1 each, or both on one end.
        let mut terms = Vec::new();
        let ni = inner.len();
        let mut split = vec![0u8; ni];
        loop {
            let mut count = vec![0usize; s];
            for (e, &(f, g)) in inner.iter().enumerate() {
                match split[e] {
                    0 => {
                        count[f] += 1;
                        count[g] += 1;
                    }
                    1 => count[f] += 2,
                    _ => count[g] += 2,
                }
            }
            for &(_, _, kind) in &kinds {
                if let EdgeKind::Leg(_, f) = kind {
                    count[f] += 1;
                }
            }
            if count.iter().all(|&c| c == 3) {
                expand_directions(&kinds, &inner, &split, &base, free, s, k, &mut terms);
            }
            // Next split assignment.
            let mut e = 0;
            while e < ni {
                split[e] += 1;
                if split[e] < 3 {
                    break;
                }
                split[e] = 0;
                e += 1;
            }
            if e == ni {
                break;
            }
        }

        let mut earlier = vec![Vec::new(); s];
        for &(f, g) in &inner {
            let (lo, hi) = (f.min(g), f.max(g));
            earlier[hi].push(lo);
        }
        let has_chord = kinds.iter().any(|k| matches!(k.2, EdgeKind::Chord(..)));
        Plan { k, s, partner, inner, terms, earlier, has_chord }
    }
}

/// Ends of a free vertex: (edge index, slots taken).
#[allow(clippy::too_many_arguments)]
fn expand_directions(
    kinds: &[(Label, Label, EdgeKind)],
    inner: &[(usize, usize)],
    split: &[u8],
    base: &std::collections::HashMap<Label, usize>,
    free: &[Label],
    s: usize,
    k: usize,
    out: &mut Vec<Term>,
) {
    // ends[f] = list of (edge position in kinds, slots)
    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s];
    let mut inner_pos = 0;
    for (e, &(_, _, kind)) in kinds.iter().enumerate() {
        match kind {
            EdgeKind::Leg(_, f) => ends[f].push((e, 1)),
            EdgeKind::Inner(f, g) => {
                match split[inner_pos] {
                    0 => {
                        ends[f].push((e, 1));
                        ends[g].push((e, 1));
                    }
                    1 => ends[f].push((e, 2)),
                    _ => ends[g].push((e, 2)),
                }
                inner_pos += 1;
            }
            EdgeKind::Chord(..) => {}
        }
    }
    let _ = inner;
    // Per free vertex, the valid ways to hand out directions 0,1,2.
    let mut choices: Vec<Vec<Vec<(usize, Vec<u8>)>>> = Vec::with_capacity(s);
    for end in &ends {
        let mut opts = Vec::new();
        for p in PERMS {
            let mut at = 0;
            let mut ok = true;
            let mut assign = Vec::new();
            for &(e, n) in end {
                let dirs: Vec<u8> = p[at..at + n].to_vec();
                if n == 2 && dirs[0] > dirs[1] {
                    ok = false;
                }
                assign.push((e, dirs));
                at += n;
            }
            if ok {
                opts.push(assign);
            }
        }
        choices.push(opts);
    }
    let mut idx = vec![0usize; s];
    loop {
        // Directions per (edge, end): for each edge collect the free-side dirs.
        let mut per_edge: Vec<Vec<(usize, u8)>> = vec![Vec::new(); kinds.len()];
        for f in 0..s {
            for (e, dirs) in &choices[f][idx[f]] {
                for &a in dirs {
                    per_edge[*e].push((f, a));
                }
            }
        }
        let mut slots = Vec::new();
        let mut leg_dir = vec![0u8; k];
        let mut comps = Vec::new();
        for (e, &(a, b, kind)) in kinds.iter().enumerate() {
            let mut pair = match kind {
                EdgeKind::Chord(..) => [base[&a], base[&b]],
                EdgeKind::Leg(i, f) => {
                    let dir = per_edge[e][0].1;
                    leg_dir[i] = dir;
                    let c = if base.contains_key(&a) && free.contains(&b) { a } else { b };
                    [base[&c], base[&free[f]] + dir as usize]
                }
                EdgeKind::Inner(f, g) => {
                    let on_f: Vec<u8> = per_edge[e].iter().filter(|x| x.0 == f).map(|x| x.1).collect();
                    let on_g: Vec<u8> = per_edge[e].iter().filter(|x| x.0 == g).map(|x| x.1).collect();
                    let bf = base[&free[f]];
                    let bg = base[&free[g]];
                    if on_f.len() == 1 {
                        comps.push(InnerComp::Split(on_f[0], on_g[0]));
                        [bf + on_f[0] as usize, bg + on_g[0] as usize]
                    } else if on_f.len() == 2 {
                        comps.push(InnerComp::Lower(on_f[0], on_f[1]));
                        [bf + on_f[0] as usize, bf + on_f[1] as usize]
                    } else {
                        comps.push(InnerComp::Upper(on_g[0], on_g[1]));
                        [bg + on_g[0] as usize, bg + on_g[1] as usize]
                    }
                }
            };
            pair.sort_unstable();
            slots.extend_from_slice(&pair);
        }
        out.push(Term { sign: parity(&slots), leg_dir, inner: comps });

        let mut f = 0;
        while f < s {
            idx[f] += 1;
            if idx[f] < choices[f].len() {
                break;
            }
            idx[f] = 0;
            f += 1;
        }
        if f == s {
            break;
        }
    }
}

#[inline]
fn levi(a: u8, b: u8, c: u8) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Inner-edge 2-form component; `r` = y_g − y_f for the edge f → g.
fn inner_value(c: InnerComp, r: P3) -> f64 {
    let r3 = norm2(r).powf(1.5) * 4.0 * PI;
    match c {
        InnerComp::Split(a, b) => -(0..3).map(|e| levi(a, b, e as u8) * r[e]).sum::<f64>() / r3,
        InnerComp::Lower(a, b) | InnerComp::Upper(a, b) => (0..3).map(|e| levi(a, b, e as u8) * r[e]).sum::<f64>() / r3,
    }
}

/// Tensor index in base 3 over the given circle positions.
fn leg_index(legs: &[usize], dirs: &[u8]) -> usize {
    legs.iter().fold(0, |acc, &p| acc * 3 + dirs[p] as usize)
}

struct Grid<'a> {
    pts: &'a [P3],
}

impl Grid<'_> {
    fn n(&self) -> usize {
        self.pts.len()
    }

    /// Segment-integrated Biot–Savart field of every segment at y, over 4π,
    /// and the distance from y to the polygon.
    fn legs_at(&self, y: P3, want: bool) -> (Vec<P3>, f64) {
        let n = self.n();
        let mut w = if want { Vec::with_capacity(n) } else { Vec::new() };
        let mut dmin = f64::INFINITY;
        for i in 0..n {
            let a = self.pts[i];
            let b = self.pts[(i + 1) % n];
            let d = sub(b, a);
            let ra = sub(y, a);
            let l2 = norm2(d);
            let al = dot(ra, d) / l2;
            let dist2 = if al <= 0.0 {
                norm2(ra)
            } else if al >= 1.0 {
                norm2(sub(y, b))
            } else {
                norm2(ra) - al * al * l2
            };
            dmin = dmin.min(dist2.max(0.0));
            if want {
                let v = segment_biot_savart(Vec3::<f64>::from_f64(a), Vec3::from_f64(b), Vec3::from_f64(y)).to_f64();
                w.push([v[0] / (4.0 * PI), v[1] / (4.0 * PI), v[2] / (4.0 * PI)]);
            }
        }
        (w, dmin.sqrt())
    }
}

/// Sum over the k cyclic rotations of the ordered circle domain, for a
/// diagram whose circle vertices are all legs. `phi[p]` holds the per-segment
/// leg field at circle position p; `coef` is indexed by the leg directions in
/// circle-position order.
fn legs_only_sum(phi: &[&[P3]], coef: &[f64], k: usize, n: usize) -> f64 {
    let dim = |m: usize| 3usize.pow(m as u32);
    let mut inv_fact = vec![1.0; k + 1];
    for r in 1..=k {
        inv_fact[r] = inv_fact[r - 1] / r as f64;
    }
    let mut total = 0.0;
    let mut tmp = vec![0.0; dim(k)];
    for r in 0..k {
        let order: Vec<usize> = (0..k).map(|j| (r + j) % k).collect();
        // p[m] = tensor over the first m processed positions.
        let mut p: Vec<Vec<f64>> = (0..=k).map(|m| vec![0.0; dim(m)]).collect();
        p[0][0] = 1.0;
        for i in 0..n {
            for m in (1..=k).rev() {
                for j in (0..m).rev() {
                    // p[j] ⊗ φ_{j}(i) ⊗ … ⊗ φ_{m-1}(i) / (m − j)!
                    let src = &p[j];
                    let mut cur_len = src.len();
                    tmp[..cur_len].copy_from_slice(src);
                    for &pos in &order[j..m] {
                        let v = phi[pos][i];
                        for t in (0..cur_len).rev() {
                            let x = tmp[t];
                            tmp[3 * t] = x * v[0];
                            tmp[3 * t + 1] = x * v[1];
                            tmp[3 * t + 2] = x * v[2];
                        }
                        cur_len *= 3;
                    }
                    let w = inv_fact[m - j];
                    let (lo, hi) = p.split_at_mut(m);
                    let _ = lo;
                    for (d, s) in hi[0].iter_mut().zip(&tmp[..cur_len]) {
                        *d += w * s;
                    }
                }
            }
        }
        // Contract with coef, mapping processed order back to circle positions.
        for (idx, v) in p[k].iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let mut dirs = vec![0u8; k];
            let mut t = idx;
            for j in (0..k).rev() {
                dirs[order[j]] = (t % 3) as u8;
                t /= 3;
            }
            let all: Vec<usize> = (0..k).collect();
            total += v * coef[leg_index(&all, &dirs)];
        }
    }
    total
}

/// If the diagram is a single free vertex with three legs and its
/// coefficients are c·ε, returns c.
fn tripod_scale(plan: &Plan, coef: &[f64]) -> Option<f64> {
    if plan.k != 3 || plan.s != 1 {
        return None;
    }
    let c = coef[5]; // directions (0,1,2)
    for (i, v) in coef.iter().enumerate() {
        if *v != c * levi((i / 9) as u8, (i / 3 % 3) as u8, (i % 3) as u8) {
            return None;
        }
    }
    Some(c)
}

/// Σ_{i<j<l} det(w_i, w_j, w_l) in one pass. Equal indices contribute
/// nothing to an antisymmetric contraction.
fn ordered_triple_det(w: &[P3]) -> f64 {
    let mut s1 = [0.0; 3];
    let mut s2 = [0.0; 3];
    let mut s3 = 0.0;
    for v in w {
        s3 += dot(s2, *v);
        let c = [s1[1] * v[2] - s1[2] * v[1], s1[2] * v[0] - s1[0] * v[2], s1[0] * v[1] - s1[1] * v[0]];
        s2 = [s2[0] + c[0], s2[1] + c[1], s2[2] + c[2]];
        s1 = [s1[0] + v[0], s1[1] + v[1], s1[2] + v[2]];
    }
    s3
}

/// Chord diagrams: nested sum over ordered segment tuples, the last level
/// through row suffix sums.
fn chords_only_sum(g: &[Vec<f64>], partner: &[usize], k: usize) -> f64 {
    let n = g.len();
    let suffix: Vec<Vec<f64>> = g
        .iter()
        .map(|row| {
            let mut s = vec![0.0; n + 1];
            for j in (0..n).rev() {
                s[j] = s[j + 1] + row[j];
            }
            s
        })
        .collect();
    let mut total = 0.0;
    for r in 0..k {
        let order: Vec<usize> = (0..k).map(|j| (r + j) % k).collect();
        let mut where_: Vec<usize> = vec![0; k];
        for (j, &p) in order.iter().enumerate() {
            where_[p] = j;
        }
        // Processing index of each position's chord partner.
        let mate: Vec<usize> = order.iter().map(|&p| where_[partner[p]]).collect();
        let mut idx = vec![0usize; k];
        total += chord_level(g, &suffix, &mate, &mut idx, 0, 0, 0, 1.0);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn chord_level(g: &[Vec<f64>], suffix: &[Vec<f64>], mate: &[usize], idx: &mut [usize], level: usize, prev: usize, run: usize, acc: f64) -> f64 {
    let n = g.len();
    let k = mate.len();
    if level == k - 1 {
        let row = idx[mate[level]];
        let tie = g[row][prev] / (run + 1) as f64;
        return acc * (suffix[row][prev + 1] + tie);
    }
    let mut sum = 0.0;
    let start = if level == 0 { 0 } else { prev };
    for i in start..n {
        let (w, nrun) = if level > 0 && i == prev { (1.0 / (run + 1) as f64, run + 1) } else { (1.0, 1) };
        let f = if mate[level] < level { g[idx[mate[level]]][i] } else { 1.0 };
        if f == 0.0 {
            continue;
        }
        idx[level] = i;
        sum += chord_level(g, suffix, mate, idx, level + 1, i, nrun, acc * w * f);
    }
    sum
}

/// Diagrams with both chords and legs: direct sum over ordered tuples,
/// contracting legs at the leaves. Cost grows as n^k; meant for coarse grids.
fn mixed_sum(g: &[Vec<f64>], phi: &[Option<&[P3]>], partner: &[EdgeKind], coef: &[f64], legs: &[usize], k: usize) -> f64 {
    let n = g.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    for r in 0..k {
        let order: Vec<usize> = (0..k).map(|j| (r + j) % k).collect();
        total += mixed_level(g, phi, partner, coef, legs, &order, &mut idx, 0, 0, 0, 1.0, n);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn mixed_level(
    g: &[Vec<f64>],
    phi: &[Option<&[P3]>],
    partner: &[EdgeKind],
    coef: &[f64],
    legs: &[usize],
    order: &[usize],
    idx: &mut [usize],
    level: usize,
    prev: usize,
    run: usize,
    acc: f64,
    n: usize,
) -> f64 {
    let k = order.len();
    if level == k {
        // idx is indexed by circle position here.
        let mut prod = acc;
        for (p, kind) in partner.iter().enumerate() {
            if let EdgeKind::Chord(q) = kind {
                if p < *q {
                    prod *= g[idx[p]][idx[*q]];
                }
            }
        }
        if prod == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        let nl = legs.len();
        for t in 0..3usize.pow(nl as u32) {
            let c = coef[t];
            if c == 0.0 {
                continue;
            }
            let mut v = c;
            let mut u = t;
            for j in (0..nl).rev() {
                let p = legs[j];
                v *= phi[p].unwrap()[idx[p]][u % 3];
                u /= 3;
            }
            s += v;
        }
        return prod * s;
    }
    let mut sum = 0.0;
    let start = if level == 0 { 0 } else { prev };
    for i in start..n {
        let (w, nrun) = if level > 0 && i == prev { (1.0 / (run + 1) as f64, run + 1) } else { (1.0, 1) };
        idx[order[level]] = i;
        sum += mixed_level(g, phi, partner, coef, legs, order, idx, level + 1, i, nrun, acc * w, n);
    }
    sum
}

/// I_D(K): the configuration-space integral of the diagram over the knot.
/// Chord diagrams use the grid alone; diagrams with free vertices add Monte
/// Carlo over their positions. The single chord reproduces the writhe.
pub fn integral_i_d<S: Scalar>(k: &PolyCurve<S>, d: &TrivalentDiagram, q: &QuadratureConfig) -> Result<IntegralEstimate, ConfintError> {
    let c = prepared(k, q)?;
    if d.k() == 2 && d.s() == 0 {
        return Ok(writhe_prepared(&c, q.diagonal_cutoff));
    }
    // Labels carry orientation, so integrate the canonical representative:
    // d = sign · canonical, which keeps I_D consistent with the AS relation.
    let (canon, sign) = canonicalize(d);
    let sign = sign as f64;
    let d = &canon;
    let plan = Plan::new(d);
    // Orientation of the configuration space relative to the slot order:
    // (−1)^(E+1) with E edges. This is the convention under which
    // Σ W(D) I_D / |Aut D| is invariant for weight systems built through STU
    // by the diagram module, and it leaves the single chord equal to the writhe.
    let orient = sign * if d.edges().len() % 2 == 1 { 1.0 } else { -1.0 };
    let n = c.segment_count();
    if plan.s == 0 {
        let g = gauss_matrix(&c);
        let partner: Vec<usize> = plan
            .partner
            .iter()
            .map(|e| match e {
                EdgeKind::Chord(j) => *j,
                _ => unreachable!(),
            })
            .collect();
        // One chord diagram term; its sign is the parity of the chord slots.
        let term = plan.terms.first().map_or(1.0, |t| t.sign);
        let v = orient * term * chords_only_sum(&g, &partner, plan.k);
        return Ok(IntegralEstimate::grid(v, (n as u64).pow(plan.k as u32)));
    }
    let pts: Vec<P3> = c.points().iter().map(|p| p.to_f64()).collect();
    let diam = c.diameter().as_f64();
    let eps = q.diagonal_cutoff * diam;
    let proposal = Proposal::new(&pts, diam);
    let grid = Grid { pts: &pts };
    let g = if plan.has_chord { gauss_matrix(&c) } else { Vec::new() };
    let legs: Vec<usize> = (0..plan.k).filter(|&p| matches!(plan.partner[p], EdgeKind::Leg(..))).collect();
    let mut has_leg = vec![false; plan.s];
    for e in &plan.partner {
        if let EdgeKind::Leg(_, f) = e {
            has_leg[*f] = true;
        }
    }

    let samples = q.free_vertex_samples.max(1);
    let blocks = samples.div_ceil(BLOCK);
    let results: Vec<(Accum, u64, bool)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(q.rng_seed, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut acc = Accum::default();
            let mut rejected = 0u64;
            let mut bad = false;
            for _ in 0..count {
                let (ys, fields, dens) = loop {
                    let mut ys: Vec<P3> = Vec::with_capacity(plan.s);
                    let mut fields = Vec::with_capacity(plan.s);
                    let mut dens = 1.0;
                    let mut ok = true;
                    for f in 0..plan.s {
                        let near: Vec<P3> = plan.earlier[f].iter().map(|&e| ys[e]).collect();
                        let y = proposal.sample(&mut r, &near);
                        dens *= proposal.density(y, &near);
                        let (w, dist) = grid.legs_at(y, has_leg[f]);
                        if dist < eps || ys.iter().any(|z| norm2(sub(*z, y)).sqrt() < eps) {
                            ok = false;
                            break;
                        }
                        ys.push(y);
                        fields.push(w);
                    }
                    if ok {
                        break (ys, fields, dens);
                    }
                    rejected += 1;
                };
                let coef = leg_coefficients(&plan, &legs, &ys);
                let phi: Vec<Option<&[P3]>> = plan
                    .partner
                    .iter()
                    .map(|e| match e {
                        EdgeKind::Leg(_, f) => Some(fields[*f].as_slice()),
                        _ => None,
                    })
                    .collect();
                let val = if plan.has_chord {
                    mixed_sum(&g, &phi, &plan.partner, &coef, &legs, plan.k)
                } else {
                    let phis: Vec<&[P3]> = phi.iter().map(|p| p.unwrap()).collect();
                    match tripod_scale(&plan, &coef) {
                        Some(c) => 3.0 * c * ordered_triple_det(phis[0]),
                        None => legs_only_sum(&phis, &coef, plan.k, n),
                    }
                };
                let x = val / dens;
                if !x.is_finite() {
                    bad = true;
                    continue;
                }
                acc.push(x);
            }
            (acc, rejected, bad)
        })
        .collect();
    let mut acc = Accum::default();
    let mut rejections = 0;
    for (a, rj, bad) in results {
        if bad {
            return Err(ConfintError::NonFinite);
        }
        acc = acc.merge(a);
        rejections += rj;
    }
    Ok(IntegralEstimate {
        value: orient * acc.mean(),
        std_error: acc.std_error(),
        samples: acc.n,
        rejections,
        method: Method::Hybrid,
        warning: None,
    })
}

/// Sum over terms of sign × inner-edge factors, as a tensor over leg
/// directions (legs in circle-position order).
fn leg_coefficients(plan: &Plan, legs: &[usize], ys: &[P3]) -> Vec<f64> {
    let mut coef = vec![0.0; 3usize.pow(legs.len() as u32)];
    let rs: Vec<P3> = plan.inner.iter().map(|&(f, g)| sub(ys[g], ys[f])).collect();
    for t in &plan.terms {
        let mut v = t.sign;
        for (c, r) in t.inner.iter().zip(&rs) {
            v *= inner_value(*c, *r);
        }
        coef[leg_index(legs, &t.leg_dir)] += v;
    }
    coef
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripod_terms_are_levi_civita() {
        let plan = Plan::new(&TrivalentDiagram::tripod());
        assert_eq!(plan.terms.len(), 6);
        let legs = [0, 1, 2];
        let coef = leg_coefficients(&plan, &legs, &[[0.0; 3]]);
        let c = coef[leg_index(&legs, &[0, 1, 2])];
        assert!(c.abs() == 1.0);
        for a in 0..3u8 {
            for b in 0..3u8 {
                for e in 0..3u8 {
                    assert_eq!(coef[leg_index(&legs, &[a, b, e])], c * levi(a, b, e));
                }
            }
        }
    }
}
