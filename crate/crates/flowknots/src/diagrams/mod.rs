//! Trivalent diagrams on an oriented circle, STU expansion and weight systems.
//!
//! A diagram is stored with explicit labels `1..=2n`. Labels carry the
//! orientation data: every edge points from its lower to its higher label and
//! each free vertex is oriented by the ascending cyclic order of its neighbours.
//! Relabeling therefore changes a diagram by a sign, which [`canonicalize`]
//! reports alongside the canonical representative.

mod parse;
mod weight;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use parse::{parse_diagram, parse_diagrams, ParseError};
pub use weight::{boundary_components, eval_weight, WeightError, WeightSystem};

pub type Label = u8;

/// Largest supported degree; canonicalization is brute force.
pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrivalentDiagram {
    degree: usize,
    circle: Vec<Label>,
    free: Vec<Label>,
    edges: Vec<(Label, Label)>,
}

/// Unchecked description of a diagram, as read from text or built by hand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDiagram {
    pub degree: Option<usize>,
    pub circle: Vec<usize>,
    pub free: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("wrong vertex count: expected {expected}, found {found}")]
    WrongVertexCount { expected: usize, found: usize },
    #[error("label {0} is out of range")]
    LabelOutOfRange(usize),
    #[error("label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("non-trivalent vertex: {label} has {edges} incident edges, expected {expected}")]
    NonTrivalent { label: usize, edges: usize, expected: usize },
    #[error("edge-count mismatch: expected {expected}, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("disconnected graph")]
    Disconnected,
    #[error("self-loop at {0}")]
    SelfLoop(usize),
    #[error("repeated edge ({0},{1})")]
    RepeatedEdge(usize, usize),
    #[error("edge ({0},{1}) references an unknown vertex")]
    UnknownVertex(usize, usize),
    #[error("degree {max} exceeds the supported maximum")]
    DegreeTooLarge { max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StuError {
    #[error("no free vertex")]
    NoFreeVertex,
    #[error("edge ({0},{1}) is not in the diagram")]
    EdgeNotFound(Label, Label),
    #[error("edge ({0},{1}) does not join a free vertex to a circle vertex")]
    NotSConfiguration(Label, Label),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("enumeration supports degrees 1 to 3, got {0}")]
    DegreeOutOfRange(usize),
}

/// Checks every invariant and returns the diagram with sorted edges and free
/// labels, or all violations found.
pub fn validate(raw: &RawDiagram) -> Result<TrivalentDiagram, Vec<DiagramError>> {
    let mut errs = Vec::new();
    let k = raw.circle.len();
    let s = raw.free.len();
    let nv = k + s;
    let degree = raw.degree.unwrap_or(nv / 2);
    if degree == 0 || nv != 2 * degree {
        errs.push(DiagramError::WrongVertexCount { expected: 2 * degree.max(1), found: nv });
    }
    if degree > MAX_DEGREE || nv > 2 * MAX_DEGREE {
        errs.push(DiagramError::DegreeTooLarge { max: MAX_DEGREE });
        return Err(errs);
    }
    let mut kind: BTreeMap<usize, bool> = BTreeMap::new(); // true = circle
    for (&l, is_circle) in raw.circle.iter().map(|l| (l, true)).chain(raw.free.iter().map(|l| (l, false))) {
        if l == 0 || l > nv {
            errs.push(DiagramError::LabelOutOfRange(l));
        }
        if kind.insert(l, is_circle).is_some() {
            errs.push(DiagramError::DuplicateLabel(l));
        }
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut valence: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &raw.edges {
        if a == b {
            errs.push(DiagramError::SelfLoop(a));
            continue;
        }
        if !kind.contains_key(&a) || !kind.contains_key(&b) {
            errs.push(DiagramError::UnknownVertex(a, b));
            continue;
        }
        let e = (a.min(b), a.max(b));
        if !seen.insert(e) {
            errs.push(DiagramError::RepeatedEdge(e.0, e.1));
            continue;
        }
        *valence.entry(a).or_default() += 1;
        *valence.entry(b).or_default() += 1;
        edges.push(e);
    }
    for (&l, &is_circle) in &kind {
        let expected = if is_circle { 1 } else { 3 };
        let got = valence.get(&l).copied().unwrap_or(0);
        if got != expected {
            errs.push(DiagramError::NonTrivalent { label: l, edges: got, expected });
        }
    }
    if (k + 3 * s) % 2 != 0 || raw.edges.len() != (k + 3 * s) / 2 {
        errs.push(DiagramError::EdgeCountMismatch { expected: (k + 3 * s) / 2, found: raw.edges.len() });
    }
    if k == 0 || !connected(&raw.circle, &kind.keys().copied().collect::<Vec<_>>(), &edges) {
        errs.push(DiagramError::Disconnected);
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    let mut free: Vec<Label> = raw.free.iter().map(|&l| l as Label).collect();
    free.sort_unstable();
    let mut edges: Vec<(Label, Label)> = edges.into_iter().map(|(a, b)| (a as Label, b as Label)).collect();
    edges.sort_unstable();
    Ok(TrivalentDiagram { degree, circle: raw.circle.iter().map(|&l| l as Label).collect(), free, edges })
}

fn connected(circle: &[usize], vertices: &[usize], edges: &[(usize, usize)]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    // The circle joins all circle vertices.
    for w in circle.windows(2) {
        adj.entry(w[0]).or_default().push(w[1]);
        adj.entry(w[1]).or_default().push(w[0]);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([vertices[0]]);
    seen.insert(vertices[0]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[]) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == vertices.len()
}

impl TrivalentDiagram {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Circle vertices in the circle's cyclic order.
    pub fn circle(&self) -> &[Label] {
        &self.circle
    }

    pub fn free(&self) -> &[Label] {
        &self.free
    }

    pub fn edges(&self) -> &[(Label, Label)] {
        &self.edges
    }

    pub fn k(&self) -> usize {
        self.circle.len()
    }

    pub fn s(&self) -> usize {
        self.free.len()
    }

    pub fn is_chord_diagram(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_circle_vertex(&self, l: Label) -> bool {
        self.circle.contains(&l)
    }

    pub fn neighbours(&self, l: Label) -> Vec<Label> {
        let mut n: Vec<Label> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == l { Some(b) } else if b == l { Some(a) } else { None })
            .collect();
        n.sort_unstable();
        n
    }

    pub fn to_raw(&self) -> RawDiagram {
        RawDiagram {
            degree: Some(self.degree),
            circle: self.circle.iter().map(|&l| l as usize).collect(),
            free: self.free.iter().map(|&l| l as usize).collect(),
            edges: self.edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect(),
        }
    }

    /// The single chord, whose integral is the writhe.
    pub fn single_chord() -> Self {
        TrivalentDiagram { degree: 1, circle: vec![1, 2], free: vec![], edges: vec![(1, 2)] }
    }

    /// Degree-2 chord diagram with crossing chords.
    pub fn crossed() -> Self {
        TrivalentDiagram { degree: 2, circle: vec![1, 2, 3, 4], free: vec![], edges: vec![(1, 3), (2, 4)] }
    }

    /// Degree-2 chord diagram with non-crossing chords.
    pub fn parallel() -> Self {
        TrivalentDiagram { degree: 2, circle: vec![1, 2, 3, 4], free: vec![], edges: vec![(1, 2), (3, 4)] }
    }

    /// Three circle vertices joined to one free vertex.
    pub fn tripod() -> Self {
        TrivalentDiagram { degree: 2, circle: vec![1, 2, 3], free: vec![4], edges: vec![(1, 4), (2, 4), (3, 4)] }
    }

    /// Chord diagram from a perfect matching of circle positions `0..2n`.
    pub fn from_chords(chords: &[(usize, usize)]) -> Result<Self, Vec<DiagramError>> {
        let n = chords.len();
        validate(&RawDiagram {
            degree: Some(n),
            circle: (1..=2 * n).collect(),
            free: vec![],
            edges: chords.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
        })
    }

    /// Apply a relabeling `map[old] = new` (index 0 unused).
    pub fn relabel(&self, map: &[Label]) -> (TrivalentDiagram, i32) {
        let circle: Vec<Label> = self.circle.iter().map(|&l| map[l as usize]).collect();
        let mut free: Vec<Label> = self.free.iter().map(|&l| map[l as usize]).collect();
        free.sort_unstable();
        let mut edges: Vec<(Label, Label)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (map[a as usize], map[b as usize]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let mut sign = 1;
        for &v in &self.free {
            let n = self.neighbours(v);
            sign *= cyclic_parity([map[n[0] as usize], map[n[1] as usize], map[n[2] as usize]]);
        }
        (TrivalentDiagram { degree: self.degree, circle, free, edges }, sign)
    }

    /// Vertex automorphisms preserving the oriented circle.
    pub fn automorphism_count(&self) -> usize {
        canonical_search(self).auts
    }

    /// True if some automorphism reverses an odd number of vertex
    /// orientations, forcing the diagram to equal its own negative.
    pub fn vanishes_by_symmetry(&self) -> bool {
        canonical_search(self).odd_aut
    }
}

impl fmt::Display for TrivalentDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Label]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        let edges = self.edges.iter().map(|(a, b)| format!("({a},{b})")).collect::<Vec<_>>().join(",");
        write!(f, "{}; circle=[{}]; free=[{}]; edges=[{}]", self.degree, list(&self.circle), list(&self.free), edges)
    }
}

/// Sign of the permutation sorting three distinct labels; +1 when their
/// cyclic order agrees with the ascending one.
fn cyclic_parity(t: [Label; 3]) -> i32 {
    let inv = (t[0] > t[1]) as i32 + (t[0] > t[2]) as i32 + (t[1] > t[2]) as i32;
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn degree(d: &TrivalentDiagram) -> usize {
    d.degree
}

struct Search {
    best: TrivalentDiagram,
    sign: i32,
    auts: usize,
    odd_aut: bool,
}

fn permutations(items: &[Label]) -> Vec<Vec<Label>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn canonical_search(d: &TrivalentDiagram) -> Search {
    let k = d.circle.len();
    let n_labels = 2 * d.degree;
    let free_targets: Vec<Label> = ((k + 1)..=n_labels).map(|l| l as Label).collect();
    let perms = permutations(&free_targets);
    let mut best: Option<(TrivalentDiagram, i32)> = None;
    let mut auts = 0;
    let mut odd_aut = false;
    let mut map = vec![0 as Label; n_labels + 1];
    for rot in 0..k {
        for (i, &l) in d.circle.iter().enumerate() {
            map[l as usize] = ((i + k - rot) % k + 1) as Label;
        }
        for p in &perms {
            for (j, &l) in d.free.iter().enumerate() {
                map[l as usize] = p[j];
            }
            let (mut cand, sign) = d.relabel(&map);
            cand.circle = (1..=k as Label).collect();
            match &best {
                None => {
                    best = Some((cand, sign));
                    auts = 1;
                }
                Some((b, bs)) => match cand.edges.cmp(&b.edges) {
                    std::cmp::Ordering::Less => {
                        best = Some((cand, sign));
                        auts = 1;
                        odd_aut = false;
                    }
                    std::cmp::Ordering::Equal => {
                        auts += 1;
                        if sign != *bs {
                            odd_aut = true;
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
            }
        }
    }
    let (best, sign) = best.expect("diagram has a circle vertex");
    Search { best, sign, auts, odd_aut }
}

/// Canonical representative and the sign relating it to `d`:
/// `d = sign * canonical` as oriented diagrams.
pub fn canonicalize(d: &TrivalentDiagram) -> (TrivalentDiagram, i32) {
    let s = canonical_search(d);
    (s.best, s.sign)
}

/// Finite linear combination of canonical diagrams of a common degree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagramSum {
    terms: BTreeMap<TrivalentDiagram, f64>,
}

impl DiagramSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(d: &TrivalentDiagram) -> Self {
        let mut s = Self::new();
        s.add(d, 1.0);
        s
    }

    /// Adds `coeff * d`, canonicalizing `d` and dropping cancelled terms.
    pub fn add(&mut self, d: &TrivalentDiagram, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let (c, sign) = canonicalize(d);
        let entry = self.terms.entry(c.clone()).or_insert(0.0);
        *entry += sign as f64 * coeff;
        if entry.abs() < 1e-12 {
            self.terms.remove(&c);
        }
    }

    pub fn add_sum(&mut self, other: &DiagramSum, coeff: f64) {
        for (d, c) in &other.terms {
            self.add(d, coeff * c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TrivalentDiagram, f64)> {
        self.terms.iter().map(|(d, c)| (d, *c))
    }

    pub fn coefficient(&self, d: &TrivalentDiagram) -> f64 {
        let (c, sign) = canonicalize(d);
        self.terms.get(&c).map(|v| v * sign as f64).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|d| d.degree)
    }
}

/// Expands the free vertex at edge `e` by the STU relation, returning `T - U`.
///
/// With the free vertex `v` oriented as the cyclic triple `(c, a, b)` starting
/// at the circle vertex `c`, `T` replaces `c` by two consecutive circle vertices
/// joined to `a` then `b`, and `U` joins them in the opposite order.
pub fn stu_expand(d: &TrivalentDiagram, e: (Label, Label)) -> Result<DiagramSum, StuError> {
    if d.free.is_empty() {
        return Err(StuError::NoFreeVertex);
    }
    let e = (e.0.min(e.1), e.0.max(e.1));
    if !d.edges.contains(&e) {
        return Err(StuError::EdgeNotFound(e.0, e.1));
    }
    let (c, v) = match (d.is_circle_vertex(e.0), d.is_circle_vertex(e.1)) {
        (true, false) => (e.0, e.1),
        (false, true) => (e.1, e.0),
        _ => return Err(StuError::NotSConfiguration(e.0, e.1)),
    };
    let nb = d.neighbours(v);
    let pos = nb.iter().position(|&x| x == c).expect("c adjacent to v");
    let a = nb[(pos + 1) % 3];
    let b = nb[(pos + 2) % 3];
    let mut out = DiagramSum::new();
    // New circle vertices reuse labels c (first along the circle) and v.
    for (first_to, coeff) in [(a, 1.0), (b, -1.0)] {
        let second_to = if first_to == a { b } else { a };
        let mut circle = Vec::with_capacity(d.circle.len() + 1);
        for &l in &d.circle {
            if l == c {
                circle.push(c);
                circle.push(v);
            } else {
                circle.push(l);
            }
        }
        let free: Vec<Label> = d.free.iter().copied().filter(|&l| l != v).collect();
        let mut edges: Vec<(Label, Label)> = d
            .edges
            .iter()
            .copied()
            .filter(|&(x, y)| x != v && y != v)
            .collect();
        edges.push((c.min(first_to), c.max(first_to)));
        edges.push((v.min(second_to), v.max(second_to)));
        edges.sort_unstable();
        // Orientation of the remaining free vertices, carried over from d with
        // the edge to v redirected, measured against the label-induced one.
        let mut sign = 1;
        for &w in &free {
            let old = d.neighbours(w);
            let triple: Vec<Label> = old
                .iter()
                .map(|&x| if x == v { if w == first_to { c } else { v } } else { x })
                .collect();
            sign *= cyclic_parity([triple[0], triple[1], triple[2]]);
        }
        let t = TrivalentDiagram { degree: d.degree, circle, free, edges };
        out.add(&t, coeff * sign as f64);
    }
    Ok(out)
}

/// Edges joining a free vertex to a circle vertex.
pub fn expandable_edges(d: &TrivalentDiagram) -> Vec<(Label, Label)> {
    d.edges
        .iter()
        .copied()
        .filter(|&(a, b)| d.is_circle_vertex(a) != d.is_circle_vertex(b))
        .collect()
}

/// True iff some pair of cuts of the circle splits the diagram into two
/// nonempty parts with no edge between them.
pub fn is_reducible(d: &TrivalentDiagram) -> bool {
    let k = d.circle.len();
    for start in 0..k {
        for len in 1..k {
            let arc: BTreeSet<Label> = (0..len).map(|i| d.circle[(start + i) % k]).collect();
            let mut reach: BTreeSet<Label> = arc.clone();
            let mut queue: VecDeque<Label> = arc.iter().copied().collect();
            let mut leaks = false;
            while let Some(x) = queue.pop_front() {
                for y in d.neighbours(x) {
                    if d.is_circle_vertex(y) && !arc.contains(&y) {
                        leaks = true;
                        break;
                    }
                    if reach.insert(y) {
                        queue.push_back(y);
                    }
                }
                if leaks {
                    break;
                }
            }
            if !leaks {
                return true;
            }
        }
    }
    false
}

/// All isomorphism classes of diagrams of degree `n`, canonical and sorted.
pub fn enumerate(n: usize) -> Result<Vec<TrivalentDiagram>, EnumerateError> {
    if !(1..=3).contains(&n) {
        return Err(EnumerateError::DegreeOutOfRange(n));
    }
    Ok(enumerate_unchecked(n))
}

pub(crate) fn enumerate_unchecked(n: usize) -> Vec<TrivalentDiagram> {
    let mut found = BTreeSet::new();
    for k in 1..=2 * n {
        let s = 2 * n - k;
        if (k + 3 * s) % 2 != 0 {
            continue;
        }
        let mut remaining: Vec<usize> = (0..=2 * n).map(|l| if l == 0 { 0 } else if l <= k { 1 } else { 3 }).collect();
        let mut edges = Vec::new();
        let mut graphs = Vec::new();
        match_half_edges(&mut remaining, &mut edges, &mut graphs);
        for edges in graphs {
            let raw = RawDiagram {
                degree: Some(n),
                circle: (1..=k).collect(),
                free: ((k + 1)..=2 * n).collect(),
                edges,
            };
            if let Ok(d) = validate(&raw) {
                found.insert(canonicalize(&d).0);
            }
        }
    }
    found.into_iter().collect()
}

fn match_half_edges(remaining: &mut [usize], edges: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let Some(u) = (1..remaining.len()).find(|&l| remaining[l] > 0) else {
        out.push(edges.clone());
        return;
    };
    for w in (u + 1)..remaining.len() {
        if remaining[w] == 0 || edges.contains(&(u, w)) {
            continue;
        }
        remaining[u] -= 1;
        remaining[w] -= 1;
        edges.push((u, w));
        match_half_edges(remaining, edges, out);
        edges.pop();
        remaining[u] += 1;
        remaining[w] += 1;
    }
}
