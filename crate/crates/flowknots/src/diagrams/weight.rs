use std::collections::BTreeMap;

use thiserror::Error;

use super::{canonicalize, enumerate_unchecked, expandable_edges, is_reducible, stu_expand, DiagramSum, TrivalentDiagram};

/// Real-valued functional on diagrams, stored on canonical chord diagrams and
/// extended to diagrams with free vertices through the STU relation.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSystem {
    pub name: String,
    pub degree: usize,
    values: BTreeMap<TrivalentDiagram, f64>,
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum WeightError {
    #[error("degree mismatch: weight system has degree {expected}, term has degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
}

impl WeightSystem {
    /// Builds from chord-diagram values; missing chord diagrams take value 0.
    pub fn from_chord_values(name: &str, degree: usize, values: &[(TrivalentDiagram, f64)]) -> Self {
        let mut map = BTreeMap::new();
        for (d, v) in values {
            assert!(d.is_chord_diagram() && d.degree() == degree, "values must be given on chord diagrams");
            map.insert(canonicalize(d).0, *v);
        }
        let mut w = WeightSystem { name: name.to_string(), degree, values: map, primitive: false };
        w.primitive = enumerate_unchecked(degree)
            .iter()
            .filter(|d| d.is_chord_diagram() && is_reducible(d))
            .all(|d| w.chord_value(d) == 0.0);
        w
    }

    /// The degree-2 weight system of the Casson invariant: 1 on the crossed
    /// chord diagram, 0 on the parallel one.
    pub fn casson() -> Self {
        Self::from_chord_values("casson", 2, &[(TrivalentDiagram::crossed(), 1.0), (TrivalentDiagram::parallel(), 0.0)])
    }

    /// The gl(N) weight system of the standard representation: N raised to the
    /// number of boundary components of the ribbon surface of the chord diagram.
    pub fn gl(n: f64, degree: usize) -> Self {
        let values: Vec<(TrivalentDiagram, f64)> = enumerate_unchecked(degree)
            .into_iter()
            .filter(|d| d.is_chord_diagram())
            .map(|d| {
                let b = boundary_components(&d);
                (d, n.powi(b as i32))
            })
            .collect();
        Self::from_chord_values(&format!("gl({n})"), degree, &values)
    }

    pub fn chord_value(&self, d: &TrivalentDiagram) -> f64 {
        self.values.get(&canonicalize(d).0).copied().unwrap_or(0.0)
    }

    /// Value on a single diagram, expanding free vertices at the first
    /// expandable edge.
    pub fn value(&self, d: &TrivalentDiagram) -> f64 {
        if d.is_chord_diagram() {
            return self.chord_value(d);
        }
        let e = expandable_edges(d)[0];
        let sum = stu_expand(d, e).expect("connected diagram has an expandable edge");
        sum.terms().map(|(t, c)| c * self.value(t)).sum()
    }
}

/// Number of boundary circles of the surface obtained by attaching an
/// untwisted band to the disk for every chord.
pub fn boundary_components(d: &TrivalentDiagram) -> usize {
    let m = d.circle().len();
    let pos = |l| d.circle().iter().position(|&x| x == l).unwrap();
    let mut partner = vec![0; m];
    for &(a, b) in d.edges() {
        let (i, j) = (pos(a), pos(b));
        partner[i] = j;
        partner[j] = i;
    }
    let mut seen = vec![false; m];
    let mut cycles = 0;
    for s in 0..m {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = (partner[i] + 1) % m;
        }
    }
    cycles
}

/// Linear extension of `w` to a sum of diagrams.
pub fn eval_weight(w: &WeightSystem, x: &DiagramSum) -> Result<f64, WeightError> {
    let mut total = 0.0;
    for (d, c) in x.terms() {
        if d.degree() != w.degree {
            return Err(WeightError::DegreeMismatch { expected: w.degree, found: d.degree() });
        }
        total += c * w.value(d);
    }
    Ok(total)
}
