use flowknots::diagrams::*;
use proptest::prelude::*;

fn raw(circle: &[usize], free: &[usize], edges: &[(usize, usize)]) -> RawDiagram {
    RawDiagram { degree: None, circle: circle.to_vec(), free: free.to_vec(), edges: edges.to_vec() }
}

fn weight_systems(degree: usize) -> Vec<WeightSystem> {
    let mut ws = vec![WeightSystem::gl(2.0, degree), WeightSystem::gl(3.0, degree), WeightSystem::gl(-1.5, degree)];
    if degree == 2 {
        ws.push(WeightSystem::casson());
    }
    ws
}

#[test]
fn validate_accepts_crossed_chords() {
    let d = validate(&raw(&[1, 2, 3, 4], &[], &[(1, 3), (2, 4)])).unwrap();
    assert_eq!((d.k(), d.s(), d.degree()), (4, 0, 2));
}

#[test]
fn validate_accepts_tripod() {
    let d = validate(&raw(&[1, 2, 3], &[4], &[(1, 4), (2, 4), (3, 4)])).unwrap();
    assert_eq!(d.edges().len(), 3);
    assert_eq!(d, TrivalentDiagram::tripod());
}

#[test]
fn validate_rejects_four_valent_free_vertex() {
    let errs = validate(&raw(&[1, 2, 3, 4], &[5, 6], &[(1, 5), (2, 5), (3, 5), (4, 5), (5, 6)])).unwrap_err();
    assert!(errs.iter().any(|e| e.to_string().contains("non-trivalent vertex")), "{errs:?}");
}

#[test]
fn validate_reports_every_violation() {
    // Wrong count, a lonely circle vertex and an edge-count mismatch at once.
    let errs = validate(&raw(&[1, 2, 3], &[], &[(1, 2)])).unwrap_err();
    let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
    assert!(text.iter().any(|t| t.contains("wrong vertex count")), "{text:?}");
    assert!(text.iter().any(|t| t.contains("non-trivalent vertex")), "{text:?}");
    assert!(text.iter().any(|t| t.contains("edge-count mismatch")), "{text:?}");
}

#[test]
fn validate_rejects_disconnected_free_part() {
    // Two chords plus a theta graph floating off the circle.
    let errs = validate(&RawDiagram {
        degree: Some(3),
        circle: vec![1, 2, 3, 4],
        free: vec![5, 6],
        edges: vec![(1, 3), (2, 4), (5, 6), (5, 6)],
    })
    .unwrap_err();
    assert!(errs.iter().any(|e| matches!(e, DiagramError::RepeatedEdge(5, 6))));
    let errs = validate(&raw(&[1, 2], &[3, 4, 5, 6], &[(1, 2), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)])).unwrap_err();
    assert!(errs.contains(&DiagramError::Disconnected), "{errs:?}");
}

#[test]
fn degree_examples() {
    assert_eq!(degree(&TrivalentDiagram::crossed()), 2);
    assert_eq!(degree(&TrivalentDiagram::tripod()), 2);
    let d = validate(&raw(&[1, 2, 3, 4, 5, 6], &[7, 8], &[(1, 7), (2, 7), (7, 8), (3, 8), (4, 8), (5, 6)])).unwrap();
    assert_eq!(d.k() + d.s(), 8);
    assert_eq!(degree(&d), 4);
}

#[test]
fn tripod_expands_to_crossed_minus_parallel() {
    let sum = stu_expand(&TrivalentDiagram::tripod(), (1, 4)).unwrap();
    assert_eq!(sum.len(), 2);
    assert_eq!(sum.coefficient(&TrivalentDiagram::crossed()), 1.0);
    assert_eq!(sum.coefficient(&TrivalentDiagram::parallel()), -1.0);
    // Every leg of the tripod gives the same answer by rotational symmetry.
    for e in [(2, 4), (3, 4)] {
        assert_eq!(stu_expand(&TrivalentDiagram::tripod(), e).unwrap(), sum);
    }
}

#[test]
fn stu_on_chord_diagram_fails() {
    assert_eq!(stu_expand(&TrivalentDiagram::crossed(), (1, 3)), Err(StuError::NoFreeVertex));
}

#[test]
fn stu_rejects_edges_outside_s_configuration() {
    let theta = validate(&raw(&[1, 2], &[3, 4], &[(1, 3), (2, 4), (3, 4)]));
    // (1,3),(2,4),(3,4) leaves 3 and 4 with valence 2: not a diagram.
    assert!(theta.is_err());
    let d = enumerate(3).unwrap().into_iter().find(|d| d.s() == 2 && d.edges().iter().any(|&(a, b)| !d.is_circle_vertex(a) && !d.is_circle_vertex(b))).unwrap();
    let ff = *d.edges().iter().find(|&&(a, b)| !d.is_circle_vertex(a) && !d.is_circle_vertex(b)).unwrap();
    assert!(matches!(stu_expand(&d, ff), Err(StuError::NotSConfiguration(..))));
    assert!(matches!(stu_expand(&TrivalentDiagram::tripod(), (1, 2)), Err(StuError::EdgeNotFound(..))));
}

fn expand_fully(d: &TrivalentDiagram, depth: usize, leaves: &mut Vec<usize>) {
    if d.is_chord_diagram() {
        leaves.push(depth);
        return;
    }
    let e = expandable_edges(d)[0];
    for (t, _) in stu_expand(d, e).unwrap().terms() {
        assert_eq!(t.degree(), d.degree());
        assert_eq!(t.s() + 1, d.s());
        expand_fully(t, depth + 1, leaves);
    }
}

#[test]
fn iterated_expansion_takes_s_steps() {
    for n in 1..=3 {
        for d in enumerate(n).unwrap() {
            let mut leaves = Vec::new();
            expand_fully(&d, 0, &mut leaves);
            // Branches that cancel entirely leave no chord diagrams behind.
            assert!(leaves.iter().all(|&l| l == d.s()), "{d}: {leaves:?}");
        }
    }
}

#[test]
fn reducibility_examples() {
    assert!(is_reducible(&TrivalentDiagram::parallel()));
    assert!(!is_reducible(&TrivalentDiagram::crossed()));
    assert!(!is_reducible(&TrivalentDiagram::tripod()));
    assert!(!is_reducible(&TrivalentDiagram::single_chord()));
}

#[test]
fn reducibility_matches_exhaustive_split_search() {
    // Independent check: a diagram is reducible iff its chord-intersection
    // structure (for chord diagrams) is disconnected.
    for n in 1..=3 {
        for d in enumerate(n).unwrap().into_iter().filter(|d| d.is_chord_diagram()) {
            let pos = |l| d.circle().iter().position(|&x| x == l).unwrap();
            let chords: Vec<(usize, usize)> = d.edges().iter().map(|&(a, b)| (pos(a).min(pos(b)), pos(a).max(pos(b)))).collect();
            let cross = |p: (usize, usize), q: (usize, usize)| (p.0 < q.0 && q.0 < p.1) != (p.0 < q.1 && q.1 < p.1);
            let mut comp: Vec<usize> = (0..chords.len()).collect();
            for _ in 0..chords.len() {
                for i in 0..chords.len() {
                    for j in 0..chords.len() {
                        if cross(chords[i], chords[j]) {
                            let m = comp[i].min(comp[j]);
                            comp[i] = m;
                            comp[j] = m;
                        }
                    }
                }
            }
            let connected = comp.iter().all(|&c| c == comp[0]);
            assert_eq!(is_reducible(&d), !connected, "{d}");
        }
    }
}

#[test]
fn eval_weight_examples() {
    let w = WeightSystem::casson();
    assert!(w.primitive);
    assert_eq!(eval_weight(&w, &DiagramSum::single(&TrivalentDiagram::crossed())).unwrap(), 1.0);
    let tripod = eval_weight(&w, &DiagramSum::single(&TrivalentDiagram::tripod())).unwrap();
    let expanded = eval_weight(&w, &stu_expand(&TrivalentDiagram::tripod(), (1, 4)).unwrap()).unwrap();
    assert_eq!(tripod, expanded);
    assert_eq!(tripod, 1.0);
    assert!(eval_weight(&w, &DiagramSum::single(&TrivalentDiagram::single_chord())).is_err());
}

#[test]
fn gl_weight_system_counts_boundary_components() {
    assert_eq!(boundary_components(&TrivalentDiagram::single_chord()), 2);
    assert_eq!(boundary_components(&TrivalentDiagram::crossed()), 1);
    assert_eq!(boundary_components(&TrivalentDiagram::parallel()), 3);
    let w = WeightSystem::gl(3.0, 2);
    assert!(!w.primitive);
    assert_eq!(w.chord_value(&TrivalentDiagram::crossed()), 3.0);
    assert_eq!(w.chord_value(&TrivalentDiagram::parallel()), 27.0);
}

#[test]
fn enumerate_small_degrees() {
    assert_eq!(enumerate(1).unwrap(), vec![TrivalentDiagram::single_chord()]);
    let two = enumerate(2).unwrap();
    assert_eq!(two.len(), 3);
    for d in [TrivalentDiagram::crossed(), TrivalentDiagram::parallel(), TrivalentDiagram::tripod()] {
        assert!(two.contains(&canonicalize(&d).0), "{d}");
    }
    assert!(enumerate(0).is_err());
    assert!(enumerate(4).is_err());
}

#[test]
fn enumerated_diagrams_are_valid_and_pairwise_distinct() {
    for n in 1..=3 {
        let list = enumerate(n).unwrap();
        for d in &list {
            assert_eq!(validate(&d.to_raw()).as_ref(), Ok(d));
        }
        // Brute-force isomorphism: no relabeling of one equals another.
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                assert_ne!(canonicalize(a).0, canonicalize(b).0);
                assert!(a.k() != b.k() || a.edges() != b.edges());
            }
        }
    }
    // Degree 3 chord diagrams: 5 classes up to rotation.
    assert_eq!(enumerate(3).unwrap().iter().filter(|d| d.is_chord_diagram()).count(), 5);
}

#[test]
fn stu_is_well_defined_on_all_small_diagrams() {
    for n in 1..=3 {
        for w in weight_systems(n) {
            for d in enumerate(n).unwrap() {
                for e in expandable_edges(&d) {
                    let mut x = DiagramSum::single(&d);
                    x.add_sum(&stu_expand(&d, e).unwrap(), -1.0);
                    let v = eval_weight(&w, &x).unwrap();
                    assert!(v.abs() < 1e-9, "{} on {d} at {e:?}: {v}", w.name);
                }
            }
        }
    }
}

#[test]
fn parse_round_trip_and_whitespace() {
    let d = parse_diagram(" 2 ;circle = [1, 2,3] ; free=[ 4 ];edges=[ (1,4), (2 ,4),(3,4) ]").unwrap();
    assert_eq!(d, TrivalentDiagram::tripod());
    assert_eq!(parse_diagram(&d.to_string()).unwrap(), d);
    let text = "# list\n2; circle=[1,2,3,4]; free=[]; edges=[(1,3),(2,4)]\n\n2; circle=[1,2,3]; free=[4]; edges=[(1,4),(2,4)]\n";
    match parse_diagrams(text) {
        Err(ParseError::Invalid { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected failure on line 4, got {other:?}"),
    }
    assert!(matches!(parse_diagrams("x; circle=[1]"), Err(ParseError::Syntax { line: 1, .. })));
}

#[test]
fn automorphisms_and_symmetry() {
    assert_eq!(TrivalentDiagram::crossed().automorphism_count(), 4);
    assert_eq!(TrivalentDiagram::parallel().automorphism_count(), 2);
    assert_eq!(TrivalentDiagram::tripod().automorphism_count(), 3);
    assert!(!TrivalentDiagram::tripod().vanishes_by_symmetry());
}

fn random_relabel(d: &TrivalentDiagram, seed: u64) -> (TrivalentDiagram, i32) {
    let n = 2 * d.degree();
    let mut labels: Vec<Label> = (1..=n as Label).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        labels.swap(i, (s >> 33) as usize % (i + 1));
    }
    let mut map = vec![0; n + 1];
    for (old, new) in labels.iter().enumerate() {
        map[old + 1] = *new;
    }
    d.relabel(&map)
}

proptest! {
    #[test]
    fn canonical_form_is_relabel_invariant(idx in 0usize..64, seed in any::<u64>()) {
        let all: Vec<TrivalentDiagram> = (1..=3).flat_map(|n| enumerate(n).unwrap()).collect();
        let d = &all[idx % all.len()];
        let (r, sign) = random_relabel(d, seed);
        let (c1, s1) = canonicalize(d);
        let (c2, s2) = canonicalize(&r);
        prop_assert_eq!(&c1, &c2);
        prop_assert_eq!(canonicalize(&c1), (c1.clone(), 1));
        // d = s1 c, r = sign d (as oriented diagrams) and r = s2 c.
        if !d.vanishes_by_symmetry() {
            prop_assert_eq!(s2, sign * s1);
        }
    }
}
