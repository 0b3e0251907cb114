use super::*;
use crate::error::Error;

fn centers(set: &GenerationalSet) -> Vec<(f64, f64)> {
    let boxes = set.boxes().unwrap();
    (set.leaf_start()..set.node_count())
        .map(|id| (boxes[id].cx, boxes[id].cy))
        .collect()
}

#[test]
fn cantor_base_case_is_the_unit_square() {
    let set = build_cantor(0).unwrap();
    assert_eq!(set.node_count(), 1);
    assert_eq!(set.leaf_count(), 1);
    assert_eq!(set.deepest_generation(), 0);
    let b = set.boxes().unwrap()[0];
    assert_eq!((b.cx, b.cy, b.hw), (0.5, 0.5, 0.5));
    assert!(set.node(0).children.is_empty());
}

#[test]
fn cantor_first_generation_hits_the_four_corners() {
    let set = build_cantor(1).unwrap();
    assert_eq!(set.node_count(), 5);
    assert_eq!(set.leaf_count(), 4);
    assert_eq!(
        centers(&set),
        vec![(0.125, 0.125), (0.875, 0.125), (0.125, 0.875), (0.875, 0.875)]
    );
    for id in 1..5 {
        assert_eq!(set.boxes().unwrap()[id].side(), 0.25);
    }
}

#[test]
fn cantor_counts_follow_the_four_way_recursion() {
    let set = build_cantor(3).unwrap();
    assert_eq!(set.node_count(), 85); // 1 + 4 + 16 + 64
    assert_eq!(set.leaf_count(), 64);
    let hw = set.boxes().unwrap()[set.leaf_start()].hw;
    assert_eq!(hw, 0.5 * 4f64.powi(-3));
}

#[test]
fn cantor_generation_is_capped() {
    assert!(matches!(
        build_cantor(11),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn cantor_geometry_invariants_exhaustively_for_small_n() {
    for n in 0..=4 {
        let set = build_cantor(n).unwrap();
        let boxes = set.boxes().unwrap();
        for node in set.nodes() {
            for &c in &node.children {
                assert!(boxes[node.id].contains(&boxes[c]));
            }
            for (i, &a) in node.children.iter().enumerate() {
                for &b in &node.children[i + 1..] {
                    assert!(boxes[a].disjoint(&boxes[b]));
                }
            }
        }
    }
}

#[test]
fn socialist_without_placer_matches_cantor_combinatorics() {
    let profile = BranchingProfile::uniform(4, 2).unwrap();
    let set = build_socialist(&profile, None).unwrap();
    let cantor = build_cantor(2).unwrap();
    assert_eq!(set.node_count(), 21);
    assert!(!set.has_geometry());
    assert_eq!(set.nodes(), cantor.nodes());
}

#[test]
fn socialist_mixed_profile_counts() {
    let profile = BranchingProfile::new(vec![2, 3]).unwrap();
    let set = build_socialist(&profile, None).unwrap();
    assert_eq!(set.node_count(), 9);
    assert_eq!(set.leaf_count(), 6);
    assert_eq!(profile.leaf_count(), 6);
}

#[test]
fn socialist_with_corner_placer_reproduces_cantor() {
    let profile = BranchingProfile::uniform(4, 1).unwrap();
    let set = build_socialist(&profile, Some(&CornerPlacer)).unwrap();
    let cantor = build_cantor(1).unwrap();
    assert_eq!(set.nodes(), cantor.nodes());
    assert_eq!(set.boxes().unwrap(), cantor.boxes().unwrap());
}

#[test]
fn corner_placer_rejects_non_quaternary_profiles() {
    let profile = BranchingProfile::new(vec![2]).unwrap();
    let err = build_socialist(&profile, Some(&CornerPlacer)).unwrap_err();
    match err {
        Error::InvalidParameter(msg) => assert!(msg.contains("node 0"), "{msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn overlapping_placer_is_rejected_with_the_offending_pair() {
    struct Stacked;
    impl ChildPlacer for Stacked {
        fn place(&self, parent: &BoxGeom, count: usize) -> Vec<BoxGeom> {
            vec![
                BoxGeom {
                    cx: parent.cx,
                    cy: parent.cy,
                    hw: parent.hw / 4.0,
                };
                count
            ]
        }
    }
    let profile = BranchingProfile::new(vec![2]).unwrap();
    let err = build_socialist(&profile, Some(&Stacked)).unwrap_err();
    match err {
        Error::GeometryViolation { a, b, .. } => assert_eq!((a, b), (1, 2)),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn zero_branching_entries_are_rejected() {
    assert!(BranchingProfile::new(vec![2, 0, 3]).is_err());
    let empty = BranchingProfile::new(vec![]).unwrap();
    assert!(build_socialist(&empty, None).is_err());
}

#[test]
fn random_filtration_is_reproducible() {
    let a = build_random_filtration(3, 4, 7).unwrap();
    let b = build_random_filtration(3, 4, 7).unwrap();
    assert_eq!(a.nodes(), b.nodes());
    let c = build_random_filtration(3, 4, 8).unwrap();
    assert!(a.nodes() != c.nodes() || a.node_count() == c.node_count());
}

#[test]
fn random_filtration_forced_chain() {
    let set = build_random_filtration(1, 1, 123).unwrap();
    assert_eq!(set.node_count(), 2);
    assert_eq!(set.leaf_count(), 1);
}

#[test]
fn random_filtration_leaf_count_matches_traversal() {
    let set = build_random_filtration(3, 4, 7).unwrap();
    // Recount leaves by walking down from the root.
    fn count(set: &GenerationalSet, id: usize) -> usize {
        let node = set.node(id);
        if node.children.is_empty() {
            1
        } else {
            node.children.iter().map(|&c| count(set, c)).sum()
        }
    }
    assert_eq!(count(&set, 0), set.leaf_count());
    assert!(matches!(build_random_filtration(0, 3, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(build_random_filtration(2, 0, 1), Err(Error::InvalidParameter(_))));
}

#[test]
fn last_common_generation_walks_ancestors() {
    let set = build_cantor(2).unwrap();
    let first = set.leaf_start();
    // Same leaf: deepest generation.
    assert_eq!(set.last_common_generation(first, first).unwrap(), 2);
    // Siblings: one below the deepest generation.
    assert_eq!(set.last_common_generation(first, first + 1).unwrap(), 1);
    // Leaves under different generation-1 squares: the root.
    assert_eq!(set.last_common_generation(first, first + 5).unwrap(), 0);
    // Symmetry over all pairs.
    for a in first..set.node_count() {
        for b in first..set.node_count() {
            let ab = set.last_common_generation(a, b).unwrap();
            let ba = set.last_common_generation(b, a).unwrap();
            assert_eq!(ab, ba);
            assert_eq!(ab == 2, a == b);
        }
    }
    assert!(matches!(set.last_common_generation(0, first), Err(Error::NotALeaf(0))));
}

#[test]
fn descendant_and_leaf_ranges_are_contiguous() {
    let set = build_cantor(3).unwrap();
    let g1 = set.generation_range(1);
    let node = g1.start;
    assert_eq!(set.descendant_range(node, 1), node..node + 1);
    assert_eq!(set.descendant_range(node, 2).len(), 4);
    assert_eq!(set.descendant_range(node, 3).len(), 16);
    assert_eq!(set.subtree_leaf_range(0), 0..64);
    assert_eq!(set.subtree_leaf_range(node).len(), 16);
    // Ancestor lookup inverts the leaf ranges.
    for leaf in set.leaf_start()..set.node_count() {
        for g in 0..=3 {
            let anc = set.ancestor_at(leaf, g).unwrap();
            let range = set.subtree_leaf_range(anc);
            assert!(range.contains(&set.leaf_index(leaf).unwrap()));
        }
    }
}

#[test]
fn aggregate_masses_sums_subtrees() {
    let set = build_cantor(1).unwrap();
    let sums = set.aggregate_masses(&[0.4, 0.3, 0.2, 0.1]).unwrap();
    assert!((sums[0] - 1.0).abs() < 1e-15);
    assert_eq!(&sums[1..], &[0.4, 0.3, 0.2, 0.1]);
    assert!(set.aggregate_masses(&[1.0]).is_err());
}

#[test]
fn branching_profile_detection() {
    let set = build_cantor(2).unwrap();
    assert_eq!(set.branching_profile().unwrap().counts(), &[4, 4]);
    // A tree with uneven child counts is not socialist.
    let uneven = build_random_filtration(2, 3, 11).unwrap();
    if let Some(profile) = uneven.branching_profile() {
        assert_eq!(profile.leaf_count(), uneven.leaf_count());
    }
    let json = r#"{"n":1,"nodes":[
        {"id":0,"gen":0,"parent":null,"children":[1,2]},
        {"id":1,"gen":1,"parent":0,"children":[]},
        {"id":2,"gen":1,"parent":0,"children":[]}]}"#;
    let two = from_json(json).unwrap();
    assert_eq!(two.branching_profile().unwrap().counts(), &[2]);
}

#[test]
fn schedule_validation() {
    assert!(RepulsionSchedule::new(vec![1.0, 4.0, 16.0]).is_ok());
    assert!(matches!(RepulsionSchedule::new(vec![1.0, 1.0]), Err(Error::InvalidSchedule(1))));
    assert!(matches!(RepulsionSchedule::new(vec![4.0, 2.0]), Err(Error::InvalidSchedule(1))));
    assert!(matches!(RepulsionSchedule::new(vec![0.0, 1.0]), Err(Error::InvalidSchedule(0))));
    assert!(matches!(RepulsionSchedule::new(vec![-1.0, 1.0]), Err(Error::InvalidSchedule(0))));
    assert!(RepulsionSchedule::new(vec![]).is_err());
    let cantor = RepulsionSchedule::cantor(3);
    assert_eq!(cantor.values(), &[1.0, 4.0, 16.0, 64.0]);
}

#[test]
fn leaf_measure_validation() {
    assert!(LeafMeasure::new(vec![0.5, 0.5]).is_ok());
    assert!(LeafMeasure::new(vec![0.5, 0.6]).is_err());
    assert!(LeafMeasure::new(vec![-0.1, 1.1]).is_err());
    assert!(LeafMeasure::new(vec![]).is_err());
    assert!(LeafMeasure::new(vec![f64::NAN, 1.0]).is_err());
    let eq = LeafMeasure::equidistributed(6).unwrap();
    assert_eq!(eq.len(), 6);
    assert!((crate::util::pairwise_sum(eq.masses()) - 1.0).abs() <= MASS_TOLERANCE);
    let pm = LeafMeasure::point_mass(4, 2).unwrap();
    assert_eq!(pm.masses(), &[0.0, 0.0, 1.0, 0.0]);
    assert!(LeafMeasure::point_mass(4, 4).is_err());
}

#[test]
fn even_distribution_accepts_the_cantor_scaling() {
    for n in 0..=4 {
        let set = build_cantor(n).unwrap();
        let schedule = RepulsionSchedule::cantor(n);
        let report = validate_even_distribution(&set, &schedule, 2.0, 0.5).unwrap();
        assert!(report.pass, "n={n}: {report:?}");
        assert!(report.diameter_clause.pass);
        assert!(report.separation_clause.pass);
    }
}

#[test]
fn even_distribution_rejects_an_off_scale_schedule() {
    // Diameters shrink like 4^-k, so r_k = 2^k drifts off scale at k >= 2.
    let set = build_cantor(3).unwrap();
    let schedule = RepulsionSchedule::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
    let report = validate_even_distribution(&set, &schedule, 2.0, 0.5).unwrap();
    assert!(!report.pass);
    assert!(!report.diameter_clause.pass);
    let worst = report.diameter_clause.worst.unwrap();
    assert_eq!(worst.generation, 3);
    assert!(worst.stress > 1.0);
}

#[test]
fn even_distribution_single_node_is_vacuous_on_separation() {
    let set = build_cantor(0).unwrap();
    let schedule = RepulsionSchedule::new(vec![1.0]).unwrap();
    let report = validate_even_distribution(&set, &schedule, 2.0, 0.5).unwrap();
    assert!(report.pass);
    assert_eq!(report.separation_clause.checked, 0);
    assert!(report.separation_clause.worst.is_none());
}

#[test]
fn even_distribution_requires_geometry_and_sane_constants() {
    let set = build_random_filtration(2, 3, 5).unwrap();
    let schedule = RepulsionSchedule::cantor(2);
    assert!(matches!(
        validate_even_distribution(&set, &schedule, 2.0, 0.5),
        Err(Error::MissingGeometry)
    ));
    let cantor = build_cantor(1).unwrap();
    let s1 = RepulsionSchedule::cantor(1);
    assert!(validate_even_distribution(&cantor, &s1, 0.5, 0.5).is_err());
    assert!(validate_even_distribution(&cantor, &s1, 2.0, 0.0).is_err());
    let long = RepulsionSchedule::cantor(3);
    assert!(validate_even_distribution(&cantor, &long, 2.0, 0.5).is_err());
}

#[test]
fn json_round_trip_is_exact() {
    for set in [build_cantor(2).unwrap(), build_random_filtration(3, 3, 42).unwrap()] {
        let text = to_json(&set);
        let back = from_json(&text).unwrap();
        assert_eq!(set.deepest_generation(), back.deepest_generation());
        assert_eq!(set.nodes(), back.nodes());
        match (set.boxes(), back.boxes()) {
            (None, None) => {}
            (Some(a), Some(b)) => assert_eq!(a, b),
            _ => panic!("geometry presence changed across round trip"),
        }
    }
}

#[test]
fn json_reader_accepts_shuffled_ids_and_missing_parent_field() {
    let json = r#"{"n":1,"nodes":[
        {"id":2,"gen":1,"parent":0,"children":[]},
        {"id":0,"gen":0,"children":[1,2]},
        {"id":1,"gen":1,"parent":0,"children":[]}]}"#;
    let set = from_json(json).unwrap();
    assert_eq!(set.leaf_count(), 2);
}

#[test]
fn json_reader_rejects_malformed_sets() {
    let cases: &[(&str, &str)] = &[
        // Dangling child id.
        (
            r#"{"n":1,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[1,5]},
                {"id":1,"gen":1,"parent":0,"children":[]}]}"#,
            "dangling",
        ),
        // Generation beyond n.
        (
            r#"{"n":0,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[1]},
                {"id":1,"gen":1,"parent":0,"children":[]}]}"#,
            "beyond",
        ),
        // Duplicate / non-contiguous ids.
        (
            r#"{"n":1,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[1]},
                {"id":1,"gen":1,"parent":0,"children":[]},
                {"id":1,"gen":1,"parent":0,"children":[]}]}"#,
            "contiguous",
        ),
        // Two roots.
        (
            r#"{"n":1,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[2]},
                {"id":1,"gen":0,"parent":null,"children":[3]},
                {"id":2,"gen":1,"parent":0,"children":[]},
                {"id":3,"gen":1,"parent":1,"children":[]}]}"#,
            "generation-0",
        ),
        // Internal node with no children.
        (
            r#"{"n":2,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[1,2]},
                {"id":1,"gen":1,"parent":0,"children":[3]},
                {"id":2,"gen":1,"parent":0,"children":[]},
                {"id":3,"gen":2,"parent":1,"children":[]}]}"#,
            "no children",
        ),
        // Children out of canonical order.
        (
            r#"{"n":1,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[2,1]},
                {"id":1,"gen":1,"parent":0,"children":[]},
                {"id":2,"gen":1,"parent":0,"children":[]}]}"#,
            "canonical",
        ),
        // Geometry on some nodes only.
        (
            r#"{"n":1,"nodes":[
                {"id":0,"gen":0,"parent":null,"children":[1],"box":{"cx":0.5,"cy":0.5,"hw":0.5}},
                {"id":1,"gen":1,"parent":0,"children":[]}]}"#,
            "all nodes or none",
        ),
    ];
    for (json, needle) in cases {
        let err = from_json(json).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains(needle),
            "expected {needle:?} in error for {json}: {msg}"
        );
    }
    // Unknown fields are rejected by the parser.
    let unknown = r#"{"n":0,"nodes":[{"id":0,"gen":0,"parent":null,"children":[],"extra":1}]}"#;
    assert!(matches!(from_json(unknown), Err(Error::Json(_))));
}

#[test]
fn json_reader_rejects_degenerate_geometry() {
    let json = r#"{"n":0,"nodes":[
        {"id":0,"gen":0,"parent":null,"children":[],"box":{"cx":0.5,"cy":0.5,"hw":0.0}}]}"#;
    assert!(from_json(json).is_err());
}

#[test]
fn file_round_trip() {
    let dir = std::env::temp_dir().join(format!("filtration-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("set.json");
    let set = build_cantor(2).unwrap();
    write_set(&set, &path).unwrap();
    let back = read_set(&path).unwrap();
    assert_eq!(set.nodes(), back.nodes());
    assert_eq!(set.boxes().unwrap(), back.boxes().unwrap());
    std::fs::remove_dir_all(&dir).ok();
}
