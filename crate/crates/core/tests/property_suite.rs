//! Randomized structural properties: the two repulsion evaluators agree on
//! arbitrary instances, the closed-form exchange delta matches a full
//! recomputation, and serialization round-trips exactly.

use proptest::prelude::*;
use rand::Rng;
use repulsion_core::filtration::{
    build_random_filtration, from_json, to_json, LeafMeasure, RepulsionSchedule,
};
use repulsion_core::repulsion::{
    delta_q_exchange, mass_exchange, repulsion_hierarchical, repulsion_naive,
};
use repulsion_core::util::seeded_stream;

fn measure_from_raw(raw: &[f64]) -> LeafMeasure {
    let total: f64 = raw.iter().sum();
    LeafMeasure::new(raw.iter().map(|v| v / total).collect()).unwrap()
}

fn schedule_from_gaps(gaps: &[f64]) -> RepulsionSchedule {
    let mut values = Vec::with_capacity(gaps.len());
    let mut acc = 0.0;
    for g in gaps {
        acc += g;
        values.push(acc);
    }
    RepulsionSchedule::new(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hierarchical_equals_naive_on_random_instances(
        seed in 0u64..1_000_000,
        n in 1usize..=4,
        max_children in 1usize..=4,
        gaps in prop::collection::vec(0.01f64..3.0, 5),
        raw_mass in prop::collection::vec(0.01f64..1.0, 256),
    ) {
        let set = build_random_filtration(n, max_children, seed).unwrap();
        let schedule = schedule_from_gaps(&gaps[..=n]);
        let m = set.leaf_count();
        prop_assert!(m <= raw_mass.len());
        let mu = measure_from_raw(&raw_mass[..m]);

        let fast = repulsion_hierarchical(&set, &schedule, &mu).unwrap().value;
        let slow = repulsion_naive(&set, &schedule, &mu).unwrap().value;
        prop_assert!(
            (fast - slow).abs() <= 1e-11 * slow.max(1.0),
            "fast {} vs slow {}", fast, slow
        );
    }

    #[test]
    fn exchange_delta_matches_recomputation(
        seed in 0u64..1_000_000,
        n in 1usize..=4,
        gaps in prop::collection::vec(0.01f64..3.0, 5),
        raw_mass in prop::collection::vec(0.01f64..1.0, 256),
    ) {
        // max_children >= 2 so a sibling pair usually exists.
        let set = build_random_filtration(n, 3, seed).unwrap();
        let schedule = schedule_from_gaps(&gaps[..=n]);
        let m = set.leaf_count();
        prop_assert!(m <= raw_mass.len());
        let mu = measure_from_raw(&raw_mass[..m]);
        let before = repulsion_hierarchical(&set, &schedule, &mu).unwrap().value;

        let parents: Vec<usize> = (0..set.node_count())
            .filter(|&id| set.node(id).children.len() >= 2)
            .collect();
        if !parents.is_empty() {
            let mut rng = seeded_stream(seed, 9);
            let p = parents[rng.gen_range(0..parents.len())];
            let kids = &set.node(p).children;
            let (a, b) = (kids[0], kids[1]);
            let swapped = mass_exchange(&mu, &set, a, b).unwrap();
            let drop = delta_q_exchange(&set, &schedule, &mu, a, b).unwrap();
            let after = repulsion_hierarchical(&set, &schedule, &swapped).unwrap().value;
            prop_assert!(
                ((before - after) - drop).abs() <= 1e-11 * before.max(1.0),
                "drop {} vs recomputed {}", drop, before - after
            );
            let total: f64 = swapped.masses().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn set_json_round_trips_exactly(
        seed in 0u64..1_000_000,
        n in 1usize..=4,
        max_children in 1usize..=4,
    ) {
        let bare = build_random_filtration(n, max_children, seed).unwrap();
        let text = to_json(&bare);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
    }
}
