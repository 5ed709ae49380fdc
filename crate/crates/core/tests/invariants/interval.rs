use densitometer::interval1d::{atoms, normalize, LabelAt, Membership};
use proptest::prelude::*;

use crate::common::interval;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn normalize_is_idempotent(ivs in prop::collection::vec(interval(), 0..30)) {
        let once = normalize(&ivs);
        prop_assert_eq!(normalize(once.items()), once.clone());
        prop_assert!(once.items().windows(2).all(|w| w[0].hi() < w[1].lo()));
    }

    #[test]
    fn atoms_partition_the_union(ivs in prop::collection::vec(interval(), 0..30)) {
        let a = atoms(&ivs);
        let union = normalize(&ivs).measure();
        prop_assert!((a.measure() - union).abs() <= 1e-12 * union.max(1.0));
        let mut seen = vec![false; ivs.len()];
        for c in &a.cells {
            prop_assert!(!c.label.is_empty());
            for &i in &c.label {
                seen[i] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn labels_match_direct_membership(
        ivs in prop::collection::vec(interval(), 1..20),
        xs in prop::collection::vec(-60.0f64..80.0, 50),
    ) {
        let a = atoms(&ivs);
        for x in xs {
            let direct: Vec<usize> = (0..ivs.len()).filter(|&i| ivs[i].contains(x) == Membership::Inside).collect();
            let on_edge = ivs.iter().any(|iv| iv.contains(x) == Membership::Boundary);
            match a.label_at(x) {
                LabelAt::Label(l) => prop_assert_eq!(l, &direct[..]),
                LabelAt::Uncovered => prop_assert!(direct.is_empty() && !on_edge),
                LabelAt::Boundary => prop_assert!(on_edge),
            }
        }
    }
}
