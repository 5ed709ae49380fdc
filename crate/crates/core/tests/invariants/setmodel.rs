use densitometer::dilation::Rectangle;
use densitometer::interval1d::Membership;
use densitometer::setmodel::{build_cover, build_packing, cover_measure_bound, density_ratio};
use densitometer::weights::WeightSequence;
use proptest::prelude::*;

use crate::common::rel;

fn packable() -> impl Strategy<Value = (WeightSequence, usize)> {
    (1.5f64..4.0, 0.2f64..1.0, 1usize..3000).prop_map(|(p, frac, n)| {
        // zeta(p) <= zeta(1.5) < 2.62, so c <= 0.19 keeps the area below 1/2.
        let c = 0.19 * frac;
        (WeightSequence::power(c, p).unwrap(), n)
    })
}

fn unit() -> Rectangle {
    Rectangle::new(0.0, 1.0, 0.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn packing_bookkeeping((seq, n) in packable()) {
        let m = build_packing(&seq, n, unit()).unwrap();
        let removed: f64 = m.cubes().iter().map(|c| c.w * c.w).sum();
        prop_assert!(rel(m.k_measure().unwrap() + removed, 1.0) < 1e-12);
        let whole = density_ratio(&m, &unit()).unwrap();
        prop_assert!((whole.ratio_n - m.k_measure().unwrap()).abs() < 1e-12);
        prop_assert!(whole.lower_bound_true <= whole.ratio_n);
        prop_assert!(m.cubes().windows(2).all(|w| w[1].w <= w[0].w));
    }

    #[test]
    fn density_ratio_matches_brute_force((seq, n) in packable(), x in 0.0f64..0.9, y in 0.0f64..0.9, w in 0.01f64..0.5, h in 0.01f64..0.5) {
        let m = build_packing(&seq, n.min(400), unit()).unwrap();
        let r = Rectangle::new(x, (x + w).min(1.0), y, (y + h).min(1.0)).unwrap();
        let brute: f64 = m.cubes().iter().map(|c| c.rect().unwrap().overlap_area(&r)).sum();
        let got = density_ratio(&m, &r).unwrap().ratio_n;
        prop_assert!((got - (1.0 - brute / r.area()).clamp(0.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn cube_boundaries_are_flagged((seq, n) in packable(), k in 0usize..3000, t in 0.0f64..1.0) {
        let m = build_packing(&seq, n, unit()).unwrap();
        let c = m.cube(k % n + 1);
        let p = (c.x + t * c.w, c.y);
        prop_assert_eq!(m.locate(p).map(|(_, v)| v), Some(Membership::Boundary));
    }
}

#[test]
fn cover_bound_monotone_and_dominates_blocks() {
    for (c, p) in [(0.25, 2.0), (0.1, 3.0), (0.15, 1.8)] {
        let seq = WeightSequence::power(c, p).unwrap();
        let bounds: Vec<f64> = (1..=8).map(|m| cover_measure_bound(&seq, m).unwrap()).collect();
        assert!(bounds.windows(2).all(|w| w[1] <= w[0]), "{bounds:?}");
        let model = build_packing(&seq, 3124, unit()).unwrap();
        for m in 1..=4 {
            let cover = build_cover(&model, m, 4).unwrap();
            let mut prefix = 0.0;
            for b in &cover.blocks {
                prefix += b.measure;
                assert!(prefix <= cover.measure_bound * (1.0 + 1e-12));
                assert!(rel(b.measure, b.identity_rhs) < 1e-9);
            }
        }
    }
}
