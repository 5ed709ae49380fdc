use densitometer::dilation::{
    check_disjoint, dilate_1d, dilate_2d, identity_rhs_2d, ratio_bound_witness_with, Rectangle,
};
use densitometer::interval1d::Membership;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::common::{disjoint_intervals, disjoint_squares, rel};

fn gamma_1d() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(4.0), Just(8.0), (1u32..=6).prop_map(|s| 2f64.powi(s as i32))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn measure_identity_1d(ivs in disjoint_intervals(50), gamma in gamma_1d()) {
        let r = dilate_1d(&ivs, gamma).unwrap();
        let want = (2.0 * gamma + 1.0) * ivs.iter().map(|i| i.len()).sum::<f64>();
        prop_assert!(rel(r.measure(), want) < 1e-9, "{} vs {}", r.measure(), want);
    }

    #[test]
    fn pieces_have_the_stated_shape(ivs in disjoint_intervals(30), gamma in gamma_1d()) {
        let r = dilate_1d(&ivs, gamma).unwrap();
        prop_assert_eq!(r.pieces.len(), ivs.len());
        let mut prev_lo = f64::NEG_INFINITY;
        for p in &r.pieces {
            prop_assert_eq!(p.input, ivs[p.index]);
            prop_assert_eq!(p.left.hi(), p.input.hi());
            prop_assert_eq!(p.right.lo(), p.input.lo());
            prop_assert!(p.hull.lo() <= p.input.lo() && p.hull.hi() >= p.input.hi());
            prop_assert!(p.input.lo() >= prev_lo);
            prev_lo = p.input.lo();
            // Every hull is inside the final union.
            let mid = 0.5 * (p.hull.lo() + p.hull.hi());
            prop_assert_eq!(r.union.contains(mid), Membership::Inside);
        }
    }

    #[test]
    fn measure_identity_2d_and_disjoint_output(cubes in disjoint_squares(40), gamma in prop_oneof![Just(2.0), Just(4.0), Just(8.0)]) {
        let u = dilate_2d(&cubes, gamma).unwrap();
        let want = identity_rhs_2d(&cubes, gamma);
        prop_assert!(rel(u.measure(), want) < 1e-9, "{} vs {}", u.measure(), want);
        let rects: Vec<Rectangle> = u.rects().collect();
        prop_assert!(check_disjoint(&rects).is_ok());
        prop_assert!(u.columns().windows(2).all(|w| w[0].x.hi() <= w[1].x.lo()));
    }

    #[test]
    fn dilation_covers_the_cubes(cubes in disjoint_squares(25), seed in any::<u64>()) {
        let u = dilate_2d(&cubes, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in &cubes {
            for _ in 0..20 {
                let p = (c.x.lo() + rng.gen::<f64>() * c.x.len(), c.y.lo() + rng.gen::<f64>() * c.y.len());
                prop_assert_ne!(u.contains(p), Membership::Outside);
            }
        }
    }

    #[test]
    fn dilation_is_deterministic(cubes in disjoint_squares(30)) {
        let a = dilate_2d(&cubes, 4.0).unwrap();
        let b = dilate_2d(&cubes, 4.0).unwrap();
        let ra: Vec<[f64; 4]> = a.rects().map(Into::into).collect();
        let rb: Vec<[f64; 4]> = b.rects().map(Into::into).collect();
        prop_assert_eq!(ra.iter().map(|r| r.map(f64::to_bits)).collect::<Vec<_>>(),
                        rb.iter().map(|r| r.map(f64::to_bits)).collect::<Vec<_>>());
    }
}

/// Rectangles through points outside the γ-dilation cover less than `2/γ`
/// of their area with cubes.
#[test]
fn ratio_bound_witness_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let (mut checked, mut violations) = (0, 0);
    while checked < 10_000 {
        let cubes = disjoint_squares(12).new_tree(&mut runner).unwrap().current();
        let gamma = [2.0, 4.0, 8.0][rng.gen_range(0..3)];
        let u = dilate_2d(&cubes, gamma).unwrap();
        let bb = u.bounding_box().unwrap();
        for _ in 0..50 {
            let p = (
                bb.x.lo() - 1.0 + rng.gen::<f64>() * (bb.x.len() + 2.0),
                bb.y.lo() - 1.0 + rng.gen::<f64>() * (bb.y.len() + 2.0),
            );
            if u.contains(p) != Membership::Outside {
                continue;
            }
            let (w, h) = (rng.gen_range(0.01..20.0), rng.gen_range(0.01..20.0));
            let (fx, fy): (f64, f64) = (rng.gen_range(0.001..0.999), rng.gen_range(0.001..0.999));
            let r = Rectangle::new(p.0 - fx * w, p.0 + (1.0 - fx) * w, p.1 - fy * h, p.1 + (1.0 - fy) * h).unwrap();
            let rep = ratio_bound_witness_with(&u, &cubes, gamma, p, &r).unwrap();
            checked += 1;
            if !rep.pass {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0, "{violations} of {checked} draws reached 2/gamma");
}
