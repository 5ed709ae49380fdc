use densitometer::dilation::Rectangle;
use densitometer::interval1d::Interval;
use proptest::prelude::*;

/// Arbitrary intervals on a coarse grid (so endpoints collide often) or
/// with real endpoints.
pub fn interval() -> impl Strategy<Value = Interval> {
    prop_oneof![
        (0i32..40, 1i32..10).prop_map(|(a, l)| Interval::new(a as f64 / 4.0, (a + l) as f64 / 4.0).unwrap()),
        (-50.0f64..50.0, 0.01f64..20.0).prop_map(|(a, l)| Interval::new(a, a + l).unwrap()),
    ]
}

/// Pairwise disjoint intervals in shuffled order; gaps may be zero.
pub fn disjoint_intervals(max: usize) -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec((prop_oneof![Just(0.0), 0.0f64..5.0], 0.01f64..5.0), 0..=max)
        .prop_flat_map(|parts| {
            let mut x = -10.0;
            let ivs: Vec<Interval> = parts
                .into_iter()
                .map(|(gap, len)| {
                    x += gap;
                    let iv = Interval::new(x, x + len).unwrap();
                    x += len;
                    iv
                })
                .collect();
            Just(ivs).prop_shuffle()
        })
}

/// Pairwise disjoint squares: a random subset of a jittered grid, so
/// projections overlap and some squares touch.
pub fn disjoint_squares(max: usize) -> impl Strategy<Value = Vec<Rectangle>> {
    prop::collection::vec((0usize..64, 0.05f64..1.0, 0.0f64..1.0, 0.0f64..1.0, any::<bool>()), 1..=max).prop_map(
        |cells| {
            let mut used = [false; 64];
            let mut out = Vec::new();
            for (cell, frac, jx, jy, snap) in cells {
                if std::mem::replace(&mut used[cell], true) {
                    continue;
                }
                let (cx, cy) = ((cell % 8) as f64, (cell / 8) as f64);
                let w = if snap { 1.0 } else { frac };
                let (ox, oy) = if snap { (0.0, 0.0) } else { (jx * (1.0 - w), jy * (1.0 - w)) };
                out.push(Rectangle::square(cx + ox, cy + oy, w).unwrap());
            }
            out
        },
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
