use densitometer::auxfn::{build_h, choose_subsequence, RateFunction, Schedule};
use densitometer::dilation::Rectangle;
use densitometer::scan::{sample_points, scan_theorem6, separation_check, ScanConfig};
use densitometer::setmodel::{build_cover, build_packing, CompactSetModel, CoverCm};
use densitometer::weights::WeightSequence;

fn canonical() -> (CompactSetModel, CoverCm, RateFunction) {
    let seq = WeightSequence::power(0.25, 2.0).unwrap();
    let model = build_packing(&seq, 3124, Rectangle::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
    let cover = build_cover(&model, 3, 4).unwrap();
    let sel = choose_subsequence(&seq, &Schedule::new(60).unwrap(), 10).unwrap();
    (model, cover, build_h(&sel).unwrap())
}

#[test]
fn reports_are_deterministic_and_bounded() {
    let (model, cover, h) = canonical();
    let config = ScanConfig {
        points: 30,
        rects_per_point: 100,
        seed: 9,
        ..ScanConfig::default()
    };
    let a = scan_theorem6(&model, &cover, &h, &config).unwrap();
    let b = scan_theorem6(&model, &cover, &h, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(sample_points(&model, &cover, &config).unwrap(), sample_points(&model, &cover, &config).unwrap());
    for r in &a.rows {
        assert!((0.0..=1.0).contains(&r.min_ratio));
        assert!(r.h < 1.0);
        assert_eq!(r.margin, r.min_ratio - r.h);
    }
    let other = scan_theorem6(&model, &cover, &h, &ScanConfig { seed: 10, ..config }).unwrap();
    assert_ne!(a.rows, other.rows);
}

#[test]
fn min_ratio_is_monotone_in_t() {
    let (model, cover, h) = canonical();
    let config = ScanConfig {
        t_grid: vec![0.2, 0.002, 0.05, 0.01, 0.1],
        points: 40,
        rects_per_point: 80,
        ..ScanConfig::default()
    };
    let rep = scan_theorem6(&model, &cover, &h, &config).unwrap();
    for id in 0..config.points {
        let rows: Vec<_> = rep.rows.iter().filter(|r| r.point_id == id).collect();
        assert!(rows.windows(2).all(|w| w[0].t < w[1].t && w[1].min_ratio <= w[0].min_ratio));
    }
}

#[test]
fn separation_has_no_violations() {
    let (model, cover, h) = canonical();
    let config = ScanConfig {
        t_grid: vec![0.01, 0.002],
        points: 50,
        rects_per_point: 100,
        seed: 3,
        ..ScanConfig::default()
    };
    let rep = separation_check(&model, &cover, &h, &config).unwrap();
    assert_eq!(rep.checked(), 10_000);
    assert_eq!(rep.violations(), 0, "{rep:?}");
    assert!(rep.per_t.iter().all(|s| s.s_next >= 4));
}

#[test]
fn thread_cap_does_not_change_results() {
    let (model, cover, h) = canonical();
    let config = ScanConfig {
        points: 16,
        rects_per_point: 50,
        ..ScanConfig::default()
    };
    let free = scan_theorem6(&model, &cover, &h, &config).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| scan_theorem6(&model, &cover, &h, &config).unwrap());
    assert_eq!(free, single);
}
