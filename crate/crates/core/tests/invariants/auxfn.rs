use densitometer::auxfn::{
    build_f, build_h, choose_subsequence, geometric_tail, little_o_check, Schedule, Verdict,
};
use densitometer::weights::WeightSequence;
use proptest::prelude::*;

fn closed_form() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        (0.01f64..1.0, 1.2f64..6.0).prop_map(|(c, p)| WeightSequence::power(c, p).unwrap()),
        (0.01f64..1.0, 0.05f64..0.95).prop_map(|(c, r)| WeightSequence::geometric(c, r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn selection_rules_hold(seq in closed_form()) {
        let sch = Schedule::new(60).unwrap();
        let sel = choose_subsequence(&seq, &sch, 8).unwrap();
        prop_assert_eq!(sel.s_ell[0], 1);
        for k in 1..sel.len() {
            // The successor is no larger, and every skipped block is no smaller.
            prop_assert!(sel.log_b[k] <= sel.log_b[k - 1]);
            for &(s, b) in &sel.scanned {
                if s > sel.s_ell[k - 1] && s < sel.s_ell[k] {
                    prop_assert!(b > sel.log_b[k - 1]);
                }
            }
        }
    }

    #[test]
    fn h_and_f_are_complementary_steps(seq in closed_form(), us in prop::collection::vec(0.0f64..1.0, 1000)) {
        let sch = Schedule::new(60).unwrap();
        let sel = choose_subsequence(&seq, &sch, 8).unwrap();
        let h = build_h(&sel).unwrap();
        let f = build_f(&sel).unwrap();
        let (lo, hi) = (h.log_floor(), sel.log_b[0] + 2.0);
        let allowed: Vec<f64> = std::iter::once(-1.0)
            .chain(sel.s_ell.iter().map(|&s| 1.0 - geometric_tail(s)))
            .collect();
        let mut pts: Vec<f64> = us.iter().map(|u| lo + u * (hi - lo)).collect();
        pts.sort_by(|a, b| b.total_cmp(a));
        let mut last = f64::NEG_INFINITY;
        for lt in pts {
            let hv = h.eval_log(lt).unwrap();
            prop_assert_eq!(hv + f.eval_log(lt).unwrap(), 1.0);
            prop_assert!(allowed.contains(&hv));
            prop_assert!(hv < 1.0);
            // Non-decreasing as t decreases.
            prop_assert!(hv >= last);
            last = hv;
        }
        for w in h.branches().windows(2) {
            prop_assert_eq!(w[1].t_hi_log, w[0].t_lo_log);
            prop_assert!(w[1].value > w[0].value);
        }
    }

    #[test]
    fn power_laws_decay_and_geometric_diverges(c in 0.05f64..1.0, p in 1.5f64..5.0, rho in 0.1f64..0.9) {
        let sch = Schedule::new(60).unwrap();
        let sel = choose_subsequence(&WeightSequence::power(c, p).unwrap(), &sch, 12).unwrap();
        prop_assert_eq!(little_o_check(&sel).verdict, Verdict::Decaying);
        let sel = choose_subsequence(&WeightSequence::geometric(c, rho).unwrap(), &sch, 8).unwrap();
        prop_assert_eq!(little_o_check(&sel).verdict, Verdict::Diverging);
    }
}

#[test]
fn one_minus_h_reaches_any_epsilon() {
    let sch = Schedule::new(60).unwrap();
    let seq = WeightSequence::power(0.25, 2.0).unwrap();
    let sel = choose_subsequence(&seq, &sch, 40).unwrap();
    let h = build_h(&sel).unwrap();
    for eps in [1e-1, 1e-3, 1e-6, 1e-10] {
        let b = h.branches().iter().find(|b| 1.0 - b.value < eps);
        assert!(b.is_some(), "no branch with 1 - h < {eps}");
    }
}
