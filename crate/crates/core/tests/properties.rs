use allpay_core::metrics;
use allpay_core::sabotage::SabotageScenario;
use allpay_core::{AuctionConfigF64, EquilibriumF32, EquilibriumF64, RevenueReport};
use proptest::prelude::*;

fn probabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.02f64..=1.0, 2..=8)
}

fn grid(eq: &EquilibriumF64, points: usize) -> Vec<f64> {
    let top = eq.bid_ceiling();
    (0..=points).map(|t| (top * t as f64 / points as f64).min(top)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdfs_are_distribution_functions(p in probabilities()) {
        let eq = EquilibriumF64::from_probabilities(&p).unwrap();
        for d in eq.distributions() {
            let mut prev = 0.0;
            for x in grid(&eq, 400) {
                let f = d.cdf(x);
                prop_assert!((0.0..=1.0).contains(&f));
                prop_assert!(f >= prev - 1e-12, "bidder {} at {x}: {f} < {prev}", d.bidder);
                prev = f;
            }
            prop_assert_eq!(d.cdf(eq.bid_ceiling()), 1.0);
        }
    }

    #[test]
    fn payoff_is_flat_on_support_and_lower_elsewhere(p in probabilities()) {
        let eq = EquilibriumF64::from_probabilities(&p).unwrap();
        let lambda = eq.lambda();
        for d in eq.distributions() {
            for x in grid(&eq, 300) {
                let v = eq.payoff(d.bidder, x).unwrap();
                if x >= d.support_floor() {
                    prop_assert!((v - lambda).abs() < 1e-10, "bidder {} at {x}: {v} vs {lambda}", d.bidder);
                } else {
                    prop_assert!(v <= lambda + 1e-10);
                }
            }
        }
    }

    #[test]
    fn breakpoints_are_ordered(p in probabilities()) {
        let eq = EquilibriumF64::from_probabilities(&p).unwrap();
        let s = eq.breakpoints();
        prop_assert_eq!(s[0], 1.0 - eq.lambda());
        prop_assert_eq!(*s.last().unwrap(), 0.0);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn equal_probabilities_share_a_strategy(p in 0.05f64..=1.0, n in 2usize..=6) {
        let eq = EquilibriumF64::from_probabilities(&vec![p; n]).unwrap();
        for x in grid(&eq, 50) {
            let first = eq.cdf(1, x).unwrap();
            for i in 2..n {
                prop_assert_eq!(eq.cdf(i, x).unwrap(), first);
            }
        }
    }

    #[test]
    fn caller_order_is_respected(p in probabilities(), rotate in 0usize..8) {
        let mut shuffled = p.clone();
        let k = rotate % p.len();
        shuffled.rotate_left(k);
        let a = RevenueReport::new(&EquilibriumF64::from_probabilities(&p).unwrap());
        let b = RevenueReport::new(&EquilibriumF64::from_probabilities(&shuffled).unwrap());
        let mut back = b.expected_bids_by_caller.clone();
        back.rotate_right(k);
        for (x, y) in a.expected_bids_by_caller.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.sum_profit - b.sum_profit).abs() < 1e-12);
    }

    #[test]
    fn sabotage_closed_forms_agree(p in probabilities(), i_seed in 0usize..64, r_seed in 0usize..64, frac in 0.0f64..1.0) {
        let eq = EquilibriumF64::from_probabilities(&p).unwrap();
        let n = eq.bidder_count();
        let i = i_seed % n + 1;
        let r = (i + r_seed % (n - 1)) % n + 1;
        let p_true = frac * eq.probabilities()[r - 1];
        let sc = SabotageScenario::new(&eq, i, r, p_true).unwrap();
        for x in grid(&eq, 200) {
            let product = sc.payoff(x).unwrap();
            let closed = sc.closed_form_payoff(x).unwrap();
            prop_assert!((product - closed).abs() < 1e-10, "x = {x}: {product} vs {closed}");
        }
        let plan = sc.optimal_bid();
        prop_assert!(plan.expected_profit >= eq.lambda() - 1e-12);
        prop_assert!((sc.payoff(plan.bid).unwrap() - plan.expected_profit).abs() < 1e-10);
    }

    #[test]
    fn single_precision_tracks_double(p in prop::collection::vec(0.1f64..=1.0, 2..=5)) {
        let eq64 = EquilibriumF64::from_probabilities(&p).unwrap();
        let p32: Vec<f32> = p.iter().map(|&x| x as f32).collect();
        let eq32 = EquilibriumF32::from_probabilities(&p32).unwrap();
        prop_assert!((eq32.lambda() as f64 - eq64.lambda()).abs() < 1e-5);
        for i in 1..=p.len() {
            let b32 = metrics::expected_bid(&eq32, i).unwrap() as f64;
            let b64 = metrics::expected_bid(&eq64, i).unwrap();
            prop_assert!((b32 - b64).abs() < 1e-4, "bidder {i}: {b32} vs {b64}");
        }
    }
}

#[test]
fn dropped_bidders_read_zero() {
    let config = AuctionConfigF64::new(&[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(config.dropped(), &[0]);
    let eq = EquilibriumF64::new(config).unwrap();
    let r = RevenueReport::new(&eq);
    assert_eq!(r.expected_bids_by_caller[0], 0.0);
    assert_eq!(eq.expected_utility_for_caller(0), 0.0);
    assert!((eq.expected_utility_for_caller(1) - 0.25).abs() < 1e-15);
}
