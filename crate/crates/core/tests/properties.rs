use alphadda_core::arena::{elo_expected, elo_update, EloTable};
use alphadda_core::dda::{
    dda1_num_sims, dda2_dropout_prob, dda3_backup, mean_value, Dda1Params, Dda2Params,
};
use alphadda_core::search::EdgeStats;
use alphadda_core::{Color, GameVariant};
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = GameVariant> {
    prop::sample::select(GameVariant::ALL.to_vec())
}

fn color() -> impl Strategy<Value = Color> {
    prop::sample::select(vec![Color::First, Color::Second])
}

proptest! {
    #[test]
    fn mean_value_matches_brute_force(values in prop::collection::vec(-1.0f64..1.0, 0..20), n_h in 1usize..10) {
        let n = values.len();
        let k = n.min(n_h);
        let mut sum = 0.0;
        for i in 0..k {
            sum += values[n - 1 - i];
        }
        let expect = if k == 0 { 0.0 } else { sum / k as f64 };
        prop_assert!((mean_value(&values, n_h) - expect).abs() < 1e-12);
    }

    #[test]
    fn dda1_is_bounded_and_non_increasing(v in variant(), c in color(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let p = Dda1Params::for_variant(v);
        let (lo, hi) = if a * c.value() as f64 <= b * c.value() as f64 { (a, b) } else { (b, a) };
        let n_lo = dda1_num_sims(lo, c, &p);
        let n_hi = dda1_num_sims(hi, c, &p);
        prop_assert!((1..=p.n_max).contains(&n_lo) && (1..=p.n_max).contains(&n_hi));
        // Doing better from the agent's side never buys more simulations.
        prop_assert!(n_hi <= n_lo);
        prop_assert_eq!(dda1_num_sims(a, Color::First, &p), dda1_num_sims(-a, Color::Second, &p));
    }

    #[test]
    fn dda2_is_bounded_and_non_decreasing(v in variant(), c in color(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let p = Dda2Params::for_variant(v);
        let (lo, hi) = if a * c.value() as f64 <= b * c.value() as f64 { (a, b) } else { (b, a) };
        let d_lo = dda2_dropout_prob(lo, c, &p);
        let d_hi = dda2_dropout_prob(hi, c, &p);
        prop_assert!((0.0..=p.p_max).contains(&d_lo) && (0.0..=p.p_max).contains(&d_hi));
        prop_assert!(d_hi >= d_lo);
        prop_assert_eq!(dda2_dropout_prob(a, Color::First, &p), dda2_dropout_prob(-a, Color::Second, &p));
    }

    #[test]
    fn dda3_backup_never_raises_w(
        w in -10.0f64..10.0, n in 0u32..50, leaf in -1.0f64..1.0, v_bar in -1.0f64..1.0,
        ce in color(), cd in color(),
    ) {
        let mut e = EdgeStats { n, w, q: 0.0, p: 0.1 };
        dda3_backup(&mut e, leaf, v_bar, ce, cd);
        prop_assert!(e.w <= w);
        prop_assert_eq!(e.n, n + 1);
        prop_assert!((e.q - e.w / e.n as f64).abs() < 1e-12);
    }

    #[test]
    fn elo_expectations_are_complementary(a in 0.0f64..3000.0, b in 0.0f64..3000.0) {
        prop_assert!((elo_expected(a, b) + elo_expected(b, a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn elo_update_is_fixed_at_expectation(e in 800.0f64..2200.0, p in 0.0f64..1.0, n in 1u32..40) {
        let after = elo_update(e, n as f64 * p, n, p, 8.0);
        prop_assert!((after - e).abs() < 1e-9);
    }

    #[test]
    fn elo_table_conserves_rating_mass(games in prop::collection::vec((0usize..4, 0usize..4, 0u8..3), 0..60)) {
        let mut t = EloTable::new((0..4).map(|i| i.to_string()).collect());
        for (a, b, s) in games {
            if a != b {
                t.record_game(a, b, s as f64 / 2.0);
            }
        }
        let total: f64 = t.ratings().iter().sum();
        prop_assert!((total - 6000.0).abs() < 1e-6);
    }
}
