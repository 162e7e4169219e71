use std::collections::BTreeSet;

use proptest::prelude::*;

use duopoly_core::factors::{CompanyPolicy, FactorRef, Level};
use duopoly_core::game::{pure_nash, regret, EmpiricalGame};
use duopoly_core::gsa::{ecvi_gain, stability_analysis, PayoffNoise, StabilityClass, StabilityConfig};
use duopoly_core::rng::ReplicationSeed;
use duopoly_core::runner::{run_replication, PayoffSampleSet, RunConfig, StrategyProfile};
use duopoly_core::stats::{confidence_interval, trim_samples, SampleStats};

fn square_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..=max).prop_flat_map(|s| prop::collection::vec(prop::collection::vec(-20i32..20, s), s))
        .prop_map(|m| m.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect())
}

fn bimatrix(max: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (2..=max).prop_flat_map(|s| {
        let m = || prop::collection::vec(prop::collection::vec((-20i32..20).prop_map(f64::from), s), s);
        (m(), m())
    })
}

fn nash_set(g: &EmpiricalGame, eps: f64) -> BTreeSet<(usize, usize)> {
    pure_nash(g, eps).unwrap().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epsilon_equilibria_grow_with_tolerance(u in square_matrix(6), e1 in 0.0..10.0f64, de in 0.0..10.0f64) {
        let g = EmpiricalGame::symmetric_from_matrix(&u).unwrap();
        prop_assert!(nash_set(&g, e1).is_subset(&nash_set(&g, e1 + de)));
    }

    #[test]
    fn a_profile_is_an_equilibrium_iff_its_regret_is_within_tolerance(u in square_matrix(6), eps in 0.0..15.0f64) {
        let g = EmpiricalGame::symmetric_from_matrix(&u).unwrap();
        let ne = nash_set(&g, eps);
        for a in 0..u.len() {
            for b in 0..u.len() {
                prop_assert_eq!(ne.contains(&(a, b)), regret(&g, (a, b)).unwrap() <= eps);
            }
        }
    }

    #[test]
    fn positive_affine_maps_preserve_equilibria(u in square_matrix(6), a in 1u32..8, b in -100i32..100) {
        // Integer-valued scale and shift keep every payoff exactly representable.
        let g = EmpiricalGame::symmetric_from_matrix(&u).unwrap();
        let h = g.affine(f64::from(a), f64::from(b));
        prop_assert_eq!(nash_set(&g, 0.0), nash_set(&h, 0.0));
        prop_assert_eq!(nash_set(&g, 3.0), nash_set(&h, 3.0 * f64::from(a)));
    }

    #[test]
    fn trimming_removes_exactly_the_extremes(x in prop::collection::vec(-1e6..1e6f64, 3..80), k in 0usize..10) {
        prop_assume!(2 * k < x.len());
        let t = trim_samples(&x, k).unwrap();
        let mut sorted = x.clone();
        sorted.sort_by(f64::total_cmp);
        let mut got = t.clone();
        got.sort_by(f64::total_cmp);
        prop_assert_eq!(got, sorted[k..sorted.len() - k].to_vec());
        if k == 0 {
            prop_assert_eq!(t.len(), x.len());
        }
    }

    #[test]
    fn ci_half_width_scales_with_the_data(x in prop::collection::vec(-1e3..1e3f64, 3..60), c in 0.01..100.0f64, shift in -1e3..1e3f64) {
        let base = confidence_interval(&x, 0.05).unwrap();
        let y: Vec<f64> = x.iter().map(|v| c * v + shift).collect();
        let scaled = confidence_interval(&y, 0.05).unwrap();
        let tol = 1e-9 * (1.0 + c * base.half_width);
        prop_assert!((scaled.half_width - c * base.half_width).abs() <= tol);
    }

    #[test]
    fn ecvi_gain_grows_with_extra_samples(n in 2usize..500, var in 0.0..1e8f64, q in 1usize..1000, dq in 1usize..1000) {
        let s = SampleStats { n, mean: 0.0, variance: var };
        let g1 = ecvi_gain(&s, Some(q), 0.05).unwrap();
        let g2 = ecvi_gain(&s, Some(q + dq), 0.05).unwrap();
        let limit = ecvi_gain(&s, None, 0.05).unwrap();
        prop_assert!(g1 >= 0.0);
        prop_assert!(g1 <= g2 + 1e-12);
        prop_assert!(g2 <= limit + 1e-12);
    }

    #[test]
    fn stability_classes_partition_the_profiles((u, v) in bimatrix(4), eps in 0.0..30.0f64, seed in any::<u64>()) {
        let g = EmpiricalGame::from_bimatrix(&u, &v).unwrap();
        let cfg = StabilityConfig { steps: 50, noise: PayoffNoise::None, ..StabilityConfig::default() };
        let r = stability_analysis(&g, (0, 0), eps, &cfg, seed).unwrap();
        let s = u.len();
        let starts: BTreeSet<_> = r.classes.iter().map(|c| c.0).collect();
        prop_assert_eq!(starts.len(), r.classes.len());
        prop_assert_eq!(r.classes.len(), s * s);
        let share = |k: StabilityClass| r.classes.iter().filter(|c| c.1 == k).count() as f64 / r.classes.len() as f64;
        prop_assert!((r.ratios.asymptotic - share(StabilityClass::AsymptoticallyStable)).abs() < 1e-12);
        prop_assert!((r.ratios.marginal - share(StabilityClass::MarginallyStable)).abs() < 1e-12);
        prop_assert!((r.ratios.instable - share(StabilityClass::Instable)).abs() < 1e-12);
        prop_assert!((r.ratios.asymptotic + r.ratios.marginal + r.ratios.instable - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merging_sample_sets_is_order_independent(
        a in prop::collection::btree_map(0u64..40, (-1e4..1e4f64, -1e4..1e4f64), 0..20),
        b in prop::collection::btree_map(40u64..80, (-1e4..1e4f64, -1e4..1e4f64), 0..20),
        c in prop::collection::btree_map(80u64..120, (-1e4..1e4f64, -1e4..1e4f64), 0..20),
    ) {
        let set = |m: &std::collections::BTreeMap<u64, (f64, f64)>| {
            let mut s = PayoffSampleSet::new();
            for (&i, &(x, y)) in m {
                s.insert(i, [x, y]);
            }
            s
        };
        let (sa, sb, sc) = (set(&a), set(&b), set(&c));
        let mut left = sa.clone();
        left.merge(&sb);
        left.merge(&sc);
        let mut right = sc.clone();
        right.merge(&sa);
        right.merge(&sb);
        prop_assert_eq!(&left, &right);
        // Re-merging a part is idempotent.
        let mut again = left.clone();
        again.merge(&sb);
        prop_assert_eq!(&left, &again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn goods_are_conserved_for_any_level_mix(levels in prop::collection::vec(prop::bool::ANY, 8), seed in any::<u64>()) {
        let factors = duopoly_core::factors::Detailed::ALL;
        let pick = |offset: usize| {
            let chosen: Vec<FactorRef> = factors.iter().copied().take(4).map(FactorRef::Detailed).collect();
            let lv: Vec<Level> = levels[offset..offset + 4].iter().map(|&h| if h { Level::H } else { Level::L }).collect();
            CompanyPolicy::default().with_levels(&chosen, &lv).unwrap()
        };
        let profile = StrategyProfile::new(pick(0), pick(4));
        let rep = run_replication(&profile, &RunConfig::default(), ReplicationSeed::new(seed)).unwrap();
        prop_assert!(rep.conservation_error <= 1e-9, "error {}", rep.conservation_error);
    }
}
