//! Property tests for the pricing oracle, generators, and the sorter.

use proptest::prelude::*;

use priced_sort::driver::inversion_sort;
use priced_sort::gen::{generate, GenSpec, Pattern};
use priced_sort::instrument::{hamiltonian_cost, stripes, true_sorted};
use priced_sort::{Color, ComparisonOracle, Cost, KeyId, PricedInstance};

fn arb_instance(max_n: usize) -> impl Strategy<Value = PricedInstance> {
    (1..=max_n, any::<u64>(), 0u8..3, 0u8..3).prop_map(|(n, seed, pa, pb)| {
        let price = |p: u8| match p {
            0 => Cost::from_int(2),
            1 => "2.5".parse().unwrap(),
            _ => Cost::from_int(100),
        };
        let spec = GenSpec {
            n_red: n / 2,
            n_blue: n - n / 2,
            alpha: price(pa),
            beta: price(pb),
            pattern: Pattern::UniformShuffle,
            seed,
        };
        generate(&spec).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stripes_concatenate_to_true_sorted(instance in arb_instance(40)) {
        prop_assert_eq!(stripes(&instance).concat(), true_sorted(&instance));
    }

    #[test]
    fn hamiltonian_matches_bruteforce_recomputation(instance in arb_instance(12)) {
        // independent oracle: walk the adjacencies of the rank order
        let mut keys: Vec<(u32, Color)> = instance
            .keys()
            .iter()
            .map(|k| (priced_sort::instrument::rank_ext(&instance, k.id) as u32, k.color))
            .collect();
        keys.sort_unstable_by_key(|(r, _)| *r);
        let mut expected = Cost::ZERO;
        for w in keys.windows(2) {
            expected += match (w[0].1, w[1].1) {
                (Color::Red, Color::Red) => instance.alpha(),
                (Color::Blue, Color::Blue) => instance.beta(),
                _ => Cost::ONE,
            };
        }
        prop_assert_eq!(hamiltonian_cost(&instance), expected);
    }

    #[test]
    fn ledger_conserves_counts_and_cost(
        instance in arb_instance(20),
        pairs in prop::collection::vec((0usize..20, 0usize..20), 0..64),
    ) {
        let n = instance.len();
        let mut oracle = ComparisonOracle::new(&instance);
        let mut charged = 0u64;
        let mut expected = Cost::ZERO;
        for (a, b) in pairs {
            let (a, b) = (KeyId((a % n) as u32), KeyId((b % n) as u32));
            if a == b {
                prop_assert!(oracle.compare(a, b).is_err());
                continue;
            }
            oracle.compare(a, b).unwrap();
            charged += 1;
            let (ca, cb) = (instance.color(a).unwrap(), instance.color(b).unwrap());
            expected += match (ca, cb) {
                (Color::Red, Color::Red) => instance.alpha(),
                (Color::Blue, Color::Blue) => instance.beta(),
                _ => Cost::ONE,
            };
        }
        prop_assert_eq!(oracle.ledger().charged_total_count(), charged);
        prop_assert_eq!(oracle.ledger().total_cost(), expected);
    }

    #[test]
    fn oracle_answers_are_transitive(instance in arb_instance(20), trips in prop::collection::vec((0usize..20, 0usize..20, 0usize..20), 0..32)) {
        let n = instance.len();
        let mut oracle = ComparisonOracle::new(&instance);
        for (a, b, c) in trips {
            let ids = [KeyId((a % n) as u32), KeyId((b % n) as u32), KeyId((c % n) as u32)];
            if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
                continue;
            }
            let ab = oracle.compare(ids[0], ids[1]).unwrap().is_less();
            let bc = oracle.compare(ids[1], ids[2]).unwrap().is_less();
            let ac = oracle.compare(ids[0], ids[2]).unwrap().is_less();
            if ab && bc {
                prop_assert!(ac, "cycle detected");
            }
            if !ab && !bc {
                prop_assert!(!ac, "cycle detected");
            }
        }
    }

    #[test]
    fn sorter_matches_ground_truth(instance in arb_instance(48), seed in any::<u64>()) {
        let run = inversion_sort(&instance, seed).unwrap();
        prop_assert_eq!(run.order, true_sorted(&instance));
        let sum = run.report.pivot_cost
            + run.report.search_cost
            + run.report.certificate_cost
            + run.report.stripe_sort_cost;
        prop_assert_eq!(sum, run.report.total_cost);
    }

    #[test]
    fn generated_instances_realize_their_pattern(
        n in 1usize..30,
        m in 1usize..30,
        seed in any::<u64>(),
    ) {
        let spec = GenSpec {
            n_red: n,
            n_blue: m,
            alpha: Cost::from_int(2),
            beta: Cost::from_int(2),
            pattern: Pattern::UniformShuffle,
            seed,
        };
        let i = generate(&spec).unwrap();
        prop_assert_eq!(i.n_red(), n);
        prop_assert_eq!(i.n_blue(), m);
        let text = i.to_text();
        let again = generate(&spec).unwrap();
        prop_assert_eq!(again.to_text(), text);
    }
}
