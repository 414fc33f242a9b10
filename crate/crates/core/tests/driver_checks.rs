//! Instrumented end-to-end runs: every structural invariant checked each
//! round, outputs compared against ground truth, and the refinement-tree /
//! stripe correspondence verified.

use priced_sort::driver::{inversion_sort_with, RunOptions};
use priced_sort::gen::{enumerate_small, generate, GenSpec, Pattern};
use priced_sort::instrument::{rank_ext, stripes, true_sorted};
use priced_sort::{Cost, PricedInstance};

fn checked() -> RunOptions {
    RunOptions { check_invariants: true, record_rounds: true, ..Default::default() }
}

fn price(s: &str) -> Cost {
    s.parse().unwrap()
}

#[test]
fn exhaustive_small_instances_sort_correctly() {
    for (alpha, beta) in [("2", "2"), ("10", "3"), ("2.5", "7")] {
        for n in 1..=7 {
            for instance in enumerate_small(n, price(alpha), price(beta)).unwrap() {
                for seed in 0..3 {
                    let run = inversion_sort_with(&instance, seed, &checked())
                        .unwrap_or_else(|e| panic!("n={n} seed={seed}: {e}"));
                    assert_eq!(run.order, true_sorted(&instance));
                }
            }
        }
    }
}

#[test]
fn exhaustive_small_instances_with_infinite_prices() {
    // with forbidden monochromatic comparisons the run stays bichromatic
    for n in 1..=6 {
        for instance in enumerate_small(n, Cost::Infinite, Cost::Infinite).unwrap() {
            let run = inversion_sort_with(&instance, 1, &checked()).unwrap();
            assert_eq!(run.order, true_sorted(&instance));
            // every charge is a cross comparison except the final stripe
            // sorts, which may need monochromatic work
            assert!(run.report.search_cost.as_finite().is_some());
            assert!(run.report.certificate_cost.as_finite().is_some());
            assert!(run.report.pivot_cost.as_finite().is_some());
        }
    }
}

#[test]
fn random_instances_sort_with_all_invariants() {
    for (alpha, beta) in [("2", "2"), ("1000", "1000"), ("3.5", "12")] {
        for seed in 0..20 {
            let spec = GenSpec {
                n_red: 20 + (seed as usize * 7) % 30,
                n_blue: 14 + (seed as usize * 5) % 30,
                alpha: price(alpha),
                beta: price(beta),
                pattern: Pattern::UniformShuffle,
                seed,
            };
            let instance = generate(&spec).unwrap();
            let run = inversion_sort_with(&instance, seed ^ 0xabcd, &checked()).unwrap();
            assert_eq!(run.order, true_sorted(&instance));
        }
    }
}

#[test]
fn alternating_and_striped_patterns_sort() {
    let specs = [
        GenSpec {
            n_red: 32,
            n_blue: 32,
            alpha: Cost::Infinite,
            beta: Cost::Infinite,
            pattern: Pattern::Alternating,
            seed: 5,
        },
        GenSpec {
            n_red: 24,
            n_blue: 18,
            alpha: price("64"),
            beta: price("64"),
            pattern: Pattern::StripeLengths {
                first: priced_sort::Color::Red,
                red: vec![10, 10, 4],
                blue: vec![9, 9],
            },
            seed: 6,
        },
        GenSpec {
            n_red: 24,
            n_blue: 24,
            alpha: price("48"),
            beta: price("48"),
            pattern: Pattern::FewLongStripes { long_len: 16 },
            seed: 7,
        },
    ];
    for spec in specs {
        let instance = generate(&spec).unwrap();
        for seed in 0..5 {
            let run = inversion_sort_with(&instance, seed, &checked()).unwrap();
            assert_eq!(run.order, true_sorted(&instance));
        }
    }
}

#[test]
fn instrumented_run_at_n256_holds_every_round() {
    let spec = GenSpec {
        n_red: 128,
        n_blue: 128,
        alpha: price("16"),
        beta: price("5"),
        pattern: Pattern::UniformShuffle,
        seed: 99,
    };
    let instance = generate(&spec).unwrap();
    let run = inversion_sort_with(&instance, 17, &checked()).unwrap();
    assert_eq!(run.order, true_sorted(&instance));
}

#[test]
fn frontier_leaves_span_adjacent_stripes() {
    let spec = GenSpec {
        n_red: 30,
        n_blue: 26,
        alpha: price("8"),
        beta: price("6"),
        pattern: Pattern::UniformShuffle,
        seed: 21,
    };
    let instance = generate(&spec).unwrap();
    let run = inversion_sort_with(&instance, 9, &checked()).unwrap();

    // Pivot pairs of the final frontier chain across the backbone, and each
    // pair's pivots sit in adjacent stripes (sentinels acting as virtual
    // stripes before the first and after the last).
    let decomposition = stripes(&instance);
    let stripe_index = |id: priced_sort::KeyId| -> i64 {
        if id == priced_sort::RED_SENTINEL {
            return -1;
        }
        if id == priced_sort::BLUE_SENTINEL {
            return decomposition.len() as i64;
        }
        decomposition
            .stripes
            .iter()
            .position(|(_, members)| members.contains(&id))
            .unwrap() as i64
    };
    let first_is_red = decomposition.stripes.first().unwrap().0 == priced_sort::Color::Red;
    let last_is_blue = decomposition.stripes.last().unwrap().0 == priced_sort::Color::Blue;
    let frontier = run.tree.frontier_in_order();
    let mut prev_upper: Option<priced_sort::KeyId> = None;
    for leaf_id in frontier {
        let node = run.tree.node(leaf_id);
        let (lower, upper) = node.pivots_ordered();
        assert!(rank_ext(&instance, lower) < rank_ext(&instance, upper));
        if let Some(p) = prev_upper {
            assert_eq!(p, lower, "frontier pivots must chain");
        }
        // Real neighboring pivots represent adjacent stripes. A sentinel
        // end additionally absorbs the extremal stripe of its own color
        // into its bucket, skipping one stripe index.
        let expected_gap = 1
            + i64::from(lower == priced_sort::RED_SENTINEL && first_is_red)
            + i64::from(upper == priced_sort::BLUE_SENTINEL && last_is_blue);
        assert_eq!(
            stripe_index(upper) - stripe_index(lower),
            expected_gap,
            "pivots {lower} and {upper} must represent adjacent stripes"
        );
        prev_upper = Some(upper);
    }
}

#[test]
fn trace_and_snapshots_line_up_with_rounds() {
    let spec = GenSpec {
        n_red: 16,
        n_blue: 16,
        alpha: price("4"),
        beta: price("4"),
        pattern: Pattern::UniformShuffle,
        seed: 2,
    };
    let instance = generate(&spec).unwrap();
    let opts = RunOptions {
        record_rounds: true,
        record_snapshots: true,
        check_invariants: true,
        ..Default::default()
    };
    let run = inversion_sort_with(&instance, 4, &opts).unwrap();
    assert_eq!(run.trace.len() as u64, run.report.rounds);
    assert_eq!(run.snapshots.len() as u64, run.report.rounds);
    assert_eq!(run.report.unaffected_series.len() as u64, run.report.rounds);
    for (i, t) in run.trace.iter().enumerate() {
        assert_eq!(t.round, i as u64 + 1);
        assert!(t.unaffected <= t.active);
    }
    // the last round leaves nothing active
    assert_eq!(run.trace.last().unwrap().active, 0);
}

#[test]
fn single_key_and_single_color_edge_cases() {
    for colors in ["R", "B"] {
        let pairs = vec![(
            if colors == "R" { priced_sort::Color::Red } else { priced_sort::Color::Blue },
            0,
        )];
        let instance = PricedInstance::new(pairs, price("2"), price("2")).unwrap();
        let run = inversion_sort_with(&instance, 0, &checked()).unwrap();
        assert_eq!(run.order.len(), 1);
        assert_eq!(run.report.total_cost, Cost::ZERO);
        assert_eq!(run.report.ratio, Cost::ONE);
    }
}
