//! Bichromatic sorting with priced comparisons.
//!
//! Keys are colored red or blue; comparing two keys of the same color costs
//! `alpha` (red) or `beta` (blue) while cross-color comparisons cost 1. The
//! cheapest possible proof of the sorted order is the Hamiltonian path of
//! the true order, and the interesting question is how close a sorter can
//! get to that cost without knowing the order.
//!
//! The crate provides:
//!
//! - a cost-charging [`oracle`] over instances with hidden ranks,
//! - the randomized inversion-driven sorter for the regime where
//!   cross-color comparisons are cheapest ([`driver::inversion_sort`]),
//! - direct algorithms for the other price regimes and a multichromatic
//!   generalization ([`variants`]),
//! - seeded instance [`gen`]erators and exhaustive small-instance
//!   enumeration,
//! - ground-truth [`instrument`]ation for verifying runs and measuring
//!   competitive ratios.

pub mod backbone;
pub mod cost;
pub mod driver;
pub mod gen;
pub mod instance;
pub mod instrument;
pub mod oracle;
pub mod search;
pub mod sortutil;
pub mod tree;
pub mod variants;

pub use backbone::{Backbone, Bucket, InvariantReport, SubState, Subproblem};
pub use cost::{competitive_ratio, Cost, Rat};
pub use driver::{
    inversion_sort, inversion_sort_with, measure_unaffected, sort_stripe, FaultInjection,
    RoundTrace, RunError, RunOptions, RunReport, SortRun,
};
pub use gen::{enumerate_small, generate, GenError, GenSpec, Pattern};
pub use instance::{Color, ColoredKey, InstanceError, KeyId, PricedInstance, BLUE_SENTINEL, RED_SENTINEL};
pub use instrument::{hamiltonian_cost, stripes, true_sorted, GroundTruth, StripeDecomposition};
pub use oracle::{ComparisonOracle, CostLedger, OracleError, Outcome, Phase};
pub use search::{
    canonicalize_inversion, certificate_cost, replenish_samples, round_probe, run_certificate,
    CertificateChoice, CertificateKind, Keep, ProbeOutcome, RawInversion, Redraw,
};
pub use tree::{Polarity, RefinementNode, RefinementTree};
