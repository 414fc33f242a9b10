//! Sorting algorithms for the price regimes where bichromatic comparisons
//! are not the cheapest, plus the multichromatic generalization.

mod cheap;
mod multi;

pub use cheap::{sort_both_then_merge, sort_middle_regime, VariantError, VariantRun};
pub use multi::{
    multichromatic_sort, random_multi_instance, MultiColor, MultiError, MultiInstance,
    MultiLedger, MultiOracle, MultiRun,
};
