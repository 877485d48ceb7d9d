//! Evaluation of rank orderings over discrete ranks with many ties and
//! skewed rank distributions.
//!
//! The headline measure is [rankDCG](rankdcg): a DCG variant whose gains and
//! discounts are the compressed rank levels of the reference list, normalized
//! between its worst and best possible orderings so that the reversed
//! ordering scores exactly 0 and the ideal one exactly 1. Tau-b, nDCG, AP/MAP
//! and F are provided for side-by-side comparison, along with an exhaustive
//! enumeration oracle, synthetic data generation, file formats, and the
//! `rankdcg` command line.
//!
//! ```
//! use rankdcg::{rank_dcg, Hypothesis, RankedList, TiePolicy};
//!
//! let reference = RankedList::from_ranks(&[9, 4, 4, 2, 2, 2, 1, 1, 1, 1]).unwrap();
//! let hyp = Hypothesis::order_by_ranks(&reference, &[4, 4, 2, 9, 2, 2, 1, 1, 1, 1]).unwrap();
//! let score = rank_dcg(&reference, &hyp, TiePolicy::Pessimistic).unwrap();
//! assert!((score.normalized - 0.65).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod cli;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod io;
pub mod oracle;
pub mod rankdcg;
pub mod ranking;

pub use baselines::{
    average_precision, dcg, kendall_tau_b, kendall_tau_b_hypothesis, mean_average_precision, ndcg,
    ndcg_raw_gain, precision_recall_f, MetricValue, PrecisionRecallF,
};
pub use error::{Error, Mismatch, Result};
pub use eval::{evaluate_all, evaluate_pair, EvalOptions, Metric};
pub use rankdcg::{
    cost_curve, dcg_prime, extrema, rank_dcg, rank_dcg_of_order, tie_group_contribution, CostVariant,
    RankDcgBreakdown,
};
pub use ranking::{
    build_mapping, induced_tie_groups, Hypothesis, RankMapping, RankedItem, RankedList, TieGroup, TiePolicy,
};
