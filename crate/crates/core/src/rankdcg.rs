//! The rankDCG measure.
//!
//! Each position `i` of the ideal ordering carries a fixed gain `g_i` (the
//! compressed rank of the item that belongs there). A hypothesis places an
//! item `x_i` at that position, and the position's gain is divided by the
//! placed item's discount `d(x_i)`:
//!
//! ```text
//! DCG' = sum_i g_i / d(x_i)
//! rankDCG = (DCG' - min DCG') / (max DCG' - min DCG')
//! ```
//!
//! By the rearrangement inequality the maximum is reached by the ideal
//! ordering and the minimum by its reverse. Because equal ranks share one
//! discount, permuting equal-rank items never changes the score.

use crate::error::{Error, Mismatch, Result};
use crate::ranking::{induced_tie_groups, Hypothesis, RankMapping, RankedList, TiePolicy};

/// Unnormalized and normalized rankDCG for one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDcgBreakdown {
    pub dcg_prime: f64,
    pub min_dcg_prime: f64,
    pub max_dcg_prime: f64,
    pub normalized: f64,
    /// Set when all items share one rank (`max == min`); `normalized` is 1.0.
    pub degenerate: bool,
}

/// Position cost functions that can be plotted over the ideal ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostVariant {
    /// `rel(i) / log2(i + 1)`
    DcgLog,
    /// `(2^rel(i) - 1) / log2(i + 1)`
    BurgesExp,
    /// `rel'(i) / i`
    RelPrimeLinear,
    /// `rel'(i) / rev_rel'(i)`
    RankDcg,
}

impl CostVariant {
    pub const ALL: [CostVariant; 4] = [
        CostVariant::DcgLog,
        CostVariant::BurgesExp,
        CostVariant::RelPrimeLinear,
        CostVariant::RankDcg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostVariant::DcgLog => "dcg-log",
            CostVariant::BurgesExp => "burges-exp",
            CostVariant::RelPrimeLinear => "rel-prime-linear",
            CostVariant::RankDcg => "rankdcg",
        }
    }
}

impl std::str::FromStr for CostVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown cost variant `{s}`")))
    }
}

fn check_permutation(list: &RankedList, order: &[usize]) -> Result<()> {
    if order.len() != list.len() {
        return Err(Error::HypothesisMismatch(Mismatch::Length {
            expected: list.len(),
            got: order.len(),
        }));
    }
    let mut seen = vec![false; list.len()];
    for &idx in order {
        match seen.get_mut(idx) {
            None => {
                return Err(Error::HypothesisMismatch(Mismatch::UnknownId(format!("#{idx}"))));
            }
            Some(s) if *s => {
                return Err(Error::HypothesisMismatch(Mismatch::DuplicateId(
                    list.item(idx).id.clone(),
                )));
            }
            Some(s) => *s = true,
        }
    }
    Ok(())
}

fn accumulate(mapping: &RankMapping, list: &RankedList, order: &[usize]) -> f64 {
    mapping
        .position_gains()
        .iter()
        .zip(order)
        .map(|(&g, &idx)| {
            let d = mapping.discount(list.rank(idx)).expect("rank present in mapping");
            g as f64 / d as f64
        })
        .fold(0.0, |acc, c| acc + c)
}

/// DCG' of an explicit ordering given as reference item indices.
pub fn dcg_prime(list: &RankedList, order: &[usize]) -> Result<f64> {
    dcg_prime_with_mapping(&list.mapping(), list, order)
}

/// [`dcg_prime`] with a precomputed mapping of `list`.
pub(crate) fn dcg_prime_with_mapping(
    mapping: &RankMapping,
    list: &RankedList,
    order: &[usize],
) -> Result<f64> {
    check_permutation(list, order)?;
    Ok(accumulate(mapping, list, order))
}

/// `(min, max)` of DCG' over all orderings of `list`.
pub fn extrema(list: &RankedList) -> (f64, f64) {
    extrema_of(&list.mapping())
}

fn extrema_of(mapping: &RankMapping) -> (f64, f64) {
    let gains = mapping.position_gains();
    let discounts = mapping.position_discounts();
    let sum = |ds: &mut dyn Iterator<Item = &u32>| {
        gains
            .iter()
            .zip(ds)
            .map(|(&g, &d)| g as f64 / d as f64)
            .fold(0.0, |acc, c| acc + c)
    };
    let max = sum(&mut discounts.iter());
    let min = sum(&mut discounts.iter().rev());
    (min, max)
}

/// Contribution of one tied block: `position_gains` are the ideal gains of
/// the positions the block occupies, `item_discounts` the discounts of the
/// items it holds.
pub fn tie_group_contribution(
    position_gains: &[u32],
    item_discounts: &[u32],
    policy: TiePolicy,
) -> Result<f64> {
    if position_gains.len() != item_discounts.len() {
        return Err(Error::invalid(format!(
            "tie group has {} positions but {} items",
            position_gains.len(),
            item_discounts.len()
        )));
    }
    if position_gains.is_empty() {
        return Err(Error::invalid("empty tie group"));
    }
    let mut gains = position_gains.to_vec();
    gains.sort_unstable_by(|a, b| b.cmp(a));
    let mut discounts = item_discounts.to_vec();
    let value = match policy {
        // a lone item has nothing to resolve; keep it bit-identical to an explicit order
        _ if gains.len() == 1 => gains[0] as f64 / discounts[0] as f64,
        TiePolicy::Expected => {
            let gain_sum: f64 = gains.iter().map(|&g| g as f64).sum();
            let inv_mean = discounts.iter().map(|&d| 1.0 / d as f64).sum::<f64>() / discounts.len() as f64;
            gain_sum * inv_mean
        }
        TiePolicy::Pessimistic | TiePolicy::Optimistic => {
            if policy == TiePolicy::Pessimistic {
                discounts.sort_unstable_by(|a, b| b.cmp(a));
            } else {
                discounts.sort_unstable();
            }
            gains
                .iter()
                .zip(&discounts)
                .map(|(&g, &d)| g as f64 / d as f64)
                .fold(0.0, |acc, c| acc + c)
        }
    };
    Ok(value)
}

/// Scores a hypothesis. Explicit orders ignore `policy`; score ties are
/// resolved block by block according to it.
pub fn rank_dcg(list: &RankedList, hyp: &Hypothesis, policy: TiePolicy) -> Result<RankDcgBreakdown> {
    let groups = induced_tie_groups(list, hyp)?;
    let mapping = list.mapping();
    let gains = mapping.position_gains();
    let mut total = 0.0;
    for group in &groups {
        let discounts: Vec<u32> = group
            .members
            .iter()
            .map(|&idx| mapping.discount(list.rank(idx)).expect("rank present in mapping"))
            .collect();
        total += tie_group_contribution(&gains[group.positions()], &discounts, policy)?;
    }
    Ok(breakdown(total, extrema_of(&mapping)))
}

pub(crate) fn breakdown(dcg_prime: f64, (min, max): (f64, f64)) -> RankDcgBreakdown {
    let degenerate = max <= min;
    let normalized = if degenerate {
        1.0
    } else {
        ((dcg_prime - min) / (max - min)).clamp(0.0, 1.0)
    };
    RankDcgBreakdown {
        dcg_prime,
        min_dcg_prime: min,
        max_dcg_prime: max,
        normalized,
        degenerate,
    }
}

/// Normalized rankDCG of an explicit ordering of item indices.
pub fn rank_dcg_of_order(list: &RankedList, order: &[usize]) -> Result<RankDcgBreakdown> {
    let value = dcg_prime(list, order)?;
    Ok(breakdown(value, extrema(list)))
}

/// Per-position cost of `variant` along the ideal ordering, positions 1-based.
pub fn cost_curve(list: &RankedList, variant: CostVariant) -> Vec<(usize, f64)> {
    let ranks = list.ideal_ranks();
    let mapping = list.mapping();
    let gains = mapping.position_gains();
    let discounts = mapping.position_discounts();
    (0..ranks.len())
        .map(|i| {
            let pos = i + 1;
            let log_discount = ((pos + 1) as f64).log2();
            let cost = match variant {
                CostVariant::DcgLog => ranks[i] as f64 / log_discount,
                CostVariant::BurgesExp => ((ranks[i] as f64).exp2() - 1.0) / log_discount,
                CostVariant::RelPrimeLinear => gains[i] as f64 / pos as f64,
                CostVariant::RankDcg => gains[i] as f64 / discounts[i] as f64,
            };
            (pos, cost)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: [u64; 10] = [9, 4, 4, 2, 2, 2, 1, 1, 1, 1];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn dcg_prime_examples() {
        let list = RankedList::from_ranks(&L).unwrap();
        let ideal = list.ideal_order();
        assert!(close(dcg_prime(&list, &ideal).unwrap(), 10.0));
        let rev: Vec<usize> = ideal.iter().rev().copied().collect();
        assert!(close(dcg_prime(&list, &rev).unwrap(), 20.0 / 3.0));

        let small = RankedList::from_ranks(&[3, 2, 1]).unwrap();
        assert!(close(dcg_prime(&small, &[1, 0, 2]).unwrap(), 23.0 / 6.0));
        let b = rank_dcg_of_order(&small, &[1, 0, 2]).unwrap();
        assert!(close(b.normalized, 0.625));
    }

    #[test]
    fn dcg_prime_rejects_non_permutations() {
        let list = RankedList::from_ranks(&[3, 2, 1]).unwrap();
        assert!(matches!(
            dcg_prime(&list, &[0, 1]),
            Err(Error::HypothesisMismatch(_))
        ));
        assert!(matches!(
            dcg_prime(&list, &[0, 1, 1]),
            Err(Error::HypothesisMismatch(_))
        ));
        assert!(matches!(
            dcg_prime(&list, &[0, 1, 7]),
            Err(Error::HypothesisMismatch(_))
        ));
    }

    #[test]
    fn extrema_examples() {
        let (min, max) = extrema(&RankedList::from_ranks(&L).unwrap());
        assert!(close(min, 20.0 / 3.0) && close(max, 10.0));
        assert_eq!(extrema(&RankedList::from_ranks(&[2, 1]).unwrap()), (2.0, 2.5));
        assert_eq!(extrema(&RankedList::from_ranks(&[7, 7, 7]).unwrap()), (3.0, 3.0));
    }

    #[test]
    fn degenerate_lists_score_one() {
        for ranks in [&[7u64, 7, 7][..], &[5]] {
            let list = RankedList::from_ranks(ranks).unwrap();
            let b = rank_dcg(&list, &Hypothesis::constant(&list, 0.0), TiePolicy::Pessimistic).unwrap();
            assert!(b.degenerate);
            assert_eq!(b.normalized, 1.0);
        }
    }

    #[test]
    fn tie_group_examples() {
        for policy in [TiePolicy::Pessimistic, TiePolicy::Optimistic, TiePolicy::Expected] {
            assert_eq!(tie_group_contribution(&[3], &[2], policy).unwrap(), 1.5);
        }
        assert_eq!(
            tie_group_contribution(&[2, 1], &[1, 2], TiePolicy::Expected).unwrap(),
            2.25
        );
        assert_eq!(
            tie_group_contribution(&[2, 1], &[1, 2], TiePolicy::Pessimistic).unwrap(),
            2.0
        );
        assert_eq!(
            tie_group_contribution(&[2, 1], &[1, 2], TiePolicy::Optimistic).unwrap(),
            2.5
        );
        assert!(matches!(
            tie_group_contribution(&[2, 1], &[1], TiePolicy::Expected),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn constant_prediction_is_worst_case() {
        let list = RankedList::from_ranks(&L).unwrap();
        let b = rank_dcg(&list, &Hypothesis::constant(&list, 0.3), TiePolicy::Pessimistic).unwrap();
        assert_eq!(b.dcg_prime, b.min_dcg_prime);
        assert_eq!(b.normalized, 0.0);
        let b = rank_dcg(&list, &Hypothesis::constant(&list, 0.3), TiePolicy::Optimistic).unwrap();
        assert_eq!(b.normalized, 1.0);
    }

    #[test]
    fn rankdcg_curve_is_stepwise() {
        let list = RankedList::from_ranks(&L).unwrap();
        let costs: Vec<f64> = cost_curve(&list, CostVariant::RankDcg)
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        let want = [
            4.0,
            1.5,
            1.5,
            2.0 / 3.0,
            2.0 / 3.0,
            2.0 / 3.0,
            0.25,
            0.25,
            0.25,
            0.25,
        ];
        assert!(costs.iter().zip(want).all(|(a, b)| close(*a, b)));
        assert_eq!(cost_curve(&list, CostVariant::RelPrimeLinear)[0], (1, 4.0));
        assert_eq!(cost_curve(&list, CostVariant::DcgLog)[0], (1, 9.0));
        assert_eq!(cost_curve(&list, CostVariant::BurgesExp)[0], (1, 511.0));
        let (pos, c) = cost_curve(&list, CostVariant::DcgLog)[2];
        assert_eq!(pos, 3);
        assert!(close(c, 4.0 / 2.0));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in CostVariant::ALL {
            assert_eq!(v.name().parse::<CostVariant>().unwrap(), v);
        }
    }
}
