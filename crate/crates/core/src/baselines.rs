//! Comparison measures: Kendall's tau-b, DCG/nDCG, average precision, MAP
//! and precision/recall/F.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::ranking::{arrange_groups, induced_tie_groups, Hypothesis, RankedList, TieGroup, TiePolicy};

/// A metric result that may be undefined for the given input.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricValue {
    Value(f64),
    Undefined(String),
}

impl MetricValue {
    pub fn undefined(reason: impl Into<String>) -> Self {
        let reason = reason.into();
        debug_assert!(!reason.is_empty());
        MetricValue::Undefined(reason)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Value(v) => Some(*v),
            MetricValue::Undefined(_) => None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, MetricValue::Undefined(_))
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Value(v) => write!(f, "{v}"),
            MetricValue::Undefined(_) => f.write_str("nan"),
        }
    }
}

/// Tie-corrected Kendall correlation:
/// `(c - d) / sqrt((n0 - T_x) * (n0 - T_y))` with `n0 = n(n-1)/2` and `T`
/// the number of pairs tied on each side.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<MetricValue> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "tau-b needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid("tau-b needs at least two observations"));
    }
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut tied_x, mut tied_y) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]);
            let dy = y[i].partial_cmp(&y[j]);
            let (dx, dy) = match (dx, dy) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::invalid("tau-b input contains NaN")),
            };
            if dx.is_eq() {
                tied_x += 1;
            }
            if dy.is_eq() {
                tied_y += 1;
            }
            if dx.is_ne() && dy.is_ne() {
                if dx == dy {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as u64;
    if tied_x == pairs || tied_y == pairs {
        let side = if tied_x == pairs {
            "reference"
        } else {
            "hypothesis"
        };
        return Ok(MetricValue::undefined(format!("{side} values are constant")));
    }
    let denom = (((pairs - tied_x) as f64) * ((pairs - tied_y) as f64)).sqrt();
    Ok(MetricValue::Value(
        (concordant as f64 - discordant as f64) / denom,
    ))
}

/// tau-b between a reference and a hypothesis.
///
/// An explicit order is compared position by position: the ideal rank
/// sequence against the true ranks in hypothesis order, as in the usual
/// side-by-side table of reference and hypothesis rank lists. A score
/// hypothesis is compared item by item (true rank against predicted score),
/// so a constant prediction is undefined.
pub fn kendall_tau_b_hypothesis(list: &RankedList, hyp: &Hypothesis) -> Result<MetricValue> {
    let resolved = hyp.resolve(list)?;
    match hyp {
        Hypothesis::Order(_) => {
            let ideal: Vec<f64> = list.ideal_ranks().into_iter().map(|r| r as f64).collect();
            let placed: Vec<f64> = resolved.iter().map(|&i| list.rank(i) as f64).collect();
            kendall_tau_b(&ideal, &placed)
        }
        Hypothesis::Scores(pairs) => {
            let truth: Vec<f64> = resolved.iter().map(|&i| list.rank(i) as f64).collect();
            let scores: Vec<f64> = pairs.iter().map(|(_, s)| *s).collect();
            kendall_tau_b(&truth, &scores)
        }
    }
}

/// `sum gains[i] / log2(i + 2)` over 0-based `i`.
pub fn dcg(gains: &[f64]) -> f64 {
    gains
        .iter()
        .enumerate()
        .map(|(i, g)| g / ((i + 2) as f64).log2())
        .sum()
}

fn ideal_dcg(list: &RankedList) -> f64 {
    let ranks: Vec<f64> = list.ideal_ranks().into_iter().map(|r| r as f64).collect();
    dcg(&ranks)
}

/// True ranks along the hypothesis, with tie blocks arranged by `policy`.
/// Under [`TiePolicy::Expected`] each block position carries the block's mean rank.
fn placed_gains(list: &RankedList, groups: &[TieGroup], policy: TiePolicy) -> Vec<f64> {
    match policy {
        TiePolicy::Pessimistic | TiePolicy::Optimistic => {
            arrange_groups(list, groups, policy == TiePolicy::Pessimistic)
                .into_iter()
                .map(|i| list.rank(i) as f64)
                .collect()
        }
        TiePolicy::Expected => groups
            .iter()
            .flat_map(|g| {
                let mean = g.members.iter().map(|&i| list.rank(i) as f64).sum::<f64>() / g.len() as f64;
                std::iter::repeat_n(mean, g.len())
            })
            .collect(),
    }
}

/// nDCG with linear gains and `log2(i + 1)` discounts. Undefined when every
/// reference rank is zero.
pub fn ndcg(list: &RankedList, hyp: &Hypothesis, policy: TiePolicy) -> Result<MetricValue> {
    let groups = induced_tie_groups(list, hyp)?;
    let idcg = ideal_dcg(list);
    if idcg <= 0.0 {
        return Ok(MetricValue::undefined("ideal DCG is zero"));
    }
    Ok(MetricValue::Value(
        dcg(&placed_gains(list, &groups, policy)) / idcg,
    ))
}

/// DCG of the predicted gains themselves (sorted by prediction) over the
/// ideal DCG of the true ranks. Not bounded by 1: predictions that
/// overestimate high ranks push it above.
pub fn ndcg_raw_gain(list: &RankedList, predicted: &[(String, f64)]) -> Result<MetricValue> {
    let hyp = Hypothesis::Scores(predicted.to_vec());
    hyp.resolve(list)?;
    let idcg = ideal_dcg(list);
    if idcg <= 0.0 {
        return Ok(MetricValue::undefined("ideal DCG is zero"));
    }
    let mut gains: Vec<f64> = predicted.iter().map(|(_, g)| *g).collect();
    if gains.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("predicted gains must be finite"));
    }
    gains.sort_by(|a, b| b.total_cmp(a));
    Ok(MetricValue::Value(dcg(&gains) / idcg))
}

/// Average precision with binary relevance `rank > threshold`; the default
/// threshold is the lowest rank in the list.
pub fn average_precision(
    list: &RankedList,
    hyp: &Hypothesis,
    threshold: Option<u64>,
    policy: TiePolicy,
) -> Result<MetricValue> {
    let groups = induced_tie_groups(list, hyp)?;
    let threshold = threshold.unwrap_or_else(|| list.ranks().into_iter().min().unwrap_or(0));
    let relevant = |idx: usize| list.rank(idx) > threshold;
    let total_relevant = list.items().iter().filter(|it| it.rank > threshold).count();
    if total_relevant == 0 {
        return Ok(MetricValue::undefined(format!(
            "no item ranked above threshold {threshold}"
        )));
    }

    let mut precision_sum = 0.0;
    let mut seen = 0usize;
    for group in &groups {
        let size = group.len();
        let rel = group.members.iter().filter(|&&i| relevant(i)).count();
        let start = group.start;
        if rel > 0 {
            precision_sum += match policy {
                TiePolicy::Pessimistic => (1..=rel)
                    .map(|k| (seen + k) as f64 / (start + size - rel + k) as f64)
                    .sum::<f64>(),
                TiePolicy::Optimistic => (1..=rel)
                    .map(|k| (seen + k) as f64 / (start + k) as f64)
                    .sum::<f64>(),
                TiePolicy::Expected => expected_block_precision(seen, start, size, rel),
            };
        }
        seen += rel;
    }
    Ok(MetricValue::Value(precision_sum / total_relevant as f64))
}

/// Expected sum of precision values at the relevant items of a block of
/// `size` positions starting after `start` positions, holding `rel` relevant
/// items in uniformly random order, with `seen` relevant items before it.
fn expected_block_precision(seen: usize, start: usize, size: usize, rel: usize) -> f64 {
    // A relevant item at block slot t has, in expectation, (t-1)(rel-1)/(size-1)
    // other relevant items ahead of it inside the block.
    let per_slot = |t: usize| {
        let ahead = if size > 1 {
            (t - 1) as f64 * (rel - 1) as f64 / (size - 1) as f64
        } else {
            0.0
        };
        (seen as f64 + 1.0 + ahead) / (start + t) as f64
    };
    let slots: f64 = (1..=size).map(per_slot).sum();
    rel as f64 * slots / size as f64
}

/// Mean of per-pair average precision. Any undefined AP makes the mean
/// undefined.
pub fn mean_average_precision(
    pairs: &[(&RankedList, &Hypothesis)],
    threshold: Option<u64>,
    policy: TiePolicy,
) -> Result<MetricValue> {
    if pairs.is_empty() {
        return Err(Error::invalid("MAP needs at least one pair"));
    }
    let mut sum = 0.0;
    for (i, (list, hyp)) in pairs.iter().enumerate() {
        match average_precision(list, hyp, threshold, policy)? {
            MetricValue::Value(v) => sum += v,
            MetricValue::Undefined(reason) => {
                return Ok(MetricValue::undefined(format!("pair {}: {reason}", i + 1)));
            }
        }
    }
    Ok(MetricValue::Value(sum / pairs.len() as f64))
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecallF {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

pub fn precision_recall_f<T: Eq + Hash>(
    retrieved: &HashSet<T>,
    relevant: &HashSet<T>,
) -> Result<PrecisionRecallF> {
    if relevant.is_empty() {
        return Err(Error::invalid("relevant set is empty"));
    }
    let hits = retrieved.intersection(relevant).count() as f64;
    let precision = if retrieved.is_empty() {
        0.0
    } else {
        hits / retrieved.len() as f64
    };
    let recall = hits / relevant.len() as f64;
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(PrecisionRecallF { precision, recall, f })
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: [u64; 10] = [9, 4, 4, 2, 2, 2, 1, 1, 1, 1];

    fn v(m: MetricValue) -> f64 {
        m.value().expect("defined")
    }

    fn f64s(xs: &[u64]) -> Vec<f64> {
        xs.iter().map(|&x| x as f64).collect()
    }

    #[test]
    fn tau_b_table_rows() {
        let row2 = [9, 4, 4, 2, 2, 1, 2, 1, 1, 1];
        assert!((v(kendall_tau_b(&f64s(&L), &f64s(&row2)).unwrap()) - 0.8).abs() < 1e-12);
        let row3 = [4, 4, 2, 9, 2, 2, 1, 1, 1, 1];
        assert!((v(kendall_tau_b(&f64s(&L), &f64s(&row3)).unwrap()) - 26.0 / 35.0).abs() < 1e-12);
    }

    #[test]
    fn tau_b_undefined_and_errors() {
        let c = kendall_tau_b(&f64s(&L), &[3.0; 10]).unwrap();
        assert!(c.is_undefined());
        assert_eq!(c.to_string(), "nan");
        assert!(kendall_tau_b(&[1.0, 2.0], &[1.0]).is_err());
        assert!(kendall_tau_b(&[1.0], &[1.0]).is_err());
        assert_eq!(v(kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap()), 1.0);
    }

    #[test]
    fn dcg_examples() {
        assert!((dcg(&f64s(&L)) - 17.110085151218673).abs() < 1e-9);
        assert!((dcg(&f64s(&[1, 1, 1, 1, 2, 2, 2, 4, 4, 9])) - 9.781955893656477).abs() < 1e-9);
        assert_eq!(dcg(&[7.5]), 7.5);
    }

    #[test]
    fn ndcg_examples() {
        let list = RankedList::from_ranks(&[3, 2, 1]).unwrap();
        let rev = Hypothesis::order(["x3", "x2", "x1"]);
        let got = v(ndcg(&list, &rev, TiePolicy::Pessimistic).unwrap());
        let want = (1.0 + 2.0 / 3f64.log2() + 3.0 / 2.0) / (3.0 + 2.0 / 3f64.log2() + 1.0 / 2.0);
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.790).abs() < 1e-3);
        assert_eq!(
            v(ndcg(&list, &Hypothesis::ideal(&list), TiePolicy::Pessimistic).unwrap()),
            1.0
        );

        let zeros = RankedList::from_ranks(&[0, 0]).unwrap();
        assert!(ndcg(&zeros, &Hypothesis::ideal(&zeros), TiePolicy::Pessimistic)
            .unwrap()
            .is_undefined());
    }

    #[test]
    fn ndcg_tie_policies_bracket() {
        let list = RankedList::from_ranks(&L).unwrap();
        let c = Hypothesis::constant(&list, 0.0);
        let p = v(ndcg(&list, &c, TiePolicy::Pessimistic).unwrap());
        let e = v(ndcg(&list, &c, TiePolicy::Expected).unwrap());
        let o = v(ndcg(&list, &c, TiePolicy::Optimistic).unwrap());
        assert!(p < e && e < o);
        assert_eq!(o, 1.0);
    }

    #[test]
    fn ndcg_raw_gain_examples() {
        let list = RankedList::from_ranks(&L).unwrap();
        let same: Vec<(String, f64)> = list
            .items()
            .iter()
            .map(|it| (it.id.clone(), it.rank as f64))
            .collect();
        assert!((v(ndcg_raw_gain(&list, &same).unwrap()) - 1.0).abs() < 1e-12);
        let doubled: Vec<(String, f64)> = list
            .items()
            .iter()
            .map(|it| (it.id.clone(), 2.0 * it.rank as f64))
            .collect();
        assert!((v(ndcg_raw_gain(&list, &doubled).unwrap()) - 2.0).abs() < 1e-12);
        // every item predicted one level up from its true rank
        let over: Vec<(String, f64)> = list
            .items()
            .iter()
            .map(|it| (it.id.clone(), (it.rank + 2) as f64))
            .collect();
        assert!(v(ndcg_raw_gain(&list, &over).unwrap()) > 1.0);
        assert!(ndcg_raw_gain(&list, &over[1..]).is_err());
    }

    #[test]
    fn average_precision_examples() {
        let list = RankedList::from_ranks(&L).unwrap();
        let ideal = Hypothesis::ideal(&list);
        for t in [None, Some(1), Some(2), Some(4)] {
            assert_eq!(
                v(average_precision(&list, &ideal, t, TiePolicy::Pessimistic).unwrap()),
                1.0
            );
        }
        let row4 = Hypothesis::order_by_ranks(&list, &[1, 4, 4, 2, 2, 2, 9, 1, 1, 1]).unwrap();
        let want = (0.5 + 2.0 / 3.0 + 0.75 + 0.8 + 5.0 / 6.0 + 6.0 / 7.0) / 6.0;
        let got = v(average_precision(&list, &row4, Some(1), TiePolicy::Pessimistic).unwrap());
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.7345).abs() < 1e-4);

        let small = RankedList::from_ranks(&[3, 2, 1]).unwrap();
        let h = Hypothesis::order(["x3", "x1", "x2"]);
        let got = v(average_precision(&small, &h, Some(1), TiePolicy::Pessimistic).unwrap());
        assert!((got - (0.5 + 2.0 / 3.0) / 2.0).abs() < 1e-12);

        let flat = RankedList::from_ranks(&[2, 2]).unwrap();
        assert!(
            average_precision(&flat, &Hypothesis::ideal(&flat), None, TiePolicy::Pessimistic)
                .unwrap()
                .is_undefined()
        );
    }

    #[test]
    fn expected_ap_matches_enumeration() {
        // one block of four items, two relevant: average over all 6 placements
        let list = RankedList::from_ranks(&[2, 2, 1, 1]).unwrap();
        let e = v(average_precision(
            &list,
            &Hypothesis::constant(&list, 0.0),
            None,
            TiePolicy::Expected,
        )
        .unwrap());
        let placements = [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]];
        let brute: f64 = placements
            .iter()
            .map(|[a, b]| (1.0 / *a as f64 + 2.0 / *b as f64) / 2.0)
            .sum::<f64>()
            / 6.0;
        assert!((e - brute).abs() < 1e-12);
    }

    #[test]
    fn map_examples() {
        let list = RankedList::from_ranks(&[3, 2, 1]).unwrap();
        let ideal = Hypothesis::ideal(&list);
        let h = Hypothesis::order(["x3", "x1", "x2"]);
        let ap = v(average_precision(&list, &h, Some(1), TiePolicy::Pessimistic).unwrap());
        assert_eq!(
            v(mean_average_precision(&[(&list, &h)], Some(1), TiePolicy::Pessimistic).unwrap()),
            ap
        );
        let m = v(
            mean_average_precision(&[(&list, &ideal), (&list, &h)], Some(1), TiePolicy::Pessimistic).unwrap(),
        );
        assert!((m - (1.0 + ap) / 2.0).abs() < 1e-12);
        assert!(mean_average_precision(&[], None, TiePolicy::Pessimistic).is_err());
        let flat = RankedList::from_ranks(&[1, 1]).unwrap();
        let fh = Hypothesis::ideal(&flat);
        assert!(
            mean_average_precision(&[(&list, &ideal), (&flat, &fh)], None, TiePolicy::Pessimistic)
                .unwrap()
                .is_undefined()
        );
    }

    #[test]
    fn prf_examples() {
        let rel: HashSet<_> = ["a", "b"].into_iter().collect();
        let prf = precision_recall_f(&rel, &rel).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f), (1.0, 1.0, 1.0));
        let none: HashSet<_> = ["c"].into_iter().collect();
        let prf = precision_recall_f(&none, &rel).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f), (0.0, 0.0, 0.0));
        let half: HashSet<_> = ["a"].into_iter().collect();
        let prf = precision_recall_f(&half, &rel).unwrap();
        assert!((prf.f - 2.0 / 3.0).abs() < 1e-12);
        let empty: HashSet<&str> = HashSet::new();
        assert_eq!(precision_recall_f(&empty, &rel).unwrap().f, 0.0);
        assert!(precision_recall_f(&rel, &empty).is_err());
    }
}
