use std::collections::HashSet;

use proptest::prelude::*;

use rankdcg::io::{
    parse_hypothesis, parse_reference, write_hypothesis, write_reference, DataFormat, HypothesisMode,
};
use rankdcg::{
    average_precision, kendall_tau_b, ndcg, precision_recall_f, rank_dcg, rank_dcg_of_order, Hypothesis,
    RankedList, TiePolicy,
};

const POLICIES: [TiePolicy; 3] = [TiePolicy::Pessimistic, TiePolicy::Expected, TiePolicy::Optimistic];

fn ranks_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=6, 1..24)
}

/// Ranks plus a permutation of their indices.
fn ranks_and_order() -> impl Strategy<Value = (Vec<u64>, Vec<usize>)> {
    ranks_strategy().prop_flat_map(|r| {
        let n = r.len();
        (Just(r), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Ranks plus a coarse score per item, so score ties are common.
fn ranks_and_scores() -> impl Strategy<Value = (Vec<u64>, Vec<u8>)> {
    ranks_strategy().prop_flat_map(|r| {
        let n = r.len();
        (Just(r), prop::collection::vec(0u8..4, n))
    })
}

fn order_hyp(list: &RankedList, order: &[usize]) -> Hypothesis {
    Hypothesis::order(order.iter().map(|&i| list.item(i).id.clone()))
}

fn score_hyp(list: &RankedList, scores: &[u8]) -> Hypothesis {
    Hypothesis::scores(
        list.items()
            .iter()
            .zip(scores)
            .map(|(it, &s)| (it.id.clone(), s as f64)),
    )
}

proptest! {
    #[test]
    fn rankdcg_in_unit_interval((ranks, scores) in ranks_and_scores()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let hyp = score_hyp(&list, &scores);
        for pol in POLICIES {
            let b = rank_dcg(&list, &hyp, pol).unwrap();
            prop_assert!((0.0..=1.0).contains(&b.normalized));
            prop_assert!(b.min_dcg_prime <= b.max_dcg_prime);
        }
    }

    #[test]
    fn ideal_scores_one_and_reverse_zero(ranks in ranks_strategy()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let ideal = list.ideal_order();
        prop_assert_eq!(rank_dcg_of_order(&list, &ideal).unwrap().normalized, 1.0);
        let rev: Vec<usize> = ideal.into_iter().rev().collect();
        let want = if list.is_degenerate() { 1.0 } else { 0.0 };
        prop_assert_eq!(rank_dcg_of_order(&list, &rev).unwrap().normalized, want);
    }

    #[test]
    fn swapping_equal_ranks_is_invisible((ranks, order) in ranks_and_order(), a in 0usize..64, b in 0usize..64) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let (a, b) = (a % order.len(), b % order.len());
        prop_assume!(ranks[order[a]] == ranks[order[b]]);
        let mut swapped = order.clone();
        swapped.swap(a, b);
        let x = rank_dcg_of_order(&list, &order).unwrap().normalized;
        let y = rank_dcg_of_order(&list, &swapped).unwrap().normalized;
        prop_assert_eq!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn strictly_monotone_rank_maps_change_nothing((ranks, order) in ranks_and_order(), k in 1u64..5, c in 0u64..100) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let mapped = list.map_ranks(|r| k * r * r + c).unwrap();
        let hyp = order_hyp(&list, &order);
        let x = rank_dcg(&list, &hyp, TiePolicy::Pessimistic).unwrap();
        let y = rank_dcg(&mapped, &hyp, TiePolicy::Pessimistic).unwrap();
        prop_assert_eq!(x.normalized.to_bits(), y.normalized.to_bits());
        prop_assert_eq!(x.dcg_prime.to_bits(), y.dcg_prime.to_bits());
    }

    #[test]
    fn policies_are_ordered((ranks, scores) in ranks_and_scores()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let hyp = score_hyp(&list, &scores);
        let [p, e, o] = POLICIES.map(|pol| rank_dcg(&list, &hyp, pol).unwrap().dcg_prime);
        prop_assert!(p <= e + 1e-12 && e <= o + 1e-12, "{p} {e} {o}");
    }

    #[test]
    fn distinct_scores_ignore_policy((ranks, order) in ranks_and_order()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let n = order.len();
        let hyp = Hypothesis::scores(order.iter().enumerate().map(|(pos, &i)| (list.item(i).id.clone(), (n - pos) as f64)));
        let explicit = rank_dcg(&list, &order_hyp(&list, &order), TiePolicy::Pessimistic).unwrap().normalized;
        for pol in POLICIES {
            prop_assert_eq!(rank_dcg(&list, &hyp, pol).unwrap().normalized, explicit);
        }
    }

    #[test]
    fn tau_b_symmetric_and_bounded(pairs in prop::collection::vec((0u8..5, 0u8..5), 2..30)) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let xy = kendall_tau_b(&x, &y).unwrap();
        let yx = kendall_tau_b(&y, &x).unwrap();
        prop_assert_eq!(xy.value().map(f64::to_bits), yx.value().map(f64::to_bits));
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let flipped = kendall_tau_b(&x, &neg).unwrap();
        match (xy.value(), flipped.value()) {
            (Some(a), Some(b)) => {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&a));
                prop_assert!((a + b).abs() <= 1e-12);
            }
            (None, None) => {
                let constant = |v: &[f64]| v.iter().all(|&t| t == v[0]);
                prop_assert!(constant(&x) || constant(&y));
            }
            _ => prop_assert!(false, "definedness differs under negation"),
        }
        if let Some(a) = kendall_tau_b(&x, &x).unwrap().value() {
            prop_assert!((a - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn ndcg_and_ap_bounded((ranks, scores) in ranks_and_scores()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let hyp = score_hyp(&list, &scores);
        for pol in POLICIES {
            if let Some(v) = ndcg(&list, &hyp, pol).unwrap().value() {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "ndcg {v}");
            }
            if let Some(v) = average_precision(&list, &hyp, None, pol).unwrap().value() {
                prop_assert!(v > 0.0 && v <= 1.0 + 1e-12, "ap {v}");
            }
        }
        let ideal = Hypothesis::ideal(&list);
        if let Some(v) = ndcg(&list, &ideal, TiePolicy::Pessimistic).unwrap().value() {
            prop_assert!((v - 1.0).abs() <= 1e-12);
        }
        if let Some(v) = average_precision(&list, &ideal, None, TiePolicy::Pessimistic).unwrap().value() {
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn f_is_a_harmonic_mean(retrieved in prop::collection::hash_set(0u8..30, 0..20), relevant in prop::collection::hash_set(0u8..30, 1..20)) {
        let prf = precision_recall_f(&retrieved, &relevant).unwrap();
        let (p, r, f) = (prf.precision, prf.recall, prf.f);
        prop_assert!(f + 1e-12 >= p.min(r) && f <= p.max(r) + 1e-12);
        if p + r > 0.0 {
            prop_assert!((f - 2.0 * p * r / (p + r)).abs() <= 1e-12);
        } else {
            prop_assert_eq!(f, 0.0);
        }
        let hits = retrieved.intersection(&relevant).count() as f64;
        prop_assert!((r - hits / relevant.len() as f64).abs() <= 1e-12);
    }

    #[test]
    fn mapping_is_consistent(ranks in ranks_strategy()) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let mapping = list.mapping();
        let m = mapping.m();
        let distinct: HashSet<u64> = ranks.iter().copied().collect();
        prop_assert_eq!(m as usize, distinct.len());
        for &r in &ranks {
            let g = mapping.gain(r).unwrap();
            let d = mapping.discount(r).unwrap();
            prop_assert!((1..=m).contains(&g));
            prop_assert_eq!(g + d, m + 1);
            let below = distinct.iter().filter(|&&u| u <= r).count() as u32;
            prop_assert_eq!(g, below);
        }
        let gains = mapping.position_gains();
        prop_assert!(gains.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn io_round_trips((ranks, scores) in ranks_and_scores(), jitter in prop::collection::vec(-1e6f64..1e6, 24)) {
        let list = RankedList::from_ranks(&ranks).unwrap();
        let order = Hypothesis::ideal(&list);
        let scores = Hypothesis::scores(
            list.items().iter().zip(&scores).zip(&jitter).map(|((it, &s), &j)| (it.id.clone(), s as f64 + j)),
        );
        for format in [DataFormat::Csv, DataFormat::JsonLines] {
            let text = write_reference(&list, format).unwrap();
            prop_assert_eq!(&parse_reference(&text, format).unwrap(), &list);
            let text = write_hypothesis(&order, format).unwrap();
            prop_assert_eq!(&parse_hypothesis(&text, format, HypothesisMode::Order).unwrap(), &order);
            let text = write_hypothesis(&scores, format).unwrap();
            prop_assert_eq!(&parse_hypothesis(&text, format, HypothesisMode::Scores).unwrap(), &scores);
        }
    }
}
