//! Exhaustive-enumeration checks for rankDCG.
//!
//! The oracle derives gains and discounts from scratch (counting distinct
//! ranks at or below / at or above each rank) and walks every permutation of
//! item positions, so its extrema and scores do not share code with the
//! closed forms in [`crate::rankdcg`]. Equal-rank items are enumerated as
//! distinct items on purpose: subgroup invariance is checked, not assumed.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::json;

use crate::baselines::{kendall_tau_b_hypothesis, ndcg, MetricValue};
use crate::error::{Error, Result};
use crate::rankdcg::{breakdown, dcg_prime_with_mapping, extrema, rank_dcg};
use crate::ranking::{Hypothesis, RankedList, TiePolicy};

/// Largest instance the enumerator accepts (10! = 3 628 800 orderings).
pub const ENUMERATION_LIMIT: usize = 10;

const EXTREMA_TOL: f64 = 1e-9;
const SCORE_TOL: f64 = 1e-9;
const MAX_LISTED_VIOLATIONS: usize = 16;

/// One enumerated ordering: item indices by position, its DCG' and its
/// normalized score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPermutation {
    pub order: Vec<usize>,
    pub dcg_prime: f64,
    pub normalized: f64,
}

/// Gain/discount tables computed by counting, independent of `RankMapping`.
struct CountingTables {
    position_gain: Vec<f64>,
    inv_discount: Vec<f64>,
}

impl CountingTables {
    fn new(ranks: &[u64]) -> Self {
        let mut distinct = ranks.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let at_or_below = |r: u64| distinct.iter().filter(|&&u| u <= r).count() as f64;
        let at_or_above = |r: u64| distinct.iter().filter(|&&u| u >= r).count() as f64;
        let mut ideal = ranks.to_vec();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        CountingTables {
            position_gain: ideal.iter().map(|&r| at_or_below(r)).collect(),
            inv_discount: ranks.iter().map(|&r| 1.0 / at_or_above(r)).collect(),
        }
    }

    fn score(&self, order: &[usize]) -> f64 {
        self.position_gain
            .iter()
            .zip(order)
            .map(|(g, &i)| g * self.inv_discount[i])
            .sum()
    }
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm, fixed
/// visiting order).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    visit(&perm);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

fn check_size(ranks: &[u64]) -> Result<()> {
    if ranks.is_empty() {
        return Err(Error::invalid("oracle needs at least one rank"));
    }
    if ranks.len() > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge {
            n: ranks.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn normalize(value: f64, (min, max): (f64, f64)) -> f64 {
    if max <= min {
        1.0
    } else {
        (value - min) / (max - min)
    }
}

/// Every ordering of items carrying `ranks`, with its DCG' and its score
/// normalized by the closed-form extrema.
pub fn enumerate_scores(ranks: &[u64]) -> Result<Vec<ScoredPermutation>> {
    check_size(ranks)?;
    let list = RankedList::from_ranks(ranks)?;
    let bounds = extrema(&list);
    let tables = CountingTables::new(ranks);
    let mut out = Vec::new();
    for_each_permutation(ranks.len(), |perm| {
        let value = tables.score(perm);
        out.push(ScoredPermutation {
            order: perm.to_vec(),
            dcg_prime: value,
            normalized: normalize(value, bounds),
        });
    });
    Ok(out)
}

/// Named property checked over every enumerated ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// The library's DCG' equals the counting oracle's within 1e-9.
    LibraryAgreement,
    /// Orderings with the same rank sequence score bit-identically.
    EqualRankSwap,
    /// Score 1 exactly on non-increasing rank sequences.
    OneIffNonIncreasing,
    /// Score 0 exactly on non-decreasing rank sequences.
    ZeroIffNonDecreasing,
    /// Score 0 exactly when placed discounts are oppositely ordered to the
    /// position gains (`g_i > g_j` implies `d(x_i) >= d(x_j)`).
    ZeroIffOppositeOrder,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::LibraryAgreement,
        Property::EqualRankSwap,
        Property::OneIffNonIncreasing,
        Property::ZeroIffNonDecreasing,
        Property::ZeroIffOppositeOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::LibraryAgreement => "library-agreement",
            Property::EqualRankSwap => "equal-rank-swap",
            Property::OneIffNonIncreasing => "one-iff-non-increasing",
            Property::ZeroIffNonDecreasing => "zero-iff-non-decreasing",
            Property::ZeroIffOppositeOrder => "zero-iff-opposite-order",
        }
    }
}

/// Failure tally for one property.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertyTally {
    pub failures: u64,
    /// First few counterexamples, in enumeration order.
    pub examples: Vec<String>,
}

impl PropertyTally {
    fn record(&mut self, msg: impl FnOnce() -> String) {
        self.failures += 1;
        if self.examples.len() < MAX_LISTED_VIOLATIONS {
            self.examples.push(msg());
        }
    }
}

/// Outcome of exhaustively checking one rank multiset.
///
/// `violations` covers the bound claims only (enumerated extrema equal the
/// closed forms, every score in `[0, 1]`); the remaining claims are tallied
/// per [`Property`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub description: String,
    pub permutations: u64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub closed_form_min: f64,
    pub closed_form_max: f64,
    pub degenerate: bool,
    /// First few bound violations, in enumeration order.
    pub violations: Vec<String>,
    pub violation_count: u64,
    pub properties: Vec<(Property, PropertyTally)>,
}

impl OracleReport {
    /// No bound violations.
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    pub fn property(&self, p: Property) -> &PropertyTally {
        &self
            .properties
            .iter()
            .find(|(q, _)| *q == p)
            .expect("every property is tallied")
            .1
    }

    /// No bound violations and no property failures.
    pub fn all_checks_pass(&self) -> bool {
        self.is_clean() && self.properties.iter().all(|(_, t)| t.failures == 0)
    }

    fn violation(&mut self, msg: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(msg);
        }
    }

    fn tally(&mut self, p: Property) -> &mut PropertyTally {
        &mut self
            .properties
            .iter_mut()
            .find(|(q, _)| *q == p)
            .expect("every property is tallied")
            .1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let properties: serde_json::Map<String, serde_json::Value> = self
            .properties
            .iter()
            .map(|(p, t)| {
                (
                    p.name().to_string(),
                    json!({"failures": t.failures, "examples": t.examples}),
                )
            })
            .collect();
        json!({
            "instance": self.description,
            "permutations": self.permutations,
            "observed_min": self.observed_min,
            "observed_max": self.observed_max,
            "closed_form_min": self.closed_form_min,
            "closed_form_max": self.closed_form_max,
            "degenerate": self.degenerate,
            "violation_count": self.violation_count,
            "violations": self.violations,
            "properties": properties,
        })
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.all_checks_pass() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} perms={} min={:.9} (closed {:.9}) max={:.9} (closed {:.9}){}",
            self.description,
            self.permutations,
            self.observed_min,
            self.closed_form_min,
            self.observed_max,
            self.closed_form_max,
            if self.degenerate { " degenerate" } else { "" }
        )?;
        for v in &self.violations {
            write!(f, "\n  violation: {v}")?;
        }
        if self.violation_count > self.violations.len() as u64 {
            write!(
                f,
                "\n  ... {} more",
                self.violation_count - self.violations.len() as u64
            )?;
        }
        for (p, t) in self.properties.iter().filter(|(_, t)| t.failures > 0) {
            write!(f, "\n  {}: {} failing orderings", p.name(), t.failures)?;
            for e in t.examples.iter().take(3) {
                write!(f, "\n    {e}")?;
            }
        }
        Ok(())
    }
}

fn describe(ranks: &[u64]) -> String {
    let parts: Vec<String> = ranks.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// True when no position pair has `g_i > g_j` with a smaller discount at `i`,
/// i.e. the arrangement attains the rearrangement minimum.
fn oppositely_ordered(tables: &CountingTables, perm: &[usize]) -> bool {
    // higher-gain blocks need larger discounts (smaller 1/d); order inside a block is free
    let mut earlier_max_inv = f64::NEG_INFINITY;
    let mut i = 0;
    while i < perm.len() {
        let g = tables.position_gain[i];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        while i < perm.len() && tables.position_gain[i] == g {
            let inv = tables.inv_discount[perm[i]];
            lo = lo.min(inv);
            hi = hi.max(inv);
            i += 1;
        }
        if earlier_max_inv > lo {
            return false;
        }
        earlier_max_inv = earlier_max_inv.max(hi);
    }
    true
}

/// Enumerates every ordering of `ranks` and checks: closed-form extrema equal
/// the enumerated ones; every normalized score lies in `[0, 1]`; plus each
/// [`Property`].
pub fn verify_instance(ranks: &[u64]) -> Result<OracleReport> {
    check_size(ranks)?;
    let list = RankedList::from_ranks(ranks)?;
    let mapping = list.mapping();
    let bounds @ (closed_min, closed_max) = extrema(&list);
    let degenerate = closed_max <= closed_min;
    let tables = CountingTables::new(ranks);

    let mut report = OracleReport {
        description: describe(ranks),
        permutations: 0,
        observed_min: f64::INFINITY,
        observed_max: f64::NEG_INFINITY,
        closed_form_min: closed_min,
        closed_form_max: closed_max,
        degenerate,
        violations: Vec::new(),
        violation_count: 0,
        properties: Property::ALL
            .iter()
            .map(|&p| (p, PropertyTally::default()))
            .collect(),
    };
    let mut by_sequence: HashMap<Vec<u64>, f64> = HashMap::new();

    for_each_permutation(ranks.len(), |perm| {
        report.permutations += 1;
        let value = tables.score(perm);
        report.observed_min = report.observed_min.min(value);
        report.observed_max = report.observed_max.max(value);

        let sequence: Vec<u64> = perm.iter().map(|&i| ranks[i]).collect();
        let seq = || describe(&sequence);
        let score = match dcg_prime_with_mapping(&mapping, &list, perm) {
            Ok(lib) => {
                if (lib - value).abs() > EXTREMA_TOL {
                    report
                        .tally(Property::LibraryAgreement)
                        .record(|| format!("{}: library DCG' {lib} != oracle {value}", seq()));
                }
                breakdown(lib, bounds).normalized
            }
            Err(e) => {
                report
                    .tally(Property::LibraryAgreement)
                    .record(|| format!("{}: {e}", seq()));
                normalize(value, bounds)
            }
        };

        if !(0.0..=1.0).contains(&score) {
            report.violation(format!("{}: score {score} outside [0,1]", seq()));
        }

        let is_one = (score - 1.0).abs() <= SCORE_TOL;
        let is_zero = score.abs() <= SCORE_TOL;
        if degenerate {
            if !is_one {
                report
                    .tally(Property::OneIffNonIncreasing)
                    .record(|| format!("{}: degenerate list scored {score}", seq()));
            }
        } else {
            let non_increasing = sequence.windows(2).all(|w| w[0] >= w[1]);
            let non_decreasing = sequence.windows(2).all(|w| w[0] <= w[1]);
            if is_one != non_increasing {
                report
                    .tally(Property::OneIffNonIncreasing)
                    .record(|| format!("{}: score {score}, non-increasing = {non_increasing}", seq()));
            }
            if is_zero != non_decreasing {
                report
                    .tally(Property::ZeroIffNonDecreasing)
                    .record(|| format!("{}: score {score}, non-decreasing = {non_decreasing}", seq()));
            }
            let opposite = oppositely_ordered(&tables, perm);
            if is_zero != opposite {
                report
                    .tally(Property::ZeroIffOppositeOrder)
                    .record(|| format!("{}: score {score}, oppositely ordered = {opposite}", seq()));
            }
        }

        // items of equal rank are distinct here, so this compares swaps
        match by_sequence.get(&sequence) {
            Some(&prev) if prev.to_bits() != score.to_bits() => {
                let msg = format!("{}: equal-rank swap changed score {prev} -> {score}", seq());
                report.tally(Property::EqualRankSwap).record(|| msg);
            }
            Some(_) => {}
            None => {
                by_sequence.insert(sequence, score);
            }
        }
    });

    if (report.observed_min - closed_min).abs() > EXTREMA_TOL {
        let msg = format!(
            "enumerated min {} != closed form {closed_min}",
            report.observed_min
        );
        report.violation(msg);
    }
    if (report.observed_max - closed_max).abs() > EXTREMA_TOL {
        let msg = format!(
            "enumerated max {} != closed form {closed_max}",
            report.observed_max
        );
        report.violation(msg);
    }
    Ok(report)
}

/// Reports for every rank multiset over `1..=levels` of size `1..=max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub instances: Vec<OracleReport>,
}

impl SweepReport {
    /// No bound violations in any instance.
    pub fn is_clean(&self) -> bool {
        self.instances.iter().all(OracleReport::is_clean)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.instances.iter().all(OracleReport::all_checks_pass)
    }

    pub fn permutations(&self) -> u64 {
        self.instances.iter().map(|r| r.permutations).sum()
    }

    pub fn violation_count(&self) -> u64 {
        self.instances.iter().map(|r| r.violation_count).sum()
    }

    /// Failing orderings for `p` across all instances.
    pub fn property_failures(&self, p: Property) -> u64 {
        self.instances.iter().map(|r| r.property(p).failures).sum()
    }

    /// First counterexample for `p`, if any.
    pub fn first_counterexample(&self, p: Property) -> Option<(&str, &str)> {
        self.instances.iter().find_map(|r| {
            r.property(p)
                .examples
                .first()
                .map(|e| (r.description.as_str(), e.as_str()))
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleReport> {
        self.instances.iter().filter(|r| !r.all_checks_pass())
    }
}

/// All non-increasing sequences of length `n` over `1..=levels`.
pub fn rank_multisets(levels: u64, n: usize) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, max: u64, n: usize, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for r in (1..=max).rev() {
            prefix.push(r);
            extend(prefix, r, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), levels, n, &mut out);
    out
}

/// Runs [`verify_instance`] over every multiset, in parallel. The instance
/// order of the result does not depend on scheduling.
pub fn sweep(levels: u64, max_n: usize) -> Result<SweepReport> {
    if levels == 0 {
        return Err(Error::invalid("sweep needs at least one rank level"));
    }
    if max_n > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge {
            n: max_n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let instances: Vec<Vec<u64>> = (1..=max_n).flat_map(|n| rank_multisets(levels, n)).collect();
    let instances = instances
        .par_iter()
        .map(|ranks| verify_instance(ranks))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { instances })
}

pub const TABLE1_REFERENCE: [u64; 10] = [9, 4, 4, 2, 2, 2, 1, 1, 1, 1];

pub const TABLE1_HYPOTHESES: [[u64; 10]; 6] = [
    [9, 4, 4, 2, 2, 2, 1, 1, 1, 1],
    [9, 4, 4, 2, 2, 1, 2, 1, 1, 1],
    [4, 4, 2, 9, 2, 2, 1, 1, 1, 1],
    [1, 4, 4, 2, 2, 2, 9, 1, 1, 1],
    [1, 4, 4, 2, 2, 2, 1, 1, 1, 9],
    [1, 1, 1, 1, 2, 2, 2, 4, 4, 9],
];

pub const TABLE1_RANKDCG: [f64; 6] = [1.0, 0.975, 0.65, 0.325, 0.325, 0.0];
pub const TABLE1_TAU: [f64; 6] = [1.0, 0.8, 0.742, 0.285, 0.285, -0.8];
pub const TABLE1_NDCG: [f64; 6] = [1.0, 0.998, 0.825, 0.688, 0.667, 0.571];

pub const RANKDCG_TOL: f64 = 0.001;
pub const TAU_TOL: f64 = 0.002;
pub const NDCG_TOL: f64 = 0.002;

/// Score under the rejected formula reading: gain taken from the placed
/// item, discount from the position. Normalized by its own ideal/reverse
/// values.
pub fn rejected_reading_score(list: &RankedList, order: &[usize]) -> f64 {
    let mapping = list.mapping();
    let discounts = mapping.position_discounts();
    let value = |ord: &[usize]| -> f64 {
        ord.iter()
            .zip(&discounts)
            .map(|(&i, &d)| mapping.gain(list.rank(i)).expect("rank present") as f64 / d as f64)
            .sum()
    };
    let ideal = list.ideal_order();
    let reversed: Vec<usize> = ideal.iter().rev().copied().collect();
    normalize(value(order), (value(&reversed), value(&ideal)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub row: usize,
    pub hypothesis: [u64; 10],
    pub rankdcg: f64,
    pub tau_b: MetricValue,
    pub ndcg: f64,
    pub rejected_reading: f64,
}

impl Table1Row {
    fn idx(&self) -> usize {
        self.row - 1
    }

    pub fn rankdcg_ok(&self) -> bool {
        (self.rankdcg - TABLE1_RANKDCG[self.idx()]).abs() <= RANKDCG_TOL
    }

    pub fn tau_ok(&self) -> bool {
        self.tau_b
            .value()
            .is_some_and(|t| (t - TABLE1_TAU[self.idx()]).abs() <= TAU_TOL)
    }

    pub fn ndcg_ok(&self) -> bool {
        (self.ndcg - TABLE1_NDCG[self.idx()]).abs() <= NDCG_TOL
    }

    pub fn passed(&self) -> bool {
        self.rankdcg_ok() && self.tau_ok() && self.ndcg_ok()
    }
}

impl fmt::Display for Table1Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} row {} {} rankdcg={:.3} (want {}) tau-b={} (want {}) ndcg={:.3} (want {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.row,
            describe(&self.hypothesis),
            self.rankdcg,
            TABLE1_RANKDCG[self.idx()],
            self.tau_b
                .value()
                .map_or_else(|| "nan".to_string(), |t| format!("{t:.3}")),
            TABLE1_TAU[self.idx()],
            self.ndcg,
            TABLE1_NDCG[self.idx()],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Replay {
    pub rows: Vec<Table1Row>,
}

impl Table1Replay {
    /// Row 3 separates the two readings: 0.65 adopted, 0.75 rejected.
    pub fn disambiguation_ok(&self) -> bool {
        let row3 = &self.rows[2];
        (row3.rankdcg - 0.65).abs() <= RANKDCG_TOL && (row3.rejected_reading - 0.75).abs() <= 1e-9
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(Table1Row::passed) && self.disambiguation_ok()
    }
}

/// Replays the six-row constructed comparison with rankDCG, tau-b and nDCG.
pub fn replay_table1() -> Result<Table1Replay> {
    let list = RankedList::from_ranks(&TABLE1_REFERENCE)?;
    let rows = TABLE1_HYPOTHESES
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let hyp = Hypothesis::order_by_ranks(&list, row)?;
            let order = match &hyp {
                Hypothesis::Order(ids) => ids
                    .iter()
                    .map(|id| list.index_of(id).expect("id from list"))
                    .collect::<Vec<_>>(),
                Hypothesis::Scores(_) => unreachable!("order_by_ranks builds an order"),
            };
            let ndcg = ndcg(&list, &hyp, TiePolicy::Pessimistic)?
                .value()
                .ok_or_else(|| Error::invalid("nDCG undefined on the reference list"))?;
            Ok(Table1Row {
                row: i + 1,
                hypothesis: *row,
                rankdcg: rank_dcg(&list, &hyp, TiePolicy::Pessimistic)?.normalized,
                tau_b: kendall_tau_b_hypothesis(&list, &hyp)?,
                ndcg,
                rejected_reading: rejected_reading_score(&list, &order),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Replay { rows })
}
