//! Reference lists, hypotheses and the compressed rank mapping.
//!
//! A [`RankedList`] holds the reference items with their true (discrete,
//! non-negative) ranks. Its [`RankMapping`] compresses the `m` distinct rank
//! values onto gains `m, m-1, .., 1` (highest rank first) and discounts
//! `1, 2, .., m`, so that `gain(r) + discount(r) == m + 1` for every rank.
//!
//! ```
//! use rankdcg::RankedList;
//!
//! let list = RankedList::from_ranks(&[9, 4, 4, 2, 2, 2, 1, 1, 1, 1]).unwrap();
//! let mapping = list.mapping();
//! assert_eq!(mapping.position_gains(), &[4, 3, 3, 2, 2, 2, 1, 1, 1, 1]);
//! assert_eq!(mapping.discount(9), Some(1));
//! assert_eq!(mapping.discount(1), Some(4));
//! ```

use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Mismatch, Result};

/// One reference element: an opaque id and its true rank (higher is better).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankedItem {
    pub id: String,
    pub rank: u64,
}

impl RankedItem {
    pub fn new(id: impl Into<String>, rank: u64) -> Self {
        RankedItem { id: id.into(), rank }
    }
}

/// A non-empty reference list with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedList {
    items: Vec<RankedItem>,
    index: HashMap<String, usize>,
}

impl RankedList {
    pub fn new(items: Vec<RankedItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::invalid("ranked list must contain at least one item"));
        }
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if index.insert(item.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate id `{}`", item.id)));
            }
        }
        Ok(RankedList { items, index })
    }

    /// Builds a list from bare ranks, naming items `x1, x2, ..` zero-padded to
    /// a common width so that id order matches input order.
    pub fn from_ranks(ranks: &[u64]) -> Result<Self> {
        let width = ranks.len().to_string().len();
        let items = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| RankedItem::new(format!("x{:0width$}", i + 1), r))
            .collect();
        Self::new(items)
    }

    pub fn items(&self) -> &[RankedItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, idx: usize) -> &RankedItem {
        &self.items[idx]
    }

    pub fn rank(&self, idx: usize) -> u64 {
        self.items[idx].rank
    }

    pub fn ranks(&self) -> Vec<u64> {
        self.items.iter().map(|it| it.rank).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Item indices sorted by rank descending, ties by id ascending.
    pub fn ideal_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&self.items[a], &self.items[b]);
            y.rank.cmp(&x.rank).then_with(|| x.id.cmp(&y.id))
        });
        order
    }

    pub fn ideal_items(&self) -> Vec<&RankedItem> {
        self.ideal_order().into_iter().map(|i| &self.items[i]).collect()
    }

    /// Ranks in ideal order (the non-increasing sequence).
    pub fn ideal_ranks(&self) -> Vec<u64> {
        let mut ranks = self.ranks();
        ranks.sort_unstable_by(|a, b| b.cmp(a));
        ranks
    }

    pub fn mapping(&self) -> RankMapping {
        build_mapping(self)
    }

    /// True when every item shares one rank, so every ordering is perfect.
    pub fn is_degenerate(&self) -> bool {
        self.items.iter().all(|it| it.rank == self.items[0].rank)
    }

    /// Returns a copy of the list with every rank passed through `f`.
    pub fn map_ranks(&self, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new(
            self.items
                .iter()
                .map(|it| RankedItem::new(it.id.clone(), f(it.rank)))
                .collect(),
        )
    }
}

/// Per-list table from distinct ranks to compressed gains and discounts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMapping {
    unique_ranks: Vec<u64>,
    position_gains: Vec<u32>,
}

pub fn build_mapping(list: &RankedList) -> RankMapping {
    let ideal = list.ideal_ranks();
    let mut unique_ranks = ideal.clone();
    unique_ranks.dedup();
    let m = unique_ranks.len() as u32;
    let mut position_gains = Vec::with_capacity(ideal.len());
    let mut level = 0u32;
    for (i, &r) in ideal.iter().enumerate() {
        if i > 0 && r != ideal[i - 1] {
            level += 1;
        }
        position_gains.push(m - level);
    }
    RankMapping {
        unique_ranks,
        position_gains,
    }
}

impl RankMapping {
    /// Distinct ranks, highest first.
    pub fn unique_ranks(&self) -> &[u64] {
        &self.unique_ranks
    }

    pub fn m(&self) -> u32 {
        self.unique_ranks.len() as u32
    }

    pub fn gain(&self, rank: u64) -> Option<u32> {
        self.unique_ranks
            .binary_search_by(|probe| rank.cmp(probe))
            .ok()
            .map(|level| self.m() - level as u32)
    }

    pub fn discount(&self, rank: u64) -> Option<u32> {
        self.gain(rank).map(|g| self.m() + 1 - g)
    }

    /// Gains along the ideal ordering, one per position.
    pub fn position_gains(&self) -> &[u32] {
        &self.position_gains
    }

    /// Discounts along the ideal ordering, one per position.
    pub fn position_discounts(&self) -> Vec<u32> {
        let m = self.m();
        self.position_gains.iter().map(|g| m + 1 - g).collect()
    }
}

/// How score ties inside a hypothesis are resolved when scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// Worst-case arrangement within each tied block.
    #[default]
    Pessimistic,
    /// Best-case arrangement within each tied block.
    Optimistic,
    /// Expectation over a uniformly random arrangement of each block.
    Expected,
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pessimistic" => Ok(TiePolicy::Pessimistic),
            "optimistic" => Ok(TiePolicy::Optimistic),
            "expected" => Ok(TiePolicy::Expected),
            other => Err(Error::invalid(format!("unknown tie policy `{other}`"))),
        }
    }
}

/// A proposed ordering of the reference items.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// Item ids, predicted best first.
    Order(Vec<String>),
    /// Real-valued scores (higher is better); equal scores are ties.
    Scores(Vec<(String, f64)>),
}

impl Hypothesis {
    pub fn order<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        Hypothesis::Order(ids.into_iter().map(Into::into).collect())
    }

    pub fn scores<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Self {
        Hypothesis::Scores(pairs.into_iter().map(|(id, s)| (id.into(), s)).collect())
    }

    /// Every item of `list` gets the same score.
    pub fn constant(list: &RankedList, score: f64) -> Self {
        Hypothesis::Scores(list.items().iter().map(|it| (it.id.clone(), score)).collect())
    }

    /// The ideal ordering of `list` as an explicit order.
    pub fn ideal(list: &RankedList) -> Self {
        Hypothesis::Order(
            list.ideal_order()
                .into_iter()
                .map(|i| list.item(i).id.clone())
                .collect(),
        )
    }

    /// An explicit order whose true ranks, position by position, equal
    /// `ranks`. Among equal-rank items the smallest unused id is taken first.
    pub fn order_by_ranks(list: &RankedList, ranks: &[u64]) -> Result<Self> {
        if ranks.len() != list.len() {
            return Err(Error::HypothesisMismatch(Mismatch::Length {
                expected: list.len(),
                got: ranks.len(),
            }));
        }
        let mut pools: HashMap<u64, Vec<&str>> = HashMap::new();
        for &i in list.ideal_order().iter().rev() {
            let it = list.item(i);
            pools.entry(it.rank).or_default().push(&it.id);
        }
        let mut ids = Vec::with_capacity(ranks.len());
        for &r in ranks {
            let id = pools
                .get_mut(&r)
                .and_then(Vec::pop)
                .ok_or_else(|| Error::invalid(format!("rank {r} occurs more often than in the reference")))?;
            ids.push(id.to_string());
        }
        Ok(Hypothesis::Order(ids))
    }

    pub fn len(&self) -> usize {
        match self {
            Hypothesis::Order(ids) => ids.len(),
            Hypothesis::Scores(pairs) => pairs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<&str> {
        match self {
            Hypothesis::Order(ids) => ids.iter().map(String::as_str).collect(),
            Hypothesis::Scores(pairs) => pairs.iter().map(|(id, _)| id.as_str()).collect(),
        }
    }

    /// Maps each hypothesis entry onto a reference item index, checking that
    /// the hypothesis covers exactly the reference ids.
    pub(crate) fn resolve(&self, list: &RankedList) -> Result<Vec<usize>> {
        let ids = self.ids();
        let mut seen = vec![false; list.len()];
        let mut out = Vec::with_capacity(ids.len());
        for id in ids {
            let idx = list
                .index_of(id)
                .ok_or_else(|| Error::HypothesisMismatch(Mismatch::UnknownId(id.to_string())))?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::HypothesisMismatch(Mismatch::DuplicateId(id.to_string())));
            }
            out.push(idx);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::HypothesisMismatch(Mismatch::MissingId(
                list.item(missing).id.clone(),
            )));
        }
        Ok(out)
    }
}

/// Items sharing one hypothesis score, occupying a contiguous block of
/// positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieGroup {
    /// 0-based index of the first position of the block.
    pub start: usize,
    /// Reference item indices, ordered by id.
    pub members: Vec<usize>,
}

impl TieGroup {
    /// 0-based positions covered by the group.
    pub fn positions(&self) -> Range<usize> {
        self.start..self.start + self.members.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Splits a hypothesis into tie groups ordered by descending score. An
/// explicit order yields one singleton group per position.
pub fn induced_tie_groups(list: &RankedList, hyp: &Hypothesis) -> Result<Vec<TieGroup>> {
    let resolved = hyp.resolve(list)?;
    match hyp {
        Hypothesis::Order(_) => Ok(resolved
            .into_iter()
            .enumerate()
            .map(|(pos, idx)| TieGroup {
                start: pos,
                members: vec![idx],
            })
            .collect()),
        Hypothesis::Scores(pairs) => {
            if let Some((id, s)) = pairs.iter().find(|(_, s)| !s.is_finite()) {
                return Err(Error::invalid(format!("score for `{id}` is not finite: {s}")));
            }
            let mut scored: Vec<(f64, usize)> = pairs
                .iter()
                .zip(resolved)
                .map(|((_, s), idx)| (*s, idx))
                .collect();
            scored.sort_by(|a, b| {
                b.0.total_cmp(&a.0)
                    .then_with(|| list.item(a.1).id.cmp(&list.item(b.1).id))
            });
            let mut groups: Vec<TieGroup> = Vec::new();
            let mut prev: Option<f64> = None;
            for (pos, (score, idx)) in scored.into_iter().enumerate() {
                match (prev, groups.last_mut()) {
                    // -0.0 and 0.0 are the same prediction
                    (Some(p), Some(group)) if p == score => group.members.push(idx),
                    _ => groups.push(TieGroup {
                        start: pos,
                        members: vec![idx],
                    }),
                }
                prev = Some(score);
            }
            Ok(groups)
        }
    }
}

/// Flattens tie groups into a single order, arranging each block's members
/// by true rank: ascending for the worst case, descending for the best case.
pub(crate) fn arrange_groups(list: &RankedList, groups: &[TieGroup], worst_first: bool) -> Vec<usize> {
    let mut order = Vec::with_capacity(list.len());
    for g in groups {
        let mut members = g.members.clone();
        members.sort_by(|&a, &b| {
            let c = list.rank(a).cmp(&list.rank(b));
            if worst_first {
                c
            } else {
                c.reverse()
            }
        });
        order.extend(members);
    }
    order
}
