//! Named metrics and batch evaluation of hypotheses against one reference.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{
    average_precision, kendall_tau_b_hypothesis, mean_average_precision, ndcg, ndcg_raw_gain,
    precision_recall_f, MetricValue,
};
use crate::error::{Error, Result};
use crate::io::MetricReport;
use crate::rankdcg::rank_dcg;
use crate::ranking::{induced_tie_groups, Hypothesis, RankedList, TiePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    RankDcg,
    Ndcg,
    NdcgRaw,
    TauB,
    Ap,
    Map,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::RankDcg,
        Metric::Ndcg,
        Metric::NdcgRaw,
        Metric::TauB,
        Metric::Ap,
        Metric::Map,
        Metric::F1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::RankDcg => "rankdcg",
            Metric::Ndcg => "ndcg",
            Metric::NdcgRaw => "ndcg-raw",
            Metric::TauB => "tau-b",
            Metric::Ap => "ap",
            Metric::Map => "map",
            Metric::F1 => "f1",
        }
    }

    /// Parses a comma-separated list such as `rankdcg,tau-b,ndcg`. Every name
    /// is checked before anything is returned.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let m: Metric = name.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::invalid("no metrics selected"));
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub tie_policy: TiePolicy,
    /// Relevance threshold for AP, MAP and F1; `None` means the lowest rank.
    pub ap_threshold: Option<u64>,
}

/// F1 of the top `R` hypothesis positions against the `R` relevant items.
/// A tie block straddling the cut-off is left out of the retrieved set.
fn f1_at_relevant_count(list: &RankedList, hyp: &Hypothesis, opts: EvalOptions) -> Result<MetricValue> {
    let groups = induced_tie_groups(list, hyp)?;
    let threshold = opts
        .ap_threshold
        .unwrap_or_else(|| list.ranks().into_iter().min().unwrap_or(0));
    let relevant: HashSet<usize> = (0..list.len()).filter(|&i| list.rank(i) > threshold).collect();
    if relevant.is_empty() {
        return Ok(MetricValue::undefined(format!(
            "no item ranked above threshold {threshold}"
        )));
    }
    let cutoff = relevant.len();
    let retrieved: HashSet<usize> = groups
        .iter()
        .filter(|g| g.positions().end <= cutoff)
        .flat_map(|g| g.members.iter().copied())
        .collect();
    Ok(MetricValue::Value(precision_recall_f(&retrieved, &relevant)?.f))
}

/// Scores one hypothesis. `Map` over a single pair equals its AP.
pub fn evaluate_pair(
    list: &RankedList,
    hyp: &Hypothesis,
    metrics: &[Metric],
    opts: EvalOptions,
) -> Result<Vec<(Metric, MetricValue)>> {
    // surface pairing errors even if only undefined-capable metrics run
    hyp.resolve(list)?;
    metrics
        .iter()
        .map(|&metric| {
            let value = match metric {
                Metric::RankDcg => MetricValue::Value(rank_dcg(list, hyp, opts.tie_policy)?.normalized),
                Metric::Ndcg => ndcg(list, hyp, opts.tie_policy)?,
                Metric::NdcgRaw => match hyp {
                    Hypothesis::Scores(pairs) => ndcg_raw_gain(list, pairs)?,
                    Hypothesis::Order(_) => {
                        MetricValue::undefined("ndcg-raw needs predicted scores, not an order")
                    }
                },
                Metric::TauB => kendall_tau_b_hypothesis(list, hyp)?,
                Metric::Ap | Metric::Map => average_precision(list, hyp, opts.ap_threshold, opts.tie_policy)?,
                Metric::F1 => f1_at_relevant_count(list, hyp, opts)?,
            };
            Ok((metric, value))
        })
        .collect()
}

/// Evaluates named hypotheses against one reference. Rows keep input order.
/// When `map` is selected its per-row cells are left empty and a final
/// `MAP` row carries the mean AP over all hypotheses.
pub fn evaluate_all(
    list: &RankedList,
    hyps: &[(String, Hypothesis)],
    metrics: &[Metric],
    opts: EvalOptions,
) -> Result<Vec<MetricReport>> {
    let row_metrics: Vec<Metric> = metrics.iter().copied().filter(|&m| m != Metric::Map).collect();
    let mut rows = hyps
        .par_iter()
        .map(|(name, hyp)| {
            let scores = evaluate_pair(list, hyp, &row_metrics, opts)?;
            Ok(MetricReport {
                name: name.clone(),
                scores: scores
                    .into_iter()
                    .map(|(m, v)| (m.name().to_string(), v))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if metrics.contains(&Metric::Map) && !hyps.is_empty() {
        let pairs: Vec<(&RankedList, &Hypothesis)> = hyps.iter().map(|(_, h)| (list, h)).collect();
        let map = mean_average_precision(&pairs, opts.ap_threshold, opts.tie_policy)?;
        rows.push(MetricReport {
            name: "MAP".to_string(),
            scores: vec![(Metric::Map.name().to_string(), map)],
        });
    }
    Ok(rows)
}
