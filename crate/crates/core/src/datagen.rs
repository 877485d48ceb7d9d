//! Synthetic reference lists and controlled degradations of their ideal
//! ordering.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Only raw `next_u64` output is consumed; uniform floats
//! take the top 53 bits, bounded integers use rejection sampling on the full
//! 64-bit word, and shuffles are Fisher-Yates from the back. A given seed
//! therefore produces the same data on every platform and crate version
//! that keeps ChaCha8's output stream stable.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::baselines::MetricValue;
use crate::error::{Error, Result};
use crate::eval::{evaluate_pair, EvalOptions, Metric};
use crate::ranking::{Hypothesis, RankedList};

/// Distinct rank levels used by [`Distribution::power_law`].
pub const DEFAULT_POWER_LAW_LEVELS: u32 = 10;

/// Seeded generator with a frozen sampling scheme.
#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Ranks `1..=levels` with frequency proportional to `rank^-alpha`.
    PowerLaw { alpha: f64, levels: u32 },
    /// Ranks `1..=levels`, equally likely.
    Uniform { levels: u32 },
    /// Exactly these ranks, in this order.
    Constructed(Vec<u64>),
}

impl Distribution {
    pub fn power_law(alpha: f64) -> Self {
        Distribution::PowerLaw {
            alpha,
            levels: DEFAULT_POWER_LAW_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl GenSpec {
    pub fn constructed(ranks: &[u64]) -> Self {
        GenSpec {
            n: ranks.len(),
            distribution: Distribution::Constructed(ranks.to_vec()),
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        match &self.distribution {
            Distribution::PowerLaw { alpha, levels } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::invalid(format!(
                        "power-law alpha must be > 0, got {alpha}"
                    )));
                }
                if *levels == 0 {
                    return Err(Error::invalid("power-law needs at least one level"));
                }
            }
            Distribution::Uniform { levels } if *levels == 0 => {
                return Err(Error::invalid("uniform needs at least one level"));
            }
            Distribution::Constructed(ranks) if ranks.len() != self.n => {
                return Err(Error::invalid(format!(
                    "constructed list has {} ranks but n = {}",
                    ranks.len(),
                    self.n
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Draws a reference list. Item ids are `x1..xn`, zero-padded.
pub fn generate(spec: &GenSpec) -> Result<RankedList> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let ranks: Vec<u64> = match &spec.distribution {
        Distribution::Constructed(ranks) => ranks.clone(),
        Distribution::Uniform { levels } => (0..spec.n).map(|_| 1 + rng.below(*levels as u64)).collect(),
        Distribution::PowerLaw { alpha, levels } => {
            let mut cdf: Vec<f64> = Vec::with_capacity(*levels as usize);
            let mut acc = 0.0;
            for r in 1..=*levels {
                acc += (r as f64).powf(-alpha);
                cdf.push(acc);
            }
            (0..spec.n)
                .map(|_| {
                    let u = rng.next_f64() * acc;
                    let level = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
                    level as u64 + 1
                })
                .collect()
        }
    };
    RankedList::from_ranks(&ranks)
}

/// A named way of damaging the ideal ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    /// `swaps` random swaps of neighbouring positions.
    AdjacentSwaps {
        swaps: usize,
        seed: u64,
    },
    /// Shuffle items within each equal-rank block; scores are unaffected.
    SubgroupShuffle {
        seed: u64,
    },
    /// Swap the top item with the item at `target` (1-based).
    TopDisplacement {
        target: usize,
    },
    Reverse,
    /// Every item predicted as the most frequent rank.
    MajorityClass,
}

fn ideal_ids(list: &RankedList, order: &[usize]) -> Hypothesis {
    Hypothesis::Order(order.iter().map(|&i| list.item(i).id.clone()).collect())
}

/// The most frequent rank; ties go to the lower rank.
pub fn majority_rank(list: &RankedList) -> u64 {
    let mut ranks = list.ranks();
    ranks.sort_unstable();
    let mut best = (0usize, ranks[0]);
    let mut i = 0;
    while i < ranks.len() {
        let j = ranks[i..].iter().take_while(|&&r| r == ranks[i]).count();
        if j > best.0 {
            best = (j, ranks[i]);
        }
        i += j;
    }
    best.1
}

pub fn perturb(list: &RankedList, op: Perturbation) -> Result<Hypothesis> {
    let mut order = list.ideal_order();
    match op {
        Perturbation::AdjacentSwaps { swaps, seed } => {
            if order.len() > 1 {
                let mut rng = SeededRng::new(seed);
                for _ in 0..swaps {
                    let i = rng.below(order.len() as u64 - 1) as usize;
                    order.swap(i, i + 1);
                }
            }
        }
        Perturbation::SubgroupShuffle { seed } => {
            let mut rng = SeededRng::new(seed);
            let mut start = 0;
            while start < order.len() {
                let rank = list.rank(order[start]);
                let len = order[start..]
                    .iter()
                    .take_while(|&&i| list.rank(i) == rank)
                    .count();
                rng.shuffle(&mut order[start..start + len]);
                start += len;
            }
        }
        Perturbation::TopDisplacement { target } => {
            if target == 0 || target > order.len() {
                return Err(Error::invalid(format!(
                    "target position {target} outside 1..={}",
                    order.len()
                )));
            }
            order.swap(0, target - 1);
        }
        Perturbation::Reverse => order.reverse(),
        Perturbation::MajorityClass => {
            return Ok(Hypothesis::constant(list, majority_rank(list) as f64));
        }
    }
    Ok(ideal_ids(list, &order))
}

/// How a sweep degrades the ideal ordering as the step index grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// Step `s` applies `s * per_step` adjacent swaps from one seeded stream,
    /// so each step extends the previous one.
    AdjacentSwaps { per_step: usize, seed: u64 },
    /// Step `s` swaps the top item down to position `1 + s(n-1)/steps`.
    TopDisplacement,
    /// Step `s` reverses the first `ceil(s n / steps)` ideal positions; the
    /// last step is the full reverse.
    ReversePrefix,
}

pub fn sweep_hypothesis(
    list: &RankedList,
    family: SweepFamily,
    step: usize,
    steps: usize,
) -> Result<Hypothesis> {
    if steps == 0 || step > steps {
        return Err(Error::invalid(format!("step {step} outside 0..={steps}")));
    }
    let n = list.len();
    match family {
        SweepFamily::AdjacentSwaps { per_step, seed } => perturb(
            list,
            Perturbation::AdjacentSwaps {
                swaps: step * per_step,
                seed,
            },
        ),
        SweepFamily::TopDisplacement => perturb(
            list,
            Perturbation::TopDisplacement {
                target: 1 + step * (n - 1) / steps,
            },
        ),
        SweepFamily::ReversePrefix => {
            let mut order = list.ideal_order();
            let len = (step * n).div_ceil(steps);
            order[..len].reverse();
            Ok(ideal_ids(list, &order))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub step: usize,
    pub metric: Metric,
    pub value: MetricValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn value(&self, step: usize, metric: Metric) -> Option<&MetricValue> {
        self.rows
            .iter()
            .find(|r| r.step == step && r.metric == metric)
            .map(|r| &r.value)
    }
}

/// Generates `spec`'s list and scores steps `0..=steps` of `family`.
pub fn degradation_sweep(
    spec: &GenSpec,
    family: SweepFamily,
    steps: usize,
    metrics: &[Metric],
    opts: EvalOptions,
) -> Result<SweepTable> {
    if steps == 0 {
        return Err(Error::invalid("a sweep needs at least one step"));
    }
    let list = generate(spec)?;
    let per_step = (0..=steps)
        .into_par_iter()
        .map(|step| {
            let hyp = sweep_hypothesis(&list, family, step, steps)?;
            Ok(evaluate_pair(&list, &hyp, metrics, opts)?
                .into_iter()
                .map(|(metric, value)| SweepRow { step, metric, value })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        rows: per_step.into_iter().flatten().collect(),
    })
}
