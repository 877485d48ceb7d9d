//! rankDCG beside nDCG, tau-b, AP and F1 on a skewed synthetic list, for a
//! handful of perturbed hypotheses.

use rankdcg::datagen::{generate, perturb, Distribution, GenSpec, Perturbation};
use rankdcg::io::{write_report, ReportFormat};
use rankdcg::{evaluate_all, EvalOptions, Metric};

fn main() {
    let list = generate(&GenSpec {
        n: 200,
        distribution: Distribution::power_law(1.5),
        seed: 11,
    })
    .unwrap();

    let ops = [
        ("ideal", None),
        (
            "swaps-20",
            Some(Perturbation::AdjacentSwaps { swaps: 20, seed: 1 }),
        ),
        (
            "swaps-400",
            Some(Perturbation::AdjacentSwaps { swaps: 400, seed: 1 }),
        ),
        ("top-to-100", Some(Perturbation::TopDisplacement { target: 100 })),
        ("majority", Some(Perturbation::MajorityClass)),
        ("reverse", Some(Perturbation::Reverse)),
    ];
    let hyps: Vec<_> = ops
        .into_iter()
        .map(|(name, op)| {
            let hyp = match op {
                Some(op) => perturb(&list, op).unwrap(),
                None => rankdcg::Hypothesis::ideal(&list),
            };
            (name.to_string(), hyp)
        })
        .collect();

    let metrics = [
        Metric::RankDcg,
        Metric::Ndcg,
        Metric::TauB,
        Metric::Ap,
        Metric::F1,
        Metric::Map,
    ];
    let rows = evaluate_all(&list, &hyps, &metrics, EvalOptions::default()).unwrap();
    print!("{}", write_report(&rows, ReportFormat::Table));
}
