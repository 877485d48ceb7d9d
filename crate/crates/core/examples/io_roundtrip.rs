//! Writes a generated reference and hypotheses in both file formats, reads
//! them back and checks nothing changed.

use rankdcg::datagen::{generate, perturb, Distribution, GenSpec, Perturbation};
use rankdcg::io::{
    parse_hypothesis, parse_reference, write_hypothesis, write_reference, DataFormat, HypothesisMode,
};
use rankdcg::Hypothesis;

fn main() {
    let list = generate(&GenSpec {
        n: 8,
        distribution: Distribution::Uniform { levels: 3 },
        seed: 2,
    })
    .unwrap();
    let order = perturb(&list, Perturbation::SubgroupShuffle { seed: 2 }).unwrap();
    let scores = Hypothesis::scores(
        list.items()
            .iter()
            .enumerate()
            .map(|(i, it)| (it.id.clone(), 1.0 / (i + 1) as f64)),
    );

    for format in [DataFormat::Csv, DataFormat::JsonLines] {
        let text = write_reference(&list, format).unwrap();
        println!("-- reference ({format:?})\n{text}");
        assert_eq!(parse_reference(&text, format).unwrap(), list);

        for (hyp, mode) in [(&order, HypothesisMode::Order), (&scores, HypothesisMode::Scores)] {
            let text = write_hypothesis(hyp, format).unwrap();
            println!("-- {mode:?} hypothesis ({format:?})\n{text}");
            let back = parse_hypothesis(&text, format, mode).unwrap();
            assert_eq!(write_hypothesis(&back, format).unwrap(), text);
        }
    }
    println!("all round trips identical");
}
