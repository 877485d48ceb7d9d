//! How the three tie policies score a hypothesis that ties items of
//! different ranks.

use rankdcg::{rank_dcg, Hypothesis, RankedList, TiePolicy};

fn main() {
    let list = RankedList::from_ranks(&[9, 4, 4, 2, 2, 2, 1, 1, 1, 1]).unwrap();

    // top item found, everything else in one tied block
    let mut scores = vec![(list.item(0).id.clone(), 1.0)];
    scores.extend(list.items()[1..].iter().map(|it| (it.id.clone(), 0.0)));
    let partial = Hypothesis::scores(scores);
    let constant = Hypothesis::constant(&list, 0.5);

    println!(
        "{:<12} {:>12} {:>10} {:>12}",
        "hypothesis", "pessimistic", "expected", "optimistic"
    );
    for (name, hyp) in [("top-only", &partial), ("constant", &constant)] {
        let [p, e, o] = [TiePolicy::Pessimistic, TiePolicy::Expected, TiePolicy::Optimistic]
            .map(|pol| rank_dcg(&list, hyp, pol).unwrap().normalized);
        println!("{name:<12} {p:>12.4} {e:>10.4} {o:>12.4}");
    }
}
