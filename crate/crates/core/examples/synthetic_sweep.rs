//! Degradation sweep: scores as a power-law list is progressively scrambled.
//!
//! Usage: `cargo run --example synthetic_sweep -- [family] [seed]`
//! where family is adjacent-swaps, top-displacement or reverse-prefix.

use rankdcg::datagen::{degradation_sweep, Distribution, GenSpec, SweepFamily};
use rankdcg::io::write_sweep_csv;
use rankdcg::{EvalOptions, Metric};

fn main() {
    let mut args = std::env::args().skip(1);
    let family = args.next().unwrap_or_else(|| "adjacent-swaps".to_string());
    let seed: u64 = args.next().map_or(5, |s| s.parse().expect("seed"));

    let family = match family.as_str() {
        "adjacent-swaps" => SweepFamily::AdjacentSwaps { per_step: 25, seed },
        "top-displacement" => SweepFamily::TopDisplacement,
        "reverse-prefix" => SweepFamily::ReversePrefix,
        other => panic!("unknown family {other}"),
    };
    let spec = GenSpec {
        n: 100,
        distribution: Distribution::power_law(2.0),
        seed,
    };
    let metrics = [Metric::RankDcg, Metric::Ndcg, Metric::TauB, Metric::Ap];
    let table = degradation_sweep(&spec, family, 10, &metrics, EvalOptions::default()).unwrap();
    print!("{}", write_sweep_csv(&table));
}
