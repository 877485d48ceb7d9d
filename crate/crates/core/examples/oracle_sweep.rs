//! Exhaustively checks rankDCG's bounds and invariances on small lists.
//!
//! Usage: `cargo run --release --example oracle_sweep -- [levels] [max_n]`

use std::time::Instant;

use rankdcg::oracle::{sweep, verify_instance, Property};

fn main() {
    let mut args = std::env::args().skip(1);
    let levels: u64 = args.next().map_or(4, |a| a.parse().expect("levels"));
    let max_n: usize = args.next().map_or(8, |a| a.parse().expect("max_n"));

    let report = verify_instance(&[9, 4, 4, 2, 2, 2, 1, 1, 1, 1]).expect("n <= 10");
    println!("{report}");

    let start = Instant::now();
    let sweep = sweep(levels, max_n).expect("sweep parameters");
    println!(
        "{} multisets over 1..={levels} with n <= {max_n}: {} permutations in {:.1?}",
        sweep.instances.len(),
        sweep.permutations(),
        start.elapsed()
    );
    println!("bound violations: {}", sweep.violation_count());
    for p in Property::ALL {
        print!("{:<24} {:>8} failing", p.name(), sweep.property_failures(p));
        match sweep.first_counterexample(p) {
            Some((instance, example)) => println!("  e.g. {instance} {example}"),
            None => println!(),
        }
    }
}
