//! Per-position costs of the four cost functions along an ideal ordering,
//! written as CSV.
//!
//! Usage: `cargo run --example cost_curves -- [comma-separated ranks]`

use rankdcg::io::write_curves_csv;
use rankdcg::{CostVariant, RankedList};

fn main() {
    let ranks: Vec<u64> = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "9,4,4,2,2,2,1,1,1,1".to_string())
        .split(',')
        .map(|r| r.trim().parse().expect("ranks are integers"))
        .collect();
    let list = RankedList::from_ranks(&ranks).unwrap();
    print!("{}", write_curves_csv(&list, &CostVariant::ALL));
}
