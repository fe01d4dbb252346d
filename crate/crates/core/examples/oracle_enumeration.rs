//! Exact rational results from enumerating every measurement branch.
//!
//! cargo run --example oracle_enumeration

use num_rational::Ratio;
use sqdc::oracle::{mrad_detection_probability, probe_positive_probability, tc_table};

fn main() {
    println!("tele-fetch rule (e1 e2 i -> u):");
    for row in tc_table().expect("unambiguous") {
        println!("  {} {} {} -> {}", row.e1, row.e2, row.i, row.u);
    }

    let one = Ratio::from_integer(1);
    let zero = Ratio::from_integer(0);
    for r in 1..=3 {
        println!(
            "full attack, {r} probes: {}",
            mrad_detection_probability(r, one, zero)
        );
    }

    let (p, omega) = (Ratio::new(1, 9), Ratio::new(1, 10));
    println!(
        "positive rate at p={p}, omega={omega}: {}",
        probe_positive_probability(p, omega)
    );
}
