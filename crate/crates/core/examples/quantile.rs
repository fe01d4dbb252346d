//! Critical values of the one-sided test and the sample size the normal
//! approximation needs.
//!
//! cargo run --example quantile

use sqdc::stats::{normal_approx_threshold, normal_quantile};

fn main() -> sqdc::Result<()> {
    for alpha in [0.1, 0.05, 0.025, 0.01, 0.001] {
        println!("alpha {alpha:<6} z {:.10}", normal_quantile(alpha)?);
    }
    for kappa in [0.05, 0.1, 0.3, 1.0] {
        println!(
            "kappa {kappa:<5} probes needed {:.0}",
            normal_approx_threshold(kappa)?.ceil()
        );
    }
    Ok(())
}
