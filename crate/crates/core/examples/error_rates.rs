//! Type A (missed attack) and Type B (false alarm) rates of RE-NK against
//! the number of probing bits, with ω unknown and known.
//!
//! cargo run --release --example error_rates

use sqdc::experiments::{sweep_errors, SweepKind, SweepSpec};

fn main() -> sqdc::Result<()> {
    for (kind, known) in [
        (SweepKind::ErrorsVsProbesUnknown, false),
        (SweepKind::ErrorsVsProbesKnown, true),
    ] {
        let spec = SweepSpec {
            p: vec![0.0, 0.6],
            r: vec![10, 20, 40, 60, 100],
            omega: vec![0.05],
            alpha: vec![0.05],
            trials: 5_000,
            seed: 3,
            ..SweepSpec::new(kind)
        };
        let result = sweep_errors(&spec, known)?;
        println!("{kind:?}");
        let metric = result.column("metric").expect("metric column");
        for row in &result.rows {
            println!(
                "  probes {:>4}  {:<7} {:.4} [{:.4}, {:.4}]",
                row.params[0].to_string(),
                row.params[metric].to_string(),
                row.estimate,
                row.ci_lo,
                row.ci_hi
            );
        }
    }
    Ok(())
}
