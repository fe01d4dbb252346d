//! Detection probability of the measure-resend attack against the number of
//! probing bits, simulated and in closed form.
//!
//! cargo run --release --example detection_curve

use sqdc::experiments::{emit_csv, sweep_detection, SweepKind, SweepSpec};

fn main() -> sqdc::Result<()> {
    let spec = SweepSpec {
        p: vec![0.2, 0.6, 1.0],
        r: vec![1, 2, 5, 10, 15, 20, 30],
        trials: 20_000,
        seed: 7,
        ..SweepSpec::new(SweepKind::DetectionVsR)
    };
    let result = sweep_detection(&spec)?;
    for row in &result.rows {
        println!(
            "p={:<4} r={:<3} simulated {:.4} [{:.4}, {:.4}]  theory {:.4}",
            row.params[0].to_string(),
            row.params[1].to_string(),
            row.estimate,
            row.ci_lo,
            row.ci_hi,
            row.theory.unwrap_or(f64::NAN)
        );
    }
    println!();
    emit_csv(&result, std::io::stdout())
}
