//! Both error rates against the significance level. With no attack the
//! rejection rate sits near α.
//!
//! cargo run --release --example alpha_sweep

use sqdc::experiments::{sweep_alpha, SweepKind, SweepSpec};

fn main() -> sqdc::Result<()> {
    let spec = SweepSpec {
        alpha: vec![0.01, 0.05, 0.1, 0.2],
        p: vec![0.0, 0.1],
        r: vec![600],
        s_est: vec![600],
        omega: vec![0.3],
        trials: 2_000,
        seed: 4,
        ..SweepSpec::new(SweepKind::AlphaSweep)
    };
    let result = sweep_alpha(&spec)?;
    let col = |name| result.column(name).expect("column");
    let (alpha, mode, metric) = (col("alpha"), col("mode"), col("metric"));
    for row in &result.rows {
        println!(
            "alpha {:<5} {:<13} {:<7} {:.4}",
            row.params[alpha].to_string(),
            row.params[mode].to_string(),
            row.params[metric].to_string(),
            row.estimate
        );
    }
    Ok(())
}
