//! Qubit efficiency of NK and RE-NK for long messages.
//!
//! cargo run --example efficiency

use sqdc::experiments::{efficiency_report, EfficiencyMode};

fn main() -> sqdc::Result<()> {
    let s = 1_000_000;
    let rows = [
        ("NK, 15 probes", 15, EfficiencyMode::Nk),
        (
            "RE-NK known omega, 40 probes",
            40,
            EfficiencyMode::Renk {
                alpha: 0.01,
                s_est: 0,
            },
        ),
        (
            "RE-NK unknown omega, 60+60",
            60,
            EfficiencyMode::Renk {
                alpha: 0.05,
                s_est: 60,
            },
        ),
    ];
    for (label, r, mode) in rows {
        let rep = efficiency_report(s, r, mode)?;
        println!(
            "{label:<30} eta {:.6}  qubits {:.0}",
            rep.eta, rep.qubits_sent
        );
    }
    Ok(())
}
