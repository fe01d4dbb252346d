//! One NK session over a clean channel and one under a full attack.
//!
//! cargo run --example nk_session

use sqdc::protocol::{run_nk, SessionConfig};

fn main() -> sqdc::Result<()> {
    let message = "1011001110001111".parse()?;
    let clean = SessionConfig::nk(message, 15, 2024);
    let out = run_nk(&clean)?;
    println!("clean:    {:?}", out.status);
    println!("{}", out.transcript.to_json_line()?);

    let attacked = SessionConfig { p: 1.0, ..clean };
    let out = run_nk(&attacked)?;
    println!("attacked: {:?}", out.status);
    println!(
        "probes {} positives {} (data bits touched by Eve: {})",
        attacked.r, out.transcript.c_rho, out.truth.attacked_data
    );
    Ok(())
}
