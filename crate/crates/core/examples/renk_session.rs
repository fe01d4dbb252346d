//! RE-NK over a noisy channel: the test tolerates disturbance at rate ω and
//! still flags an attack on top of it.
//!
//! cargo run --example renk_session

use sqdc::protocol::{run_renk, Mode, SessionConfig};
use sqdc::BitString;

fn show(label: &str, config: &SessionConfig) -> sqdc::Result<()> {
    let out = run_renk(config)?;
    let st = &out.stats;
    println!(
        "{label:<28} kappa_hat {:.3} omega_hat {:.3} z {:>7.3} z_alpha {:.3} -> {}",
        st.reported_kappa(),
        st.omega_hat,
        st.z,
        st.z_alpha,
        if out.status.is_delivered() {
            "delivered"
        } else {
            "aborted"
        }
    );
    if !st.normal_approx_ok {
        println!("  note: r is below the normal-approximation threshold");
    }
    Ok(())
}

fn main() -> sqdc::Result<()> {
    let base = SessionConfig {
        s: 32,
        r: 200,
        s_est: 200,
        p: 0.0,
        omega: 0.05,
        alpha: 0.05,
        mode: Mode::RenkUnknown,
        seed: 11,
        message: BitString::zeros(32),
    };
    show("unknown omega, no attack", &base)?;
    show(
        "unknown omega, p = 0.3",
        &SessionConfig {
            p: 0.3,
            ..base.clone()
        },
    )?;
    let known = SessionConfig {
        mode: Mode::RenkKnown,
        s_est: 0,
        ..base.clone()
    };
    show("known omega, no attack", &known)?;
    show("known omega, p = 0.3", &SessionConfig { p: 0.3, ..known })?;
    Ok(())
}
