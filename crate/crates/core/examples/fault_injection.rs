//! Forging one KEEP/FLIP signal on an unauthenticated classical channel
//! silently corrupts exactly that bit of the delivered message.
//!
//! cargo run --example fault_injection

use std::thread;
use std::time::Duration;

use sqdc::protocol::{SessionConfig, SessionStatus};
use sqdc::transport::{memory_pair, run_alice, run_bob, HelloParams, TamperEndpoint};

fn main() -> sqdc::Result<()> {
    let config = SessionConfig::nk("1100101011110000".parse()?, 12, 5);
    let (alice_end, mut bob_end) = memory_pair(Duration::from_secs(5));
    let alice = {
        let config = config.clone();
        thread::spawn(move || run_alice(&config, &mut TamperEndpoint::new(alice_end, 6)))
    };
    let bob = run_bob(&HelloParams::from_config(&config), 1, &mut bob_end);
    alice.join().expect("alice thread");

    if let SessionStatus::Delivered { message } = bob.status {
        println!("sent:     {}", config.message);
        println!("received: {message}");
        println!("differs at {:?}", message.diff_positions(&config.message));
    }
    Ok(())
}
