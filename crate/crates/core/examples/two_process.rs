//! Alice and Bob on opposite ends of a TCP connection, exchanging the
//! newline-delimited JSON wire protocol. The transcript matches the
//! in-process run with the same seed.
//!
//! cargo run --example two_process

use std::net::TcpListener;
use std::thread;

use sqdc::protocol::{run_session, Mode, SessionConfig};
use sqdc::transport::{connect_bob, serve_sessions, HelloParams, DEFAULT_TIMEOUT};

fn main() -> sqdc::Result<()> {
    let config = SessionConfig {
        s: 8,
        r: 24,
        s_est: 24,
        p: 0.0,
        omega: 0.02,
        alpha: 0.05,
        mode: Mode::RenkUnknown,
        seed: 99,
        message: "10110010".parse()?,
    };
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let alice = {
        let config = config.clone();
        thread::spawn(move || serve_sessions(&listener, &config, 1, DEFAULT_TIMEOUT))
    };
    let bob = connect_bob(&HelloParams::from_config(&config), 1, addr, DEFAULT_TIMEOUT)?;
    let alice = alice.join().expect("alice thread")?.remove(0);

    println!("bob:   {:?}", bob.status);
    println!("alice: {:?}", alice.status);
    let remote = alice
        .session
        .expect("alice reached a verdict")
        .transcript
        .to_json_line()?;
    let local = run_session(&config)?.transcript.to_json_line()?;
    println!("transcripts identical: {}", remote == local);
    Ok(())
}
