use std::thread;
use std::time::Duration;

use proptest::prelude::*;

use sqdc::protocol::{run_session, tc, Mode, SessionConfig, SessionStatus, Transcript};
use sqdc::transport::{memory_pair, run_alice, run_bob, HelloParams};
use sqdc::{Bit, BitString};

fn bits(max: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max)
        .prop_map(|v| v.into_iter().map(Bit::from_bool).collect())
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![
        Just(Mode::Nk),
        Just(Mode::RenkKnown),
        Just(Mode::RenkUnknown)
    ]
}

fn config(
    message: BitString,
    r: usize,
    s_est: usize,
    p: f64,
    omega: f64,
    mode: Mode,
    seed: u64,
) -> SessionConfig {
    SessionConfig {
        s: message.len(),
        r,
        s_est: if mode == Mode::RenkUnknown { s_est } else { 0 },
        p,
        omega,
        alpha: 0.05,
        mode,
        seed,
        message,
    }
}

#[test]
fn tc_is_e2_xor_i_on_all_inputs() {
    for e1 in [Bit::Zero, Bit::One] {
        for e2 in [Bit::Zero, Bit::One] {
            for i in [Bit::Zero, Bit::One] {
                assert_eq!(tc(e1, e2, i), e2 ^ i);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bitstring_text_round_trip(b in bits(64)) {
        let text = b.to_string();
        prop_assert_eq!(text.len(), b.len());
        prop_assert_eq!(text.parse::<BitString>().unwrap(), b);
    }

    #[test]
    fn clean_sessions_fetch_exactly(
        message in bits(40),
        r in 1usize..20,
        s_est in 1usize..20,
        mode in mode(),
        seed in any::<u64>(),
    ) {
        let cfg = config(message, r, s_est, 0.0, 0.0, mode, seed);
        let out = run_session(&cfg).unwrap();
        prop_assert_eq!(&out.transcript.c, &out.transcript.u);
        prop_assert_eq!(out.transcript.c_rho, 0);
        prop_assert_eq!(out.transcript.c_rho_prime, 0);
        prop_assert_eq!(out.recovered(), Some(&cfg.message));
    }

    #[test]
    fn untouched_data_is_delivered_intact(
        message in bits(24),
        r in 1usize..12,
        s_est in 1usize..12,
        p in 0.0f64..=1.0,
        omega in 0.0f64..=1.0,
        mode in mode(),
        seed in any::<u64>(),
    ) {
        let cfg = config(message, r, s_est, p, omega, mode, seed);
        let out = run_session(&cfg).unwrap();
        if let SessionStatus::Delivered { message } = &out.status {
            if out.truth.attacked_data == 0 && out.truth.disturbed_data == 0 {
                prop_assert_eq!(message, &cfg.message);
            }
        }
    }

    #[test]
    fn transcripts_audit_and_round_trip(
        message in bits(24),
        r in 1usize..12,
        s_est in 1usize..12,
        p in 0.0f64..=1.0,
        omega in 0.0f64..=1.0,
        mode in mode(),
        seed in any::<u64>(),
    ) {
        let cfg = config(message, r, s_est, p, omega, mode, seed);
        let t = run_session(&cfg).unwrap().transcript;
        t.audit().unwrap();
        let line = t.to_json_line().unwrap();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(Transcript::from_json_line(&line).unwrap(), t);
    }

    #[test]
    fn sessions_are_seed_deterministic(
        message in bits(16),
        r in 1usize..10,
        p in 0.0f64..=1.0,
        mode in mode(),
        seed in any::<u64>(),
    ) {
        let cfg = config(message, r, 5, p, 0.1, mode, seed);
        prop_assert_eq!(run_session(&cfg).unwrap(), run_session(&cfg).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn two_process_matches_in_process(
        message in bits(16),
        r in 1usize..10,
        s_est in 1usize..10,
        p in 0.0f64..=1.0,
        omega in 0.0f64..=0.5,
        mode in mode(),
        seed in any::<u64>(),
    ) {
        let cfg = config(message, r, s_est, p, omega, mode, seed);
        let (mut a, mut b) = memory_pair(Duration::from_secs(10));
        let alice_cfg = cfg.clone();
        let alice = thread::spawn(move || run_alice(&alice_cfg, &mut a));
        let bob = run_bob(&HelloParams::from_config(&cfg), seed, &mut b);
        let alice = alice.join().unwrap();
        let local = run_session(&cfg).unwrap();
        let remote = alice.session.expect("decided");
        prop_assert_eq!(remote.transcript.to_json_line().unwrap(), local.transcript.to_json_line().unwrap());
        prop_assert_eq!(&alice.status, &local.status);
        prop_assert_eq!(&bob.status, &local.status);
    }
}
