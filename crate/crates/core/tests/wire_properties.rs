use std::thread;
use std::time::Duration;

use proptest::prelude::*;

use sqdc::actors::{BobAction, Direction};
use sqdc::protocol::{Mode, SessionConfig, SessionStatus, Signal};
use sqdc::transport::{
    decode, encode, memory_pair, run_alice, ClassicalMessage, Endpoint, Frame, HelloParams,
    QuantumSimMessage, WirePhase, WIRE_VERSION,
};
use sqdc::{Bit, BitString};

fn bit_string() -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..40)
        .prop_map(|v| v.into_iter().map(Bit::from_bool).collect())
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![
        Just(Mode::Nk),
        Just(Mode::RenkKnown),
        Just(Mode::RenkUnknown)
    ]
}

fn hello_params() -> impl Strategy<Value = HelloParams> {
    (
        0usize..1000,
        1usize..1000,
        0usize..1000,
        mode(),
        0.0001f64..0.9999,
        any::<u64>(),
    )
        .prop_map(|(s, r, s_est, mode, alpha, seed)| HelloParams {
            version: WIRE_VERSION.into(),
            s,
            r,
            s_est,
            mode,
            alpha,
            seed,
        })
}

fn classical() -> impl Strategy<Value = ClassicalMessage> {
    let signal = prop_oneof![Just(Signal::Keep), Just(Signal::Flip)];
    prop_oneof![
        (any::<u64>(), hello_params())
            .prop_map(|(session, params)| ClassicalMessage::Hello { session, params }),
        (
            any::<u64>(),
            prop_oneof![Just(WirePhase::Estimation), Just(WirePhase::Main)]
        )
            .prop_map(|(session, phase)| ClassicalMessage::PhaseMark { session, phase }),
        (any::<u64>(), bit_string())
            .prop_map(|(session, bits)| ClassicalMessage::PString { session, bits }),
        (any::<u64>(), prop::collection::vec(signal, 0..40))
            .prop_map(|(session, signals)| ClassicalMessage::KeepFlipList { session, signals }),
        (any::<u64>(), any::<bool>(), ".*").prop_map(|(session, insecure, reason)| {
            ClassicalMessage::Abort {
                session,
                insecure,
                reason,
            }
        }),
        any::<u64>().prop_map(|session| ClassicalMessage::Done { session }),
    ]
}

fn quantum() -> impl Strategy<Value = QuantumSimMessage> {
    (
        any::<u64>(),
        any::<usize>(),
        prop_oneof![Just(Direction::AliceToBob), Just(Direction::BobToAlice)],
        prop::option::of(prop_oneof![
            Just(BobAction::Measure),
            Just(BobAction::Reflect)
        ]),
        prop::option::of(any::<bool>().prop_map(Bit::from_bool)),
    )
        .prop_map(
            |(session, slot, direction, action, measured)| QuantumSimMessage {
                session,
                slot,
                direction,
                action,
                measured,
            },
        )
}

fn nk_config(seed: u64) -> SessionConfig {
    SessionConfig::nk("1011".parse().unwrap(), 3, seed)
}

/// Plays Bob faithfully up to `step` messages, then sends `rogue`.
/// Returns Alice's status.
fn derail(step: usize, rogue: &Frame) -> SessionStatus {
    let cfg = nk_config(5);
    let params = HelloParams::from_config(&cfg);
    let (mut a, mut b) = memory_pair(Duration::from_secs(5));
    let alice = thread::spawn(move || run_alice(&cfg, &mut a));
    let mut script: Vec<Frame> = vec![
        ClassicalMessage::Hello { session: 1, params }.into(),
        ClassicalMessage::PhaseMark {
            session: 1,
            phase: WirePhase::Main,
        }
        .into(),
    ];
    for slot in 0..7 {
        script.push(
            QuantumSimMessage {
                session: 1,
                slot,
                direction: Direction::AliceToBob,
                action: Some(BobAction::Reflect),
                measured: None,
            }
            .into(),
        );
    }
    for frame in script.iter().take(step) {
        b.send(frame).unwrap();
        if !matches!(frame, Frame::Classical(ClassicalMessage::PhaseMark { .. })) {
            b.recv().unwrap();
        }
    }
    b.send(rogue).unwrap();
    alice.join().unwrap().status
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn classical_messages_round_trip(m in classical()) {
        let frame = Frame::Classical(m);
        let line = encode(&frame).unwrap();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(decode(&line).unwrap(), frame);
    }

    #[test]
    fn quantum_messages_round_trip(q in quantum()) {
        let frame = Frame::Quantum(q);
        prop_assert_eq!(decode(&encode(&frame).unwrap()).unwrap(), frame);
    }

    #[test]
    fn garbage_never_panics(line in ".*") {
        let _ = decode(&line);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn out_of_order_messages_abort_deterministically(step in 0usize..=9, which in 0usize..4) {
        let rogue: Frame = match which {
            0 => ClassicalMessage::KeepFlipList { session: 1, signals: vec![Signal::Keep; 4] }.into(),
            1 => ClassicalMessage::Done { session: 1 }.into(),
            2 => ClassicalMessage::PString { session: 1, bits: "0101010".parse().unwrap() }.into(),
            _ => ClassicalMessage::PhaseMark { session: 1, phase: WirePhase::Estimation }.into(),
        };
        // A p_string right after the last slot is legitimate.
        prop_assume!(!(which == 2 && step == 9));
        let first = derail(step, &rogue);
        let second = derail(step, &rogue);
        prop_assert!(matches!(first, SessionStatus::AbortedError { .. }), "{:?}", first);
        prop_assert_eq!(first, second);
    }
}
