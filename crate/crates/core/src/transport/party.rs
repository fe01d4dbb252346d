use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::thread;
use std::time::Duration;

use serde::Serialize;

use crate::actors::{BobAction, ChannelModel, Direction};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::session::conclude;
use crate::protocol::{
    apply_signals, measure_positions, AliceEngine, Mode, SessionConfig, SessionOutcome,
    SessionStatus, Signal,
};
use crate::rng::Phase;

use super::endpoint::{Endpoint, TcpEndpoint};
use super::wire::{ClassicalMessage, Frame, HelloParams, QuantumSimMessage, WirePhase};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Alice's result. `session` is present once she reached a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct AliceOutcome {
    pub status: SessionStatus,
    pub session: Option<SessionOutcome>,
}

/// What Bob learns: his report, his own measurement results and the
/// signals he received.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BobOutcome {
    pub status: SessionStatus,
    pub p: BitString,
    pub u: BitString,
    pub signals: Vec<Signal>,
}

fn aborted(e: &Error) -> SessionStatus {
    SessionStatus::AbortedError {
        reason: e.to_string(),
    }
}

fn unexpected(want: &str, got: &Frame) -> Error {
    Error::Protocol(format!("expected {want}, got {}", got.kind()))
}

/// Receives the next frame and checks it belongs to `session`. A peer's
/// error abort surfaces as a protocol error.
fn recv_in<E: Endpoint>(ep: &mut E, session: u64) -> Result<Frame> {
    let frame = ep.recv()?;
    if frame.session() != session {
        return Err(Error::Protocol(format!(
            "session id {} does not match {session}",
            frame.session()
        )));
    }
    if let Frame::Classical(ClassicalMessage::Abort {
        insecure: false,
        reason,
        ..
    }) = &frame
    {
        return Err(Error::Protocol(format!("peer aborted: {reason}")));
    }
    Ok(frame)
}

fn best_effort_abort<E: Endpoint>(ep: &mut E, session: u64, e: &Error) {
    let _ = ep.send(
        &ClassicalMessage::Abort {
            session,
            insecure: false,
            reason: e.to_string(),
        }
        .into(),
    );
}

/// Alice's side over any endpoint. She hosts the simulated quantum channel
/// and Bob's detector; Bob only sends intents.
pub fn run_alice<E: Endpoint>(config: &SessionConfig, ep: &mut E) -> AliceOutcome {
    let mut session = 0;
    match alice_inner(config, ep, &mut session) {
        Ok(out) => AliceOutcome {
            status: out.status.clone(),
            session: Some(out),
        },
        Err(err) => {
            let (e, decided) = *err;
            best_effort_abort(ep, session, &e);
            AliceOutcome {
                status: aborted(&e),
                session: decided,
            }
        }
    }
}

/// Boxed: the outcome is large and this is the cold path.
type AliceErr = Box<(Error, Option<SessionOutcome>)>;

fn alice_inner<E: Endpoint>(
    config: &SessionConfig,
    ep: &mut E,
    session: &mut u64,
) -> std::result::Result<SessionOutcome, AliceErr> {
    let fail = |e: Error| Box::new((e, None));
    config.validate().map_err(fail)?;
    let ours = HelloParams::from_config(config);
    let hello = ep.recv().map_err(fail)?;
    let Frame::Classical(ClassicalMessage::Hello {
        session: sid,
        params,
    }) = hello
    else {
        return Err(fail(unexpected("hello", &hello)));
    };
    *session = sid;
    if let Some(why) = ours.mismatch(&params) {
        return Err(fail(Error::Protocol(format!("hello rejected: {why}"))));
    }
    ep.send(
        &ClassicalMessage::Hello {
            session: sid,
            params: ours.clone(),
        }
        .into(),
    )
    .map_err(fail)?;

    let estimation = if config.mode == Mode::RenkUnknown {
        expect_phase(ep, sid, WirePhase::Estimation).map_err(fail)?;
        let model = ChannelModel::new(0.0, config.omega).map_err(fail)?;
        let mut engine = AliceEngine::new(config.seed, Phase::Estimation, model);
        for k in 0..config.s_est {
            let action = serve_slot(ep, sid, k, &mut engine).map_err(fail)?;
            if action != BobAction::Reflect {
                return Err(fail(Error::Protocol(format!(
                    "estimation slot {k} was measured"
                ))));
            }
        }
        Some(engine.finish())
    } else {
        None
    };

    expect_phase(ep, sid, WirePhase::Main).map_err(fail)?;
    let omega = if config.mode == Mode::Nk {
        0.0
    } else {
        config.omega
    };
    let model = ChannelModel::new(config.p, omega).map_err(fail)?;
    let mut engine = AliceEngine::new(config.seed, Phase::Main, model);
    for k in 0..config.slots() {
        serve_slot(ep, sid, k, &mut engine).map_err(fail)?;
    }
    let main = engine.finish();

    let frame = recv_in(ep, sid).map_err(fail)?;
    let report = match frame {
        Frame::Classical(m @ ClassicalMessage::PString { .. }) => {
            m.validate(&ours).map_err(fail)?;
            let ClassicalMessage::PString { bits, .. } = m else {
                unreachable!()
            };
            bits
        }
        other => return Err(fail(unexpected("p_string", &other))),
    };
    let outcome = conclude(
        config,
        config.mode,
        &main,
        &report,
        main.bob_results(),
        estimation.as_ref(),
    )
    .map_err(fail)?;

    let verdict = if outcome.rejected() {
        ClassicalMessage::Abort {
            session: sid,
            insecure: true,
            reason: format!("z = {} exceeds {}", outcome.stats.z, outcome.stats.z_alpha),
        }
    } else {
        ClassicalMessage::KeepFlipList {
            session: sid,
            signals: outcome.transcript.signals.clone(),
        }
    };
    let decided = |e: Error| Box::new((e, Some(outcome.clone())));
    ep.send(&verdict.into()).map_err(decided)?;
    match recv_in(ep, sid).map_err(decided)? {
        Frame::Classical(ClassicalMessage::Done { .. }) => Ok(outcome),
        other => Err(decided(unexpected("done", &other))),
    }
}

fn expect_phase<E: Endpoint>(ep: &mut E, sid: u64, phase: WirePhase) -> Result<()> {
    match recv_in(ep, sid)? {
        Frame::Classical(ClassicalMessage::PhaseMark { phase: got, .. }) if got == phase => Ok(()),
        other => Err(unexpected(&format!("{phase:?} phase mark"), &other)),
    }
}

/// Reads Bob's intent for slot `k`, runs the round trip and answers.
fn serve_slot<E: Endpoint>(
    ep: &mut E,
    sid: u64,
    k: usize,
    engine: &mut AliceEngine,
) -> Result<BobAction> {
    let frame = recv_in(ep, sid)?;
    let Frame::Quantum(QuantumSimMessage {
        slot,
        direction: Direction::AliceToBob,
        action: Some(action),
        measured: None,
        ..
    }) = frame
    else {
        return Err(unexpected(&format!("intent for slot {k}"), &frame));
    };
    if slot != k {
        return Err(Error::Protocol(format!(
            "intent for slot {slot}, expected {k}"
        )));
    }
    let res = engine.run_slot(action)?;
    ep.send(
        &QuantumSimMessage {
            session: sid,
            slot: k,
            direction: Direction::BobToAlice,
            action: None,
            measured: res.u,
        }
        .into(),
    )?;
    Ok(action)
}

/// Bob's side over any endpoint. `params` must match Alice's configuration.
pub fn run_bob<E: Endpoint>(params: &HelloParams, session: u64, ep: &mut E) -> BobOutcome {
    let mut out = BobOutcome {
        status: SessionStatus::AbortedError {
            reason: String::new(),
        },
        p: BitString::new(),
        u: BitString::new(),
        signals: Vec::new(),
    };
    match bob_inner(params, session, ep, &mut out) {
        Ok(status) => out.status = status,
        Err(e) => {
            best_effort_abort(ep, session, &e);
            out.status = aborted(&e);
        }
    }
    out
}

fn bob_inner<E: Endpoint>(
    params: &HelloParams,
    sid: u64,
    ep: &mut E,
    out: &mut BobOutcome,
) -> Result<SessionStatus> {
    if params.r == 0 {
        return Err(Error::ZeroCount("r"));
    }
    ep.send(
        &ClassicalMessage::Hello {
            session: sid,
            params: params.clone(),
        }
        .into(),
    )?;
    match recv_in(ep, sid)? {
        Frame::Classical(ClassicalMessage::Hello { params: theirs, .. }) => {
            if let Some(why) = params.mismatch(&theirs) {
                return Err(Error::Protocol(format!("hello rejected: {why}")));
            }
        }
        other => return Err(unexpected("hello", &other)),
    }

    if params.mode == Mode::RenkUnknown {
        ep.send(
            &ClassicalMessage::PhaseMark {
                session: sid,
                phase: WirePhase::Estimation,
            }
            .into(),
        )?;
        for k in 0..params.s_est {
            request_slot(ep, sid, k, BobAction::Reflect)?;
        }
    }

    ep.send(
        &ClassicalMessage::PhaseMark {
            session: sid,
            phase: WirePhase::Main,
        }
        .into(),
    )?;
    out.p = measure_positions(params.s, params.r, params.seed);
    for (k, bit) in out.p.clone().iter().enumerate() {
        if let Some(u) = request_slot(ep, sid, k, BobAction::from_report_bit(bit))? {
            out.u.push(u);
        }
    }
    ep.send(
        &ClassicalMessage::PString {
            session: sid,
            bits: out.p.clone(),
        }
        .into(),
    )?;

    let status = match recv_in(ep, sid)? {
        Frame::Classical(m @ ClassicalMessage::KeepFlipList { .. }) => {
            m.validate(params)?;
            let ClassicalMessage::KeepFlipList { signals, .. } = m else {
                unreachable!()
            };
            out.signals = signals;
            SessionStatus::Delivered {
                message: apply_signals(&out.signals, out.u.iter()).collect(),
            }
        }
        Frame::Classical(ClassicalMessage::Abort { insecure: true, .. }) => {
            SessionStatus::AbortedInsecure
        }
        other => return Err(unexpected("keep_flip_list or abort", &other)),
    };
    ep.send(&ClassicalMessage::Done { session: sid }.into())?;
    Ok(status)
}

fn request_slot<E: Endpoint>(
    ep: &mut E,
    sid: u64,
    k: usize,
    action: BobAction,
) -> Result<Option<crate::bits::Bit>> {
    ep.send(
        &QuantumSimMessage {
            session: sid,
            slot: k,
            direction: Direction::AliceToBob,
            action: Some(action),
            measured: None,
        }
        .into(),
    )?;
    let frame = recv_in(ep, sid)?;
    match frame {
        Frame::Quantum(QuantumSimMessage {
            slot,
            direction: Direction::BobToAlice,
            action: None,
            measured,
            ..
        }) if slot == k && measured.is_some() == (action == BobAction::Measure) => Ok(measured),
        other => Err(unexpected(&format!("reply for slot {k}"), &other)),
    }
}

/// Accepts one connection on `addr` and runs Alice's side on it.
pub fn serve_alice(
    config: &SessionConfig,
    addr: impl ToSocketAddrs,
    timeout: Duration,
) -> Result<AliceOutcome> {
    let listener = TcpListener::bind(addr)?;
    let (stream, _) = listener.accept()?;
    let mut ep = TcpEndpoint::new(stream, timeout)?;
    Ok(run_alice(config, &mut ep))
}

/// Accepts `sessions` connections, each handled on its own thread with the
/// same configuration. Outcomes come back in acceptance order.
pub fn serve_sessions(
    listener: &TcpListener,
    config: &SessionConfig,
    sessions: usize,
    timeout: Duration,
) -> Result<Vec<AliceOutcome>> {
    thread::scope(|scope| {
        let mut handles = Vec::with_capacity(sessions);
        for _ in 0..sessions {
            let (stream, _) = listener.accept()?;
            let mut ep = TcpEndpoint::new(stream, timeout)?;
            handles.push(scope.spawn(move || run_alice(config, &mut ep)));
        }
        Ok(handles
            .into_iter()
            .map(|h| h.join().expect("session thread panicked"))
            .collect())
    })
}

pub fn connect_bob(
    params: &HelloParams,
    session: u64,
    addr: impl ToSocketAddrs,
    timeout: Duration,
) -> Result<BobOutcome> {
    let stream = TcpStream::connect(addr)?;
    let mut ep = TcpEndpoint::new(stream, timeout)?;
    Ok(run_bob(params, session, &mut ep))
}
