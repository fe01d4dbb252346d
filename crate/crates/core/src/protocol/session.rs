use rand::seq::SliceRandom;

use crate::actors::{
    bob_handle, channel_transit, AliceRegister, BobAction, ChannelModel, Direction, FlightRecord,
};
use crate::bits::{Bit, BitString};
use crate::error::{Error, Result};
use crate::qstate::BellOutcome;
use crate::rng::{role_rng, Phase, Role, SessionStreams};
use crate::stats::DetectionStats;

use super::classical::{ae, apply_signals, rectify_signal, tc, Signal};
use super::transcript::{EstimationRecord, Transcript};
use super::{GroundTruth, Mode, SessionConfig, SessionOutcome, SessionStatus};

/// Everything that happened to one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotResult {
    pub slot: usize,
    /// Alice's preparation bit `i_k`.
    pub prep: Bit,
    pub action: BobAction,
    /// Bob's Z-measurement result, for measured slots.
    pub u: Option<Bit>,
    pub outcome: BellOutcome,
    pub flight: FlightRecord,
}

impl SlotResult {
    /// AE on a reflected slot.
    pub fn positive(&self) -> bool {
        ae(self.outcome.e1, self.outcome.e2, self.prep) == Bit::One
    }
}

/// One full round trip: Alice sends, the qubit crosses the channel, Bob acts,
/// the qubit comes back and Alice Bell-measures.
fn round_trip(
    register: &mut AliceRegister,
    k: usize,
    action: BobAction,
    model: &ChannelModel,
    streams: &mut SessionStreams,
) -> Result<SlotResult> {
    let (slot, out) = register.send(k, &mut streams.alice)?;
    let (arrived, flight) = channel_transit(
        out,
        model,
        Direction::AliceToBob,
        &mut streams.eve,
        &mut streams.channel,
    );
    let (reply, u) = bob_handle(arrived, action, &mut streams.bob_device);
    let (back, _) = channel_transit(
        reply,
        model,
        Direction::BobToAlice,
        &mut streams.eve,
        &mut streams.channel,
    );
    let prep = slot.prep();
    let outcome = register.measure(slot, back, &mut streams.alice_device)?;
    Ok(SlotResult {
        slot: k,
        prep,
        action,
        u,
        outcome,
        flight,
    })
}

/// Ordered record of a phase's slots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhaseLog {
    pub slots: Vec<SlotResult>,
}

impl PhaseLog {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn preps(&self) -> BitString {
        self.slots.iter().map(|s| s.prep).collect()
    }

    pub fn e1(&self) -> BitString {
        self.slots.iter().map(|s| s.outcome.e1).collect()
    }

    pub fn e2(&self) -> BitString {
        self.slots.iter().map(|s| s.outcome.e2).collect()
    }

    /// Bob's measured results in slot order.
    pub fn bob_results(&self) -> BitString {
        self.slots.iter().filter_map(|s| s.u).collect()
    }
}

/// Hosts the quantum side of a session: Alice's register, the channel and
/// Bob's detector. Bob only chooses actions.
#[derive(Debug)]
pub struct AliceEngine {
    model: ChannelModel,
    register: AliceRegister,
    streams: SessionStreams,
    log: PhaseLog,
}

impl AliceEngine {
    pub fn new(seed: u64, phase: Phase, model: ChannelModel) -> Self {
        AliceEngine {
            model,
            register: AliceRegister::new(),
            streams: SessionStreams::new(seed, phase),
            log: PhaseLog::default(),
        }
    }

    /// Runs the next slot with Bob's chosen `action`.
    pub fn run_slot(&mut self, action: BobAction) -> Result<&SlotResult> {
        let k = self.log.len();
        let res = round_trip(
            &mut self.register,
            k,
            action,
            &self.model,
            &mut self.streams,
        )?;
        self.log.slots.push(res);
        Ok(self.log.slots.last().expect("just pushed"))
    }

    pub fn max_live(&self) -> usize {
        self.register.max_live()
    }

    pub fn log(&self) -> &PhaseLog {
        &self.log
    }

    pub fn finish(self) -> PhaseLog {
        self.log
    }
}

/// Bob's uniformly random choice of `s` measured positions among `s + r`,
/// as the report string (`1` = measured). Drawn from Bob's own stream.
pub fn measure_positions(s: usize, r: usize, seed: u64) -> BitString {
    let mut rng = role_rng(seed, Phase::Main, Role::Bob);
    let mut idx: Vec<usize> = (0..s + r).collect();
    idx.shuffle(&mut rng);
    let mut p = BitString::zeros(s + r);
    for &k in &idx[..s] {
        p.set(k, Bit::One);
    }
    p
}

/// Alice's verdict after reading Bob's report.
#[derive(Debug, Clone, PartialEq)]
pub struct AliceDecision {
    pub stats: DetectionStats,
    pub c: BitString,
    pub c_rho: usize,
    pub c_rho_prime: usize,
    /// KEEP/FLIP list, absent when the session aborts.
    pub signals: Option<Vec<Signal>>,
}

impl AliceDecision {
    /// Examines every reflected slot and tele-fetches every measured one,
    /// using only what Alice holds: her preparation bits, her Bell outcomes
    /// and Bob's report `p`.
    pub fn decide(
        config: &SessionConfig,
        mode: Mode,
        main: &PhaseLog,
        p: &BitString,
        estimation: Option<&PhaseLog>,
    ) -> Result<Self> {
        if p.len() != main.len() || p.count_ones() != config.s {
            return Err(Error::Protocol(format!(
                "report has {} slots with {} measured, expected {} with {}",
                p.len(),
                p.count_ones(),
                main.len(),
                config.s
            )));
        }
        let mut c = BitString::with_capacity(config.s);
        let mut c_rho = 0;
        for (slot, reported) in main.slots.iter().zip(p.iter()) {
            let BellOutcome { e1, e2 } = slot.outcome;
            match reported {
                Bit::One => c.push(tc(e1, e2, slot.prep)),
                Bit::Zero => {
                    if ae(e1, e2, slot.prep) == Bit::One {
                        c_rho += 1;
                    }
                }
            }
        }
        let c_rho_prime = estimation
            .map(|log| log.slots.iter().filter(|s| s.positive()).count())
            .unwrap_or(0);

        let stats = match mode {
            Mode::Nk => DetectionStats::first_positive(c_rho, config.r)?,
            Mode::RenkKnown => {
                DetectionStats::known_rate(c_rho, config.r, config.omega, config.alpha)?
            }
            Mode::RenkUnknown => {
                let est = estimation.ok_or_else(|| {
                    Error::Protocol("unknown-rate mode requires an estimation phase".into())
                })?;
                DetectionStats::pooled(c_rho, config.r, c_rho_prime, est.len(), config.alpha)?
            }
        };
        let signals = (!stats.rejected).then(|| {
            config
                .message
                .iter()
                .zip(c.iter())
                .map(|(m, ck)| rectify_signal(m, ck))
                .collect()
        });
        Ok(AliceDecision {
            stats,
            c,
            c_rho,
            c_rho_prime,
            signals,
        })
    }
}

fn ground_truth(main: &PhaseLog, estimation: Option<&PhaseLog>) -> GroundTruth {
    let mut truth = GroundTruth::default();
    for s in &main.slots {
        let data = s.action == BobAction::Measure;
        if s.flight.attacked {
            truth.any_attack = true;
            if data {
                truth.attacked_data += 1;
            } else {
                truth.attacked_probes += 1;
            }
        }
        if s.flight.disturbed {
            truth.any_disturbance = true;
            if data {
                truth.disturbed_data += 1;
            } else {
                truth.disturbed_probes += 1;
            }
        }
    }
    if let Some(est) = estimation {
        truth.any_disturbance |= est.slots.iter().any(|s| s.flight.disturbed);
        truth.any_attack |= est.slots.iter().any(|s| s.flight.attacked);
    }
    truth
}

/// Assembles the transcript and outcome once both phases have run.
pub(crate) fn conclude(
    config: &SessionConfig,
    mode: Mode,
    main: &PhaseLog,
    p: &BitString,
    bob_u: BitString,
    estimation: Option<&PhaseLog>,
) -> Result<SessionOutcome> {
    let decision = AliceDecision::decide(config, mode, main, p, estimation)?;
    let status = match &decision.signals {
        Some(signals) => SessionStatus::Delivered {
            message: apply_signals(signals, bob_u.iter()).collect(),
        },
        None => SessionStatus::AbortedInsecure,
    };
    let transcript = Transcript {
        mode,
        seed: config.seed,
        s: config.s,
        r: config.r,
        i: main.preps(),
        p: p.clone(),
        u: bob_u,
        c: decision.c,
        e1: main.e1(),
        e2: main.e2(),
        signals: decision.signals.unwrap_or_default(),
        c_rho: decision.c_rho,
        c_rho_prime: decision.c_rho_prime,
        estimation: estimation.map(|log| EstimationRecord {
            i: log.preps(),
            e1: log.e1(),
            e2: log.e2(),
        }),
    };
    Ok(SessionOutcome {
        status,
        stats: decision.stats,
        truth: ground_truth(main, estimation),
        transcript,
    })
}

/// The all-reflect estimation phase. Eve is held off by construction.
pub(crate) fn estimation_phase(config: &SessionConfig) -> Result<PhaseLog> {
    let model = ChannelModel::new(0.0, config.omega)?;
    let mut engine = AliceEngine::new(config.seed, Phase::Estimation, model);
    for _ in 0..config.s_est {
        engine.run_slot(BobAction::Reflect)?;
    }
    Ok(engine.finish())
}

fn simulate(config: &SessionConfig, mode: Mode, model: ChannelModel) -> Result<SessionOutcome> {
    config.validate()?;
    let estimation = match mode {
        Mode::RenkUnknown => Some(estimation_phase(config)?),
        _ => None,
    };
    let p = measure_positions(config.s, config.r, config.seed);
    let mut engine = AliceEngine::new(config.seed, Phase::Main, model);
    for bit in p.iter() {
        engine.run_slot(BobAction::from_report_bit(bit))?;
    }
    debug_assert_eq!(engine.max_live(), 1);
    let main = engine.finish();
    let bob_u = main.bob_results();
    conclude(config, mode, &main, &p, bob_u, estimation.as_ref())
}

/// NK: undisturbed channel (`omega` is ignored), abort on the first
/// positive probe.
pub fn run_nk(config: &SessionConfig) -> Result<SessionOutcome> {
    let model = ChannelModel::new(config.p, 0.0)?;
    simulate(config, Mode::Nk, model)
}

/// RE-NK in the mode named by `config.mode`: count positives without early
/// abort and decide with the one-sided z-test.
pub fn run_renk(config: &SessionConfig) -> Result<SessionOutcome> {
    if config.mode == Mode::Nk {
        return Err(Error::Config(
            "run_renk needs a rate-estimating mode".into(),
        ));
    }
    let model = ChannelModel::new(config.p, config.omega)?;
    simulate(config, config.mode, model)
}

pub fn run_session(config: &SessionConfig) -> Result<SessionOutcome> {
    match config.mode {
        Mode::Nk => run_nk(config),
        Mode::RenkKnown | Mode::RenkUnknown => run_renk(config),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MradReport {
    pub positives: usize,
    pub probes: usize,
}

impl MradReport {
    pub fn detected(&self) -> bool {
        self.positives > 0
    }
}

/// `n` independent reflected probes.
pub fn run_mrad(
    n: usize,
    channel: &ChannelModel,
    streams: &mut SessionStreams,
) -> Result<MradReport> {
    if n == 0 {
        return Err(Error::ZeroCount("n"));
    }
    let mut register = AliceRegister::new();
    let mut positives = 0;
    for k in 0..n {
        if round_trip(&mut register, k, BobAction::Reflect, channel, streams)?.positive() {
            positives += 1;
        }
    }
    Ok(MradReport {
        positives,
        probes: n,
    })
}

/// Single-bit transfer: Bob measures, Alice tele-fetches and rectifies.
pub fn run_sbp(m: Bit, channel: &ChannelModel, streams: &mut SessionStreams) -> Result<Bit> {
    let mut register = AliceRegister::new();
    let res = round_trip(&mut register, 0, BobAction::Measure, channel, streams)?;
    let c = tc(res.outcome.e1, res.outcome.e2, res.prep);
    let u = res.u.expect("measured slot has a result");
    Ok(rectify_signal(m, c).apply(u))
}
