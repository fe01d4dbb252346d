//! Quantum procedures of the two parties, the adversary and the channel.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::Bit;
use crate::error::{check_probability, Error, Result};
use crate::qstate::{self, BellOutcome, PairState, ProductState};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobAction {
    Measure,
    Reflect,
}

impl BobAction {
    /// The bit Bob reports for this slot: 1 for measured, 0 for reflected.
    pub const fn report_bit(self) -> Bit {
        match self {
            BobAction::Measure => Bit::One,
            BobAction::Reflect => Bit::Zero,
        }
    }

    pub const fn from_report_bit(b: Bit) -> Self {
        match b {
            Bit::One => BobAction::Measure,
            Bit::Zero => BobAction::Reflect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// Per-qubit attack probability `p` and disturbance probability `omega`.
///
/// Both act on the Alice→Bob leg. Disturbance is applied once per round trip:
/// on the reflect path the two legs are interchangeable, and on the measure
/// path the return qubit is a fresh `|0⟩` that a Z measurement cannot change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    p: f64,
    omega: f64,
}

impl ChannelModel {
    pub fn new(p: f64, omega: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("omega", omega)?;
        Ok(ChannelModel { p, omega })
    }

    pub const fn clean() -> Self {
        ChannelModel { p: 0.0, omega: 0.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        ChannelModel::new(p, self.omega)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        ChannelModel::new(self.p, omega)
    }

    /// Probability that a probe is attacked or disturbed.
    pub fn kappa(&self) -> f64 {
        1.0 - (1.0 - self.p) * (1.0 - self.omega)
    }
}

/// Ground truth for one transit. `eve_result` is present iff `attacked`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub slot: usize,
    pub attacked: bool,
    pub disturbed: bool,
    pub eve_result: Option<Bit>,
}

/// Alice's classical record for a slot. Not `Clone`: measuring consumes it.
#[derive(Debug, PartialEq, Eq)]
pub struct AliceSlot {
    index: usize,
    prep: Bit,
}

impl AliceSlot {
    pub fn index(&self) -> usize {
        self.index
    }

    /// The preparation bit `i_k`.
    pub fn prep(&self) -> Bit {
        self.prep
    }
}

/// The travelling qubit of slot `slot`. The joint state of the pair rides
/// along with it; the first component is Alice's retained qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InFlight {
    slot: usize,
    pair: PairState,
}

impl InFlight {
    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn pair(&self) -> PairState {
        self.pair
    }

    fn replace_travelling(self, retained: Bit, travelling: Bit) -> Self {
        InFlight {
            slot: self.slot,
            pair: ProductState::new(retained, travelling).into(),
        }
    }
}

/// Alice's one-qubit register. Tracks which slots hold a retained qubit.
#[derive(Debug, Default)]
pub struct AliceRegister {
    used: BTreeSet<usize>,
    live: BTreeSet<usize>,
    max_live: usize,
}

impl AliceRegister {
    pub fn new() -> Self {
        Self::default()
    }

    /// Picks `i_k`, produces the matching EPR pair, keeps one half and
    /// releases the other.
    pub fn send(&mut self, k: usize, rng: &mut SimRng) -> Result<(AliceSlot, InFlight)> {
        let prep = rng.bit();
        self.send_with(k, prep)
    }

    /// [`send`](Self::send) with a fixed preparation bit.
    pub fn send_with(&mut self, k: usize, prep: Bit) -> Result<(AliceSlot, InFlight)> {
        if !self.used.insert(k) {
            return Err(Error::DuplicateSlot(k));
        }
        self.live.insert(k);
        self.max_live = self.max_live.max(self.live.len());
        Ok((
            AliceSlot { index: k, prep },
            InFlight {
                slot: k,
                pair: qstate::make_epr(prep),
            },
        ))
    }

    /// Bell-measures the retained qubit together with the returned one.
    pub fn measure(
        &mut self,
        slot: AliceSlot,
        returned: InFlight,
        rng: &mut SimRng,
    ) -> Result<BellOutcome> {
        if returned.slot != slot.index {
            return Err(Error::SlotMismatch {
                expected: slot.index,
                returned: returned.slot,
            });
        }
        if !self.live.remove(&slot.index) {
            return Err(Error::UnknownSlot(slot.index));
        }
        Ok(qstate::bell_measure(returned.pair, rng))
    }

    pub fn live(&self) -> usize {
        self.live.len()
    }

    /// Largest number of simultaneously retained qubits seen so far.
    pub fn max_live(&self) -> usize {
        self.max_live
    }
}

/// Moves a qubit across the quantum channel.
///
/// On the Alice→Bob leg Eve fires with probability `p`: she Z-measures the
/// qubit and forwards a fresh basis qubit equal to her result. Independently
/// the environment fires with probability `omega` and Z-measures the qubit,
/// forwarding it unchanged. Eve acts first. The Bob→Alice leg is untouched.
pub fn channel_transit(
    qubit: InFlight,
    model: &ChannelModel,
    direction: Direction,
    eve: &mut SimRng,
    env: &mut SimRng,
) -> (InFlight, FlightRecord) {
    let mut record = FlightRecord {
        slot: qubit.slot,
        attacked: false,
        disturbed: false,
        eve_result: None,
    };
    if direction == Direction::BobToAlice {
        return (qubit, record);
    }

    let mut qubit = qubit;
    if eve.chance(model.p) {
        let (u, collapsed) = qstate::z_measure_travelling(qubit.pair, eve);
        qubit = qubit.replace_travelling(collapsed.a, u);
        record.attacked = true;
        record.eve_result = Some(u);
    }
    if env.chance(model.omega) {
        let (u, collapsed) = qstate::z_measure_travelling(qubit.pair, env);
        qubit = qubit.replace_travelling(collapsed.a, u);
        record.disturbed = true;
    }
    (qubit, record)
}

/// Bob's device. Measure: Z-measure, record `u_k`, send back a pre-prepared
/// `|0⟩`. Reflect: return the qubit as is.
pub fn bob_handle(
    qubit: InFlight,
    action: BobAction,
    device: &mut SimRng,
) -> (InFlight, Option<Bit>) {
    match action {
        BobAction::Reflect => (qubit, None),
        BobAction::Measure => {
            let (u, collapsed) = qstate::z_measure_travelling(qubit.pair, device);
            (qubit.replace_travelling(collapsed.a, Bit::Zero), Some(u))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::BellState;

    fn rngs() -> (SimRng, SimRng, SimRng, SimRng) {
        (
            SimRng::new(11, 0),
            SimRng::new(11, 1),
            SimRng::new(11, 2),
            SimRng::new(11, 3),
        )
    }

    #[test]
    fn send_uses_epr_source() {
        let mut reg = AliceRegister::new();
        let (slot, q) = reg.send_with(0, Bit::Zero).unwrap();
        assert_eq!(slot.prep(), Bit::Zero);
        assert_eq!(q.pair(), PairState::Bell(BellState::PhiPlus));
        let (_, q) = reg.send_with(1, Bit::One).unwrap();
        assert_eq!(q.pair(), PairState::Bell(BellState::PsiMinus));
    }

    #[test]
    fn duplicate_slot_rejected() {
        let mut reg = AliceRegister::new();
        reg.send_with(3, Bit::Zero).unwrap();
        assert!(matches!(
            reg.send_with(3, Bit::One),
            Err(Error::DuplicateSlot(3))
        ));
    }

    #[test]
    fn prep_bits_are_uniform() {
        let mut reg = AliceRegister::new();
        let mut r = SimRng::new(5, 0);
        let n = 10_000;
        let ones = (0..n)
            .filter(|&k| reg.send(k, &mut r).unwrap().0.prep().is_one())
            .count();
        let mean = ones as f64 / n as f64;
        assert!((mean - 0.5).abs() <= 0.02, "{mean}");
    }

    #[test]
    fn mismatched_slot_rejected() {
        let mut reg = AliceRegister::new();
        let (a, _) = reg.send_with(0, Bit::Zero).unwrap();
        let (_, qb) = reg.send_with(1, Bit::Zero).unwrap();
        let mut r = SimRng::new(0, 0);
        assert!(matches!(
            reg.measure(a, qb, &mut r),
            Err(Error::SlotMismatch {
                expected: 0,
                returned: 1
            })
        ));
    }

    #[test]
    fn clean_channel_is_transparent() {
        let (_, _, mut eve, mut env) = rngs();
        let mut reg = AliceRegister::new();
        let (_, q) = reg.send_with(0, Bit::One).unwrap();
        let (out, rec) = channel_transit(
            q,
            &ChannelModel::clean(),
            Direction::AliceToBob,
            &mut eve,
            &mut env,
        );
        assert_eq!(out, q);
        assert!(!rec.attacked && !rec.disturbed && rec.eve_result.is_none());
    }

    #[test]
    fn attack_replays_eve_result() {
        let (_, _, mut eve, mut env) = rngs();
        let model = ChannelModel::new(1.0, 0.0).unwrap();
        let mut reg = AliceRegister::new();
        for k in 0..64 {
            let (_, q) = reg.send_with(k, Bit::One).unwrap();
            let (out, rec) = channel_transit(q, &model, Direction::AliceToBob, &mut eve, &mut env);
            let u = rec.eve_result.expect("attacked");
            // Ψ- anti-correlation: Alice's side holds !u, Bob gets |u⟩.
            assert_eq!(out.pair(), PairState::Product(ProductState::new(!u, u)));
        }
    }

    #[test]
    fn return_leg_is_never_attacked() {
        let (_, _, mut eve, mut env) = rngs();
        let model = ChannelModel::new(1.0, 1.0).unwrap();
        let mut reg = AliceRegister::new();
        let (_, q) = reg.send_with(0, Bit::Zero).unwrap();
        let (out, rec) = channel_transit(q, &model, Direction::BobToAlice, &mut eve, &mut env);
        assert_eq!(out, q);
        assert!(!rec.attacked && !rec.disturbed);
    }

    #[test]
    fn disturbance_preserves_measured_value() {
        let (_, _, mut eve, mut env) = rngs();
        let model = ChannelModel::new(0.0, 1.0).unwrap();
        let mut reg = AliceRegister::new();
        let mut k = 0;
        for prep in [Bit::Zero, Bit::One] {
            let mut seen = [false; 2];
            while !(seen[0] && seen[1]) {
                let (_, q) = reg.send_with(k, prep).unwrap();
                k += 1;
                let (out, rec) =
                    channel_transit(q, &model, Direction::AliceToBob, &mut eve, &mut env);
                assert!(rec.disturbed && !rec.attacked);
                let PairState::Product(p) = out.pair() else {
                    panic!("disturbance must destroy entanglement");
                };
                seen[p.b.as_u8() as usize] = true;
                let partner = if prep == Bit::Zero { p.b } else { !p.b };
                assert_eq!(p.a, partner);
            }
        }
    }

    #[test]
    fn eve_results_are_blind_to_prep() {
        let (_, _, mut eve, mut env) = rngs();
        let model = ChannelModel::new(1.0, 0.0).unwrap();
        let n = 10_000;
        for prep in [Bit::Zero, Bit::One] {
            let mut reg = AliceRegister::new();
            let ones = (0..n)
                .filter(|&k| {
                    let (_, q) = reg.send_with(k, prep).unwrap();
                    let (_, rec) =
                        channel_transit(q, &model, Direction::AliceToBob, &mut eve, &mut env);
                    rec.eve_result.unwrap().is_one()
                })
                .count();
            let mean = ones as f64 / n as f64;
            assert!((mean - 0.5).abs() <= 0.02, "prep {prep}: {mean}");
        }
    }

    #[test]
    fn reflect_returns_same_qubit() {
        let mut dev = SimRng::new(1, 0);
        let mut reg = AliceRegister::new();
        let (slot, q) = reg.send_with(0, Bit::Zero).unwrap();
        let (back, u) = bob_handle(q, BobAction::Reflect, &mut dev);
        assert_eq!(u, None);
        let mut r = SimRng::new(1, 1);
        let o = reg.measure(slot, back, &mut r).unwrap();
        assert_eq!(o, BellOutcome::new(Bit::Zero, Bit::Zero));
    }

    #[test]
    fn measure_returns_zero_and_collapses_retained() {
        let mut dev = SimRng::new(2, 0);
        let mut reg = AliceRegister::new();
        for k in 0..64 {
            let (_, q) = reg.send_with(k, Bit::Zero).unwrap();
            let (back, u) = bob_handle(q, BobAction::Measure, &mut dev);
            let u = u.unwrap();
            assert_eq!(
                back.pair(),
                PairState::Product(ProductState::new(u, Bit::Zero))
            );
        }
    }

    #[test]
    fn measure_on_basis_qubit_is_deterministic() {
        let mut dev = SimRng::new(3, 0);
        for b in [Bit::Zero, Bit::One] {
            let q = InFlight {
                slot: 0,
                pair: ProductState::new(Bit::One, b).into(),
            };
            let (_, u) = bob_handle(q, BobAction::Measure, &mut dev);
            assert_eq!(u, Some(b));
        }
    }

    #[test]
    fn false_negative_example_occurs_half_the_time() {
        // i = 1, Eve reads 0: Alice pairs |1⟩ with the reflected |0⟩.
        let mut r = SimRng::new(4, 0);
        let n = 10_000;
        let mut negatives = 0;
        for k in 0..n {
            let mut reg = AliceRegister::new();
            let (slot, q) = reg.send_with(k, Bit::One).unwrap();
            let q = q.replace_travelling(Bit::One, Bit::Zero);
            let o = reg.measure(slot, q, &mut r).unwrap();
            assert!(o.e2.is_one());
            if o == BellOutcome::new(Bit::One, Bit::One) {
                negatives += 1;
            }
        }
        let rate = negatives as f64 / n as f64;
        assert!((rate - 0.5).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn sequential_processing_holds_one_qubit() {
        let mut reg = AliceRegister::new();
        let mut r = SimRng::new(6, 0);
        let mut dev = SimRng::new(6, 1);
        for k in 0..100 {
            let (slot, q) = reg.send(k, &mut r).unwrap();
            let (back, _) = bob_handle(q, BobAction::Reflect, &mut dev);
            reg.measure(slot, back, &mut r).unwrap();
        }
        assert_eq!(reg.max_live(), 1);
        assert_eq!(reg.live(), 0);
    }

    #[test]
    fn channel_model_validates() {
        assert!(ChannelModel::new(1.5, 0.0).is_err());
        assert!(ChannelModel::new(0.0, -0.1).is_err());
        let m = ChannelModel::new(1.0 / 9.0, 0.1).unwrap();
        assert!((m.kappa() - 0.2).abs() < 1e-12);
    }
}
