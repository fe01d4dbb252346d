//! Closed state algebra for one qubit pair.
//!
//! Every state reachable in these protocols is either one of the four Bell
//! states or one of the four computational product states, so the pair is
//! tracked symbolically instead of with amplitudes. The first qubit is the
//! one Alice retains; the second is the one that travels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Bit;
use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Whether the two qubits agree under a Z measurement (`Φ±`) or
    /// disagree (`Ψ±`).
    pub const fn z_correlated(self) -> bool {
        matches!(self, BellState::PhiPlus | BellState::PhiMinus)
    }

    /// Deterministic Bell-measurement outcome `(e1, e2)`.
    pub const fn outcome(self) -> BellOutcome {
        let (e1, e2) = match self {
            BellState::PhiPlus => (Bit::Zero, Bit::Zero),
            BellState::PhiMinus => (Bit::One, Bit::Zero),
            BellState::PsiPlus => (Bit::Zero, Bit::One),
            BellState::PsiMinus => (Bit::One, Bit::One),
        };
        BellOutcome { e1, e2 }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PhiPlus => "Φ+",
            BellState::PhiMinus => "Φ-",
            BellState::PsiPlus => "Ψ+",
            BellState::PsiMinus => "Ψ-",
        })
    }
}

/// `|ab⟩` with `a` the retained qubit and `b` the travelling one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductState {
    pub a: Bit,
    pub b: Bit,
}

impl ProductState {
    pub const fn new(a: Bit, b: Bit) -> Self {
        ProductState { a, b }
    }

    pub const ALL: [ProductState; 4] = [
        ProductState::new(Bit::Zero, Bit::Zero),
        ProductState::new(Bit::Zero, Bit::One),
        ProductState::new(Bit::One, Bit::Zero),
        ProductState::new(Bit::One, Bit::One),
    ];

    /// The two equally likely Bell-measurement outcomes.
    pub const fn outcomes(self) -> [BellOutcome; 2] {
        use Bit::{One, Zero};
        let (x, y) = match (self.a, self.b) {
            (Zero, Zero) => ((Zero, Zero), (One, Zero)),
            (Zero, One) => ((Zero, One), (One, One)),
            (One, Zero) => ((Zero, One), (One, One)),
            (One, One) => ((Zero, Zero), (One, Zero)),
        };
        [
            BellOutcome { e1: x.0, e2: x.1 },
            BellOutcome { e1: y.0, e2: y.1 },
        ]
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}⟩", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "form", content = "state", rename_all = "snake_case")]
pub enum PairState {
    Bell(BellState),
    Product(ProductState),
}

impl PairState {
    pub const fn is_entangled(self) -> bool {
        matches!(self, PairState::Bell(_))
    }

    /// All eight representable states.
    pub fn all() -> impl Iterator<Item = PairState> {
        BellState::ALL
            .into_iter()
            .map(PairState::Bell)
            .chain(ProductState::ALL.into_iter().map(PairState::Product))
    }
}

impl From<BellState> for PairState {
    fn from(b: BellState) -> Self {
        PairState::Bell(b)
    }
}

impl From<ProductState> for PairState {
    fn from(p: ProductState) -> Self {
        PairState::Product(p)
    }
}

impl fmt::Display for PairState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairState::Bell(b) => write!(f, "|{b}⟩"),
            PairState::Product(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellOutcome {
    pub e1: Bit,
    pub e2: Bit,
}

impl BellOutcome {
    pub const fn new(e1: Bit, e2: Bit) -> Self {
        BellOutcome { e1, e2 }
    }
}

/// EPR source: `0 ↦ |Φ+⟩`, `1 ↦ |Ψ-⟩`.
pub const fn make_epr(i: Bit) -> PairState {
    match i {
        Bit::Zero => PairState::Bell(BellState::PhiPlus),
        Bit::One => PairState::Bell(BellState::PsiMinus),
    }
}

/// Bell measurement. Consumes the pair. Bell inputs are deterministic;
/// product inputs land on one of two outcomes with probability 1/2 each,
/// drawn from `rng`.
pub fn bell_measure(state: PairState, rng: &mut SimRng) -> BellOutcome {
    match state {
        PairState::Bell(b) => b.outcome(),
        PairState::Product(p) => {
            let [x, y] = p.outcomes();
            if rng.bit().is_one() {
                y
            } else {
                x
            }
        }
    }
}

/// Z-measures the travelling qubit of an entangled pair. Returns the outcome
/// `u` (uniform) and the collapsed product state `|partner u⟩`.
pub fn z_measure_partner(state: PairState, rng: &mut SimRng) -> Result<(Bit, ProductState)> {
    let PairState::Bell(bell) = state else {
        return Err(Error::NotEntangled);
    };
    let u = rng.bit();
    let partner = if bell.z_correlated() { u } else { !u };
    Ok((u, ProductState::new(partner, u)))
}

/// Z measurement of a qubit already in a computational basis state.
pub const fn z_measure_single(q: Bit) -> Bit {
    q
}

/// Z-measures the travelling qubit of any pair: collapses entangled pairs,
/// reads product states deterministically.
pub fn z_measure_travelling(state: PairState, rng: &mut SimRng) -> (Bit, ProductState) {
    match state {
        PairState::Bell(_) => z_measure_partner(state, rng).expect("state is entangled"),
        PairState::Product(p) => (z_measure_single(p.b), p),
    }
}
