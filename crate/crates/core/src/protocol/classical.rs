//! Alice's classical post-processing: examine, tele-fetch and rectify.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Bit;

/// Attack check on a reflected probe: 0 iff `e1 = e2 = i`, otherwise 1
/// (a positive detection).
pub fn ae(e1: Bit, e2: Bit, i: Bit) -> Bit {
    Bit::from_bool(!(e1 == i && e2 == i))
}

/// Recovers Bob's Z-measurement result on a measured slot.
///
/// Alice's retained qubit is read off `e2` (`00`/`10` mean `|0⟩`, `01`/`11`
/// mean `|1⟩`); for `|Φ+⟩` Bob saw the same value, for `|Ψ-⟩` the opposite.
pub fn tc(e1: Bit, e2: Bit, i: Bit) -> Bit {
    let _ = e1;
    let retained = e2;
    retained ^ i
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Signal {
    Keep,
    Flip,
}

impl Signal {
    pub fn apply(self, u: Bit) -> Bit {
        match self {
            Signal::Keep => u,
            Signal::Flip => !u,
        }
    }

    pub fn toggled(self) -> Signal {
        match self {
            Signal::Keep => Signal::Flip,
            Signal::Flip => Signal::Keep,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signal::Keep => "KEEP",
            Signal::Flip => "FLIP",
        })
    }
}

/// KEEP when Alice's copy `c` already equals the message bit `m`.
pub fn rectify_signal(m: Bit, c: Bit) -> Signal {
    if c == m {
        Signal::Keep
    } else {
        Signal::Flip
    }
}

/// Bob's side of rectification over a whole string.
pub fn apply_signals<'a>(
    signals: &'a [Signal],
    u: impl IntoIterator<Item = Bit> + 'a,
) -> impl Iterator<Item = Bit> + 'a {
    signals.iter().zip(u).map(|(s, b)| s.apply(b))
}
