use serde::{Deserialize, Serialize};

use crate::actors::{BobAction, Direction};
use crate::bits::{Bit, BitString};
use crate::error::{Error, Result};
use crate::protocol::{Mode, SessionConfig, Signal};

pub const WIRE_VERSION: &str = "sqdc-wire/1";

/// Parameters both parties must agree on before any qubit is exchanged.
/// The message and the channel model are not part of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelloParams {
    pub version: String,
    pub s: usize,
    pub r: usize,
    pub s_est: usize,
    pub mode: Mode,
    pub alpha: f64,
    pub seed: u64,
}

impl HelloParams {
    pub fn from_config(config: &SessionConfig) -> Self {
        HelloParams {
            version: WIRE_VERSION.to_owned(),
            s: config.s,
            r: config.r,
            s_est: if config.mode == Mode::RenkUnknown {
                config.s_est
            } else {
                0
            },
            mode: config.mode,
            alpha: config.alpha,
            seed: config.seed,
        }
    }

    /// Describes the first disagreement with `other`, if any.
    pub fn mismatch(&self, other: &HelloParams) -> Option<String> {
        if self.version != other.version {
            return Some(format!("version {} != {}", self.version, other.version));
        }
        let fields = [
            ("s", self.s == other.s),
            ("r", self.r == other.r),
            ("s_est", self.s_est == other.s_est),
            ("mode", self.mode == other.mode),
            ("alpha", self.alpha == other.alpha),
            ("seed", self.seed == other.seed),
        ];
        fields
            .iter()
            .find(|(_, same)| !same)
            .map(|(name, _)| format!("parameter {name} differs"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WirePhase {
    Estimation,
    Main,
}

/// Messages on the authentic classical channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassicalMessage {
    Hello {
        session: u64,
        params: HelloParams,
    },
    PhaseMark {
        session: u64,
        phase: WirePhase,
    },
    /// Bob's report: `1` = measured, `0` = reflected.
    PString {
        session: u64,
        bits: BitString,
    },
    KeepFlipList {
        session: u64,
        signals: Vec<Signal>,
    },
    /// `insecure` marks a detection verdict; otherwise the sender hit an error.
    Abort {
        session: u64,
        insecure: bool,
        reason: String,
    },
    Done {
        session: u64,
    },
}

impl ClassicalMessage {
    pub fn session(&self) -> u64 {
        match self {
            ClassicalMessage::Hello { session, .. }
            | ClassicalMessage::PhaseMark { session, .. }
            | ClassicalMessage::PString { session, .. }
            | ClassicalMessage::KeepFlipList { session, .. }
            | ClassicalMessage::Abort { session, .. }
            | ClassicalMessage::Done { session } => *session,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ClassicalMessage::Hello { .. } => "hello",
            ClassicalMessage::PhaseMark { .. } => "phase_mark",
            ClassicalMessage::PString { .. } => "p_string",
            ClassicalMessage::KeepFlipList { .. } => "keep_flip_list",
            ClassicalMessage::Abort { .. } => "abort",
            ClassicalMessage::Done { .. } => "done",
        }
    }

    /// Payload length checks against the agreed parameters.
    pub fn validate(&self, params: &HelloParams) -> Result<()> {
        match self {
            ClassicalMessage::PString { bits, .. } if bits.len() != params.s + params.r => {
                Err(Error::Protocol(format!(
                    "p_string has {} bits, expected {}",
                    bits.len(),
                    params.s + params.r
                )))
            }
            ClassicalMessage::KeepFlipList { signals, .. } if signals.len() != params.s => {
                Err(Error::Protocol(format!(
                    "keep_flip_list has {} signals, expected {}",
                    signals.len(),
                    params.s
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Stand-in for the quantum channel. Bob's intent travels with
/// `AliceToBob` (the leg he acts on); Alice's reply with `BobToAlice`
/// carries his measurement result when he measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "quantum", deny_unknown_fields)]
pub struct QuantumSimMessage {
    pub session: u64,
    pub slot: usize,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<BobAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<Bit>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Classical(ClassicalMessage),
    Quantum(QuantumSimMessage),
}

impl From<ClassicalMessage> for Frame {
    fn from(m: ClassicalMessage) -> Self {
        Frame::Classical(m)
    }
}

impl From<QuantumSimMessage> for Frame {
    fn from(m: QuantumSimMessage) -> Self {
        Frame::Quantum(m)
    }
}

impl Frame {
    pub fn session(&self) -> u64 {
        match self {
            Frame::Classical(m) => m.session(),
            Frame::Quantum(q) => q.session,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Frame::Classical(m) => m.kind(),
            Frame::Quantum(_) => "quantum",
        }
    }
}

const CLASSICAL_KINDS: [&str; 6] = [
    "hello",
    "phase_mark",
    "p_string",
    "keep_flip_list",
    "abort",
    "done",
];

/// One JSON object, no trailing newline.
pub fn encode(frame: &Frame) -> Result<String> {
    Ok(match frame {
        Frame::Classical(m) => serde_json::to_string(m)?,
        Frame::Quantum(q) => serde_json::to_string(q)?,
    })
}

pub fn decode(line: &str) -> Result<Frame> {
    let mut value: serde_json::Value = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::Decode(format!("malformed line: {e}")))?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Decode("missing kind".into()))?
        .to_owned();
    let kind = kind.as_str();
    let bad = |e: serde_json::Error| Error::Decode(format!("{kind}: {e}"));
    if kind == "quantum" {
        if let Some(obj) = value.as_object_mut() {
            obj.remove("kind");
        }
        serde_json::from_value(value)
            .map(Frame::Quantum)
            .map_err(bad)
    } else if CLASSICAL_KINDS.contains(&kind) {
        serde_json::from_value(value)
            .map(Frame::Classical)
            .map_err(bad)
    } else {
        Err(Error::Decode(format!("unknown kind {kind:?}")))
    }
}
