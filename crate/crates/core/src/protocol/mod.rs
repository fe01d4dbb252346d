//! Attack detection, single-bit transfer and the NK / RE-NK sessions.

mod classical;
pub(crate) mod session;
mod transcript;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{check_open_unit, check_probability, Error, Result};
use crate::stats::{DetectionStats, ErrorKind};

pub use classical::{ae, apply_signals, rectify_signal, tc, Signal};
pub use session::{
    measure_positions, run_mrad, run_nk, run_renk, run_sbp, run_session, AliceDecision,
    AliceEngine, MradReport, PhaseLog, SlotResult,
};
pub use transcript::{EstimationRecord, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Abort on the first positive probe; assumes an undisturbed channel.
    Nk,
    /// Estimate `ω` in a separate all-reflect phase, then run the pooled test.
    RenkUnknown,
    /// Test against a given `ω`.
    RenkKnown,
}

impl Mode {
    pub fn omega_known(self) -> bool {
        matches!(self, Mode::RenkKnown)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Nk => "nk",
            Mode::RenkUnknown => "renk_unknown",
            Mode::RenkKnown => "renk_known",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nk" => Ok(Mode::Nk),
            "renk_unknown" | "renk-unknown" => Ok(Mode::RenkUnknown),
            "renk_known" | "renk-known" => Ok(Mode::RenkKnown),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Everything needed to run one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Data bits.
    pub s: usize,
    /// Probing bits in the main phase.
    pub r: usize,
    /// Probing bits in the `ω` estimation phase (unknown-`ω` mode only).
    #[serde(default)]
    pub s_est: usize,
    /// Per-qubit attack probability.
    #[serde(default)]
    pub p: f64,
    /// Per-qubit disturbance probability.
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub mode: Mode,
    pub seed: u64,
    pub message: BitString,
}

fn default_alpha() -> f64 {
    0.05
}

impl SessionConfig {
    /// NK session carrying `message` with `r` probes over a clean channel.
    pub fn nk(message: BitString, r: usize, seed: u64) -> Self {
        SessionConfig {
            s: message.len(),
            r,
            s_est: 0,
            p: 0.0,
            omega: 0.0,
            alpha: default_alpha(),
            mode: Mode::Nk,
            seed,
            message,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::ZeroCount("r"));
        }
        if self.message.len() != self.s {
            return Err(Error::Config(format!(
                "message has {} bits but s = {}",
                self.message.len(),
                self.s
            )));
        }
        check_probability("p", self.p)?;
        check_probability("omega", self.omega)?;
        check_open_unit("alpha", self.alpha)?;
        if self.mode == Mode::RenkUnknown && self.s_est == 0 {
            return Err(Error::ZeroCount("s_est"));
        }
        Ok(())
    }

    pub fn slots(&self) -> usize {
        self.s + self.r
    }
}

/// What actually happened on the channel, from the flight records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Eve touched at least one main-phase qubit.
    pub any_attack: bool,
    /// The environment touched at least one qubit in either phase.
    pub any_disturbance: bool,
    pub attacked_data: usize,
    pub attacked_probes: usize,
    pub disturbed_data: usize,
    pub disturbed_probes: usize,
}

impl GroundTruth {
    pub fn data_bits_touched(&self) -> bool {
        self.attacked_data + self.disturbed_data > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SessionStatus {
    Delivered { message: BitString },
    AbortedInsecure,
    AbortedError { reason: String },
}

impl SessionStatus {
    pub fn is_delivered(&self) -> bool {
        matches!(self, SessionStatus::Delivered { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub status: SessionStatus,
    pub stats: DetectionStats,
    pub truth: GroundTruth,
    pub transcript: Transcript,
}

impl SessionOutcome {
    pub fn rejected(&self) -> bool {
        self.stats.rejected
    }

    /// Type A / Type B classification against ground truth. `None` for
    /// sessions that failed for transport reasons.
    pub fn error_kind(&self) -> Option<ErrorKind> {
        match self.status {
            SessionStatus::AbortedError { .. } => None,
            _ => Some(ErrorKind::classify(
                self.truth.any_attack,
                self.stats.rejected,
            )),
        }
    }

    pub fn recovered(&self) -> Option<&BitString> {
        match &self.status {
            SessionStatus::Delivered { message } => Some(message),
            _ => None,
        }
    }
}
