use serde::{Deserialize, Serialize};

use crate::bits::{Bit, BitString};
use crate::error::{Error, Result};

use super::classical::{ae, tc, Signal};
use super::Mode;

/// Alice's record of the all-reflect rate-estimation phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimationRecord {
    pub i: BitString,
    pub e1: BitString,
    pub e2: BitString,
}

/// Per-session record, serialized as a single JSON line.
///
/// `p` uses 1 for a measured (data) slot and 0 for a reflected (probe) slot.
/// `signals` is empty when the session aborted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub mode: Mode,
    pub seed: u64,
    pub s: usize,
    pub r: usize,
    pub i: BitString,
    pub p: BitString,
    pub u: BitString,
    pub c: BitString,
    pub e1: BitString,
    pub e2: BitString,
    pub signals: Vec<Signal>,
    pub c_rho: usize,
    pub c_rho_prime: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimation: Option<EstimationRecord>,
}

impl Transcript {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line.trim_end())?)
    }

    /// Replays Alice's classical checks from the recorded strings and
    /// verifies the stored counters and `c` against them.
    pub fn audit(&self) -> Result<()> {
        let n = self.s + self.r;
        for (name, len) in [
            ("i", self.i.len()),
            ("p", self.p.len()),
            ("e1", self.e1.len()),
            ("e2", self.e2.len()),
        ] {
            if len != n {
                return Err(audit_err(format!("|{name}| = {len}, expected {n}")));
            }
        }
        if self.p.count_ones() != self.s {
            return Err(audit_err(format!(
                "p marks {} measured slots, expected {}",
                self.p.count_ones(),
                self.s
            )));
        }
        if self.u.len() != self.s || self.c.len() != self.s {
            return Err(audit_err("u and c must have length s".into()));
        }
        if !self.signals.is_empty() && self.signals.len() != self.s {
            return Err(audit_err("signals must be empty or have length s".into()));
        }

        let mut c = BitString::with_capacity(self.s);
        let mut c_rho = 0;
        for k in 0..n {
            let (e1, e2, i) = (self.e1[k], self.e2[k], self.i[k]);
            if self.p[k] == Bit::One {
                c.push(tc(e1, e2, i));
            } else if ae(e1, e2, i) == Bit::One {
                c_rho += 1;
            }
        }
        if c != self.c {
            return Err(audit_err("c does not match tele-fetch replay".into()));
        }
        if c_rho != self.c_rho {
            return Err(audit_err(format!(
                "c_rho = {}, replay gives {c_rho}",
                self.c_rho
            )));
        }

        let replayed_prime = match &self.estimation {
            Some(est) => {
                if est.i.len() != est.e1.len() || est.i.len() != est.e2.len() {
                    return Err(audit_err("estimation strings differ in length".into()));
                }
                (0..est.i.len())
                    .filter(|&k| ae(est.e1[k], est.e2[k], est.i[k]) == Bit::One)
                    .count()
            }
            None => 0,
        };
        if replayed_prime != self.c_rho_prime {
            return Err(audit_err(format!(
                "c_rho_prime = {}, replay gives {replayed_prime}",
                self.c_rho_prime
            )));
        }
        Ok(())
    }
}

fn audit_err(msg: String) -> Error {
    Error::Protocol(format!("transcript audit: {msg}"))
}
