use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EfficiencyMode {
    Nk,
    /// Each Type B rejection restarts the session, so on average
    /// `1/(1 − alpha)` attempts are needed. `s_est` is 0 when `ω` is known.
    Renk {
        alpha: f64,
        s_est: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub message_bits: usize,
    /// Expected qubits Alice sends, including restarts.
    pub qubits_sent: f64,
    pub eta: f64,
    pub restart_factor: f64,
}

/// `η = message length / qubits sent by Alice`.
pub fn efficiency_report(s: usize, r: usize, mode: EfficiencyMode) -> Result<EfficiencyReport> {
    if s == 0 {
        return Err(Error::ZeroCount("s"));
    }
    let (per_attempt, restart_factor) = match mode {
        EfficiencyMode::Nk => ((s + r) as f64, 1.0),
        EfficiencyMode::Renk { alpha, s_est } => {
            check_open_unit("alpha", alpha)?;
            ((s + r + s_est) as f64, 1.0 / (1.0 - alpha))
        }
    };
    let qubits_sent = per_attempt * restart_factor;
    Ok(EfficiencyReport {
        message_bits: s,
        qubits_sent,
        eta: s as f64 / qubits_sent,
        restart_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nk_efficiency() {
        let rep = efficiency_report(1_000_000, 15, EfficiencyMode::Nk).unwrap();
        assert!((rep.eta - 0.999_985_000_224_996_6).abs() < 1e-12);
        assert_eq!(rep.restart_factor, 1.0);
    }

    #[test]
    fn renk_known_efficiency() {
        let rep = efficiency_report(
            1_000_000,
            40,
            EfficiencyMode::Renk {
                alpha: 0.01,
                s_est: 0,
            },
        )
        .unwrap();
        assert!(
            (rep.eta - 0.989_960_401_583_936_6).abs() < 1e-12,
            "{}",
            rep.eta
        );
    }

    #[test]
    fn empty_message_rejected() {
        assert!(efficiency_report(0, 15, EfficiencyMode::Nk).is_err());
    }

    #[test]
    fn eta_in_unit_interval() {
        for s in [1, 10, 1000] {
            for r in [0, 1, 60] {
                let rep = efficiency_report(
                    s,
                    r,
                    EfficiencyMode::Renk {
                        alpha: 0.1,
                        s_est: r,
                    },
                )
                .unwrap();
                assert!(rep.eta > 0.0 && rep.eta <= 1.0);
            }
        }
    }
}
