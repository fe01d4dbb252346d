//! Seeded simulator for entanglement-based semi-quantum direct communication.
//!
//! Alice holds a one-qubit register, an EPR source and a Bell-measurement
//! circuit. Bob can only reflect a qubit or measure it in the Z basis and send
//! back a pre-prepared `|0⟩`. On top of that hardware the crate implements:
//!
//! - [`qstate`]: the closed eight-state algebra (four Bell states plus four
//!   computational product states) with Bell and Z measurements.
//! - [`actors`]: Alice's and Bob's quantum procedures, the measure-and-replay
//!   adversary and the disturbing channel.
//! - [`protocol`]: attack detection by reflected probes, the single-bit
//!   transfer, the NK session and its rate-estimating RE-NK variant.
//! - [`stats`]: estimators, the one-sided z-tests, closed-form detection
//!   probability, the normal quantile and Wilson intervals.
//! - [`experiments`]: deterministic Monte Carlo sweeps with CSV output.
//! - [`transport`]: the newline-delimited JSON wire protocol and the
//!   two-process session mode over TCP or in-memory queues.
//! - [`oracle`]: exact brute-force enumeration over every randomness branch,
//!   computed with amplitude vectors instead of the lookup tables.
//!
//! All randomness flows through [`rng::SessionStreams`], so a seed fully
//! determines a session.

pub mod actors;
pub mod bits;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod protocol;
pub mod qstate;
pub mod rng;
pub mod stats;
pub mod transport;

pub use bits::{Bit, BitString};
pub use error::{Error, Result};
pub use protocol::{Mode, SessionConfig, SessionOutcome, SessionStatus, Transcript};
