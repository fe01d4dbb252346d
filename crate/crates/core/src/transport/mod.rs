//! Two-process sessions over a newline-delimited JSON wire.
//!
//! Each line is one JSON object with a `kind` field: `hello`, `phase_mark`,
//! `p_string`, `keep_flip_list`, `abort`, `done` for the classical channel
//! and `quantum` for the simulated quantum hop. Every message carries the
//! session id fixed by Bob's `hello`.
//!
//! Message order: hello (Bob) / hello (Alice); in unknown-`ω` mode a
//! `phase_mark` for the estimation phase and `s_est` quantum round trips;
//! a `phase_mark` for the main phase and `s + r` quantum round trips;
//! `p_string` (Bob); `keep_flip_list` or `abort` (Alice); `done` (Bob).
//! Anything else aborts the session with an error status.
//!
//! The channel is assumed authentic. [`TamperEndpoint`] shows what breaks
//! when it is not.

mod endpoint;
mod party;
mod wire;

pub use endpoint::{memory_pair, Endpoint, MemoryEndpoint, TamperEndpoint, TcpEndpoint};
pub use party::{
    connect_bob, run_alice, run_bob, serve_alice, serve_sessions, AliceOutcome, BobOutcome,
    DEFAULT_TIMEOUT,
};
pub use wire::{
    decode, encode, ClassicalMessage, Frame, HelloParams, QuantumSimMessage, WirePhase,
    WIRE_VERSION,
};
