//! Deterministic random streams.
//!
//! A stream is identified by a 64-bit seed and a stream index. Every party
//! (and every physical device whose outcome is random) draws from its own
//! stream, so changing one party's strategy never shifts another party's
//! draws. This is also what lets the two-process mode reproduce the
//! in-process transcripts: each process only consumes the streams of the
//! roles it hosts.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bit;

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SimRng { inner }
    }

    /// Uniform bit.
    pub fn bit(&mut self) -> Bit {
        Bit::from_bool(self.inner.next_u32() & 1 == 1)
    }

    /// `true` with probability `p`. `p <= 0` never fires and `p >= 1` always does.
    pub fn chance(&mut self, p: f64) -> bool {
        self.inner.random::<f64>() < p
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Who consumes a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Alice's choice of preparation bits.
    Alice,
    /// Bob's choice of which qubits to measure.
    Bob,
    /// Eve's attack decisions and her Z-measurement outcomes.
    Eve,
    /// Environmental disturbance decisions and outcomes.
    Channel,
    /// Outcomes of Alice's Bell-measurement circuit.
    AliceDevice,
    /// Outcomes of Bob's Z-measurement device.
    BobDevice,
}

impl Role {
    const fn index(self) -> u64 {
        match self {
            Role::Alice => 0,
            Role::Bob => 1,
            Role::Eve => 2,
            Role::Channel => 3,
            Role::AliceDevice => 4,
            Role::BobDevice => 5,
        }
    }
}

/// Session phase; RE-NK's rate-estimation run uses streams disjoint from the
/// main run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Main,
    Estimation,
}

impl Phase {
    const fn index(self) -> u64 {
        match self {
            Phase::Main => 0,
            Phase::Estimation => 1,
        }
    }
}

pub fn stream_id(phase: Phase, role: Role) -> u64 {
    phase.index() * 8 + role.index()
}

pub fn role_rng(seed: u64, phase: Phase, role: Role) -> SimRng {
    SimRng::new(seed, stream_id(phase, role))
}

/// One stream per role for one phase of one session.
#[derive(Debug, Clone)]
pub struct SessionStreams {
    pub alice: SimRng,
    pub bob: SimRng,
    pub eve: SimRng,
    pub channel: SimRng,
    pub alice_device: SimRng,
    pub bob_device: SimRng,
}

impl SessionStreams {
    pub fn new(seed: u64, phase: Phase) -> Self {
        SessionStreams {
            alice: role_rng(seed, phase, Role::Alice),
            bob: role_rng(seed, phase, Role::Bob),
            eve: role_rng(seed, phase, Role::Eve),
            channel: role_rng(seed, phase, Role::Channel),
            alice_device: role_rng(seed, phase, Role::AliceDevice),
            bob_device: role_rng(seed, phase, Role::BobDevice),
        }
    }
}

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of indices, e.g.
/// `(base, [point, trial])` in a sweep.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(base), |acc, &k| mix64(acc ^ mix64(k)))
}
