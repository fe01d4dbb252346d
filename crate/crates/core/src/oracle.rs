//! Exact enumeration over every randomness branch.
//!
//! States are unnormalized real amplitude vectors over `|00⟩, |01⟩, |10⟩,
//! |11⟩` with rational entries, and every probability is a ratio of squared
//! norms, so results come out as exact fractions. Nothing here consults the
//! measurement tables in [`crate::qstate`]; the Bell basis is built from its
//! amplitudes and the only shared fact is which outcome label the circuit
//! assigns to each Bell state.

use num_rational::Ratio;

use crate::bits::Bit;
use crate::qstate::{BellState, PairState};

pub type Prob = Ratio<i64>;

type Amps = [Prob; 4];

fn r(n: i64) -> Prob {
    Ratio::from_integer(n)
}

fn idx(a: Bit, b: Bit) -> usize {
    2 * a.as_u8() as usize + b.as_u8() as usize
}

fn norm2(v: &Amps) -> Prob {
    v.iter().map(|x| x * x).sum()
}

fn dot(x: &Amps, y: &Amps) -> Prob {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Unnormalized Bell vectors with the outcome label `(e1, e2)` the circuit
/// reports for each.
fn bell_basis() -> [(Amps, (Bit, Bit)); 4] {
    use Bit::{One, Zero};
    [
        ([r(1), r(0), r(0), r(1)], (Zero, Zero)), // Φ+
        ([r(1), r(0), r(0), r(-1)], (One, Zero)), // Φ-
        ([r(0), r(1), r(1), r(0)], (Zero, One)),  // Ψ+
        ([r(0), r(1), r(-1), r(0)], (One, One)),  // Ψ-
    ]
}

fn bell_vector(b: BellState) -> Amps {
    match b {
        BellState::PhiPlus => [r(1), r(0), r(0), r(1)],
        BellState::PhiMinus => [r(1), r(0), r(0), r(-1)],
        BellState::PsiPlus => [r(0), r(1), r(1), r(0)],
        BellState::PsiMinus => [r(0), r(1), r(-1), r(0)],
    }
}

fn amps_of(state: PairState) -> Amps {
    match state {
        PairState::Bell(b) => bell_vector(b),
        PairState::Product(p) => {
            let mut v = [r(0); 4];
            v[idx(p.a, p.b)] = r(1);
            v
        }
    }
}

fn epr(i: Bit) -> Amps {
    match i {
        Bit::Zero => bell_vector(BellState::PhiPlus),
        Bit::One => bell_vector(BellState::PsiMinus),
    }
}

/// Z measurement of the travelling (second) qubit: `(u, prob, projected)`.
fn z_measure_second(v: &Amps) -> Vec<(Bit, Prob, Amps)> {
    let total = norm2(v);
    [Bit::Zero, Bit::One]
        .into_iter()
        .filter_map(|u| {
            let mut proj = [r(0); 4];
            for a in [Bit::Zero, Bit::One] {
                proj[idx(a, u)] = v[idx(a, u)];
            }
            let p = norm2(&proj) / total;
            (p != r(0)).then_some((u, p, proj))
        })
        .collect()
}

/// Replaces the travelling qubit (currently `|from⟩`) with `|to⟩`.
fn resend_second(v: &Amps, from: Bit, to: Bit) -> Amps {
    let mut out = [r(0); 4];
    for a in [Bit::Zero, Bit::One] {
        out[idx(a, to)] = v[idx(a, from)];
    }
    out
}

fn bell_measure(v: &Amps) -> Vec<((Bit, Bit), Prob)> {
    let total = norm2(v);
    bell_basis()
        .into_iter()
        .filter_map(|(beta, label)| {
            let amp = dot(&beta, v);
            let p = amp * amp / (norm2(&beta) * total);
            (p != r(0)).then_some((label, p))
        })
        .collect()
}

/// Exact Bell-measurement distribution of any representable pair state.
pub fn bell_distribution(state: PairState) -> Vec<((Bit, Bit), Prob)> {
    bell_measure(&amps_of(state))
}

/// Exact probability that one reflected probe reads positive when Eve
/// attacks with probability `p` and the environment disturbs with
/// probability `omega`.
pub fn probe_positive_probability(p: Prob, omega: Prob) -> Prob {
    probe_branches(p, omega)
        .into_iter()
        .filter(|&(positive, _)| positive)
        .map(|(_, w)| w)
        .sum()
}

/// Every leaf of one probe's tree as `(positive, weight)`.
fn probe_branches(p: Prob, omega: Prob) -> Vec<(bool, Prob)> {
    let half = Ratio::new(1, 2);
    let mut leaves = Vec::new();
    for i in [Bit::Zero, Bit::One] {
        // Eve's branch.
        let mut after_eve: Vec<(Prob, Amps)> = Vec::new();
        if p != r(0) {
            for (u, pu, proj) in z_measure_second(&epr(i)) {
                after_eve.push((half * p * pu, resend_second(&proj, u, u)));
            }
        }
        if p != r(1) {
            after_eve.push((half * (r(1) - p), epr(i)));
        }
        // Environment's branch.
        let mut after_env: Vec<(Prob, Amps)> = Vec::new();
        for (w, v) in after_eve {
            if omega != r(0) {
                for (_, pu, proj) in z_measure_second(&v) {
                    after_env.push((w * omega * pu, proj));
                }
            }
            if omega != r(1) {
                after_env.push((w * (r(1) - omega), v));
            }
        }
        // Bob reflects; Alice Bell-measures and examines.
        for (w, v) in after_env {
            for ((e1, e2), pe) in bell_measure(&v) {
                let positive = !(e1 == i && e2 == i);
                leaves.push((positive, w * pe));
            }
        }
    }
    leaves
}

/// Exact probability that at least one of `n` probes reads positive, found
/// by walking the full product tree of all `n` probes.
pub fn mrad_detection_probability(n: usize, p: Prob, omega: Prob) -> Prob {
    let leaves = probe_branches(p, omega);
    fn walk(depth: usize, fired: bool, weight: Prob, leaves: &[(bool, Prob)]) -> Prob {
        if depth == 0 {
            return if fired { weight } else { r(0) };
        }
        leaves
            .iter()
            .map(|&(pos, w)| walk(depth - 1, fired || pos, weight * w, leaves))
            .sum()
    }
    walk(n, false, r(1), &leaves)
}

/// One reachable `(e1, e2, i) → u` row of the tele-fetch rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TcRow {
    pub e1: Bit,
    pub e2: Bit,
    pub i: Bit,
    pub u: Bit,
}

/// Enumerates the measured path (EPR source, Bob's Z measurement, fresh
/// `|0⟩` back, Bell measurement) and records which `u` each reachable
/// `(e1, e2, i)` implies. Returns `None` if some triple is ambiguous.
pub fn tc_table() -> Option<Vec<TcRow>> {
    let mut rows: Vec<TcRow> = Vec::new();
    for i in [Bit::Zero, Bit::One] {
        for (u, _, proj) in z_measure_second(&epr(i)) {
            let returned = resend_second(&proj, u, Bit::Zero);
            for ((e1, e2), _) in bell_measure(&returned) {
                if let Some(existing) = rows.iter().find(|t| t.e1 == e1 && t.e2 == e2 && t.i == i) {
                    if existing.u != u {
                        return None;
                    }
                } else {
                    rows.push(TcRow { e1, e2, i, u });
                }
            }
        }
    }
    rows.sort();
    Some(rows)
}
