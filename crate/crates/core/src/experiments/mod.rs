//! Deterministic Monte Carlo sweeps over protocol parameters.
//!
//! Every trial draws from its own seed, derived from the sweep's base seed,
//! the grid-point index and the trial index. Trials are split into blocks and
//! run on a rayon pool; results are merged in index order, so the output is
//! independent of the worker count.

mod csv_out;
mod efficiency;

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actors::ChannelModel;
use crate::bits::BitString;
use crate::error::{check_open_unit, check_probability, Error, Result};
use crate::protocol::{run_mrad, run_renk, Mode, SessionConfig};
use crate::rng::{derive_seed, Phase, SessionStreams};
use crate::stats::{detection_probability, wilson_interval, DetectionStats};

pub use csv_out::{emit_csv, write_csv_file};
pub use efficiency::{efficiency_report, EfficiencyMode, EfficiencyReport};

const BLOCK: usize = 1024;
const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    DetectionVsR,
    AlphaSweep,
    ErrorsVsProbesUnknown,
    ErrorsVsProbesKnown,
    Efficiency,
}

/// A sweep description, as read from a JSON spec file.
///
/// Grids not used by a kind are ignored. `s_est` left empty in the error
/// sweeps means "same as `r`"; `s` is the number of data bits per session
/// (message length for [`SweepKind::Efficiency`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub r: Vec<usize>,
    #[serde(default)]
    pub s_est: Vec<usize>,
    #[serde(default)]
    pub omega: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub s: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    #[serde(default)]
    pub workers: usize,
}

fn default_trials() -> usize {
    10_000
}

impl SweepSpec {
    pub fn new(kind: SweepKind) -> Self {
        SweepSpec {
            kind,
            p: Vec::new(),
            r: Vec::new(),
            s_est: Vec::new(),
            omega: Vec::new(),
            alpha: Vec::new(),
            s: Vec::new(),
            trials: default_trials(),
            seed: 0,
            workers: 0,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 && self.kind != SweepKind::Efficiency {
            return Err(Error::ZeroCount("trials"));
        }
        let need = |name: &str, empty: bool| {
            if empty {
                Err(Error::Config(format!(
                    "{:?} sweep needs a non-empty {name} grid",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            SweepKind::DetectionVsR => {
                need("p", self.p.is_empty())?;
                need("r", self.r.is_empty())?;
            }
            SweepKind::AlphaSweep => {
                need("alpha", self.alpha.is_empty())?;
                need("p", self.p.is_empty())?;
                need("r", self.r.is_empty())?;
                need("omega", self.omega.is_empty())?;
            }
            SweepKind::ErrorsVsProbesUnknown | SweepKind::ErrorsVsProbesKnown => {
                need("p", self.p.is_empty())?;
                need("r", self.r.is_empty())?;
                need("omega", self.omega.is_empty())?;
                need("alpha", self.alpha.is_empty())?;
            }
            SweepKind::Efficiency => {
                need("s", self.s.is_empty())?;
                need("r", self.r.is_empty())?;
            }
        }
        for &p in &self.p {
            check_probability("p", p)?;
        }
        for &w in &self.omega {
            check_probability("omega", w)?;
        }
        for &a in &self.alpha {
            check_open_unit("alpha", a)?;
        }
        if self.r.contains(&0) {
            return Err(Error::ZeroCount("r"));
        }
        Ok(())
    }

    fn est_grid(&self, r: usize) -> Vec<usize> {
        if self.s_est.is_empty() {
            vec![r]
        } else {
            self.s_est.clone()
        }
    }

    fn data_bits(&self) -> usize {
        self.s.first().copied().unwrap_or(0)
    }
}

/// A single CSV cell of a grid coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(usize),
    Real(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Text(v) => f.write_str(v),
        }
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: Vec<ParamValue>,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: usize,
    pub theory: Option<f64>,
}

impl SweepRow {
    fn from_counts(
        params: Vec<ParamValue>,
        hits: usize,
        n: usize,
        theory: Option<f64>,
    ) -> Result<Self> {
        let (ci_lo, ci_hi) = wilson_interval(hits, n, CONFIDENCE)?;
        Ok(SweepRow {
            params,
            estimate: hits as f64 / n as f64,
            ci_lo,
            ci_hi,
            trials: n,
            theory,
        })
    }

    pub fn param(&self, columns: &[&str], name: &str) -> Option<&ParamValue> {
        columns
            .iter()
            .position(|c| *c == name)
            .map(|k| &self.params[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows whose `metric` column equals `metric`.
    pub fn metric_rows<'a>(&'a self, metric: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        let k = self.columns.iter().position(|c| *c == "metric");
        self.rows.iter().filter(move |row| {
            k.is_some_and(|k| matches!(&row.params[k], ParamValue::Text(m) if m == metric))
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Runs `trial(point, seed)` for every point and trial, returning per-point
/// results in trial order.
fn run_trials<P, T, F>(points: &[P], spec: &SweepSpec, trial: F) -> Result<Vec<Vec<T>>>
where
    P: Sync,
    T: Send,
    F: Fn(&P, u64) -> Result<T> + Sync,
{
    let trials = spec.trials;
    let blocks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pt| (0..trials.div_ceil(BLOCK)).map(move |b| (pt, b)))
        .collect();
    let work = || -> Result<Vec<(usize, Vec<T>)>> {
        blocks
            .par_iter()
            .map(|&(pt, b)| {
                let lo = b * BLOCK;
                let hi = ((b + 1) * BLOCK).min(trials);
                let out = (lo..hi)
                    .map(|t| trial(&points[pt], derive_seed(spec.seed, &[pt as u64, t as u64])))
                    .collect::<Result<Vec<T>>>()?;
                Ok((pt, out))
            })
            .collect()
    };
    let done = if spec.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?
    };
    let mut per_point: Vec<Vec<T>> = (0..points.len())
        .map(|_| Vec::with_capacity(trials))
        .collect();
    for (pt, out) in done {
        per_point[pt].extend(out);
    }
    Ok(per_point)
}

/// Any-positive rate of `r` reflected probes with attack rate `p`, against
/// `1 − (1 − p/2)^r`.
pub fn sweep_detection(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    if spec.kind != SweepKind::DetectionVsR {
        return Err(Error::Config(format!(
            "expected detection_vs_r, got {:?}",
            spec.kind
        )));
    }
    let points: Vec<(f64, usize)> = spec
        .p
        .iter()
        .flat_map(|&p| spec.r.iter().map(move |&r| (p, r)))
        .collect();
    let results = run_trials(&points, spec, |&(p, r), seed| {
        let model = ChannelModel::new(p, 0.0)?;
        let mut streams = SessionStreams::new(seed, Phase::Main);
        Ok(run_mrad(r, &model, &mut streams)?.detected())
    })?;
    let rows = points
        .iter()
        .zip(results)
        .map(|(&(p, r), hits)| {
            let n = hits.len();
            let k = hits.into_iter().filter(|&d| d).count();
            SweepRow::from_counts(
                vec![p.into(), r.into(), "detection".into()],
                k,
                n,
                Some(detection_probability(p, r as u32)),
            )
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        kind: spec.kind,
        columns: vec!["p", "r", "metric"],
        rows,
    })
}

/// What a session trial keeps for later decisions.
#[derive(Debug, Clone, Copy)]
struct SessionCounts {
    attacked: bool,
    c_rho: usize,
    c_rho_prime: usize,
}

#[derive(Debug, Clone, Copy)]
struct SessionPoint {
    mode: Mode,
    p: f64,
    r: usize,
    s_est: usize,
    omega: f64,
}

fn session_trial(point: &SessionPoint, data_bits: usize, seed: u64) -> Result<SessionCounts> {
    let config = SessionConfig {
        s: data_bits,
        r: point.r,
        s_est: if point.mode == Mode::RenkUnknown {
            point.s_est
        } else {
            0
        },
        p: point.p,
        omega: point.omega,
        alpha: 0.05,
        mode: point.mode,
        seed,
        message: BitString::zeros(data_bits),
    };
    let out = run_renk(&config)?;
    Ok(SessionCounts {
        attacked: out.truth.any_attack,
        c_rho: out.transcript.c_rho,
        c_rho_prime: out.transcript.c_rho_prime,
    })
}

fn decide(point: &SessionPoint, counts: &SessionCounts, alpha: f64) -> Result<bool> {
    let stats = match point.mode {
        Mode::RenkUnknown => DetectionStats::pooled(
            counts.c_rho,
            point.r,
            counts.c_rho_prime,
            point.s_est,
            alpha,
        )?,
        Mode::RenkKnown => DetectionStats::known_rate(counts.c_rho, point.r, point.omega, alpha)?,
        Mode::Nk => DetectionStats::first_positive(counts.c_rho, point.r)?,
    };
    Ok(stats.rejected)
}

/// Type A rate for attacked points (`p > 0`, over sessions Eve actually
/// touched) or Type B rate for `p = 0`. `None` when no session qualifies.
fn error_row(
    params: Vec<ParamValue>,
    point: &SessionPoint,
    trials: &[SessionCounts],
    alpha: f64,
) -> Result<Option<SweepRow>> {
    let mut n = 0;
    let mut hits = 0;
    let type_a = point.p > 0.0;
    for t in trials {
        if t.attacked != type_a {
            continue;
        }
        n += 1;
        let rejected = decide(point, t, alpha)?;
        if rejected != type_a {
            hits += 1;
        }
    }
    if n == 0 {
        return Ok(None);
    }
    let mut params = params;
    params.push(if type_a { "type_a" } else { "type_b" }.into());
    let theory = (!type_a).then_some(alpha);
    SweepRow::from_counts(params, hits, n, theory).map(Some)
}

/// Error rates against the significance level, in both RE-NK modes. The
/// same sessions are reused at every `alpha`.
pub fn sweep_alpha(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    if spec.kind != SweepKind::AlphaSweep {
        return Err(Error::Config(format!(
            "expected alpha_sweep, got {:?}",
            spec.kind
        )));
    }
    let mut points = Vec::new();
    for mode in [Mode::RenkKnown, Mode::RenkUnknown] {
        for &p in &spec.p {
            for &r in &spec.r {
                for s_est in spec.est_grid(r) {
                    for &omega in &spec.omega {
                        points.push(SessionPoint {
                            mode,
                            p,
                            r,
                            s_est,
                            omega,
                        });
                    }
                }
            }
        }
    }
    let data_bits = spec.data_bits();
    let results = run_trials(&points, spec, |pt, seed| session_trial(pt, data_bits, seed))?;
    let mut rows = Vec::new();
    for &alpha in &spec.alpha {
        for (pt, trials) in points.iter().zip(&results) {
            let params = vec![
                alpha.into(),
                pt.mode.as_str().into(),
                pt.p.into(),
                pt.r.into(),
                if pt.mode == Mode::RenkUnknown {
                    pt.s_est
                } else {
                    0
                }
                .into(),
                pt.omega.into(),
            ];
            if let Some(row) = error_row(params, pt, trials, alpha)? {
                rows.push(row);
            }
        }
    }
    Ok(SweepResult {
        kind: spec.kind,
        columns: vec!["alpha", "mode", "p", "r", "s_est", "omega", "metric"],
        rows,
    })
}

/// Error rates against the number of probing bits and the attack rate.
pub fn sweep_errors(spec: &SweepSpec, known_omega: bool) -> Result<SweepResult> {
    spec.validate()?;
    let (want, mode) = if known_omega {
        (SweepKind::ErrorsVsProbesKnown, Mode::RenkKnown)
    } else {
        (SweepKind::ErrorsVsProbesUnknown, Mode::RenkUnknown)
    };
    if spec.kind != want {
        return Err(Error::Config(format!(
            "expected {want:?}, got {:?}",
            spec.kind
        )));
    }
    let mut points = Vec::new();
    for &r in &spec.r {
        for s_est in if known_omega {
            vec![0]
        } else {
            spec.est_grid(r)
        } {
            for &p in &spec.p {
                for &omega in &spec.omega {
                    points.push(SessionPoint {
                        mode,
                        p,
                        r,
                        s_est,
                        omega,
                    });
                }
            }
        }
    }
    let data_bits = spec.data_bits();
    let results = run_trials(&points, spec, |pt, seed| session_trial(pt, data_bits, seed))?;
    let mut rows = Vec::new();
    for (pt, trials) in points.iter().zip(&results) {
        for &alpha in &spec.alpha {
            let params = vec![
                pt.r.into(),
                pt.s_est.into(),
                pt.p.into(),
                pt.omega.into(),
                alpha.into(),
                mode.as_str().into(),
            ];
            if let Some(row) = error_row(params, pt, trials, alpha)? {
                rows.push(row);
            }
        }
    }
    Ok(SweepResult {
        kind: spec.kind,
        columns: vec!["r", "s_est", "p", "omega", "alpha", "mode", "metric"],
        rows,
    })
}

/// Qubit efficiency for every message length, probe count and mode.
pub fn sweep_efficiency(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let alphas = if spec.alpha.is_empty() {
        vec![0.01]
    } else {
        spec.alpha.clone()
    };
    let mut rows = Vec::new();
    for &s in &spec.s {
        for &r in &spec.r {
            let mut modes = vec![(Mode::Nk, EfficiencyMode::Nk, 0.0)];
            for &alpha in &alphas {
                modes.push((
                    Mode::RenkKnown,
                    EfficiencyMode::Renk { alpha, s_est: 0 },
                    alpha,
                ));
                for s_est in spec.est_grid(r) {
                    modes.push((
                        Mode::RenkUnknown,
                        EfficiencyMode::Renk { alpha, s_est },
                        alpha,
                    ));
                }
            }
            for (mode, how, alpha) in modes {
                let rep = efficiency_report(s, r, how)?;
                let s_est = match how {
                    EfficiencyMode::Renk { s_est, .. } => s_est,
                    EfficiencyMode::Nk => 0,
                };
                rows.push(SweepRow {
                    params: vec![
                        mode.as_str().into(),
                        s.into(),
                        r.into(),
                        s_est.into(),
                        alpha.into(),
                        "eta".into(),
                    ],
                    estimate: rep.eta,
                    ci_lo: rep.eta,
                    ci_hi: rep.eta,
                    trials: 0,
                    theory: Some(rep.eta),
                });
            }
        }
    }
    Ok(SweepResult {
        kind: spec.kind,
        columns: vec!["mode", "s", "r", "s_est", "alpha", "metric"],
        rows,
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    match spec.kind {
        SweepKind::DetectionVsR => sweep_detection(spec),
        SweepKind::AlphaSweep => sweep_alpha(spec),
        SweepKind::ErrorsVsProbesUnknown => sweep_errors(spec, false),
        SweepKind::ErrorsVsProbesKnown => sweep_errors(spec, true),
        SweepKind::Efficiency => sweep_efficiency(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn detection_spec(p: Vec<f64>, r: Vec<usize>, trials: usize) -> SweepSpec {
        SweepSpec {
            p,
            r,
            trials,
            seed: 17,
            ..SweepSpec::new(SweepKind::DetectionVsR)
        }
    }

    #[test]
    fn detection_zero_attack_is_zero() {
        let res = sweep_detection(&detection_spec(vec![0.0], vec![1, 5, 20], 500)).unwrap();
        for row in &res.rows {
            assert_eq!(row.estimate, 0.0);
            assert_eq!(row.theory, Some(0.0));
            assert!(row.ci_lo <= row.estimate && row.estimate <= row.ci_hi);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut spec = detection_spec(vec![0.3, 0.9], vec![2, 7], 2500);
        spec.workers = 1;
        let a = sweep_detection(&spec).unwrap();
        spec.workers = 4;
        let b = sweep_detection(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_catches_missing_grids() {
        let spec = SweepSpec::new(SweepKind::DetectionVsR);
        assert!(spec.validate().is_err());
        let mut spec = detection_spec(vec![0.5], vec![3], 0);
        assert!(matches!(spec.validate(), Err(Error::ZeroCount("trials"))));
        spec.trials = 10;
        spec.p = vec![1.5];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn wrong_kind_rejected() {
        let spec = detection_spec(vec![0.5], vec![3], 10);
        assert!(sweep_alpha(&spec).is_err());
        assert!(sweep_errors(&spec, true).is_err());
    }

    #[test]
    fn error_sweep_emits_type_b_for_zero_attack() {
        let spec = SweepSpec {
            p: vec![0.0, 0.6],
            r: vec![40],
            omega: vec![0.05],
            alpha: vec![0.05],
            trials: 200,
            seed: 3,
            ..SweepSpec::new(SweepKind::ErrorsVsProbesKnown)
        };
        let res = sweep_errors(&spec, true).unwrap();
        assert_eq!(res.metric_rows("type_b").count(), 1);
        assert_eq!(res.metric_rows("type_a").count(), 1);
        let b = res.metric_rows("type_b").next().unwrap();
        assert_eq!(b.theory, Some(0.05));
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{"kind":"detection_vs_r","p":[0.6],"r":[15],"trials":100,"seed":5}"#;
        let spec: SweepSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.kind, SweepKind::DetectionVsR);
        assert_eq!(spec.workers, 0);
        assert!(
            serde_json::from_str::<SweepSpec>(r#"{"kind":"detection_vs_r","bogus":1}"#).is_err()
        );
    }
}
