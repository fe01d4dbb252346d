//! Estimators, the one-sided z-tests and the distribution helpers they need.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_probability, Error, Result};

/// `κ̂ = 2·C_ρ / r`. May exceed 1 when more than half the probes fire.
pub fn estimate_kappa(c_rho: usize, r: usize) -> Result<f64> {
    rate_times_two("C_rho", c_rho, "r", r)
}

/// `ω̂ = 2·C'_ρ / s` over `s` estimation probes.
pub fn estimate_omega(c_rho_prime: usize, s: usize) -> Result<f64> {
    rate_times_two("C_rho_prime", c_rho_prime, "s", s)
}

fn rate_times_two(
    count_name: &'static str,
    count: usize,
    n_name: &'static str,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroCount(n_name));
    }
    if count > n {
        return Err(Error::OutOfRange {
            name: count_name,
            range: "[0, n]",
            value: count as f64,
        });
    }
    Ok(2.0 * count as f64 / n as f64)
}

/// Pooled estimate `ν̂ = 2(C'_ρ + C_ρ)/(r + s)` under `κ = ω`.
pub fn pooled_nu(c_rho: usize, c_rho_prime: usize, r: usize, s: usize) -> f64 {
    2.0 * (c_rho + c_rho_prime) as f64 / (r + s) as f64
}

/// `num / sqrt(var)` with the zero-variance convention: a non-positive
/// difference gives 0, a positive one gives `+∞` (always rejects).
fn standardize(num: f64, var: f64) -> f64 {
    if var > 0.0 {
        num / var.sqrt()
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Two-sample statistic for `H0: κ = ω` when `ω` was estimated:
/// `(κ̂ − ω̂) / sqrt(2ν̂(1 − ν̂/2)(1/r + 1/s))`. Zero when no probe fired.
pub fn z_statistic(
    kappa_hat: f64,
    omega_hat: f64,
    c_rho: usize,
    c_rho_prime: usize,
    r: usize,
    s: usize,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::ZeroCount("r"));
    }
    if s == 0 {
        return Err(Error::ZeroCount("s"));
    }
    let nu = pooled_nu(c_rho, c_rho_prime, r, s);
    if nu == 0.0 {
        return Ok(0.0);
    }
    let var = 2.0 * nu * (1.0 - nu / 2.0) * (1.0 / r as f64 + 1.0 / s as f64);
    Ok(standardize(kappa_hat - omega_hat, var))
}

/// One-sample statistic against a known disturbance rate:
/// `(κ̂ − ω) / sqrt(2κ(1 − κ/2)/r)` with `κ̂` plugged in for `κ`, or `ω`
/// when `κ̂ = 0`.
pub fn z_statistic_known(kappa_hat: f64, omega: f64, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::ZeroCount("r"));
    }
    check_probability("omega", omega)?;
    let kappa = if kappa_hat > 0.0 { kappa_hat } else { omega };
    let var = 2.0 * kappa * (1.0 - kappa / 2.0) / r as f64;
    Ok(standardize(kappa_hat - omega, var))
}

/// Probability that at least one of `r` probes fires when each qubit is
/// attacked with probability `p`: `1 − (1 − p/2)^r`.
pub fn detection_probability(p: f64, r: u32) -> f64 {
    1.0 - (1.0 - p / 2.0).powi(r as i32)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal upper tail `Pr[Z > x]`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Acklam's rational approximation to the lower-tail quantile. Relative
/// error about 1.15e-9.
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Upper-tail standard normal quantile: the `z` with `Pr[Z > z] = alpha`.
///
/// Rational approximation followed by one Halley step against the
/// erfc-based CDF.
pub fn normal_quantile(alpha: f64) -> Result<f64> {
    check_open_unit("alpha", alpha)?;
    let x = acklam_lower(alpha);
    let e = normal_cdf(x) - alpha;
    let u = e * (2.0 * PI).sqrt() * (x * x / 2.0).exp();
    let refined = x - u / (1.0 + x * u / 2.0);
    Ok(-refined)
}

/// Minimum `r` for which `B(r, κ/2)` is treated as approximately normal:
/// `max{45(1−2q)²/(q(1−q)), 14|1−6q(1−q)|/(q(1−q))}` with `q = κ/2`.
pub fn normal_approx_threshold(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::OutOfRange {
            name: "kappa",
            range: "(0, 1]",
            value: kappa,
        });
    }
    let q = kappa / 2.0;
    let v = q * (1.0 - q);
    let skew = 45.0 * (1.0 - 2.0 * q).powi(2) / v;
    let kurt = 14.0 * (1.0 - 6.0 * v).abs() / v;
    Ok(skew.max(kurt))
}

/// Whether `r` probes meet [`normal_approx_threshold`]. Advisory only.
pub fn normal_approx_valid(kappa: f64, r: usize) -> Result<bool> {
    Ok(r as f64 >= normal_approx_threshold(kappa)?)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::ZeroCount("trials"));
    }
    check_open_unit("confidence", confidence)?;
    if successes > trials {
        return Err(Error::OutOfRange {
            name: "successes",
            range: "[0, trials]",
            value: successes as f64,
        });
    }
    let z = normal_quantile((1.0 - confidence) / 2.0)?;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((lo, hi))
}

/// How the detection decision was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// NK: any positive probe aborts. `z` is the positive count and the
    /// threshold is 0.
    FirstPositive,
    /// RE-NK with `ω` estimated in a separate phase.
    Pooled,
    /// RE-NK with `ω` given.
    KnownRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub test: TestKind,
    /// Uncapped `2·C_ρ/r`, as used in the statistic.
    pub kappa_hat: f64,
    pub omega_hat: f64,
    pub nu_hat: f64,
    pub z: f64,
    pub z_alpha: f64,
    pub rejected: bool,
    /// Whether the normal approximation behind `z` meets its sample-size
    /// threshold. Informational.
    pub normal_approx_ok: bool,
}

impl DetectionStats {
    pub fn first_positive(c_rho: usize, r: usize) -> Result<Self> {
        let kappa_hat = estimate_kappa(c_rho, r)?;
        Ok(DetectionStats {
            test: TestKind::FirstPositive,
            kappa_hat,
            omega_hat: 0.0,
            nu_hat: kappa_hat,
            z: c_rho as f64,
            z_alpha: 0.0,
            rejected: c_rho > 0,
            normal_approx_ok: true,
        })
    }

    pub fn pooled(
        c_rho: usize,
        r: usize,
        c_rho_prime: usize,
        s: usize,
        alpha: f64,
    ) -> Result<Self> {
        let kappa_hat = estimate_kappa(c_rho, r)?;
        let omega_hat = estimate_omega(c_rho_prime, s)?;
        let nu_hat = pooled_nu(c_rho, c_rho_prime, r, s);
        let z = z_statistic(kappa_hat, omega_hat, c_rho, c_rho_prime, r, s)?;
        let z_alpha = normal_quantile(alpha)?;
        let normal_approx_ok = nu_hat > 0.0 && normal_approx_valid(nu_hat.min(1.0), r.min(s))?;
        Ok(DetectionStats {
            test: TestKind::Pooled,
            kappa_hat,
            omega_hat,
            nu_hat,
            z,
            z_alpha,
            rejected: z > z_alpha,
            normal_approx_ok,
        })
    }

    pub fn known_rate(c_rho: usize, r: usize, omega: f64, alpha: f64) -> Result<Self> {
        let kappa_hat = estimate_kappa(c_rho, r)?;
        let z = z_statistic_known(kappa_hat, omega, r)?;
        let z_alpha = normal_quantile(alpha)?;
        let plug = if kappa_hat > 0.0 { kappa_hat } else { omega };
        let normal_approx_ok = plug > 0.0 && normal_approx_valid(plug.min(1.0), r)?;
        Ok(DetectionStats {
            test: TestKind::KnownRate,
            kappa_hat,
            omega_hat: omega,
            nu_hat: plug,
            z,
            z_alpha,
            rejected: z > z_alpha,
            normal_approx_ok,
        })
    }

    /// `κ̂` capped at 1 for display.
    pub fn reported_kappa(&self) -> f64 {
        self.kappa_hat.min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Attack present, test accepted.
    TypeA,
    /// No attack, test rejected.
    TypeB,
    Correct,
}

impl ErrorKind {
    pub fn classify(attacked: bool, rejected: bool) -> Self {
        match (attacked, rejected) {
            (true, false) => ErrorKind::TypeA,
            (false, true) => ErrorKind::TypeB,
            _ => ErrorKind::Correct,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 40-digit arithmetic (mpmath): direct
    // evaluation for the statistics, bisection on erfc for the quantiles.
    const Z_POOLED_30_15_600: f64 = 2.279_211_529_192_759;
    const Z_KNOWN_01_005_600: f64 = 2.809_757_434_745_082;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kappa_and_omega_estimates() {
        assert_eq!(estimate_kappa(0, 60).unwrap(), 0.0);
        assert!(close(estimate_kappa(30, 600).unwrap(), 0.1, 1e-15));
        assert!(close(estimate_kappa(15, 600).unwrap(), 0.05, 1e-15));
        assert_eq!(estimate_omega(0, 40).unwrap(), 0.0);
        assert!(close(estimate_omega(15, 600).unwrap(), 0.05, 1e-15));
        assert!(matches!(estimate_kappa(1, 0), Err(Error::ZeroCount("r"))));
        assert!(matches!(estimate_omega(0, 0), Err(Error::ZeroCount("s"))));
        assert!(estimate_kappa(5, 4).is_err());
        assert_eq!(estimate_kappa(4, 4).unwrap(), 2.0);
    }

    #[test]
    fn pooled_statistic() {
        let z = z_statistic(0.1, 0.05, 30, 15, 600, 600).unwrap();
        assert!(close(z, Z_POOLED_30_15_600, 1e-12), "{z}");
        assert_eq!(z_statistic(0.0, 0.0, 0, 0, 60, 60).unwrap(), 0.0);
        assert_eq!(z_statistic(0.1, 0.1, 3, 3, 60, 60).unwrap(), 0.0);
        // All probes positive in both phases: zero variance, zero difference.
        assert_eq!(z_statistic(2.0, 2.0, 60, 60, 60, 60).unwrap(), 0.0);
        assert!(z_statistic(0.1, 0.0, 3, 0, 60, 0).is_err());
    }

    #[test]
    fn known_rate_statistic() {
        let z = z_statistic_known(0.1, 0.05, 600).unwrap();
        assert!(close(z, Z_KNOWN_01_005_600, 1e-12), "{z}");
        assert_eq!(z_statistic_known(0.05, 0.05, 600).unwrap(), 0.0);
        assert!(z_statistic_known(0.0, 0.05, 600).unwrap() < 0.0);
        assert_eq!(z_statistic_known(0.0, 0.0, 10).unwrap(), 0.0);
        // κ̂ = 2 zeroes the plug-in variance while the difference is positive.
        assert_eq!(z_statistic_known(2.0, 0.05, 10).unwrap(), f64::INFINITY);
    }

    #[test]
    fn detection_probability_values() {
        for r in 0..20 {
            assert!(close(
                detection_probability(1.0, r),
                1.0 - 0.5f64.powi(r as i32),
                1e-15
            ));
            assert_eq!(detection_probability(0.0, r), 0.0);
        }
        assert!(close(
            detection_probability(0.6, 15),
            0.995_252_438_490_057,
            1e-12
        ));
        assert!(detection_probability(0.6, 15) > 0.995);
    }

    #[test]
    fn quantile_values() {
        let table = [
            (0.1, 1.281_551_565_544_600_5),
            (0.05, 1.644_853_626_951_472_7),
            (0.025, 1.959_963_984_540_054),
            (0.01, 2.326_347_874_040_841),
            (0.001, 3.090_232_306_167_813_5),
        ];
        for (a, want) in table {
            let got = normal_quantile(a).unwrap();
            assert!(close(got, want, 1e-9), "alpha {a}: {got} vs {want}");
        }
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-15);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        for a in [0.1, 0.05, 0.01, 0.001] {
            let z = normal_quantile(a).unwrap();
            assert!(close(normal_cdf(z), 1.0 - a, 1e-6));
        }
    }

    #[test]
    fn approx_threshold() {
        assert!(close(normal_approx_threshold(1.0).unwrap(), 28.0, 1e-12));
        assert!(normal_approx_valid(1.0, 30).unwrap());
        let t = normal_approx_threshold(0.1).unwrap();
        assert!(close(t, 767.368_421_052_631_6, 1e-9), "{t}");
        assert!(!normal_approx_valid(0.1, 600).unwrap());
        assert!(normal_approx_threshold(0.0).is_err());
    }

    #[test]
    fn wilson_values() {
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(close(lo, 0.403_831_530_365_995_6, 1e-9), "{lo}");
        assert!(close(hi, 0.596_168_469_634_004_4, 1e-9), "{hi}");
        assert_eq!(wilson_interval(0, 37, 0.95).unwrap().0, 0.0);
        assert_eq!(wilson_interval(37, 37, 0.95).unwrap().1, 1.0);
        assert!(wilson_interval(0, 0, 0.95).is_err());
    }

    #[test]
    fn detection_stats_decisions() {
        let nk = DetectionStats::first_positive(0, 10).unwrap();
        assert!(!nk.rejected);
        assert!(DetectionStats::first_positive(1, 10).unwrap().rejected);

        let pooled = DetectionStats::pooled(30, 600, 15, 600, 0.05).unwrap();
        assert!(close(pooled.nu_hat, 0.075, 1e-15));
        assert!(pooled.rejected);

        let quiet = DetectionStats::pooled(0, 60, 0, 60, 0.05).unwrap();
        assert_eq!(quiet.z, 0.0);
        assert!(!quiet.rejected);

        let heavy = DetectionStats::pooled(40, 60, 0, 60, 0.05).unwrap();
        assert!(heavy.kappa_hat > 1.0);
        assert_eq!(heavy.reported_kappa(), 1.0);

        let known = DetectionStats::known_rate(0, 40, 0.05, 0.05).unwrap();
        assert!(!known.rejected);
    }

    #[test]
    fn error_classification() {
        assert_eq!(ErrorKind::classify(true, false), ErrorKind::TypeA);
        assert_eq!(ErrorKind::classify(false, true), ErrorKind::TypeB);
        assert_eq!(ErrorKind::classify(true, true), ErrorKind::Correct);
        assert_eq!(ErrorKind::classify(false, false), ErrorKind::Correct);
    }
}
