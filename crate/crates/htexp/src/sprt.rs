//! Sequential probability ratio test under mismatch: analytic exponents and
//! first-order stopping times, the drift-sign failure mode, the practical
//! regime where thresholds are set from the mismatched measures, exact
//! worst-case exponents over divergence balls, their sensitivity expansion,
//! and a reproducible Monte Carlo simulator.
//!
//! The test accumulates `S_n = sum log(ph0(x_i)/ph1(x_i))` and stops at the
//! first crossing of `gamma0` (decide 0) or `-gamma1` (decide 1). Only
//! exponential slopes and first-order stopping times are computed here; the
//! constant factors in front of the error probabilities are out of scope and
//! are exercised through Monte Carlo slopes instead.

use crate::divergences::{kl, llr, Ball};
use crate::lrt::{SensitivityReport, SensitivitySource};
use crate::simplex::ProbDist;
use crate::solver::{bisect, golden_min, minimize_over_ball, SolveOptions};
use crate::{Error, Hypothesis, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// A concrete sequential test: measures and positive thresholds in nats.
#[derive(Debug, Clone)]
pub struct SprtConfig {
    pub ph0: ProbDist,
    pub ph1: ProbDist,
    pub gamma0: f64,
    pub gamma1: f64,
    /// Per-trial step cap; hitting it censors the trial.
    pub step_cap: u64,
}

impl SprtConfig {
    pub fn new(ph0: ProbDist, ph1: ProbDist, gamma0: f64, gamma1: f64) -> Result<SprtConfig> {
        if !(gamma0 > 0.0 && gamma1 > 0.0) {
            return Err(Error::Domain(format!(
                "thresholds must be positive, got gamma0={gamma0}, gamma1={gamma1}"
            )));
        }
        Ok(SprtConfig { ph0, ph1, gamma0, gamma1, step_cap: 10_000_000 })
    }

    pub fn with_step_cap(mut self, cap: u64) -> SprtConfig {
        self.step_cap = cap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SprtRegime {
    /// Thresholds scaled by the true drifts; the optimal tradeoff.
    Canonical,
    /// Thresholds set from the mismatched measures; exponents shrink by the
    /// stopping-time inflation factor `eta`.
    PracticalEta,
}

/// Analytic description of a (possibly mismatched) sequential test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SprtAnalysis {
    /// Mean per-sample increment of `S_n` under the null data distribution.
    pub drift0: f64,
    /// Mean per-sample decrement under the alternative data distribution.
    pub drift1: f64,
    pub e0: f64,
    pub e1: f64,
    /// First-order expected stopping times in units of the design horizon n.
    pub expected_tau0: f64,
    pub expected_tau1: f64,
    pub regime: SprtRegime,
    pub eta: f64,
}

/// Per-sample drифts of the accumulated statistic: under data distribution
/// `p` the mean increment is `D(p||ph1) - D(p||ph0)` when `p` plays the null
/// role, and the negative of that difference with the roles of the measures
/// swapped when it plays the alternative.
pub fn drifts(p_true: &ProbDist, ph0: &ProbDist, ph1: &ProbDist) -> Result<(f64, f64)> {
    let as_h0 = kl(p_true, ph1)? - kl(p_true, ph0)?;
    let as_h1 = kl(p_true, ph0)? - kl(p_true, ph1)?;
    Ok((as_h0, as_h1))
}

fn checked_drifts(p0: &ProbDist, p1: &ProbDist, ph0: &ProbDist, ph1: &ProbDist) -> Result<(f64, f64)> {
    let (drift0, _) = drifts(p0, ph0, ph1)?;
    let (_, drift1) = drifts(p1, ph0, ph1)?;
    for (h, d) in [(0u8, drift0), (1u8, drift1)] {
        if d.abs() < 1e-14 {
            return Err(Error::ZeroDrift { hypothesis: h });
        }
        if d < 0.0 {
            return Err(Error::DriftSign { hypothesis: h, drift: d });
        }
    }
    Ok((drift0, drift1))
}

/// Canonical-regime exponents of the mismatched sequential test: thresholds
/// proportional to the true drifts keep both expected stopping times at the
/// design horizon, and the exponent product equals the matched product
/// `D(p0||p1)·D(p1||p0)`.
pub fn sprt_exponents(
    p0: &ProbDist,
    p1: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
) -> Result<SprtAnalysis> {
    let (drift0, drift1) = checked_drifts(p0, p1, ph0, ph1)?;
    let d01 = kl(p0, p1)?;
    let d10 = kl(p1, p0)?;
    Ok(SprtAnalysis {
        drift0,
        drift1,
        e0: d01 * drift1 / drift0,
        e1: d10 * drift0 / drift1,
        expected_tau0: 1.0,
        expected_tau1: 1.0,
        regime: SprtRegime::Canonical,
        eta: 1.0,
    })
}

/// Practical-regime exponents: thresholds are set from the mismatched
/// measures themselves (`gamma0 = n·D(ph0||ph1)`, `gamma1 = n·D(ph1||ph0)`),
/// the only choice available when the true pair is unknown. Stopping times
/// inflate by `1/eta` and both exponents shrink by `eta`.
pub fn sprt_exponents_practical(
    p0: &ProbDist,
    p1: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
) -> Result<SprtAnalysis> {
    let (drift0, drift1) = checked_drifts(p0, p1, ph0, ph1)?;
    let dh01 = kl(ph0, ph1)?;
    let dh10 = kl(ph1, ph0)?;
    let tau0 = dh01 / drift0;
    let tau1 = dh10 / drift1;
    let eta = 1.0 / tau0.max(tau1);
    Ok(SprtAnalysis {
        drift0,
        drift1,
        e0: kl(p0, p1)? * dh10 / drift0 * eta,
        e1: kl(p1, p0)? * dh01 / drift1 * eta,
        expected_tau0: tau0,
        expected_tau1: tau1,
        regime: SprtRegime::PracticalEta,
        eta,
    })
}

/// Practical-regime type-I exponent as a function of the data pair, the
/// objective of the worst-case optimization. Zero once either drift fails.
fn practical_exponent(
    p0: &ProbDist,
    p1: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
    ratio_matched: f64,
    hypothesis: Hypothesis,
) -> f64 {
    let drift0 = match (kl(p0, ph1), kl(p0, ph0)) {
        (Ok(a), Ok(b)) => a - b,
        _ => return 0.0,
    };
    let drift1 = match (kl(p1, ph0), kl(p1, ph1)) {
        (Ok(a), Ok(b)) => a - b,
        _ => return 0.0,
    };
    if drift0 <= 0.0 || drift1 <= 0.0 {
        return 0.0;
    }
    match hypothesis {
        Hypothesis::Null => {
            let d = kl(p0, p1).unwrap_or(f64::INFINITY);
            d * ratio_matched.min(drift1 / drift0)
        }
        Hypothesis::Alternative => {
            let d = kl(p1, p0).unwrap_or(f64::INFINITY);
            d * (1.0 / ratio_matched).min(drift0 / drift1)
        }
    }
}

/// Exact worst case of the practical-regime exponent over a pair of
/// divergence balls centered at the test measures.
///
/// The exponent depends on both data distributions, so the minimization runs
/// jointly. On a binary alphabet each ball is an interval in the Bernoulli
/// parameter: a dense grid locates the basin and coordinate golden-section
/// polishes it. Larger alphabets run alternating ball descents from several
/// starts.
pub fn sprt_worst_case_exact(
    ph0: &ProbDist,
    ph1: &ProbDist,
    ball0: &Ball,
    ball1: &Ball,
    hypothesis: Hypothesis,
    opts: &SolveOptions,
) -> Result<f64> {
    if ball0.center != *ph0 || ball1.center != *ph1 {
        return Err(Error::Usage("balls must be centered at the test measures".into()));
    }
    let ratio_matched = kl(ph1, ph0)? / kl(ph0, ph1)?;
    let obj = |p0: &ProbDist, p1: &ProbDist| -> f64 {
        practical_exponent(p0, p1, ph0, ph1, ratio_matched, hypothesis)
    };
    if ball0.radius == 0.0 && ball1.radius == 0.0 {
        return Ok(obj(ph0, ph1));
    }
    if ph0.len() == 2 {
        worst_case_k2(ph0, ph1, ball0, ball1, &obj)
    } else {
        worst_case_descent(ph0, ph1, ball0, ball1, &obj, opts)
    }
}

/// Interval of Bernoulli parameters inside a divergence ball.
fn ball_interval_k2(ball: &Ball) -> Result<(f64, f64)> {
    let c = ball.center.p(1);
    let d_at = |t: f64| -> f64 {
        let p = ProbDist::new(vec![1.0 - t, t]).unwrap();
        ball.distance_to(&p).unwrap_or(f64::INFINITY)
    };
    let r = ball.radius;
    if r == 0.0 {
        return Ok((c, c));
    }
    let eps = 1e-12;
    let lo = if d_at(eps) <= r { eps } else { bisect(|t| d_at(t) - r, eps, c, 1e-15)? };
    let hi = if d_at(1.0 - eps) <= r {
        1.0 - eps
    } else {
        bisect(|t| d_at(t) - r, c, 1.0 - eps, 1e-15)?
    };
    Ok((lo, hi))
}

fn worst_case_k2(
    ph0: &ProbDist,
    ph1: &ProbDist,
    ball0: &Ball,
    ball1: &Ball,
    obj: &dyn Fn(&ProbDist, &ProbDist) -> f64,
) -> Result<f64> {
    let (lo0, hi0) = ball_interval_k2(ball0)?;
    let (lo1, hi1) = ball_interval_k2(ball1)?;
    let f = |t0: f64, t1: f64| -> f64 {
        obj(
            &ProbDist::new(vec![1.0 - t0, t0]).unwrap(),
            &ProbDist::new(vec![1.0 - t1, t1]).unwrap(),
        )
    };
    // coarse grid to land in the right basin
    let n = 240;
    let mut best = f64::INFINITY;
    let (mut t0, mut t1) = (ph0.p(1), ph1.p(1));
    for i in 0..=n {
        let a = lo0 + (hi0 - lo0) * i as f64 / n as f64;
        for j in 0..=n {
            let b = lo1 + (hi1 - lo1) * j as f64 / n as f64;
            let v = f(a, b);
            if v < best {
                best = v;
                t0 = a;
                t1 = b;
            }
        }
    }
    if best == 0.0 {
        return Ok(0.0);
    }
    // coordinate golden-section refinement
    let pad0 = (hi0 - lo0) / n as f64;
    let pad1 = (hi1 - lo1) / n as f64;
    let mut prev = f64::INFINITY;
    for _ in 0..200 {
        let (a, _) = golden_min(|x| f(x, t1), (t0 - 2.0 * pad0).max(lo0), (t0 + 2.0 * pad0).min(hi0), 1e-14);
        t0 = a;
        let (b, v) = golden_min(|x| f(t0, x), (t1 - 2.0 * pad1).max(lo1), (t1 + 2.0 * pad1).min(hi1), 1e-14);
        t1 = b;
        if (prev - v).abs() < 1e-13 {
            break;
        }
        prev = v;
    }
    Ok(f(t0, t1).min(best))
}

fn worst_case_descent(
    ph0: &ProbDist,
    ph1: &ProbDist,
    ball0: &Ball,
    ball1: &Ball,
    obj: &dyn Fn(&ProbDist, &ProbDist) -> f64,
    opts: &SolveOptions,
) -> Result<f64> {
    // alternate numeric-gradient ball descents in each data distribution
    let mut p0 = ph0.clone();
    let mut p1 = ph1.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..60 {
        let p1_fixed = p1.clone();
        let f0 = |x: &[f64]| -> (f64, Vec<f64>) {
            numeric_value_grad(x, &|p| obj(p, &p1_fixed))
        };
        if let Ok(res) = minimize_over_ball(&f0, ball0, opts) {
            p0 = res.point;
        }
        let p0_fixed = p0.clone();
        let f1 = |x: &[f64]| -> (f64, Vec<f64>) {
            numeric_value_grad(x, &|p| obj(&p0_fixed, p))
        };
        if let Ok(res) = minimize_over_ball(&f1, ball1, opts) {
            p1 = res.point;
        }
        let v = obj(&p0, &p1);
        if (prev - v).abs() < 1e-11 {
            return Ok(v);
        }
        prev = v;
    }
    Ok(obj(&p0, &p1))
}

fn numeric_value_grad(x: &[f64], f: &dyn Fn(&ProbDist) -> f64) -> (f64, Vec<f64>) {
    let p = match ProbDist::new(
        x.iter().map(|&v| v.max(crate::simplex::SUPPORT_FLOOR)).collect::<Vec<_>>(),
    ) {
        Ok(p) => p,
        Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
    };
    let v = f(&p);
    let h = 1e-7;
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let mut bumped = p.probs().to_vec();
        bumped[i] += h;
        let s: f64 = bumped.iter().sum();
        bumped.iter_mut().for_each(|b| *b /= s);
        let pb = ProbDist::new(bumped).unwrap();
        g[i] = (f(&pb) - v) / h;
    }
    (v, g)
}

/// The three sensitivity coefficients of the sequential worst case for one
/// hypothesis, and both candidate deductions they induce.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SprtSensitivity {
    pub hypothesis: Hypothesis,
    /// `D(ph_other||ph_i) / D(ph_i||ph_other)`.
    pub rho: f64,
    /// Coefficient paired with the same-hypothesis ball radius.
    pub theta_own: f64,
    /// Coefficient paired with the other ball radius in the two-term branch.
    pub theta_cross: f64,
    /// Single-coefficient branch (the equal-radii corollary form).
    pub theta_bar: f64,
    /// Matched exponent the deduction is taken from.
    pub matched_e: f64,
}

impl SprtSensitivity {
    /// Two-branch deduction `min{ sqrt(r_i·theta_own) + sqrt(r_other·theta_cross),
    /// sqrt(r_other·theta_bar) }`.
    pub fn deduction(&self, r_own: f64, r_other: f64) -> f64 {
        let two_term = (r_own * self.theta_own).sqrt() + (r_other * self.theta_cross).sqrt();
        let single = (r_other * self.theta_bar).sqrt();
        two_term.min(single)
    }

    /// Worst-case approximation at the given radii, clamped at zero.
    pub fn approx_at(&self, r_own: f64, r_other: f64) -> f64 {
        (self.matched_e - self.deduction(r_own, r_other)).max(0.0)
    }

    /// The equal-radii corollary form as a plain sensitivity report
    /// (`theta = theta_bar`).
    pub fn corollary_report(&self) -> SensitivityReport {
        SensitivityReport::new(self.matched_e, self.theta_bar, SensitivitySource::SprtMismatch)
    }
}

/// Sensitivity coefficients of the sequential test's worst-case exponent for
/// the chosen hypothesis, each in `2/alpha` units.
pub fn sprt_sensitivity(
    ph0: &ProbDist,
    ph1: &ProbDist,
    alpha: f64,
    hypothesis: Hypothesis,
) -> Result<SprtSensitivity> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("curvature must be > 0, got {alpha}")));
    }
    if ph0 == ph1 {
        return Err(Error::Domain("test measures must differ".into()));
    }
    let (own, other) = match hypothesis {
        Hypothesis::Null => (ph0, ph1),
        Hypothesis::Alternative => (ph1, ph0),
    };
    let rho = kl(other, own)? / kl(own, other)?;
    let log_ratio = llr(own, other);
    let lin_ratio: Vec<f64> = own
        .probs()
        .iter()
        .zip(other.probs())
        .map(|(&a, &b)| a / b)
        .collect();
    let theta_own = (2.0 / alpha) * rho * rho * own.variance(&log_ratio);
    let theta_cross = (2.0 / alpha) * rho * rho * other.variance(&lin_ratio);
    let combined: Vec<f64> = log_ratio
        .iter()
        .zip(&lin_ratio)
        .map(|(&l, &t)| l + rho * t)
        .collect();
    let theta_bar = (2.0 / alpha) * other.variance(&combined);
    Ok(SprtSensitivity {
        hypothesis,
        rho,
        theta_own,
        theta_cross,
        theta_bar,
        matched_e: kl(other, own)?,
    })
}

/// Monte Carlo outcome of repeated sequential tests.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SprtSimStats {
    pub trials: u64,
    pub err_count: u64,
    pub err_rate: f64,
    pub mean_tau: f64,
    pub var_tau: f64,
    /// Trials that hit the step cap before crossing either threshold. Not
    /// counted as errors.
    pub censored: u64,
    pub seed: u64,
}

/// Simulate the sequential test `trials` times with data drawn i.i.d. from
/// `p_true`, reporting the error rate against `true_hypothesis` and
/// stopping-time statistics.
///
/// Randomness for trial `i` comes from stream `i` of a counter-based
/// generator seeded with `seed`, and the per-trial outcomes reduce through
/// integer sums, so the result is bit-identical for a fixed seed no matter
/// how many worker threads run.
pub fn simulate_sprt(
    p_true: &ProbDist,
    config: &SprtConfig,
    true_hypothesis: Hypothesis,
    trials: u64,
    seed: u64,
) -> Result<SprtSimStats> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if p_true.len() != config.ph0.len() || p_true.len() != config.ph1.len() {
        return Err(Error::Usage("data and test distributions on different alphabets".into()));
    }
    let increments = llr(&config.ph0, &config.ph1);
    let mut cdf = Vec::with_capacity(p_true.len());
    let mut acc = 0.0;
    for &p in p_true.probs() {
        acc += p;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    cdf[last] = 1.0;

    let (g0, g1, cap) = (config.gamma0, config.gamma1, config.step_cap);
    // (errors, censored, sum tau, sum tau^2) reduce associatively over u128,
    // making the aggregate independent of the parallel schedule
    let (err_count, censored, sum_tau, sum_tau2) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut s = 0.0f64;
            let mut tau = 0u64;
            let decision = loop {
                if tau >= cap {
                    break None;
                }
                let u: f64 = rng.random();
                let sym = cdf.partition_point(|&c| c < u).min(last);
                s += increments[sym];
                tau += 1;
                if s >= g0 {
                    break Some(Hypothesis::Null);
                }
                if s <= -g1 {
                    break Some(Hypothesis::Alternative);
                }
            };
            let err = match decision {
                Some(d) => u64::from(d != true_hypothesis),
                None => 0,
            };
            let cens = u64::from(decision.is_none());
            (err, cens, tau as u128, (tau as u128) * (tau as u128))
        })
        .reduce(
            || (0u64, 0u64, 0u128, 0u128),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
        );

    let n = trials as f64;
    let mean_tau = sum_tau as f64 / n;
    let var_tau = if trials > 1 {
        (sum_tau2 as f64 - n * mean_tau * mean_tau) / (n - 1.0)
    } else {
        0.0
    };
    Ok(SprtSimStats {
        trials,
        err_count,
        err_rate: err_count as f64 / n,
        mean_tau,
        var_tau,
        censored,
        seed,
    })
}

/// Least-squares slope of `-log err_rate` against the threshold, turning a
/// Monte Carlo threshold sweep into an exponent estimate.
pub fn estimate_exponent_slope(results: &[(f64, f64)]) -> Result<f64> {
    if results.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 (gamma, err_rate) points, got {}",
            results.len()
        )));
    }
    if let Some((g, _)) = results.iter().find(|(_, e)| *e <= 0.0) {
        return Err(Error::Domain(format!(
            "zero error count at gamma={g}: raise the trial count or lower the threshold"
        )));
    }
    let n = results.len() as f64;
    let mean_g: f64 = results.iter().map(|(g, _)| g).sum::<f64>() / n;
    let mean_y: f64 = results.iter().map(|(_, e)| -e.ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(g, e) in results {
        num += (g - mean_g) * (-e.ln() - mean_y);
        den += (g - mean_g) * (g - mean_g);
    }
    if den == 0.0 {
        return Err(Error::Domain("all thresholds identical".into()));
    }
    Ok(num / den)
}
