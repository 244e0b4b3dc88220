//! Fixed-sample likelihood ratio test: matched and mismatched error
//! exponents, the Stein regime, worst-case exponents over divergence balls,
//! and the `E - sqrt(r·theta)` sensitivity expansion.
//!
//! The test compares the type statistic `D(T||ph0) - D(T||ph1)` to a
//! threshold `gamma` in nats. Both exponents are Sanov minima of relative
//! entropy over the induced half-spaces; the achievers are tilted
//! distributions, and each primal value is cross-checked by an independently
//! maximized concave dual.

use crate::divergences::{hyp_dist, kl, llr, lrt_statistic, Ball, DivergenceSpec};
use crate::simplex::ProbDist;
use crate::solver::{
    bisect, gaussian_inv_upper_tail, golden_max, minimize_over_ball, SolveOptions,
};
use crate::tilted::{
    lambda_for_mismatched_threshold, lambda_for_threshold, mismatched_tilted, tilted_lrt,
    ThresholdFlag, TOL_ROOT,
};
use crate::{Error, Hypothesis, Result};

/// Allowed primal/dual disagreement.
pub const TOL_DUAL: f64 = 1e-8;

/// Exponent pair with achievers, multipliers and degeneracy flags.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExponentReport {
    /// Type-I exponent in nats.
    pub e0: f64,
    /// Type-II exponent in nats.
    pub e1: f64,
    /// Minimizing distribution for the type-I exponent.
    #[serde(serialize_with = "ser_dist")]
    pub achiever0: ProbDist,
    /// Minimizing distribution for the type-II exponent.
    #[serde(serialize_with = "ser_dist")]
    pub achiever1: ProbDist,
    /// Tilt parameter achieving `e0`.
    pub multiplier0: f64,
    /// Tilt parameter achieving `e1`.
    pub multiplier1: f64,
    /// Independently computed dual values (must match the primals).
    pub dual0: f64,
    pub dual1: f64,
    pub flags: [ThresholdFlag; 2],
}

fn ser_dist<S: serde::Serializer>(d: &ProbDist, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(d.probs(), s)
}

/// Which theorem's expansion a sensitivity report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SensitivitySource {
    LrtMismatch,
    GlrtMismatch,
    SprtMismatch,
    LrtAdversarial,
    GlrtAdversarial,
}

/// The `E - sqrt(r·theta)` first-order description of a worst-case exponent.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SensitivityReport {
    /// Exponent at radius zero.
    pub matched_e: f64,
    /// Sensitivity coefficient, `2/alpha` units.
    pub theta: f64,
    /// Radius the approximation is evaluated at.
    pub radius: f64,
    /// `matched_e - sqrt(radius · theta)`, clamped at zero.
    pub approx_e: f64,
    pub which: SensitivitySource,
}

impl SensitivityReport {
    pub fn new(matched_e: f64, theta: f64, which: SensitivitySource) -> SensitivityReport {
        SensitivityReport { matched_e, theta, radius: 0.0, approx_e: matched_e, which }
    }

    /// The same report evaluated at radius `r`.
    pub fn at_radius(&self, r: f64) -> SensitivityReport {
        SensitivityReport {
            radius: r,
            approx_e: (self.matched_e - (r * self.theta).sqrt()).max(0.0),
            ..self.clone()
        }
    }
}

/// Dual exponent `max_{λ>=0} sign·λ·gamma - log Σ base·exp(sign·λ·c)` via an
/// independent 1-D concave maximization (not the primal root).
fn dual_exponent(base: &ProbDist, c: &[f64], gamma: f64, sign: f64) -> f64 {
    let g = |lam: f64| -> f64 {
        let mut mx = f64::NEG_INFINITY;
        for (&p, &ci) in base.probs().iter().zip(c) {
            if p > 0.0 {
                mx = mx.max(p.ln() + sign * lam * ci);
            }
        }
        let mut s = 0.0;
        for (&p, &ci) in base.probs().iter().zip(c) {
            if p > 0.0 {
                s += (p.ln() + sign * lam * ci - mx).exp();
            }
        }
        sign * lam * gamma - (mx + s.ln())
    };
    // grow the bracket until the concave dual turns over
    let mut hi = 1.0;
    while g(hi) > g(0.75 * hi) && hi < 1e8 {
        hi *= 2.0;
    }
    let (_, v) = golden_max(g, 0.0, hi, 1e-12);
    v.max(g(0.0)).max(0.0)
}

/// Matched exponent pair of the likelihood ratio test at threshold `gamma`.
///
/// Primal via the tilted achiever, dual via 1-D concave maximization; both
/// are reported so callers can audit the gap. Thresholds outside
/// `[-D(p0||p1), D(p1||p0)]` produce the degenerate zero exponent.
pub fn matched_exponents(p0: &ProbDist, p1: &ProbDist, gamma: f64) -> Result<ExponentReport> {
    let solve = lambda_for_threshold(p0, p1, gamma)?;
    let q = tilted_lrt(p0, p1, solve.lambda)?;
    let (e0, a0, f0) = match solve.flag {
        ThresholdFlag::Degenerate0 => (0.0, p0.clone(), ThresholdFlag::Degenerate0),
        ThresholdFlag::Interior => (kl(&q, p0)?, q.clone(), solve.flag),
        ThresholdFlag::Degenerate1 => {
            // threshold above the canonical range: the type-I achiever is the
            // extended tilt, reached through the unbounded mismatched solve
            let s = lambda_for_mismatched_threshold(p0, p0, p1, gamma, 0)?;
            let qx = mismatched_tilted(p0, p0, p1, s.lambda, 0)?;
            (kl(&qx, p0)?, qx, ThresholdFlag::Degenerate1)
        }
    };
    let (e1, a1, f1) = match solve.flag {
        ThresholdFlag::Degenerate1 => (0.0, p1.clone(), ThresholdFlag::Degenerate1),
        ThresholdFlag::Interior => (kl(&q, p1)?, q.clone(), solve.flag),
        ThresholdFlag::Degenerate0 => {
            let s = lambda_for_mismatched_threshold(p1, p0, p1, gamma, 1)?;
            let qx = mismatched_tilted(p1, p0, p1, s.lambda, 1)?;
            (kl(&qx, p1)?, qx, ThresholdFlag::Degenerate0)
        }
    };
    let c = llr(p1, p0);
    let dual0 = dual_exponent(p0, &c, gamma, 1.0);
    let rev: Vec<f64> = c.iter().map(|x| -x).collect();
    let dual1 = dual_exponent(p1, &rev, -gamma, 1.0);
    Ok(ExponentReport {
        e0,
        e1,
        achiever0: a0,
        achiever1: a1,
        multiplier0: solve.lambda,
        multiplier1: 1.0 - solve.lambda,
        dual0,
        dual1,
        flags: [f0, f1],
    })
}

/// Mismatched exponent pair: the data come from `(p0, p1)` but the test is
/// built from `(ph0, ph1)` with threshold `gamma_hat`.
pub fn mismatched_exponents(
    p0: &ProbDist,
    p1: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
    gamma_hat: f64,
) -> Result<ExponentReport> {
    let s0 = lambda_for_mismatched_threshold(p0, ph0, ph1, gamma_hat, 0)?;
    let s1 = lambda_for_mismatched_threshold(p1, ph0, ph1, gamma_hat, 1)?;
    let (e0, a0) = match s0.flag {
        ThresholdFlag::Interior => {
            let q = mismatched_tilted(p0, ph0, ph1, s0.lambda, 0)?;
            (kl(&q, p0)?, q)
        }
        _ => (0.0, p0.clone()),
    };
    let (e1, a1) = match s1.flag {
        ThresholdFlag::Interior => {
            let q = mismatched_tilted(p1, ph0, ph1, s1.lambda, 1)?;
            (kl(&q, p1)?, q)
        }
        _ => (0.0, p1.clone()),
    };
    let c = llr(ph1, ph0);
    let dual0 = dual_exponent(p0, &c, gamma_hat, 1.0);
    let rev: Vec<f64> = c.iter().map(|x| -x).collect();
    let dual1 = dual_exponent(p1, &rev, -gamma_hat, 1.0);
    Ok(ExponentReport {
        e0,
        e1,
        achiever0: a0,
        achiever1: a1,
        multiplier0: s0.lambda,
        multiplier1: s1.lambda,
        dual0,
        dual1,
        flags: [s0.flag, s1.flag],
    })
}

/// Threshold of the mismatched test in the Stein regime.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SteinThreshold {
    pub gamma_hat: f64,
    /// Per-sample variance of the test log-likelihood ratio under the data.
    pub variance: f64,
    /// Set when the variance vanishes; only the first-order drift term is
    /// then meaningful.
    pub degenerate_variance: bool,
}

/// `gamma_hat = D(p0||ph0) - D(p0||ph1) + sqrt(V/n)·Q^{-1}(eps)` with
/// `V = Var_{p0}(log(ph0/ph1))`: the threshold keeping the type-I error at
/// `eps` while the type-II error decays at its best exponent.
pub fn stein_threshold(
    p0: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
    n: u64,
    eps: f64,
) -> Result<SteinThreshold> {
    if n == 0 {
        return Err(Error::Domain("sample size must be >= 1".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("epsilon must be in (0, 1/2), got {eps}")));
    }
    let drift = lrt_statistic(p0, ph0, ph1); // D(p0||ph0) - D(p0||ph1)
    let variance = p0.variance(&llr(ph0, ph1));
    if variance <= 0.0 {
        return Ok(SteinThreshold { gamma_hat: drift, variance: 0.0, degenerate_variance: true });
    }
    let q_inv = gaussian_inv_upper_tail(eps)?;
    Ok(SteinThreshold {
        gamma_hat: drift + (variance / n as f64).sqrt() * q_inv,
        variance,
        degenerate_variance: false,
    })
}

/// Stein-regime type-II exponent of the mismatched test: the exponent at the
/// limiting threshold `gamma_hat = D(p0||ph0) - D(p0||ph1)`. Always at most
/// `D(p0||p1)`, with equality when the test pair is a tilt of the true pair.
pub fn stein_exponent(
    p0: &ProbDist,
    p1: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
) -> Result<f64> {
    let gamma_hat = lrt_statistic(p0, ph0, ph1);
    let rep = mismatched_exponents(p0, p1, ph0, ph1, gamma_hat)?;
    Ok(rep.e1)
}

/// Least favorable exponent of the mismatched test when the true distribution
/// for the chosen hypothesis ranges over `ball` (which must be centered at
/// that hypothesis' test distribution).
///
/// Relative entropy balls are solved by alternating the two KKT fixed-point
/// equations (tilt step for the threshold constraint, mixture step for the
/// radius constraint); other specs run projected descent on the ball with the
/// envelope gradient. Returns zero as soon as some ball member crosses the
/// threshold.
pub fn worst_case_exponent(
    ph0: &ProbDist,
    ph1: &ProbDist,
    gamma_hat: f64,
    ball: &Ball,
    hypothesis: Hypothesis,
    opts: &SolveOptions,
) -> Result<f64> {
    let center = hyp_dist(hypothesis, ph0, ph1);
    if ball.center != *center {
        return Err(Error::Usage(
            "ball must be centered at the test distribution of the chosen hypothesis".to_string(),
        ));
    }
    // orient so the problem always reads like hypothesis 0
    let (a, b, gamma) = match hypothesis {
        Hypothesis::Null => (ph0.clone(), ph1.clone(), gamma_hat),
        Hypothesis::Alternative => (ph1.clone(), ph0.clone(), -gamma_hat),
    };
    let c = llr(&b, &a);

    if ball.radius == 0.0 {
        let s = lambda_for_mismatched_threshold(&ball.center, &a, &b, gamma, 0)?;
        return match s.flag {
            ThresholdFlag::Interior => {
                let q = mismatched_tilted(&ball.center, &a, &b, s.lambda, 0)?;
                kl(&q, &ball.center)
            }
            _ => Ok(0.0),
        };
    }

    // zero branch: does any ball member already satisfy the error-side
    // inequality E_P[c] >= gamma? Maximize the linear statistic over the ball.
    let max_stat = {
        let obj = |x: &[f64]| -> (f64, Vec<f64>) {
            let v: f64 = x.iter().zip(&c).map(|(&p, &ci)| p * ci).sum();
            (-v, c.iter().map(|&ci| -ci).collect())
        };
        let res = minimize_over_ball(&obj, ball, opts)?;
        -res.value
    };
    if max_stat >= gamma {
        return Ok(0.0);
    }

    if matches!(ball.spec, DivergenceSpec::Kl | DivergenceSpec::Renyi { order: _ })
        && (ball.spec.curvature() - 1.0).abs() < 1e-12
    {
        kl_ball_worst_case(&ball.center, &c, gamma, ball.radius, opts)
    } else {
        // generic spec: descend on P with the envelope gradient -Q/P
        let obj = |x: &[f64]| -> (f64, Vec<f64>) {
            let p = ProbDist::new(
                x.iter().map(|&v| v.max(crate::simplex::SUPPORT_FLOOR)).collect::<Vec<_>>(),
            );
            let p = match p {
                Ok(p) => p,
                Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
            };
            match lambda_for_mismatched_threshold(&p, &a, &b, gamma, 0) {
                Ok(s) if s.flag == ThresholdFlag::Interior => {
                    let q = mismatched_tilted(&p, &a, &b, s.lambda, 0).unwrap();
                    let v = kl(&q, &p).unwrap();
                    let g: Vec<f64> =
                        q.probs().iter().zip(p.probs()).map(|(&qi, &pi)| -qi / pi).collect();
                    (v, g)
                }
                _ => (0.0, vec![0.0; x.len()]),
            }
        };
        let res = minimize_over_ball(&obj, ball, opts)?;
        Ok(res.value.max(0.0))
    }
}

/// KKT alternation for relative entropy balls: tilt step solves the threshold
/// constraint at fixed data distribution, mixture step restores the radius
/// constraint at fixed achiever. Falls back to ball descent if the value
/// still oscillates after 500 rounds.
fn kl_ball_worst_case(
    center: &ProbDist,
    c: &[f64],
    gamma: f64,
    r: f64,
    opts: &SolveOptions,
) -> Result<f64> {
    let mut p = center.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..500 {
        // tilt step: achiever of the inner Sanov minimum given p
        let stat_p = p.expect(c);
        if stat_p >= gamma {
            return Ok(0.0);
        }
        let g = |lam: f64| -> f64 {
            let q = tilt_along(&p, c, lam);
            q.expect(c) - gamma
        };
        let mut hi = 1.0;
        while g(hi) < 0.0 && hi < 1e9 {
            hi *= 2.0;
        }
        let lam = bisect(g, 0.0, hi, TOL_ROOT)?;
        let q = tilt_along(&p, c, lam);

        // mixture step: p on the segment [center, q] with D(center||p) = r
        let mix = |beta: f64| -> ProbDist {
            let v: Vec<f64> = center
                .probs()
                .iter()
                .zip(q.probs())
                .map(|(&cn, &qn)| (1.0 - beta) * cn + beta * qn)
                .collect();
            ProbDist::from_type(v).expect("mixture of distributions")
        };
        let d_at = |beta: f64| kl(center, &mix(beta)).unwrap_or(f64::INFINITY);
        p = if d_at(1.0) <= r {
            q.clone()
        } else {
            let beta = bisect(|b| d_at(b) - r, 0.0, 1.0, 1e-14)?;
            mix(beta)
        };
        let val = kl(&q, &p)?;
        if (val - prev).abs() < 1e-10 {
            return Ok(val);
        }
        prev = val;
    }
    // oscillation fallback: generic ball descent on the reduced objective
    let ball = Ball::new(center.clone(), DivergenceSpec::Kl, r)?;
    let obj = |x: &[f64]| -> (f64, Vec<f64>) {
        let p = match ProbDist::new(
            x.iter().map(|&v| v.max(crate::simplex::SUPPORT_FLOOR)).collect::<Vec<_>>(),
        ) {
            Ok(p) => p,
            Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
        };
        if p.expect(c) >= gamma {
            return (0.0, vec![0.0; x.len()]);
        }
        let g = |lam: f64| tilt_along(&p, c, lam).expect(c) - gamma;
        let mut hi = 1.0;
        while g(hi) < 0.0 && hi < 1e9 {
            hi *= 2.0;
        }
        let lam = bisect(g, 0.0, hi, TOL_ROOT).unwrap_or(0.0);
        let q = tilt_along(&p, c, lam);
        let v = kl(&q, &p).unwrap_or(f64::INFINITY);
        let grad: Vec<f64> = q.probs().iter().zip(p.probs()).map(|(&qi, &pi)| -qi / pi).collect();
        (v, grad)
    };
    let res = minimize_over_ball(&obj, &ball, opts)?;
    Ok(res.value.max(0.0))
}

fn tilt_along(p: &ProbDist, c: &[f64], lam: f64) -> ProbDist {
    let log_w: Vec<f64> = p
        .probs()
        .iter()
        .zip(c)
        .map(|(&pi, &ci)| if pi > 0.0 { pi.ln() + lam * ci } else { f64::NEG_INFINITY })
        .collect();
    let mx = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|&l| (l - mx).exp()).collect();
    let s: f64 = w.iter().sum();
    ProbDist::from_type(w.iter().map(|&x| x / s).collect()).expect("tilt normalizes")
}

/// Sensitivity of the mismatched likelihood ratio test: the coefficient
/// `theta_i = (2/alpha)·Var_{ph_i}(Q_λ/ph_i)` of the `sqrt(r)` worst-case
/// drop, where `Q_λ` is the matched tilt of the test pair at `gamma_hat`.
/// Equals `(2/alpha)·chi²(Q_λ||ph_i)`.
pub fn lrt_sensitivity(
    ph0: &ProbDist,
    ph1: &ProbDist,
    gamma_hat: f64,
    alpha: f64,
    hypothesis: Hypothesis,
) -> Result<SensitivityReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("curvature must be > 0, got {alpha}")));
    }
    let solve = lambda_for_threshold(ph0, ph1, gamma_hat)?;
    if solve.flag != ThresholdFlag::Interior {
        return Err(Error::Domain(format!(
            "threshold {gamma_hat} at the boundary of the achievable range; the sqrt(r) expansion is invalid at a degenerate tilt"
        )));
    }
    let q = tilted_lrt(ph0, ph1, solve.lambda)?;
    let ph = hyp_dist(hypothesis, ph0, ph1);
    let ratio: Vec<f64> = q.probs().iter().zip(ph.probs()).map(|(&a, &b)| a / b).collect();
    let theta = (2.0 / alpha) * ph.variance(&ratio);
    let matched_e = kl(&q, ph)?;
    Ok(SensitivityReport::new(matched_e, theta, SensitivitySource::LrtMismatch))
}
