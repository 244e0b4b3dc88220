//! Exponential-family (tilted) distributions and the threshold-to-parameter
//! root solves that select the achieving distribution in every exponent
//! formula.
//!
//! One parametrization note: for the Hoeffding tilt the literature writes the
//! exponent of the null distribution both as `mu/(1+mu)` and `mu/(1-mu)`
//! depending on the display. We parametrize directly by that exponent
//! `s in [0, 1)`, `Q_s ∝ p0^s · p1^(1-s)`, and provide converters for both
//! `mu` conventions: `s = mu/(1+mu)` gives `mu = s/(1-s)`, and `s = mu/(1-mu)`
//! gives `mu = s/(1+s)`.

use crate::divergences::{kl, llr, lrt_statistic};
use crate::simplex::ProbDist;
use crate::solver::bisect;
use crate::{Error, Result};

/// Residual tolerance for the threshold root solves.
pub const TOL_ROOT: f64 = 1e-11;

/// Outcome flag of a threshold-to-parameter solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ThresholdFlag {
    /// Threshold interior to the achievable range; the root equation holds.
    Interior,
    /// Threshold at or below the lower end: parameter 0, exponent 0.
    Degenerate0,
    /// Threshold at or above the upper end: parameter at its cap.
    Degenerate1,
}

/// A solved tilt parameter together with its degeneracy flag.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSolve {
    pub lambda: f64,
    pub flag: ThresholdFlag,
}

/// Variants of the one-parameter families used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiltVariant {
    /// `Q ∝ p0^(1-λ) p1^λ`, `λ in [0,1]`.
    Matched,
    /// `Q ∝ p0^s p1^(1-s)`, `s in [0,1)`.
    HoeffdingExp,
    /// `Q ∝ p_true (p1/p0)^λ`, `λ >= 0`.
    MismatchedH0,
    /// `Q ∝ p_true (p0/p1)^λ`, `λ >= 0`.
    MismatchedH1,
}

/// A tilted exponential family pinned to a base pair.
#[derive(Debug, Clone)]
pub struct TiltedFamily {
    pub base0: ProbDist,
    pub base1: ProbDist,
    pub variant: TiltVariant,
}

impl TiltedFamily {
    pub fn new(base0: ProbDist, base1: ProbDist, variant: TiltVariant) -> TiltedFamily {
        TiltedFamily { base0, base1, variant }
    }

    /// Member at parameter value `t`.
    pub fn member(&self, t: f64) -> Result<ProbDist> {
        match self.variant {
            TiltVariant::Matched => tilted_lrt(&self.base0, &self.base1, t),
            TiltVariant::HoeffdingExp => tilted_hoeffding(&self.base0, &self.base1, t),
            TiltVariant::MismatchedH0 => {
                mismatched_tilted(&self.base0, &self.base0, &self.base1, t, 0)
            }
            TiltVariant::MismatchedH1 => {
                mismatched_tilted(&self.base1, &self.base0, &self.base1, t, 1)
            }
        }
    }
}

/// Convert the Hoeffding exponent `s = mu/(1+mu)` back to `mu`.
pub fn hoeffding_mu_plus(s: f64) -> f64 {
    s / (1.0 - s)
}

/// Convert the Hoeffding exponent `s = mu/(1-mu)` back to `mu`.
pub fn hoeffding_mu_minus(s: f64) -> f64 {
    s / (1.0 + s)
}

/// Normalized geometric mixture with log-space accumulation.
fn normalized_exp(log_w: &[f64]) -> ProbDist {
    let mx = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|&l| (l - mx).exp()).collect();
    let s: f64 = w.iter().sum();
    ProbDist::from_type(w.iter().map(|&x| x / s).collect()).expect("normalized tilt")
}

/// The likelihood-ratio tilt `Q_λ ∝ p0^(1-λ) p1^λ` for `λ in [0,1]`.
pub fn tilted_lrt(p0: &ProbDist, p1: &ProbDist, lambda: f64) -> Result<ProbDist> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("matched tilt needs λ in [0,1], got {lambda}")));
    }
    let log_w: Vec<f64> = p0
        .probs()
        .iter()
        .zip(p1.probs())
        .map(|(&a, &b)| (1.0 - lambda) * a.ln() + lambda * b.ln())
        .collect();
    Ok(normalized_exp(&log_w))
}

/// The Hoeffding tilt `Q_s ∝ p0^s p1^(1-s)` for `s in [0,1)`.
pub fn tilted_hoeffding(p0: &ProbDist, p1: &ProbDist, s: f64) -> Result<ProbDist> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("Hoeffding tilt needs s in [0,1), got {s}")));
    }
    tilted_lrt(p1, p0, s)
}

/// The mismatched tilt: `hypothesis 0` gives `Q ∝ p_true (p1/p0)^λ`,
/// `hypothesis 1` gives `Q ∝ p_true (p0/p1)^λ`, `λ >= 0`.
pub fn mismatched_tilted(
    p_true: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
    lambda: f64,
    hypothesis: u8,
) -> Result<ProbDist> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("mismatched tilt needs λ >= 0, got {lambda}")));
    }
    let sign = match hypothesis {
        0 => 1.0,
        1 => -1.0,
        h => return Err(Error::Usage(format!("hypothesis must be 0 or 1, got {h}"))),
    };
    let c = llr(ph1, ph0);
    let log_w: Vec<f64> = p_true
        .probs()
        .iter()
        .zip(&c)
        .map(|(&p, &ci)| p.ln() + sign * lambda * ci)
        .collect();
    Ok(normalized_exp(&log_w))
}

/// Solve `D(Q_λ||p0) - D(Q_λ||p1) = gamma` for the matched tilt parameter.
///
/// The statistic is strictly increasing in `λ`, so the interior root is
/// unique. Thresholds outside `[-D(p0||p1), D(p1||p0)]` return the clamped
/// endpoint with a degeneracy flag instead of failing, matching the zero
/// exponent branches of the fixed-sample test.
pub fn lambda_for_threshold(p0: &ProbDist, p1: &ProbDist, gamma: f64) -> Result<ThresholdSolve> {
    let lo = -kl(p0, p1)?;
    let hi = kl(p1, p0)?;
    if gamma <= lo {
        return Ok(ThresholdSolve { lambda: 0.0, flag: ThresholdFlag::Degenerate0 });
    }
    if gamma >= hi {
        return Ok(ThresholdSolve { lambda: 1.0, flag: ThresholdFlag::Degenerate1 });
    }
    let g = |lam: f64| -> f64 { lrt_statistic(&tilted_lrt(p0, p1, lam).unwrap(), p0, p1) - gamma };
    debug_assert!(g(0.0) <= 0.0 && g(1.0) >= 0.0, "statistic not bracketed on [0,1]");
    let lambda = bisect(g, 0.0, 1.0, TOL_ROOT)?;
    Ok(ThresholdSolve { lambda, flag: ThresholdFlag::Interior })
}

/// Solve the mismatched threshold equation
/// `D(Q̂_λ||ph0) - D(Q̂_λ||ph1) = gamma_hat` for `λ >= 0`.
///
/// Hypothesis 0 is feasible when the true distribution sits on the accepting
/// side, `D(p_true||ph0) - D(p_true||ph1) <= gamma_hat`; otherwise the
/// exponent is zero and the solve reports `Degenerate0`. Hypothesis 1
/// mirrors this with the inequality reversed.
pub fn lambda_for_mismatched_threshold(
    p_true: &ProbDist,
    ph0: &ProbDist,
    ph1: &ProbDist,
    gamma_hat: f64,
    hypothesis: u8,
) -> Result<ThresholdSolve> {
    let stat_true = lrt_statistic(p_true, ph0, ph1);
    let sign = match hypothesis {
        0 => 1.0,
        1 => -1.0,
        h => return Err(Error::Usage(format!("hypothesis must be 0 or 1, got {h}"))),
    };
    // degenerate branch: p_true already violates the test's accept region
    if sign * (gamma_hat - stat_true) <= 0.0 {
        return Ok(ThresholdSolve { lambda: 0.0, flag: ThresholdFlag::Degenerate0 });
    }
    let c = llr(ph1, ph0);
    let c_max = c
        .iter()
        .zip(p_true.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(&ci, _)| sign * ci)
        .fold(f64::NEG_INFINITY, f64::max);
    if sign * gamma_hat >= c_max {
        return Err(Error::Domain(format!(
            "threshold {gamma_hat} at or beyond the achievable statistic range; the decision region has empty interior"
        )));
    }
    let g = |lam: f64| -> f64 {
        let q = mismatched_tilted(p_true, ph0, ph1, lam, hypothesis).unwrap();
        sign * (lrt_statistic(&q, ph0, ph1) - gamma_hat)
    };
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::NoConvergence {
                residual: g(hi).abs(),
                iters: 0,
                best_value: hi,
                best_point: vec![],
            });
        }
    }
    let lambda = bisect(g, 0.0, hi, TOL_ROOT)?;
    Ok(ThresholdSolve { lambda, flag: ThresholdFlag::Interior })
}
