//! The divergence zoo: relative entropy, Rényi-α, f-divergences, χ², total
//! variation, Bhattacharyya, and the local quadratic (Fisher) form they all
//! share to second order.
//!
//! Conventions fixed here and used everywhere: natural logarithms (nats),
//! `0·log 0 = 0` and `0·f(0/0) = 0`. Divergence-ball membership measures the
//! divergence from the *center* to the candidate, `d(center, candidate) <= r`.

use crate::simplex::ProbDist;
use crate::{Error, Hypothesis, Result};
use serde::{Deserialize, Serialize};

/// Which divergence defines a ball. The curvature `alpha` is the Rényi order,
/// or `f''(1)` for an f-divergence; it is the only number the small-radius
/// sensitivity expansions need.
///
/// The built-in squared Hellinger uses `f(t) = (sqrt(t) - 1)^2`, so its
/// curvature is `1/2`. Callers with their own `f` can evaluate it through
/// [`f_div_with`] and pass the matching curvature to the sensitivity
/// operations directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivergenceSpec {
    /// Rényi divergence of positive order. Order 1 is relative entropy.
    Renyi { order: f64 },
    /// Relative entropy as an f-divergence, `f(t) = t log t`.
    Kl,
    /// Pearson χ², `f(t) = (t-1)^2`, curvature 2.
    ChiSquared,
    /// Squared Hellinger, `f(t) = (sqrt(t)-1)^2`, curvature 1/2.
    SquaredHellinger,
}

impl DivergenceSpec {
    /// The local curvature: Rényi order, or `f''(1)`.
    pub fn curvature(&self) -> f64 {
        match self {
            DivergenceSpec::Renyi { order } => *order,
            DivergenceSpec::Kl => 1.0,
            DivergenceSpec::ChiSquared => 2.0,
            DivergenceSpec::SquaredHellinger => 0.5,
        }
    }

    pub fn is_f_divergence(&self) -> bool {
        !matches!(self, DivergenceSpec::Renyi { .. })
    }

    /// `d(p, q)` for this spec.
    pub fn eval(&self, p: &ProbDist, q: &ProbDist) -> Result<f64> {
        match self {
            DivergenceSpec::Renyi { order } => renyi(p, q, *order),
            DivergenceSpec::Kl => kl(p, q),
            DivergenceSpec::ChiSquared => f_div_with(p, q, |t| (t - 1.0) * (t - 1.0)),
            DivergenceSpec::SquaredHellinger => {
                f_div_with(p, q, |t| (t.sqrt() - 1.0) * (t.sqrt() - 1.0))
            }
        }
    }

    /// Jointly convex in both arguments? True for f-divergences and Rényi of
    /// order in (0, 1]. Rényi above 1 is only convex in the second argument.
    pub fn jointly_convex(&self) -> bool {
        match self {
            DivergenceSpec::Renyi { order } => *order <= 1.0,
            _ => true,
        }
    }
}

/// A divergence ball `{p : d(center, p) <= r}`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: ProbDist,
    pub spec: DivergenceSpec,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: ProbDist, spec: DivergenceSpec, radius: f64) -> Result<Ball> {
        if !(radius >= 0.0) {
            return Err(Error::Domain(format!("ball radius must be >= 0, got {radius}")));
        }
        if let DivergenceSpec::Renyi { order } = spec {
            if !(order > 0.0) {
                return Err(Error::Domain(format!("Rényi order must be > 0, got {order}")));
            }
        }
        Ok(Ball { center, spec, radius })
    }

    /// Divergence from the center to `p`.
    pub fn distance_to(&self, p: &ProbDist) -> Result<f64> {
        self.spec.eval(&self.center, p)
    }

    pub fn contains(&self, p: &ProbDist) -> Result<bool> {
        Ok(self.distance_to(p)? <= self.radius + 1e-15)
    }
}

fn check_lengths(p: &ProbDist, q: &ProbDist) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Usage(format!(
            "distributions on different alphabets ({} vs {} symbols)",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// Relative entropy `D(p||q)` in nats, with `0·log 0 = 0`.
///
/// `q` must be positive wherever `p` is.
pub fn kl(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_lengths(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::Domain(
                    "D(p||q) infinite: q has a zero inside the support of p".into(),
                ));
            }
            acc += pi * (pi / qi).ln();
        }
    }
    Ok(acc.max(0.0))
}

/// Rényi divergence of order `alpha > 0`; order 1 dispatches to [`kl`].
pub fn renyi(p: &ProbDist, q: &ProbDist, alpha: f64) -> Result<f64> {
    check_lengths(p, q)?;
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("Rényi order must be > 0, got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return kl(p, q);
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi <= 0.0 && alpha > 1.0 {
                return Err(Error::Domain(
                    "Rényi divergence infinite: q has a zero inside the support of p".into(),
                ));
            }
            acc += pi.powf(alpha) * qi.powf(1.0 - alpha);
        }
    }
    if acc <= 0.0 {
        return Err(Error::Domain("Rényi divergence infinite: disjoint supports".into()));
    }
    Ok((acc.ln() / (alpha - 1.0)).max(0.0))
}

/// f-divergence for one of the built-in `FDiv` specs.
pub fn f_div(p: &ProbDist, q: &ProbDist, spec: &DivergenceSpec) -> Result<f64> {
    if !spec.is_f_divergence() {
        return Err(Error::Usage("f_div needs an f-divergence spec, got Renyi".into()));
    }
    spec.eval(p, q)
}

/// f-divergence with a caller-supplied convex generator, `sum q·f(p/q)` with
/// `0·f(0/0) = 0`.
pub fn f_div_with(p: &ProbDist, q: &ProbDist, f: impl Fn(f64) -> f64) -> Result<f64> {
    check_lengths(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if qi > 0.0 {
            acc += qi * f(pi / qi);
        } else if pi > 0.0 {
            return Err(Error::Domain(
                "f-divergence: q has a zero inside the support of p".into(),
            ));
        }
    }
    Ok(acc.max(0.0))
}

/// Total variation distance, `(1/2) sum |p - q|`.
pub fn total_variation(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}

/// Bhattacharyya distance, `-log sum sqrt(p·q)`.
pub fn bhattacharyya(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_lengths(p, q)?;
    let s: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (a * b).sqrt())
        .sum();
    Ok((-s.ln()).max(0.0))
}

/// Pearson χ² divergence `sum (p-q)^2 / q`. Equals `Var_q(p/q)`, the identity
/// every variance-form sensitivity rides on.
pub fn chi_squared(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_lengths(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if qi > 0.0 {
            acc += (pi - qi) * (pi - qi) / qi;
        } else if pi > 0.0 {
            return Err(Error::Domain("chi-squared: q has a zero inside the support of p".into()));
        }
    }
    Ok(acc)
}

/// Shared second-order form of every supported divergence:
/// `(alpha/2) · sum delta(x)^2 / center(x)`.
///
/// `delta` must sum to zero (a tangent direction of the simplex).
pub fn fisher_quadratic(center: &ProbDist, delta: &[f64], alpha: f64) -> Result<f64> {
    if delta.len() != center.len() {
        return Err(Error::Usage(format!(
            "perturbation has {} entries, distribution has {}",
            delta.len(),
            center.len()
        )));
    }
    let s: f64 = delta.iter().sum();
    if s.abs() > 1e-9 {
        return Err(Error::Usage(format!("perturbation must sum to 0, sums to {s}")));
    }
    Ok(alpha / 2.0
        * delta
            .iter()
            .zip(center.probs())
            .map(|(&d, &c)| d * d / c)
            .sum::<f64>())
}

/// Per-symbol log-likelihood ratio vector `log(num/den)`.
pub fn llr(num: &ProbDist, den: &ProbDist) -> Vec<f64> {
    num.probs()
        .iter()
        .zip(den.probs())
        .map(|(&a, &b)| (a / b).ln())
        .collect()
}

/// The type statistic of the likelihood ratio test,
/// `D(q||p0) - D(q||p1) = E_q[log(p1/p0)]`, finite for any type `q`.
pub fn lrt_statistic(q: &ProbDist, p0: &ProbDist, p1: &ProbDist) -> f64 {
    q.expect(&llr(p1, p0))
}

pub(crate) fn hyp_dist<'a>(h: Hypothesis, p0: &'a ProbDist, p1: &'a ProbDist) -> &'a ProbDist {
    match h {
        Hypothesis::Null => p0,
        Hypothesis::Alternative => p1,
    }
}
