//! Worst-case exponents when an adversary perturbs the observed type inside
//! a divergence ball: the likelihood ratio test, Hoeffding's test, and a
//! product lower bound with stopping-time inflation for the sequential test.
//!
//! Here the test is matched — both true distributions are known — but the
//! decision is made on a tampered type `Q_hat` within divergence `r` of the
//! actual type `Q`, `d(Q, Q_hat) <= r` (actual type first). Exponents are
//! joint minimizations over the pair; they are convex for f-divergence balls
//! and Rényi balls of order at most one, which is exactly the family this
//! module accepts.

use crate::divergences::{chi_squared, hyp_dist, kl, llr, DivergenceSpec};
use crate::glrt::glrt_e1_with_achiever;
use crate::lrt::{matched_exponents, SensitivityReport, SensitivitySource};
use crate::simplex::ProbDist;
use crate::solver::{
    bisect, golden_min, minimize_constrained, project_to_simplex, random_simplex_point,
    SolveOptions,
};
use crate::tilted::{lambda_for_threshold, tilted_lrt, ThresholdFlag};
use crate::{Error, Hypothesis, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// How an adversarial worst case was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum AdvMethod {
    /// Exact nested one-dimensional solve (binary alphabets).
    NestedExact,
    /// Alternating convex minimization over the pair.
    Alternating,
    /// Closed-form product bound (sequential test).
    ProductBound,
}

/// Adversarial-setting report. For the sequential test `e0`/`e1` are the two
/// clamped factors of the product lower bound, not exact values.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AdvReport {
    pub e0: f64,
    pub e1: f64,
    pub theta0: f64,
    pub theta1: f64,
    /// First-order inflated expected stopping times, units of the design
    /// horizon n (sequential test only).
    pub inflated_tau0: f64,
    pub inflated_tau1: f64,
    /// Set when a product-bound factor clamped at zero.
    pub vacuous: bool,
    pub method: AdvMethod,
}

fn require_jointly_convex(spec: &DivergenceSpec) -> Result<()> {
    if !spec.jointly_convex() {
        return Err(Error::Usage(format!(
            "adversarial balls need a jointly convex divergence (f-divergence or Rényi order <= 1), got {spec:?}"
        )));
    }
    Ok(())
}

/// Worst-case exponent of the likelihood ratio test when the adversary moves
/// the observed type within divergence `r`: the minimum of `D(Q||p_i)` over
/// actual types `Q` and tampered types `Q_hat` in the rejection (or
/// acceptance) half-space with `d(Q, Q_hat) <= r`.
pub fn adv_lrt_worst_case(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
    hypothesis: Hypothesis,
    opts: &SolveOptions,
) -> Result<f64> {
    require_jointly_convex(spec)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    // orient as the hypothesis-0 problem: half-space {stat >= oriented_gamma}
    let c = llr(p1, p0);
    let (target, score, g): (&ProbDist, Vec<f64>, f64) = match hypothesis {
        Hypothesis::Null => (p0, c.clone(), gamma),
        Hypothesis::Alternative => (p1, c.iter().map(|x| -x).collect(), -gamma),
    };
    let smin = score.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = score.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if g <= smin {
        return Ok(0.0); // every type is already rejected
    }
    if g > smax {
        return Err(Error::Domain(format!(
            "threshold {gamma} leaves an empty decision region"
        )));
    }
    if r == 0.0 {
        let rep = matched_exponents(p0, p1, gamma)?;
        return Ok(match hypothesis {
            Hypothesis::Null => rep.e0,
            Hypothesis::Alternative => rep.e1,
        });
    }
    if p0.len() == 2 {
        adv_worst_nested_k2(target, &score, g, r, spec)
    } else {
        adv_worst_alternating(target, &score, g, r, spec, opts)
    }
}

/// Exact binary-alphabet path: the half-space is an interval in the tampered
/// Bernoulli parameter; for each tampered type the feasible actual types form
/// an interval around it, and the objective is convex there.
fn adv_worst_nested_k2(
    target: &ProbDist,
    score: &[f64],
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
) -> Result<f64> {
    let d2 = |t: f64| ProbDist::from_type(vec![1.0 - t, t]).unwrap();
    // half-space {(1-t) s0 + t s1 >= gamma} in the tampered parameter
    let (s0, s1) = (score[0], score[1]);
    let slope = s1 - s0;
    let tb = (gamma - s0) / slope;
    let (qh_lo, qh_hi) = if slope > 0.0 {
        (tb.clamp(0.0, 1.0), 1.0)
    } else {
        (0.0, tb.clamp(0.0, 1.0))
    };
    let inner = |th: f64| -> f64 {
        let qh = d2(th);
        let dist = |t: f64| spec.eval(&d2(t), &qh).unwrap_or(f64::INFINITY);
        // feasible actual-type interval around the tampered type
        let lo = if dist(0.0) <= r {
            0.0
        } else {
            bisect(|t| dist(t) - r, 0.0, th, 1e-15).unwrap_or(th)
        };
        let hi = if dist(1.0) <= r {
            1.0
        } else {
            bisect(|t| dist(t) - r, th, 1.0, 1e-15).unwrap_or(th)
        };
        let tp = target.p(1);
        if lo <= tp && tp <= hi {
            return 0.0;
        }
        let edge = if tp < lo { lo } else { hi };
        kl(&d2(edge), target).unwrap_or(f64::INFINITY)
    };
    // coarse scan then golden refinement
    let n = 400;
    let mut best = f64::INFINITY;
    let mut tbest = qh_lo;
    for i in 0..=n {
        let t = qh_lo + (qh_hi - qh_lo) * i as f64 / n as f64;
        let v = inner(t);
        if v < best {
            best = v;
            tbest = t;
        }
    }
    if best == 0.0 {
        return Ok(0.0);
    }
    let pad = (qh_hi - qh_lo) / n as f64;
    let (_, refined) = golden_min(
        inner,
        (tbest - 2.0 * pad).max(qh_lo),
        (tbest + 2.0 * pad).min(qh_hi),
        1e-14,
    );
    Ok(best.min(refined))
}

/// Gradient of `d(q, qh)` in its second argument, for the jointly convex specs.
fn d_grad_second(spec: &DivergenceSpec, q: &ProbDist, qh: &[f64]) -> Vec<f64> {
    match spec {
        DivergenceSpec::Kl | DivergenceSpec::Renyi { order: _ }
            if (spec.curvature() - 1.0).abs() < 1e-12 =>
        {
            q.probs().iter().zip(qh).map(|(&qi, &hi)| -qi / hi.max(1e-300)).collect()
        }
        DivergenceSpec::Renyi { order } => {
            let a = *order;
            let s: f64 = q
                .probs()
                .iter()
                .zip(qh)
                .map(|(&qi, &hi)| qi.powf(a) * hi.max(1e-300).powf(1.0 - a))
                .sum();
            q.probs()
                .iter()
                .zip(qh)
                .map(|(&qi, &hi)| -(qi / hi.max(1e-300)).powf(a) / s)
                .collect()
        }
        DivergenceSpec::ChiSquared => q
            .probs()
            .iter()
            .zip(qh)
            .map(|(&qi, &hi)| {
                let t = qi / hi.max(1e-300);
                1.0 - t * t
            })
            .collect(),
        DivergenceSpec::SquaredHellinger => q
            .probs()
            .iter()
            .zip(qh)
            .map(|(&qi, &hi)| 1.0 - (qi / hi.max(1e-300)).sqrt())
            .collect(),
        DivergenceSpec::Kl => unreachable!(),
    }
}

/// Alternating convex minimization for general alphabets: fix the tampered
/// type and solve for the actual type inside the divergence ball, then fix
/// the actual type and pull the tampered type back toward it inside the
/// half-space. The objective never increases, and multistart guards the
/// half-space projection.
fn adv_worst_alternating(
    target: &ProbDist,
    score: &[f64],
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
    opts: &SolveOptions,
) -> Result<f64> {
    let k = target.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xadf0);
    let mut best = f64::INFINITY;
    let starts = opts.multistarts.min(8).max(2);
    for s in 0..starts {
        // start from a half-space point: project a sample onto {score >= gamma}
        let raw = if s == 0 {
            target.probs().to_vec()
        } else {
            random_simplex_point(&mut rng, k)
        };
        let mut qh = project_halfspace_simplex(&raw, score, gamma);
        let mut prev = f64::INFINITY;
        for _round in 0..opts.max_iters.min(10_000) {
            // actual-type step: min D(Q||target) s.t. d(Q, qh) <= r
            let qh_dist = {
                let qh = qh.clone();
                let spec = *spec;
                move |x: &[f64]| -> f64 {
                    let xp = ProbDist::from_type(normalize(x)).unwrap();
                    let qh = ProbDist::from_type(qh.clone()).unwrap();
                    spec.eval(&xp, &qh).unwrap_or(f64::INFINITY)
                }
            };
            let obj = |x: &[f64]| -> (f64, Vec<f64>) {
                let xp = match ProbDist::new(normalize_floor(x)) {
                    Ok(p) => p,
                    Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
                };
                let v = kl(&xp, target).unwrap_or(f64::INFINITY);
                let grad: Vec<f64> = xp
                    .probs()
                    .iter()
                    .zip(target.probs())
                    .map(|(&qi, &pi)| (qi / pi).ln() + 1.0)
                    .collect();
                (v, grad)
            };
            let res = minimize_constrained(&obj, &qh, &qh_dist, r, opts)?;
            let val = res.value;

            // tampered-type step: min d(q, qh) over the half-space
            qh = halfspace_divergence_projection(&res.point, score, gamma, spec, opts);

            if (prev - val).abs() < 1e-10 {
                prev = val;
                break;
            }
            prev = val;
        }
        best = best.min(prev);
    }
    Ok(best.max(0.0))
}

fn normalize(x: &[f64]) -> Vec<f64> {
    let s: f64 = x.iter().map(|&v| v.max(0.0)).sum();
    x.iter().map(|&v| v.max(0.0) / s).collect()
}

fn normalize_floor(x: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = x.iter().map(|&p| p.max(crate::simplex::SUPPORT_FLOOR)).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|p| p / s).collect()
}

/// Euclidean (Dykstra) projection onto the simplex intersected with the
/// half-space `{score · x >= gamma}`.
fn project_halfspace_simplex(x: &[f64], score: &[f64], gamma: f64) -> Vec<f64> {
    let norm2: f64 = score.iter().map(|s| s * s).sum();
    let mut p = x.to_vec();
    let mut inc_s = vec![0.0; x.len()];
    let mut inc_h = vec![0.0; x.len()];
    for _ in 0..200 {
        // simplex step with Dykstra correction
        let y: Vec<f64> = p.iter().zip(&inc_s).map(|(a, b)| a + b).collect();
        let ps = project_to_simplex(&y);
        for i in 0..p.len() {
            inc_s[i] = y[i] - ps[i];
        }
        // half-space step
        let y: Vec<f64> = ps.iter().zip(&inc_h).map(|(a, b)| a + b).collect();
        let viol: f64 = gamma - y.iter().zip(score).map(|(a, b)| a * b).sum::<f64>();
        let ph: Vec<f64> = if viol > 0.0 {
            y.iter().zip(score).map(|(a, b)| a + viol * b / norm2).collect()
        } else {
            y.clone()
        };
        for i in 0..p.len() {
            inc_h[i] = y[i] - ph[i];
        }
        let moved: f64 = p.iter().zip(&ph).map(|(a, b)| (a - b).abs()).sum();
        p = ph;
        if moved < 1e-14 {
            break;
        }
    }
    // final cleanup: exact simplex projection, nudge across the plane if needed
    let mut p = project_to_simplex(&p);
    let stat: f64 = p.iter().zip(score).map(|(a, b)| a * b).sum();
    if stat < gamma {
        // slide toward the best-scoring vertex until feasible
        let ib = (0..score.len()).max_by(|&a, &b| score[a].total_cmp(&score[b])).unwrap();
        let mut vertex = vec![0.0; score.len()];
        vertex[ib] = 1.0;
        let t = bisect(
            |t| {
                p.iter()
                    .zip(&vertex)
                    .zip(score)
                    .map(|((a, v), s)| ((1.0 - t) * a + t * v) * s)
                    .sum::<f64>()
                    - gamma
            },
            0.0,
            1.0,
            1e-15,
        )
        .unwrap_or(1.0);
        for i in 0..p.len() {
            p[i] = (1.0 - t) * p[i] + t * vertex[i];
        }
    }
    p
}

/// Minimize `d(q, qh)` in `qh` over the half-space within the simplex by
/// projected gradient with the analytic second-argument gradient.
fn halfspace_divergence_projection(
    q: &ProbDist,
    score: &[f64],
    gamma: f64,
    spec: &DivergenceSpec,
    opts: &SolveOptions,
) -> Vec<f64> {
    let stat_q = q.expect(score);
    if stat_q >= gamma {
        return q.probs().to_vec();
    }
    let mut x = project_halfspace_simplex(q.probs(), score, gamma);
    let eval = |x: &[f64]| -> f64 {
        let xp = ProbDist::from_type(normalize(x)).unwrap();
        spec.eval(q, &xp).unwrap_or(f64::INFINITY)
    };
    let mut fx = eval(&x);
    let mut step = 0.25;
    for _ in 0..opts.max_iters.min(4000) {
        let g = d_grad_second(spec, q, &x);
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(&xi, &gi)| xi - step * gi).collect();
            let trial = project_halfspace_simplex(&trial, score, gamma);
            let ft = eval(&trial);
            if ft < fx - 1e-15 {
                x = trial;
                fx = ft;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Sensitivity of the likelihood ratio test to adversarial type perturbation:
/// `theta_i = (2/alpha)·Var_{Q_lambda}(log(Q_lambda/p_i))` with `Q_lambda`
/// the matched tilt at the threshold.
pub fn adv_lrt_sensitivity(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    alpha: f64,
    hypothesis: Hypothesis,
) -> Result<SensitivityReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("curvature must be > 0, got {alpha}")));
    }
    let solve = lambda_for_threshold(p0, p1, gamma)?;
    if solve.flag != ThresholdFlag::Interior {
        return Err(Error::Domain(format!(
            "threshold {gamma} at the boundary of the achievable range; the sqrt(r) expansion is invalid at a degenerate tilt"
        )));
    }
    let q = tilted_lrt(p0, p1, solve.lambda)?;
    let p = hyp_dist(hypothesis, p0, p1);
    let theta = (2.0 / alpha) * q.variance(&llr(&q, p));
    Ok(SensitivityReport::new(kl(&q, p)?, theta, SensitivitySource::LrtAdversarial))
}

/// The sandwich comparing adversarial and distribution-mismatch
/// sensitivities, in bare-variance units (`theta·alpha/2`):
/// `(min_x p_i/Q_lambda)·theta_dist - E_i^2 <= theta_adv <= theta_dist`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SensitivitySandwich {
    pub lower: f64,
    pub adv: f64,
    pub dist: f64,
}

pub fn adv_vs_dist_bounds(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    hypothesis: Hypothesis,
) -> Result<SensitivitySandwich> {
    let solve = lambda_for_threshold(p0, p1, gamma)?;
    if solve.flag != ThresholdFlag::Interior {
        return Err(Error::Domain(format!(
            "threshold {gamma} at the boundary of the achievable range"
        )));
    }
    let q = tilted_lrt(p0, p1, solve.lambda)?;
    let p = hyp_dist(hypothesis, p0, p1);
    let e = kl(&q, p)?;
    let dist = chi_squared(&q, p)?;
    let adv = q.variance(&llr(&q, p));
    let min_ratio = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| pi / qi)
        .fold(f64::INFINITY, f64::min);
    let sandwich = SensitivitySandwich { lower: min_ratio * dist - e * e, adv, dist };
    debug_assert!(sandwich.lower <= sandwich.adv + 1e-12);
    debug_assert!(sandwich.adv <= sandwich.dist + 1e-12);
    Ok(sandwich)
}

/// Worst-case exponents of Hoeffding's test under adversarial type
/// perturbation. The type-II side is a convex joint minimization (tampered
/// type inside the acceptance KL ball, actual type within `r` of it); the
/// type-I side is a boundary problem solved by multistart over the sphere.
pub fn adv_glrt_worst_case(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
    opts: &SolveOptions,
) -> Result<(f64, f64)> {
    require_jointly_convex(spec)?;
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0, got {gamma}")));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    if r == 0.0 {
        let (e1, _, _) = glrt_e1_with_achiever(p0, p1, gamma)?;
        return Ok((gamma, e1));
    }
    if p0.len() == 2 {
        adv_glrt_k2(p0, p1, gamma, r, spec)
    } else {
        adv_glrt_general(p0, p1, gamma, r, spec, opts)
    }
}

fn adv_glrt_k2(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
) -> Result<(f64, f64)> {
    let d2 = |t: f64| ProbDist::from_type(vec![1.0 - t, t]).unwrap();
    let feasible_interval = |th: f64| -> (f64, f64) {
        let qh = d2(th);
        let dist = |t: f64| spec.eval(&d2(t), &qh).unwrap_or(f64::INFINITY);
        let lo = if dist(0.0) <= r {
            0.0
        } else {
            bisect(|t| dist(t) - r, 0.0, th, 1e-15).unwrap_or(th)
        };
        let hi = if dist(1.0) <= r {
            1.0
        } else {
            bisect(|t| dist(t) - r, th, 1.0, 1e-15).unwrap_or(th)
        };
        (lo, hi)
    };
    let inner = |th: f64, target: &ProbDist| -> f64 {
        let (lo, hi) = feasible_interval(th);
        let tp = target.p(1);
        if lo <= tp && tp <= hi {
            return 0.0;
        }
        let edge = if tp < lo { lo } else { hi };
        kl(&d2(edge), target).unwrap_or(f64::INFINITY)
    };

    // e0: tampered type on or past the sphere D(.||p0) = gamma
    let dc = |t: f64| kl(&d2(t), p0).unwrap_or(f64::INFINITY);
    let c = p0.p(1);
    let mut segments: Vec<(f64, f64)> = Vec::new();
    if dc(0.0) >= gamma {
        let t_lo = bisect(|t| dc(t) - gamma, 0.0, c, 1e-15)?;
        segments.push((0.0, t_lo));
    }
    if dc(1.0) >= gamma {
        let t_hi = bisect(|t| dc(t) - gamma, c, 1.0, 1e-15)?;
        segments.push((t_hi, 1.0));
    }
    if segments.is_empty() {
        return Err(Error::Domain(format!(
            "threshold {gamma} exceeds the maximal divergence from the null distribution"
        )));
    }
    let mut e0 = f64::INFINITY;
    for (lo, hi) in &segments {
        let n = 300;
        let mut best = f64::INFINITY;
        let mut tb = *lo;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let v = inner(t, p0);
            if v < best {
                best = v;
                tb = t;
            }
        }
        let pad = (hi - lo) / n as f64;
        let (_, refined) = golden_min(
            |t| inner(t, p0),
            (tb - 2.0 * pad).max(*lo),
            (tb + 2.0 * pad).min(*hi),
            1e-14,
        );
        e0 = e0.min(best.min(refined));
    }

    // e1: tampered type inside the acceptance ball D(.||p0) <= gamma
    let (alo, ahi) = {
        let lo = if dc(0.0) <= gamma {
            0.0
        } else {
            bisect(|t| dc(t) - gamma, 0.0, c, 1e-15)?
        };
        let hi = if dc(1.0) <= gamma {
            1.0
        } else {
            bisect(|t| dc(t) - gamma, c, 1.0, 1e-15)?
        };
        (lo, hi)
    };
    let n = 300;
    let mut e1 = f64::INFINITY;
    let mut tb = alo;
    for i in 0..=n {
        let t = alo + (ahi - alo) * i as f64 / n as f64;
        let v = inner(t, p1);
        if v < e1 {
            e1 = v;
            tb = t;
        }
    }
    let pad = (ahi - alo) / n as f64;
    let (_, refined) = golden_min(
        |t| inner(t, p1),
        (tb - 2.0 * pad).max(alo),
        (tb + 2.0 * pad).min(ahi),
        1e-14,
    );
    e1 = e1.min(refined);
    Ok((e0.max(0.0), e1.max(0.0)))
}

fn adv_glrt_general(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    r: f64,
    spec: &DivergenceSpec,
    opts: &SolveOptions,
) -> Result<(f64, f64)> {
    // e1: alternate between the actual-type ball step and pulling the
    // tampered type toward it inside the acceptance KL ball around p0
    let mut qh = p0.probs().to_vec();
    let mut e1 = f64::INFINITY;
    let mut prev = f64::INFINITY;
    for _ in 0..200 {
        let qh_dist = {
            let qh = qh.clone();
            let spec = *spec;
            move |x: &[f64]| -> f64 {
                let xp = ProbDist::from_type(normalize(x)).unwrap();
                let qhd = ProbDist::from_type(qh.clone()).unwrap();
                spec.eval(&xp, &qhd).unwrap_or(f64::INFINITY)
            }
        };
        let obj = |x: &[f64]| -> (f64, Vec<f64>) {
            let xp = match ProbDist::new(normalize_floor(x)) {
                Ok(p) => p,
                Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
            };
            let v = kl(&xp, p1).unwrap_or(f64::INFINITY);
            let grad: Vec<f64> = xp
                .probs()
                .iter()
                .zip(p1.probs())
                .map(|(&qi, &pi)| (qi / pi).ln() + 1.0)
                .collect();
            (v, grad)
        };
        let res = minimize_constrained(&obj, &qh, &qh_dist, r, opts)?;
        e1 = res.value;
        // project the tampered type toward the actual type within the ball
        let q = res.point;
        let pull = |x: &[f64]| -> (f64, Vec<f64>) {
            let v = {
                let xp = ProbDist::from_type(normalize(x)).unwrap();
                spec.eval(&q, &xp).unwrap_or(f64::INFINITY)
            };
            (v, d_grad_second(spec, &q, x))
        };
        let ball_dist = |x: &[f64]| -> f64 {
            let xp = ProbDist::from_type(normalize(x)).unwrap();
            kl(&xp, p0).unwrap_or(f64::INFINITY)
        };
        let res2 = minimize_constrained(&pull, p0.probs(), &ball_dist, gamma, opts)?;
        qh = res2.point.probs().to_vec();
        if (prev - e1).abs() < 1e-10 {
            break;
        }
        prev = e1;
    }

    // e0: multistart over sphere starting points, actual-type step only
    // (pushing the tampered type back to the sphere radially)
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x61d7);
    let mut e0 = f64::INFINITY;
    for _ in 0..opts.multistarts.max(8) {
        let dir = random_simplex_point(&mut rng, p0.len());
        let qh0 = match radial_sphere_point(p0, &dir, gamma) {
            Some(p) => p,
            None => continue,
        };
        let mut qh = qh0.probs().to_vec();
        let mut prev = f64::INFINITY;
        for _ in 0..100 {
            let qh_dist = {
                let qh = qh.clone();
                let spec = *spec;
                move |x: &[f64]| -> f64 {
                    let xp = ProbDist::from_type(normalize(x)).unwrap();
                    let qhd = ProbDist::from_type(qh.clone()).unwrap();
                    spec.eval(&xp, &qhd).unwrap_or(f64::INFINITY)
                }
            };
            let obj = |x: &[f64]| -> (f64, Vec<f64>) {
                let xp = match ProbDist::new(normalize_floor(x)) {
                    Ok(p) => p,
                    Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
                };
                let v = kl(&xp, p0).unwrap_or(f64::INFINITY);
                let grad: Vec<f64> = xp
                    .probs()
                    .iter()
                    .zip(p0.probs())
                    .map(|(&qi, &pi)| (qi / pi).ln() + 1.0)
                    .collect();
                (v, grad)
            };
            let res = minimize_constrained(&obj, &qh, &qh_dist, r, opts)?;
            let val = res.value;
            // gradient step of d(q, .) then radial push back to the sphere
            let q = res.point;
            let g = d_grad_second(spec, &q, &qh);
            let stepped: Vec<f64> = qh.iter().zip(&g).map(|(&a, &b)| a - 0.1 * b).collect();
            let stepped = project_to_simplex(&stepped);
            match radial_sphere_point(p0, &stepped, gamma) {
                Some(p) => qh = p.probs().to_vec(),
                None => {}
            }
            if (prev - val).abs() < 1e-10 {
                prev = val;
                break;
            }
            prev = val;
        }
        e0 = e0.min(prev);
    }
    Ok((e0.max(0.0), e1.max(0.0)))
}

fn radial_sphere_point(center: &ProbDist, dir: &[f64], gamma: f64) -> Option<ProbDist> {
    let delta: Vec<f64> = dir.iter().zip(center.probs()).map(|(&a, &b)| a - b).collect();
    if delta.iter().map(|d| d.abs()).sum::<f64>() < 1e-13 {
        return None;
    }
    let mut s_max = f64::INFINITY;
    for (i, &d) in delta.iter().enumerate() {
        if d < 0.0 {
            s_max = s_max.min(-center.p(i) / d);
        }
    }
    let q_at = |s: f64| -> ProbDist {
        let v: Vec<f64> = center
            .probs()
            .iter()
            .zip(&delta)
            .map(|(&c, &d)| (c + s * d).max(0.0))
            .collect();
        let tot: f64 = v.iter().sum();
        ProbDist::from_type(v.iter().map(|p| p / tot).collect()).unwrap()
    };
    let d_at = |s: f64| kl(&q_at(s), center).unwrap_or(f64::INFINITY);
    if d_at(s_max) < gamma {
        return None;
    }
    let s = bisect(|s| d_at(s) - gamma, 0.0, s_max, 1e-14).ok()?;
    Some(q_at(s))
}

/// Sensitivities of Hoeffding's test to adversarial perturbation:
/// `theta0 = (2/alpha)·max Var_Qh(log(Qh/p0))` over the KL sphere, and
/// `theta1 = (2/alpha)·Var_Qmu(log(Qmu/p1))` at the type-II achiever.
pub fn adv_glrt_sensitivity(
    p0: &ProbDist,
    p1: &ProbDist,
    gamma: f64,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0, got {gamma}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("curvature must be > 0, got {alpha}")));
    }
    let obj = |q: &ProbDist| -> f64 {
        let score: Vec<f64> = q
            .probs()
            .iter()
            .zip(p0.probs())
            .map(|(&a, &b)| if a > 0.0 { (a / b).ln() } else { 0.0 })
            .collect();
        q.variance(&score)
    };
    let (_, var0) = crate::solver::extremize_on_kl_sphere(
        &obj,
        p0,
        gamma,
        crate::solver::ExtremizeMode::Max,
        opts,
    )?;
    let (_, qmu, _) = glrt_e1_with_achiever(p0, p1, gamma)?;
    let var1 = qmu.variance(&llr(&qmu, p1));
    Ok(((2.0 / alpha) * var0, (2.0 / alpha) * var1))
}

/// Product lower bound for the sequential test under adversarial
/// perturbation, with the inflated first-order stopping times. Factors clamp
/// at zero and set the vacuous flag.
pub fn adv_sprt_bounds(
    p0: &ProbDist,
    p1: &ProbDist,
    r: f64,
    alpha: f64,
    n: f64,
) -> Result<AdvReport> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("curvature must be > 0, got {alpha}")));
    }
    if p0 == p1 {
        return Err(Error::Domain("distributions must differ".into()));
    }
    let theta0 = (2.0 / alpha) * p1.variance(&llr(p1, p0));
    let theta1 = (2.0 / alpha) * p0.variance(&llr(p0, p1));
    let f0 = kl(p1, p0)? - 2.0 * (r * theta0).sqrt();
    let f1 = kl(p0, p1)? - 2.0 * (r * theta1).sqrt();
    let vacuous = f0 <= 0.0 || f1 <= 0.0;
    let tau0 = n * (1.0 + ((2.0 / alpha) * p0.variance(&llr(p0, p1)) * r).sqrt() / kl(p0, p1)?);
    let tau1 = n * (1.0 + ((2.0 / alpha) * p1.variance(&llr(p1, p0)) * r).sqrt() / kl(p1, p0)?);
    Ok(AdvReport {
        e0: f0.max(0.0),
        e1: f1.max(0.0),
        theta0,
        theta1,
        inflated_tau0: tau0,
        inflated_tau1: tau1,
        vacuous,
        method: AdvMethod::ProductBound,
    })
}
