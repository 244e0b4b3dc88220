//! Shared numerical kernels: scalar root finding and line search, the
//! Gaussian quantile, simplex projection, ball-constrained descent, KL-sphere
//! extremization, and the brute-force referees (simplex grids and exact type
//! enumeration sums).

use crate::divergences::{kl, Ball};
use crate::simplex::{enumerate_types, simplex_grid, EmpiricalType, ProbDist, DEFAULT_ENUM_CAP};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Tolerances and budgets shared by the iterative solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Residual tolerance for scalar root solves.
    pub tol_root: f64,
    /// Allowed primal/dual gap.
    pub tol_dual: f64,
    /// First-order stationarity tolerance for descent methods.
    pub tol_opt: f64,
    /// Iteration cap for descent loops.
    pub max_iters: usize,
    /// Number of random restarts for nonconvex solves.
    pub multistarts: usize,
    /// Grid resolution used by oracle referees.
    pub grid_step: f64,
    /// Seed for multistart sampling; fixed seed means identical iterates.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_root: 1e-11,
            tol_dual: 1e-8,
            tol_opt: 1e-10,
            max_iters: 10_000,
            multistarts: 20,
            grid_step: 1e-3,
            seed: 0x5eed,
        }
    }
}

/// Bisection for a sign-changing continuous function on `[lo, hi]`.
/// Returns `x` with `|f(x)| <= tol` or bracket width below `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::Bracket { lo, hi, flo, fhi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol || (hi - lo) <= tol {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section minimization on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), lo, hi, tol);
    (x, -v)
}

// ---------------------------------------------------------------------------
// Gaussian quantile
// ---------------------------------------------------------------------------

/// Complementary error function, accurate to ~1e-15: Taylor series for small
/// arguments, Lentz continued fraction for the tail. Internal reference for
/// the quantile below and for its validation test.
pub(crate) fn erfc_precise(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_precise(-x);
    }
    if x < 2.0 {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let add = term / (2.0 * n as f64 + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        1.0 - sum * 2.0 / std::f64::consts::PI.sqrt()
    } else {
        // erfc(x) = exp(-x^2)/(x sqrt(pi)) * 1/(1 + 1/(2x^2)/(1 + 2/(2x^2)/(1 + ...)))
        let mut f = 1e-300;
        let mut c = f;
        let mut d = 0.0;
        let two_x2 = 2.0 * x * x;
        for n in 0..300 {
            let a = if n == 0 { 1.0 } else { n as f64 / two_x2 };
            let b = if n == 0 { 1.0 } else { 1.0 };
            d = b + a * d;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + a / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / (x * std::f64::consts::PI.sqrt()) * f
    }
}

/// Upper-tail Gaussian probability `Q(x) = P[Z > x]`.
pub fn gaussian_upper_tail(x: f64) -> f64 {
    0.5 * erfc_precise(x / std::f64::consts::SQRT_2)
}

/// Inverse of the upper-tail Gaussian cdf, `Q^{-1}(eps)`. Rational first
/// guess refined by one Halley step against the precise cdf; absolute error
/// below 1e-9 over `eps` in (0, 1).
pub fn gaussian_inv_upper_tail(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("tail probability must be in (0,1), got {eps}")));
    }
    // Newton refinement on the upper-tail residual Q(x) - eps keeps full
    // relative precision deep in the tail, unlike the lower-tail cdf
    let mut x = acklam_inv_cdf(1.0 - eps);
    for _ in 0..3 {
        let err = gaussian_upper_tail(x) - eps;
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf == 0.0 || err == 0.0 {
            break;
        }
        x += err / pdf;
    }
    Ok(x)
}

/// Acklam's rational approximation to the standard normal lower-tail
/// quantile; relative error ~1.15e-9 before refinement.
fn acklam_inv_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

// ---------------------------------------------------------------------------
// Simplex geometry
// ---------------------------------------------------------------------------

/// Euclidean projection onto the probability simplex by the sorted-threshold
/// method.
pub fn project_to_simplex(x: &[f64]) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            rho = i;
            theta = t;
        }
    }
    let _ = rho;
    x.iter().map(|&xi| (xi - theta).max(0.0)).collect()
}

/// Pull `x` back into `{p : dist(p) <= r}` by bisecting along the segment to
/// the interior `anchor` (where `dist(anchor) = 0`). Valid because the
/// supported divergences are convex along that segment.
pub fn project_to_sublevel(
    x: &[f64],
    anchor: &[f64],
    dist: &dyn Fn(&[f64]) -> f64,
    r: f64,
) -> Vec<f64> {
    if dist(x) <= r {
        return x.to_vec();
    }
    let blend = |t: f64| -> Vec<f64> {
        anchor
            .iter()
            .zip(x)
            .map(|(&a, &b)| a + t * (b - a))
            .collect()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dist(&blend(mid)) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    blend(lo)
}

/// Deterministic random interior simplex point (normalized exponentials).
pub fn random_simplex_point(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| -(rng.random::<f64>().max(1e-16)).ln() + 1e-9)
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn clamp_interior(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|&p| p.max(crate::simplex::SUPPORT_FLOOR)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= s);
    v
}

/// Outcome of a descent solve: the point, its value, and the final
/// first-order residual.
#[derive(Debug, Clone)]
pub struct DescentResult {
    pub point: ProbDist,
    pub value: f64,
    pub residual: f64,
}

/// Projected-gradient minimization of `objective` over
/// `{p in simplex : d(ball.center, p) <= ball.radius}`.
///
/// `objective` returns the value and a gradient. Infeasible starts are
/// projected in. Multistart with deterministic seeds; if no start meets the
/// stationarity tolerance the best iterate is reported as an error.
pub fn minimize_over_ball(
    objective: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    ball: &Ball,
    opts: &SolveOptions,
) -> Result<DescentResult> {
    let center = ball.center.probs().to_vec();
    let dist = |x: &[f64]| -> f64 {
        let p = ProbDist::new(clamp_interior(x)).expect("clamped point is a distribution");
        ball.distance_to(&p).unwrap_or(f64::INFINITY)
    };
    minimize_constrained(objective, &center, &dist, ball.radius, opts)
}

/// Same machinery with a caller-supplied constraint `dist(p) <= r` whose zero
/// point is `anchor`.
pub fn minimize_constrained(
    objective: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    anchor: &[f64],
    dist: &dyn Fn(&[f64]) -> f64,
    r: f64,
    opts: &SolveOptions,
) -> Result<DescentResult> {
    let k = anchor.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<f64>, f64, f64)> = None;

    for start in 0..opts.multistarts.max(1) {
        let mut x = if start == 0 {
            anchor.to_vec()
        } else {
            let raw = random_simplex_point(&mut rng, k);
            project_to_sublevel(&raw, anchor, dist, r)
        };
        let mut step = 0.5;
        let (mut fx, mut gx) = objective(&x);
        let mut residual = f64::INFINITY;
        for _ in 0..opts.max_iters {
            // projected gradient step with backtracking
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&gx).map(|(&xi, &gi)| xi - step * gi).collect();
                let trial = project_to_simplex(&trial);
                let trial = clamp_interior(&trial);
                let trial = project_to_sublevel(&trial, anchor, dist, r);
                let (ft, gt) = objective(&trial);
                if ft < fx - 1e-16 {
                    residual = x
                        .iter()
                        .zip(&trial)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        / step;
                    x = trial;
                    fx = ft;
                    gx = gt;
                    improved = true;
                    step *= 1.6;
                    break;
                }
                step *= 0.5;
            }
            if !improved || residual <= opts.tol_opt {
                if !improved {
                    residual = 0.0; // no descent direction at working precision
                }
                break;
            }
        }
        if best.as_ref().map(|b| fx < b.1).unwrap_or(true) {
            best = Some((x, fx, residual));
        }
    }
    let (x, v, residual) = best.expect("at least one start");
    let point = ProbDist::new(clamp_interior(&x)).expect("feasible point");
    if residual <= opts.tol_opt.max(1e-7) {
        Ok(DescentResult { point, value: v, residual })
    } else {
        Err(Error::NoConvergence {
            residual,
            iters: opts.max_iters,
            best_value: v,
            best_point: point.probs().to_vec(),
        })
    }
}

/// Extremize `objective` over the KL sphere `{q : D(q||center) = gamma}`.
///
/// For two symbols the sphere has at most two points, found by bisection on
/// each side of the center; the solve is exact. For larger alphabets a
/// penalty continuation drives multistart projected gradient onto the sphere,
/// with a final radial projection.
pub enum ExtremizeMode {
    Min,
    Max,
}

pub fn extremize_on_kl_sphere(
    objective: &dyn Fn(&ProbDist) -> f64,
    center: &ProbDist,
    gamma: f64,
    mode: ExtremizeMode,
    opts: &SolveOptions,
) -> Result<(ProbDist, f64)> {
    let pts = if center.len() == 2 {
        kl_sphere_points_k2(center, gamma)?
    } else {
        kl_sphere_points_multistart(objective, center, gamma, &mode, opts)?
    };
    if pts.is_empty() {
        return Err(Error::Domain(format!(
            "empty KL sphere: gamma={gamma} exceeds max divergence from the center"
        )));
    }
    let sign = match mode {
        ExtremizeMode::Min => 1.0,
        ExtremizeMode::Max => -1.0,
    };
    let best = pts
        .into_iter()
        .map(|p| {
            let v = objective(&p);
            (p, v)
        })
        .min_by(|a, b| (sign * a.1).total_cmp(&(sign * b.1)))
        .unwrap();
    Ok(best)
}

/// The at-most-two points of `{q : D(q||center) = gamma}` on a binary
/// alphabet. A side is dropped when even its endpoint stays below `gamma`.
pub fn kl_sphere_points_k2(center: &ProbDist, gamma: f64) -> Result<Vec<ProbDist>> {
    if center.len() != 2 {
        return Err(Error::Usage("kl_sphere_points_k2 needs a binary alphabet".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("sphere radius must be > 0, got {gamma}")));
    }
    let c = center.p(1);
    let d_at = |t: f64| -> f64 {
        let q = ProbDist::from_type(vec![1.0 - t, t]).unwrap();
        kl(&q, center).unwrap()
    };
    let mut pts = Vec::new();
    // left side: t in [0, c]; D decreases from ln(1/(1-t=..)) toward 0
    if d_at(0.0) > gamma {
        let t = bisect(|t| d_at(t) - gamma, 0.0, c, 1e-15)?;
        pts.push(ProbDist::from_type(vec![1.0 - t, t]).unwrap());
    } else if (d_at(0.0) - gamma).abs() < 1e-13 {
        pts.push(ProbDist::from_type(vec![1.0, 0.0]).unwrap());
    }
    // right side
    if d_at(1.0) > gamma {
        let t = bisect(|t| d_at(t) - gamma, c, 1.0, 1e-15)?;
        pts.push(ProbDist::from_type(vec![1.0 - t, t]).unwrap());
    } else if (d_at(1.0) - gamma).abs() < 1e-13 {
        pts.push(ProbDist::from_type(vec![0.0, 1.0]).unwrap());
    }
    Ok(pts)
}

fn kl_sphere_points_multistart(
    objective: &dyn Fn(&ProbDist) -> f64,
    center: &ProbDist,
    gamma: f64,
    mode: &ExtremizeMode,
    opts: &SolveOptions,
) -> Result<Vec<ProbDist>> {
    let max_div = center
        .probs()
        .iter()
        .map(|&c| (1.0 / c).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    if gamma > max_div {
        return Ok(Vec::new());
    }
    let sign = match mode {
        ExtremizeMode::Min => 1.0,
        ExtremizeMode::Max => -1.0,
    };
    // the sphere is star-shaped around the center, so optimizing over ray
    // directions (a simplex point each) keeps every iterate exactly feasible
    let k = center.len();
    let eval_dir = |dir: &[f64]| -> f64 {
        match radial_to_sphere(dir, center, gamma) {
            Some(p) => sign * objective(&p),
            None => f64::INFINITY,
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e3779b97f4a7c15);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    // vertices (sharpened), edge midpoints, and random directions
    for i in 0..k {
        let mut v = vec![0.02 / (k - 1) as f64; k];
        v[i] = 0.98;
        starts.push(v);
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut v = vec![0.02 / k as f64; k];
            v[i] = 0.49;
            v[j] = 0.49;
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            starts.push(v);
        }
    }
    for _ in 0..opts.multistarts.max(4) {
        starts.push(random_simplex_point(&mut rng, k));
    }
    let mut out = Vec::new();
    for start in starts {
        if eval_dir(&start).is_infinite() {
            continue;
        }
        let dir = nelder_mead_simplex(&eval_dir, &start, 400);
        if let Some(p) = radial_to_sphere(&dir, center, gamma) {
            out.push(p);
        }
    }
    if out.is_empty() {
        // radial rays through coarse grid directions
        let m = 12;
        for d in simplex_grid(k, m, DEFAULT_ENUM_CAP)? {
            if let Some(p) = radial_to_sphere(d.probs(), center, gamma) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Walk the ray from the center through `x` until `D(q||center) = gamma`.
fn radial_to_sphere(x: &[f64], center: &ProbDist, gamma: f64) -> Option<ProbDist> {
    let dir: Vec<f64> = x.iter().zip(center.probs()).map(|(&a, &b)| a - b).collect();
    if dir.iter().map(|d| d.abs()).sum::<f64>() < 1e-14 {
        return None;
    }
    // largest s keeping center + s*dir in the (closed) simplex
    let mut s_max = f64::INFINITY;
    for (i, &d) in dir.iter().enumerate() {
        if d < 0.0 {
            s_max = s_max.min(-center.p(i) / d);
        }
    }
    let q_at = |s: f64| -> ProbDist {
        let v: Vec<f64> = center
            .probs()
            .iter()
            .zip(&dir)
            .map(|(&c, &d)| (c + s * d).max(0.0))
            .collect();
        let total: f64 = v.iter().sum();
        ProbDist::from_type(v.iter().map(|p| p / total).collect()).unwrap()
    };
    let d_at = |s: f64| kl(&q_at(s), center).unwrap_or(f64::INFINITY);
    if d_at(s_max) < gamma {
        return None;
    }
    let s = bisect(|s| d_at(s) - gamma, 0.0, s_max, 1e-14).ok()?;
    Some(q_at(s))
}

/// Small dependency-free Nelder-Mead whose iterates stay on the simplex
/// (projection after every move).
fn nelder_mead_simplex(f: &dyn Fn(&[f64]) -> f64, start: &[f64], iters: usize) -> Vec<f64> {
    let k = start.len();
    let feas = |p: &[f64]| clamp_interior(&project_to_simplex(p));
    let mut pts: Vec<Vec<f64>> = vec![feas(start)];
    for i in 0..k {
        let mut p = start.to_vec();
        p[i] += 0.08;
        pts.push(feas(&p));
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst) = (idx[0], idx[idx.len() - 1]);
        if (vals[worst] - vals[best]).abs() < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..k)
            .map(|j| {
                idx[..idx.len() - 1].iter().map(|&i| pts[i][j]).sum::<f64>()
                    / (pts.len() - 1) as f64
            })
            .collect();
        let blend = |t: f64| -> Vec<f64> {
            feas(&centroid
                .iter()
                .zip(&pts[worst])
                .map(|(&c, &w)| c + t * (c - w))
                .collect::<Vec<f64>>())
        };
        let refl = blend(1.0);
        let fr = f(&refl);
        if fr < vals[best] {
            let exp = blend(2.0);
            let fe = f(&exp);
            if fe < fr {
                pts[worst] = exp;
                vals[worst] = fe;
            } else {
                pts[worst] = refl;
                vals[worst] = fr;
            }
        } else if fr < vals[worst] {
            pts[worst] = refl;
            vals[worst] = fr;
        } else {
            let contr = blend(-0.5);
            let fc = f(&contr);
            if fc < vals[worst] {
                pts[worst] = contr;
                vals[worst] = fc;
            } else {
                // shrink toward the best point
                for &i in &idx[1..] {
                    let shrunk: Vec<f64> = pts[best]
                        .iter()
                        .zip(&pts[i])
                        .map(|(&b, &p)| 0.5 * (b + p))
                        .collect();
                    pts[i] = feas(&shrunk);
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let best = (0..pts.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    pts[best].clone()
}

// ---------------------------------------------------------------------------
// Brute-force referees
// ---------------------------------------------------------------------------

/// Exhaustive extremum of `objective` over the simplex grid points passing
/// `feasible`. The referee for every nonconvex claim in the crate.
pub fn grid_oracle(
    objective: &dyn Fn(&ProbDist) -> f64,
    feasible: &dyn Fn(&ProbDist) -> bool,
    k: usize,
    step: f64,
    mode: ExtremizeMode,
) -> Result<(ProbDist, f64)> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::Domain(format!("grid step must be in (0,1), got {step}")));
    }
    let m = (1.0 / step).round() as u64;
    let sign = match mode {
        ExtremizeMode::Min => 1.0,
        ExtremizeMode::Max => -1.0,
    };
    let mut best: Option<(ProbDist, f64)> = None;
    for q in simplex_grid(k, m, DEFAULT_ENUM_CAP)? {
        if !feasible(&q) {
            continue;
        }
        let v = objective(&q);
        if best.as_ref().map(|b| sign * v < sign * b.1).unwrap_or(true) {
            best = Some((q, v));
        }
    }
    best.ok_or_else(|| Error::Domain("no feasible grid point".into()))
}

/// Cumulative log-factorial table, `table[i] = ln(i!)`.
pub struct LogFactorial {
    table: Vec<f64>,
}

impl LogFactorial {
    pub fn up_to(n: usize) -> LogFactorial {
        let mut table = vec![0.0; n + 1];
        for i in 1..=n {
            table[i] = table[i - 1] + (i as f64).ln();
        }
        LogFactorial { table }
    }

    pub fn ln_factorial(&self, i: u64) -> f64 {
        self.table[i as usize]
    }

    /// Log multinomial probability of a type class under `p`.
    pub fn log_type_prob(&self, t: &EmpiricalType, p: &ProbDist) -> f64 {
        let mut lp = self.ln_factorial(t.n());
        for (&c, &pi) in t.counts().iter().zip(p.probs()) {
            lp -= self.ln_factorial(c);
            if c > 0 {
                lp += c as f64 * pi.ln();
            }
        }
        lp
    }
}

/// Exact error probability of a type-decision rule at block length `n`:
/// the sum over all types in the error region of the multinomial probability
/// of their type class under `p_true`, accumulated in log space.
///
/// Returns the natural log of the probability, or `None` when the region is
/// empty.
pub fn sanov_error_probability(
    p_true: &ProbDist,
    decide_error: &dyn Fn(&EmpiricalType) -> bool,
    n: u64,
    cap: u128,
) -> Result<Option<f64>> {
    if n as usize > 10_000 {
        return Err(Error::Domain(format!("block length {n} above the 1e4 table limit")));
    }
    let types = enumerate_types(p_true.len(), n, cap)?;
    let lf = LogFactorial::up_to(n as usize);
    let mut logs: Vec<f64> = Vec::new();
    for t in &types {
        if decide_error(t) {
            logs.push(lf.log_type_prob(t, p_true));
        }
    }
    if logs.is_empty() {
        return Ok(None);
    }
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - mx).exp()).sum();
    Ok(Some(mx + sum.ln()))
}
