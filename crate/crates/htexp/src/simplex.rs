//! Probability distributions on a finite alphabet, empirical types, and the
//! exhaustive enumerations the brute-force oracles are built on.

use crate::{Error, Result};

/// Smallest probability a user-supplied model distribution may assign to a
/// symbol. Entries below this are lifted to the floor and the vector is
/// renormalized, so downstream code can divide and take logs freely.
/// Empirical types are exempt: they may contain exact zeros.
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// Sum-to-one tolerance for user input.
pub const SUM_TOL: f64 = 1e-12;

/// Default cap on the number of items an enumeration may produce.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// A finite observation alphabet: a size and symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    /// Alphabet with default labels `x1..xk`.
    pub fn of_size(k: usize) -> Result<Alphabet> {
        if k < 2 {
            return Err(Error::Domain(format!("alphabet size must be >= 2, got {k}")));
        }
        Ok(Alphabet {
            labels: (1..=k).map(|i| format!("x{i}")).collect(),
        })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Alphabet> {
        if labels.len() < 2 {
            return Err(Error::Domain(format!(
                "alphabet size must be >= 2, got {}",
                labels.len()
            )));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::Domain("alphabet labels must be distinct".into()));
        }
        Ok(Alphabet { labels })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A probability vector over a finite alphabet. The universal currency of the
/// crate: every exponent, tilt and divergence consumes and produces these.
///
/// Two construction paths exist. [`ProbDist::new`] is for model
/// distributions: it enforces the support floor. [`ProbDist::from_type`] (and
/// [`EmpiricalType::as_dist`]) admits exact zeros, because types live only in
/// oracle sums where the `0·log 0 = 0` convention applies.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    /// Validated model distribution: entries nonnegative, sum within
    /// [`SUM_TOL`] of one, then floored at [`SUPPORT_FLOOR`] and
    /// renormalized.
    pub fn new(probs: Vec<f64>) -> Result<ProbDist> {
        if probs.len() < 2 {
            return Err(Error::Domain(format!(
                "distribution needs at least 2 entries, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Domain(format!("invalid probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Domain(format!(
                "probabilities sum to {sum}, expected 1 within {SUM_TOL}"
            )));
        }
        let mut probs = probs;
        if probs.iter().any(|&p| p < SUPPORT_FLOOR) {
            for p in probs.iter_mut() {
                *p = p.max(SUPPORT_FLOOR);
            }
            let s: f64 = probs.iter().sum();
            for p in probs.iter_mut() {
                *p /= s;
            }
            // renormalizing can pull a floored entry a hair below the floor;
            // absorb the correction into the largest entry
            let imax = (0..probs.len())
                .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
                .unwrap();
            let mut excess = 0.0;
            for (i, p) in probs.iter_mut().enumerate() {
                if i != imax && *p < SUPPORT_FLOOR {
                    excess += SUPPORT_FLOOR - *p;
                    *p = SUPPORT_FLOOR;
                }
            }
            probs[imax] -= excess;
        }
        Ok(ProbDist { probs })
    }

    /// Distribution that may contain exact zeros (empirical types).
    pub fn from_type(probs: Vec<f64>) -> Result<ProbDist> {
        if probs.len() < 2 {
            return Err(Error::Domain(format!(
                "distribution needs at least 2 entries, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Domain(format!("invalid probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("type frequencies sum to {sum}")));
        }
        Ok(ProbDist { probs })
    }

    /// Two-symbol distribution `(1-t, t)`.
    pub fn bernoulli(t: f64) -> Result<ProbDist> {
        ProbDist::new(vec![1.0 - t, t])
    }

    pub fn uniform(k: usize) -> Result<ProbDist> {
        ProbDist::new(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of the `i`-th symbol.
    pub fn p(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Expectation of a per-symbol score.
    pub fn expect(&self, score: &[f64]) -> f64 {
        self.probs.iter().zip(score).map(|(p, s)| p * s).sum()
    }

    /// Variance of a per-symbol score.
    pub fn variance(&self, score: &[f64]) -> f64 {
        let mean = self.expect(score);
        self.probs
            .iter()
            .zip(score)
            .map(|(p, s)| p * (s - mean) * (s - mean))
            .sum()
    }
}

impl std::ops::Index<usize> for ProbDist {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// Empirical type of an observed sequence: symbol counts and total length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalType {
    counts: Vec<u64>,
    n: u64,
}

impl EmpiricalType {
    pub fn new(counts: Vec<u64>) -> Result<EmpiricalType> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::Domain("empty type: total count is zero".into()));
        }
        Ok(EmpiricalType { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The induced distribution `counts/n`. Zero entries are kept.
    pub fn as_dist(&self) -> ProbDist {
        let n = self.n as f64;
        ProbDist {
            probs: self.counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }
}

/// Number of compositions of `n` into `k` nonnegative parts,
/// `binomial(n+k-1, k-1)`, or `None` on overflow.
pub fn composition_count(k: usize, n: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    let r = (k - 1) as u128;
    for i in 0..r {
        acc = acc.checked_mul(n as u128 + r - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// All compositions of `n` into `k` nonnegative parts, lexicographic order.
pub fn enumerate_types(k: usize, n: u64, cap: u128) -> Result<Vec<EmpiricalType>> {
    if k < 2 || n == 0 {
        return Err(Error::Domain(format!("need k >= 2 and n >= 1, got k={k}, n={n}")));
    }
    let required = composition_count(k, n).ok_or(Error::CapExceeded { required: u128::MAX, cap })?;
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    let mut out = Vec::with_capacity(required as usize);
    let mut counts = vec![0u64; k];
    fill_compositions(&mut out, &mut counts, 0, n);
    Ok(out)
}

fn fill_compositions(out: &mut Vec<EmpiricalType>, counts: &mut Vec<u64>, pos: usize, rest: u64) {
    if pos == counts.len() - 1 {
        counts[pos] = rest;
        out.push(EmpiricalType {
            counts: counts.clone(),
            n: counts.iter().sum(),
        });
        return;
    }
    for c in 0..=rest {
        counts[pos] = c;
        fill_compositions(out, counts, pos + 1, rest - c);
    }
}

/// All simplex points with coordinates `j/m`. Points touching the boundary
/// are lifted to the support floor and renormalized, so every grid point is a
/// valid full-support model distribution.
pub fn simplex_grid(k: usize, m: u64, cap: u128) -> Result<Vec<ProbDist>> {
    let types = enumerate_types(k, m, cap)?;
    Ok(types
        .into_iter()
        .map(|t| {
            let d = t.as_dist();
            ProbDist::new(d.probs).expect("grid point is a valid distribution")
        })
        .collect())
}
