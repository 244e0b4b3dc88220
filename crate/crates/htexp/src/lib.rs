//! Error exponents of binary hypothesis tests on finite alphabets, with and
//! without mismatch between the data-generating distributions and the
//! distributions the test is built from.
//!
//! Three tests are covered:
//!
//! * the fixed-sample-size likelihood ratio test ([`lrt`]),
//! * Hoeffding's generalized likelihood ratio test ([`glrt`]),
//! * Wald's sequential probability ratio test ([`sprt`]).
//!
//! For each test the crate computes the matched exponent pair, the mismatched
//! exponents when the test distributions differ from the true ones, the
//! worst-case exponents when the true distributions range over a Rényi or
//! f-divergence ball around the test distributions, and the first-order
//! `E - sqrt(r·theta)` expansion of that worst case for small radii. The
//! [`adversarial`] module treats the dual situation where the distributions
//! are known but an adversary moves the observed type inside a divergence
//! ball. All exponents are in nats.
//!
//! Every nonconvex solve has an independent brute-force referee: exhaustive
//! simplex grids and exact type enumeration live in [`solver`], and a
//! reproducible Monte Carlo simulator for the sequential test lives in
//! [`sprt`].
//!
//! ```
//! use htexp::simplex::ProbDist;
//! use htexp::lrt::matched_exponents;
//!
//! let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
//! let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
//! let rep = matched_exponents(&p0, &p1, 0.0).unwrap();
//! assert!((rep.e0 - rep.e1).abs() < 1e-9); // Chernoff point
//! ```

pub mod adversarial;
pub mod cli;
pub mod divergences;
pub mod glrt;
pub mod lrt;
pub mod simplex;
pub mod solver;
pub mod sprt;
pub mod tilted;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Misuse of an API (wrong spec kind, mismatched lengths, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// An enumeration would produce more items than the configured cap.
    #[error("enumeration needs {required} items, above the cap of {cap}; raise the cap to at least {required}")]
    CapExceeded { required: u128, cap: u128 },

    /// Root bracketing failed: no sign change on the interval.
    #[error("no sign change on bracket [{lo}, {hi}] (f(lo)={flo:.3e}, f(hi)={fhi:.3e})")]
    Bracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    /// An iterative solver stopped without meeting its tolerance. Carries the
    /// best iterate seen so the caller can still inspect it.
    #[error("solver did not converge: residual {residual:.3e} after {iters} iterations (best value {best_value:.6})")]
    NoConvergence {
        residual: f64,
        iters: usize,
        best_value: f64,
        best_point: Vec<f64>,
    },

    /// The average drift of the log-likelihood ratio is negative under the
    /// named hypothesis, so the sequential test errs with probability one.
    #[error("negative drift {drift:.6} nats/sample under hypothesis {hypothesis}: error probability tends to one")]
    DriftSign { hypothesis: u8, drift: f64 },

    /// Exactly zero drift: neither sign applies.
    #[error("zero drift under hypothesis {hypothesis}: threshold crossing direction undefined")]
    ZeroDrift { hypothesis: u8 },

    /// Scenario file problems, with file position where known.
    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Which of the two hypotheses an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl Hypothesis {
    pub fn index(self) -> usize {
        match self {
            Hypothesis::Null => 0,
            Hypothesis::Alternative => 1,
        }
    }

    pub fn other(self) -> Hypothesis {
        match self {
            Hypothesis::Null => Hypothesis::Alternative,
            Hypothesis::Alternative => Hypothesis::Null,
        }
    }
}
