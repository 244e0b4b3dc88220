//! Worst case of the practical-regime sequential exponent over relative
//! entropy balls around both test measures: the exact optimization next to
//! its sqrt(r) approximation across a radius sweep.
//!
//! Writes the same table the `worst-case sprt --sweep` subcommand emits.

use htexp::divergences::{Ball, DivergenceSpec};
use htexp::simplex::ProbDist;
use htexp::solver::SolveOptions;
use htexp::sprt::{sprt_sensitivity, sprt_worst_case_exact};
use htexp::Hypothesis;
use rayon::prelude::*;

fn main() {
    let ph0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let ph1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let opts = SolveOptions::default();
    let sens = sprt_sensitivity(&ph0, &ph1, 1.0, Hypothesis::Null).unwrap();

    let n = 25;
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (1e-4f64.ln() + t * (1e-2f64.ln() - 1e-4f64.ln())).exp()
        })
        .collect();
    let rows: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let b0 = Ball::new(ph0.clone(), DivergenceSpec::Kl, r).unwrap();
            let b1 = Ball::new(ph1.clone(), DivergenceSpec::Kl, r).unwrap();
            let v = sprt_worst_case_exact(&ph0, &ph1, &b0, &b1, Hypothesis::Null, &opts).unwrap();
            (r, v)
        })
        .collect();

    println!("matched e0 = {:.6}, corollary theta = {:.4}", sens.matched_e, sens.theta_bar);
    println!("{:>12} {:>12} {:>12} {:>12}", "r", "e0 exact", "e0 approx", "thm8 min");
    for (r, v) in rows {
        let approx = (sens.matched_e - (r * sens.theta_bar).sqrt()).max(0.0);
        let thm8 = sens.approx_at(r, r);
        println!("{r:>12.6e} {v:>12.7} {approx:>12.7} {thm8:>12.7}");
    }
}
