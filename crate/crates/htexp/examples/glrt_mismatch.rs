//! Hoeffding's generalized likelihood ratio test under mismatch: both
//! exponents, the total-variation upper bound on the type-I exponent, and
//! the small-threshold quadratic approximation against the exact boundary
//! solve.

use htexp::glrt::{glrt_e0, glrt_e0_small_gamma, glrt_e0_upper, glrt_exponents};
use htexp::simplex::ProbDist;
use htexp::solver::SolveOptions;

fn main() {
    let p0 = ProbDist::new(vec![0.85, 0.15]).unwrap();
    let ph0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let opts = SolveOptions::default();

    println!("mismatched Hoeffding test, data (0.85, 0.15), test center (0.9, 0.1):");
    println!("{:>8} {:>9} {:>9} {:>9}", "gamma", "e0", "e0 bound", "e1");
    for gamma in [0.05, 0.1, 0.2, 0.35, 0.5] {
        let rep = glrt_exponents(&p0, &p1, &ph0, gamma, &opts).unwrap();
        println!(
            "{gamma:>8.3} {:>9.5} {:>9.5} {:>9.5}",
            rep.e0, rep.e0_upper, rep.e1
        );
    }

    // the quadratic program takes over as the threshold shrinks
    let p0 = ProbDist::new(vec![0.89, 0.11]).unwrap();
    let ph0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    println!("\nsmall-threshold quadratic approximation (data (0.89, 0.11)):");
    println!("{:>8} {:>12} {:>12} {:>10}", "gamma", "exact", "qcqp dual", "rel err");
    for gamma in [0.1, 0.03, 0.01, 0.003] {
        let exact = glrt_e0(&p0, &ph0, gamma, &opts).unwrap();
        let approx = glrt_e0_small_gamma(&p0, &ph0, gamma).unwrap();
        println!(
            "{gamma:>8.3} {exact:>12.8} {approx:>12.8} {:>10.4}",
            (exact - approx).abs() / gamma
        );
    }

    let ub = glrt_e0_upper(&p0, &ph0, 0.05).unwrap();
    println!("\nupper bound at gamma = 0.05: {ub:.6}");
}
