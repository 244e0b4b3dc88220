//! The sequential probability ratio test with wrong measures: drifts, the
//! canonical and practical threshold regimes, the exponent product identity,
//! and the drift-sign failure mode.

use htexp::divergences::kl;
use htexp::simplex::ProbDist;
use htexp::sprt::{drifts, sprt_exponents, sprt_exponents_practical};

fn main() {
    let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let ph0 = ProbDist::new(vec![0.85, 0.15]).unwrap();
    let ph1 = ProbDist::new(vec![0.3, 0.7]).unwrap();

    let (d0, _) = drifts(&p0, &ph0, &ph1).unwrap();
    let (_, d1) = drifts(&p1, &ph0, &ph1).unwrap();
    println!("drifts of the mismatched statistic: {d0:.5} under H0, {d1:.5} under H1");

    let canon = sprt_exponents(&p0, &p1, &ph0, &ph1).unwrap();
    println!("\ncanonical thresholds (need the true pair):");
    println!("  e0 = {:.5}, e1 = {:.5}, product = {:.6}", canon.e0, canon.e1, canon.e0 * canon.e1);
    println!(
        "  matched product D(p0||p1)·D(p1||p0) = {:.6}",
        kl(&p0, &p1).unwrap() * kl(&p1, &p0).unwrap()
    );

    let prac = sprt_exponents_practical(&p0, &p1, &ph0, &ph1).unwrap();
    println!("\npractical thresholds (built from the test measures only):");
    println!(
        "  e0 = {:.5}, e1 = {:.5}, eta = {:.5}, stopping times {:.4}n / {:.4}n",
        prac.e0, prac.e1, prac.eta, prac.expected_tau0, prac.expected_tau1
    );

    // data drifting the wrong way makes the test fail outright
    let wrong = ProbDist::new(vec![0.3, 0.7]).unwrap();
    match sprt_exponents(&wrong, &p1, &ph0, &ph1) {
        Err(e) => println!("\ndata (0.3, 0.7) under H0: {e}"),
        Ok(_) => unreachable!(),
    }
}
