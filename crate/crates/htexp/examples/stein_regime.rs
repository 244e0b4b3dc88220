//! Stein-regime thresholds and exponents under mismatch: fix the type-I
//! error at epsilon, let the type-II error decay at its best rate.

use htexp::divergences::kl;
use htexp::lrt::{stein_exponent, stein_threshold};
use htexp::simplex::ProbDist;
use htexp::tilted::tilted_lrt;

fn main() {
    let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let ph0 = ProbDist::new(vec![0.85, 0.15]).unwrap();
    let ph1 = ProbDist::new(vec![0.3, 0.7]).unwrap();

    println!("finite-n Stein thresholds at epsilon = 0.05 (mismatched test):");
    println!("{:>8} {:>12} {:>12}", "n", "gamma_hat", "variance");
    for n in [100u64, 1_000, 10_000, 100_000] {
        let t = stein_threshold(&p0, &ph0, &ph1, n, 0.05).unwrap();
        println!("{n:>8} {:>12.6} {:>12.6}", t.gamma_hat, t.variance);
    }

    let matched = stein_exponent(&p0, &p1, &p0, &p1).unwrap();
    println!("\nmatched Stein exponent:        {matched:.6} = D(p0||p1) = {:.6}", kl(&p0, &p1).unwrap());

    // test measures that are tilts of the true pair lose nothing
    let t0 = tilted_lrt(&p0, &p1, 0.2).unwrap();
    let t1 = tilted_lrt(&p0, &p1, 0.9).unwrap();
    let tilted = stein_exponent(&p0, &p1, &t0, &t1).unwrap();
    println!("tilted test measures:          {tilted:.6}");

    // a genuinely misaligned test pair (three symbols) pays a price
    let q0 = ProbDist::new(vec![0.5, 0.3, 0.2]).unwrap();
    let q1 = ProbDist::new(vec![0.2, 0.3, 0.5]).unwrap();
    let w0 = ProbDist::new(vec![0.6, 0.15, 0.25]).unwrap();
    let w1 = ProbDist::new(vec![0.25, 0.45, 0.3]).unwrap();
    let lossy = stein_exponent(&q0, &q1, &w0, &w1).unwrap();
    println!(
        "\nthree-symbol example: mismatched {lossy:.6} vs matched {:.6}",
        kl(&q0, &q1).unwrap()
    );
}
