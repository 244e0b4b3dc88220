//! The error exponent tradeoff of the likelihood ratio test, matched and
//! mismatched: sweep the threshold and print both exponents, the achieving
//! distribution, and the primal/dual agreement.
//!
//! ```text
//! cargo run --release --example lrt_tradeoff
//! ```

use htexp::divergences::kl;
use htexp::lrt::{matched_exponents, mismatched_exponents};
use htexp::simplex::ProbDist;

fn main() {
    let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let lo = -kl(&p0, &p1).unwrap();
    let hi = kl(&p1, &p0).unwrap();

    println!("matched likelihood ratio test, p0 = (0.9, 0.1), p1 = (0.2, 0.8)");
    println!("{:>8} {:>9} {:>9} {:>10} {:>10}", "gamma", "e0", "e1", "dual gap0", "dual gap1");
    for i in 0..=10 {
        let gamma = lo + (hi - lo) * i as f64 / 10.0;
        let rep = matched_exponents(&p0, &p1, gamma).unwrap();
        println!(
            "{:>8.4} {:>9.5} {:>9.5} {:>10.2e} {:>10.2e}",
            gamma,
            rep.e0,
            rep.e1,
            (rep.e0 - rep.dual0).abs(),
            (rep.e1 - rep.dual1).abs()
        );
    }

    // the Chernoff point: gamma = 0 balances both exponents
    let rep = matched_exponents(&p0, &p1, 0.0).unwrap();
    println!(
        "\nChernoff point: e0 = e1 = {:.5}, achiever = ({:.5}, {:.5})",
        rep.e0,
        rep.achiever0.p(0),
        rep.achiever0.p(1)
    );

    // now run the same test built from slightly wrong distributions
    let ph0 = ProbDist::new(vec![0.85, 0.15]).unwrap();
    let ph1 = ProbDist::new(vec![0.3, 0.7]).unwrap();
    println!("\nsame data, test built from (0.85, 0.15) / (0.3, 0.7):");
    println!("{:>8} {:>9} {:>9}", "gamma", "e0", "e1");
    for i in 1..10 {
        let gamma = lo + (hi - lo) * i as f64 / 10.0;
        match mismatched_exponents(&p0, &p1, &ph0, &ph1, gamma) {
            Ok(rep) => println!("{gamma:>8.4} {:>9.5} {:>9.5}", rep.e0, rep.e1),
            Err(e) => println!("{gamma:>8.4} {e}"),
        }
    }
}
