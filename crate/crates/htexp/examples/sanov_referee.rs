//! The brute-force referee: exact error probabilities by summing multinomial
//! type-class weights over the decision region, converging on the analytic
//! exponent as the block length grows.

use htexp::divergences::{kl, llr};
use htexp::lrt::matched_exponents;
use htexp::simplex::{ProbDist, DEFAULT_ENUM_CAP};
use htexp::solver::sanov_error_probability;

fn main() {
    let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    // a threshold whose decision boundary sits on the n = 20/40/60 lattices,
    // so the type quantization does not mask the slope
    let q = ProbDist::new(vec![0.55, 0.45]).unwrap();
    let c = llr(&p1, &p0);
    let gamma = q.expect(&c);
    let rep = matched_exponents(&p0, &p1, gamma).unwrap();
    println!("matched LRT at gamma = {gamma:.6}: analytic e0 = {:.6}", rep.e0);
    println!("{:>6} {:>14} {:>10} {:>8}", "n", "log eps0", "slope", "gap");
    for n in [20u64, 40, 60, 80, 100] {
        let le = sanov_error_probability(
            &p0,
            &|t| t.as_dist().expect(&c) >= gamma - 1e-12,
            n,
            DEFAULT_ENUM_CAP,
        )
        .unwrap()
        .unwrap();
        let slope = -le / n as f64;
        println!("{n:>6} {le:>14.5} {slope:>10.6} {:>8.5}", slope - rep.e0);
    }

    // a three-symbol Hoeffding region
    let h0 = ProbDist::new(vec![0.5, 0.3, 0.2]).unwrap();
    let gamma_h = 0.25;
    println!("\nHoeffding type-I region at gamma = {gamma_h} (k = 3): analytic e0 = {gamma_h}");
    for n in [20u64, 40, 60] {
        let le = sanov_error_probability(
            &h0,
            &|t| kl(&t.as_dist(), &h0).unwrap_or(f64::INFINITY) >= gamma_h - 1e-12,
            n,
            DEFAULT_ENUM_CAP,
        )
        .unwrap()
        .unwrap();
        println!("  n = {n:>3}: slope {:.6}", -le / n as f64);
    }
}
