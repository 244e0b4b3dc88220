//! Monte Carlo simulation of the sequential test: error-rate slopes against
//! the analytic exponent coefficient, first-order stopping times, and
//! bit-reproducibility of the parallel run.

use htexp::divergences::kl;
use htexp::simplex::ProbDist;
use htexp::sprt::{estimate_exponent_slope, simulate_sprt, SprtConfig};
use htexp::Hypothesis;

fn main() {
    let ph0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let ph1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let trials = 200_000;
    let seed = 42;

    println!("matched sequential test, {trials} trials per threshold, seed {seed}:");
    println!(
        "{:>6} {:>12} {:>10} {:>10}",
        "gamma", "err rate", "mean tau", "tau/gamma"
    );
    let mut pts = Vec::new();
    for gamma in [4.0, 5.0, 6.0, 7.0] {
        let config = SprtConfig::new(ph0.clone(), ph1.clone(), gamma, gamma).unwrap();
        let stats = simulate_sprt(&ph1, &config, Hypothesis::Alternative, trials, seed).unwrap();
        println!(
            "{gamma:>6.1} {:>12.3e} {:>10.3} {:>10.4}",
            stats.err_rate,
            stats.mean_tau,
            stats.mean_tau / gamma
        );
        pts.push((gamma, stats.err_rate));
    }
    let slope = estimate_exponent_slope(&pts).unwrap();
    println!("regression slope of -log(err) on gamma: {slope:.4}  (matched coefficient: 1)");
    println!(
        "first-order stopping time gamma/D(p1||p0): 1/{:.4} = {:.4} per nat",
        kl(&ph1, &ph0).unwrap(),
        1.0 / kl(&ph1, &ph0).unwrap()
    );

    // same seed, same numbers, regardless of thread count
    let config = SprtConfig::new(ph0.clone(), ph1.clone(), 6.0, 6.0).unwrap();
    let a = simulate_sprt(&ph1, &config, Hypothesis::Alternative, trials, seed).unwrap();
    let b = simulate_sprt(&ph1, &config, Hypothesis::Alternative, trials, seed).unwrap();
    assert_eq!(a.err_count, b.err_count);
    println!("\nrepeat run: err_count {} == {} (bit-reproducible)", a.err_count, b.err_count);
}
