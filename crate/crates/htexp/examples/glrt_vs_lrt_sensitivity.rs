//! How much more sensitive is Hoeffding's test to mismatch than a likelihood
//! ratio test tuned to the same type-I exponent? The ratio of worst-case
//! sqrt(theta) deductions, against its analytic bounds.

use htexp::divergences::{kl, lrt_statistic};
use htexp::glrt::{glrt_sensitivity, glrt_sensitivity_ratio_bounds};
use htexp::lrt::lrt_sensitivity;
use htexp::simplex::ProbDist;
use htexp::solver::{bisect, SolveOptions};
use htexp::tilted::tilted_lrt;
use htexp::Hypothesis;

fn main() {
    let opts = SolveOptions::default();
    // first pair: the LRT tilt is itself the worst sphere point (ratio 1);
    // second pair pulls the tilt away from the heavy-chi-squared side
    let pairs = [
        ((0.9, 0.1), (0.2, 0.8)),
        ((0.3, 0.7), (0.1, 0.9)),
    ];
    for ((a0, a1), (b0, b1)) in pairs {
        let ph0 = ProbDist::new(vec![a0, a1]).unwrap();
        let ph1 = ProbDist::new(vec![b0, b1]).unwrap();
        println!("test center ({a0}, {a1}), alternative ({b0}, {b1}):");
        println!(
            "{:>8} {:>10} {:>10} {:>9} {:>9} {:>9}",
            "gamma_h", "theta_h", "theta_lrt", "ratio", "tight", "weak"
        );
        for gamma_h in [0.05, 0.1, 0.2, 0.3] {
            // matched LRT threshold with the same type-I exponent
            let g = |l: f64| kl(&tilted_lrt(&ph0, &ph1, l).unwrap(), &ph0).unwrap() - gamma_h;
            if g(1.0) < 0.0 {
                continue;
            }
            let lam = bisect(g, 0.0, 1.0, 1e-13).unwrap();
            let q = tilted_lrt(&ph0, &ph1, lam).unwrap();
            let gamma_lrt = lrt_statistic(&q, &ph0, &ph1);

            let th_h = glrt_sensitivity(&ph0, gamma_h, 1.0, &opts).unwrap().theta;
            let th_l = lrt_sensitivity(&ph0, &ph1, gamma_lrt, 1.0, Hypothesis::Null)
                .unwrap()
                .theta;
            let bounds = glrt_sensitivity_ratio_bounds(&ph0, gamma_h).unwrap();
            println!(
                "{gamma_h:>8.3} {th_h:>10.5} {th_l:>10.5} {:>9.4} {:>9.4} {:>9.4}",
                (th_h / th_l).sqrt(),
                bounds.upper_tight,
                bounds.upper_weak
            );
        }
        println!();
    }
    println!("ratio = sqrt(theta_h/theta_lrt), the ratio of worst-case exponent deductions");
}
