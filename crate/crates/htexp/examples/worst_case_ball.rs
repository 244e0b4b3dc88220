//! Worst-case exponents of the mismatched likelihood ratio test when the
//! true distribution ranges over a divergence ball around the test
//! distribution, next to the sqrt(r) sensitivity approximation.

use htexp::divergences::{Ball, DivergenceSpec};
use htexp::lrt::{lrt_sensitivity, worst_case_exponent};
use htexp::simplex::ProbDist;
use htexp::solver::SolveOptions;
use htexp::Hypothesis;

fn main() {
    let ph0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let ph1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let gamma = 0.0;
    let opts = SolveOptions::default();

    for spec in [
        DivergenceSpec::Kl,
        DivergenceSpec::ChiSquared,
        DivergenceSpec::Renyi { order: 0.5 },
    ] {
        let sens = lrt_sensitivity(&ph0, &ph1, gamma, spec.curvature(), Hypothesis::Null).unwrap();
        println!(
            "{spec:?} ball, gamma = {gamma}: matched e0 = {:.5}, theta0 = {:.5}",
            sens.matched_e, sens.theta
        );
        println!("{:>10} {:>12} {:>12}", "r", "e0 worst", "approx");
        for r in [1e-6, 1e-5, 1e-4, 1e-3] {
            let ball = Ball::new(ph0.clone(), spec, r).unwrap();
            let worst =
                worst_case_exponent(&ph0, &ph1, gamma, &ball, Hypothesis::Null, &opts).unwrap();
            let approx = sens.at_radius(r);
            println!("{r:>10.0e} {worst:>12.6} {:>12.6}", approx.approx_e);
        }
        println!();
    }
}
