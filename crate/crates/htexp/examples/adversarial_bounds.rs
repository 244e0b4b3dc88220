//! Worst cases when an adversary perturbs the observed type inside a
//! divergence ball: exact solves for the fixed-sample tests, the
//! adversarial-versus-mismatch sensitivity sandwich, and the product lower
//! bound for the sequential test.

use htexp::adversarial::{
    adv_glrt_worst_case, adv_lrt_sensitivity, adv_lrt_worst_case, adv_sprt_bounds,
    adv_vs_dist_bounds,
};
use htexp::divergences::DivergenceSpec;
use htexp::simplex::ProbDist;
use htexp::solver::SolveOptions;
use htexp::Hypothesis;

fn main() {
    let p0 = ProbDist::new(vec![0.9, 0.1]).unwrap();
    let p1 = ProbDist::new(vec![0.2, 0.8]).unwrap();
    let opts = SolveOptions::default();

    println!("likelihood ratio test at gamma = 0 under type tampering:");
    println!("{:>10} {:>12} {:>12}", "r", "e0 worst", "e1 worst");
    for r in [1e-5, 1e-4, 1e-3] {
        let e0 =
            adv_lrt_worst_case(&p0, &p1, 0.0, r, &DivergenceSpec::Kl, Hypothesis::Null, &opts)
                .unwrap();
        let e1 = adv_lrt_worst_case(
            &p0,
            &p1,
            0.0,
            r,
            &DivergenceSpec::Kl,
            Hypothesis::Alternative,
            &opts,
        )
        .unwrap();
        println!("{r:>10.0e} {e0:>12.6} {e1:>12.6}");
    }

    let t0 = adv_lrt_sensitivity(&p0, &p1, 0.0, 1.0, Hypothesis::Null).unwrap();
    println!("\nadversarial theta0 (KL ball units): {:.5}", t0.theta);

    let s = adv_vs_dist_bounds(&p0, &p1, 0.0, Hypothesis::Null).unwrap();
    println!(
        "sandwich in bare-variance units: {:.4} <= {:.4} <= {:.4}",
        s.lower, s.adv, s.dist
    );
    println!("(tampering the observation hurts less than mismatching the model)");

    println!("\nHoeffding test, gamma = 0.25:");
    println!("{:>10} {:>12} {:>12}", "r", "e0 worst", "e1 worst");
    for r in [0.0, 1e-4, 1e-3] {
        let (e0, e1) = adv_glrt_worst_case(&p0, &p1, 0.25, r, &DivergenceSpec::Kl, &opts).unwrap();
        println!("{r:>10.0e} {e0:>12.6} {e1:>12.6}");
    }

    println!("\nsequential test, product lower bound and inflated stopping times (n = 100):");
    println!("{:>10} {:>10} {:>10} {:>10} {:>9} {:>9}", "r", "factor0", "factor1", "product", "tau0", "tau1");
    for r in [0.0, 1e-4, 1e-3, 1e-2] {
        let b = adv_sprt_bounds(&p0, &p1, r, 1.0, 100.0).unwrap();
        println!(
            "{r:>10.0e} {:>10.5} {:>10.5} {:>10.5} {:>9.2} {:>9.2}{}",
            b.e0,
            b.e1,
            b.e0 * b.e1,
            b.inflated_tau0,
            b.inflated_tau1,
            if b.vacuous { "  (vacuous)" } else { "" }
        );
    }
}
