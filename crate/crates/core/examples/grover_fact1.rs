// Grover search over four items, and the degree bound on amplitudes and
// output probabilities after each query.

use qdtlab::qsim::{acceptance_prob, build_grover};
use qdtlab::verify::check_fact1;

pub fn run_example() -> qdtlab::Result<()> {
    let n = 4;
    for iterations in 1..=2 {
        let (alg, meas) = build_grover(n, iterations)?;
        let marked = 0b0100;
        println!(
            "T = {iterations}: Pr[find item 2 | only item 2 marked] = {:.6}",
            acceptance_prob(&alg, &meas, marked, 2)?
        );
        let report = check_fact1(&alg, &meas, n)?;
        for row in report.details.as_array().into_iter().flatten() {
            println!(
                "    t = {}: amplitude degree {}, probability degree {}",
                row["t"], row["max_amplitude_degree"], row["max_acceptance_degree"]
            );
        }
        println!("    bound respected: {}", report.passed());
    }
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
