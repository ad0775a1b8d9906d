// Exhaustive and sampled checks of the hypercube edge bound, the
// entropy–sensitivity bound, and the degree–sensitivity bound.

use qdtlab::verify::{
    check_degree_sensitivity_catalog, check_edge_bound, check_entropy_sensitivity, Mode,
    VerificationReport,
};

fn summarize(report: &VerificationReport) {
    let extremal = report.extremal.as_ref();
    println!(
        "{} (n = {}, {} items): {} violations, tightest {} with slack {:.3e}",
        report.claim,
        report.population.n,
        report.population.count,
        report.violations.len(),
        extremal.map_or("-", |w| w.item.as_str()),
        extremal.map_or(f64::NAN, |w| w.slack)
    );
}

pub fn run_example() -> qdtlab::Result<()> {
    summarize(&check_edge_bound(4, Mode::Exhaustive, 1 << 20)?);
    summarize(&check_entropy_sensitivity(4, Mode::Exhaustive, 1 << 20)?);
    let sampled = Mode::Sampled {
        samples: 10_000,
        seed: 42,
    };
    summarize(&check_entropy_sensitivity(7, sampled, 1 << 20)?);
    summarize(&check_degree_sensitivity_catalog(3, 1e-6)?);
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
