// Entropy, per-output binary entropies and average sensitivities of a few
// catalog functions, plus the CSV form of one report.

use qdtlab::boolfn::catalog;
use qdtlab::metrics::MetricsReport;

pub fn run_example() -> qdtlab::Result<()> {
    for (name, n) in [
        ("OR", 3),
        ("MAJ", 3),
        ("PARITY", 4),
        ("IDENTITY", 2),
        ("BV", 8),
    ] {
        let f = catalog(name, n)?;
        let report = MetricsReport::compute(&f)?;
        let sum_h: f64 = report.per_output.iter().map(|o| o.binary_entropy).sum();
        println!(
            "{name}_{n}: E(f) = {:.6}, sum of H(p_y) = {sum_h:.6}, outputs = {}",
            report.entropy,
            report.per_output.len()
        );
        assert!(report.entropy <= sum_h + 1e-12);
    }

    let report = MetricsReport::compute(&catalog("OR", 2)?)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
