// The entropy lower bound on approximate degree, checked link by link on a
// handful of total functions.

use qdtlab::boolfn::catalog;
use qdtlab::verify::check_main_chain;

pub fn run_example() -> qdtlab::Result<()> {
    for (name, n) in [("OR", 3), ("MAJ", 3), ("IDENTITY", 2)] {
        let report = check_main_chain(&catalog(name, n)?)?;
        let d = &report.details["d"];
        let e = report.details["entropy"].as_f64().unwrap_or(f64::NAN);
        println!(
            "{name}_{n}: d = {d}, E(f) = {e:.4}, E(f)/36 = {:.4}, {}",
            e / 36.0,
            if report.passed() {
                "chain holds"
            } else {
                "chain VIOLATED"
            }
        );
        for row in report.details["per_output"]
            .as_array()
            .into_iter()
            .flatten()
        {
            println!(
                "    {}: p = {:.4}, s = {:.4}, H = {:.4}, witness degree {}",
                row["y"].as_str().unwrap_or("?"),
                row["p_y"].as_f64().unwrap_or(f64::NAN),
                row["avg_sensitivity"].as_f64().unwrap_or(f64::NAN),
                row["binary_entropy"].as_f64().unwrap_or(f64::NAN),
                row["witness_degree"]
            );
        }
    }
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
