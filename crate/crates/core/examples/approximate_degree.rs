// Approximate degree via linear programming: the best error at each degree
// bound for a few symmetric functions, then the family LP for IDENTITY₂.

use qdtlab::boolfn::catalog;
use qdtlab::lpdeg::{approx_degree, family_degree, min_error, APPROX_ERROR};

pub fn run_example() -> qdtlab::Result<()> {
    for (name, n) in [("OR", 4), ("AND", 3), ("MAJ", 3), ("PARITY", 3)] {
        let g = catalog(name, n)?.to_real()?;
        let errors = (0..=n)
            .map(|d| min_error(&g, d).map(|e| format!("{e:.4}")))
            .collect::<qdtlab::Result<Vec<_>>>()?;
        println!(
            "{name}_{n}: best error by degree [{}], adeg = {}",
            errors.join(", "),
            approx_degree(&g, APPROX_ERROR)?
        );
    }

    let f = catalog("IDENTITY", 2)?;
    let (d, family) = family_degree(&f)?;
    println!(
        "IDENTITY_2 family: degree {d}, error {:.2e}, worst constraint violation {:.2e}",
        family.error,
        family.max_violation(&f)
    );
    println!("{}", serde_json::to_string_pretty(&family.to_json(&f))?);
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
