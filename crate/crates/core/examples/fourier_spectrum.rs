// Walsh–Hadamard spectrum of MAJ₃, its degree, and the two ways of
// computing average sensitivity.

use qdtlab::boolfn::{catalog, InputIndex};
use qdtlab::fourier::{fourier_sensitivity, interpolate, wht};
use qdtlab::metrics::avg_sensitivity;

pub fn run_example() -> qdtlab::Result<()> {
    let g = catalog("MAJ", 3)?.to_real()?;
    let spectrum = wht(&g);
    let index = InputIndex::new(3);
    for (r, c) in spectrum.coeffs().iter().enumerate() {
        if c.abs() > 1e-12 {
            println!("  hat g[{}] = {c:+.4}", index.to_bitstring(r));
        }
    }
    println!("Fourier degree: {}", spectrum.degree());
    println!("multilinear degree: {}", interpolate(&g).degree());
    println!(
        "average sensitivity: combinatorial {:.6}, spectral {:.6}",
        avg_sensitivity(&g),
        fourier_sensitivity(&spectrum)
    );
    println!(
        "Parseval: sum of squares {:.6}, density {:.6}",
        spectrum.squared_mass(),
        spectrum.coeff(0)
    );
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
