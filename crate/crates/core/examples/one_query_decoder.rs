// A single query recovers `log₂ n` bits: the decoder outputs `z` from the
// encoding `e(z)` with certainty, although `E(f) = log₂ n`.

use qdtlab::boolfn::{bv_encoding, catalog, InputIndex};
use qdtlab::metrics::entropy;
use qdtlab::qsim::{acceptance_prob, build_example1};

pub fn run_example() -> qdtlab::Result<()> {
    let n = 8;
    let (alg, meas) = build_example1(n)?;
    println!(
        "n = {n}: {} qubits, {} query, E(f) = {}",
        alg.registers().num_qubits(),
        alg.queries(),
        entropy(&catalog("BV", n)?)?
    );
    let index = InputIndex::new(n);
    for z in 0..n as u64 {
        let x = bv_encoding(n, z);
        let p = acceptance_prob(&alg, &meas, x, z)?;
        println!(
            "  z = {z}  e(z) = {}  Pr[output z] = {p:.12}",
            index.to_bitstring(x)
        );
    }
    Ok(())
}

fn main() -> qdtlab::Result<()> {
    run_example()
}
