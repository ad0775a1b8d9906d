//! Entropy, binary entropy, density and combinatorial average sensitivity.
//!
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::boolfn::{bits_to_string, BoolFunction, RealFunction};
use crate::{Error, Result};

/// Pairwise (cascade) summation; order depends only on the slice length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// `E(f) = Σ_y p_y log₂(1/p_y)` with `X` uniform on the domain.
pub fn entropy(f: &BoolFunction) -> Result<f64> {
    entropy_from_fiber_sizes(f.fiber_sizes().into_values())
}

/// Entropy of the distribution with the given (unnormalised) fiber sizes;
/// usable for functions too wide for a dense table.
pub fn entropy_from_fiber_sizes(sizes: impl IntoIterator<Item = usize>) -> Result<f64> {
    let sizes: Vec<usize> = sizes.into_iter().filter(|&c| c > 0).collect();
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Err(Error::EmptyDomain);
    }
    let terms: Vec<f64> = sizes
        .iter()
        .map(|&count| {
            let p = count as f64 / total as f64;
            -p * p.log2()
        })
        .collect();
    // -0.0 for a single fiber
    Ok(pairwise_sum(&terms).max(0.0))
}

/// `H(η) = η log₂(1/η) + (1−η) log₂(1/(1−η))`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::ProbabilityOutOfRange(eta));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(eta) + term(1.0 - eta))
}

/// `p_g = E_x[g(x)]`.
pub fn density(g: &RealFunction) -> f64 {
    pairwise_sum(g.values()) / g.values().len() as f64
}

/// `s̄_g = E_{x,i}[(g(x) − g(x ⊕ e_i))²]`, by direct neighbour iteration.
pub fn avg_sensitivity(g: &RealFunction) -> f64 {
    let n = g.arity();
    let values = g.values();
    let per_point: Vec<f64> = (0..values.len())
        .map(|x| {
            (0..n)
                .map(|i| {
                    let diff = values[x] - values[x ^ (1 << i)];
                    diff * diff
                })
                .sum()
        })
        .collect();
    pairwise_sum(&per_point) / (n * values.len()) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputMetrics {
    /// Output value, written `y_1` first.
    pub y: String,
    pub p_y: f64,
    pub binary_entropy: f64,
    pub avg_sensitivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub m: usize,
    pub total: bool,
    pub domain_size: usize,
    pub entropy: f64,
    pub per_output: Vec<OutputMetrics>,
    /// `p_g` for single-output functions (undefined points count as 0).
    pub density: Option<f64>,
    /// `s̄_g` for single-output functions.
    pub avg_sensitivity: Option<f64>,
}

impl MetricsReport {
    pub fn compute(f: &BoolFunction) -> Result<Self> {
        let total = f.domain_size() as f64;
        let per_output = f
            .fiber_sizes()
            .into_iter()
            .map(|(y, count)| {
                let p_y = count as f64 / total;
                Ok(OutputMetrics {
                    y: bits_to_string(y, f.output_arity()),
                    p_y,
                    binary_entropy: binary_entropy(p_y)?,
                    avg_sensitivity: avg_sensitivity(&f.indicator(y)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let single = (f.output_arity() == 1).then(|| {
            RealFunction::from_fn(f.arity(), |x| (f.value(x) == Some(1)) as u8 as f64)
                .expect("arity already validated")
        });
        Ok(MetricsReport {
            n: f.arity(),
            m: f.output_arity(),
            total: f.is_total(),
            domain_size: f.domain_size(),
            entropy: entropy(f)?,
            per_output,
            density: single.as_ref().map(density),
            avg_sensitivity: single.as_ref().map(avg_sensitivity),
        })
    }

    /// One CSV row per output value.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.per_output {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}
