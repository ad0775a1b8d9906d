//! Parity-basis (Walsh–Hadamard) spectra and multilinear interpolation.
//!
//! The character for `r ∈ {0,1}^n` is `χ_r(x) = (−1)^{popcount(x AND r)}` and
//! `ĝ_r = E_x[g(x) χ_r(x)]`, so `g = Σ_r ĝ_r χ_r`.

use num_complex::Complex64;

use crate::boolfn::RealFunction;
use crate::Result;

/// Default magnitude below which a coefficient counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Unnormalised in-place fast Walsh–Hadamard transform. Applying it twice
/// multiplies by `data.len()`.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Subsets `r` of `{1..n}` with `|r| ≤ d`, in increasing index order.
pub fn low_degree_sets(n: usize, d: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|r| r.count_ones() as usize <= d)
        .collect()
}

/// `χ_r(x)`.
#[inline]
pub fn character(r: usize, x: usize) -> f64 {
    if (r & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
    zero_tol: f64,
}

impl Spectrum {
    /// Spectrum from explicit coefficients indexed by `r`.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        // reuse RealFunction's length/finiteness validation
        let checked = RealFunction::new(n, coeffs)?;
        Ok(Spectrum {
            n,
            coeffs: checked.into_values(),
            zero_tol: DEFAULT_ZERO_TOL,
        })
    }

    pub fn with_zero_tol(mut self, tol: f64) -> Self {
        self.zero_tol = tol;
        self
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, r: usize) -> f64 {
        self.coeffs[r]
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    /// Largest `|r|` with `|ĝ_r| > zero_tol`; 0 when everything is below it.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > self.zero_tol)
            .map(|(r, _)| r.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `Σ_r ĝ_r²`, which equals `E_x[g(x)²]`.
    pub fn squared_mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Coefficients with `|r| ≤ d`, as `(r, ĝ_r)`.
    pub fn truncated(&self, d: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs
            .iter()
            .copied()
            .enumerate()
            .filter(move |(r, _)| r.count_ones() as usize <= d)
    }

    /// Values `g(x) = Σ_r ĝ_r χ_r(x)` on the whole cube.
    pub fn inverse(&self) -> RealFunction {
        let mut values = self.coeffs.clone();
        fwht_in_place(&mut values);
        RealFunction::new(self.n, values).expect("spectrum has valid arity")
    }
}

/// Normalised Walsh–Hadamard transform, `O(n·2^n)`.
pub fn wht(g: &RealFunction) -> Spectrum {
    let mut coeffs = g.values().to_vec();
    fwht_in_place(&mut coeffs);
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Spectrum {
        n: g.arity(),
        coeffs,
        zero_tol: DEFAULT_ZERO_TOL,
    }
}

/// `(4/n)·Σ_r |r|·ĝ_r²`: average sensitivity read off the spectrum.
pub fn fourier_sensitivity(s: &Spectrum) -> f64 {
    let weighted: f64 = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(r, c)| r.count_ones() as f64 * c * c)
        .sum();
    4.0 * weighted / s.n as f64
}

/// Polynomial `Σ_S c_S ∏_{i∈S} x_i` in the monomial basis, indexed by the
/// bitmask of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPoly {
    n: usize,
    coeffs: Vec<f64>,
    zero_tol: f64,
}

impl MultilinearPoly {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, set: usize) -> f64 {
        self.coeffs[set]
    }

    pub fn with_zero_tol(mut self, tol: f64) -> Self {
        self.zero_tol = tol;
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > self.zero_tol)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Evaluate at a cube point.
    pub fn evaluate(&self, x: usize) -> f64 {
        // Σ over monomials S ⊆ x
        let mut total = 0.0;
        let mut s = x;
        loop {
            total += self.coeffs[s];
            if s == 0 {
                break;
            }
            s = (s - 1) & x;
        }
        total
    }

    /// Evaluate at an arbitrary real point.
    pub fn evaluate_real(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.n);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| {
                c * (0..self.n)
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| point[i])
                    .product::<f64>()
            })
            .sum()
    }
}

/// Unique multilinear interpolant of `values`, by Möbius inversion in `O(n·2^n)`.
pub fn interpolate(values: &RealFunction) -> MultilinearPoly {
    let mut coeffs = values.values().to_vec();
    for i in 0..values.arity() {
        let bit = 1 << i;
        for s in 0..coeffs.len() {
            if s & bit != 0 {
                coeffs[s] -= coeffs[s ^ bit];
            }
        }
    }
    MultilinearPoly {
        n: values.arity(),
        coeffs,
        zero_tol: DEFAULT_ZERO_TOL,
    }
}

/// Amplitude polynomial with real and imaginary parts interpolated separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    pub re: MultilinearPoly,
    pub im: MultilinearPoly,
}

impl ComplexPoly {
    pub fn interpolate(n: usize, values: &[Complex64], zero_tol: f64) -> Result<Self> {
        let re = RealFunction::new(n, values.iter().map(|z| z.re).collect())?;
        let im = RealFunction::new(n, values.iter().map(|z| z.im).collect())?;
        Ok(ComplexPoly {
            re: interpolate(&re).with_zero_tol(zero_tol),
            im: interpolate(&im).with_zero_tol(zero_tol),
        })
    }

    pub fn degree(&self) -> usize {
        self.re.degree().max(self.im.degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::catalog;
    use crate::metrics::avg_sensitivity;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct `2^{-n} Σ_x g(x) χ_r(x)` summation.
    fn direct_coeffs(g: &RealFunction) -> Vec<f64> {
        let size = g.values().len();
        (0..size)
            .map(|r| (0..size).map(|x| g.value(x) * character(r, x)).sum::<f64>() / size as f64)
            .collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn wht_of_or2() {
        let or = catalog("OR", 2).unwrap().to_real().unwrap();
        let s = wht(&or);
        let oracle = direct_coeffs(&or);
        assert!(close(&oracle, &[0.75, -0.25, -0.25, -0.25], 1e-15));
        assert!(close(s.coeffs(), &oracle, 1e-15));
        assert_eq!(s.degree(), 2);
        assert!((fourier_sensitivity(&s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wht_of_constant_and_parity() {
        let s = wht(&RealFunction::constant(3, 1.0).unwrap());
        assert!(close(
            s.coeffs(),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            0.0
        ));
        assert_eq!(s.degree(), 0);
        assert_eq!(fourier_sensitivity(&s), 0.0);
        for n in [2, 3] {
            let g = catalog("PARITY", n).unwrap().to_real().unwrap();
            let oracle = direct_coeffs(&g);
            let top = (1 << n) - 1;
            for (r, c) in oracle.iter().enumerate() {
                let expected = match r {
                    0 => 0.5,
                    r if r == top => -0.5,
                    _ => 0.0,
                };
                assert!((c - expected).abs() < 1e-15);
            }
            let s = wht(&g);
            assert!(close(s.coeffs(), &oracle, 1e-15));
            assert_eq!(s.degree(), n);
            assert!((fourier_sensitivity(&s) - 1.0).abs() < 1e-15);
        }
        assert_eq!(wht(&RealFunction::constant(2, 0.5).unwrap()).degree(), 0);
    }

    #[test]
    fn interpolate_or_and_affine() {
        // oracle: solve the 4×4 system for a + b x1 + c x2 + e x1x2 through OR's values;
        // the system is lower triangular in the subset order, so back-substitute by hand.
        let or = catalog("OR", 2).unwrap().to_real().unwrap();
        let a = or.value(0);
        let b = or.value(1) - a;
        let c = or.value(2) - a;
        let e = or.value(3) - a - b - c;
        let p = interpolate(&or);
        assert_eq!(p.coeffs(), &[a, b, c, e]);
        assert_eq!(p.coeffs(), &[0.0, 1.0, 1.0, -1.0]);

        let and = catalog("AND", 2).unwrap().to_real().unwrap();
        assert_eq!(interpolate(&and).coeffs(), &[0.0, 0.0, 0.0, 1.0]);

        let affine = RealFunction::from_fn(4, |x| {
            0.25 + [1.5, -2.0, 0.5, 3.0]
                .iter()
                .enumerate()
                .map(|(i, b)| b * (x >> i & 1) as f64)
                .sum::<f64>()
        })
        .unwrap();
        let p = interpolate(&affine);
        assert!(p.degree() <= 1);
        assert_eq!(p.coeff(0), 0.25);
        assert_eq!(p.coeff(0b0010), -2.0);
    }

    #[test]
    fn random_functions_round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            for _ in 0..20 {
                let g = RealFunction::from_fn(n, |_| rng.gen_range(-2.0..2.0)).unwrap();
                let s = wht(&g);
                let back = s.inverse();
                assert!(close(back.values(), g.values(), 1e-10));
                let mean_sq = g.values().iter().map(|v| v * v).sum::<f64>() / (1 << n) as f64;
                assert!((s.squared_mass() - mean_sq).abs() <= 1e-9 * mean_sq);
                let p = interpolate(&g);
                assert!((0..1 << n).all(|x| (p.evaluate(x) - g.value(x)).abs() < 1e-10));
                assert!((fourier_sensitivity(&s) - avg_sensitivity(&g)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unnormalised_transform_is_scaled_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let original: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut data = original.clone();
        fwht_in_place(&mut data);
        fwht_in_place(&mut data);
        let scaled: Vec<f64> = original.iter().map(|v| v * 64.0).collect();
        assert!(close(&data, &scaled, 1e-10));
    }

    #[test]
    fn parity_and_monomial_degrees_agree_on_all_boolean_functions_n4() {
        for table in 0u32..1 << 16 {
            let g = RealFunction::from_fn(4, |x| (table >> x & 1) as f64).unwrap();
            assert_eq!(
                wht(&g).degree(),
                interpolate(&g).degree(),
                "table {table:#06x}"
            );
        }
    }

    #[test]
    fn evaluate_real_matches_cube_evaluation() {
        let g = catalog("MAJ", 3).unwrap().to_real().unwrap();
        let p = interpolate(&g);
        for x in 0..8usize {
            let point: Vec<f64> = (0..3).map(|i| (x >> i & 1) as f64).collect();
            assert!((p.evaluate_real(&point) - g.value(x)).abs() < 1e-12);
        }
    }
}
