//! Approximate degree via linear programming, for single functions and for the
//! joint family `{f̃_y}` of output-probability polynomials.
//!
//! Polynomials are parametrised by their parity coefficients `ĉ_r`, `|r| ≤ d`,
//! so the degree bound is built into the variable set.

use serde::{Deserialize, Serialize};

use crate::boolfn::{bits_to_string, BoolFunction, RealFunction};
use crate::fourier::{character, low_degree_sets, Spectrum};
use crate::lp::{solve, LinearProgram, LpOutcome, Relation};
use crate::{Error, Result};

/// Pointwise error allowed for an approximating polynomial.
pub const APPROX_ERROR: f64 = 1.0 / 3.0;
/// Feasibility margin on constraint checks.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Largest arity for LP-backed computations.
pub const LP_MAX_ARITY: usize = 5;

/// Value range imposed on approximating polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ValueRange {
    /// `0 ≤ p(x) ≤ 1` on the cube, as for acceptance probabilities.
    #[default]
    Unit,
    /// No range constraint (the classical approximate degree).
    Unconstrained,
}

fn check_lp_arity(n: usize) -> Result<()> {
    if n > LP_MAX_ARITY {
        return Err(Error::LimitExceeded(format!(
            "LP computations are limited to n ≤ {LP_MAX_ARITY}, got n={n}"
        )));
    }
    Ok(())
}

fn check_degree(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::InvalidArgument(format!(
            "degree {d} exceeds arity {n}"
        )));
    }
    Ok(())
}

fn spectrum_from_solution(n: usize, sets: &[usize], coeffs: &[f64]) -> Spectrum {
    let mut dense = vec![0.0; 1 << n];
    for (&r, &c) in sets.iter().zip(coeffs) {
        dense[r] = c;
    }
    Spectrum::from_coeffs(n, dense).expect("arity validated")
}

/// Best degree-`d` approximation of a single function.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub degree_bound: usize,
    /// Optimal `max_x |p(x) − g(x)|` reported by the LP.
    pub error: f64,
    pub witness: Spectrum,
}

impl Approximation {
    /// Witness values on the cube.
    pub fn values(&self) -> RealFunction {
        self.witness.inverse()
    }
}

/// `min_p max_x |p(x) − g(x)|` over polynomials of degree ≤ `d` whose values
/// lie in `[0,1]`.
pub fn min_error(g: &RealFunction, d: usize) -> Result<f64> {
    Ok(best_approximation(g, d, ValueRange::Unit)?.error)
}

pub fn best_approximation(g: &RealFunction, d: usize, range: ValueRange) -> Result<Approximation> {
    let n = g.arity();
    check_lp_arity(n)?;
    check_degree(n, d)?;
    let sets = low_degree_sets(n, d);
    let eps_var = sets.len();
    let mut objective = vec![0.0; sets.len() + 1];
    objective[eps_var] = 1.0;
    let mut lp = LinearProgram::minimize(objective);
    for j in 0..sets.len() {
        lp.set_free(j);
    }
    for x in 0..1usize << n {
        let mut row: Vec<f64> = sets.iter().map(|&r| character(r, x)).collect();
        row.push(-1.0);
        lp.add_constraint(row.clone(), Relation::Le, g.value(x));
        row[eps_var] = 1.0;
        lp.add_constraint(row.clone(), Relation::Ge, g.value(x));
        if range == ValueRange::Unit {
            row[eps_var] = 0.0;
            lp.add_constraint(row.clone(), Relation::Ge, 0.0);
            lp.add_constraint(row, Relation::Le, 1.0);
        }
    }
    let solution = match solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::Infeasible(format!(
                "approximation LP at d={d} returned {other:?}"
            )))
        }
    };
    Ok(Approximation {
        degree_bound: d,
        error: solution.values[eps_var],
        witness: spectrum_from_solution(n, &sets, &solution.values[..eps_var]),
    })
}

/// Least `d` with `min_error(g, d) ≤ eps + tol`, by linear scan from 0.
pub fn approx_degree(g: &RealFunction, eps: f64) -> Result<usize> {
    Ok(approx_degree_with(g, eps, ValueRange::Unit)?.degree_bound)
}

/// Like [`approx_degree`] but also returns the witness at the minimal degree.
pub fn approx_degree_with(g: &RealFunction, eps: f64, range: ValueRange) -> Result<Approximation> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps={eps} outside (0, 1/2)"
        )));
    }
    check_lp_arity(g.arity())?;
    for d in 0..=g.arity() {
        let approx = best_approximation(g, d, range)?;
        if approx.error <= eps + FEASIBILITY_TOL {
            return Ok(approx);
        }
    }
    Err(Error::InvalidArgument(
        "no polynomial within the value range approximates g; is g outside [0,1]?".into(),
    ))
}

/// One polynomial per output value: the witness of the joint family LP.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFamily {
    pub outputs: Vec<u64>,
    pub polys: Vec<Spectrum>,
    pub degree_bound: usize,
    /// Optimal common approximation error found by the LP (≤ 1/3 when feasible).
    pub error: f64,
}

impl PolyFamily {
    pub fn values(&self) -> Vec<RealFunction> {
        self.polys.iter().map(Spectrum::inverse).collect()
    }

    /// Largest violation of the family constraints, recomputed pointwise from
    /// the coefficients: nonnegativity, `Σ_y f̃_y ≤ 1`, and `|f̃_y − f_y| ≤ 1/3` on `A`.
    pub fn max_violation(&self, f: &BoolFunction) -> f64 {
        let values = self.values();
        let mut worst: f64 = 0.0;
        for x in 0..1usize << f.arity() {
            let mut sum = 0.0;
            for (k, v) in values.iter().enumerate() {
                let p = v.value(x);
                sum += p;
                worst = worst.max(-p);
                if let Some(fx) = f.value(x) {
                    let target = (fx == self.outputs[k]) as u8 as f64;
                    worst = worst.max((p - target).abs() - APPROX_ERROR);
                }
            }
            worst = worst.max(sum - 1.0);
        }
        worst
    }

    pub fn to_json(&self, f: &BoolFunction) -> PolyFamilyJson {
        PolyFamilyJson {
            degree_bound: self.degree_bound,
            error: self.error,
            max_violation: self.max_violation(f),
            polys: self
                .outputs
                .iter()
                .zip(&self.polys)
                .map(|(&y, s)| PolyJson {
                    y: bits_to_string(y, f.output_arity()),
                    degree: s.degree(),
                    coeffs: s.coeffs().to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFamilyJson {
    pub degree_bound: usize,
    pub error: f64,
    pub max_violation: f64,
    pub polys: Vec<PolyJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub y: String,
    pub degree: usize,
    /// Parity coefficients indexed by `r`.
    pub coeffs: Vec<f64>,
}

/// Joint LP at degree `d`: per `y ∈ B` a polynomial with `f̃_y ≥ 0`,
/// `Σ_y f̃_y ≤ 1` everywhere and `|f̃_y − f_y| ≤ 1/3` on the domain.
/// Undefined points are constrained only by nonnegativity and the sum.
pub fn family_feasible(f: &BoolFunction, d: usize) -> Result<Option<PolyFamily>> {
    let family = family_min_error(f, d)?;
    Ok((family.error <= APPROX_ERROR + FEASIBILITY_TOL).then_some(family))
}

/// The family LP with the approximation error minimised instead of fixed.
pub fn family_min_error(f: &BoolFunction, d: usize) -> Result<PolyFamily> {
    let n = f.arity();
    check_lp_arity(n)?;
    check_degree(n, d)?;
    let outputs = f.image();
    let sets = low_degree_sets(n, d);
    let per_poly = sets.len();
    let eps_var = outputs.len() * per_poly;
    let mut objective = vec![0.0; eps_var + 1];
    objective[eps_var] = 1.0;
    let mut lp = LinearProgram::minimize(objective);
    for j in 0..eps_var {
        lp.set_free(j);
    }
    let chars: Vec<Vec<f64>> = (0..1usize << n)
        .map(|x| sets.iter().map(|&r| character(r, x)).collect())
        .collect();
    let poly_terms = |k: usize, x: usize| -> Vec<(usize, f64)> {
        chars[x]
            .iter()
            .enumerate()
            .map(|(l, &c)| (k * per_poly + l, c))
            .collect()
    };
    for x in 0..1usize << n {
        let mut sum_terms = Vec::with_capacity(eps_var);
        for (k, &y) in outputs.iter().enumerate() {
            let terms = poly_terms(k, x);
            lp.add_sparse(&terms, Relation::Ge, 0.0);
            if let Some(fx) = f.value(x) {
                let target = (fx == y) as u8 as f64;
                let mut upper = terms.clone();
                upper.push((eps_var, -1.0));
                lp.add_sparse(&upper, Relation::Le, target);
                let mut lower = terms.clone();
                lower.push((eps_var, 1.0));
                lp.add_sparse(&lower, Relation::Ge, target);
            }
            sum_terms.extend(terms);
        }
        lp.add_sparse(&sum_terms, Relation::Le, 1.0);
    }
    let solution = match solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::Infeasible(format!(
                "family LP at d={d} returned {other:?}"
            )))
        }
    };
    let polys = (0..outputs.len())
        .map(|k| {
            spectrum_from_solution(n, &sets, &solution.values[k * per_poly..(k + 1) * per_poly])
        })
        .collect();
    Ok(PolyFamily {
        outputs,
        polys,
        degree_bound: d,
        error: solution.values[eps_var],
    })
}

/// Minimal `d` for which the family LP is feasible, with its witness.
pub fn family_degree(f: &BoolFunction) -> Result<(usize, PolyFamily)> {
    check_lp_arity(f.arity())?;
    for d in 0..=f.arity() {
        if let Some(family) = family_feasible(f, d)? {
            return Ok((d, family));
        }
    }
    Err(Error::Infeasible(format!(
        "family LP infeasible at d = n = {} ({f})",
        f.arity()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::catalog;
    use crate::metrics::{avg_sensitivity, density};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(name: &str, n: usize) -> RealFunction {
        catalog(name, n).unwrap().to_real().unwrap()
    }

    /// Independent check of a witness's error by pointwise re-evaluation.
    fn pointwise_error(g: &RealFunction, approx: &Approximation) -> f64 {
        let v = approx.values();
        (0..g.values().len())
            .map(|x| (v.value(x) - g.value(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn parity2_degree1_error_is_half() {
        // Oracle: any p of degree ≤ 1 has ĝ_{11}(p) = 0, while E[(g − p)χ_11] = ĝ_11 = −1/2,
        // so max|g − p| ≥ |E[(g − p)χ_11]| = 1/2; the constant 1/2 attains it.
        let g = real("PARITY", 2);
        let a = best_approximation(&g, 1, ValueRange::Unit).unwrap();
        assert!((a.error - 0.5).abs() < 1e-9);
        assert!((pointwise_error(&g, &a) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn exact_at_full_degree() {
        for name in ["OR", "AND", "MAJ", "PARITY"] {
            for n in 1..=4 {
                let g = real(name, n);
                assert!(min_error(&g, n).unwrap() < 1e-9, "{name}_{n}");
            }
        }
        assert!(min_error(&RealFunction::constant(3, 1.0).unwrap(), 0).unwrap() < 1e-12);
    }

    #[test]
    fn or2_at_degree2_is_exact() {
        let a = best_approximation(&real("OR", 2), 2, ValueRange::Unit).unwrap();
        assert!(a.error.abs() < 1e-12);
    }

    #[test]
    fn approx_degree_of_parity_and_constants() {
        for n in 1..=4 {
            assert_eq!(approx_degree(&real("PARITY", n), APPROX_ERROR).unwrap(), n);
            assert_eq!(approx_degree(&real("CONST0", n), APPROX_ERROR).unwrap(), 0);
            assert_eq!(approx_degree(&real("CONST1", n), APPROX_ERROR).unwrap(), 0);
        }
    }

    #[test]
    fn and2_regression() {
        // Hand oracle at d=1: p = a + b(x_1+x_2) with p(00) = a ≥ 0 needs
        // a + b ≤ ε and a + 2b ≥ 1 − ε, hence 3ε ≥ 1 + a ≥ 1; p = (x_1+x_2)/3 attains 1/3.
        let g = real("AND", 2);
        let a = best_approximation(&g, 1, ValueRange::Unit).unwrap();
        assert!((a.error - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(approx_degree(&g, APPROX_ERROR).unwrap(), 1);
        assert_eq!(approx_degree(&real("OR", 2), APPROX_ERROR).unwrap(), 1);
    }

    #[test]
    fn unconstrained_range_never_worse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let g = RealFunction::from_fn(3, |_| rng.gen_range(0..2) as f64).unwrap();
            for d in 0..=3 {
                let unit = best_approximation(&g, d, ValueRange::Unit).unwrap().error;
                let free = best_approximation(&g, d, ValueRange::Unconstrained)
                    .unwrap()
                    .error;
                assert!(free <= unit + 1e-9);
            }
        }
    }

    #[test]
    fn min_error_is_monotone_and_witness_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = 2 + trial % 3;
            let boolean = trial % 2 == 0;
            let g = RealFunction::from_fn(n, |_| {
                if boolean {
                    rng.gen_range(0..2) as f64
                } else {
                    rng.gen_range(0.0..1.0)
                }
            })
            .unwrap();
            let mut previous = f64::INFINITY;
            for d in 0..=n {
                let a = best_approximation(&g, d, ValueRange::Unit).unwrap();
                assert!(a.error <= previous + 1e-9);
                previous = a.error;
                assert!(a.witness.degree() <= d);
                assert!(a.values().in_unit_interval(FEASIBILITY_TOL));
                assert!((pointwise_error(&g, &a) - a.error).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn lp_refuses_large_arity() {
        let g = RealFunction::constant(6, 0.0).unwrap();
        assert!(matches!(min_error(&g, 1), Err(Error::LimitExceeded(_))));
        assert!(min_error(&RealFunction::constant(2, 0.0).unwrap(), 3).is_err());
        assert!(approx_degree(&RealFunction::constant(2, 0.0).unwrap(), 0.6).is_err());
    }

    #[test]
    fn family_examples() {
        let bv = catalog("BV", 4).unwrap();
        // independent LP solve: ε* = 1/2 at d=1, 0 at d=2
        assert!((family_min_error(&bv, 1).unwrap().error - 0.5).abs() < 1e-9);
        assert!(family_feasible(&bv, 1).unwrap().is_none());
        let (d, family) = family_degree(&bv).unwrap();
        assert_eq!(d, 2);
        assert!(family.error.abs() < 1e-9);
        assert!(family.max_violation(&bv) < FEASIBILITY_TOL);

        let id = catalog("IDENTITY", 2).unwrap();
        let family = family_feasible(&id, 2).unwrap().expect("exact indicators");
        assert!(family.max_violation(&id) < FEASIBILITY_TOL);

        let (d, _) = family_degree(&catalog("CONST1", 3).unwrap()).unwrap();
        assert_eq!(d, 0);
        let (d, family) = family_degree(&catalog("PARITY", 3).unwrap()).unwrap();
        assert_eq!(d, 3);
        assert_eq!(family.outputs, vec![0, 1]);
    }

    #[test]
    fn single_output_family_matches_paired_constraints() {
        // feasibility at d agrees with min_error of f_1 under the paired
        // constraints f̃_0 + f̃_1 ≤ 1; the choice f̃_0 = 1 − f̃_1 makes it min_error(f_1, d) ≤ 1/3
        for name in ["OR", "AND", "MAJ", "PARITY"] {
            let f = catalog(name, 3).unwrap();
            let g = f.to_real().unwrap();
            for d in 0..=3 {
                let single = min_error(&g, d).unwrap() <= APPROX_ERROR + FEASIBILITY_TOL;
                let joint = family_feasible(&f, d).unwrap().is_some();
                assert_eq!(single, joint, "{name} d={d}");
            }
            assert!(family_feasible(&f, 3).unwrap().is_some());
        }
    }

    #[test]
    fn family_witness_satisfies_degree_sensitivity_bound() {
        for (name, n) in [("PARITY", 3), ("OR", 3), ("MAJ", 3), ("IDENTITY", 2)] {
            let f = catalog(name, n).unwrap();
            let (d, family) = family_degree(&f).unwrap();
            assert!(family.max_violation(&f) < FEASIBILITY_TOL);
            for v in family.values() {
                let p = density(&v);
                if p > 1e-12 {
                    let bound = n as f64 * avg_sensitivity(&v) / (4.0 * p);
                    assert!(d as f64 >= bound - 1e-6, "{name}: {d} < {bound}");
                }
            }
        }
    }

    #[test]
    fn family_json_shape() {
        let f = catalog("IDENTITY", 2).unwrap();
        let (_, family) = family_degree(&f).unwrap();
        let json = family.to_json(&f);
        assert_eq!(json.polys.len(), 4);
        assert!(json.polys.iter().all(|p| p.coeffs.len() == 4));
        assert!(json.max_violation < FEASIBILITY_TOL);
    }
}
