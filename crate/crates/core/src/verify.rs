//! Executable checkers for the inequalities of the entropy lower bound.
//!
//! Exhaustive populations are used for `n ≤ 4`; sampled populations draw
//! items from a seeded ChaCha stream per item, so results do not depend on
//! thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::boolfn::{bits_to_string, catalog, BoolFunction, RealFunction, CATALOG_NAMES};
use crate::fourier::{interpolate, wht};
use crate::lpdeg::{approx_degree_with, family_degree, ValueRange, APPROX_ERROR, FEASIBILITY_TOL};
use crate::metrics::{avg_sensitivity, binary_entropy, density, entropy};
use crate::qsim::{states_at, Measurement, QueryAlgorithm};
use crate::{Error, Result, SCHEMA_VERSION};

/// Largest arity for exhaustive populations.
pub const EXHAUSTIVE_MAX_ARITY: usize = 4;
/// Largest arity for sampled populations.
pub const SAMPLED_MAX_ARITY: usize = 10;
/// Slack for the edge-bound and entropy–sensitivity lemmas.
pub const LEMMA_TOL: f64 = 1e-12;
/// Slack for the degree–sensitivity lemma applied to a supplied `g̃`.
pub const DEGREE_SENSITIVITY_TOL: f64 = 1e-9;
/// Slack for `s̄(g̃) ≥ s̄(g)/9`.
pub const SENSITIVITY_RATIO_TOL: f64 = 1e-9;
/// Slack for the main-theorem chain.
pub const CHAIN_TOL: f64 = 1e-6;
/// Coefficients below this are zero when reading amplitude-polynomial degrees.
pub const FACT1_ZERO_TOL: f64 = 1e-8;
/// Density below which the degree–sensitivity bound is vacuous.
pub const VACUOUS_DENSITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub description: String,
    pub n: usize,
    pub mode: Mode,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub item: String,
    pub detail: String,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub item: String,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub claim: String,
    pub population: Population,
    pub violations: Vec<Violation>,
    /// Item with the smallest slack.
    pub extremal: Option<Witness>,
    /// Claim-specific quantities.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl VerificationReport {
    fn new(claim: &str, population: Population) -> Self {
        VerificationReport {
            schema: SCHEMA_VERSION,
            claim: claim.to_string(),
            population,
            violations: Vec::new(),
            extremal: None,
            details: serde_json::Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Record one inequality `slack ≥ −tol`.
    fn record(&mut self, item: String, slack: f64, tol: f64, detail: impl FnOnce() -> String) {
        if slack < -tol || slack.is_nan() {
            self.violations.push(Violation {
                item: item.clone(),
                detail: detail(),
                slack,
            });
        }
        if self.extremal.as_ref().is_none_or(|w| slack < w.slack) {
            self.extremal = Some(Witness { item, slack });
        }
    }

    fn absorb(&mut self, outcomes: Vec<ItemOutcome>) {
        for o in outcomes {
            if let Some(v) = o.violation {
                self.violations.push(v);
            }
            if self.extremal.as_ref().is_none_or(|w| o.slack < w.slack) {
                self.extremal = Some(Witness {
                    item: o.item,
                    slack: o.slack,
                });
            }
        }
    }
}

struct ItemOutcome {
    item: String,
    slack: f64,
    violation: Option<Violation>,
}

/// A subset of the cube vertices (equivalently a Boolean function) as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSet {
    n: usize,
    words: Vec<u64>,
}

/// Bit positions `v < 64` with bit `i` of `v` clear.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

impl CubeSet {
    pub fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        let size = 1usize << n;
        words.resize(size.div_ceil(64), 0);
        if size < 64 {
            words[0] &= (1u64 << size) - 1;
        }
        CubeSet { n, words }
    }

    pub fn from_table(n: usize, table: u64) -> Self {
        Self::from_words(n, vec![table])
    }

    pub fn from_fn(n: usize, mut member: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; (1usize << n).div_ceil(64)];
        for v in (0..1usize << n).filter(|&v| member(v)) {
            words[v / 64] |= 1 << (v % 64);
        }
        CubeSet { n, words }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn count_edges(&self, pair: impl Fn(u64, u64) -> u64) -> usize {
        let mut total = 0usize;
        for i in 0..self.n {
            if i < 6 {
                let shift = 1 << i;
                // pad sub-word cubes so the mask only sees valid positions
                let mask = if self.n < 6 {
                    LOW_MASKS[i] & ((1u64 << (1 << self.n)) - 1)
                } else {
                    LOW_MASKS[i]
                };
                for &w in &self.words {
                    total += (pair(w, w >> shift) & mask).count_ones() as usize;
                }
            } else {
                let stride = 1 << (i - 6);
                for j in (0..self.words.len()).filter(|j| j & stride == 0) {
                    total += pair(self.words[j], self.words[j + stride]).count_ones() as usize;
                }
            }
        }
        total
    }

    /// Cube edges with both endpoints in the set.
    pub fn internal_edges(&self) -> usize {
        self.count_edges(|a, b| a & b)
    }

    /// Cube edges with exactly one endpoint in the set.
    pub fn boundary_edges(&self) -> usize {
        self.count_edges(|a, b| a ^ b)
    }
}

fn check_population_mode(n: usize, mode: Mode, budget: u64) -> Result<u64> {
    match mode {
        Mode::Exhaustive => {
            if n == 0 || n > EXHAUSTIVE_MAX_ARITY {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive mode requires 1 ≤ n ≤ {EXHAUSTIVE_MAX_ARITY}, got {n}"
                )));
            }
            let count = 1u64 << (1 << n);
            if count > budget {
                return Err(Error::BudgetExceeded {
                    needed: count,
                    budget,
                });
            }
            Ok(count)
        }
        Mode::Sampled { samples, .. } => {
            if n == 0 || n > SAMPLED_MAX_ARITY {
                return Err(Error::InvalidArgument(format!(
                    "sampled mode requires 1 ≤ n ≤ {SAMPLED_MAX_ARITY}, got {n}"
                )));
            }
            if samples > budget {
                return Err(Error::BudgetExceeded {
                    needed: samples,
                    budget,
                });
            }
            Ok(samples)
        }
    }
}

/// Item `index` of a population: all tables in order, or a seeded random set
/// whose inclusion density is itself uniform in `(0,1)`.
fn population_item(n: usize, mode: Mode, index: u64) -> CubeSet {
    match mode {
        Mode::Exhaustive => CubeSet::from_table(n, index),
        Mode::Sampled { seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let density: f64 = rng.gen();
            CubeSet::from_fn(n, |_| rng.gen_bool(density))
        }
    }
}

fn item_label(mode: Mode, index: u64) -> String {
    match mode {
        Mode::Exhaustive => format!("table {index:#x}"),
        Mode::Sampled { seed, .. } => format!("sample {index} (seed {seed})"),
    }
}

#[derive(Default)]
struct ScanAcc {
    violations: Vec<(u64, Violation)>,
    best: Option<(f64, u64, String)>,
}

impl ScanAcc {
    fn offer_best(&mut self, slack: f64, index: u64, item: String) {
        let better = match &self.best {
            None => true,
            Some((s, i, _)) => slack.total_cmp(s).then(index.cmp(i)).is_lt(),
        };
        if better {
            self.best = Some((slack, index, item));
        }
    }

    fn merge(mut self, other: ScanAcc) -> ScanAcc {
        self.violations.extend(other.violations);
        if let Some((slack, index, item)) = other.best {
            self.offer_best(slack, index, item);
        }
        self
    }
}

fn scan(
    n: usize,
    mode: Mode,
    count: u64,
    tol: f64,
    check: impl Fn(&CubeSet) -> Option<(f64, String)> + Sync,
) -> Vec<ItemOutcome> {
    let acc = (0..count)
        .into_par_iter()
        .fold(ScanAcc::default, |mut acc, index| {
            let set = population_item(n, mode, index);
            if let Some((slack, detail)) = check(&set) {
                let item = item_label(mode, index);
                if slack < -tol || slack.is_nan() {
                    acc.violations.push((
                        index,
                        Violation {
                            item: item.clone(),
                            detail,
                            slack,
                        },
                    ));
                }
                acc.offer_best(slack, index, item);
            }
            acc
        })
        .reduce(ScanAcc::default, ScanAcc::merge);
    // the minimum is chosen by (slack, index), so the result is schedule-independent
    let mut violations = acc.violations;
    violations.sort_by_key(|(index, _)| *index);
    let mut outcomes: Vec<ItemOutcome> = violations
        .into_iter()
        .map(|(_, v)| ItemOutcome {
            item: v.item.clone(),
            slack: f64::INFINITY,
            violation: Some(v),
        })
        .collect();
    if let Some((slack, _, item)) = acc.best {
        outcomes.push(ItemOutcome {
            item,
            slack,
            violation: None,
        });
    }
    outcomes
}

/// `t_X ≤ k·log₂k / 2` for every vertex subset `X` in the population.
pub fn check_edge_bound(n: usize, mode: Mode, budget: u64) -> Result<VerificationReport> {
    let count = check_population_mode(n, mode, budget)?;
    let mut report = VerificationReport::new(
        "edge-bound",
        Population {
            description: "vertex subsets X of the n-cube".into(),
            n,
            mode,
            count,
        },
    );
    let outcomes = scan(n, mode, count, LEMMA_TOL, |set| {
        let k = set.len();
        if k == 0 {
            return None;
        }
        let t = set.internal_edges();
        let bound = k as f64 * (k as f64).log2() / 2.0;
        Some((bound - t as f64, format!("k={k}, t_X={t}, bound={bound}")))
    });
    report.absorb(outcomes);
    Ok(report)
}

/// `s̄_g ≥ H(p_g)/n` for every Boolean `g` in the population.
pub fn check_entropy_sensitivity(n: usize, mode: Mode, budget: u64) -> Result<VerificationReport> {
    let count = check_population_mode(n, mode, budget)?;
    let mut report = VerificationReport::new(
        "entropy-sensitivity",
        Population {
            description: "Boolean functions g on the n-cube".into(),
            n,
            mode,
            count,
        },
    );
    let edges = (n << (n - 1)) as f64;
    let points = (1usize << n) as f64;
    let outcomes = scan(n, mode, count, LEMMA_TOL, |set| {
        let sensitivity = set.boundary_edges() as f64 / edges;
        let p = set.len() as f64 / points;
        let bound = binary_entropy(p).expect("p in [0,1]") / n as f64;
        Some((
            sensitivity - bound,
            format!("p_g={p}, s_g={sensitivity}, H(p_g)/n={bound}"),
        ))
    });
    report.absorb(outcomes);
    Ok(report)
}

/// `deg(g̃) ≥ n·s̄_{g̃}/(4p_{g̃})`, and with a Boolean `g` that `g̃` approximates,
/// `deg(g̃) ≥ n·s̄_g/(36p_{g̃})` and `s̄_{g̃} ≥ s̄_g/9`. `tol` is the slack on
/// the two degree inequalities; the sensitivity ratio uses [`SENSITIVITY_RATIO_TOL`].
pub fn check_degree_sensitivity(
    gtilde: &RealFunction,
    gtilde_deg: usize,
    g: Option<&RealFunction>,
    tol: f64,
) -> Result<VerificationReport> {
    if !gtilde.in_unit_interval(FEASIBILITY_TOL) {
        let worst = gtilde
            .values()
            .iter()
            .copied()
            .max_by(|a, b| {
                (a - a.clamp(0.0, 1.0))
                    .abs()
                    .total_cmp(&(b - b.clamp(0.0, 1.0)).abs())
            })
            .unwrap_or(0.0);
        return Err(Error::OutOfUnitInterval(worst));
    }
    let n = gtilde.arity();
    if let Some(g) = g {
        if g.arity() != n {
            return Err(Error::DimensionMismatch(format!(
                "g has arity {}, g̃ has arity {n}",
                g.arity()
            )));
        }
        if !g.is_boolean() {
            return Err(Error::InvalidArgument("g must be Boolean".into()));
        }
        let err = (0..g.values().len())
            .map(|x| (gtilde.value(x) - g.value(x)).abs())
            .fold(0.0, f64::max);
        if err > APPROX_ERROR + FEASIBILITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "g̃ is {err} away from g, more than 1/3"
            )));
        }
    }
    let mut report = VerificationReport::new(
        "degree-sensitivity",
        Population {
            description: "one approximating polynomial".into(),
            n,
            mode: Mode::Exhaustive,
            count: 1,
        },
    );
    let d = gtilde_deg as f64;
    let p = density(gtilde);
    let s_tilde = avg_sensitivity(gtilde);
    let s_g = g.map(avg_sensitivity);
    let vacuous = p < VACUOUS_DENSITY;
    report.details = json!({
        "degree": gtilde_deg,
        "density": p,
        "avg_sensitivity_gtilde": s_tilde,
        "avg_sensitivity_g": s_g,
        "vacuous": vacuous,
    });
    if !vacuous {
        let bound = n as f64 * s_tilde / (4.0 * p);
        report.record(
            "deg ≥ n·s̄(g̃)/(4p(g̃))".into(),
            d - bound,
            tol,
            || format!("deg={d}, bound={bound}"),
        );
        if let Some(s_g) = s_g {
            let bound = n as f64 * s_g / (36.0 * p);
            report.record(
                "deg ≥ n·s̄(g)/(36p(g̃))".into(),
                d - bound,
                tol,
                || format!("deg={d}, bound={bound}"),
            );
        }
    }
    if let Some(s_g) = s_g {
        report.record(
            "s̄(g̃) ≥ s̄(g)/9".into(),
            s_tilde - s_g / 9.0,
            SENSITIVITY_RATIO_TOL,
            || format!("s̄(g̃)={s_tilde}, s̄(g)/9={}", s_g / 9.0),
        );
    }
    Ok(report)
}

/// Degree–sensitivity check on the LP witness at `d = adeg` for every
/// fiber indicator of every catalog function of arity `n`.
pub fn check_degree_sensitivity_catalog(n: usize, tol: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "degree-sensitivity",
        Population {
            description: "fiber indicators of catalog functions with their adeg witnesses".into(),
            n,
            mode: Mode::Exhaustive,
            count: 0,
        },
    );
    let mut rows = Vec::new();
    for name in CATALOG_NAMES {
        let Ok(f) = catalog(name, n) else { continue };
        for y in f.image() {
            let g = f.indicator(y)?;
            let witness = approx_degree_with(&g, APPROX_ERROR, ValueRange::Unit)?;
            let label = format!("{name}_{n} y={}", bits_to_string(y, f.output_arity()));
            let single = check_degree_sensitivity(
                &witness.values(),
                witness.witness.degree(),
                Some(&g),
                tol,
            )?;
            report.population.count += 1;
            for v in single.violations {
                report.violations.push(Violation {
                    item: format!("{label}: {}", v.item),
                    ..v
                });
            }
            if let Some(w) = single.extremal {
                if report.extremal.as_ref().is_none_or(|e| w.slack < e.slack) {
                    report.extremal = Some(Witness {
                        item: format!("{label}: {}", w.item),
                        slack: w.slack,
                    });
                }
            }
            rows.push(json!({
                "function": label,
                "adeg": witness.degree_bound,
                "witness_degree": witness.witness.degree(),
                "error": witness.error,
                "details": single.details,
            }));
        }
    }
    report.details = serde_json::Value::Array(rows);
    Ok(report)
}

/// The main-theorem chain for a total function, with the family LP witness.
pub fn check_main_chain(f: &BoolFunction) -> Result<VerificationReport> {
    if !f.is_total() {
        return Err(Error::NotTotal);
    }
    let n = f.arity();
    let (d, family) = family_degree(f)?;
    let mut report = VerificationReport::new(
        "main-chain",
        Population {
            description: format!("{f}"),
            n,
            mode: Mode::Exhaustive,
            count: 1,
        },
    );
    let d_f = d as f64;
    let n_f = n as f64;
    let violation = family.max_violation(f);
    report.record(
        "witness constraints".into(),
        FEASIBILITY_TOL - violation,
        0.0,
        || format!("max constraint violation {violation}"),
    );

    let total = f.domain_size() as f64;
    let fibers = f.fiber_sizes();
    let mut per_y = Vec::new();
    let (mut sum_s, mut sum_h, mut sum_p_tilde) = (0.0, 0.0, 0.0);
    for (k, values) in family.values().iter().enumerate() {
        let y = family.outputs[k];
        let p_y = fibers[&y] as f64 / total;
        let s_y = avg_sensitivity(&f.indicator(y)?);
        let h_y = binary_entropy(p_y)?;
        let p_tilde = density(values);
        let s_tilde = avg_sensitivity(values);
        sum_s += s_y;
        sum_h += h_y;
        sum_p_tilde += p_tilde;
        let label = format!("y={}", bits_to_string(y, f.output_arity()));
        if p_tilde >= VACUOUS_DENSITY {
            let bound = n_f * s_tilde / (4.0 * p_tilde);
            report.record(
                format!("{label}: d ≥ n·s̄(f̃_y)/(4p̃_y)"),
                d_f - bound,
                CHAIN_TOL,
                || format!("d={d}, bound={bound}"),
            );
        }
        per_y.push(json!({
            "y": label,
            "p_y": p_y,
            "binary_entropy": h_y,
            "avg_sensitivity": s_y,
            "p_tilde": p_tilde,
            "avg_sensitivity_tilde": s_tilde,
            "witness_degree": family.polys[k].degree(),
        }));
    }
    let e = entropy(f)?;
    let lhs = n_f / 36.0 * sum_s;
    report.record(
        "Σ_y p̃_y ≤ 1".into(),
        1.0 - sum_p_tilde,
        CHAIN_TOL,
        || format!("Σ p̃_y = {sum_p_tilde}"),
    );
    report.record(
        "d ≥ (n/36)·Σ_y s̄_y".into(),
        d_f - lhs,
        CHAIN_TOL,
        || format!("d={d}, (n/36)Σs̄={lhs}"),
    );
    report.record(
        "(n/36)·Σ_y s̄_y ≥ (1/36)·Σ_y H(p_y)".into(),
        lhs - sum_h / 36.0,
        CHAIN_TOL,
        || format!("(n/36)Σs̄={lhs}, ΣH/36={}", sum_h / 36.0),
    );
    report.record("Σ_y H(p_y) ≥ E(f)".into(), sum_h - e, CHAIN_TOL, || {
        format!("ΣH={sum_h}, E={e}")
    });
    report.record("d ≥ E(f)/36".into(), d_f - e / 36.0, CHAIN_TOL, || {
        format!("d={d}, E/36={}", e / 36.0)
    });
    report.details = json!({
        "d": d,
        "entropy": e,
        "sum_avg_sensitivity": sum_s,
        "sum_binary_entropy": sum_h,
        "sum_p_tilde": sum_p_tilde,
        "witness": family.to_json(f),
        "per_output": per_y,
    });
    Ok(report)
}

/// Amplitude polynomials after `t` queries have degree ≤ `t`; output
/// probabilities under `meas` have degree ≤ `2t`.
pub fn check_fact1(
    alg: &QueryAlgorithm,
    meas: &Measurement,
    n: usize,
) -> Result<VerificationReport> {
    let regs = alg.registers();
    if regs.n != n {
        return Err(Error::DimensionMismatch(format!(
            "algorithm queries {} bits, function has arity {n}",
            regs.n
        )));
    }
    meas.validate(regs)?;
    let mut report = VerificationReport::new(
        "fact1",
        Population {
            description: format!("all 2^{n} inputs, T={}", alg.queries()),
            n,
            mode: Mode::Exhaustive,
            count: 1 << n,
        },
    );
    let mut per_t = Vec::new();
    let outcomes: Vec<u64> = (0..1u64 << meas.output_qubits.len()).collect();
    for t in 0..=alg.queries() {
        let states = states_at(alg, t)?;
        let mut max_amp = 0;
        for psi in 0..regs.dim() {
            let amps: Vec<_> = states.iter().map(|s| s.amplitudes()[psi]).collect();
            let poly = crate::fourier::ComplexPoly::interpolate(n, &amps, FACT1_ZERO_TOL)?;
            let deg = poly.degree();
            max_amp = max_amp.max(deg);
            report.record(
                format!("t={t} ψ={psi} amplitude"),
                t as f64 - deg as f64,
                0.0,
                || format!("degree {deg} > {t}"),
            );
        }
        let mut max_acc = 0;
        for &y in &outcomes {
            let probs =
                RealFunction::new(n, states.iter().map(|s| meas.probability(s, y)).collect())?;
            let deg = interpolate(&probs).with_zero_tol(FACT1_ZERO_TOL).degree();
            debug_assert_eq!(deg, wht(&probs).with_zero_tol(FACT1_ZERO_TOL).degree());
            max_acc = max_acc.max(deg);
            report.record(
                format!("t={t} y={y} acceptance"),
                2.0 * t as f64 - deg as f64,
                0.0,
                || format!("degree {deg} > {}", 2 * t),
            );
        }
        per_t.push(json!({
            "t": t,
            "max_amplitude_degree": max_amp,
            "max_acceptance_degree": max_acc,
        }));
    }
    report.details = serde_json::Value::Array(per_t);
    Ok(report)
}
