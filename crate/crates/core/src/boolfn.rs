//! Dense Boolean functions `{0,1}^n ⊇ A → {0,1}^m` and the input index convention.
//!
//! Inputs are indexed by `idx = Σ x_i·2^(i−1)`, so `x_1` is the least
//! significant bit. Bitstrings in text formats are written `x_1` first.
//! Output values are stored as integers with the same convention.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest arity accepted for dense tables.
pub const MAX_ARITY: usize = 24;

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::InvalidArity {
            n,
            reason: format!("arity must lie in 1..={MAX_ARITY}"),
        });
    }
    Ok(())
}

/// Bijection between bit vectors `(x_1, …, x_n)` and table indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputIndex {
    n: usize,
}

impl InputIndex {
    pub fn new(n: usize) -> Self {
        InputIndex { n }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn encode(&self, bits: &[bool]) -> usize {
        debug_assert_eq!(bits.len(), self.n);
        bits.iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
    }

    pub fn decode(&self, idx: usize) -> Vec<bool> {
        (0..self.n).map(|i| idx >> i & 1 == 1).collect()
    }

    /// Bitstring `x_1 x_2 … x_n`.
    pub fn to_bitstring(&self, idx: usize) -> String {
        bits_to_string(idx as u64, self.n)
    }

    pub fn from_bitstring(&self, s: &str) -> Result<usize> {
        Ok(parse_bitstring(s, self.n)? as usize)
    }
}

pub(crate) fn bits_to_string(value: u64, width: usize) -> String {
    (0..width)
        .map(|i| if value >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) fn parse_bitstring(s: &str, width: usize) -> Result<u64> {
    if s.chars().count() != width {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("bitstring `{s}` has length {}, expected {width}", s.len()),
        });
    }
    let mut value = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => value |= 1 << i,
            other => {
                return Err(Error::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("bad character `{other}` in bitstring `{s}`"),
                })
            }
        }
    }
    Ok(value)
}

/// A real-valued function on the full cube `{0,1}^n`, stored by index.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFunction {
    n: usize,
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for arity {n}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value {v}")));
        }
        Ok(RealFunction { n, values })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_arity(n)?;
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; 1 << n])
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Whether every value lies in `[−tol, 1+tol]`.
    pub fn in_unit_interval(&self, tol: f64) -> bool {
        self.values.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
    }

    /// Whether every value is exactly 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

/// A total or partial function `{0,1}^n ⊇ A → {0,1}^m` as packed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolFunction {
    n: usize,
    m: usize,
    domain: Vec<u64>,
    outputs: Vec<u64>,
}

impl BoolFunction {
    /// Total function from a full output table.
    pub fn total(n: usize, m: usize, outputs: Vec<u64>) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let mut domain = vec![0u64; size.div_ceil(64)];
        for i in 0..size {
            domain[i / 64] |= 1 << (i % 64);
        }
        Self::from_parts(n, m, domain, outputs)
    }

    pub fn from_fn(n: usize, m: usize, f: impl FnMut(usize) -> u64) -> Result<Self> {
        check_arity(n)?;
        Self::total(n, m, (0..1usize << n).map(f).collect())
    }

    /// Partial function from `(idx, y)` pairs; unlisted points are undefined.
    pub fn partial(n: usize, m: usize, entries: &[(usize, u64)]) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let mut domain = vec![0u64; size.div_ceil(64)];
        let mut outputs = vec![0u64; size];
        for &(idx, y) in entries {
            if idx >= size {
                return Err(Error::DimensionMismatch(format!(
                    "input index {idx} out of range for n={n}"
                )));
            }
            if domain[idx / 64] >> (idx % 64) & 1 == 1 {
                return Err(Error::DuplicateInput(InputIndex::new(n).to_bitstring(idx)));
            }
            domain[idx / 64] |= 1 << (idx % 64);
            outputs[idx] = y;
        }
        Self::from_parts(n, m, domain, outputs)
    }

    fn from_parts(n: usize, m: usize, domain: Vec<u64>, outputs: Vec<u64>) -> Result<Self> {
        check_arity(n)?;
        if m == 0 || m > n {
            return Err(Error::InvalidArity {
                n,
                reason: format!("output arity m={m} must satisfy 1 ≤ m ≤ n"),
            });
        }
        if outputs.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "{} outputs for arity {n}",
                outputs.len()
            )));
        }
        let f = BoolFunction {
            n,
            m,
            domain,
            outputs,
        };
        if f.domain_size() == 0 {
            return Err(Error::EmptyDomain);
        }
        if let Some(idx) = f.domain_indices().find(|&i| f.outputs[i] >> m != 0) {
            return Err(Error::InvalidArgument(format!(
                "output {} at input {} does not fit in m={m} bits",
                f.outputs[idx],
                InputIndex::new(n).to_bitstring(idx)
            )));
        }
        Ok(f)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn output_arity(&self) -> usize {
        self.m
    }

    pub fn is_total(&self) -> bool {
        self.domain_size() == 1 << self.n
    }

    pub fn in_domain(&self, idx: usize) -> bool {
        self.domain[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn value(&self, idx: usize) -> Option<u64> {
        self.in_domain(idx).then(|| self.outputs[idx])
    }

    /// `|A|`.
    pub fn domain_size(&self) -> usize {
        self.domain.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn domain_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.n).filter(move |&i| self.in_domain(i))
    }

    /// Inputs outside `A`.
    pub fn undefined_points(&self) -> Vec<usize> {
        (0..1usize << self.n)
            .filter(|&i| !self.in_domain(i))
            .collect()
    }

    /// `|f⁻¹(y) ∩ A|` for every `y ∈ B`, ordered by `y`.
    pub fn fiber_sizes(&self) -> BTreeMap<u64, usize> {
        let mut counts = BTreeMap::new();
        for idx in self.domain_indices() {
            *counts.entry(self.outputs[idx]).or_insert(0) += 1;
        }
        counts
    }

    /// The image `B = f(A)`, sorted.
    pub fn image(&self) -> Vec<u64> {
        self.fiber_sizes().into_keys().collect()
    }

    /// Characteristic function `f_y` of `f⁻¹(y)`. Points outside `A` get 0;
    /// they are listed by [`BoolFunction::undefined_points`].
    pub fn indicator(&self, y: u64) -> Result<RealFunction> {
        let values: Vec<f64> = (0..1usize << self.n)
            .map(|i| (self.value(i) == Some(y)) as u8 as f64)
            .collect();
        if !values.contains(&1.0) {
            return Err(Error::EmptyFiber(y));
        }
        RealFunction::new(self.n, values)
    }

    /// The single-output function viewed as a 0/1 real function.
    pub fn to_real(&self) -> Result<RealFunction> {
        if !self.is_total() {
            return Err(Error::NotTotal);
        }
        if self.m != 1 {
            return Err(Error::InvalidArgument(format!(
                "expected a single-output function, got m={}",
                self.m
            )));
        }
        RealFunction::new(self.n, self.outputs.iter().map(|&y| y as f64).collect())
    }

    /// Truth-table text (total, single-output functions only).
    pub fn to_truth_table(&self) -> Result<String> {
        self.to_real()?;
        Ok(self
            .outputs
            .iter()
            .map(|&y| if y == 1 { '1' } else { '0' })
            .collect())
    }

    pub fn to_json(&self) -> FunctionJson {
        let index = InputIndex::new(self.n);
        FunctionJson {
            n: self.n,
            m: self.m,
            entries: self
                .domain_indices()
                .map(|i| EntryJson {
                    x: index.to_bitstring(i),
                    y: bits_to_string(self.outputs[i], self.m),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FunctionJson) -> Result<Self> {
        check_arity(json.n)?;
        let index = InputIndex::new(json.n);
        let entries = json
            .entries
            .iter()
            .map(|e| Ok((index.from_bitstring(&e.x)?, parse_bitstring(&e.y, json.m)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::partial(json.n, json.m, &entries)
    }
}

impl fmt::Display for BoolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f: {{0,1}}^{} → {{0,1}}^{} ({}, |A|={})",
            self.n,
            self.m,
            if self.is_total() { "total" } else { "partial" },
            self.domain_size()
        )
    }
}

/// JSON form of a (possibly partial, multi-output) function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub x: String,
    pub y: String,
}

/// Parse a truth table (`2^n` characters over `{0,1}`, whitespace ignored)
/// or, when the text starts with `{`, the JSON function format.
pub fn parse_truth_table(text: &str) -> Result<BoolFunction> {
    if text.trim_start().starts_with('{') {
        let json: FunctionJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        return BoolFunction::from_json(&json);
    }
    let mut outputs = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        for (col, c) in line.chars().enumerate() {
            match c {
                '0' => outputs.push(0),
                '1' => outputs.push(1),
                c if c.is_whitespace() => {}
                other => {
                    return Err(Error::Parse {
                        line: line_no + 1,
                        column: col + 1,
                        message: format!("bad character `{other}` in truth table"),
                    })
                }
            }
        }
    }
    let len = outputs.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("truth table length {len} is not a power of two ≥ 2"),
        });
    }
    BoolFunction::total(len.trailing_zeros() as usize, 1, outputs)
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 9] = [
    "OR", "AND", "PARITY", "MAJ", "CONST0", "CONST1", "IDENTITY", "ADDRESS", "BV",
];

/// Pointer values `i ∈ 0..n` paired with `z`: the bit `e(z)_i = parity(i AND z)`.
pub fn bv_encoding(n: usize, z: u64) -> usize {
    (0..n)
        .filter(|&i| (i as u64 & z).count_ones() % 2 == 1)
        .fold(0, |acc, i| acc | 1 << i)
}

/// Standard test functions.
///
/// `MAJ` is 1 when strictly more than half the bits are set. `ADDRESS` needs
/// `n = k + 2^k`: the first `k` bits select one of the remaining `2^k`.
/// `BV` (n a power of two, n ≥ 2) is the partial function defined on the
/// strings `e(z)` with `f(e(z)) = z`.
pub fn catalog(name: &str, n: usize) -> Result<BoolFunction> {
    check_arity(n)?;
    let invalid = |reason: &str| Error::InvalidArity {
        n,
        reason: format!("{name}: {reason}"),
    };
    let ones = |i: usize| i.count_ones() as usize;
    match name.to_ascii_uppercase().as_str() {
        "OR" => BoolFunction::from_fn(n, 1, |i| (i != 0) as u64),
        "AND" => BoolFunction::from_fn(n, 1, |i| (i == (1 << n) - 1) as u64),
        "PARITY" => BoolFunction::from_fn(n, 1, |i| (ones(i) % 2) as u64),
        "MAJ" => BoolFunction::from_fn(n, 1, |i| (2 * ones(i) > n) as u64),
        "CONST0" => BoolFunction::from_fn(n, 1, |_| 0),
        "CONST1" => BoolFunction::from_fn(n, 1, |_| 1),
        "IDENTITY" => BoolFunction::from_fn(n, n, |i| i as u64),
        "ADDRESS" => {
            let k = (0..n)
                .find(|&k| k + (1 << k) == n && k >= 1)
                .ok_or_else(|| invalid("requires n = k + 2^k with k ≥ 1"))?;
            BoolFunction::from_fn(n, 1, |i| {
                let addr = i & ((1 << k) - 1);
                (i >> (k + addr) & 1) as u64
            })
        }
        "BV" => {
            if n < 2 || !n.is_power_of_two() {
                return Err(invalid("requires n a power of two, n ≥ 2"));
            }
            let bits = n.trailing_zeros() as usize;
            let entries: Vec<(usize, u64)> =
                (0..n as u64).map(|z| (bv_encoding(n, z), z)).collect();
            BoolFunction::partial(n, bits, &entries)
        }
        _ => Err(Error::UnknownFunction(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn indicator_examples() {
        let parity = catalog("PARITY", 2).unwrap();
        assert_eq!(parity.indicator(1).unwrap().values(), &[0.0, 1.0, 1.0, 0.0]);
        let or = catalog("OR", 2).unwrap();
        assert_eq!(or.indicator(1).unwrap().values(), &[0.0, 1.0, 1.0, 1.0]);
        // y = "10" written x_1 first is the integer 1
        let id = catalog("IDENTITY", 2).unwrap();
        let y = parse_bitstring("10", 2).unwrap();
        let ind = id.indicator(y).unwrap();
        assert_eq!(ind.values().iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(
            ind.value(InputIndex::new(2).from_bitstring("10").unwrap()),
            1.0
        );
    }

    #[test]
    fn indicator_rejects_empty_fiber() {
        let c = catalog("CONST0", 3).unwrap();
        assert!(matches!(c.indicator(1), Err(Error::EmptyFiber(1))));
    }

    #[test]
    fn indicator_on_partial_zeroes_undefined_points() {
        let bv = catalog("BV", 4).unwrap();
        let ind = bv.indicator(0).unwrap();
        for idx in bv.undefined_points() {
            assert_eq!(ind.value(idx), 0.0);
        }
    }

    #[test]
    fn bv_encoding_examples() {
        let index = InputIndex::new(4);
        assert_eq!(index.to_bitstring(bv_encoding(4, 0b01)), "0101");
        assert_eq!(index.to_bitstring(bv_encoding(4, 0)), "0000");
        let bv = catalog("BV", 4).unwrap();
        assert_eq!(bv.value(bv_encoding(4, 1)), Some(1));
        assert!(!bv.is_total());
    }

    #[test]
    fn bv_domain_is_injective_image() {
        for n in [2usize, 4, 8, 16] {
            let bv = catalog("BV", n).unwrap();
            assert_eq!(bv.domain_size(), n);
            assert_eq!(bv.image(), (0..n as u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn catalog_or_and_errors() {
        let or = catalog("OR", 3).unwrap();
        assert_eq!(or.value(0), Some(0));
        assert!((1..8).all(|i| or.value(i) == Some(1)));
        assert!(matches!(catalog("XOR", 3), Err(Error::UnknownFunction(_))));
        assert!(catalog("BV", 6).is_err());
        assert!(catalog("ADDRESS", 4).is_err());
        assert!(catalog("OR", 0).is_err());
        assert!(catalog("OR", MAX_ARITY + 1).is_err());
    }

    #[test]
    fn address_selects_data_bit() {
        let f = catalog("ADDRESS", 3).unwrap();
        // x_1 = 1 selects x_3, x_1 = 0 selects x_2
        let idx = InputIndex::new(3).from_bitstring("101").unwrap();
        assert_eq!(f.value(idx), Some(1));
        let idx = InputIndex::new(3).from_bitstring("001").unwrap();
        assert_eq!(f.value(idx), Some(0));
    }

    #[test]
    fn majority() {
        let f = catalog("MAJ", 3).unwrap();
        assert_eq!(f.fiber_sizes()[&1], 4);
    }

    #[test]
    fn parse_text_tables() {
        assert_eq!(
            parse_truth_table("0111").unwrap(),
            catalog("OR", 2).unwrap()
        );
        assert_eq!(
            parse_truth_table("0110\n").unwrap(),
            catalog("PARITY", 2).unwrap()
        );
        assert!(parse_truth_table("011").is_err());
        match parse_truth_table("01\n1x") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_json_partial() {
        let text = r#"{"n":4,"m":2,"entries":[
            {"x":"0000","y":"00"},{"x":"0101","y":"10"},
            {"x":"0011","y":"01"},{"x":"0110","y":"11"}]}"#;
        let f = parse_truth_table(text).unwrap();
        assert_eq!(f.domain_size(), 4);
        assert_eq!(f, catalog("BV", 4).unwrap());
        let dup = r#"{"n":2,"m":1,"entries":[{"x":"01","y":"1"},{"x":"01","y":"0"}]}"#;
        assert!(matches!(
            parse_truth_table(dup),
            Err(Error::DuplicateInput(_))
        ));
        assert!(matches!(
            parse_truth_table("{\"n\": 2,"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn input_index_round_trips() {
        let index = InputIndex::new(5);
        for idx in 0..32 {
            assert_eq!(index.encode(&index.decode(idx)), idx);
            assert_eq!(index.from_bitstring(&index.to_bitstring(idx)).unwrap(), idx);
        }
    }

    fn arb_function() -> impl Strategy<Value = BoolFunction> {
        (1usize..=5, 1usize..=3).prop_flat_map(|(n, m)| {
            let m = m.min(n);
            proptest::collection::vec(proptest::option::weighted(0.7, 0u64..(1 << m)), 1 << n)
                .prop_filter_map("empty domain", move |table| {
                    let entries: Vec<_> = table
                        .iter()
                        .enumerate()
                        .filter_map(|(i, y)| y.map(|y| (i, y)))
                        .collect();
                    BoolFunction::partial(n, m, &entries).ok()
                })
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(f in arb_function()) {
            let text = serde_json::to_string(&f.to_json()).unwrap();
            prop_assert_eq!(parse_truth_table(&text).unwrap(), f);
        }

        #[test]
        fn truth_table_round_trip(n in 1usize..=8, seed in any::<u64>()) {
            let f = BoolFunction::from_fn(n, 1, |i| (seed.rotate_left(i as u32) ^ (i as u64 * 0x9e37)) & 1).unwrap();
            prop_assert_eq!(parse_truth_table(&f.to_truth_table().unwrap()).unwrap(), f);
        }

        #[test]
        fn indicators_partition_total_functions(n in 2usize..=6, seed in any::<u64>()) {
            let f = BoolFunction::from_fn(n, 2, |i| (seed >> (i % 32 * 2)) & 3).unwrap();
            let indicators: Vec<_> = f.image().into_iter().map(|y| f.indicator(y).unwrap()).collect();
            for x in 0..1usize << n {
                let total: f64 = indicators.iter().map(|g| g.value(x)).sum();
                prop_assert_eq!(total, 1.0);
            }
        }
    }
}
