//! Command implementations behind the `qdtlab` binary.
//!
//! Every command produces a JSON envelope `{schema, config, timestamp?, result}`
//! plus a text rendering; `config` echoes the parsed arguments so a report can
//! be reproduced from its header.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::boolfn::{
    bits_to_string, catalog, parse_truth_table, BoolFunction, InputIndex, CATALOG_NAMES,
};
use crate::lpdeg::{approx_degree_with, family_degree, ValueRange, APPROX_ERROR, LP_MAX_ARITY};
use crate::metrics::MetricsReport;
use crate::qsim::{build_example1, build_grover, CircuitJson, Measurement, QueryAlgorithm};
use crate::verify::{
    check_degree_sensitivity_catalog, check_edge_bound, check_entropy_sensitivity, check_fact1,
    check_main_chain, Mode, VerificationReport, CHAIN_TOL,
};
use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "qdtlab",
    version,
    about = "Entropy lower bounds for quantum decision trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp field so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Worker threads for parallel scans.
    #[arg(long, global = true, env = "QDTLAB_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Entropy, per-output densities and sensitivities of a function.
    Analyze(FnArg),
    /// Approximate degree of a function, or the joint family degree.
    Adeg(AdegArgs),
    /// Run one of the lemma / theorem checkers.
    Verify(VerifyArgs),
    /// Simulate a query algorithm.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FnArg {
    /// `NAME:n` from the catalog, `tt:<bits>` for a literal truth table, or a file path.
    #[arg(long = "fn")]
    pub function: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AdegArgs {
    #[command(flatten)]
    pub function: FnArg,
    /// Minimal degree of the joint output-probability family.
    #[arg(long)]
    pub family: bool,
    /// Allowed pointwise error, in (0, 1/2).
    #[arg(long, default_value_t = APPROX_ERROR)]
    pub eps: f64,
    /// Drop the `[0,1]` range constraint on the approximating polynomial.
    #[arg(long)]
    pub unconstrained: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    EdgeBound,
    EntropySensitivity,
    DegreeSensitivity,
    MainChain,
    Fact1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Demo {
    Example1,
    Grover,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Which inequality to check.
    #[arg(value_enum)]
    pub claim: Claim,
    /// Arity of the population (edge-bound, entropy-sensitivity, degree-sensitivity, fact1).
    #[arg(long)]
    pub n: Option<usize>,
    /// Exhaustive enumeration (n ≤ 4) or seeded sampling (5 ≤ n ≤ 10).
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Number of sampled items in `--mode sampled`.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Seed for `--mode sampled`; equal seeds give identical populations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest population a checker may enumerate.
    #[arg(long, default_value_t = 1 << 20)]
    pub budget: u64,
    /// Function for `main-chain` (and optionally `degree-sensitivity`).
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Demo circuit for `fact1`.
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
    /// Grover iterations for `--demo grover`.
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
    /// Additive slack for `degree-sensitivity`.
    #[arg(long, default_value_t = CHAIN_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Built-in circuit: the one-query decoder or Grover search.
    #[arg(long, value_enum, conflicts_with = "circuit")]
    pub demo: Option<Demo>,
    /// Circuit JSON file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Measurement JSON file (defaults to reading the pointer).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Arity for `--demo`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Marked position (0-based pointer) for the Grover demo.
    #[arg(long)]
    pub marked: Option<usize>,
    /// Oracle calls for `--demo grover`.
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
    /// Input bitstring `x_1…x_n`.
    #[arg(long)]
    pub x: Option<String>,
    /// Run every input of the demo's domain (all inputs for circuit files).
    #[arg(long)]
    pub all: bool,
    /// Also check amplitude and acceptance polynomial degrees.
    #[arg(long)]
    pub fact1: bool,
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
    pub success: bool,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

/// Resolve a function argument: `NAME:n`, `tt:<bits>`, or a file path.
pub fn parse_fn_spec(spec: &str) -> Result<BoolFunction> {
    if let Some(bits) = spec.strip_prefix("tt:") {
        return parse_truth_table(bits);
    }
    let path = std::path::Path::new(spec);
    if let Some((name, n)) = spec.split_once(':').filter(|_| !path.exists()) {
        let name = name.to_ascii_uppercase();
        if !CATALOG_NAMES.contains(&name.as_str()) {
            return Err(Error::UnknownFunction(name));
        }
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad arity `{n}` in `{spec}`")))?;
        return catalog(&name, n);
    }
    let text = std::fs::read_to_string(spec)?;
    parse_truth_table(&text)
}

fn round6(v: f64) -> String {
    format!("{v:.6}")
}

fn report_output(report: &VerificationReport) -> Result<CommandOutput> {
    let mut text = format!(
        "{}: {} ({}, {} items)\n",
        report.claim,
        if report.passed() { "PASS" } else { "FAIL" },
        report.population.description,
        report.population.count
    );
    if let Some(w) = &report.extremal {
        let _ = writeln!(text, "tightest: {} (slack {})", w.item, round6(w.slack));
    }
    for v in &report.violations {
        let _ = writeln!(
            text,
            "violation: {}: {} (slack {:e})",
            v.item, v.detail, v.slack
        );
    }
    Ok(CommandOutput {
        result: serde_json::to_value(report)?,
        text,
        csv: None,
        success: report.passed(),
    })
}

pub fn cmd_analyze(args: &FnArg) -> Result<CommandOutput> {
    let f = parse_fn_spec(&args.function)?;
    let report = MetricsReport::compute(&f)?;
    let mut text = format!("{f}\nentropy: {}\n", round6(report.entropy));
    if let Some(d) = report.density {
        let _ = writeln!(text, "density: {}", round6(d));
    }
    if let Some(s) = report.avg_sensitivity {
        let _ = writeln!(text, "sensitivity: {}", round6(s));
    }
    for o in &report.per_output {
        let _ = writeln!(
            text,
            "y={} p_y={} H(p_y)={} s_y={}",
            o.y,
            round6(o.p_y),
            round6(o.binary_entropy),
            round6(o.avg_sensitivity)
        );
    }
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(CommandOutput {
        result: serde_json::to_value(&report)?,
        text,
        csv: Some(String::from_utf8(csv).expect("csv output is UTF-8")),
        success: true,
    })
}

pub fn cmd_adeg(args: &AdegArgs) -> Result<CommandOutput> {
    let f = parse_fn_spec(&args.function.function)?;
    if f.arity() > LP_MAX_ARITY {
        return Err(Error::LimitExceeded(format!(
            "LP commands are limited to n ≤ {LP_MAX_ARITY}; `{}` has n={}",
            args.function.function,
            f.arity()
        )));
    }
    if args.family {
        let (d, family) = family_degree(&f)?;
        let witness = family.to_json(&f);
        let text = format!(
            "{f}\nfamily degree: {d}\nerror: {}\nmax violation: {:e}\n",
            round6(family.error),
            witness.max_violation
        );
        return Ok(CommandOutput {
            result: json!({ "family": true, "degree": d, "witness": witness }),
            text,
            csv: None,
            success: true,
        });
    }
    let g = f.to_real().map_err(|_| {
        Error::InvalidArgument(
            "single-function adeg needs a total single-output function; use --family".into(),
        )
    })?;
    let range = if args.unconstrained {
        ValueRange::Unconstrained
    } else {
        ValueRange::Unit
    };
    let a = approx_degree_with(&g, args.eps, range)?;
    let text = format!(
        "{f}\nadeg: {}\nerror: {}\n",
        a.degree_bound,
        round6(a.error)
    );
    Ok(CommandOutput {
        result: json!({
            "family": false,
            "degree": a.degree_bound,
            "eps": args.eps,
            "range": range,
            "error": a.error,
            "witness": { "degree": a.witness.degree(), "coeffs": a.witness.coeffs() },
        }),
        text,
        csv: None,
        success: true,
    })
}

fn demo_algorithm(
    demo: Demo,
    n: usize,
    iterations: usize,
) -> Result<(QueryAlgorithm, Measurement)> {
    match demo {
        Demo::Example1 => build_example1(n),
        Demo::Grover => build_grover(n, iterations),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<CommandOutput> {
    let mode = match args.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::Sampled {
            samples: args.samples,
            seed: args.seed,
        },
    };
    let need_n = || {
        args.n
            .ok_or_else(|| Error::InvalidArgument(format!("{:?} needs --n", args.claim)))
    };
    let report = match args.claim {
        Claim::EdgeBound => check_edge_bound(need_n()?, mode, args.budget)?,
        Claim::EntropySensitivity => check_entropy_sensitivity(need_n()?, mode, args.budget)?,
        Claim::DegreeSensitivity => {
            if args.mode == ModeArg::Sampled {
                return Err(Error::InvalidArgument(
                    "degree-sensitivity runs on the catalog; sampled mode does not apply".into(),
                ));
            }
            let n = match &args.function {
                Some(spec) => parse_fn_spec(spec)?.arity(),
                None => need_n()?,
            };
            if n > LP_MAX_ARITY {
                return Err(Error::LimitExceeded(format!(
                    "LP commands are limited to n ≤ {LP_MAX_ARITY}"
                )));
            }
            check_degree_sensitivity_catalog(n, args.tol)?
        }
        Claim::MainChain => {
            let spec = args
                .function
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("main-chain needs --fn".into()))?;
            let f = parse_fn_spec(spec)?;
            if f.arity() > LP_MAX_ARITY {
                return Err(Error::LimitExceeded(format!(
                    "LP commands are limited to n ≤ {LP_MAX_ARITY}"
                )));
            }
            check_main_chain(&f)?
        }
        Claim::Fact1 => {
            let demo = args.demo.unwrap_or(Demo::Example1);
            let n = need_n()?;
            let (alg, meas) = demo_algorithm(demo, n, args.iterations)?;
            check_fact1(&alg, &meas, n)?
        }
    };
    report_output(&report)
}

#[derive(Debug, Clone, Serialize)]
struct InputOutcome {
    x: String,
    expected: Option<u64>,
    probabilities: std::collections::BTreeMap<u64, f64>,
    abstain: f64,
    success_probability: Option<f64>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<CommandOutput> {
    let (alg, meas) = match (&args.demo, &args.circuit) {
        (Some(demo), None) => {
            let n = args
                .n
                .ok_or_else(|| Error::InvalidArgument("--demo needs --n".into()))?;
            demo_algorithm(*demo, n, args.iterations)?
        }
        (None, Some(path)) => {
            let circuit: CircuitJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let alg = QueryAlgorithm::from_json(&circuit)?;
            let meas = match &args.measure {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => Measurement::new(alg.registers().pointer_qubits()),
            };
            (alg, meas)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --demo or --circuit".into(),
            ))
        }
    };
    meas.validate(alg.registers())?;
    let n = alg.registers().n;
    let index = InputIndex::new(n);

    // (input, expected output)
    let inputs: Vec<(usize, Option<u64>)> = if let Some(bits) = &args.x {
        vec![(index.from_bitstring(bits)?, None)]
    } else if let Some(marked) = args.marked {
        if marked >= n {
            return Err(Error::InvalidArgument(format!(
                "marked position {marked} ≥ n={n}"
            )));
        }
        vec![(1 << marked, Some(marked as u64))]
    } else if args.all {
        match args.demo {
            Some(Demo::Example1) => {
                let bv = catalog("BV", n)?;
                bv.domain_indices().map(|x| (x, bv.value(x))).collect()
            }
            Some(Demo::Grover) => (0..n).map(|i| (1usize << i, Some(i as u64))).collect(),
            None => {
                if n > crate::qsim::EXHAUSTIVE_MAX_ARITY {
                    return Err(Error::LimitExceeded(format!(
                        "--all is limited to n ≤ {}",
                        crate::qsim::EXHAUSTIVE_MAX_ARITY
                    )));
                }
                (0..1usize << n).map(|x| (x, None)).collect()
            }
        }
    } else if args.fact1 {
        Vec::new()
    } else {
        return Err(Error::InvalidArgument(
            "give --x, --marked, --all or --fact1".into(),
        ));
    };

    let mut outcomes = Vec::with_capacity(inputs.len());
    let mut text = format!("n={n}, T={}\n", alg.queries());
    for (x, expected) in inputs {
        let dist = meas.distribution(&alg.run(x)?);
        let success_probability =
            expected.map(|y| dist.probabilities.get(&y).copied().unwrap_or(0.0));
        let _ = write!(text, "x={}", index.to_bitstring(x));
        if let (Some(y), Some(p)) = (expected, success_probability) {
            let _ = write!(
                text,
                " expected={} p={}",
                bits_to_string(y, meas.output_qubits.len()),
                round6(p)
            );
        }
        let top = dist
            .probabilities
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(y, p)| (*y, *p));
        if let Some((y, p)) = top {
            let _ = write!(
                text,
                " most-likely={} ({})",
                bits_to_string(y, meas.output_qubits.len()),
                round6(p)
            );
        }
        text.push('\n');
        outcomes.push(InputOutcome {
            x: index.to_bitstring(x),
            expected,
            probabilities: dist.probabilities,
            abstain: dist.abstain,
            success_probability,
        });
    }

    let mut csv_writer = csv::Writer::from_writer(Vec::new());
    csv_writer.write_record(["x", "y", "probability"])?;
    for o in &outcomes {
        for (y, p) in &o.probabilities {
            csv_writer.write_record([o.x.clone(), y.to_string(), p.to_string()])?;
        }
    }
    let csv = String::from_utf8(
        csv_writer
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))?,
    )
    .expect("csv output is UTF-8");

    let mut success = true;
    let mut fact1 = Value::Null;
    if args.fact1 {
        let report = check_fact1(&alg, &meas, n)?;
        let rendered = report_output(&report)?;
        text.push_str(&rendered.text);
        success = report.passed();
        fact1 = rendered.result;
    }
    Ok(CommandOutput {
        result: json!({
            "circuit": alg.to_json(),
            "measurement": meas,
            "outcomes": outcomes,
            "fact1": fact1,
        }),
        text,
        csv: Some(csv),
        success,
    })
}

pub fn execute(cli: &Cli) -> Result<CommandOutput> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Adeg(a) => cmd_adeg(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Render a command's output in the requested format.
pub fn render(cli: &Cli, output: &CommandOutput, timestamp: Option<u64>) -> Result<String> {
    match cli.format {
        Format::Text => Ok(output.text.clone()),
        Format::Csv => output.csv.clone().ok_or_else(|| {
            Error::InvalidArgument("this command has no CSV form; use --format json or text".into())
        }),
        Format::Json => {
            let mut envelope = serde_json::Map::new();
            envelope.insert("schema".into(), json!(SCHEMA_VERSION));
            envelope.insert("config".into(), serde_json::to_value(cli)?);
            if let Some(ts) = timestamp {
                envelope.insert("timestamp".into(), json!(ts));
            }
            envelope.insert("success".into(), json!(output.success));
            envelope.insert("result".into(), output.result.clone());
            let mut text = serde_json::to_string_pretty(&Value::Object(envelope))?;
            text.push('\n');
            Ok(text)
        }
    }
}
