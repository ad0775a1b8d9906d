//! Quantities behind the entropy lower bound for quantum decision trees.
//!
//! The crate is organised bottom-up:
//!
//! * [`boolfn`]: dense total/partial Boolean functions, the input index
//!   convention and a small catalog of standard functions.
//! * [`fourier`]: Walsh–Hadamard spectra, multilinear interpolation, degree.
//! * [`metrics`]: entropy, binary entropy, density and average sensitivity.
//! * [`lp`]: a dense two-phase simplex solver (Bland's rule).
//! * [`lpdeg`]: approximate degree and the joint polynomial-family LP.
//! * [`verify`]: executable checkers for each inequality of the lower bound.
//! * [`qsim`]: state-vector simulator of the query model with its oracle gate.
//! * [`cli`]: report types and command implementations behind the binary.

pub mod boolfn;
pub mod cli;
mod error;
pub mod fourier;
pub mod lp;
pub mod lpdeg;
pub mod metrics;
pub mod qsim;
pub mod verify;

pub use boolfn::{BoolFunction, InputIndex, RealFunction};
pub use error::{Error, Result};
pub use fourier::{MultilinearPoly, Spectrum};
pub use lpdeg::PolyFamily;
pub use qsim::{Measurement, QueryAlgorithm, StateVector};
pub use verify::VerificationReport;

/// Schema version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
