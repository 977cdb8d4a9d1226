//! Experiment orchestration: sweeps, Monte Carlo error estimation and the
//! Fano conversion from error rate to achievable rate.

pub mod config;
mod run;

use serde::Serialize;

use crate::error::Error;
use crate::info::binary_entropy;
use crate::units::{Rate, Unit};

pub use config::{DecoderChoice, DupSpec, ExperimentConfig, Format, Mode};
pub use run::{run, EstimateRow, RunSummary, Verdict};

/// Rate guaranteed by Fano's inequality for a decoder with block error
/// probability `p_e`: `H - h(p_e) - p_e tau` per base, with the binary entropy
/// taken in base `q`.
pub fn fano_rate(entropy_rate: Rate, p_e: f64, tau: u32, q: u32, unit: Unit) -> Rate {
    let h = entropy_rate.to(Unit::PerBase, q, tau).value;
    let hb = binary_entropy(p_e.clamp(0.0, 1.0)) / (q as f64).ln();
    Rate {
        value: h - hb - p_e * tau as f64,
        unit: Unit::PerBase,
    }
    .to(unit, q, tau)
}

/// 95% Wilson score interval for `errors` out of `trials`.
pub fn wilson_ci_95(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    // the interval contains p analytically; clamp away rounding at 0 and n
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: usize,
    pub errors: usize,
    pub p_hat: f64,
    pub wilson_ci_95: (f64, f64),
    pub fano_rate: Rate,
}

impl MonteCarloEstimate {
    pub fn new(
        trials: usize,
        errors: usize,
        entropy_rate: Rate,
        tau: u32,
        q: u32,
        unit: Unit,
    ) -> Self {
        let p_hat = if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        };
        MonteCarloEstimate {
            trials,
            errors,
            p_hat,
            wilson_ci_95: wilson_ci_95(errors, trials),
            fano_rate: fano_rate(entropy_rate, p_hat, tau, q, unit),
        }
    }

    /// Binomial standard error of `p_hat`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// Process exit code for each failure class.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::InvalidParameter(_)
        | Error::Precondition(_)
        | Error::StateSpaceTooLarge { .. }
        | Error::IndexOutOfRange { .. }
        | Error::UndefinedPair(_)
        | Error::AmbiguousCollapse
        | Error::EmptySequence => 3,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => 4,
        Error::TraceTooLong { .. } => 5,
        Error::NotConverged { .. } | Error::TruncationCap { .. } => 6,
        Error::NotIrreducible | Error::NotAperiodic(_) | Error::InconsistentWindow => 7,
    }
}

/// Short machine-readable name of the failure class.
pub fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        2 => "config",
        3 => "invalid-parameter",
        4 => "io",
        5 => "budget-exceeded",
        6 => "numerical",
        _ => "model",
    }
}
