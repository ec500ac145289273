//! The adversarial lower-bound report: runs the engine on the sigma_l
//! family and checks the closed-form claims behind the Omega(m/k) ratio.
//!
//! For sigma_l(k, s, epsilon) with m = s*k^2 and epsilon within the regime
//! `epsilon <= 1/max(k^2, m)`, the report asserts, exactly:
//!
//! - `ALG >= m + k + (m - k) * epsilon`;
//! - `OPT <= k + k*eps + k^3*eps + m*k*eps` (via brute force when the
//!   offline guards allow, otherwise via the explicit batch-by-batch
//!   schedule `k(1 + eps + (k(k-1) - 2)eps + (m/k^2 - 1)k(k-1)eps)`, which
//!   is an upper bound on OPT by construction);
//! - `ALG/OPT >= (m + k) / (4k)`.
//!
//! # Examples
//! ```
//! use kmpmd_cli::lowerbound::emit_lowerbound_report;
//! use kmpmd_core::numerics::rat;
//!
//! let report = emit_lowerbound_report(2, 1, &rat(1, 100)).unwrap();
//! assert_eq!(report.alg, "301/50"); // 6 + 2 eps
//! assert_eq!(report.opt, "101/50"); // 2 + 2 eps
//! assert!(report.alg_ok && report.opt_ok && report.ratio_ok);
//! ```

use std::fmt;

use kmpmd_core::gdk::{run, GdkConfig, TraceLevel};
use kmpmd_core::instances::{gen_adversarial_line, sigma_epsilon_ceiling, InstanceError};
use kmpmd_core::numerics::{int, rat, render_decimal, render_rational, Rational};
use kmpmd_core::offline::{brute_force_opt, OfflineError, OfflineGuards};
use serde::{Deserialize, Serialize};

/// Errors from report generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerBoundError {
    /// epsilon must be positive and at most `1/max(k^2, m)`.
    EpsilonOutOfRegime { epsilon: String, ceiling: String },
    /// Bad parameters (k < 2, s < 1, epsilon <= 0).
    Params(String),
}

impl fmt::Display for LowerBoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerBoundError::EpsilonOutOfRegime { epsilon, ceiling } => write!(
                f,
                "epsilon = {epsilon} is outside the regime (must be at most {ceiling})"
            ),
            LowerBoundError::Params(msg) => write!(f, "invalid parameters: {msg}"),
        }
    }
}

impl std::error::Error for LowerBoundError {}

/// The emitted report; every quantity exact, with one decimal convenience
/// field for the ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundDoc {
    pub k: usize,
    pub s: usize,
    pub epsilon: String,
    pub m: usize,
    pub alg: String,
    /// `m + k + (m - k) * epsilon`.
    pub alg_claim_floor: String,
    pub alg_ok: bool,
    pub opt: String,
    /// Whether `opt` is the exact brute-force optimum (true) or the
    /// explicit schedule upper bound (false).
    pub opt_exact: bool,
    /// `k + k*eps + k^3*eps + m*k*eps`.
    pub opt_claim_ceiling: String,
    pub opt_ok: bool,
    pub ratio: String,
    pub ratio_decimal: String,
    /// `(m + k) / (4k)`.
    pub ratio_floor: String,
    pub ratio_ok: bool,
}

impl LowerBoundDoc {
    /// True iff every asserted inequality held.
    pub fn all_ok(&self) -> bool {
        self.alg_ok && self.opt_ok && self.ratio_ok
    }
}

/// Builds the report for sigma_l(k, s, epsilon).
pub fn emit_lowerbound_report(
    k: usize,
    s: usize,
    epsilon: &Rational,
) -> Result<LowerBoundDoc, LowerBoundError> {
    let instance = gen_adversarial_line(k, s, epsilon.clone()).map_err(|e| match e {
        InstanceError::BadParams(msg) => LowerBoundError::Params(msg.to_string()),
        other => LowerBoundError::Params(format!("{other}")),
    })?;
    let m = instance.m();
    let ceiling = sigma_epsilon_ceiling(k, s);
    if *epsilon > ceiling {
        return Err(LowerBoundError::EpsilonOutOfRegime {
            epsilon: render_rational(epsilon),
            ceiling: render_rational(&ceiling),
        });
    }

    let config = GdkConfig {
        trace_level: TraceLevel::Summary,
        ..GdkConfig::default()
    };
    let alg = run(&instance, config)
        .expect("engine run on a generated instance")
        .total_cost;
    let alg_floor =
        int((m + k) as i64) + int((m - k) as i64) * epsilon;
    let alg_ok = alg >= alg_floor;

    let (opt, opt_exact) = match brute_force_opt(&instance, &OfflineGuards::default()) {
        Ok(solution) => (solution.value, true),
        Err(OfflineError::PartitionGuardExceeded { .. })
        | Err(OfflineError::DpGuardExceeded { .. }) => {
            // Explicit feasible schedule: batch i is matched as one group
            // per point; its cost telescopes to the closed form below.
            let kk = int(k as i64);
            let schedule = &kk
                * (int(1)
                    + epsilon
                    + int((k * (k - 1)) as i64 - 2) * epsilon
                    + int((m / (k * k) - 1) as i64) * int((k * (k - 1)) as i64) * epsilon);
            (schedule, false)
        }
        Err(e) => panic!("unexpected offline failure: {e}"),
    };
    let opt_ceiling = int(k as i64)
        + int(k as i64) * epsilon
        + int((k * k * k) as i64) * epsilon
        + int((m * k) as i64) * epsilon;
    let opt_ok = opt <= opt_ceiling;

    let ratio = &alg / &opt;
    let ratio_floor = rat((m + k) as i64, (4 * k) as i64);
    let ratio_ok = ratio >= ratio_floor;

    Ok(LowerBoundDoc {
        k,
        s,
        epsilon: render_rational(epsilon),
        m,
        alg: render_rational(&alg),
        alg_claim_floor: render_rational(&alg_floor),
        alg_ok,
        opt: render_rational(&opt),
        opt_exact,
        opt_claim_ceiling: render_rational(&opt_ceiling),
        opt_ok,
        ratio: render_rational(&ratio),
        ratio_decimal: render_decimal(&ratio, 6),
        ratio_floor: render_rational(&ratio_floor),
        ratio_ok,
    })
}
