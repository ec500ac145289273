//! Argument parsing and dispatch for the `kmpmd` binary.
//!
//! Subcommands: `gen` (write an instance file), `run` (execute the online
//! engine and emit a report), `opt` (exact offline optimum), `lp` (build
//! and solve the relaxation), `audit` (all engine/offline/LP audits on one
//! instance), `bench` (CSV sweep over a directory or a seeded generator
//! suite), `check-metric` (axiom and sandwich verification for an
//! instance's space), and `lower-bound` (the adversarial-family report).
//!
//! Exit codes: 0 success, 1 malformed input, 2 guard exceeded, 3 audit
//! violation.
//!
//! # Examples
//! ```
//! use kmpmd_cli::cli::cli_main;
//!
//! let dir = std::env::temp_dir().join("kmpmd-cli-doc");
//! std::fs::create_dir_all(&dir).unwrap();
//! let path = dir.join("sigma.json");
//! let code = cli_main([
//!     "kmpmd", "gen", "--kind", "adversarial",
//!     "--k", "2", "--s", "1", "--epsilon", "1/100",
//!     "--out", path.to_str().unwrap(),
//! ]);
//! assert_eq!(code, 0);
//! assert!(path.exists());
//! ```

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use kmpmd_core::gdk::{
    audit_cost_accounting, audit_dual_feasibility, audit_potential_identity,
    audit_spanning_forest, default_rate, run, AuditReport, GdkConfig, GdkError, RunResult,
    TraceLevel,
};
use kmpmd_core::instances::{
    gen_adversarial_line, gen_random, Instance, InstanceError, RandomKind, RandomParams,
};
use kmpmd_core::lp::{
    build_p_prime, simplex_solve_with, verify_duality_chain, LpError, LpGuards, LpStatus,
};
use kmpmd_core::metrics::{MetricError, MetricGuards, SpaceKind, VerifyMode};
use kmpmd_core::numerics::{int, parse_rational, render_decimal, render_rational};
use kmpmd_core::offline::{
    brute_force_opt, check_p_prime_feasibility, verify_optcost_sandwich, OfflineError,
    OfflineGuards,
};

use crate::bench::{compute_rows, rows_to_csv, seeded_line_suite, summary_line, NamedInstance};
use crate::formats::{
    load_instance, render_json, save_instance, AuditDoc, BoundsDoc, FormatError, GroupDoc,
    InstanceSummaryDoc, ReportDoc, ResultDoc,
};
use crate::lowerbound::emit_lowerbound_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// An error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn malformed(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_MALFORMED,
        message: message.into(),
    }
}

fn metric_code(e: &MetricError) -> i32 {
    match e {
        MetricError::CircuitGuardExceeded { .. } | MetricError::BudgetExceeded { .. } => {
            EXIT_GUARD
        }
        _ => EXIT_MALFORMED,
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError {
            code: metric_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        let code = match &e {
            InstanceError::Metric(m) => metric_code(m),
            _ => EXIT_MALFORMED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        let code = match &e {
            FormatError::Instance(InstanceError::Metric(m)) => metric_code(m),
            _ => EXIT_MALFORMED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GdkError> for CliError {
    fn from(e: GdkError) -> Self {
        let code = match &e {
            GdkError::InvariantBreach(_) => EXIT_VIOLATION,
            _ => EXIT_MALFORMED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<OfflineError> for CliError {
    fn from(e: OfflineError) -> Self {
        let code = match &e {
            OfflineError::NotAPartition(_) => EXIT_MALFORMED,
            _ => EXIT_GUARD,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        CliError {
            code: EXIT_GUARD,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "kmpmd",
    version,
    about = "Online k-way matching with delays: run GD-k, verify it, benchmark it"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run the online engine and emit a report.
    Run(RunArgs),
    /// Compute the exact offline optimum by exhaustive search.
    Opt(OptArgs),
    /// Build and solve the LP relaxation exactly.
    Lp(LpArgs),
    /// Run every audit on one instance; nonzero exit on any violation.
    Audit(AuditArgs),
    /// Sweep instances and emit one CSV row per instance plus a summary.
    Bench(BenchArgs),
    /// Verify the H-metric axioms and the sandwich bounds for a space.
    CheckMetric(CheckMetricArgs),
    /// Emit the adversarial lower-bound report for sigma_l(k, s, epsilon).
    LowerBound(LowerBoundArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    #[value(name = "line_uniform")]
    LineUniform,
    #[value(name = "explicit_random")]
    ExplicitRandom,
    #[value(name = "adversarial")]
    Adversarial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HmetricArg {
    Dmax,
    Dhc,
}

#[derive(Args)]
pub struct GenArgs {
    /// Generator family.
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Group size k.
    #[arg(long)]
    pub k: usize,
    /// Request count (random kinds; must be a multiple of k).
    #[arg(long)]
    pub m: Option<usize>,
    /// Batch multiplier for the adversarial family (m = s * k^2).
    #[arg(long)]
    pub s: Option<usize>,
    /// Batch spacing for the adversarial family (rational, e.g. 1/100).
    #[arg(long)]
    pub epsilon: Option<String>,
    /// RNG seed (random kinds).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinate / raw-entry span (random kinds).
    #[arg(long)]
    pub span: Option<u64>,
    /// Arrival-time horizon (random kinds).
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Point count (explicit_random).
    #[arg(long)]
    pub points: Option<usize>,
    /// H-metric kind for explicit_random spaces.
    #[arg(long, value_enum, default_value = "dmax")]
    pub hmetric: HmetricArg,
    /// Output instance file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceArg {
    Full,
    Summary,
}

#[derive(Args)]
pub struct RunArgs {
    /// Instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Trace granularity; audits needing per-event snapshots require full.
    #[arg(long, value_enum, default_value = "full")]
    pub trace: TraceArg,
    /// Dual growth rate override (rational); default is 1/(gamma k^2).
    #[arg(long)]
    pub rate: Option<String>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct OptArgs {
    /// Instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Partition-count guard override.
    #[arg(long)]
    pub guard: Option<u64>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct LpArgs {
    /// Instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Build guard override (maximum m).
    #[arg(long)]
    pub guard: Option<usize>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AuditArgs {
    /// Instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files to sweep (overrides the generator).
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Generated suite size.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Group size for generated instances.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Request count for generated instances.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// First seed of the generated suite (instance i uses seed + i).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file (stdout when omitted); the summary goes to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
pub struct CheckMetricArgs {
    /// Instance file whose space is checked.
    #[arg(long)]
    pub instance: PathBuf,
    /// Axiom verification mode; the sandwich sweep is always sampled.
    #[arg(long, value_enum, default_value = "sampled")]
    pub mode: ModeArg,
    /// Sample count (sampled axiom checks and the sandwich sweep).
    #[arg(long, default_value_t = 1000)]
    pub count: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct LowerBoundArgs {
    /// Group size k (at least 2).
    #[arg(long)]
    pub k: usize,
    /// Batch multiplier (m = s * k^2).
    #[arg(long)]
    pub s: usize,
    /// Batch spacing epsilon (rational, at most 1/max(k^2, m)).
    #[arg(long)]
    pub epsilon: String,
    /// Report file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Entry point: parses `argv` and runs one subcommand, returning the
/// process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_MALFORMED,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Opt(args) => cmd_opt(args),
        Command::Lp(args) => cmd_lp(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Bench(args) => cmd_bench(args),
        Command::CheckMetric(args) => cmd_check_metric(args),
        Command::LowerBound(args) => cmd_lower_bound(args),
    }
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    load_instance(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn write_text(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| malformed(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rational_arg(field: &str, text: &str) -> Result<kmpmd_core::numerics::Rational, CliError>
{
    parse_rational(text)
        .map_err(|e| malformed(format!("{field}: cannot parse {text:?}: {e:?}")))
}

fn cmd_gen(args: GenArgs) -> Result<i32, CliError> {
    let instance = match args.kind {
        GenKind::Adversarial => {
            if args.m.is_some() {
                return Err(malformed(
                    "--kind adversarial derives m = s * k^2; use --s, not --m",
                ));
            }
            let s = args
                .s
                .ok_or_else(|| malformed("--kind adversarial requires --s"))?;
            let epsilon = args
                .epsilon
                .as_deref()
                .ok_or_else(|| malformed("--kind adversarial requires --epsilon"))?;
            let epsilon = parse_rational_arg("--epsilon", epsilon)?;
            gen_adversarial_line(args.k, s, epsilon)?
        }
        GenKind::LineUniform | GenKind::ExplicitRandom => {
            if args.s.is_some() || args.epsilon.is_some() {
                return Err(malformed(
                    "--s/--epsilon only apply to --kind adversarial",
                ));
            }
            let m = args
                .m
                .ok_or_else(|| malformed("random generators require --m"))?;
            let mut params = RandomParams::default();
            if let Some(span) = args.span {
                params.span = span;
            }
            if let Some(horizon) = args.horizon {
                params.horizon = horizon;
            }
            if let Some(points) = args.points {
                params.points = points;
            }
            params.hmetric = match args.hmetric {
                HmetricArg::Dmax => SpaceKind::DmaxOverBase,
                HmetricArg::Dhc => SpaceKind::DhcOverBase,
            };
            let kind = match args.kind {
                GenKind::LineUniform => RandomKind::LineUniform,
                _ => RandomKind::ExplicitRandom,
            };
            gen_random(kind, args.k, m, args.seed, &params)?
        }
    };
    fs::write(&args.out, save_instance(&instance))
        .map_err(|e| malformed(format!("{}: {e}", args.out.display())))?;
    Ok(EXIT_OK)
}

/// Assembles the four-section report for a finished run, including the
/// audits the run's configuration supports.
fn build_report(instance: &Instance, result: &RunResult) -> Result<ReportDoc, CliError> {
    let full = result.trace_level == TraceLevel::Full;
    let default = result.rate == default_rate(instance);
    let mut audits = Vec::new();
    if full {
        audits.push(AuditDoc::from_report(&audit_dual_feasibility(result, instance)?));
        audits.push(AuditDoc::from_report(&audit_potential_identity(
            result, instance,
        )?));
    } else {
        let why = "requires --trace full".to_string();
        audits.push(AuditDoc::skipped("dual_feasibility", why.clone()));
        audits.push(AuditDoc::skipped("potential_identity", why));
    }
    audits.push(AuditDoc::from_report(&audit_spanning_forest(result)?));
    if default {
        audits.push(AuditDoc::from_report(&audit_cost_accounting(
            result, instance,
        )?));
    } else {
        audits.push(AuditDoc::skipped(
            "cost_accounting",
            "requires the default rate".to_string(),
        ));
    }
    Ok(ReportDoc {
        instance: InstanceSummaryDoc::new(instance),
        result: result_doc(result),
        audits,
        bounds: bounds_doc(instance, result),
    })
}

fn result_doc(result: &RunResult) -> ResultDoc {
    ResultDoc {
        rate: render_rational(&result.rate),
        alg: render_rational(&result.total_cost),
        dist: render_rational(&result.total_dist),
        wait: render_rational(&result.total_wait),
        dual: render_rational(&result.dual_objective),
        events: result.trace.len(),
        groups: result
            .groups
            .iter()
            .map(|g| GroupDoc {
                ids: g.ids.clone(),
                time: render_rational(&g.time),
                dist: render_rational(&g.dist),
                wait: render_rational(&g.wait),
            })
            .collect(),
    }
}

fn bounds_doc(instance: &Instance, result: &RunResult) -> BoundsDoc {
    let m = instance.m();
    let k = instance.k();
    let general =
        int((4 * m * k + k * k) as i64) * instance.space().gamma() * &result.dual_objective;
    let refined_applicable = matches!(
        instance.space().kind(),
        SpaceKind::LineDiameter | SpaceKind::DmaxOverBase
    );
    let (refined_bound, refined_ok) = if refined_applicable {
        let refined = int((4 * m + k * k) as i64) * &result.dual_objective;
        let ok = result.total_cost <= refined;
        (Some(render_rational(&refined)), Some(ok))
    } else {
        (None, None)
    };
    BoundsDoc {
        general_ok: result.total_cost <= general,
        general_bound: render_rational(&general),
        refined_applicable,
        refined_bound,
        refined_ok,
        rate_overridden: result.rate != default_rate(instance),
    }
}

fn cmd_run(args: RunArgs) -> Result<i32, CliError> {
    let instance = read_instance(&args.instance)?;
    let config = GdkConfig {
        trace_level: match args.trace {
            TraceArg::Full => TraceLevel::Full,
            TraceArg::Summary => TraceLevel::Summary,
        },
        rate_override: match &args.rate {
            Some(text) => Some(parse_rational_arg("--rate", text)?),
            None => None,
        },
        ..GdkConfig::default()
    };
    let result = run(&instance, config)?;
    let report = build_report(&instance, &result)?;
    write_text(args.out.as_ref(), &render_json(&report))?;
    Ok(if report.any_violation() {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

/// Output document of `opt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptDoc {
    pub value: String,
    pub value_decimal: String,
    pub groups: Vec<Vec<u32>>,
    /// Size of the searched partition space.
    pub partitions: String,
}

fn cmd_opt(args: OptArgs) -> Result<i32, CliError> {
    let instance = read_instance(&args.instance)?;
    let mut guards = OfflineGuards::default();
    if let Some(guard) = args.guard {
        guards.max_partitions = guard;
    }
    let solution = brute_force_opt(&instance, &guards)?;
    let doc = OptDoc {
        value: render_rational(&solution.value),
        value_decimal: render_decimal(&solution.value, 6),
        groups: solution.groups.clone(),
        partitions: solution.partitions.to_string(),
    };
    write_text(args.out.as_ref(), &render_json(&doc))?;
    Ok(EXIT_OK)
}

/// One nonzero entry of the LP solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSupportDoc {
    pub pair: (u32, u32),
    pub value: String,
}

/// Output document of `lp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpDoc {
    pub variables: usize,
    pub rows: usize,
    pub pruned: usize,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_decimal: Option<String>,
    pub phase1_value: String,
    pub pivots: u64,
    /// Nonzero solution entries.
    pub support: Vec<LpSupportDoc>,
}

fn cmd_lp(args: LpArgs) -> Result<i32, CliError> {
    let instance = read_instance(&args.instance)?;
    let mut guards = LpGuards::default();
    if let Some(guard) = args.guard {
        guards.max_m = guard;
    }
    let model = build_p_prime(&instance, &guards)?;
    let solution = simplex_solve_with(&model, &guards)?;
    let support = match &solution.x {
        Some(x) => x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != int(0))
            .map(|(j, v)| LpSupportDoc {
                pair: model.pairs[j],
                value: render_rational(v),
            })
            .collect(),
        None => Vec::new(),
    };
    let doc = LpDoc {
        variables: model.pairs.len(),
        rows: model.rows.len(),
        pruned: model.pruned_masks.len(),
        status: match solution.status {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
        .to_string(),
        value: solution.value.as_ref().map(render_rational),
        value_decimal: solution.value.as_ref().map(|v| render_decimal(v, 6)),
        phase1_value: render_rational(&solution.phase1_value),
        pivots: solution.pivots,
        support,
    };
    write_text(args.out.as_ref(), &render_json(&doc))?;
    // Built models are feasible and bounded; anything else is corruption.
    Ok(if solution.status == LpStatus::Optimal {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_audit(args: AuditArgs) -> Result<i32, CliError> {
    let instance = read_instance(&args.instance)?;
    let result = run(&instance, GdkConfig::default())?;
    let mut audits = vec![
        AuditDoc::from_report(&audit_dual_feasibility(&result, &instance)?),
        AuditDoc::from_report(&audit_potential_identity(&result, &instance)?),
        AuditDoc::from_report(&audit_spanning_forest(&result)?),
        AuditDoc::from_report(&audit_cost_accounting(&result, &instance)?),
    ];

    // Group-level two-sided opt-cost bound, aggregated over the carve log.
    let mut sandwich = AuditReport::new("optcost_sandwich");
    for group in &result.groups {
        sandwich.checks += 1;
        let report = verify_optcost_sandwich(&instance, &group.ids);
        if !report.holds {
            sandwich.violate(format!(
                "group {:?}: {} <= {} <= {} fails",
                group.ids,
                render_rational(&report.lower),
                render_rational(&report.value),
                render_rational(&report.upper)
            ));
        }
    }
    audits.push(AuditDoc::from_report(&sandwich));

    // Perfect-matching feasibility of the engine's own partition.
    let partition: Vec<Vec<u32>> = result.groups.iter().map(|g| g.ids.clone()).collect();
    match check_p_prime_feasibility(&instance, &partition, &OfflineGuards::default()) {
        Ok(report) => audits.push(AuditDoc::from_report(&report)),
        Err(e @ OfflineError::SubsetGuardExceeded { .. }) => {
            audits.push(AuditDoc::skipped("p_prime_feasibility", e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }

    // Exact duality chain, where both comparison points are computable.
    let lp_guards = LpGuards::default();
    let p_prime = if instance.m() <= lp_guards.max_m {
        let model = build_p_prime(&instance, &lp_guards)?;
        Some(
            simplex_solve_with(&model, &lp_guards)?
                .value
                .expect("built models are feasible and bounded"),
        )
    } else {
        None
    };
    let opt = match brute_force_opt(&instance, &OfflineGuards::default()) {
        Ok(solution) => Some(solution.value),
        Err(OfflineError::PartitionGuardExceeded { .. })
        | Err(OfflineError::DpGuardExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    match (&p_prime, &opt) {
        (Some(p), Some(o)) => {
            audits.push(AuditDoc::from_report(&verify_duality_chain(
                &result.dual_objective,
                p,
                o,
            )));
        }
        _ => {
            audits.push(AuditDoc::skipped(
                "duality_chain",
                "P' or OPT outside guards".to_string(),
            ));
        }
    }

    let report = ReportDoc {
        instance: InstanceSummaryDoc::new(&instance),
        result: result_doc(&result),
        audits,
        bounds: bounds_doc(&instance, &result),
    };
    write_text(args.out.as_ref(), &render_json(&report))?;
    Ok(if report.any_violation() {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

fn load_directory(dir: &Path) -> Result<Vec<NamedInstance>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| malformed(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(malformed(format!(
            "{}: no .json instance files",
            dir.display()
        )));
    }
    paths
        .into_iter()
        .map(|path| {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok(NamedInstance {
                name,
                instance: read_instance(&path)?,
            })
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<i32, CliError> {
    let suite = match &args.dir {
        Some(dir) => load_directory(dir)?,
        None => seeded_line_suite(args.count, args.k, args.m, args.seed)?,
    };
    let rows = compute_rows(&suite);
    let csv = rows_to_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, &csv)
            .map_err(|e| malformed(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(&csv)
                .and_then(|()| stdout.flush())
                .map_err(|e| malformed(format!("stdout: {e}")))?;
        }
    }
    eprintln!("{}", summary_line(&rows));
    Ok(if rows.iter().all(|r| r.bounds_ok) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

/// One axiom outcome in a `check-metric` report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomDoc {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// Output document of `check-metric`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckMetricDoc {
    pub metric: String,
    pub points: usize,
    pub k: usize,
    pub gamma: String,
    pub mode: String,
    pub axioms: Vec<AxiomDoc>,
    pub axioms_passed: bool,
    pub sandwich_tuples: u64,
    pub sandwich_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sandwich_violation: Option<String>,
}

fn cmd_check_metric(args: CheckMetricArgs) -> Result<i32, CliError> {
    let instance = read_instance(&args.instance)?;
    let space = instance.space();
    let guards = MetricGuards::default();
    let mode = match args.mode {
        ModeArg::Exhaustive => VerifyMode::Exhaustive,
        ModeArg::Sampled => VerifyMode::Sampled {
            count: args.count,
            seed: args.seed,
        },
    };
    let axioms = space.verify_h_axioms(mode, &guards)?;

    // Sandwich sweep: seeded random tuples with a random member anchor.
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let k = space.k();
    let n = space.len();
    let mut violation = None;
    for _ in 0..args.count {
        let tuple: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
        let anchor = tuple[rng.gen_range(0..k)];
        let report = space
            .verify_sandwich(&tuple, anchor)
            .expect("tuple and anchor are valid by construction");
        if !report.holds && violation.is_none() {
            violation = Some(format!(
                "tuple {tuple:?} anchor {anchor}: {} <= {} <= {} fails",
                render_rational(&report.lower),
                render_rational(&report.d_h),
                render_rational(&report.upper)
            ));
        }
    }

    let doc = CheckMetricDoc {
        metric: space.kind().to_string(),
        points: n,
        k,
        gamma: render_rational(space.gamma()),
        mode: axioms.mode.to_string(),
        axioms: axioms
            .axioms()
            .iter()
            .map(|a| AxiomDoc {
                name: a.name.to_string(),
                passed: a.passed,
                checks: a.checks,
                counterexample: a.counterexample.clone(),
            })
            .collect(),
        axioms_passed: axioms.passed(),
        sandwich_tuples: args.count,
        sandwich_holds: violation.is_none(),
        sandwich_violation: violation,
    };
    write_text(args.out.as_ref(), &render_json(&doc))?;
    Ok(if doc.axioms_passed && doc.sandwich_holds {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_lower_bound(args: LowerBoundArgs) -> Result<i32, CliError> {
    let epsilon = parse_rational_arg("--epsilon", &args.epsilon)?;
    let doc = emit_lowerbound_report(args.k, args.s, &epsilon)
        .map_err(|e| malformed(e.to_string()))?;
    write_text(args.out.as_ref(), &render_json(&doc))?;
    Ok(if doc.all_ok() { EXIT_OK } else { EXIT_VIOLATION })
}
