//! The `mkp` command line: solver dispatch, schedule verification,
//! instance generation, and benchmark tables.
//!
//! Exit codes: 0 success, 1 internal error, 2 parse/validation error,
//! 3 guard refusal. For `verify`, a well-formed but infeasible schedule
//! also exits nonzero (1).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::approx::{
    ptas_constant_with, ptas_general_with, Epsilon, InnerSolver, PtasParams, DEFAULT_WORK_GUARD,
};
use crate::error::{Error, Result};
use crate::exact::{brute_force, dp_solve, DEFAULT_BRUTE_GUARD, DEFAULT_DP_TABLE_GUARD};
use crate::io::{
    self, read_instance, read_schedule, schedule_lines, serialize_result, BreakdownDoc,
    RationalDoc, ResultDoc, RunStats,
};
use crate::model::{evaluate, is_feasible, Instance, Schedule};
use crate::reductions::{
    gen_random, reduce_independent_set, reduce_two_kp, CapacityRule, GenParams, Graph,
    TwoKpInstance,
};
use crate::simplex::{build_lp, normalize_z, solve_basic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser)]
#[command(name = "mkp", about = "Multistage knapsack toolkit", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the chosen algorithm.
    Solve(SolveArgs),
    /// Check a schedule against an instance and report its value.
    Verify(VerifyArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a manifest of (instance, algorithm) rows and emit a table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Brute,
    Dp,
    LpBound,
    RoundLp,
    Ptas,
    PtasGeneral,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Brute => "brute",
            Algo::Dp => "dp",
            Algo::LpBound => "lp-bound",
            Algo::RoundLp => "round-lp",
            Algo::Ptas => "ptas",
            Algo::PtasGeneral => "ptas-general",
        }
    }
}

#[derive(Args, Clone)]
struct GuardArgs {
    /// Max n*T for brute-force enumeration.
    #[arg(long, default_value_t = DEFAULT_BRUTE_GUARD)]
    brute_guard: usize,
    /// Max DP table entries.
    #[arg(long, default_value_t = DEFAULT_DP_TABLE_GUARD)]
    dp_table_guard: u128,
    /// Max guess-loop units for the approximation schemes.
    #[arg(long, default_value_t = DEFAULT_WORK_GUARD)]
    work_guard: u128,
}

impl GuardArgs {
    /// Environment overrides for the defaults; explicit flags win.
    fn with_env(mut self) -> Self {
        fn get<T: std::str::FromStr>(name: &str) -> Option<T> {
            std::env::var(name).ok().and_then(|v| v.parse().ok())
        }
        if self.brute_guard == DEFAULT_BRUTE_GUARD {
            if let Some(v) = get::<usize>("MKP_BRUTE_GUARD") {
                self.brute_guard = v;
            }
        }
        if self.dp_table_guard == DEFAULT_DP_TABLE_GUARD {
            if let Some(v) = get::<u128>("MKP_DP_TABLE_GUARD") {
                self.dp_table_guard = v;
            }
        }
        if self.work_guard == DEFAULT_WORK_GUARD {
            if let Some(v) = get::<u128>("MKP_WORK_GUARD") {
                self.work_guard = v;
            }
        }
        self
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Accuracy for the approximation schemes, e.g. 0.3 or 3/10.
    #[arg(long)]
    epsilon: Option<String>,
    /// Interval subproblem solver for ptas-general.
    #[arg(long, value_enum, default_value = "ptas")]
    inner: InnerAlgo,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    guards: GuardArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnerAlgo {
    Ptas,
    Dp,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Schedule file (plain 0/1 rows) or a solve result document.
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: GenFamily,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Seeded uniform random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        weight_max: u64,
        #[arg(long, default_value_t = 10)]
        profit_max: u64,
        #[arg(long, default_value_t = 10)]
        bonus_max: u64,
        /// Capacity rule: "fixed:<c>" or "frac:<rho>" (rho decimal or a/b,
        /// applied to each step's total weight).
        #[arg(long, default_value = "frac:0.5")]
        cap: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hard instance from a graph: one step per edge, uniform bonus 2nm.
    IndependentSet {
        /// Edge-list file: "n m" then m lines "u v" (1-indexed).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-step instance from a pair of knapsack constraints.
    TwoKp {
        /// Text file: n, first weights, second weights, "C1 C2".
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Manifest: one row per run, "instance algo [epsilon]".
    #[arg(long)]
    manifest: PathBuf,
    /// Write the TSV table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    guards: GuardArgs,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded { .. } => EXIT_GUARD,
        Error::Parse(_)
        | Error::Dimension(_)
        | Error::InvalidArgument(_)
        | Error::IndexOutOfRange(_)
        | Error::Io(_) => EXIT_INVALID,
        Error::Overflow(_) | Error::Unbounded => EXIT_INTERNAL,
    }
}

/// Accepts "0.3", ".5", "3/10".
pub fn parse_epsilon(text: &str) -> Result<Epsilon> {
    let bad = || Error::InvalidArgument(format!("cannot parse epsilon {text:?}"));
    let eps = if let Some((a, b)) = text.split_once('/') {
        let numer: u64 = a.trim().parse().map_err(|_| bad())?;
        let denom: u64 = b.trim().parse().map_err(|_| bad())?;
        if denom == 0 {
            return Err(bad());
        }
        Epsilon::new(numer, denom)
    } else if let Some((int, frac)) = text.split_once('.') {
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let frac_val: u64 = frac.parse().map_err(|_| bad())?;
        Epsilon::new(int * scale + frac_val, scale)
    } else {
        let v: u64 = text.trim().parse().map_err(|_| bad())?;
        Epsilon::new(v, 1)
    };
    if eps.is_zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    Ok(eps)
}

/// Decimal rendering of an exact rational, rounded half-up to `digits`
/// fractional digits.
pub fn rat_to_decimal(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    // round half up on the absolute value
    let half = BigRational::new(1.into(), 2.into());
    let rounded = if scaled.is_negative() {
        -((-&scaled + half).floor())
    } else {
        (scaled + half).floor()
    }
    .to_integer();
    let sign = if rounded.is_negative() { "-" } else { "" };
    let abs = rounded.abs();
    let int = &abs / &scale;
    let frac = &abs % &scale;
    format!("{sign}{int}.{frac:0width$}", width = digits as usize)
}

struct SolveOutcome {
    doc: ResultDoc,
}

fn solve_instance(
    instance_path: &str,
    inst: &Instance,
    algo: Algo,
    epsilon: Option<&str>,
    inner: InnerAlgo,
    guards: &GuardArgs,
    timings: bool,
) -> Result<SolveOutcome> {
    let need_eps = || -> Result<Epsilon> {
        let text = epsilon.ok_or_else(|| {
            Error::InvalidArgument(format!("--epsilon is required for {}", algo.name()))
        })?;
        parse_epsilon(text)
    };
    let started = Instant::now();
    let mut doc = ResultDoc {
        instance: instance_path.to_string(),
        algorithm: algo.name().to_string(),
        epsilon: None,
        ell: None,
        value: None,
        lp_bound: None,
        breakdown: None,
        schedule: None,
        stats: RunStats::default(),
    };
    let mut schedule: Option<Schedule> = None;
    match algo {
        Algo::Brute => {
            let (sched, breakdown) = brute_force(inst, guards.brute_guard)?;
            doc.value = Some(breakdown.total);
            doc.breakdown = Some((&breakdown).into());
            schedule = Some(sched);
        }
        Algo::Dp => {
            let (sched, breakdown) = dp_solve(inst, guards.dp_table_guard)?;
            doc.value = Some(breakdown.total);
            doc.breakdown = Some((&breakdown).into());
            let entries: u128 = inst
                .capacities()
                .iter()
                .map(|&c| c as u128 + 1)
                .product::<u128>()
                * (inst.num_objects() as u128 + 1);
            doc.stats.dp_table_entries = Some(entries.min(u64::MAX as u128) as u64);
            schedule = Some(sched);
        }
        Algo::LpBound => {
            let model = build_lp(inst, &Default::default(), None)?;
            let sol = normalize_z(inst, &solve_basic(&model)?);
            doc.lp_bound = Some(RationalDoc {
                rational: sol.objective_value.to_string(),
                decimal: rat_to_decimal(&sol.objective_value, 6),
            });
            doc.stats.lp_solves = Some(1);
        }
        Algo::RoundLp => {
            let (sched, sol) = crate::approx::round_lp(inst, &Default::default(), None)?;
            let breakdown = evaluate(inst, &sched)?;
            doc.value = Some(breakdown.total);
            doc.breakdown = Some((&breakdown).into());
            doc.lp_bound = Some(RationalDoc {
                rational: sol.objective_value.to_string(),
                decimal: rat_to_decimal(&sol.objective_value, 6),
            });
            doc.stats.lp_solves = Some(1);
            schedule = Some(sched);
        }
        Algo::Ptas | Algo::PtasGeneral => {
            let eps = need_eps()?;
            let params = PtasParams {
                work_guard: guards.work_guard,
                ell_override: None,
                dp_table_guard: guards.dp_table_guard,
            };
            let report = if algo == Algo::Ptas {
                ptas_constant_with(inst, eps, &params)?
            } else {
                let inner = match inner {
                    InnerAlgo::Ptas => InnerSolver::PtasConstant,
                    InnerAlgo::Dp => InnerSolver::DpSolve,
                };
                ptas_general_with(inst, eps, inner, &params)?
            };
            let breakdown = evaluate(inst, &report.best_schedule)?;
            doc.epsilon = Some(eps.to_string());
            doc.ell = Some(report.ell as u64);
            doc.value = Some(breakdown.total);
            doc.breakdown = Some((&breakdown).into());
            doc.stats.lp_solves = Some(report.lp_solves);
            doc.stats.assignments_examined = Some(report.assignments_examined);
            schedule = Some(report.best_schedule);
        }
    }
    if let Some(sched) = &schedule {
        // Emitted value must match re-evaluation of the emitted schedule.
        let check = evaluate(inst, sched)?;
        if Some(check.total) != doc.value {
            return Err(Error::Overflow("result value failed re-evaluation"));
        }
        doc.schedule = Some(schedule_lines(sched));
    }
    if timings {
        doc.stats.wall_ms = Some(started.elapsed().as_millis().min(u64::MAX as u128) as u64);
    }
    Ok(SolveOutcome { doc })
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, content)?),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let guards = args.guards.clone().with_env();
    let inst = read_instance(&args.instance)?;
    let outcome = solve_instance(
        &args.instance.display().to_string(),
        &inst,
        args.algo,
        args.epsilon.as_deref(),
        args.inner,
        &guards,
        args.timings,
    )?;
    emit(args.out.as_deref(), &serialize_result(&outcome.doc))?;
    Ok(EXIT_OK)
}

#[derive(serde::Serialize)]
struct StepReport {
    step: usize,
    load: u64,
    capacity: u64,
    slack: i64,
    feasible: bool,
}

#[derive(serde::Serialize)]
struct VerifyReport {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_violation: Option<usize>,
    steps: Vec<StepReport>,
    breakdown: BreakdownDoc,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let inst = read_instance(&args.instance)?;
    let sched = read_schedule(&args.schedule)?;
    // Reject dimension mismatches before reporting.
    is_feasible(&inst, &sched)?;
    let mut steps = Vec::new();
    let mut first_violation = None;
    for t in 0..inst.num_steps() {
        let load: u64 = (0..inst.num_objects())
            .filter(|&i| sched.taken(t, i))
            .map(|i| inst.weight(t, i))
            .sum();
        let cap = inst.capacity(t);
        let feasible = load <= cap;
        if !feasible && first_violation.is_none() {
            first_violation = Some(t + 1);
        }
        steps.push(StepReport {
            step: t + 1,
            load,
            capacity: cap,
            slack: cap as i64 - load as i64,
            feasible,
        });
    }
    let breakdown = evaluate(&inst, &sched)?;
    let report = VerifyReport {
        feasible: first_violation.is_none(),
        first_violation,
        steps,
        breakdown: (&breakdown).into(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    print!("{text}");
    Ok(if report.feasible { EXIT_OK } else { EXIT_INTERNAL })
}

/// Capacity rule text: "fixed:<c>" or "frac:<rho>".
fn parse_cap_rule(text: &str) -> Result<CapacityRule> {
    let bad = || Error::InvalidArgument(format!("cannot parse capacity rule {text:?}"));
    let (kind, value) = text.split_once(':').ok_or_else(bad)?;
    match kind {
        "fixed" => Ok(CapacityRule::Fixed(value.parse().map_err(|_| bad())?)),
        "frac" => {
            let rho = parse_epsilon_or_zero(value).map_err(|_| bad())?;
            Ok(CapacityRule::Fraction {
                numer: *rho.numer(),
                denom: *rho.denom(),
            })
        }
        _ => Err(bad()),
    }
}

fn parse_epsilon_or_zero(text: &str) -> Result<Epsilon> {
    match parse_epsilon(text) {
        Ok(eps) => Ok(eps),
        Err(_) if matches!(text.trim(), "0" | "0.0" | "0.00" | ".0") => Ok(Epsilon::new(0, 1)),
        Err(e) => Err(e),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let (inst, out) = match args.family {
        GenFamily::Random {
            n,
            t,
            seed,
            weight_max,
            profit_max,
            bonus_max,
            cap,
            out,
        } => {
            let params = GenParams {
                seed,
                n,
                t,
                weight_max,
                profit_max,
                bonus_max,
                capacity_rule: parse_cap_rule(&cap)?,
            };
            (gen_random(&params)?, out)
        }
        GenFamily::IndependentSet { graph, out } => {
            let g = Graph::parse(&std::fs::read_to_string(&graph)?)?;
            (reduce_independent_set(&g)?, out)
        }
        GenFamily::TwoKp { input, out } => {
            let kp = TwoKpInstance::parse(&std::fs::read_to_string(&input)?)?;
            (reduce_two_kp(&kp)?, out)
        }
    };
    io::write_instance(&out, &inst)?;
    Ok(EXIT_OK)
}

struct BenchRow {
    instance: String,
    algo: Algo,
    epsilon: Option<String>,
}

fn parse_manifest(text: &str) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let instance = it.next().unwrap().to_string();
        let algo_text = it.next().ok_or_else(|| {
            Error::Parse(format!("manifest line {}: missing algorithm", lineno + 1))
        })?;
        let algo = Algo::from_str(algo_text, true).map_err(|_| {
            Error::Parse(format!(
                "manifest line {}: unknown algorithm {algo_text:?}",
                lineno + 1
            ))
        })?;
        let epsilon = it.next().map(str::to_string);
        rows.push(BenchRow {
            instance,
            algo,
            epsilon,
        });
    }
    Ok(rows)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let guards = args.guards.clone().with_env();
    let rows = parse_manifest(&std::fs::read_to_string(&args.manifest)?)?;

    struct Done {
        row: BenchRow,
        value: Option<u64>,
        lp_bound: Option<BigRational>,
        wall_ms: Option<u64>,
        error: Option<String>,
    }
    let mut done = Vec::new();
    for row in rows {
        let started = Instant::now();
        let outcome = read_instance(Path::new(&row.instance)).and_then(|inst| {
            solve_instance(
                &row.instance,
                &inst,
                row.algo,
                row.epsilon.as_deref(),
                InnerAlgo::Ptas,
                &guards,
                false,
            )
        });
        let wall_ms = args
            .timings
            .then(|| started.elapsed().as_millis().min(u64::MAX as u128) as u64);
        match outcome {
            Ok(SolveOutcome { doc }) => {
                let lp_bound = doc
                    .lp_bound
                    .as_ref()
                    .and_then(|b| parse_big_rational(&b.rational));
                done.push(Done {
                    row,
                    value: doc.value,
                    lp_bound,
                    wall_ms,
                    error: None,
                });
            }
            Err(e) => done.push(Done {
                row,
                value: None,
                lp_bound: None,
                wall_ms,
                error: Some(e.to_string()),
            }),
        }
    }

    // Reference values per instance for the ratio columns.
    let mut dp_ref: BTreeMap<String, u64> = BTreeMap::new();
    let mut lp_ref: BTreeMap<String, BigRational> = BTreeMap::new();
    for d in &done {
        match (d.row.algo, &d.value, &d.lp_bound) {
            (Algo::Dp, Some(v), _) => {
                dp_ref.insert(d.row.instance.clone(), *v);
            }
            (Algo::LpBound, _, Some(b)) => {
                lp_ref.insert(d.row.instance.clone(), b.clone());
            }
            _ => {}
        }
    }

    let mut table = String::new();
    write!(table, "instance\talgorithm\tepsilon\tvalue\tratio_dp\tratio_lp\terror").unwrap();
    if args.timings {
        write!(table, "\twall_ms").unwrap();
    }
    table.push('\n');
    let mut any_failed = false;
    for d in &done {
        let ratio = |denom: Option<BigRational>| -> String {
            match (d.value, denom) {
                (Some(v), Some(denom)) if !denom.is_zero() => {
                    rat_to_decimal(&(BigRational::from_integer(v.into()) / denom), 6)
                }
                _ => "-".to_string(),
            }
        };
        let ratio_dp = ratio(
            dp_ref
                .get(&d.row.instance)
                .map(|&v| BigRational::from_integer(v.into())),
        );
        let ratio_lp = ratio(lp_ref.get(&d.row.instance).cloned());
        write!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            d.row.instance,
            d.row.algo.name(),
            d.row.epsilon.as_deref().unwrap_or("-"),
            d.value.map_or("-".to_string(), |v| v.to_string()),
            ratio_dp,
            ratio_lp,
            d.error.as_deref().unwrap_or("-"),
        )
        .unwrap();
        if args.timings {
            write!(table, "\t{}", d.wall_ms.unwrap_or(0)).unwrap();
        }
        table.push('\n');
        if d.error.is_some() {
            any_failed = true;
        }
    }
    emit(args.out.as_deref(), &table)?;
    Ok(if any_failed { EXIT_INTERNAL } else { EXIT_OK })
}

fn parse_big_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((a, b)) => Some(BigRational::new(a.parse().ok()?, b.parse().ok()?)),
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_parsing() {
        assert_eq!(parse_epsilon("0.3").unwrap(), Epsilon::new(3, 10));
        assert_eq!(parse_epsilon("3/10").unwrap(), Epsilon::new(3, 10));
        assert_eq!(parse_epsilon(".5").unwrap(), Epsilon::new(1, 2));
        assert_eq!(parse_epsilon("1").unwrap(), Epsilon::new(1, 1));
        assert!(parse_epsilon("0").is_err());
        assert!(parse_epsilon("-0.1").is_err());
        assert!(parse_epsilon("x").is_err());
    }

    #[test]
    fn cap_rule_parsing() {
        assert_eq!(parse_cap_rule("fixed:7").unwrap(), CapacityRule::Fixed(7));
        assert_eq!(
            parse_cap_rule("frac:0.5").unwrap(),
            CapacityRule::Fraction { numer: 1, denom: 2 }
        );
        assert_eq!(
            parse_cap_rule("frac:0").unwrap(),
            CapacityRule::Fraction { numer: 0, denom: 1 }
        );
        assert!(parse_cap_rule("nope").is_err());
    }

    #[test]
    fn decimal_rendering() {
        let r = BigRational::new(1.into(), 3.into());
        assert_eq!(rat_to_decimal(&r, 6), "0.333333");
        let r = BigRational::new(5.into(), 2.into());
        assert_eq!(rat_to_decimal(&r, 2), "2.50");
        let r = BigRational::from_integer(7.into());
        assert_eq!(rat_to_decimal(&r, 3), "7.000");
    }
}
