//! Command-line front end for `multipure`.
//!
//! Subcommands:
//!
//! * `evolve`: iterate one schedule on one state and write the trace;
//! * `threshold`: bisect for the lowest purifiable fidelity of a family;
//! * `compare`: direct versus indirect efficiency over a fidelity grid;
//! * `oracle-check`: compare the fast maps with the dense simulator.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 divergence,
//! annihilation or oracle violation, 3 iteration cap reached.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multipure::analysis::{
    efficiency_sweep, find_indirect_threshold, find_threshold, parse_grid, EfficiencyMeasure,
    StateFamily, ThresholdResult, DEFAULT_BRACKET_TOLERANCE, DEFAULT_JITTER,
};
use multipure::dense::run_protocol_step_dense;
use multipure::ghz::MAX_PARTIES;
use multipure::indirect::{IndirectConfig, TwoParticleProtocol};
use multipure::protocols::{iterate, p1_engine, p2_map, P1Engine, DEFAULT_ACCURACY};
use multipure::{DiagonalState, Outcome, Schedule, Step};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_MAX_ITERATIONS: i32 = 3;

/// Environment variable naming the directory for outputs written without `--out`.
pub const OUT_DIR_ENV: &str = "MULTIPURE_OUT_DIR";

/// Largest party count accepted by `oracle-check`.
pub const ORACLE_MAX_PARTIES: usize = 4;
/// Deviation above which `oracle-check` reports a violation.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

const NOISE_MODEL: &str = "GHZ-diagonal families; channel noise is Pauli or global depolarizing";

#[derive(Debug, Parser)]
#[command(
    name = "multipure",
    version,
    about = "Multiparticle entanglement purification simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate a schedule on one state and write the per-step trace.
    Evolve(EvolveArgs),
    /// Locate the lowest purifiable fidelity of a state family.
    Threshold(ThresholdArgs),
    /// Sweep fidelity and compare direct and indirect efficiencies.
    Compare(CompareArgs),
    /// Check the fast P1/P2 maps against the dense simulator.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Werner,
    Binary,
    ZeroPairing,
    PerturbedWerner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Dejmps,
    Bbpssw,
}

impl From<VariantArg> for TwoParticleProtocol {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Dejmps => TwoParticleProtocol::Dejmps,
            VariantArg::Bbpssw => TwoParticleProtocol::Bbpssw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Survival,
    Halved,
}

impl From<MeasureArg> for EfficiencyMeasure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Survival => EfficiencyMeasure::Survival,
            MeasureArg::Halved => EfficiencyMeasure::Halved,
        }
    }
}

#[derive(Debug, Args)]
struct StateArgs {
    /// Number of parties.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "werner")]
    family: FamilyArg,
    /// Jitter of the perturbed-werner family.
    #[arg(long, default_value_t = DEFAULT_JITTER)]
    jitter: f64,
    /// Seed of the perturbed-werner family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    /// `p1`, `p2`, `p1p2` or an explicit cycle such as `p1,p1,p2`.
    #[arg(long, default_value = "p1p2")]
    schedule: String,
    /// Stop once 1 - fidelity falls below this value.
    #[arg(long, default_value_t = DEFAULT_ACCURACY)]
    accuracy: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; defaults to $MULTIPURE_OUT_DIR/<name> or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Initial fidelity.
    #[arg(long)]
    f: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Final bisection bracket width.
    #[arg(long, default_value_t = DEFAULT_BRACKET_TOLERANCE)]
    tolerance: f64,
    /// Search the indirect route instead of the direct schedule.
    #[arg(long)]
    indirect: bool,
    #[arg(long, value_enum, default_value = "dejmps")]
    variant: VariantArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Fidelity grid `lo:hi:step`, inclusive.
    #[arg(long, default_value = "0.40:1.00:0.05")]
    grid: String,
    /// `survival` scores P_J, `halved` scores P_J / 2^J.
    #[arg(long, value_enum, default_value = "survival")]
    efficiency: MeasureArg,
    #[arg(long, value_enum, default_value = "dejmps")]
    variant: VariantArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(field: &str, detail: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: format!("invalid {field}: {detail}"),
        }
    }

    fn io(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: format!("cannot write output: {err}"),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Evolve(a) => cmd_evolve(&a),
        Command::Threshold(a) => cmd_threshold(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::OracleCheck(a) => cmd_oracle_check(&a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn check_n(n: usize) -> Result<(), Failure> {
    if (2..=MAX_PARTIES).contains(&n) {
        Ok(())
    } else {
        Err(Failure::invalid(
            "--n",
            format!("{n} is outside 2..={MAX_PARTIES}"),
        ))
    }
}

fn family(args: &StateArgs) -> Result<StateFamily, Failure> {
    check_n(args.n)?;
    Ok(match args.family {
        FamilyArg::Werner => StateFamily::Werner,
        FamilyArg::Binary => StateFamily::BinaryMixture,
        FamilyArg::ZeroPairing => StateFamily::ZeroPairing,
        FamilyArg::PerturbedWerner => {
            if !(0.0..1.0).contains(&args.jitter) {
                return Err(Failure::invalid(
                    "--jitter",
                    format!("{} is outside [0, 1)", args.jitter),
                ));
            }
            StateFamily::PerturbedWerner {
                jitter: args.jitter,
                seed: args.seed,
            }
        }
    })
}

fn schedule(args: &ScheduleArgs) -> Result<Schedule, Failure> {
    let parsed: Schedule = args
        .schedule
        .parse()
        .map_err(|e| Failure::invalid("--schedule", e))?;
    parsed
        .with_accuracy(args.accuracy)
        .map_err(|e| Failure::invalid("--accuracy", e))?
        .with_max_iterations(args.max_iterations)
        .map_err(|e| Failure::invalid("--max-iterations", e))
}

fn check_tolerance(tolerance: f64) -> Result<(), Failure> {
    if tolerance.is_finite() && tolerance > 0.0 && tolerance < 1.0 {
        Ok(())
    } else {
        Err(Failure::invalid(
            "--tolerance",
            format!("{tolerance} is outside (0, 1)"),
        ))
    }
}

/// Full-precision float: 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Opens the destination: `--out`, else `$MULTIPURE_OUT_DIR/<default_name>`,
/// else stdout.
fn open_output(args: &OutputArgs, default_name: &str) -> Result<Box<dyn Write>, Failure> {
    let path = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(default_name)));
    Ok(match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(Failure::io)?;
            }
            Box::new(BufWriter::new(File::create(&path).map_err(Failure::io)?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn meta_line(command: &str, config: &[(&str, String)]) -> String {
    let echo: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "# multipure {} {command} {} model=\"{NOISE_MODEL}\"",
        env!("CARGO_PKG_VERSION"),
        echo.join(" ")
    )
}

fn meta_json(command: &str, config: &[(&str, String)]) -> serde_json::Value {
    let echo: serde_json::Map<String, serde_json::Value> = config
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    json!({
        "tool": "multipure",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": echo,
        "model": NOISE_MODEL,
    })
}

fn state_config(args: &StateArgs, family: &StateFamily) -> Vec<(&'static str, String)> {
    let mut config = vec![
        ("n", args.n.to_string()),
        ("family", family.name().to_string()),
    ];
    if let StateFamily::PerturbedWerner { jitter, seed } = family {
        config.push(("jitter", jitter.to_string()));
        config.push(("seed", seed.to_string()));
    }
    config
}

fn schedule_config(schedule: &Schedule) -> Vec<(&'static str, String)> {
    vec![
        ("schedule", schedule.to_string()),
        ("accuracy", format!("{:e}", schedule.accuracy())),
        ("max_iterations", schedule.max_iterations().to_string()),
    ]
}

fn write_csv(
    out: &mut dyn Write,
    meta: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), Failure> {
    writeln!(out, "{meta}").map_err(Failure::io)?;
    let mut writer = csv::Writer::from_writer(&mut *out);
    writer.write_record(header).map_err(Failure::io)?;
    for row in rows {
        writer.write_record(row).map_err(Failure::io)?;
    }
    writer.flush().map_err(Failure::io)
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(Failure::io)?;
    writeln!(out).map_err(Failure::io)?;
    out.flush().map_err(Failure::io)
}

fn cmd_evolve(args: &EvolveArgs) -> CmdResult {
    let family = family(&args.state)?;
    let schedule = schedule(&args.schedule)?;
    let state = family
        .state(args.state.n, args.f)
        .map_err(|e| Failure::invalid("--f", e))?;
    let trace = iterate(&state, &schedule).map_err(|e| Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    })?;

    let header = [
        "iteration",
        "step",
        "fidelity",
        "keep_prob",
        "cumulative_P",
        "efficiency",
    ];
    let mut rows = vec![vec![
        "0".into(),
        "init".into(),
        num(trace.initial_fidelity()),
        num(1.0),
        num(1.0),
        num(1.0),
    ]];
    let mut scale = 1.0;
    for (j, (record, cumulative)) in trace
        .records()
        .iter()
        .zip(trace.cumulative_survival())
        .enumerate()
    {
        scale *= 0.5;
        rows.push(vec![
            (j + 1).to_string(),
            record.step.to_string(),
            num(record.fidelity),
            num(record.keep_prob),
            num(cumulative),
            num(cumulative * scale),
        ]);
    }

    let mut config = state_config(&args.state, &family);
    config.push(("f", args.f.to_string()));
    config.extend(schedule_config(&schedule));
    config.push(("outcome", format!("{:?}", trace.outcome())));
    let mut out = open_output(&args.output, "evolve.csv")?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&mut *out, &meta_line("evolve", &config), &header, &rows)?,
        Format::Json => {
            let records: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "iteration": row[0].parse::<usize>().unwrap_or(0),
                        "step": row[1],
                        "fidelity": row[2].parse::<f64>().unwrap_or(f64::NAN),
                        "keep_prob": row[3].parse::<f64>().unwrap_or(f64::NAN),
                        "cumulative_P": row[4].parse::<f64>().unwrap_or(f64::NAN),
                        "efficiency": row[5].parse::<f64>().unwrap_or(f64::NAN),
                    })
                })
                .collect();
            write_json(
                &mut *out,
                &json!({
                    "outcome": format!("{:?}", trace.outcome()),
                    "records": records,
                    "meta": meta_json("evolve", &config),
                }),
            )?
        }
    }
    Ok(match trace.outcome() {
        Outcome::Converged => EXIT_OK,
        Outcome::Diverged | Outcome::Annihilated => EXIT_FAILED,
        Outcome::MaxIterations => EXIT_MAX_ITERATIONS,
    })
}

fn cmd_threshold(args: &ThresholdArgs) -> CmdResult {
    let family = family(&args.state)?;
    let schedule = schedule(&args.schedule)?;
    check_tolerance(args.tolerance)?;
    let n = args.state.n;
    let result: ThresholdResult = if args.indirect {
        if n < 3 {
            return Err(Failure::invalid(
                "--n",
                "the indirect route needs at least 3 parties",
            ));
        }
        let config = IndirectConfig {
            accuracy: schedule.accuracy(),
            max_iterations: schedule.max_iterations(),
            variant: args.variant.into(),
        };
        find_indirect_threshold(&family, n, &config, args.tolerance)
    } else {
        find_threshold(&family, n, &schedule, args.tolerance)
    }
    .map_err(|e| Failure::invalid("--schedule", e))?;

    let mut config = state_config(&args.state, &family);
    config.extend(schedule_config(&schedule));
    config.push(("tolerance", format!("{:e}", args.tolerance)));
    config.push((
        "route",
        if args.indirect { "indirect" } else { "direct" }.into(),
    ));
    if args.indirect {
        config.push((
            "variant",
            TwoParticleProtocol::from(args.variant).to_string(),
        ));
    }
    let mut out = open_output(&args.output, "threshold.json")?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            &mut *out,
            &json!({
                "n": result.n_parties,
                "family": family.name(),
                "schedule": result.schedule,
                "threshold": result.threshold,
                "bracket": result.bracket_width,
                "lower": result.lower,
                "upper": result.upper,
                "verified": result.verified,
                "evaluations": result.evaluations,
                "accuracy": schedule.accuracy(),
                "meta": meta_json("threshold", &config),
            }),
        )?,
        Format::Csv => write_csv(
            &mut *out,
            &meta_line("threshold", &config),
            &[
                "n",
                "family",
                "schedule",
                "threshold",
                "bracket",
                "accuracy",
                "verified",
            ],
            &[vec![
                result.n_parties.to_string(),
                family.name().to_string(),
                result.schedule.clone(),
                num(result.threshold),
                num(result.bracket_width),
                num(schedule.accuracy()),
                result.verified.to_string(),
            ]],
        )?,
    }
    Ok(EXIT_OK)
}

fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let family = family(&args.state)?;
    let schedule = schedule(&args.schedule)?;
    let n = args.state.n;
    if n < 3 {
        return Err(Failure::invalid(
            "--n",
            "the indirect route needs at least 3 parties",
        ));
    }
    let grid = parse_grid(&args.grid).map_err(|e| Failure::invalid("--grid", e))?;
    if let Some(&bad) = grid
        .iter()
        .find(|&&f| !(family.min_fidelity(n)..=1.0).contains(&f))
    {
        return Err(Failure::invalid(
            "--grid",
            format!("f = {bad} is outside the {} family's range", family.name()),
        ));
    }
    let measure: EfficiencyMeasure = args.efficiency.into();
    let variant: TwoParticleProtocol = args.variant.into();
    let rows = efficiency_sweep(n, &family, &grid, &schedule, variant)
        .map_err(|e| Failure::invalid("--grid", e))?;

    let mut config = state_config(&args.state, &family);
    config.extend(schedule_config(&schedule));
    config.push(("grid", args.grid.clone()));
    config.push(("efficiency", measure.to_string()));
    config.push(("variant", variant.to_string()));
    let mut out = open_output(&args.output, "compare.csv")?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.f),
                        opt_num(r.direct.efficiency(measure)),
                        opt_num(r.indirect.efficiency(measure)),
                        if r.direct.converged {
                            r.direct.iterations.to_string()
                        } else {
                            String::new()
                        },
                        if r.indirect.converged {
                            r.indirect.iterations.to_string()
                        } else {
                            String::new()
                        },
                    ]
                })
                .collect();
            write_csv(
                &mut *out,
                &meta_line("compare", &config),
                &["f", "direct_eff", "indirect_eff", "direct_J", "indirect_J"],
                &table,
            )?
        }
        Format::Json => {
            let points: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "f": r.f,
                        "direct_eff": r.direct.efficiency(measure),
                        "indirect_eff": r.indirect.efficiency(measure),
                        "direct_J": r.direct.converged.then_some(r.direct.iterations),
                        "indirect_J": r.indirect.converged.then_some(r.indirect.iterations),
                    })
                })
                .collect();
            write_json(
                &mut *out,
                &json!({ "rows": points, "meta": meta_json("compare", &config) }),
            )?
        }
    }
    Ok(EXIT_OK)
}

/// Result of comparing the fast maps with the dense simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub samples: usize,
    pub max_weight_deviation: f64,
    pub max_keep_deviation: f64,
    /// Input and step with the largest deviation.
    pub worst: Option<(DiagonalState, Step)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_weight_deviation < ORACLE_TOLERANCE && self.max_keep_deviation < ORACLE_TOLERANCE
    }
}

/// Runs P1 through `engine` and P2 through the closed-form map on `samples`
/// seeded random GHZ-diagonal states and measures the largest deviation from
/// the dense circuits.
pub fn oracle_check(
    n_parties: usize,
    samples: usize,
    seed: u64,
    engine: &P1Engine,
) -> multipure::Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        samples,
        max_weight_deviation: 0.0,
        max_keep_deviation: 0.0,
        worst: None,
    };
    let mut worst_total = -1.0;
    for _ in 0..samples {
        let weights = (0..1usize << n_parties).map(|_| rng.gen::<f64>()).collect();
        let state = DiagonalState::normalized(n_parties, weights)?;
        for step in [Step::P1, Step::P2] {
            let (fast, keep) = match step {
                Step::P1 => engine.apply(&state)?,
                Step::P2 => p2_map(&state)?,
            };
            let dense = run_protocol_step_dense(&state, step)?;
            let dw = fast.max_abs_diff(&dense.state);
            let dk = (keep - dense.keep_prob).abs();
            report.max_weight_deviation = report.max_weight_deviation.max(dw);
            report.max_keep_deviation = report.max_keep_deviation.max(dk);
            if dw.max(dk) > worst_total {
                worst_total = dw.max(dk);
                report.worst = Some((state.clone(), step));
            }
        }
    }
    Ok(report)
}

/// Prints an oracle report and returns the exit code.
pub fn report_oracle(report: &OracleReport, out: &mut dyn Write) -> io::Result<i32> {
    writeln!(
        out,
        "samples={} max_dev={:.3e} max_keep_dev={:.3e} tolerance={ORACLE_TOLERANCE:e}",
        report.samples, report.max_weight_deviation, report.max_keep_deviation
    )?;
    if report.passed() {
        writeln!(out, "ok")?;
        return Ok(EXIT_OK);
    }
    if let Some((state, step)) = &report.worst {
        writeln!(out, "violation in {step} on weights {:?}", state.weights())?;
    }
    Ok(EXIT_FAILED)
}

fn cmd_oracle_check(args: &OracleArgs) -> CmdResult {
    if !(2..=ORACLE_MAX_PARTIES).contains(&args.n) {
        return Err(Failure::invalid(
            "--n",
            format!("{} is outside 2..={ORACLE_MAX_PARTIES}", args.n),
        ));
    }
    if args.samples == 0 {
        return Err(Failure::invalid("--samples", "must be positive"));
    }
    let engine = p1_engine(args.n).map_err(|e| Failure::invalid("--n", e))?;
    let report = oracle_check(args.n, args.samples, args.seed, &engine).map_err(|e| Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    })?;
    report_oracle(&report, &mut io::stdout().lock()).map_err(Failure::io)
}
