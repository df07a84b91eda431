//! Command-line surface: analysis tables, interview scenarios, voucher
//! optimization, Monte Carlo sweeps, ingestion, and the one-shot `table2` /
//! `table3` reproductions. Everything prints plot-ready CSV (default) or
//! JSON to stdout or `--out`.
//!
//! Exit codes: 0 on success, 2 on argument or domain errors, 1 on runtime
//! failures. `FEEDERLAB_THREADS` caps the worker pool.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::ingest;
use crate::interview;
use crate::market::{Group, MarketParams};
use crate::school;
use crate::sim::{self, SimConfig};
use crate::voucher::{self, DebiasInterval, Measure, VoucherBudget};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "feederlab",
    version,
    about = "Biased admission-market analysis: displacement, school utilities, interviews, voucher interventions, and Monte Carlo robustness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate market quantities over a grid
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
    /// School utilities under the three interviewing scenarios
    Interview(InterviewArgs),
    /// Optimal voucher band for a budget, closed form or grid search
    Intervene(InterveneArgs),
    /// Seeded Monte Carlo sweeps on discrete markets
    Simulate(SimulateArgs),
    /// School CSV to bias estimate and fitted potential law
    Ingest(IngestArgs),
    /// Optimal bands under both measures for budgets 0.1 through 0.8
    Table2(TableArgs),
    /// Candidate-band comparison for the Gaussian case study
    Table3(Table3Args),
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Rank shift caused by bias, per potential and group
    Displacement(AnalyzeArgs),
    /// School utility with and without bias
    Utility(AnalyzeArgs),
    /// G2 share per school with and without bias
    Diversity(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Pareto(1, 3) potentials, beta 0.8, p 0.25
    PaperPareto,
    /// Normal(1550, 310) potentials, beta 0.8, p 0.5, budget 0.3
    PaperSat,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    Pareto,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Mm,
    Pauc,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Mm => Measure::Mm,
            MeasureArg::Pauc => Measure::Pauc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    /// Canonical parameterization to start from
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Potential law family
    #[arg(long, value_enum)]
    dist: Option<DistKind>,
    /// Pareto shape
    #[arg(long)]
    alpha: Option<f64>,
    /// Normal mean
    #[arg(long)]
    mean: Option<f64>,
    /// Normal standard deviation
    #[arg(long)]
    stddev: Option<f64>,
    /// Lower truncation bound (normal only)
    #[arg(long)]
    lower: Option<f64>,
    /// Upper truncation bound (normal only)
    #[arg(long)]
    upper: Option<f64>,
    /// Bias factor in (0, 1]
    #[arg(long)]
    beta: Option<f64>,
    /// G2 population fraction in [0, 1]
    #[arg(long)]
    p: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<MarketParams> {
        let kind = self.dist.unwrap_or(match self.preset {
            Some(Preset::PaperSat) => DistKind::Normal,
            _ => DistKind::Pareto,
        });
        let dist = match kind {
            DistKind::Pareto => Distribution::pareto(self.alpha.unwrap_or(3.0))?,
            DistKind::Normal => {
                let mean = self.mean.unwrap_or(1550.0);
                let stddev = self.stddev.unwrap_or(310.0);
                match (self.lower, self.upper) {
                    (None, None) => Distribution::normal(mean, stddev)?,
                    (lower, upper) => Distribution::truncated_normal(
                        mean,
                        stddev,
                        lower.unwrap_or(f64::NEG_INFINITY),
                        upper.unwrap_or(f64::INFINITY),
                    )?,
                }
            }
        };
        let beta = self.beta.unwrap_or(0.8);
        let p = self.p.unwrap_or(match self.preset {
            Some(Preset::PaperSat) => 0.5,
            _ => 0.25,
        });
        MarketParams::new(dist, beta, p)
    }

    fn default_c_hat(&self) -> f64 {
        match self.preset {
            Some(Preset::PaperSat) => 0.3,
            _ => 0.1,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of grid points
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InterviewArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Interview capacity as a school-rank window
    #[arg(long, default_value_t = 0.05)]
    iv: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InterveneArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Voucher budget as potential-law mass
    #[arg(long)]
    c_hat: Option<f64>,
    /// Unfairness measure to minimize
    #[arg(long, value_enum, default_value = "mm")]
    measure: MeasureArg,
    /// Use the sliding-window grid search instead of the closed form
    #[arg(long)]
    numeric: bool,
    /// Window grid resolution for --numeric
    #[arg(long, default_value_t = 2000)]
    grid_size: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// School counts to sweep (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "100")]
    n_schools: Vec<usize>,
    /// Seats per school
    #[arg(long, default_value_t = 100)]
    capacity: usize,
    /// Bias spreads to sweep (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "0")]
    epsilon: Vec<f64>,
    /// Voucher take-up probabilities to sweep (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "1")]
    take_up: Vec<f64>,
    /// Replications per sweep point
    #[arg(long, default_value_t = 100)]
    replications: usize,
    /// Base seed; replicate r uses base_seed + r
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Voucher budget; 0 runs the baseline only
    #[arg(long)]
    c_hat: Option<f64>,
    /// Measure targeted by the theoretical and empirical bands
    #[arg(long, value_enum, default_value = "pauc")]
    measure: MeasureArg,
    /// Explicit band "z1,z2" overriding the theoretical optimum
    #[arg(long, value_parser = parse_interval)]
    interval: Option<(f64, f64)>,
    /// Also search for the empirically best band
    #[arg(long)]
    empirical: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct IngestArgs {
    /// School CSV with header school_id,avg_sat,num_takers,eni
    #[arg(long)]
    input: PathBuf,
    /// Per-student score standard deviation
    #[arg(long, default_value_t = 310.0)]
    sd: f64,
    /// Simulation seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the simulated cohort CSV here
    #[arg(long)]
    cohort_out: Option<PathBuf>,
    /// Estimate beta from group medians instead of means
    #[arg(long)]
    quantile_beta: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct Table3Args {
    #[command(flatten)]
    model: ModelArgs,
    /// Voucher budget
    #[arg(long)]
    c_hat: Option<f64>,
    /// Window grid resolution for the optimum search
    #[arg(long, default_value_t = 400)]
    grid_size: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_interval(raw: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"z1,z2\"".into());
    }
    let z1: f64 = parts[0].trim().parse().map_err(|e| format!("z1: {e}"))?;
    let z2: f64 = parts[1].trim().parse().map_err(|e| format!("z2: {e}"))?;
    if z1 > z2 {
        return Err(format!("requires z1 <= z2 (got {z1}, {z2})"));
    }
    Ok((z1, z2))
}

/// Entry point behind the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(code) = init_thread_pool() {
        return code;
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_thread_pool() -> std::result::Result<(), i32> {
    if let Ok(raw) = std::env::var("FEEDERLAB_THREADS") {
        let threads: usize = match raw.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("error: invalid FEEDERLAB_THREADS: must be a positive integer (got {raw})");
                return Err(2);
            }
        };
        // Ignore "already initialized": tests may call run() repeatedly.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { what } => match what {
            AnalyzeCmd::Displacement(args) => analyze_displacement(args),
            AnalyzeCmd::Utility(args) => analyze_utility(args),
            AnalyzeCmd::Diversity(args) => analyze_diversity(args),
        },
        Command::Interview(args) => run_interview(args),
        Command::Intervene(args) => run_intervene(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Ingest(args) => run_ingest(args),
        Command::Table2(args) => run_table2(args),
        Command::Table3(args) => run_table3(args),
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 2 {
        return Err(Error::invalid("grid", format!("must be at least 2 (got {grid})")));
    }
    Ok(())
}

/// School-rank grid used by the tabulations; starts at 0.001 because the
/// Pareto utility diverges as s approaches 0.
fn rank_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.001 + (0.999 - 0.001) * i as f64 / (n - 1) as f64)
        .collect()
}

fn emit<T: Serialize>(output: &OutputArgs, rows: &[T]) -> Result<()> {
    let text = match output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            String::from_utf8(w.into_inner().expect("vec writer cannot fail"))
                .expect("csv output is utf-8")
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(rows).expect("serializable rows");
            text.push('\n');
            text
        }
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Single-object emission (JSON object rather than a one-element array).
fn emit_one<T: Serialize>(output: &OutputArgs, row: &T) -> Result<()> {
    match output.format {
        Format::Csv => emit(output, std::slice::from_ref(row)),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(row).expect("serializable row");
            text.push('\n');
            match &output.out {
                Some(path) => std::fs::write(path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DisplacementRow {
    z: f64,
    group: Group,
    displacement: f64,
}

fn analyze_displacement(args: AnalyzeArgs) -> Result<()> {
    check_grid(args.grid)?;
    let params = args.model.resolve()?;
    let zs = params.dist().quantile_grid(args.grid, 0.001, 0.999);
    let mut rows = Vec::with_capacity(zs.len() * 2);
    for &z in &zs {
        for group in [Group::G1, Group::G2] {
            rows.push(DisplacementRow {
                z,
                group,
                displacement: params.displacement(z, group),
            });
        }
    }
    emit(&args.output, &rows)
}

#[derive(Serialize)]
struct UtilityRow {
    s: f64,
    utility_unbiased: f64,
    utility_biased: f64,
}

fn analyze_utility(args: AnalyzeArgs) -> Result<()> {
    check_grid(args.grid)?;
    let params = args.model.resolve()?;
    let rows: Vec<UtilityRow> = rank_grid(args.grid)
        .into_iter()
        .map(|s| {
            Ok(UtilityRow {
                s,
                utility_unbiased: school::utility_unbiased(&params, s)?,
                utility_biased: school::utility_biased(&params, s)?,
            })
        })
        .collect::<Result<_>>()?;
    emit(&args.output, &rows)
}

#[derive(Serialize)]
struct DiversityRow {
    s: f64,
    share_unbiased: f64,
    share_biased: f64,
}

fn analyze_diversity(args: AnalyzeArgs) -> Result<()> {
    check_grid(args.grid)?;
    let params = args.model.resolve()?;
    let rows: Vec<DiversityRow> = rank_grid(args.grid)
        .into_iter()
        .map(|s| {
            Ok(DiversityRow {
                s,
                share_unbiased: school::diversity(&params, s, false)?,
                share_biased: school::diversity(&params, s, true)?,
            })
        })
        .collect::<Result<_>>()?;
    emit(&args.output, &rows)
}

#[derive(Serialize)]
struct InterviewRow {
    s: f64,
    utility_unbiased: f64,
    utility_biased: f64,
    all_interview: f64,
    solo_interview: f64,
    solo_abstain: f64,
}

fn run_interview(args: InterviewArgs) -> Result<()> {
    check_grid(args.grid)?;
    let params = args.model.resolve()?;
    let rows: Vec<InterviewRow> = rank_grid(args.grid)
        .into_iter()
        .map(|s| {
            Ok(InterviewRow {
                s,
                utility_unbiased: school::utility_unbiased(&params, s)?,
                utility_biased: school::utility_biased(&params, s)?,
                all_interview: interview::utility_all_interview(&params, s, args.iv)?,
                solo_interview: interview::utility_solo_interview(&params, s)?,
                solo_abstain: interview::utility_solo_abstain(&params, s, args.iv)?,
            })
        })
        .collect::<Result<_>>()?;
    emit(&args.output, &rows)
}

#[derive(Serialize)]
struct InterveneReport {
    measure: Measure,
    c_hat: f64,
    method: &'static str,
    z1: Option<f64>,
    z2: Option<f64>,
    value_before: f64,
    value_after: f64,
    assumption_satisfied: bool,
}

fn run_intervene(args: InterveneArgs) -> Result<()> {
    let params = args.model.resolve()?;
    let c_hat = args.c_hat.unwrap_or_else(|| args.model.default_c_hat());
    let budget = VoucherBudget::new(c_hat)?;
    let measure: Measure = args.measure.into();
    let optimal = if args.numeric {
        voucher::optimal_interval_numeric(&params, budget, measure, args.grid_size)?
    } else {
        match measure {
            Measure::Mm => voucher::optimal_interval_mm(&params, budget)?,
            Measure::Pauc => voucher::optimal_interval_pauc(&params, budget)?,
        }
    };
    if !optimal.assumption_satisfied {
        eprintln!(
            "warning: optimality precondition does not hold for p={}, beta={}; interval reported anyway",
            params.p(),
            params.beta()
        );
    }
    let value_before = match measure {
        Measure::Mm => voucher::mistreatment_max(&params, &DebiasInterval::empty()),
        Measure::Pauc => voucher::pauc(&params, &DebiasInterval::empty()),
    };
    let (z1, z2) = match optimal.interval.bounds() {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    let report = InterveneReport {
        measure,
        c_hat,
        method: if args.numeric { "grid" } else { "closed_form" },
        z1,
        z2,
        value_before,
        value_after: optimal.value_after,
        assumption_satisfied: optimal.assumption_satisfied,
    };
    emit_one(&args.output, &report)
}

#[derive(Serialize)]
struct SimulateRecord {
    n_schools: usize,
    capacity: usize,
    n_students: usize,
    epsilon: f64,
    take_up: f64,
    replications: usize,
    base_seed: u64,
    c_hat: f64,
    measure: Measure,
    interval_source: &'static str,
    z1: Option<f64>,
    z2: Option<f64>,
    pauc_mean: f64,
    pauc_sem: f64,
    mm_mean: f64,
    mm_sem: f64,
    baseline_pauc_mean: f64,
    baseline_pauc_sem: f64,
    baseline_mm_mean: f64,
    baseline_mm_sem: f64,
    empirical_z1: Option<f64>,
    empirical_z2: Option<f64>,
    empirical_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_replicate: Option<Vec<sim::ReplicateMetrics>>,
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let params = args.model.resolve()?;
    let c_hat = args.c_hat.unwrap_or_else(|| args.model.default_c_hat());
    let budget = VoucherBudget::new(c_hat)?;
    let measure: Measure = args.measure.into();
    let (interval, source): (DebiasInterval, &'static str) = match args.interval {
        Some((z1, z2)) => (DebiasInterval::new(z1, z2)?, "provided"),
        None if c_hat == 0.0 => (DebiasInterval::empty(), "none"),
        None => {
            let optimal = if params.dist().is_pareto() {
                match measure {
                    Measure::Mm => voucher::optimal_interval_mm(&params, budget)?,
                    Measure::Pauc => voucher::optimal_interval_pauc(&params, budget)?,
                }
            } else {
                voucher::optimal_interval_numeric(&params, budget, measure, 400)?
            };
            (optimal.interval, "theoretical")
        }
    };
    let mut records = Vec::new();
    for &n_schools in &args.n_schools {
        for &epsilon in &args.epsilon {
            for &take_up in &args.take_up {
                let config = SimConfig::new(
                    n_schools * args.capacity,
                    n_schools,
                    args.capacity,
                    params.clone(),
                    epsilon,
                    take_up,
                    args.replications,
                    args.seed,
                )?;
                let result = sim::run_experiment(&config, &interval);
                let (empirical_interval, empirical_value) = if args.empirical {
                    let (found, value) = sim::empirical_best_interval(&config, c_hat, measure)?;
                    (found.bounds(), Some(value))
                } else {
                    (None, None)
                };
                let (z1, z2) = match interval.bounds() {
                    Some((a, b)) => (Some(a), Some(b)),
                    None => (None, None),
                };
                records.push(SimulateRecord {
                    n_schools,
                    capacity: args.capacity,
                    n_students: config.n_students,
                    epsilon,
                    take_up,
                    replications: args.replications,
                    base_seed: args.seed,
                    c_hat,
                    measure,
                    interval_source: source,
                    z1,
                    z2,
                    pauc_mean: result.pauc_mean,
                    pauc_sem: result.pauc_sem,
                    mm_mean: result.mm_mean,
                    mm_sem: result.mm_sem,
                    baseline_pauc_mean: result.baseline_pauc_mean,
                    baseline_pauc_sem: result.baseline_pauc_sem,
                    baseline_mm_mean: result.baseline_mm_mean,
                    baseline_mm_sem: result.baseline_mm_sem,
                    empirical_z1: empirical_interval.map(|b| b.0),
                    empirical_z2: empirical_interval.map(|b| b.1),
                    empirical_value,
                    per_replicate: match args.output.format {
                        Format::Json => Some(result.per_replicate),
                        Format::Csv => None,
                    },
                });
            }
        }
    }
    emit(&args.output, &records)
}

#[derive(Serialize)]
struct IngestSummary {
    n_schools: usize,
    n_students: usize,
    p: f64,
    beta_hat: f64,
    potential_mean: f64,
    potential_stddev: f64,
}

fn run_ingest(args: IngestArgs) -> Result<()> {
    let records = ingest::load_schools(&args.input)?;
    let (_, p) = ingest::split_by_eni(&records);
    let cohort = ingest::simulate_students(&records, args.sd, args.seed)?;
    let g1 = cohort.group_scores(Group::G1);
    let g2 = cohort.group_scores(Group::G2);
    let beta_hat = if args.quantile_beta {
        ingest::estimate_beta_quantile(&g1, &g2)?
    } else {
        ingest::estimate_beta(&g1, &g2)?
    };
    let fitted = ingest::fit_potential_dist(&cohort, beta_hat)?;
    let Distribution::Normal { mean, stddev } = fitted else {
        unreachable!("fit_potential_dist returns a normal law")
    };
    if let Some(path) = &args.cohort_out {
        let file = std::fs::File::create(path)?;
        ingest::write_cohort(&cohort, file)?;
    }
    let summary = IngestSummary {
        n_schools: records.len(),
        n_students: cohort.len(),
        p,
        beta_hat,
        potential_mean: mean,
        potential_stddev: stddev,
    };
    emit_one(&args.output, &summary)
}

#[derive(Serialize)]
struct Table2Row {
    c_hat: f64,
    mm_z1: f64,
    mm_z2: f64,
    mm_after: f64,
    pauc_z1: f64,
    pauc_z2: f64,
    pauc_after: f64,
}

fn run_table2(args: TableArgs) -> Result<()> {
    let params = args.model.resolve()?;
    let mut rows = Vec::new();
    for i in 1..=8 {
        let c_hat = i as f64 / 10.0;
        let budget = VoucherBudget::new(c_hat)?;
        let mm = voucher::optimal_interval_mm(&params, budget)?;
        let pauc = voucher::optimal_interval_pauc(&params, budget)?;
        let (mm_z1, mm_z2) = mm.interval.bounds().expect("positive budget");
        let (pauc_z1, pauc_z2) = pauc.interval.bounds().expect("positive budget");
        rows.push(Table2Row {
            c_hat,
            mm_z1,
            mm_z2,
            mm_after: mm.value_after,
            pauc_z1,
            pauc_z2,
            pauc_after: pauc.value_after,
        });
    }
    emit(&args.output, &rows)
}

#[derive(Serialize)]
struct Table3Row {
    label: String,
    z1: Option<f64>,
    z2: Option<f64>,
    pauc: f64,
    mm: f64,
}

impl Table3Row {
    fn build(params: &MarketParams, label: String, interval: &DebiasInterval) -> Table3Row {
        let report = voucher::assess(params, interval);
        let (z1, z2) = match interval.bounds() {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        Table3Row { label, z1, z2, pauc: report.pauc, mm: report.mm }
    }
}

fn run_table3(args: Table3Args) -> Result<()> {
    let model = ModelArgs {
        preset: args.model.preset.or(Some(Preset::PaperSat)),
        ..args.model
    };
    let params = model.resolve()?;
    let c_hat = args.c_hat.unwrap_or_else(|| model.default_c_hat());
    let budget = VoucherBudget::new(c_hat)?;
    let dist = params.dist();
    let mut rows = Vec::new();
    rows.push(Table3Row::build(&params, "none".into(), &DebiasInterval::empty()));
    let bottom = DebiasInterval::new(f64::NEG_INFINITY, dist.inv_ccdf(1.0 - c_hat)?)?;
    rows.push(Table3Row::build(&params, "bottom".into(), &bottom));
    // A handful of interior windows marching up the distribution.
    for (i, u) in [0.95, 0.8, 0.65, 0.5, 0.35].into_iter().enumerate() {
        if u <= c_hat {
            continue;
        }
        let window = DebiasInterval::new(dist.inv_ccdf(u)?, dist.inv_ccdf(u - c_hat)?)?;
        rows.push(Table3Row::build(&params, format!("window{}", i + 1), &window));
    }
    let optimal =
        voucher::optimal_interval_numeric(&params, budget, Measure::Pauc, args.grid_size)?;
    rows.push(Table3Row::build(&params, "optimal".into(), &optimal.interval));
    let top = DebiasInterval::new(dist.inv_ccdf(c_hat)?, f64::INFINITY)?;
    rows.push(Table3Row::build(&params, "top".into(), &top));
    emit(&args.output, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn interval_parser_accepts_pairs_only() {
        assert_eq!(parse_interval("1.2,1.5"), Ok((1.2, 1.5)));
        assert_eq!(parse_interval(" 1.2 , 1.5 "), Ok((1.2, 1.5)));
        assert!(parse_interval("1.2").is_err());
        assert!(parse_interval("2,1").is_err());
        assert!(parse_interval("a,b").is_err());
    }

    #[test]
    fn presets_resolve_to_the_canonical_parameterizations() {
        let pareto = ModelArgs {
            preset: Some(Preset::PaperPareto),
            dist: None,
            alpha: None,
            mean: None,
            stddev: None,
            lower: None,
            upper: None,
            beta: None,
            p: None,
        };
        let m = pareto.resolve().unwrap();
        assert_eq!((m.p(), m.beta()), (0.25, 0.8));
        assert!(m.dist().is_pareto());

        let sat = ModelArgs { preset: Some(Preset::PaperSat), ..pareto };
        let m = sat.resolve().unwrap();
        assert_eq!((m.p(), m.beta()), (0.5, 0.8));
        assert!(matches!(m.dist(), Distribution::Normal { mean, stddev }
            if *mean == 1550.0 && *stddev == 310.0));
        assert_eq!(sat.default_c_hat(), 0.3);
    }
}
