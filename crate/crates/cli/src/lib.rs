//! Command implementations behind the `mbsfn` binary. Every command is a
//! pure function of its flags and input files; output goes to the given
//! writer so tests can capture it.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use mbsfn_core::area_form::{build_plan, Method, PlanError, PlanOptions, ProfitKind};
use mbsfn_core::constraints::check_plan;
use mbsfn_core::metric::{score_plan, ScoreMode, ScoreReport};
use mbsfn_core::model::{Instance, Plan};
use mbsfn_core::oracle::{exhaustive_optimum, OracleError, OracleOptions};
use mbsfn_core::scenario_io::{
    generate_random, generate_reference, load_plan, load_scenario, save_plan, PlanFile, RandomSpec,
    ReferenceOverrides, ScenarioError, ScenarioFile,
};
use mbsfn_core::Exec;
use thiserror::Error;

pub const SCORE_HEADER: &str = "method,profit,max_areas,mode,total,baseline,improvement_abs,\
improvement_pct,num_areas,mean_area_size,uncovered_cells";
pub const ORACLE_HEADER: &str = "method,profit,max_areas,oracle,heuristic,gap";
pub const GEOMETRY_HEADER: &str = "cell_id,x,y,area_id,content_id";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Scenario(_) | CliError::Io { .. } => 2,
            CliError::Infeasible(_) => 3,
            CliError::TooLarge(_) => 4,
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Disconnected { .. } => CliError::Infeasible(e.to_string()),
            PlanError::Model(m) => CliError::Validation(m.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => CliError::TooLarge(e.to_string()),
            OracleError::Model(m) => CliError::Validation(m.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mbsfn",
    version,
    about = "Broadcast area planning for cellular networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a scenario file (the 57-cell reference layout or a small random one).
    Generate(GenerateArgs),
    /// Form areas, assign content and write the plan.
    Plan(PlanArgs),
    /// Check a plan against its scenario and print its score row.
    Evaluate(EvaluateArgs),
    /// Run every (method, profit, max areas) combination and print score rows.
    Sweep(SweepArgs),
    /// Compare the heuristics with the exhaustive optimum on a small scenario.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Merge,
    Grow,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Merge => Method::Merge,
            MethodArg::Grow => Method::Grow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfitArg {
    Demand,
    Holistic,
}

impl From<ProfitArg> for ProfitKind {
    fn from(p: ProfitArg) -> Self {
        match p {
            ProfitArg::Demand => ProfitKind::Demand,
            ProfitArg::Holistic => ProfitKind::Holistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ModeArg {
    #[default]
    Normalized,
    Literal,
}

impl From<ModeArg> for ScoreMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Normalized => ScoreMode::Normalized,
            ModeArg::Literal => ScoreMode::Literal,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generate a small random connected instance instead of the reference layout.
    #[arg(long)]
    pub random: bool,
    /// Largest cell count of a random instance.
    #[arg(long, default_value_t = 5, requires = "random")]
    pub max_cells: usize,
    /// Largest catalog size of a random instance.
    #[arg(long, default_value_t = 3, requires = "random")]
    pub max_content: usize,
    #[arg(long)]
    pub population: Option<u64>,
    /// Probability that a user wants the update item.
    #[arg(long)]
    pub update_prob: Option<f64>,
    /// Give every cell exactly the expected update share.
    #[arg(long)]
    pub deterministic_split: bool,
    #[arg(long)]
    pub streaming_demand: Option<u32>,
    #[arg(long)]
    pub update_demand: Option<u32>,
    /// Resource blocks per frame.
    #[arg(long)]
    pub total_resources: Option<u32>,
    /// Resource blocks per frame usable for broadcast.
    #[arg(long)]
    pub broadcast_cap: Option<u32>,
    #[arg(long)]
    pub max_areas: Option<u32>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = ProfitArg::Demand)]
    pub profit: ProfitArg,
    /// Area limit; the scenario's own limit when omitted.
    #[arg(long)]
    pub max_areas: Option<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Normalized)]
    pub mode: ModeArg,
    /// Plan file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-cell CSV with coordinates, area and content for map plotting.
    #[arg(long)]
    pub geometry_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Normalized)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30")]
    pub max_areas_list: Vec<u32>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "merge,grow")]
    pub methods: Vec<MethodArg>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "demand,holistic"
    )]
    pub profits: Vec<ProfitArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Normalized)]
    pub mode: ModeArg,
    /// CSV file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Evaluate grid points one after another.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Area limit; the scenario's own limit when omitted.
    #[arg(long)]
    pub max_areas: Option<u32>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn check_max_areas(n: u32) -> Result<u32, CliError> {
    if n == 0 || n > mbsfn_core::model::STANDARD_AREA_LIMIT {
        return Err(CliError::Validation(format!(
            "max areas must be between 1 and {}, got {n}",
            mbsfn_core::model::STANDARD_AREA_LIMIT
        )));
    }
    Ok(n)
}

/// Scenario file as stored plus its instance with an optional area-limit
/// override applied.
fn load(path: &Path, max_areas: Option<u32>) -> Result<(ScenarioFile, Instance), CliError> {
    let file = load_scenario(path)?;
    let mut inst = file.instance()?;
    if let Some(n) = max_areas {
        let budget = inst
            .budget
            .with_max_areas(check_max_areas(n)?)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        inst = inst.with_budget(budget);
    }
    Ok((file, inst))
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = if args.random {
        if args.max_cells == 0 || args.max_cells > 64 || args.max_content == 0 {
            return Err(CliError::Validation(
                "random instances need 1 to 64 cells and at least one item".into(),
            ));
        }
        let mut file = generate_random(
            args.seed,
            RandomSpec {
                max_cells: args.max_cells,
                max_content: args.max_content,
                max_areas: args.max_areas.map_or(3, |n| n.max(1)),
            },
        );
        if let Some(n) = args.max_areas {
            file = file.with_max_areas(check_max_areas(n)?);
        }
        file.instance()?;
        file
    } else {
        let d = ReferenceOverrides::default();
        let ov = ReferenceOverrides {
            population: args.population.unwrap_or(d.population),
            update_prob: args.update_prob.unwrap_or(d.update_prob),
            deterministic_split: args.deterministic_split,
            streaming_demand: args.streaming_demand.unwrap_or(d.streaming_demand),
            update_demand: args.update_demand.unwrap_or(d.update_demand),
            total_resources: args.total_resources.unwrap_or(d.total_resources),
            broadcast_cap: args.broadcast_cap.unwrap_or(d.broadcast_cap),
            max_areas: args.max_areas.unwrap_or(d.max_areas),
        };
        generate_reference(args.seed, &ov)?
    };
    let text = file.to_canonical_string();
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            info!(
                "wrote {} cells to {}",
                file.topology.cells.len(),
                path.display()
            );
            Ok(())
        }
        None => emit(out, &text),
    }
}

fn plan_for(
    inst: &Instance,
    method: Method,
    profit: ProfitKind,
    mode: ScoreMode,
    exec: Exec,
) -> Result<Plan, CliError> {
    let opts = PlanOptions {
        mode,
        exec,
        ..PlanOptions::new(profit)
    };
    let plan = build_plan(inst, method, &opts)?;
    let report = check_plan(&inst.topology, &plan, &inst.catalog, &inst.budget)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if !report.ok() {
        return Err(CliError::Infeasible(violation_list(&report)));
    }
    Ok(plan)
}

fn violation_list(report: &mbsfn_core::FeasibilityReport) -> String {
    let mut s = format!("plan violates {} constraint(s):", report.violations.len());
    for v in &report.violations {
        let _ = write!(s, "\n  {v}");
    }
    s
}

pub fn score_row(method: &str, profit: &str, max_areas: u32, r: &ScoreReport) -> String {
    format!(
        "{method},{profit},{max_areas},{},{:.6},{:.6},{:.6},{:.6},{},{:.6},{}",
        r.mode.as_str(),
        r.total,
        r.baseline_total,
        r.improvement_abs,
        r.improvement_pct,
        r.stats.num_areas,
        r.stats.mean_area_size,
        r.stats.uncovered_cells
    )
}

pub fn geometry_csv(file: &ScenarioFile, plan: &Plan) -> String {
    let mut s = String::from(GEOMETRY_HEADER);
    s.push('\n');
    for cell in &file.topology.cells {
        let mut any = false;
        for area in plan.areas.iter().filter(|a| a.contains(cell.id)) {
            any = true;
            let content = area.content().map(|m| m.0.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                cell.id.0, cell.x, cell.y, area.id.0, content
            );
        }
        if !any {
            let _ = writeln!(s, "{},{},{},,", cell.id.0, cell.x, cell.y);
        }
    }
    s
}

pub fn cmd_plan(args: &PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, inst) = load(&args.scenario, args.max_areas)?;
    let (method, profit, mode) = (args.method.into(), args.profit.into(), args.mode.into());
    info!(
        "planning {} cells with {}/{} and at most {} areas",
        inst.topology.num_cells(),
        Method::as_str(method),
        ProfitKind::as_str(profit),
        inst.budget.max_areas
    );
    let mut plan = plan_for(&inst, method, profit, mode, Exec::Parallel)?;
    plan.binding = file.fingerprint();
    let report = score_plan(&inst, &plan, mode).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(path) = &args.out {
        let pf = PlanFile::from_plan(
            &plan,
            method.as_str(),
            profit.as_str(),
            inst.budget.max_areas,
        );
        save_plan(&pf, path)?;
    }
    if let Some(path) = &args.geometry_out {
        write_file(path, &geometry_csv(&file, &plan))?;
    }
    emit(
        out,
        &format!(
            "method={} profit={} max_areas={} mode={} total={:.6} baseline={:.6} improvement_abs={:.6} \
             improvement_pct={:.6} num_areas={} mean_area_size={:.6} uncovered_cells={}\n",
            method.as_str(),
            profit.as_str(),
            inst.budget.max_areas,
            report.mode.as_str(),
            report.total,
            report.baseline_total,
            report.improvement_abs,
            report.improvement_pct,
            report.stats.num_areas,
            report.stats.mean_area_size,
            report.stats.uncovered_cells
        ),
    )
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, inst) = load(&args.scenario, None)?;
    let pf = load_plan(&args.plan)?;
    let fingerprint = file.fingerprint();
    if !pf.scenario.is_empty() && pf.scenario != fingerprint {
        return Err(CliError::Validation(format!(
            "plan was computed for scenario {} but {} has fingerprint {fingerprint}",
            pf.scenario,
            args.scenario.display()
        )));
    }
    let inst = inst.with_budget(
        inst.budget
            .with_max_areas(check_max_areas(pf.max_areas)?)
            .map_err(|e| CliError::Validation(e.to_string()))?,
    );
    let plan = pf.to_plan(&inst)?;
    let report = check_plan(&inst.topology, &plan, &inst.catalog, &inst.budget)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if !report.ok() {
        return Err(CliError::Infeasible(violation_list(&report)));
    }
    let score = score_plan(&inst, &plan, args.mode.into())
        .map_err(|e| CliError::Validation(e.to_string()))?;
    emit(
        out,
        &format!(
            "{SCORE_HEADER}\n{}\n",
            score_row(&pf.method, &pf.profit, pf.max_areas, &score)
        ),
    )
}

/// Score rows of the full (method, profit, max areas) grid, in grid order.
pub fn sweep_rows(
    inst: &Instance,
    methods: &[Method],
    profits: &[ProfitKind],
    max_areas: &[u32],
    mode: ScoreMode,
    exec: Exec,
) -> Result<Vec<String>, CliError> {
    let mut grid = Vec::new();
    for &m in methods {
        for &p in profits {
            for &a in max_areas {
                grid.push((m, p, check_max_areas(a)?));
            }
        }
    }
    // grid points run concurrently; each plan is built sequentially
    let rows = exec.map(&grid, |&(method, profit, a)| -> Result<String, CliError> {
        let budget = inst
            .budget
            .with_max_areas(a)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let inst = inst.with_budget(budget);
        let plan = plan_for(&inst, method, profit, mode, Exec::Sequential)?;
        let report =
            score_plan(&inst, &plan, mode).map_err(|e| CliError::Validation(e.to_string()))?;
        info!(
            "{}/{} at {a} areas: {:.3}",
            method.as_str(),
            profit.as_str(),
            report.total
        );
        Ok(score_row(method.as_str(), profit.as_str(), a, &report))
    });
    rows.into_iter().collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.max_areas_list.is_empty() || args.methods.is_empty() || args.profits.is_empty() {
        return Err(CliError::Validation("sweep lists must not be empty".into()));
    }
    let (_, inst) = load(&args.scenario, None)?;
    let methods: Vec<Method> = args.methods.iter().map(|&m| m.into()).collect();
    let profits: Vec<ProfitKind> = args.profits.iter().map(|&p| p.into()).collect();
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let rows = sweep_rows(
        &inst,
        &methods,
        &profits,
        &args.max_areas_list,
        args.mode.into(),
        exec,
    )?;
    let mut text = String::from(SCORE_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    match &args.out {
        Some(path) => write_file(path, &text),
        None => emit(out, &text),
    }
}

/// Oracle comparison rows: one per (method, profit).
pub fn oracle_rows(inst: &Instance) -> Result<Vec<String>, CliError> {
    let best = exhaustive_optimum(inst, &OracleOptions::default())?;
    info!("oracle scored {} candidate plans", best.evaluated);
    let mut rows = Vec::new();
    for method in [Method::Merge, Method::Grow] {
        for profit in [ProfitKind::Demand, ProfitKind::Holistic] {
            let plan = plan_for(inst, method, profit, ScoreMode::Normalized, Exec::Parallel)?;
            let h = score_plan(inst, &plan, ScoreMode::Normalized)
                .map_err(|e| CliError::Validation(e.to_string()))?
                .total;
            let gap = if best.score > 0.0 {
                (best.score - h) / best.score
            } else {
                0.0
            };
            rows.push(format!(
                "{},{},{},{:.6},{:.6},{:.6}",
                method.as_str(),
                profit.as_str(),
                inst.budget.max_areas,
                best.score,
                h,
                gap
            ));
        }
    }
    Ok(rows)
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (_, inst) = load(&args.scenario, args.max_areas)?;
    let rows = oracle_rows(&inst)?;
    let mut text = String::from(ORACLE_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    emit(out, &text)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Plan(a) => cmd_plan(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
    }
}
