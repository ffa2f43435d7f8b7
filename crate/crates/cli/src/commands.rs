//! Experiment orchestration: one function per command, each producing CSV tables.

use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use thermoflow_core::deviations::{
    empirical_z_exact, empirical_z_mc, fit_d, ld_bound, ld_constants, threshold, DFit, LdBoundConstants, DEFAULT_BUDGET,
    DEFAULT_D,
};
use thermoflow_core::escape::{
    flow_escape_rate, gamma, nested_check, escape_report, FlowEscapeEstimate, FlowEscapeParams, HoleSequence,
    NestedReport, OpenSystem,
};
use thermoflow_core::stats::{block_rng, derive_seed};
use thermoflow_core::suspension::{flow_birkhoff, flow_step};
use thermoflow_core::{Error, FlowObservable, FlowPoint, GibbsMarkovMeasure, LocallyConstantFunction, RoofFunction, SftSpec};

use crate::config::{
    build_function, build_holes, build_observable, build_roof, build_spec, check_deviations, level_mode, DSetting,
    DeviationsBlock, EscapeBlock, ExperimentConfig,
};
use crate::output::{flag, num, opt, Manifest, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Pressure,
    Equilibrium,
    Simulate,
    LdBound,
    LdEmpirical,
    EscapeDiscrete,
    EscapeFlow,
    NestedCheck,
    Theorem1,
    Theorem2,
    /// Check the config and print diagnostics without running anything.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pressure => "pressure",
            Command::Equilibrium => "equilibrium",
            Command::Simulate => "simulate",
            Command::LdBound => "ld-bound",
            Command::LdEmpirical => "ld-empirical",
            Command::EscapeDiscrete => "escape-discrete",
            Command::EscapeFlow => "escape-flow",
            Command::NestedCheck => "nested-check",
            Command::Theorem1 => "theorem1",
            Command::Theorem2 => "theorem2",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

fn config_error(diags: Vec<String>) -> RunError {
    RunError::Config(diags.join("; "))
}

/// Tables and messages produced by one command.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    command: Command,
    spec: SftSpec,
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig, command: Command) -> Result<Self, RunError> {
        let sft = config.sft.as_ref().ok_or_else(|| missing("sft", command))?;
        let spec = build_spec(sft).map_err(RunError::Config)?;
        Ok(Context { config, command, spec })
    }

    fn potential(&self) -> Result<LocallyConstantFunction, RunError> {
        let block = self.config.potential.as_ref().ok_or_else(|| missing("potential", self.command))?;
        build_function(&self.spec, block, "potential").map_err(config_error)
    }

    fn measure(&self) -> Result<GibbsMarkovMeasure, RunError> {
        Ok(GibbsMarkovMeasure::new(&self.potential()?)?)
    }

    fn roof(&self) -> Result<RoofFunction, RunError> {
        let block = self.config.roof.as_ref().ok_or_else(|| missing("roof", self.command))?;
        build_roof(&self.spec, block).map_err(config_error)
    }

    fn observable(&self, roof: &RoofFunction) -> Result<FlowObservable, RunError> {
        let block = self.config.observable.as_ref().ok_or_else(|| missing("observable", self.command))?;
        build_observable(&self.spec, roof, block).map_err(config_error)
    }

    fn deviations(&self) -> Result<&'a DeviationsBlock, RunError> {
        let block = self.config.deviations.as_ref().ok_or_else(|| missing("deviations", self.command))?;
        let diags = check_deviations(block);
        if diags.is_empty() {
            Ok(block)
        } else {
            Err(config_error(diags))
        }
    }

    fn escape(&self) -> Result<(&'a EscapeBlock, HoleSequence), RunError> {
        let block = self.config.escape.as_ref().ok_or_else(|| missing("escape", self.command))?;
        let holes = build_holes(&self.spec, block).map_err(config_error)?;
        Ok((block, holes))
    }

    fn flow_params(&self, block: &EscapeBlock) -> Result<FlowEscapeParams, RunError> {
        if block.mc_samples == 0 {
            return Err(RunError::Config(format!("escape.mc_samples must be positive for {}", self.command.name())));
        }
        let seed = block.seed.ok_or_else(|| RunError::Config("escape.seed is required".into()))?;
        Ok(FlowEscapeParams { t_grid: block.t_grid.clone(), n_samples: block.mc_samples, seed })
    }
}

fn missing(block: &str, command: Command) -> RunError {
    RunError::Config(format!("missing {block} block required by {}", command.name()))
}

/// Runs `command` on an already parsed config. Performs no file I/O.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let ctx = Context::new(config, command)?;
    match command {
        Command::Pressure => pressure(&ctx),
        Command::Equilibrium => equilibrium(&ctx),
        Command::Simulate => simulate(&ctx),
        Command::LdBound => large_deviations(&ctx, false, true),
        Command::LdEmpirical => large_deviations(&ctx, true, false),
        Command::Theorem1 => large_deviations(&ctx, true, true),
        Command::EscapeDiscrete => escape_discrete(&ctx),
        Command::EscapeFlow => escape_flow(&ctx),
        Command::NestedCheck => nested(&ctx),
        Command::Theorem2 => full_escape(&ctx),
        Command::Validate => Ok(Outcome::default()),
    }
}

fn pressure(ctx: &Context) -> Result<Outcome, RunError> {
    let mu = ctx.measure()?;
    let mut t = Table::new(&["pressure", "lambda", "entropy", "aperiodicity_power", "potential_depth"]);
    t.push(vec![
        num(mu.pressure()),
        num(mu.lambda()),
        num(mu.entropy()),
        ctx.spec.aperiodicity_power().to_string(),
        ctx.potential()?.depth().to_string(),
    ]);
    Ok(Outcome { tables: vec![("pressure.csv".into(), t)], ..Outcome::default() })
}

fn equilibrium(ctx: &Context) -> Result<Outcome, RunError> {
    let mu = ctx.measure()?;
    let mut t = Table::new(&["state", "measure", "right_eigenvector", "left_eigenvector"]);
    for (i, w) in mu.states().iter().enumerate() {
        t.push(vec![
            ctx.spec.format_word(w),
            num(mu.stationary()[i]),
            num(mu.right_eigenvector()[i]),
            num(mu.left_eigenvector()[i]),
        ]);
    }
    Ok(Outcome { tables: vec![("equilibrium.csv".into(), t)], ..Outcome::default() })
}

fn simulate(ctx: &Context) -> Result<Outcome, RunError> {
    let block = ctx.config.simulate.as_ref().ok_or_else(|| missing("simulate", ctx.command))?;
    if block.orbits == 0 || block.length == 0 {
        return Err(RunError::Config("simulate.orbits and simulate.length must be positive".into()));
    }
    let mu = ctx.measure()?;
    let flow = match block.flow_time {
        Some(t) => {
            let roof = ctx.roof()?;
            let obs = match ctx.config.observable {
                Some(_) => Some(ctx.observable(&roof)?),
                None => None,
            };
            Some((t, roof, obs))
        }
        None => None,
    };
    let mut rng = block_rng(block.seed, 0);
    let mut t = Table::new(&["orbit", "word", "laps", "level", "flow_integral"]);
    for i in 0..block.orbits {
        let w = mu.sample_orbit(block.length, &mut rng)?;
        let mut row = vec![i.to_string(), ctx.spec.format_word(&w), String::new(), String::new(), String::new()];
        if let Some((time, roof, obs)) = &flow {
            let p = FlowPoint::on_base(w);
            let step = flow_step(roof, &p, *time)?;
            row[2] = step.laps.to_string();
            row[3] = num(step.residual);
            if let Some(obs) = obs {
                row[4] = num(flow_birkhoff(obs, roof, &p, *time)?);
            }
        }
        t.push(row);
    }
    Ok(Outcome { tables: vec![("orbits.csv".into(), t)], seed: Some(block.seed), ..Outcome::default() })
}

const LD_HEADER: [&str; 11] =
    ["t", "Z_exact", "Z_mc", "mc_stderr", "bound_thm1", "bound_prop32", "X", "Y", "T0", "D", "epsilon"];

fn resolve_d(
    block: &DeviationsBlock,
    mu: Option<&GibbsMarkovMeasure>,
    roof: &RoofFunction,
    obs: &FlowObservable,
    budget: u128,
    out: &mut Outcome,
) -> Result<f64, RunError> {
    match &block.d {
        DSetting::Value(d) => Ok(*d),
        DSetting::Keyword(_) => {
            let mu = mu.expect("measure is built when D is fitted");
            let probes: Vec<LocallyConstantFunction> =
                [obs.tilde().clone(), roof.base().clone()].into_iter().filter(|g| g.seminorm() > 0.0).collect();
            if probes.is_empty() {
                out.warnings.push(format!("no nonconstant probe for fitting D; using D = {DEFAULT_D}"));
                return Ok(DEFAULT_D);
            }
            let grid = block.fit.clone().unwrap_or_default();
            let fit = fit_d(mu, &probes, &grid.m_grid, &grid.epsilon_grid, budget)?;
            if fit.fallback {
                out.warnings.push(format!("every probability on the fit grid vanished; using D = {DEFAULT_D}"));
            }
            out.tables.push(("d_fit.csv".into(), d_fit_table(&fit)));
            Ok(fit.d)
        }
    }
}

fn d_fit_table(fit: &DFit) -> Table {
    let mut t = Table::new(&["probe", "m", "epsilon", "probability", "implied_D", "D"]);
    for p in &fit.points {
        t.push(vec![p.probe.to_string(), p.m.to_string(), num(p.epsilon), num(p.probability), opt(p.implied_d), num(fit.d)]);
    }
    t
}

fn large_deviations(ctx: &Context, empirical: bool, bound: bool) -> Result<Outcome, RunError> {
    let block = ctx.deviations()?;
    let roof = ctx.roof()?;
    let obs = ctx.observable(&roof)?;
    let mode = level_mode(&block.level_mode).map_err(RunError::Config)?;
    let budget = block.budget.map_or(DEFAULT_BUDGET, u128::from);
    let needs_measure = empirical || matches!(block.d, DSetting::Keyword(_));
    let mu = if needs_measure { Some(ctx.measure()?) } else { None };
    let mut out = Outcome { seed: block.seed.filter(|_| empirical && block.mc_samples > 0), ..Outcome::default() };

    let d = resolve_d(block, mu.as_ref(), &roof, &obs, budget, &mut out)?;
    let constants: Option<LdBoundConstants> = if bound {
        match ld_constants(&roof, &obs, block.epsilon, d) {
            Ok(c) => {
                if !c.collapses() {
                    out.warnings.push(
                        "‖f‖‖F‖ < 1: the single-exponential bound need not dominate the two-term bound".into(),
                    );
                }
                Some(c)
            }
            Err(e @ Error::DegenerateSeminorm(_)) if empirical => {
                out.warnings.push(format!("{e}; bound columns left empty"));
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let t0 = threshold(block.epsilon, roof.sup_norm(), obs.sup_norm());

    let mut table = Table::new(&LD_HEADER);
    let mut budget_warned = false;
    for (i, &t) in block.t_grid.iter().enumerate() {
        let mut row = vec![String::new(); LD_HEADER.len()];
        row[0] = num(t);
        if let Some(mu) = mu.as_ref().filter(|_| empirical) {
            match empirical_z_exact(mu, &roof, &obs, block.epsilon, t, mode, budget) {
                Ok(z) => row[1] = num(z.at_least),
                Err(Error::BudgetExceeded { count, budget }) => {
                    if !budget_warned {
                        out.warnings.push(format!(
                            "exact enumeration skipped from t = {t}: {count} words exceed the budget of {budget}"
                        ));
                        budget_warned = true;
                    }
                }
                Err(e) => return Err(e.into()),
            }
            if block.mc_samples > 0 {
                let seed = derive_seed(block.seed.unwrap_or_default(), i as u64);
                let mc = empirical_z_mc(mu, &roof, &obs, block.epsilon, t, block.mc_samples, seed, mode)?;
                row[2] = num(mc.estimate);
                row[3] = num(mc.std_error);
            }
        }
        if let Some(c) = &constants {
            if t >= c.t0 {
                let b = ld_bound(c, t)?;
                row[4] = num(b.single);
                row[5] = num(b.two_term);
            }
            row[6] = num(c.x);
            row[7] = num(c.y);
        }
        row[8] = num(t0);
        row[9] = num(d);
        row[10] = num(block.epsilon);
        table.push(row);
    }
    let name = match ctx.command {
        Command::LdBound => "ld_bound.csv",
        Command::LdEmpirical => "ld_empirical.csv",
        _ => "theorem1.csv",
    };
    out.tables.insert(0, (name.into(), table));
    Ok(out)
}

const ESCAPE_HEADER: [&str; 17] = [
    "n",
    "mu_In",
    "R_discrete",
    "ratio_discrete",
    "gamma",
    "R_flow",
    "band_lo",
    "band_hi",
    "nu_slab",
    "ratio_flow",
    "W",
    "lower_bound",
    "nested_1",
    "nested_2",
    "nested_3",
    "nested_4",
    "nested_5",
];

const DIAGNOSTICS_HEADER: [&str; 8] =
    ["n", "exact_flow_rate", "rate_upper_third", "band", "samples", "min_tail_survivors", "too_few_survivors", "violations"];

fn nested_cells(report: &NestedReport, i: usize) -> [String; 5] {
    let row = &report.rows[i];
    [
        flag(Some(report.cylinders)),
        flag(Some(row.contains_z && row.inside_previous != Some(false))),
        flag(Some(report.exponential)),
        flag(Some(row.l as f64 / row.n as f64 > report.kappa_min)),
        flag(row.pullback),
    ]
}

fn escape_row(n: usize, mu_hole: f64, r: f64, gamma: f64, nested: [String; 5]) -> Vec<String> {
    let mut row = vec![String::new(); ESCAPE_HEADER.len()];
    row[0] = n.to_string();
    row[1] = num(mu_hole);
    row[2] = num(r);
    row[3] = num(r / mu_hole);
    row[4] = num(gamma);
    for (k, cell) in nested.into_iter().enumerate() {
        row[12 + k] = cell;
    }
    row
}

fn fill_flow(row: &mut [String], flow: &FlowEscapeEstimate, mu_hole: f64, roof_mean: f64, roof_sup: f64, gamma: f64) {
    let w = 1.0 + roof_sup / roof_mean;
    row[5] = num(flow.rate);
    row[6] = num(flow.rate - flow.band);
    row[7] = num(flow.rate + flow.band);
    row[8] = num(mu_hole / roof_mean);
    row[9] = num(flow.rate * roof_mean / mu_hole);
    row[10] = num(w);
    row[11] = num(gamma / w);
}

fn diagnostics_row(n: usize, flow: &FlowEscapeEstimate) -> Vec<String> {
    let half = flow.t_grid.len() / 2;
    vec![
        n.to_string(),
        num(flow.exact_rate),
        num(flow.rate_upper_third),
        num(flow.band),
        flow.samples.to_string(),
        flow.survivors[half..].iter().min().copied().unwrap_or(0).to_string(),
        flow.too_few_survivors.to_string(),
        flow.violations.to_string(),
    ]
}

fn flow_warnings(roof: &RoofFunction, flows: &[(usize, &FlowEscapeEstimate)], out: &mut Outcome) {
    if roof.min_value() <= 1.0 {
        out.warnings.push("roof attains 1; the escape-rate bound is stated for roofs strictly above 1".into());
    }
    for (n, f) in flows {
        if f.too_few_survivors {
            out.warnings.push(format!("n = {n}: fewer than 100 tail survivors, band unreliable"));
        }
        if f.violations > 0 {
            out.warnings.push(format!("n = {n}: {} samples escaped faster than the roof bound allows", f.violations));
        }
    }
}

fn escape_discrete(ctx: &Context) -> Result<Outcome, RunError> {
    let (_, holes) = ctx.escape()?;
    let mu = ctx.measure()?;
    let report = nested_check(&holes, &mu, ctx.config.escape.as_ref().map_or(0.0, |e| e.kappa_min));
    let g = gamma(&mu, holes.z(), holes.period())?;
    let mut t = Table::new(&ESCAPE_HEADER);
    for (i, hole) in holes.holes().iter().enumerate() {
        let r = OpenSystem::new(&mu, hole, 1)?.escape_rate()?;
        t.push(escape_row(hole.word_len(), hole.measure(&mu), r, g, nested_cells(&report, i)));
    }
    Ok(Outcome { tables: vec![("escape.csv".into(), t)], ..Outcome::default() })
}

fn escape_flow(ctx: &Context) -> Result<Outcome, RunError> {
    let (block, holes) = ctx.escape()?;
    let params = ctx.flow_params(block)?;
    let roof = ctx.roof()?;
    let mu = ctx.measure()?;
    let report = nested_check(&holes, &mu, block.kappa_min);
    let g = gamma(&mu, holes.z(), holes.period())?;
    let (roof_mean, roof_sup) = (roof.mean_under(&mu), roof.sup_norm());
    let mut t = Table::new(&ESCAPE_HEADER);
    let mut diag = Table::new(&DIAGNOSTICS_HEADER);
    let mut flows = Vec::new();
    for (i, hole) in holes.holes().iter().enumerate() {
        let n = hole.word_len();
        let p = FlowEscapeParams { seed: derive_seed(params.seed, n as u64), ..params.clone() };
        let flow = flow_escape_rate(&mu, &roof, hole, &p)?;
        let mu_hole = hole.measure(&mu);
        let mut row = vec![String::new(); ESCAPE_HEADER.len()];
        row[0] = n.to_string();
        row[1] = num(mu_hole);
        row[4] = num(g);
        fill_flow(&mut row, &flow, mu_hole, roof_mean, roof_sup, g);
        for (k, cell) in nested_cells(&report, i).into_iter().enumerate() {
            row[12 + k] = cell;
        }
        t.push(row);
        diag.push(diagnostics_row(n, &flow));
        flows.push((n, flow));
    }
    let mut out = Outcome { seed: Some(params.seed), ..Outcome::default() };
    flow_warnings(&roof, &flows.iter().map(|(n, f)| (*n, f)).collect::<Vec<_>>(), &mut out);
    out.tables = vec![("escape.csv".into(), t), ("escape_diagnostics.csv".into(), diag)];
    Ok(out)
}

fn nested(ctx: &Context) -> Result<Outcome, RunError> {
    let (block, holes) = ctx.escape()?;
    let mu = ctx.measure()?;
    let r = nested_check(&holes, &mu, block.kappa_min);
    let mut rows = Table::new(&["n", "size", "mu_In", "l_n", "contains_z", "inside_previous", "pullback"]);
    for row in &r.rows {
        rows.push(vec![
            row.n.to_string(),
            row.size.to_string(),
            num(row.measure),
            row.l.to_string(),
            flag(Some(row.contains_z)),
            flag(row.inside_previous),
            flag(row.pullback),
        ]);
    }
    let mut summary = Table::new(&["condition", "verdict", "detail"]);
    let details = [
        String::new(),
        String::new(),
        format!("c={};rho={}", num(r.c), num(r.rho)),
        format!("kappa={};kappa_min={}", num(r.kappa), num(r.kappa_min)),
        r.n0.map(|n| format!("n0={n}")).unwrap_or_default(),
    ];
    for (k, (verdict, detail)) in r.verdicts().into_iter().zip(details).enumerate() {
        summary.push(vec![(k + 1).to_string(), flag(verdict), detail]);
    }
    Ok(Outcome {
        tables: vec![("nested.csv".into(), rows), ("nested_summary.csv".into(), summary)],
        ..Outcome::default()
    })
}

fn full_escape(ctx: &Context) -> Result<Outcome, RunError> {
    let (block, holes) = ctx.escape()?;
    let params = ctx.flow_params(block)?;
    let roof = ctx.roof()?;
    let mu = ctx.measure()?;
    let report = escape_report(&mu, &roof, &holes, &params, block.kappa_min)?;
    let mut t = Table::new(&ESCAPE_HEADER);
    let mut diag = Table::new(&DIAGNOSTICS_HEADER);
    for (i, row) in report.rows.iter().enumerate() {
        let mut cells = escape_row(row.n, row.mu_hole, row.r_discrete, report.gamma, nested_cells(&report.nested, i));
        fill_flow(&mut cells, &row.flow, row.mu_hole, report.roof_mean, report.roof_sup, report.gamma);
        t.push(cells);
        diag.push(diagnostics_row(row.n, &row.flow));
    }
    let mut out = Outcome { seed: Some(params.seed), ..Outcome::default() };
    flow_warnings(&roof, &report.rows.iter().map(|r| (r.n, &r.flow)).collect::<Vec<_>>(), &mut out);
    out.tables = vec![("escape.csv".into(), t), ("escape_diagnostics.csv".into(), diag)];
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Thread count from the option, else from `THERMOFLOW_THREADS`, else zero
/// (one per available core).
pub fn resolve_threads(option: Option<usize>) -> Result<usize, RunError> {
    if let Some(n) = option {
        return Ok(n);
    }
    match std::env::var("THERMOFLOW_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| RunError::Config(format!("THERMOFLOW_THREADS is not a number: \"{v}\""))),
        Err(_) => Ok(0),
    }
}

/// Reads the config, runs `command` on a dedicated thread pool and writes
/// its tables and `manifest.json` into the output directory.
pub fn run(command: Command, options: &RunOptions) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&options.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", options.config.display())))?;
    let config = ExperimentConfig::parse(&text).map_err(RunError::Config)?;
    if let Some(o) = &config.output {
        if let Some(f) = o.formats.iter().find(|f| *f != "csv") {
            return Err(RunError::Config(format!("unsupported output format \"{f}\"")));
        }
    }
    let threads = resolve_threads(options.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Config(format!("cannot start {threads} threads: {e}")))?;
    let outcome = pool.install(|| execute(command, &config))?;

    let out_dir = options
        .out
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.directory.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)?;
    let mut files = Vec::new();
    for (name, table) in &outcome.tables {
        let path = out_dir.join(name);
        table.write(&path)?;
        files.push(path);
    }
    let manifest = Manifest {
        config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        command: command.name().into(),
        seed: outcome.seed,
        threads: pool.current_num_threads(),
        duration_ms: start.elapsed().as_millis(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    };
    let path = out_dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Io(e.into()))?;
    std::fs::write(&path, body + "\n")?;
    files.push(path);
    Ok(RunSummary { out_dir, files, warnings: outcome.warnings })
}

/// Reads a config file and runs it with default options into `out`.
pub fn run_into(command: Command, config: &Path, out: &Path) -> Result<RunSummary, RunError> {
    run(command, &RunOptions { config: config.to_path_buf(), out: Some(out.to_path_buf()), threads: None })
}
