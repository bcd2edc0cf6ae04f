//! Time traces and parameter sweeps.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use exciton_core::propagate::propagate;
use exciton_core::{BathSpec, DecoherenceModel, DensityMatrix, Integrator, OpenSystem, SolverOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::files::{load_inputs, Inputs};
use crate::report::{manifest_json, ReportJson};
use crate::tables::{sweep_header, ObservableWriter, PointResult, SweepRow, TrajectoryWriter};
use crate::SimError;

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "EXCITON_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    ReorgEnergy,
    DephasingRate,
    CorrelationLength,
    None,
}

impl SweepVariable {
    pub fn parse(s: &str) -> Result<Self, SimError> {
        match s {
            "reorg" => Ok(Self::ReorgEnergy),
            "dephasing" => Ok(Self::DephasingRate),
            "lambda" => Ok(Self::CorrelationLength),
            other => Err(SimError::Config(format!("unknown sweep variable {other:?} (reorg|dephasing|lambda)"))),
        }
    }

    /// Column name, with units.
    pub fn column(self) -> &'static str {
        match self {
            Self::ReorgEnergy => "reorg_energy_cm1",
            Self::DephasingRate => "dephasing_rate_per_ps",
            Self::CorrelationLength => "correlation_length_angstrom",
            Self::None => "none",
        }
    }

    pub fn apply(self, base: &BathSpec, value: f64) -> BathSpec {
        let mut bath = *base;
        match self {
            Self::ReorgEnergy => bath.reorg_energy = value,
            Self::DephasingRate => bath.dephasing_rate = value,
            Self::CorrelationLength => bath.correlation_length = value,
            Self::None => {}
        }
        bath
    }
}

/// Log-spaced E_r grid over [10⁻³, 50] cm⁻¹.
pub fn default_reorg_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = (1e-3f64.ln(), 50f64.ln());
    (0..points)
        .map(|k| (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorChoice {
    DormandPrince,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOverrides {
    pub integrator: IntegratorChoice,
    /// ps; `None` keeps min(50/κ_max, 20 ns).
    pub horizon_ps: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub max_step_ps: f64,
    pub excited_cutoff: f64,
    pub check_every: usize,
}

impl SolverOverrides {
    /// Core defaults: Dormand–Prince, default horizon, every sample checked.
    pub fn trace_defaults() -> Self {
        let d = SolverOptions::default();
        Self {
            integrator: IntegratorChoice::DormandPrince,
            horizon_ps: None,
            rtol: d.rtol,
            atol: d.atol,
            max_step_ps: d.max_step,
            excited_cutoff: d.excited_cutoff,
            check_every: d.check_every,
        }
    }

    /// Exact sample-to-sample propagation out to 20 ns or the excited cutoff.
    pub fn sweep_defaults() -> Self {
        Self {
            integrator: IntegratorChoice::Exponential,
            horizon_ps: Some(exciton_core::propagate::MAX_DEFAULT_HORIZON),
            check_every: 100,
            ..Self::trace_defaults()
        }
    }

    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            integrator: match self.integrator {
                IntegratorChoice::DormandPrince => Integrator::DormandPrince,
                IntegratorChoice::Exponential => Integrator::Exponential,
            },
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step_ps,
            horizon: self.horizon_ps,
            excited_cutoff: self.excited_cutoff,
            check_every: self.check_every,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub network_path: PathBuf,
    pub bath_path: PathBuf,
    pub partition_path: PathBuf,
    pub initial_sites: Vec<usize>,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub solver: SolverOverrides,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HashedPath {
    path: PathBuf,
    sha256: String,
}

/// Frozen copy of a resolved configuration plus input hashes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub config: SweepConfig,
    inputs: BTreeMap<String, HashedPath>,
}

impl SweepConfig {
    /// Loads the inputs and checks the sweep against them.
    pub fn resolve(&self) -> Result<Inputs, SimError> {
        let inputs = load_inputs(&self.network_path, &self.bath_path, &self.partition_path)?;
        let n = inputs.network.n_sites();
        if self.initial_sites.is_empty() {
            return Err(SimError::Config("no initial sites given".into()));
        }
        if let Some(bad) = self.initial_sites.iter().find(|&&s| s == 0 || s > n) {
            return Err(SimError::Config(format!("initial site {bad} outside 1..={n}")));
        }
        match self.sweep_variable {
            SweepVariable::None => {}
            var => {
                if self.sweep_values.is_empty() {
                    return Err(SimError::Config("sweep values must be non-empty".into()));
                }
                if self.sweep_values.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(SimError::Config("sweep values must be strictly increasing".into()));
                }
                if self.sweep_values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(SimError::Config("sweep values must be finite and >= 0".into()));
                }
                let needs = match var {
                    SweepVariable::DephasingRate => DecoherenceModel::PureDephasing,
                    _ => DecoherenceModel::SecularWeakCoupling,
                };
                if inputs.bath.model != needs {
                    return Err(SimError::Config(format!(
                        "sweep over {} requires the {needs} model, bath file selects {}",
                        var.column(),
                        inputs.bath.model
                    )));
                }
                if var == SweepVariable::CorrelationLength && self.sweep_values.iter().any(|v| *v > 0.0) && inputs.network.distances().is_none() {
                    return Err(SimError::Config("correlation-length sweep needs site positions or distances".into()));
                }
            }
        }
        let s = &self.solver;
        if !(s.rtol > 0.0 && s.atol > 0.0 && s.max_step_ps > 0.0) || s.horizon_ps.is_some_and(|h| !(h > 0.0)) {
            return Err(SimError::Config("solver tolerances, step and horizon must be > 0".into()));
        }
        Ok(inputs)
    }

    pub fn echo(&self, command: &str, inputs: &Inputs) -> ConfigEcho {
        let names = ["network", "bath", "partition"];
        let paths = [&self.network_path, &self.bath_path, &self.partition_path];
        ConfigEcho {
            command: command.into(),
            config: self.clone(),
            inputs: names
                .iter()
                .zip(paths)
                .zip(&inputs.hashes)
                .map(|((n, p), h)| {
                    (
                        n.to_string(),
                        HashedPath {
                            path: p.clone(),
                            sha256: h.clone(),
                        },
                    )
                })
                .collect(),
        }
    }
}

pub fn read_echo(dir: &Path) -> Result<ConfigEcho, SimError> {
    let path = dir.join("config.json");
    let bytes = fs::read(&path).map_err(|e| SimError::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SimError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| SimError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, SimError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| SimError::io(path, e))?))
}

/// Outcome of a command that may fail partially.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub succeeded: usize,
    pub failed: Vec<String>,
}

/// Per initial site: observables CSV, trajectory CSV and a yield report.
pub fn run_time_trace(cfg: &SweepConfig) -> Result<RunSummary, SimError> {
    let inputs = cfg.resolve()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| SimError::io(&cfg.output_dir, e))?;
    write_json(&cfg.output_dir.join("config.json"), &cfg.echo("trace", &inputs))?;
    let net = &inputs.network;
    let system = OpenSystem::build(net, &inputs.bath)?;
    write_json(&cfg.output_dir.join("manifest.json"), &manifest_json(system.liouvillian.manifest()))?;

    let opts = cfg.solver.options();
    let horizon = opts.resolved_horizon(net.max_trap_rate());
    let mut summary = RunSummary::default();
    for &site in &cfg.initial_sites {
        match trace_one(cfg, &inputs, &system, &opts, horizon, site) {
            Ok(()) => summary.succeeded += 1,
            Err(e) => {
                log::error!("trace from site {site} failed: {e}");
                summary.failed.push(format!("initial site {site}: {e}"));
            }
        }
    }
    Ok(summary)
}

fn trace_one(
    cfg: &SweepConfig,
    inputs: &Inputs,
    system: &OpenSystem,
    opts: &SolverOptions,
    horizon: f64,
    site: usize,
) -> Result<(), SimError> {
    let net = &inputs.network;
    let dir = &cfg.output_dir;
    let rho0 = DensityMatrix::localized(site, net.n_sites())?;
    let mut obs = ObservableWriter::new(create(&dir.join(format!("observables_init{site}.csv")))?, net, &inputs.partition)?;
    let mut traj = TrajectoryWriter::new(create(&dir.join(format!("trajectory_init{site}.csv")))?, net.n_sites())?;
    let mut acc = exciton_core::observables::YieldAccumulator::new(net, &inputs.partition, opts.max_step)?;
    let mut write_error = None;
    let stats = propagate(&rho0, &system.liouvillian, opts, horizon, |t, rho| {
        acc.push(rho);
        if let Err(e) = obs.push(t, rho).and_then(|_| traj.push(t, rho)) {
            write_error = Some(e);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    obs.finish()?;
    traj.finish()?;
    let mut report = acc.finish(stats)?;
    report.yield_oracle = exciton_core::observables::quantum_yield_exact(&system.liouvillian, &rho0, net).ok();
    write_json(&dir.join(format!("report_init{site}.json")), &ReportJson::new(&report, site, None))
}

/// Evaluates one sweep point.
pub fn evaluate_point(inputs: &Inputs, variable: SweepVariable, value: f64, site: usize, opts: &SolverOptions) -> Result<ReportJson, SimError> {
    let bath = variable.apply(&inputs.bath, value);
    let system = OpenSystem::build(&inputs.network, &bath)?;
    let rho0 = DensityMatrix::localized(site, inputs.network.n_sites())?;
    let report = system.yields(&inputs.network, &inputs.partition, &rho0, opts)?;
    for w in &report.warnings {
        log::warn!("{} = {value}, site {site}: {w}", variable.column());
    }
    Ok(ReportJson::new(&report, site, Some((variable.column(), value))))
}

fn point_result(r: &ReportJson, groups: &[String]) -> PointResult {
    PointResult {
        quantum_yield: r.quantum_yield,
        yield_oracle: r.yield_oracle,
        truncation_bound: r.truncation_bound,
        dissipated: r.dissipated,
        phi_total: r.entanglement_yields["total"],
        phi_groups: groups.iter().map(|g| r.entanglement_yields[g]).collect(),
        accepted_steps: r.solver_stats.accepted_steps,
        rejected_steps: r.solver_stats.rejected_steps,
        final_time: r.solver_stats.final_time_ps,
        early_terminated: r.solver_stats.early_terminated,
    }
}

/// Worker count from the environment, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub const SWEEP_TABLE: &str = "sweep.csv";

/// Runs every (value, initial site) point and writes `sweep.csv` in grid
/// order as results arrive. With `resume`, rows already marked ok in an
/// existing table are kept and only the rest are recomputed.
pub fn run_sweep(cfg: &SweepConfig, resume: bool) -> Result<(Vec<SweepRow>, RunSummary), SimError> {
    if cfg.sweep_variable == SweepVariable::None {
        return Err(SimError::Config("a sweep needs --var".into()));
    }
    let inputs = cfg.resolve()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir.join("reports")).map_err(|e| SimError::io(dir, e))?;
    let groups: Vec<String> = inputs.partition.names().map(String::from).collect();
    let table = dir.join(SWEEP_TABLE);

    let mut previous: BTreeMap<(String, usize), SweepRow> = BTreeMap::new();
    if resume && table.exists() {
        for row in read_sweep_table(&table)?.1 {
            if row.outcome.is_ok() {
                previous.insert((crate::format::sig12(row.value), row.initial_site), row);
            }
        }
    }
    write_json(&dir.join("config.json"), &cfg.echo("sweep", &inputs))?;

    let jobs: Vec<(f64, usize)> = cfg
        .sweep_values
        .iter()
        .flat_map(|&v| cfg.initial_sites.iter().map(move |&s| (v, s)))
        .collect();
    let mut slots: Vec<Option<SweepRow>> = jobs
        .iter()
        .map(|&(v, s)| previous.remove(&(crate::format::sig12(v), s)))
        .collect();
    let pending: Vec<usize> = (0..jobs.len()).filter(|&i| slots[i].is_none()).collect();
    log::info!("{} of {} points to compute with {} workers", pending.len(), jobs.len(), worker_count());

    let mut writer = csv::Writer::from_writer(create(&table)?);
    writer.write_record(sweep_header(cfg.sweep_variable.column(), &groups))?;
    let mut next = 0usize;
    let flush_ready = |slots: &[Option<SweepRow>], next: &mut usize, writer: &mut csv::Writer<BufWriter<File>>| -> Result<(), SimError> {
        while *next < slots.len() {
            match &slots[*next] {
                Some(row) => writer.write_record(row.record(groups.len()))?,
                None => break,
            }
            *next += 1;
        }
        writer.flush()?;
        Ok(())
    };
    flush_ready(&slots, &mut next, &mut writer)?;

    let opts = cfg.solver.options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| SimError::Config(format!("worker pool: {e}")))?;
    let (tx, rx) = mpsc::channel::<(usize, Result<ReportJson, SimError>)>();
    let mut collect_error = None;
    let (pool, pending, jobs_ref, inputs_ref, opts_ref) = (&pool, &pending, &jobs, &inputs, &opts);
    let variable = cfg.sweep_variable;
    std::thread::scope(|scope| {
        scope.spawn(move || {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, &i| {
                    let (value, site) = jobs_ref[i];
                    let _ = tx.send((i, evaluate_point(inputs_ref, variable, value, site, opts_ref)));
                });
            });
        });
        for (i, result) in rx {
            let (value, site) = jobs[i];
            let outcome = match result {
                Ok(report) => {
                    let name = format!("point_{i:04}.json");
                    if let Err(e) = write_json(&dir.join("reports").join(name), &report) {
                        collect_error.get_or_insert(e);
                    }
                    Ok(point_result(&report, &groups))
                }
                Err(e) => {
                    log::error!("{} = {value}, site {site}: {e}", cfg.sweep_variable.column());
                    Err(e.to_string())
                }
            };
            slots[i] = Some(SweepRow {
                value,
                initial_site: site,
                outcome,
            });
            if let Err(e) = flush_ready(&slots, &mut next, &mut writer) {
                collect_error.get_or_insert(e);
            }
        }
    });
    if let Some(e) = collect_error {
        return Err(e);
    }
    let rows: Vec<SweepRow> = slots.into_iter().map(|r| r.expect("every point reported")).collect();
    let failed: Vec<String> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|m| format!("{} = {}, site {}: {m}", cfg.sweep_variable.column(), r.value, r.initial_site)))
        .collect();
    write_json(&dir.join("failures.json"), &failed)?;
    let summary = RunSummary {
        succeeded: rows.len() - failed.len(),
        failed,
    };
    Ok((rows, summary))
}

/// Reads a sweep table back: (variable column, rows, group names).
pub fn read_sweep_table(path: &Path) -> Result<(String, Vec<SweepRow>, Vec<String>), SimError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    let header = reader.headers()?.clone();
    let n_groups = header.len().saturating_sub(1 + crate::tables::FIXED_COLUMNS.len() + crate::tables::TRAILING_COLUMNS.len());
    let groups: Vec<String> = (0..n_groups)
        .map(|k| header[1 + crate::tables::FIXED_COLUMNS.len() + k].trim_start_matches("phi_").to_string())
        .collect();
    let rows = reader
        .records()
        .map(|r| SweepRow::from_record(&r?, n_groups))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header[0].to_string(), rows, groups))
}
