use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use exciton_sim::crossings::{crossing_finder, curves, refine, Crossings};
use exciton_sim::run::{
    default_reorg_grid, evaluate_point, read_echo, read_sweep_table, run_sweep, run_time_trace, IntegratorChoice, RunSummary,
    SolverOverrides, SweepConfig, SweepVariable, SWEEP_TABLE,
};
use exciton_sim::SimError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Observables over time for each initial site.
    Trace,
    /// Yields over a grid of bath parameters.
    Sweep,
    /// Crossings of the two initial-site curves in an existing sweep.
    Crossings,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Rk,
    Exponential,
}

/// Single-excitation energy transfer under Lindblad dynamics: quantum yield
/// and entanglement yield over time and across bath parameters.
///
/// The worker count for sweeps comes from EXCITON_WORKERS.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    command: Command,
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    bath: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Initial sites, 1-based.
    #[arg(long, value_delimiter = ',', default_value = "1,6")]
    init: Vec<usize>,
    /// reorg | dephasing | lambda
    #[arg(long = "var")]
    variable: Option<String>,
    /// Strictly increasing sweep values; reorg defaults to a log grid on [1e-3, 50].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Points in the default reorganization-energy grid.
    #[arg(long, default_value_t = 40)]
    grid_points: usize,
    #[arg(long)]
    out: PathBuf,
    /// Keep finished rows of an existing sweep and recompute the rest.
    #[arg(long)]
    resume: bool,
    /// Bisect each crossing bracket by re-running the simulator.
    #[arg(long)]
    refine_crossings: bool,
    #[arg(long, default_value_t = 8)]
    refine_iterations: usize,
    /// Columns for crossings: eta, phi_T or phi_<group>. Defaults to all.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    #[arg(long, value_enum)]
    integrator: Option<IntegratorArg>,
    /// Integration horizon, ps.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    /// Sample spacing, ps.
    #[arg(long)]
    max_step: Option<f64>,
    /// Stop once the excited population falls below this.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Validate every n-th sample (0 disables).
    #[arg(long)]
    check_every: Option<usize>,
}

fn required(p: &Option<PathBuf>, flag: &str) -> Result<PathBuf, SimError> {
    p.clone().ok_or_else(|| SimError::Config(format!("--{flag} is required")))
}

impl Args {
    fn solver(&self, mut s: SolverOverrides) -> SolverOverrides {
        if let Some(i) = self.integrator {
            s.integrator = match i {
                IntegratorArg::Rk => IntegratorChoice::DormandPrince,
                IntegratorArg::Exponential => IntegratorChoice::Exponential,
            };
        }
        if self.horizon.is_some() {
            s.horizon_ps = self.horizon;
        }
        s.rtol = self.rtol.unwrap_or(s.rtol);
        s.atol = self.atol.unwrap_or(s.atol);
        s.max_step_ps = self.max_step.unwrap_or(s.max_step_ps);
        s.excited_cutoff = self.cutoff.unwrap_or(s.excited_cutoff);
        s.check_every = self.check_every.unwrap_or(s.check_every);
        s
    }

    fn config(&self, variable: SweepVariable, values: Vec<f64>, solver: SolverOverrides) -> Result<SweepConfig, SimError> {
        Ok(SweepConfig {
            network_path: required(&self.network, "network")?,
            bath_path: required(&self.bath, "bath")?,
            partition_path: required(&self.partition, "partition")?,
            initial_sites: self.init.clone(),
            sweep_variable: variable,
            sweep_values: values,
            solver,
            output_dir: self.out.clone(),
        })
    }
}

fn report(summary: &RunSummary) -> ExitCode {
    for f in &summary.failed {
        eprintln!("failed: {f}");
    }
    eprintln!("{} succeeded, {} failed", summary.succeeded, summary.failed.len());
    if summary.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn trace(args: &Args) -> Result<ExitCode, SimError> {
    let cfg = args.config(SweepVariable::None, Vec::new(), args.solver(SolverOverrides::trace_defaults()))?;
    Ok(report(&run_time_trace(&cfg)?))
}

fn sweep(args: &Args) -> Result<ExitCode, SimError> {
    let var = SweepVariable::parse(args.variable.as_deref().ok_or_else(|| SimError::Config("--var is required".into()))?)?;
    let values = match (&args.values, var) {
        (Some(v), _) => v.clone(),
        (None, SweepVariable::ReorgEnergy) if args.grid_points >= 2 => default_reorg_grid(args.grid_points),
        _ => return Err(SimError::Config("--values is required for this sweep".into())),
    };
    let cfg = args.config(var, values, args.solver(SolverOverrides::sweep_defaults()))?;
    let (_, summary) = run_sweep(&cfg, args.resume)?;
    Ok(report(&summary))
}

#[derive(Serialize)]
struct CrossingJson {
    initial_sites: [usize; 2],
    #[serde(flatten)]
    result: Crossings,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<Vec<f64>>,
}

fn crossings(args: &Args) -> Result<ExitCode, SimError> {
    let (var_column, rows, groups) = read_sweep_table(&args.out.join(SWEEP_TABLE))?;
    let columns = args.columns.clone().unwrap_or_else(|| {
        let mut c = vec!["eta".to_string(), "phi_T".to_string()];
        c.extend(groups.iter().map(|g| format!("phi_{g}")));
        c
    });
    let refine_setup = if args.refine_crossings {
        let echo = read_echo(&args.out)?;
        let mut cfg = echo.config;
        if let Some(p) = &args.network {
            cfg.network_path = p.clone();
        }
        if let Some(p) = &args.bath {
            cfg.bath_path = p.clone();
        }
        if let Some(p) = &args.partition {
            cfg.partition_path = p.clone();
        }
        let inputs = cfg.resolve()?;
        Some((cfg, inputs))
    } else {
        None
    };
    let mut out = BTreeMap::new();
    for column in &columns {
        let (grid, sites, [a, b]) = curves(&rows, column, &groups)?;
        let result = crossing_finder(&grid, &a, &b)?;
        let refined = match (&refine_setup, &result) {
            (Some((cfg, inputs)), Crossings::Found { brackets, .. }) => {
                let opts = cfg.solver.options();
                let mut points = Vec::new();
                for &(lo, hi) in brackets {
                    let x = if lo == hi {
                        lo
                    } else {
                        refine(lo, hi, args.refine_iterations, |x| {
                            let mut v = [0.0; 2];
                            for (slot, site) in v.iter_mut().zip(sites) {
                                let r = evaluate_point(inputs, cfg.sweep_variable, x, site, &opts)?;
                                *slot = pick(&r, column)?;
                            }
                            Ok(v[0] - v[1])
                        })?
                    };
                    points.push(x);
                }
                Some(points)
            }
            _ => None,
        };
        match &result {
            Crossings::IdenticalCurves => println!("{column}: identical curves"),
            Crossings::Found { values, .. } => println!("{column} ({var_column}): {values:?}{}", refined.as_ref().map(|r| format!(" refined {r:?}")).unwrap_or_default()),
        }
        out.insert(
            column.clone(),
            CrossingJson {
                initial_sites: sites,
                result,
                refined,
            },
        );
    }
    let path = args.out.join("crossings.json");
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| SimError::io(&path, e))?;
    Ok(ExitCode::SUCCESS)
}

fn pick(r: &exciton_sim::report::ReportJson, column: &str) -> Result<f64, SimError> {
    let key = match column {
        "eta" => return Ok(r.quantum_yield),
        "phi_T" => "total",
        other => other.strip_prefix("phi_").unwrap_or(other),
    };
    r.entanglement_yields
        .get(key)
        .copied()
        .ok_or_else(|| SimError::Config(format!("unknown column {column:?}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = match args.command {
        Command::Trace => trace(&args),
        Command::Sweep => sweep(&args),
        Command::Crossings => crossings(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
