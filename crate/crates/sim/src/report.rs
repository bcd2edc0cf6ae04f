//! JSON forms of yield reports and channel manifests.

use std::collections::BTreeMap;

use exciton_core::generators::ChannelTag;
use exciton_core::liouvillian::ChannelSummary;
use exciton_core::propagate::SolverStats;
use exciton_core::units::angular_to_wavenumber;
use exciton_core::YieldReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub rtol: f64,
    pub atol: f64,
    pub final_time_ps: f64,
    pub final_excited_population: f64,
    pub early_terminated: bool,
    pub monotonic_decay: bool,
}

impl From<&SolverStats> for StatsJson {
    fn from(s: &SolverStats) -> Self {
        Self {
            accepted_steps: s.accepted_steps,
            rejected_steps: s.rejected_steps,
            rhs_evaluations: s.rhs_evaluations,
            rtol: s.rtol,
            atol: s.atol,
            final_time_ps: s.final_time,
            final_excited_population: s.final_excited_population,
            early_terminated: s.early_terminated,
            monotonic_decay: s.monotonic_decay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub initial_site: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_value: Option<f64>,
    pub quantum_yield: f64,
    pub yield_oracle: Option<f64>,
    pub truncation_bound: f64,
    pub dissipated: f64,
    /// `total` plus one entry per partition group.
    pub entanglement_yields: BTreeMap<String, f64>,
    pub solver_stats: StatsJson,
    pub warnings: Vec<String>,
}

impl ReportJson {
    pub fn new(report: &YieldReport, initial_site: usize, sweep: Option<(&str, f64)>) -> Self {
        let mut entanglement_yields: BTreeMap<String, f64> = report.group_entanglement_yields.iter().cloned().collect();
        entanglement_yields.insert("total".into(), report.total_entanglement_yield);
        Self {
            initial_site,
            sweep_variable: sweep.map(|(v, _)| v.to_string()),
            sweep_value: sweep.map(|(_, x)| x),
            quantum_yield: report.quantum_yield,
            yield_oracle: report.yield_oracle,
            truncation_bound: report.truncation_bound,
            dissipated: report.dissipated,
            entanglement_yields,
            solver_stats: (&report.stats).into(),
            warnings: report.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_cm1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    pub rate_per_ps: f64,
    pub operator_norm: f64,
}

pub fn manifest_json(manifest: &[ChannelSummary]) -> Vec<ChannelJson> {
    manifest
        .iter()
        .map(|c| {
            let (kind, site, omega, mode) = match c.tag {
                ChannelTag::Relaxation { omega, mode } => ("relaxation", None, Some(angular_to_wavenumber(omega)), Some(mode)),
                ChannelTag::SiteDephasing { site } => ("site_dephasing", Some(site), None, None),
                ChannelTag::Dissipation { site } => ("dissipation", Some(site), None, None),
                ChannelTag::Trapping { site } => ("trapping", Some(site), None, None),
            };
            ChannelJson {
                kind: kind.into(),
                site,
                omega_cm1: omega,
                mode,
                rate_per_ps: c.rate,
                operator_norm: c.operator_norm,
            }
        })
        .collect()
}
