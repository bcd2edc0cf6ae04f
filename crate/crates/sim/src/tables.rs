//! CSV tables: trajectories, per-time observables and sweep rows.

use std::io::Write;

use exciton_core::observables::{partitioned_entanglement, total_entanglement, trapping_density};
use exciton_core::{DensityMatrix, PairPartition, SiteNetwork};

use crate::format::sig12;
use crate::SimError;

/// time_ps, p0…pN, then |a_mn| for m < n in row order.
pub struct TrajectoryWriter<W: Write> {
    out: csv::Writer<W>,
    n_sites: usize,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(inner: W, n_sites: usize) -> Result<Self, SimError> {
        let mut out = csv::Writer::from_writer(inner);
        let mut header = vec!["time_ps".to_string()];
        header.extend((0..=n_sites).map(|m| format!("p{m}")));
        for m in 0..=n_sites {
            for n in m + 1..=n_sites {
                header.push(format!("abs_a{m}_{n}"));
            }
        }
        out.write_record(&header)?;
        Ok(Self { out, n_sites })
    }

    pub fn push(&mut self, t: f64, rho: &DensityMatrix) -> Result<(), SimError> {
        let mut row = vec![sig12(t)];
        row.extend((0..=self.n_sites).map(|m| sig12(rho.population(m))));
        for m in 0..=self.n_sites {
            for n in m + 1..=self.n_sites {
                row.push(sig12(rho.coherence(m, n).norm()));
            }
        }
        self.out.write_record(&row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), SimError> {
        self.out.flush()?;
        Ok(())
    }
}

/// time_ps, E_T, E_<group>…, omega_RC.
pub struct ObservableWriter<'a, W: Write> {
    out: csv::Writer<W>,
    net: &'a SiteNetwork,
    partition: &'a PairPartition,
}

impl<'a, W: Write> ObservableWriter<'a, W> {
    pub fn new(inner: W, net: &'a SiteNetwork, partition: &'a PairPartition) -> Result<Self, SimError> {
        let mut out = csv::Writer::from_writer(inner);
        let mut header = vec!["time_ps".to_string(), "E_T".to_string()];
        header.extend(partition.names().map(|g| format!("E_{g}")));
        header.push("omega_RC".into());
        out.write_record(&header)?;
        Ok(Self { out, net, partition })
    }

    pub fn push(&mut self, t: f64, rho: &DensityMatrix) -> Result<(), SimError> {
        let mut row = vec![sig12(t), sig12(total_entanglement(rho))];
        row.extend(partitioned_entanglement(rho, self.partition)?.into_iter().map(sig12));
        row.push(sig12(trapping_density(rho, self.net)));
        self.out.write_record(&row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), SimError> {
        self.out.flush()?;
        Ok(())
    }
}

/// One (sweep value, initial site) result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub initial_site: usize,
    pub outcome: Result<PointResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub quantum_yield: f64,
    pub yield_oracle: Option<f64>,
    pub truncation_bound: f64,
    pub dissipated: f64,
    pub phi_total: f64,
    /// In partition order.
    pub phi_groups: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_time: f64,
    pub early_terminated: bool,
}

pub const FIXED_COLUMNS: [&str; 7] = ["initial_site", "status", "eta", "eta_oracle", "truncation_bound", "dissipated", "phi_T"];
pub const TRAILING_COLUMNS: [&str; 5] = ["accepted_steps", "rejected_steps", "final_time_ps", "early_terminated", "message"];

pub fn sweep_header(variable_column: &str, groups: &[String]) -> Vec<String> {
    let mut h = vec![variable_column.to_string()];
    h.extend(FIXED_COLUMNS.iter().map(|s| s.to_string()));
    h.extend(groups.iter().map(|g| format!("phi_{g}")));
    h.extend(TRAILING_COLUMNS.iter().map(|s| s.to_string()));
    h
}

impl SweepRow {
    pub fn record(&self, n_groups: usize) -> Vec<String> {
        let mut r = vec![sig12(self.value), self.initial_site.to_string()];
        match &self.outcome {
            Ok(p) => {
                r.push("ok".into());
                r.push(sig12(p.quantum_yield));
                r.push(p.yield_oracle.map(sig12).unwrap_or_default());
                r.push(sig12(p.truncation_bound));
                r.push(sig12(p.dissipated));
                r.push(sig12(p.phi_total));
                r.extend(p.phi_groups.iter().map(|v| sig12(*v)));
                r.push(p.accepted_steps.to_string());
                r.push(p.rejected_steps.to_string());
                r.push(sig12(p.final_time));
                r.push(p.early_terminated.to_string());
                r.push(String::new());
            }
            Err(msg) => {
                r.push("failed".into());
                r.extend(std::iter::repeat_n(String::new(), 5 + n_groups + 4));
                r.push(msg.clone());
            }
        }
        r
    }

    pub fn from_record(rec: &csv::StringRecord, n_groups: usize) -> Result<Self, SimError> {
        let bad = |what: &str| SimError::Config(format!("malformed sweep row ({what}): {rec:?}"));
        let expected = 1 + FIXED_COLUMNS.len() + n_groups + TRAILING_COLUMNS.len();
        if rec.len() != expected {
            return Err(bad("column count"));
        }
        let num = |i: usize| -> Result<f64, SimError> { rec[i].parse::<f64>().map_err(|_| bad(&format!("column {i}"))) };
        let value = num(0)?;
        let initial_site = rec[1].parse().map_err(|_| bad("initial_site"))?;
        let outcome = if &rec[2] == "ok" {
            let g0 = 7;
            let t0 = g0 + n_groups;
            Ok(PointResult {
                quantum_yield: num(3)?,
                yield_oracle: if rec[4].is_empty() { None } else { Some(num(4)?) },
                truncation_bound: num(5)?,
                dissipated: num(6)?,
                phi_total: num(7)?,
                phi_groups: (0..n_groups).map(|k| num(g0 + 1 + k)).collect::<Result<_, _>>()?,
                accepted_steps: rec[t0 + 1].parse().map_err(|_| bad("accepted_steps"))?,
                rejected_steps: rec[t0 + 2].parse().map_err(|_| bad("rejected_steps"))?,
                final_time: num(t0 + 3)?,
                early_terminated: rec[t0 + 4].parse().map_err(|_| bad("early_terminated"))?,
            })
        } else {
            Err(rec[expected - 1].to_string())
        };
        Ok(Self {
            value,
            initial_site,
            outcome,
        })
    }
}
