//! Pigment network description and the exciton Hamiltonian.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::units::wavenumber_to_angular;
use crate::{CMatrix, C64};
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)]
use num_traits::Float;

/// Raw network parameters as read from a file, before validation.
#[derive(Debug, Clone, Default)]
pub struct NetworkSpec {
    pub labels: Vec<String>,
    /// ε_m, cm⁻¹.
    pub energies: Vec<f64>,
    /// V_mn, cm⁻¹, row-major N×N.
    pub couplings: Vec<Vec<f64>>,
    /// Å.
    pub positions: Option<Vec<[f64; 3]>>,
    /// Å; overrides `positions` when present.
    pub distances: Option<Vec<Vec<f64>>>,
    /// Γ_m, ps⁻¹.
    pub dissipation_rates: Vec<f64>,
    /// κ_m, ps⁻¹.
    pub trap_rates: Vec<f64>,
}

/// A validated pigment network. Site indices are 1-based in the public API,
/// matching the state basis {|0⟩, |1⟩, …, |N⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteNetwork {
    labels: Vec<String>,
    energies: Vec<f64>,
    couplings: DMatrix<f64>,
    distances: Option<DMatrix<f64>>,
    dissipation_rates: Vec<f64>,
    trap_rates: Vec<f64>,
    warnings: Vec<String>,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl NetworkSpec {
    pub fn validate(self) -> Result<SiteNetwork> {
        let n = self.energies.len();
        let mut problems = Vec::new();
        if n == 0 {
            problems.push(String::from("network has no sites"));
        }
        for (m, e) in self.energies.iter().enumerate() {
            if !e.is_finite() {
                problems.push(format!("site {} energy is not finite", m + 1));
            }
        }
        check_rates("gamma", &self.dissipation_rates, n, &mut problems);
        check_rates("kappa", &self.trap_rates, n, &mut problems);

        let couplings = square_matrix("couplings", &self.couplings, n, &mut problems);
        if let Some(v) = &couplings {
            for m in 0..n {
                if v[(m, m)] != 0.0 {
                    problems.push(format!("coupling diagonal ({0},{0}) must be zero, got {1}", m + 1, v[(m, m)]));
                }
                for k in (m + 1)..n {
                    let (a, b) = (v[(m, k)], v[(k, m)]);
                    if !a.is_finite() || !b.is_finite() {
                        problems.push(format!("coupling ({},{}) is not finite", m + 1, k + 1));
                    } else if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                        problems.push(format!(
                            "coupling matrix is not symmetric at pair ({},{}): {} vs {}",
                            m + 1,
                            k + 1,
                            a,
                            b
                        ));
                    }
                }
            }
        }

        let distances = match (&self.distances, &self.positions) {
            (Some(d), _) => square_matrix("distances", d, n, &mut problems),
            (None, Some(p)) => {
                if p.len() != n {
                    problems.push(format!("expected {n} positions, found {}", p.len()));
                    None
                } else {
                    Some(distance_matrix(p))
                }
            }
            (None, None) => None,
        };
        if let Some(d) = &distances {
            for m in 0..n {
                if d[(m, m)] != 0.0 {
                    problems.push(format!("distance diagonal ({0},{0}) must be zero", m + 1));
                }
                for k in (m + 1)..n {
                    let (a, b) = (d[(m, k)], d[(k, m)]);
                    if !(a >= 0.0) || !(b >= 0.0) {
                        problems.push(format!("distance ({},{}) must be non-negative", m + 1, k + 1));
                    } else if (a - b).abs() > SYMMETRY_TOL * a.max(b).max(1.0) {
                        problems.push(format!("distance matrix is not symmetric at pair ({},{})", m + 1, k + 1));
                    }
                }
            }
        }

        let labels = if self.labels.is_empty() {
            (1..=n).map(|m| format!("{m}")).collect()
        } else {
            if self.labels.len() != n {
                problems.push(format!("expected {n} labels, found {}", self.labels.len()));
            }
            self.labels
        };

        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }

        let mut warnings = Vec::new();
        if self.trap_rates.iter().all(|&k| k == 0.0) {
            let msg = String::from("no site has a trap rate > 0; quantum yield will be zero");
            log::warn!("{msg}");
            warnings.push(msg);
        }

        Ok(SiteNetwork {
            labels,
            energies: self.energies,
            couplings: couplings.expect("checked above"),
            distances,
            dissipation_rates: self.dissipation_rates,
            trap_rates: self.trap_rates,
            warnings,
        })
    }
}

fn check_rates(name: &str, rates: &[f64], n: usize, problems: &mut Vec<String>) {
    if rates.len() != n {
        problems.push(format!("expected {n} {name} rates, found {}", rates.len()));
    }
    for (m, r) in rates.iter().enumerate() {
        if !(*r >= 0.0 && r.is_finite()) {
            problems.push(format!("site {} {name} rate must be finite and >= 0, got {r}", m + 1));
        }
    }
}

fn square_matrix(name: &str, rows: &[Vec<f64>], n: usize, problems: &mut Vec<String>) -> Option<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        problems.push(format!("{name} must be a {n}x{n} matrix"));
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn distance_matrix(positions: &[[f64; 3]]) -> DMatrix<f64> {
    let n = positions.len();
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (positions[i], positions[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    })
}

impl SiteNetwork {
    pub fn n_sites(&self) -> usize {
        self.energies.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    /// Pairwise distances in Å (0-based indices), if geometry was supplied.
    pub fn distances(&self) -> Option<&DMatrix<f64>> {
        self.distances.as_ref()
    }

    pub fn dissipation_rates(&self) -> &[f64] {
        &self.dissipation_rates
    }

    pub fn trap_rates(&self) -> &[f64] {
        &self.trap_rates
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Largest κ_m, ps⁻¹.
    pub fn max_trap_rate(&self) -> f64 {
        self.trap_rates.iter().copied().fold(0.0, f64::max)
    }

    /// Copy of the network with different loss rates; used by sweeps and tests.
    pub fn with_rates(&self, dissipation_rates: Vec<f64>, trap_rates: Vec<f64>) -> Result<Self> {
        let spec = NetworkSpec {
            labels: self.labels.clone(),
            energies: self.energies.clone(),
            couplings: rows(&self.couplings),
            positions: None,
            distances: self.distances.as_ref().map(rows),
            dissipation_rates,
            trap_rates,
        };
        spec.validate()
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Exciton Hamiltonian on {|0⟩, |1⟩, …, |N⟩} in angular ps⁻¹. The ground
/// row and column are zero.
pub fn build_hamiltonian(net: &SiteNetwork) -> CMatrix {
    let n = net.n_sites();
    let mut h = CMatrix::zeros(n + 1, n + 1);
    for m in 0..n {
        h[(m + 1, m + 1)] = C64::new(wavenumber_to_angular(net.energies[m]), 0.0);
        for k in 0..n {
            if k != m {
                h[(m + 1, k + 1)] = C64::new(wavenumber_to_angular(net.couplings[(m, k)]), 0.0);
            }
        }
    }
    h
}
