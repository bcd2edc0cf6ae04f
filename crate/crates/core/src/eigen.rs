//! Exciton basis of the single-excitation block and the grouping of
//! transition frequencies used by the secular generator.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::units::wavenumber_to_angular;
use crate::{CMatrix, C64};

/// Transitions whose frequency differs by less than this (cm⁻¹) share a bin.
pub const BIN_TOLERANCE_WAVENUMBER: f64 = 1e-6;

/// One secular frequency ω with its member transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBin {
    /// Angular ps⁻¹.
    pub omega: f64,
    /// `(from, to)` exciton indices (0-based) with ε_from − ε_to ≈ ω.
    pub transitions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Exciton energies ε_Ψ, ascending, angular ps⁻¹.
    pub energies: Vec<f64>,
    /// `vectors[(m, psi)]` = c_m(Ψ) = ⟨m|Ψ⟩ with 0-based site m.
    pub vectors: CMatrix,
    pub bins: Vec<FrequencyBin>,
}

impl EigenSystem {
    pub fn n_sites(&self) -> usize {
        self.energies.len()
    }

    /// Exciton Ψ embedded in the (N+1)-dimensional space.
    pub fn exciton_ket(&self, psi: usize) -> nalgebra::DVector<C64> {
        let n = self.n_sites();
        let mut v = nalgebra::DVector::zeros(n + 1);
        for m in 0..n {
            v[m + 1] = self.vectors[(m, psi)];
        }
        v
    }
}

/// Diagonalizes the single-excitation block of `h` (indices 1..=N).
pub fn diagonalize_single_excitation(h: &CMatrix) -> EigenSystem {
    let n = h.nrows() - 1;
    let block = h.view((1, 1), (n, n)).into_owned();
    let eig = block.symmetric_eigen();

    let mut columns: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    columns.sort_by(|a, b| match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
        Ordering::Equal => lexicographic(&a.1, &b.1),
        other => other,
    });

    let energies: Vec<f64> = columns.iter().map(|c| c.0).collect();
    let vectors = CMatrix::from_fn(n, n, |m, psi| columns[psi].1[m]);
    let bins = frequency_bins(&energies, wavenumber_to_angular(BIN_TOLERANCE_WAVENUMBER));
    EigenSystem {
        energies,
        vectors,
        bins,
    }
}

/// Rotates `v` so its first significant component is positive real.
fn fix_phase(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            other => return other.reverse(),
        }
    }
    Ordering::Equal
}

/// Groups every ordered pair (from, to) by ε_from − ε_to.
fn frequency_bins(energies: &[f64], tolerance: f64) -> Vec<FrequencyBin> {
    let n = energies.len();
    let mut all: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for from in 0..n {
        for to in 0..n {
            let omega = if from == to { 0.0 } else { energies[from] - energies[to] };
            all.push((omega, from, to));
        }
    }
    all.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut bins: Vec<FrequencyBin> = Vec::new();
    let mut start = f64::NAN;
    for (omega, from, to) in all {
        match bins.last_mut() {
            Some(bin) if (omega - start).abs() < tolerance => bin.transitions.push((from, to)),
            _ => {
                start = omega;
                bins.push(FrequencyBin {
                    omega,
                    transitions: alloc::vec![(from, to)],
                });
            }
        }
    }
    for bin in &mut bins {
        if bin.transitions.iter().any(|(a, b)| a == b) {
            bin.omega = 0.0;
        } else {
            let sum: f64 = bin.transitions.iter().map(|&(a, b)| energies[a] - energies[b]).sum();
            bin.omega = sum / bin.transitions.len() as f64;
        }
    }
    bins
}
