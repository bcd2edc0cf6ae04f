use alloc::format;
use alloc::string::String;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Density matrix on {|0⟩, |1⟩, …, |N⟩}: index 0 is the ground state,
/// index m the excitation on site m.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(matrix);
        rho.check().map_err(|detail| Error::InvalidState { t: 0.0, detail })?;
        Ok(rho)
    }

    pub fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// |m⟩⟨m| for 1 ≤ m ≤ N.
    pub fn localized(site: usize, n_sites: usize) -> Result<Self> {
        if site == 0 || site > n_sites {
            return Err(Error::IndexOutOfRange { index: site, n_sites });
        }
        let mut m = CMatrix::zeros(n_sites + 1, n_sites + 1);
        m[(site, site)] = C64::new(1.0, 0.0);
        Ok(Self { matrix: m })
    }

    pub fn ground(n_sites: usize) -> Self {
        let mut m = CMatrix::zeros(n_sites + 1, n_sites + 1);
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// |ψ⟩⟨ψ| for a ket of length N + 1, normalized here.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::Domain(String::from("cannot normalize a zero state vector")));
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(Self {
            matrix: &v * v.adjoint(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Population of basis state `index` (0 = ground).
    pub fn population(&self, index: usize) -> f64 {
        self.matrix[(index, index)].re
    }

    /// Σ_{m ≥ 1} ρ_mm.
    pub fn excited_population(&self) -> f64 {
        (1..self.matrix.nrows()).map(|m| self.matrix[(m, m)].re).sum()
    }

    pub fn coherence(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m, n)]
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ½ Σ |λ_i(ρ − σ)|.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
        0.5 * herm.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Describes the first violated invariant, if any.
    pub fn check(&self) -> core::result::Result<(), String> {
        let m = &self.matrix;
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(format!("matrix must be square with dimension >= 2, got {:?}", m.shape()));
        }
        let asym = (m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if !(asym <= HERMITICITY_TOL) {
            return Err(format!("hermiticity defect {asym:e}"));
        }
        let tr = self.trace();
        if !((tr - C64::new(1.0, 0.0)).norm() <= TRACE_TOL) {
            return Err(format!("trace {tr} differs from 1"));
        }
        let min = self.min_eigenvalue();
        if !(min > -POSITIVITY_TOL) {
            return Err(format!("minimum eigenvalue {min:e}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn localized_state() {
        let rho = DensityMatrix::localized(1, 7).unwrap();
        assert_eq!(rho.matrix().shape(), (8, 8));
        assert_eq!(rho.population(1), 1.0);
        assert_eq!(rho.matrix().iter().filter(|z| z.norm() != 0.0).count(), 1);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!(rho.check().is_ok());
        assert!(matches!(DensityMatrix::localized(0, 7), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(DensityMatrix::localized(8, 7), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = C64::new(1.5, 0.0);
        m[(2, 2)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = C64::new(1.0, 0.0);
        m[(1, 2)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = DensityMatrix::localized(1, 2).unwrap();
        let b = DensityMatrix::localized(2, 2).unwrap();
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-14);
        assert_eq!(a.trace_distance(&a), 0.0);
    }
}
