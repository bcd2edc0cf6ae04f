//! Single-excitation energy transfer in pigment networks under Lindblad
//! dynamics: quantum yield, pairwise entanglement and the entanglement
//! yield averaged over the trapping waiting-time distribution.
//!
//! The crate is `no_std` with `alloc`. File formats, sweeps and the command
//! line live in `exciton-sim`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bath;
pub mod bessel;
pub mod eigen;
pub mod error;
pub mod expm;
pub mod generators;
pub mod liouvillian;
pub mod network;
pub mod observables;
pub mod propagate;
pub mod quadrature;
pub mod state;
pub mod units;

pub use bath::{BathSpec, DecoherenceModel};
pub use error::{Error, Result};
pub use liouvillian::Liouvillian;
pub use network::{NetworkSpec, SiteNetwork};
pub use observables::{PairGroup, PairPartition, YieldReport};
pub use propagate::{Integrator, SolverOptions, Trajectory};
pub use state::DensityMatrix;

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Hamiltonian, channels and assembled generator for one network and bath.
#[derive(Debug, Clone)]
pub struct OpenSystem {
    pub hamiltonian: CMatrix,
    pub eigensystem: eigen::EigenSystem,
    pub channels: alloc::vec::Vec<generators::JumpChannel>,
    pub liouvillian: Liouvillian,
}

impl OpenSystem {
    pub fn build(net: &SiteNetwork, bath: &BathSpec) -> Result<Self> {
        bath.validate()?;
        let hamiltonian = network::build_hamiltonian(net);
        let eigensystem = eigen::diagonalize_single_excitation(&hamiltonian);
        let channels = generators::build_channels(&eigensystem, net, bath)?;
        let liouvillian = liouvillian::assemble_liouvillian(&hamiltonian, &channels)?;
        Ok(Self {
            hamiltonian,
            eigensystem,
            channels,
            liouvillian,
        })
    }

    /// Propagates `rho0` and evaluates η, φ_T and the partitioned φ on the
    /// sample grid, alongside the linear-solve η when it exists.
    pub fn yields(
        &self,
        net: &SiteNetwork,
        partition: &PairPartition,
        rho0: &DensityMatrix,
        opts: &SolverOptions,
    ) -> Result<YieldReport> {
        let horizon = opts.resolved_horizon(net.max_trap_rate());
        let mut acc = observables::YieldAccumulator::new(net, partition, opts.max_step)?;
        let stats = propagate::propagate(rho0, &self.liouvillian, opts, horizon, |_, rho| {
            acc.push(rho);
            core::ops::ControlFlow::Continue(())
        })?;
        let mut report = acc.finish(stats)?;
        report.yield_oracle = observables::quantum_yield_exact(&self.liouvillian, rho0, net).ok();
        Ok(report)
    }
}
