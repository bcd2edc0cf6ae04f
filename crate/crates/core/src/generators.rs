//! Dissipative generators: secular weak-coupling relaxation, site-basis pure
//! dephasing, and loss to the ground state (radiative dissipation and
//! trapping at the reaction centre).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::bath::{bath_rate, spatial_correlation, BathSpec, DecoherenceModel};
use crate::eigen::{EigenSystem, FrequencyBin};
use crate::error::{Error, Result};
use crate::network::SiteNetwork;
use crate::{CMatrix, C64};

/// Relative threshold below which negative correlation eigenvalues are clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelTag {
    /// Secular relaxation/dephasing at exciton frequency `omega` (angular
    /// ps⁻¹) along correlation mode `mode`.
    Relaxation { omega: f64, mode: usize },
    SiteDephasing { site: usize },
    Dissipation { site: usize },
    Trapping { site: usize },
}

/// A Lindblad operator with its non-negative rate. Sites in tags are 1-based.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    pub operator: CMatrix,
    pub rate: f64,
    pub tag: ChannelTag,
}

/// Spectral decomposition of the site correlation matrix C_mn = J0(d_mn/λ_B).
#[derive(Debug, Clone)]
pub struct CorrelationModes {
    /// Non-negative weights after clamping.
    pub weights: Vec<f64>,
    /// `vectors[(m, k)]` = u_k(m).
    pub vectors: DMatrix<f64>,
    /// Number of eigenvalues that were in [−tol, 0) and got clamped.
    pub clamped: usize,
    /// Most negative raw eigenvalue (0 if none).
    pub most_negative: f64,
}

/// Decomposes the correlation matrix; fails on eigenvalues below −tol·max|C|.
///
/// The error carries the raw eigenvalue of C; [`build_secular_generator`]
/// rescales it by γ(ω).
pub fn correlation_modes(net: &SiteNetwork, correlation_length: f64) -> Result<CorrelationModes> {
    let n = net.n_sites();
    if correlation_length == 0.0 {
        return Ok(CorrelationModes {
            weights: vec![1.0; n],
            vectors: DMatrix::identity(n, n),
            clamped: 0,
            most_negative: 0.0,
        });
    }
    let d = net.distances().ok_or(Error::MissingGeometry)?;
    let c = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            spatial_correlation(d[(i, j)], correlation_length)
        }
    });
    let scale = c.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let eig = c.symmetric_eigen();
    let mut weights = Vec::with_capacity(n);
    let mut clamped = 0;
    let mut most_negative = 0.0f64;
    for &w in eig.eigenvalues.iter() {
        if w < 0.0 {
            most_negative = most_negative.min(w);
            if w < -CLAMP_TOLERANCE * scale {
                return Err(Error::NonPositiveRates {
                    omega: f64::NAN,
                    eigenvalue: w,
                });
            }
            clamped += 1;
            weights.push(0.0);
        } else {
            weights.push(w);
        }
    }
    if clamped > 0 {
        log::warn!(
            "clamped {clamped} slightly negative correlation eigenvalue(s) at lambda_B = {correlation_length} A (min {most_negative:e})"
        );
    }
    Ok(CorrelationModes {
        weights,
        vectors: eig.eigenvectors,
        clamped,
        most_negative,
    })
}

/// A_m(ω) = Σ c_m*(Ψ) c_m(Ψ′) |Ψ⟩⟨Ψ′| over the bin's transitions Ψ′ → Ψ,
/// written in the site basis of the (N+1)-dimensional space.
pub fn site_jump_operator(es: &EigenSystem, bin: &FrequencyBin, site: usize) -> CMatrix {
    let n = es.n_sites();
    let c = &es.vectors;
    let mut op = CMatrix::zeros(n + 1, n + 1);
    for &(from, to) in &bin.transitions {
        let weight = c[(site, to)].conj() * c[(site, from)];
        if weight == C64::new(0.0, 0.0) {
            continue;
        }
        for a in 0..n {
            let left = weight * c[(a, to)];
            for b in 0..n {
                op[(a + 1, b + 1)] += left * c[(b, from)].conj();
            }
        }
    }
    op
}

/// Secular weak-coupling channels with spatially correlated rates
/// γ_mn(ω) = J0(d_mn/λ_B) γ(ω), diagonalized into independent modes.
pub fn build_secular_generator(es: &EigenSystem, net: &SiteNetwork, bath: &BathSpec) -> Result<Vec<JumpChannel>> {
    if bath.model != DecoherenceModel::SecularWeakCoupling {
        return Err(Error::Validation(vec![format!(
            "secular generator requested for bath model {}",
            bath.model
        )]));
    }
    let n = net.n_sites();
    let rates: Vec<f64> = es.bins.iter().map(|b| bath_rate(b.omega, bath)).collect();
    if rates.iter().all(|&g| g == 0.0) {
        return Ok(Vec::new());
    }
    let modes = correlation_modes(net, bath.correlation_length).map_err(|e| match e {
        Error::NonPositiveRates { eigenvalue, .. } => {
            let (bin, gamma) = es
                .bins
                .iter()
                .zip(&rates)
                .find(|(_, &g)| g > 0.0)
                .expect("some rate is nonzero");
            Error::NonPositiveRates {
                omega: bin.omega,
                eigenvalue: eigenvalue * gamma,
            }
        }
        other => other,
    })?;

    let mut channels = Vec::new();
    for (bin, &gamma) in es.bins.iter().zip(&rates) {
        if gamma == 0.0 {
            continue;
        }
        let site_ops: Vec<CMatrix> = (0..n).map(|m| site_jump_operator(es, bin, m)).collect();
        for k in 0..n {
            let rate = gamma * modes.weights[k];
            if rate == 0.0 {
                continue;
            }
            let mut op = CMatrix::zeros(n + 1, n + 1);
            for (m, a_m) in site_ops.iter().enumerate() {
                let u = modes.vectors[(m, k)];
                if u != 0.0 {
                    op += a_m * C64::new(u, 0.0);
                }
            }
            channels.push(JumpChannel {
                operator: op,
                rate,
                tag: ChannelTag::Relaxation { omega: bin.omega, mode: k },
            });
        }
    }
    Ok(channels)
}

/// Site projectors |k⟩⟨k| at the common dephasing rate.
pub fn build_pure_dephasing_generator(net: &SiteNetwork, bath: &BathSpec) -> Result<Vec<JumpChannel>> {
    if bath.model != DecoherenceModel::PureDephasing {
        return Err(Error::Validation(vec![format!(
            "pure-dephasing generator requested for bath model {}",
            bath.model
        )]));
    }
    let n = net.n_sites();
    Ok((1..=n)
        .map(|k| {
            let mut op = CMatrix::zeros(n + 1, n + 1);
            op[(k, k)] = C64::new(1.0, 0.0);
            JumpChannel {
                operator: op,
                rate: bath.dephasing_rate,
                tag: ChannelTag::SiteDephasing { site: k },
            }
        })
        .collect())
}

/// σ_m⁻ = |0⟩⟨m| channels for every nonzero Γ_m and κ_m.
pub fn build_loss_generator(net: &SiteNetwork) -> Vec<JumpChannel> {
    let n = net.n_sites();
    let lowering = |m: usize| {
        let mut op = CMatrix::zeros(n + 1, n + 1);
        op[(0, m)] = C64::new(1.0, 0.0);
        op
    };
    let mut channels = Vec::new();
    for m in 1..=n {
        let gamma = net.dissipation_rates()[m - 1];
        if gamma > 0.0 {
            channels.push(JumpChannel {
                operator: lowering(m),
                rate: gamma,
                tag: ChannelTag::Dissipation { site: m },
            });
        }
    }
    for m in 1..=n {
        let kappa = net.trap_rates()[m - 1];
        if kappa > 0.0 {
            channels.push(JumpChannel {
                operator: lowering(m),
                rate: kappa,
                tag: ChannelTag::Trapping { site: m },
            });
        }
    }
    channels
}

/// Bath channels for the selected model followed by the loss channels.
pub fn build_channels(es: &EigenSystem, net: &SiteNetwork, bath: &BathSpec) -> Result<Vec<JumpChannel>> {
    let mut channels = match bath.model {
        DecoherenceModel::SecularWeakCoupling => build_secular_generator(es, net, bath)?,
        DecoherenceModel::PureDephasing => build_pure_dephasing_generator(net, bath)?,
    };
    channels.extend(build_loss_generator(net));
    Ok(channels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::diagonalize_single_excitation;
    use crate::network::{build_hamiltonian, NetworkSpec};

    fn dimer(distance: f64) -> SiteNetwork {
        NetworkSpec {
            energies: vec![80.0, 0.0],
            couplings: vec![vec![0.0, 40.0], vec![40.0, 0.0]],
            distances: Some(vec![vec![0.0, distance], vec![distance, 0.0]]),
            dissipation_rates: vec![0.001, 0.001],
            trap_rates: vec![0.0, 1.0],
            ..Default::default()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn uncorrelated_channels_are_site_operators() {
        let net = dimer(5.0);
        let es = diagonalize_single_excitation(&build_hamiltonian(&net));
        let bath = BathSpec::secular(35.0, 150.0, 293.0, 0.0);
        let channels = build_secular_generator(&es, &net, &bath).unwrap();
        assert_eq!(channels.len(), es.bins.len() * 2);
        let mut i = 0;
        for bin in &es.bins {
            for m in 0..2 {
                let ch = &channels[i];
                assert_eq!(ch.rate, bath_rate(bin.omega, &bath));
                let expected = site_jump_operator(&es, bin, m);
                assert!((&ch.operator - expected).norm() < 1e-15);
                i += 1;
            }
        }
    }

    #[test]
    fn zero_reorganization_energy_is_empty() {
        let net = dimer(5.0);
        let es = diagonalize_single_excitation(&build_hamiltonian(&net));
        let bath = BathSpec::secular(0.0, 150.0, 293.0, 10.0);
        assert!(build_secular_generator(&es, &net, &bath).unwrap().is_empty());
    }

    #[test]
    fn correlated_dimer_mode_rates() {
        let net = dimer(5.0);
        let es = diagonalize_single_excitation(&build_hamiltonian(&net));
        let bath = BathSpec::secular(35.0, 150.0, 293.0, 10.0);
        let channels = build_secular_generator(&es, &net, &bath).unwrap();
        // J0(0.5) from the defining series, independent of the rational approximation
        let j0_half: f64 = (0..20)
            .map(|k| {
                let f: f64 = (1..=k).map(|i| i as f64).product();
                (-1.0f64).powi(k) * 0.0625f64.powi(k) / (f * f)
            })
            .sum();
        assert!((j0_half - 0.938_469_807_240_813).abs() < 1e-12);
        for bin in &es.bins {
            let gamma = bath_rate(bin.omega, &bath);
            let mut got: Vec<f64> = channels
                .iter()
                .filter(|c| matches!(c.tag, ChannelTag::Relaxation { omega, .. } if omega == bin.omega))
                .map(|c| c.rate)
                .collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got.len(), 2);
            assert!((got[0] - gamma * (1.0 - j0_half)).abs() < 1e-12 * gamma);
            assert!((got[1] - gamma * (1.0 + j0_half)).abs() < 1e-12 * gamma);
        }
    }

    #[test]
    fn correlation_without_geometry_fails() {
        let net = NetworkSpec {
            energies: vec![0.0, 10.0],
            couplings: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            dissipation_rates: vec![0.0, 0.0],
            trap_rates: vec![1.0, 0.0],
            ..Default::default()
        }
        .validate()
        .unwrap();
        let es = diagonalize_single_excitation(&build_hamiltonian(&net));
        let bath = BathSpec::secular(35.0, 150.0, 293.0, 10.0);
        assert_eq!(build_secular_generator(&es, &net, &bath).unwrap_err(), Error::MissingGeometry);
    }

    #[test]
    fn indefinite_correlation_is_rejected() {
        // regular tetrahedron with edge at the minimum of J0: C = (1-b)I + b·11ᵀ
        // with b ≈ −0.403 has eigenvalue 1 + 3b < 0
        let s = 3.831_705_970_207_512 / (2.0 * core::f64::consts::SQRT_2);
        let positions = vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let net = NetworkSpec {
            energies: vec![0.0, 50.0, 100.0, 150.0],
            couplings: vec![
                vec![0.0, 10.0, 0.0, 0.0],
                vec![10.0, 0.0, 10.0, 0.0],
                vec![0.0, 10.0, 0.0, 10.0],
                vec![0.0, 0.0, 10.0, 0.0],
            ],
            positions: Some(positions),
            dissipation_rates: vec![0.0; 4],
            trap_rates: vec![1.0, 0.0, 0.0, 0.0],
            ..Default::default()
        }
        .validate()
        .unwrap();
        let es = diagonalize_single_excitation(&build_hamiltonian(&net));
        let bath = BathSpec::secular(35.0, 150.0, 293.0, 1.0);
        match build_secular_generator(&es, &net, &bath) {
            Err(Error::NonPositiveRates { omega, eigenvalue }) => {
                assert!(omega.is_finite());
                assert!(eigenvalue < 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pure_dephasing_channels() {
        let net = dimer(5.0);
        let zero = build_pure_dephasing_generator(&net, &BathSpec::pure_dephasing(0.0)).unwrap();
        assert_eq!(zero.len(), 2);
        assert!(zero.iter().all(|c| c.rate == 0.0));
        assert!(build_pure_dephasing_generator(&net, &BathSpec::secular(1.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn loss_channels() {
        let net = dimer(5.0);
        let loss = build_loss_generator(&net);
        assert_eq!(loss.len(), 3);
        assert_eq!(loss.iter().filter(|c| matches!(c.tag, ChannelTag::Trapping { site: 2 })).count(), 1);
        let none = net.with_rates(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(build_loss_generator(&none).is_empty());
    }
}
