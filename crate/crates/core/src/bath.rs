//! Ohmic harmonic bath: spectral density, Bose occupation, transition rates
//! and the spatial correlation of site fluctuations.

use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::format;
use core::f64::consts::PI;

use crate::bessel::bessel_j0;
use crate::error::{Error, Result};
use crate::units::{angular_to_wavenumber, thermal_energy, wavenumber_to_angular};
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoherenceModel {
    /// Weak-coupling, Born-Markov, secular generator in the exciton basis.
    SecularWeakCoupling,
    /// Site-basis pure dephasing with a single rate for every site.
    PureDephasing,
}

/// Bath parameters in spectroscopic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// E_r, cm⁻¹.
    pub reorg_energy: f64,
    /// ω_c, cm⁻¹.
    pub cutoff_freq: f64,
    /// K.
    pub temperature: f64,
    /// λ_B, Å. Zero means uncorrelated sites.
    pub correlation_length: f64,
    pub model: DecoherenceModel,
    /// ps⁻¹, used by [`DecoherenceModel::PureDephasing`] only.
    pub dephasing_rate: f64,
}

impl BathSpec {
    pub fn secular(reorg_energy: f64, cutoff_freq: f64, temperature: f64, correlation_length: f64) -> Self {
        Self {
            reorg_energy,
            cutoff_freq,
            temperature,
            correlation_length,
            model: DecoherenceModel::SecularWeakCoupling,
            dephasing_rate: 0.0,
        }
    }

    pub fn pure_dephasing(dephasing_rate: f64) -> Self {
        Self {
            reorg_energy: 0.0,
            cutoff_freq: 150.0,
            temperature: 293.0,
            correlation_length: 0.0,
            model: DecoherenceModel::PureDephasing,
            dephasing_rate,
        }
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.reorg_energy >= 0.0 && self.reorg_energy.is_finite()) {
            problems.push(format!("reorg_energy must be finite and >= 0, got {}", self.reorg_energy));
        }
        if !(self.cutoff_freq > 0.0 && self.cutoff_freq.is_finite()) {
            problems.push(format!("cutoff_freq must be finite and > 0, got {}", self.cutoff_freq));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            problems.push(format!("temperature must be finite and > 0, got {}", self.temperature));
        }
        if !(self.correlation_length >= 0.0 && self.correlation_length.is_finite()) {
            problems.push(format!(
                "correlation_length must be finite and >= 0, got {}",
                self.correlation_length
            ));
        }
        if !(self.dephasing_rate >= 0.0 && self.dephasing_rate.is_finite()) {
            problems.push(format!("dephasing_rate must be finite and >= 0, got {}", self.dephasing_rate));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Ohmic spectral density J(ω) = E_r (ω/ω_c) exp(−ω/ω_c), ω and result in cm⁻¹.
pub fn spectral_density(omega: f64, bath: &BathSpec) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    let x = omega / bath.cutoff_freq;
    Ok(bath.reorg_energy * x * (-x).exp())
}

/// Bose-Einstein occupation for an angular frequency in ps⁻¹.
///
/// Negative frequencies follow the analytic continuation N(−ω) = −(N(ω) + 1).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Domain(format!("thermal occupation needs a finite omega != 0, got {omega}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be > 0, got {temperature}")));
    }
    let x = angular_to_wavenumber(omega) / thermal_energy(temperature);
    Ok(1.0 / x.exp_m1())
}

/// Single-site transition rate γ(ω) = 2π J(|ω|) |N(−ω)| in ps⁻¹.
///
/// `omega` is ε_from − ε_to in angular ps⁻¹: positive for downhill transitions,
/// which carry the spontaneous-emission factor N + 1. At ω = 0 the ohmic limit
/// 2π E_r k_B T / ω_c is returned.
pub fn bath_rate(omega: f64, bath: &BathSpec) -> f64 {
    let kt = thermal_energy(bath.temperature);
    if omega == 0.0 {
        return wavenumber_to_angular(2.0 * PI * bath.reorg_energy * kt / bath.cutoff_freq);
    }
    let w = angular_to_wavenumber(omega.abs());
    let j = bath.reorg_energy * (w / bath.cutoff_freq) * (-w / bath.cutoff_freq).exp();
    let n = 1.0 / (w / kt).exp_m1();
    let occupation = if omega > 0.0 { n + 1.0 } else { n };
    wavenumber_to_angular(2.0 * PI * j * occupation)
}

/// Spatial correlation J0(d/λ_B) of fluctuations at two sites `d` Å apart.
pub fn spatial_correlation(distance: f64, correlation_length: f64) -> f64 {
    if distance == 0.0 {
        1.0
    } else if correlation_length == 0.0 {
        0.0
    } else {
        bessel_j0(distance / correlation_length)
    }
}

impl core::fmt::Display for DecoherenceModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            DecoherenceModel::SecularWeakCoupling => "secular_weak_coupling",
            DecoherenceModel::PureDephasing => "pure_dephasing",
        };
        f.write_str(s)
    }
}

impl core::str::FromStr for DecoherenceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "secular_weak_coupling" | "secular" | "SecularWeakCoupling" => Ok(Self::SecularWeakCoupling),
            "pure_dephasing" | "dephasing" | "PureDephasing" => Ok(Self::PureDephasing),
            other => Err(Error::Validation(alloc::vec![format!("unknown decoherence model {:?}", other.to_string())])),
        }
    }
}
