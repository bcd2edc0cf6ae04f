//! Unit conversions. Files carry cm⁻¹, Å, K and ps⁻¹; dynamics run in
//! angular frequency ps⁻¹ with ħ = 1.

/// 2πc in ps⁻¹ per cm⁻¹.
pub const ANGULAR_PER_WAVENUMBER: f64 = 0.188_365_156_7;

/// Boltzmann constant in cm⁻¹ per K.
pub const BOLTZMANN_WAVENUMBER: f64 = 0.695_034_76;

#[inline]
pub fn wavenumber_to_angular(cm1: f64) -> f64 {
    cm1 * ANGULAR_PER_WAVENUMBER
}

#[inline]
pub fn angular_to_wavenumber(omega: f64) -> f64 {
    omega / ANGULAR_PER_WAVENUMBER
}

/// k_B T in cm⁻¹.
#[inline]
pub fn thermal_energy(temperature: f64) -> f64 {
    BOLTZMANN_WAVENUMBER * temperature
}
