//! Physical constants (CODATA 2018, SI).

use std::f64::consts::PI;

/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;
/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380649e-23;
/// Speed of light in m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Elementary charge in C.
pub const E_CHARGE: f64 = 1.602176634e-19;
/// Electron mass in kg.
pub const M_ELECTRON: f64 = 9.1093837015e-31;
/// Atomic mass unit in kg.
pub const AMU: f64 = 1.66053906660e-27;
/// Vacuum permeability in H/m.
pub const MU_0: f64 = 1.25663706212e-6;
/// One Debye in C m.
pub const DEBYE: f64 = 3.33564e-30;

/// Coulomb prefactor 1/(4 pi eps0) in m/F.
pub fn coulomb() -> f64 {
    1.0 / (4.0 * PI * EPSILON_0)
}

/// Named constant table, used by run manifests.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("epsilon_0", EPSILON_0),
        ("hbar", HBAR),
        ("k_B", K_B),
        ("c", C_LIGHT),
        ("e", E_CHARGE),
        ("m_e", M_ELECTRON),
        ("amu", AMU),
        ("mu_0", MU_0),
        ("debye", DEBYE),
    ]
}
