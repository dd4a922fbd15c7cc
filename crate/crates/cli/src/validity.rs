//! Quasistatic and Born-Markov validity checks of a scenario.

use serde::Serialize;
use surfnoise::constants::{C_LIGHT, HBAR, K_B};
use surfnoise::greens::SurfaceGeometry;
use surfnoise::materials::DielectricModel;

use crate::config::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SlowParticle,
    Resonant,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub quasistatic_ok: bool,
    /// `(sqrt|eps_s| d_s + d) w0 / c`.
    pub retardation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skin_depth: Option<f64>,
    pub markov_ok: bool,
    /// Surface correlation time `max(hbar / k_B T, gamma_n / w_n^2)` in s.
    pub correlation_time: f64,
    /// Correlation time times the particle relaxation rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov_ratio: Option<f64>,
    pub regime: Regime,
    pub notes: Vec<String>,
}

fn drude_parts(model: &DielectricModel) -> Option<(f64, f64)> {
    match model {
        DielectricModel::DrudeMetal(m) => Some((m.omega_p, m.gamma)),
        DielectricModel::Superconductor(s) if !s.is_superconducting() => Some((s.omega_p, s.gamma)),
        _ => None,
    }
}

/// Longest correlation time of the dielectric response and the thermal time `hbar / k_B T`.
pub fn correlation_time(geometry: &SurfaceGeometry) -> f64 {
    let thermal = if geometry.temperature > 0.0 { HBAR / (K_B * geometry.temperature) } else { 0.0 };
    geometry
        .models()
        .iter()
        .filter_map(|m| match m {
            DielectricModel::DrudeLorentz(dl) => Some(dl.correlation_time()),
            _ => None,
        })
        .fold(thermal, f64::max)
}

/// Checks a particle at `height` moving at `omega_0` (zero when slow) and
/// relaxing at `relaxation_rate` when known.
pub fn check_validity(
    geometry: &SurfaceGeometry,
    height: f64,
    omega_0: f64,
    relaxation_rate: Option<f64>,
    thresholds: &Thresholds,
) -> ValidityReport {
    let mut notes = Vec::new();
    let trivial = geometry.models().iter().all(|m| matches!(m, DielectricModel::Vacuum));
    if trivial {
        notes.push("vacuum surface: no coupling".to_string());
        return ValidityReport {
            quasistatic_ok: true,
            retardation: 0.0,
            skin_depth: None,
            markov_ok: true,
            correlation_time: 0.0,
            markov_ratio: relaxation_rate.map(|_| 0.0),
            regime: Regime::SlowParticle,
            notes,
        };
    }

    let layer_depth = match geometry.layer() {
        Some((model, d)) => {
            let eps = if omega_0 > 0.0 { model.permittivity(omega_0).ok() } else { None };
            eps.map_or(1.0, |e| e.norm().sqrt()) * d
        }
        None => 0.0,
    };
    let retardation = (layer_depth + height) * omega_0 / C_LIGHT;
    let mut quasistatic_ok = retardation < thresholds.retardation;
    if !quasistatic_ok {
        notes.push(format!("retardation parameter {retardation:.3e} exceeds {}", thresholds.retardation));
    }
    let skin_depth = match drude_parts(geometry.bulk()) {
        Some((wp, g)) if omega_0 > 0.0 => Some((g * C_LIGHT * C_LIGHT / (omega_0 * wp * wp)).sqrt()),
        _ => None,
    };
    if let Some(delta) = skin_depth {
        if height > delta {
            quasistatic_ok = false;
            notes.push(format!("height {height:.3e} m exceeds the skin depth {delta:.3e} m"));
        }
    }

    let tau = correlation_time(geometry);
    let markov_ratio = relaxation_rate.map(|g| g * tau);
    let markov_ok = markov_ratio.is_none_or(|r| r < thresholds.markov);
    if !markov_ok {
        notes.push(format!("relaxation is not slow compared with the surface correlation time ({tau:.3e} s)"));
    }

    let regime = if omega_0 * tau < thresholds.markov {
        Regime::SlowParticle
    } else if relaxation_rate.is_none_or(|g| g < thresholds.markov * omega_0) && markov_ok {
        Regime::Resonant
    } else {
        Regime::Neither
    };
    if regime == Regime::Neither {
        notes.push("neither the slow-particle nor the resonant limit applies; results are indicative only".to_string());
    }
    ValidityReport { quasistatic_ok, retardation, skin_depth, markov_ok, correlation_time: tau, markov_ratio, regime, notes }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use surfnoise::materials::{DrudeLorentzModel, DrudeMetal, Resonance};

    use super::*;

    fn fig2() -> DielectricModel {
        let mut r: Vec<_> = (1..=4).map(|n| Resonance::new(2e-5, 10f64.powi(6 + n), 10f64.powi(8 + n))).collect();
        r.push(Resonance::new(2.0, 1e13, 1e12));
        DielectricModel::DrudeLorentz(DrudeLorentzModel::new(r).unwrap())
    }

    #[test]
    fn retardation_at_one_millimetre_and_thirty_gigahertz() {
        let geo = SurfaceGeometry::half_space(DielectricModel::Constant(surfnoise::C64::new(3.0, 0.1)), 4.0).unwrap();
        let r = check_validity(&geo, 1e-3, 2.0 * PI * 30e9, None, &Thresholds::default());
        assert!((r.retardation - 0.6).abs() < 0.05, "{}", r.retardation);
        assert!(!r.quasistatic_ok);
    }

    #[test]
    fn correlation_width_of_the_fig2_surface() {
        let geo = SurfaceGeometry::half_space(fig2(), 300.0).unwrap();
        let width = 1.0 / correlation_time(&geo);
        assert!((width - 1e5).abs() < 1e-6 * 1e5, "{width}");
    }

    #[test]
    fn vacuum_is_trivially_valid() {
        let geo = SurfaceGeometry::half_space(DielectricModel::Vacuum, 300.0).unwrap();
        let r = check_validity(&geo, 1e-6, 1e9, Some(1.0), &Thresholds::default());
        assert!(r.quasistatic_ok && r.markov_ok && r.regime == Regime::SlowParticle);
    }

    #[test]
    fn skin_depth_bounds_the_quasistatic_region() {
        let geo = SurfaceGeometry::half_space(DielectricModel::DrudeMetal(DrudeMetal::gold()), 300.0).unwrap();
        let near = check_validity(&geo, 1e-6, 2.0 * PI * 1e6, None, &Thresholds::default());
        assert!(near.quasistatic_ok);
        let far = check_validity(&geo, 1.0, 2.0 * PI * 1e9, None, &Thresholds::default());
        assert!(!far.quasistatic_ok && far.skin_depth.unwrap() < 1.0);
    }
}
