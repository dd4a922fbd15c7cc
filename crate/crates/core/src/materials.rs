//! Dielectric response models, Bose statistics and loss functions.

use crate::constants::{C_LIGHT, EPSILON_0, HBAR, K_B};
use crate::{Error, Result, C64};

/// One Lorentz oscillator of a Drude-Lorentz sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Dimensionless oscillator strength `f_n`.
    pub strength: f64,
    /// Resonance frequency `omega_n` in rad/s.
    pub omega: f64,
    /// Damping rate `gamma_n` in rad/s.
    pub gamma: f64,
}

impl Resonance {
    pub fn new(strength: f64, omega: f64, gamma: f64) -> Self {
        Self { strength, omega, gamma }
    }
}

/// Sum of Drude-Lorentz oscillators,
/// `eps(w) = 1 + sum_n f_n w_n^2 / (w_n^2 - w^2 - i gamma_n w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrudeLorentzModel {
    resonances: Vec<Resonance>,
}

impl DrudeLorentzModel {
    pub fn new(resonances: Vec<Resonance>) -> Result<Self> {
        for (n, r) in resonances.iter().enumerate() {
            if !(r.omega.is_finite() && r.omega > 0.0) {
                return Err(Error::InvalidModel(format!("resonance {n}: omega must be > 0")));
            }
            if !(r.gamma.is_finite() && r.gamma > 0.0) {
                return Err(Error::InvalidModel(format!("resonance {n}: gamma must be > 0")));
            }
            if !r.strength.is_finite() {
                return Err(Error::InvalidModel(format!("resonance {n}: strength is not finite")));
            }
            if r.strength <= 0.0 {
                log::warn!("resonance {n} has non-positive strength {}", r.strength);
            }
        }
        Ok(Self { resonances })
    }

    /// Single-oscillator model.
    pub fn single(strength: f64, omega: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![Resonance::new(strength, omega, gamma)])
    }

    pub fn resonances(&self) -> &[Resonance] {
        &self.resonances
    }

    pub fn permittivity(&self, omega: f64) -> C64 {
        let mut eps = C64::new(1.0, 0.0);
        for r in &self.resonances {
            let w2 = r.omega * r.omega;
            eps += r.strength * w2 / C64::new(w2 - omega * omega, -r.gamma * omega);
        }
        eps
    }

    /// `1 + sum f_n`.
    pub fn static_permittivity(&self) -> f64 {
        1.0 + self.resonances.iter().map(|r| r.strength).sum::<f64>()
    }

    /// `sum f_n gamma_n / omega_n^2` in seconds, the slope of `Im eps` at zero frequency.
    pub fn static_loss_sum(&self) -> f64 {
        self.resonances.iter().map(|r| r.strength * r.gamma / (r.omega * r.omega)).sum()
    }

    /// Longest relaxation time `max gamma_n / omega_n^2` of the oscillators, in seconds.
    pub fn correlation_time(&self) -> f64 {
        self.resonances.iter().map(|r| r.gamma / (r.omega * r.omega)).fold(0.0, f64::max)
    }
}

/// Free-electron metal, `eps(w) = 1 - w_p^2 / (w^2 + i gamma w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeMetal {
    pub omega_p: f64,
    pub gamma: f64,
}

impl DrudeMetal {
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p > 0.0) {
            return Err(Error::InvalidModel("plasma frequency must be > 0".into()));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidModel("damping rate must be >= 0".into()));
        }
        Ok(Self { omega_p, gamma })
    }

    /// Literature-style parameters for gold. These are not taken from the
    /// reference calculations and only serve as defaults.
    pub fn gold() -> Self {
        Self { omega_p: 1.37e16, gamma: 4.05e13 }
    }

    pub fn permittivity(&self, omega: f64) -> Result<C64> {
        if omega == 0.0 {
            return Err(Error::StaticDivergence("Drude metal at omega = 0".into()));
        }
        Ok(1.0 - self.omega_p * self.omega_p / C64::new(omega * omega, self.gamma * omega))
    }

    /// Skin depth `delta` with `delta^2 = gamma c^2 / (omega omega_p^2)`.
    pub fn skin_depth(&self, omega: f64) -> f64 {
        (self.gamma * C_LIGHT * C_LIGHT / (omega * self.omega_p * self.omega_p)).sqrt()
    }
}

/// Two-fluid superconductor: a Drude part weighted by `(T/T_c)^4` and a
/// lossless superfluid part weighted by `1 - (T/T_c)^4`.
///
/// At `T >= T_c` the model evaluates as the normal Drude metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superconductor {
    pub omega_p: f64,
    pub gamma: f64,
    /// Critical temperature in K.
    pub critical_temperature: f64,
    /// London parameter `Lambda_0` in H m.
    pub lambda0: f64,
    /// Temperature of the superconductor in K.
    pub temperature: f64,
}

impl Superconductor {
    pub fn new(
        omega_p: f64,
        gamma: f64,
        critical_temperature: f64,
        lambda0: f64,
        temperature: f64,
    ) -> Result<Self> {
        DrudeMetal::new(omega_p, gamma)?;
        if !(critical_temperature.is_finite() && critical_temperature > 0.0) {
            return Err(Error::InvalidModel("critical temperature must be > 0".into()));
        }
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::InvalidModel("London parameter must be > 0".into()));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidModel("temperature must be >= 0".into()));
        }
        Ok(Self { omega_p, gamma, critical_temperature, lambda0, temperature })
    }

    /// Normal-fluid weight `(T/T_c)^4`, clamped to 1 above `T_c`.
    pub fn normal_fraction(&self) -> f64 {
        (self.temperature / self.critical_temperature).powi(4).min(1.0)
    }

    pub fn is_superconducting(&self) -> bool {
        self.temperature < self.critical_temperature
    }

    pub fn normal_metal(&self) -> DrudeMetal {
        DrudeMetal { omega_p: self.omega_p, gamma: self.gamma }
    }

    pub fn permittivity(&self, omega: f64) -> Result<C64> {
        if omega == 0.0 {
            return Err(Error::StaticDivergence("superconductor at omega = 0".into()));
        }
        let x = self.normal_fraction();
        let drude = self.omega_p * self.omega_p / C64::new(omega * omega, self.gamma * omega);
        let superfluid = (1.0 - x) / (omega * omega * self.lambda0 * EPSILON_0);
        Ok(1.0 - drude * x - superfluid)
    }
}

/// Measured permittivity samples, interpolated linearly in `log omega`
/// (real and imaginary parts separately). Extrapolation is refused.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedResponse {
    omegas: Vec<f64>,
    values: Vec<C64>,
}

impl TabulatedResponse {
    pub fn new(samples: Vec<(f64, C64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidModel("tabulated response needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidModel("sample frequencies must increase strictly".into()));
            }
        }
        for &(omega, eps) in &samples {
            if !(omega.is_finite() && omega > 0.0) {
                return Err(Error::InvalidModel("sample frequencies must be > 0".into()));
            }
            if !(eps.re.is_finite() && eps.im.is_finite()) || eps.im < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "sample at omega = {omega} must be finite with Im eps >= 0"
                )));
            }
        }
        let (omegas, values) = samples.into_iter().unzip();
        Ok(Self { omegas, values })
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.omegas.iter().copied().zip(self.values.iter().copied())
    }

    pub fn span(&self) -> (f64, f64) {
        (self.omegas[0], self.omegas[self.omegas.len() - 1])
    }

    pub fn permittivity(&self, omega: f64) -> Result<C64> {
        let (lo, hi) = self.span();
        if !(omega >= lo && omega <= hi) {
            return Err(Error::OutOfRange(format!(
                "omega = {omega} outside tabulated span [{lo}, {hi}]"
            )));
        }
        let i = self.omegas.partition_point(|&w| w <= omega).clamp(1, self.omegas.len() - 1);
        let (w0, w1) = (self.omegas[i - 1], self.omegas[i]);
        let t = (omega / w0).ln() / (w1 / w0).ln();
        Ok(self.values[i - 1] * (1.0 - t) + self.values[i] * t)
    }
}

/// Dielectric response of one region of the surface.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    /// Frequency-independent permittivity.
    Constant(C64),
    DrudeLorentz(DrudeLorentzModel),
    DrudeMetal(DrudeMetal),
    Superconductor(Superconductor),
    Tabulated(TabulatedResponse),
}

/// Low-frequency form `1/eps(w) = u0 + i w u1 + O(w^2)` of the inverse permittivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticInverse {
    pub u0: f64,
    pub u1: f64,
}

impl DielectricModel {
    pub fn permittivity(&self, omega: f64) -> Result<C64> {
        if !omega.is_finite() {
            return Err(Error::OutOfRange(format!("omega = {omega}")));
        }
        match self {
            Self::Vacuum => Ok(C64::new(1.0, 0.0)),
            Self::Constant(eps) => Ok(*eps),
            Self::DrudeLorentz(m) => Ok(m.permittivity(omega)),
            Self::DrudeMetal(m) => m.permittivity(omega),
            Self::Superconductor(m) => m.permittivity(omega),
            Self::Tabulated(m) => m.permittivity(omega),
        }
    }

    /// Inverse permittivity `1/eps(w)`. Metals and superconductors are
    /// evaluated in a form that stays finite for large `|eps|`.
    pub fn inverse_permittivity(&self, omega: f64) -> Result<C64> {
        Ok(1.0 / self.permittivity(omega)?)
    }

    /// True if `Im eps(w) = 0` for all `w > 0`.
    pub fn is_lossless(&self) -> bool {
        match self {
            Self::Vacuum => true,
            Self::Constant(eps) => eps.im == 0.0,
            Self::DrudeLorentz(m) => m.resonances().iter().all(|r| r.strength == 0.0),
            Self::DrudeMetal(m) => m.gamma == 0.0,
            Self::Superconductor(m) => m.gamma == 0.0 || m.normal_fraction() == 0.0,
            Self::Tabulated(m) => m.samples().all(|(_, e)| e.im == 0.0),
        }
    }

    /// Leading low-frequency behaviour of `1/eps`.
    pub fn static_inverse(&self) -> Result<StaticInverse> {
        match self {
            Self::Vacuum => Ok(StaticInverse { u0: 1.0, u1: 0.0 }),
            Self::Constant(eps) => {
                if eps.im != 0.0 {
                    return Err(Error::UnsupportedStaticLimit(
                        "constant permittivity with Im eps != 0 has no zero-frequency limit".into(),
                    ));
                }
                Ok(StaticInverse { u0: 1.0 / eps.re, u1: 0.0 })
            }
            Self::DrudeLorentz(m) => {
                let e0 = m.static_permittivity();
                if e0 == 0.0 {
                    return Err(Error::StaticDivergence("static permittivity is zero".into()));
                }
                Ok(StaticInverse { u0: 1.0 / e0, u1: -m.static_loss_sum() / (e0 * e0) })
            }
            Self::DrudeMetal(m) => {
                Ok(StaticInverse { u0: 0.0, u1: -m.gamma / (m.omega_p * m.omega_p) })
            }
            Self::Superconductor(m) => {
                if m.is_superconducting() {
                    Ok(StaticInverse { u0: 0.0, u1: 0.0 })
                } else {
                    Self::DrudeMetal(m.normal_metal()).static_inverse()
                }
            }
            Self::Tabulated(_) => Err(Error::UnsupportedStaticLimit(
                "tabulated data has no closed-form zero-frequency limit".into(),
            )),
        }
    }
}

/// Free function form of [`DielectricModel::permittivity`].
pub fn eval_permittivity(model: &DielectricModel, omega: f64) -> Result<C64> {
    model.permittivity(omega)
}

/// Bose-Einstein occupation `1/(exp(hbar w / k_B T) - 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Energy loss function `Im eps / |eps|^2`.
pub fn energy_loss(model: &DielectricModel, omega: f64) -> Result<f64> {
    Ok(-model.inverse_permittivity(omega)?.im)
}

/// Thermal loss function `n(w) Im eps / |eps|^2`.
pub fn thermal_loss(model: &DielectricModel, omega: f64, temperature: f64) -> Result<f64> {
    let n = bose_occupation(omega, temperature);
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(n * energy_loss(model, omega)?)
}

/// `sum f_n gamma_n / omega_n^2` of a Drude-Lorentz model.
pub fn static_loss_sum(model: &DrudeLorentzModel) -> f64 {
    model.static_loss_sum()
}
