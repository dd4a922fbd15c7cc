//! Electric-field noise spectra and monopole heating rates.
//!
//! The spectrum is the two-sided Fourier transform of the symmetrised field
//! autocorrelation, `S_ij(w) = -2 hbar (n(w) + 1/2) d_i d'_j Im g(r, r, w)`,
//! in (V/m)^2 s.

use nalgebra::Matrix3;

use crate::constants::HBAR;
use crate::greens::FluctuationKernel;
use crate::materials::bose_occupation;
use crate::{Error, Result, Vec3};

/// Frequency at which a spectrum is requested. The two cases use different
/// kernels: the static kernel `h` at zero frequency, `Im g` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    Static,
    Frequency(f64),
}

impl SpectralPoint {
    pub fn omega(&self) -> f64 {
        match self {
            Self::Static => 0.0,
            Self::Frequency(w) => *w,
        }
    }
}

/// Electric-field power spectral density tensor at one point and frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdTensor {
    /// Symmetric tensor in (V/m)^2 s.
    pub tensor: Matrix3<f64>,
    pub position: Vec3,
    /// Angular frequency in rad/s; zero for the static spectrum.
    pub omega: f64,
}

impl PsdTensor {
    pub fn trace(&self) -> f64 {
        self.tensor.trace()
    }

    /// `e . S e` for a direction `e`.
    pub fn project(&self, e: &Vec3) -> f64 {
        e.dot(&(self.tensor * e))
    }
}

fn axes() -> [Vec3; 3] {
    [Vec3::x(), Vec3::y(), Vec3::z()]
}

/// `d_i d'_j` of the static kernel at `r = r' = r0`.
pub fn static_hessian(kernel: &FluctuationKernel, r0: &Vec3) -> Result<Matrix3<f64>> {
    let e = axes();
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = kernel.static_kernel_directional(r0, r0, &[e[i]], &[e[j]])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// `-d_i d'_j Im g(r0, r0, w)`, the resonant kernel matrix.
pub fn resonant_hessian(kernel: &FluctuationKernel, r0: &Vec3, omega: f64) -> Result<Matrix3<f64>> {
    let e = axes();
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = -kernel.im_green_directional(r0, r0, omega, &[e[i]], &[e[j]])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Field noise tensor at `r0`. With `zero_point = false` the vacuum
/// contribution `1/2` is dropped from `n + 1/2`, leaving the thermal part.
pub fn psd_e(kernel: &FluctuationKernel, r0: &Vec3, point: SpectralPoint, zero_point: bool) -> Result<PsdTensor> {
    let tensor = match point {
        SpectralPoint::Static => 2.0 * HBAR * static_hessian(kernel, r0)?,
        SpectralPoint::Frequency(w) => {
            let n = bose_occupation(w, kernel.temperature()) + if zero_point { 0.5 } else { 0.0 };
            2.0 * HBAR * n * resonant_hessian(kernel, r0, w)?
        }
    };
    Ok(PsdTensor { tensor, position: *r0, omega: point.omega() })
}

/// Log-log least-squares slope of `y` against `x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Power-law exponent of `trace S(d)` for heights `d` log-spaced over `d_range`.
pub fn fit_distance_exponent(
    kernel: &FluctuationKernel,
    point: SpectralPoint,
    d_range: (f64, f64),
    n_points: usize,
) -> Result<f64> {
    let (lo, hi) = d_range;
    if n_points < 4 {
        return Err(Error::RangeTooNarrow(format!("{n_points} points, need at least 4")));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::RangeTooNarrow(format!("range [{lo:e}, {hi:e}] m")));
    }
    let mut ds = Vec::with_capacity(n_points);
    let mut traces = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let d = lo * (hi / lo).powf(i as f64 / (n_points - 1) as f64);
        let s = psd_e(kernel, &Vec3::new(0.0, 0.0, d), point, true)?;
        ds.push(d);
        traces.push(s.trace());
    }
    if traces.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("noise spectrum is not positive over the range".into()));
    }
    Ok(log_log_slope(&ds, &traces))
}

/// Ground-state heating of a charged harmonic oscillator mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingResult {
    /// `q^2 n(w0) h0 / (m w0)` in quanta per second.
    pub gamma_h: f64,
    /// High-temperature estimate `q^2 (e . S e) / (2 m hbar w0)`.
    pub gamma_h_psd: f64,
    /// Resonant kernel `h0 = -(e . d)(e . d') Im g` at the trap position.
    pub kernel: f64,
    pub omega_0: f64,
    pub direction: Vec3,
}

pub fn heating_rate_monopole(
    q: f64,
    mass: f64,
    omega_0: f64,
    direction: &Vec3,
    r_eq: &Vec3,
    kernel: &FluctuationKernel,
) -> Result<HeatingResult> {
    if !(omega_0 > 0.0) {
        return Err(Error::OutOfRange(format!("mode frequency must be > 0, got {omega_0}")));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument("mass must be > 0".into()));
    }
    let e = direction.normalize();
    let h0 = -kernel.im_green_directional(r_eq, r_eq, omega_0, &[e], &[e])?;
    let n = bose_occupation(omega_0, kernel.temperature());
    let s = psd_e(kernel, r_eq, SpectralPoint::Frequency(omega_0), true)?;
    Ok(HeatingResult {
        gamma_h: q * q * n * h0 / (mass * omega_0),
        gamma_h_psd: q * q * s.project(&e) / (2.0 * mass * HBAR * omega_0),
        kernel: h0,
        omega_0,
        direction: e,
    })
}
