//! Decoherence by Thomson scattering of thermal photons.

use std::f64::consts::PI;

use crate::constants::{coulomb, C_LIGHT, HBAR, K_B};
use crate::quadrature::integrate;
use crate::Result;

/// Saturated rate `(q^2 / (4 pi eps0 c^3 m))^2 (8 pi / 9) (k_B T / hbar)^3`.
pub fn thomson_gamma_infinity(q: f64, mass: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let a = q * q * coulomb() / (C_LIGHT.powi(3) * mass);
    a * a * (8.0 * PI / 9.0) * (K_B * temperature / HBAR).powi(3)
}

/// `4/3 - 2 [(j0 - j1/x)^2 + 2 (j1/x)^2]` for the spherical Bessel functions `j0, j1`.
///
/// With `j0 = 1 + u` and `j1/x = 1/3 + v` this equals `-(8/3) u - 2 (u - v)^2 - 4 v^2`,
/// which avoids the cancellation at small `x` when `u, v` come from their series.
fn bracket(x: f64) -> f64 {
    let (u, v) = if x < 1.0 {
        let y = -0.5 * x * x;
        let (mut u, mut v) = (0.0, 0.0);
        let mut term = 1.0;
        let mut df0 = 1.0;
        for k in 1..30 {
            term *= y / k as f64;
            df0 *= (2 * k + 1) as f64;
            u += term / df0;
            v += term / (df0 * (2 * k + 3) as f64);
            if term.abs() < 1e-18 {
                break;
            }
        }
        (u, v)
    } else {
        let (s, c) = x.sin_cos();
        let j0 = s / x;
        (j0 - 1.0, (s / x - c) / (x * x) - 1.0 / 3.0)
    };
    let a = u - v;
    -(8.0 / 3.0) * u - 2.0 * a * a - 4.0 * v * v
}

/// Thomson decoherence rate for two branches separated by `separation`.
///
/// Integrates `(2 c k^2 / pi) n (n + 1) [bracket(k |R - R'|)]` over the photon
/// wavenumber, in the dimensionless variable `u = hbar c k / k_B T`.
pub fn thomson_rate(q: f64, mass: f64, temperature: f64, separation: f64) -> Result<f64> {
    if temperature <= 0.0 || separation == 0.0 {
        return Ok(0.0);
    }
    let a = q * q * coulomb() / (C_LIGHT * C_LIGHT * mass);
    let kt = K_B * temperature / (HBAR * C_LIGHT);
    let scale = separation.abs() * kt;
    let integrand = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let sh = (0.5 * u).sinh();
        u * u / (4.0 * sh * sh) * bracket(u * scale)
    };
    let u_max = 80.0;
    let width = (0.5 * PI / scale).min(1.0);
    let panels = (u_max / width).ceil() as usize;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = i as f64 * width;
        let hi = ((i + 1) as f64 * width).min(u_max);
        total += integrate(integrand, lo, hi, 1e-300, 1e-12, 200)?.value;
    }
    Ok(a * a * (2.0 * C_LIGHT / PI) * kt.powi(3) * total)
}
