//! Layered geometry: vacuum for `z > 0`, a layer for `-d_s < z <= 0`, bulk below.

use crate::constants::coulomb;
use crate::quadrature::{integrate_oscillatory_tail_complex, TailSettings};
use crate::{Error, Result, Vec3, C64};

/// Reflection ratios of the two interfaces, both written with inverse permittivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interfaces {
    /// `(eps_s - eps_b)/(eps_s + eps_b)`.
    pub xi_b: C64,
    /// `(eps_s - 1)/(eps_s + 1)`.
    pub xi_v: C64,
}

impl Interfaces {
    /// From the inverse permittivities `u_s = 1/eps_s` and `u_b = 1/eps_b`.
    pub fn from_inverse(us: C64, ub: C64) -> Self {
        Self { xi_b: (ub - us) / (ub + us), xi_v: (1.0 - us) / (1.0 + us) }
    }
}

/// The ten coefficients `c_1 .. c_10` of the layered Green function at wavenumber `k`.
pub fn coefficients(k: f64, thickness: f64, iface: Interfaces) -> [C64; 10] {
    let Interfaces { xi_b: b, xi_v: v } = iface;
    let e = C64::new((-2.0 * k * thickness).exp(), 0.0);
    let d = 1.0 - b * v * e;
    let one = C64::new(1.0, 0.0);
    let e_inv = (2.0 * k * thickness).exp();
    [
        (b * e - v) / d,
        (one - v) / d,
        (one - v) * b * e / d,
        (one - v) * (one + b) / d,
        v * b * e / d,
        v / d,
        b * e / d,
        (one + b) / d,
        (one + b) * v / d,
        (v - b * e_inv) / d,
    ]
}

/// Region of a point in the layered geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Vacuum,
    Layer,
    Bulk,
}

pub fn region(z: f64, thickness: f64) -> Region {
    if z > 0.0 {
        Region::Vacuum
    } else if z >= -thickness {
        Region::Layer
    } else {
        Region::Bulk
    }
}

/// Coefficient of one exponential, with all explicit `exp(-2 k d_s)` factors
/// moved into the exponent so that it stays bounded as `k -> inf`.
#[derive(Debug, Clone, Copy)]
enum Coef {
    One,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10Vacuum,
    C10Layer,
}

impl Coef {
    fn eval(self, k: f64, thickness: f64, i: Interfaces) -> C64 {
        let (b, v) = (i.xi_b, i.xi_v);
        let one = C64::new(1.0, 0.0);
        let e = (-2.0 * k * thickness).exp();
        let d = 1.0 - b * v * e;
        match self {
            Coef::One => one,
            Coef::C1 => (b * e - v) / d,
            Coef::C2 => (one - v) / d,
            Coef::C3 => (one - v) * b / d,
            Coef::C4 => (one - v) * (one + b) / d,
            Coef::C5 => v * b / d,
            Coef::C6 => v / d,
            Coef::C7 => b / d,
            Coef::C8 => (one + b) / d,
            Coef::C9 => (one + b) * v / d,
            Coef::C10Vacuum => v / d,
            Coef::C10Layer => -b / d,
        }
    }

    fn limit(self, i: Interfaces) -> C64 {
        self.eval(f64::INFINITY, 1.0, i)
    }
}

/// Terms `(coefficient, decay length alpha)` of `g_k` for the given point placement,
/// together with the overall prefactor (`1`, `1/eps_s` or `1/eps_b`).
fn terms(z: f64, zp: f64, d: f64, us: C64, ub: C64) -> (C64, Vec<(Coef, f64)>) {
    use Region::*;
    let one = C64::new(1.0, 0.0);
    match (region(z, d), region(zp, d)) {
        (Vacuum, Vacuum) => (one, vec![(Coef::One, (z - zp).abs()), (Coef::C1, z + zp)]),
        (Layer, Vacuum) => (one, vec![(Coef::C2, zp - z), (Coef::C3, z + zp + 2.0 * d)]),
        (Vacuum, Layer) => (one, vec![(Coef::C2, z - zp), (Coef::C3, z + zp + 2.0 * d)]),
        (Bulk, Vacuum) => (one, vec![(Coef::C4, zp - z)]),
        (Vacuum, Bulk) => (one, vec![(Coef::C4, z - zp)]),
        (Layer, Layer) => (
            us,
            vec![
                (Coef::One, (z - zp).abs()),
                (Coef::C5, 2.0 * d - z + zp),
                (Coef::C6, -(z + zp)),
                (Coef::C5, 2.0 * d + z - zp),
                (Coef::C7, 2.0 * d + z + zp),
            ],
        ),
        (Bulk, Layer) => (us, vec![(Coef::C8, zp - z), (Coef::C9, -(z + zp))]),
        (Layer, Bulk) => (us, vec![(Coef::C8, z - zp), (Coef::C9, -(z + zp))]),
        (Bulk, Bulk) => (
            ub,
            vec![
                (Coef::One, (z - zp).abs()),
                (Coef::C10Vacuum, -(z + zp)),
                (Coef::C10Layer, -(z + zp) - 2.0 * d),
            ],
        ),
    }
}

/// Full layered Green function for arbitrary placement of both points.
///
/// Each term of `g_k` is split into its `k -> inf` limit, integrated in
/// closed form with `int exp(-k alpha) J_0(k rho) dk = 1/sqrt(alpha^2 + rho^2)`,
/// and a remainder proportional to `exp(-2 k d_s)` that is integrated numerically.
pub fn green_full(
    r: &Vec3,
    rp: &Vec3,
    thickness: f64,
    us: C64,
    ub: C64,
    settings: TailSettings,
) -> Result<C64> {
    if r == rp {
        return Err(Error::CoincidentPoints);
    }
    let iface = Interfaces::from_inverse(us, ub);
    let rho = ((r.x - rp.x).powi(2) + (r.y - rp.y).powi(2)).sqrt();
    let (prefactor, list) = terms(r.z, rp.z, thickness, us, ub);
    let mut analytic = C64::new(0.0, 0.0);
    for &(c, alpha) in &list {
        analytic += c.limit(iface) / (alpha * alpha + rho * rho).sqrt();
    }
    let settings = TailSettings { abs_tol: settings.abs_tol.max(1e-2 * settings.rel_tol * analytic.norm()), ..settings };
    let decay = list.iter().map(|t| t.1).fold(f64::INFINITY, f64::min) + 2.0 * thickness;
    let remainder = integrate_oscillatory_tail_complex(
        |k| {
            let j0 = puruspe::Jn(0, k * rho);
            let mut sum = C64::new(0.0, 0.0);
            for &(c, alpha) in &list {
                let delta = c.eval(k, thickness, iface) - c.limit(iface);
                if delta != C64::new(0.0, 0.0) {
                    sum += delta * (-k * alpha).exp();
                }
            }
            sum * j0
        },
        rho,
        decay,
        settings,
    )?;
    Ok(coulomb() * prefactor * (analytic + remainder))
}

/// `g_k(z, z')` itself, for checks against the boundary-value problem.
pub fn green_k(k: f64, z: f64, zp: f64, thickness: f64, us: C64, ub: C64) -> C64 {
    let iface = Interfaces::from_inverse(us, ub);
    let (prefactor, list) = terms(z, zp, thickness, us, ub);
    prefactor * list.iter().map(|&(c, alpha)| c.eval(k, thickness, iface) * (-k * alpha).exp()).sum::<C64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (C64, C64) {
        (1.0 / C64::new(3.0, 0.4), 1.0 / C64::new(-50.0, 20.0))
    }

    #[test]
    fn coefficient_limits() {
        let (us, ub) = sample();
        let i = Interfaces::from_inverse(us, ub);
        let c = coefficients(1e12, 1e-9, i);
        assert!((c[0] + i.xi_v).norm() < 1e-14);
        let same = Interfaces::from_inverse(us, us);
        let c = coefficients(1e7, 5e-9, same);
        assert!((c[0] + same.xi_v).norm() < 1e-15);
        assert_eq!(c[6], C64::new(0.0, 0.0));
        assert_eq!(c[4], C64::new(0.0, 0.0));
        let eb = 1.0 / ub;
        let half = (1.0 - eb) / (1.0 + eb);
        assert!((coefficients(1e7, 5e-9, same)[0] - (1.0 - 1.0 / us) / (1.0 + 1.0 / us)).norm() < 1e-14);
        let vac = Interfaces::from_inverse(C64::new(1.0, 0.0), ub);
        let (k, d): (f64, f64) = (2e7, 3e-9);
        let c = coefficients(k, d, vac);
        assert_eq!(vac.xi_v, C64::new(0.0, 0.0));
        assert!((c[0] - vac.xi_b * (-2.0 * k * d).exp()).norm() < 1e-15);
        let zero = coefficients(0.0, d, i)[0];
        assert!((zero - half).norm() < 1e-13);
    }

    #[test]
    fn geometric_series_of_multiple_reflections() {
        let (us, ub) = sample();
        let i = Interfaces::from_inverse(us, ub);
        let (k, d): (f64, f64) = (1e7, 2e-8);
        let x = i.xi_b * i.xi_v * (-2.0 * k * d).exp();
        assert!(x.norm() < 0.5);
        let mut series = C64::new(0.0, 0.0);
        let mut p = C64::new(1.0, 0.0);
        for _ in 0..40 {
            series += p;
            p *= x;
        }
        let direct = coefficients(k, d, i);
        let e = (-2.0 * k * d).exp();
        let via_series = (i.xi_b * e - i.xi_v) * series;
        assert!((direct[0] - via_series).norm() < 1e-10 * direct[0].norm());
        let mut ten = C64::new(0.0, 0.0);
        let mut p = C64::new(1.0, 0.0);
        for _ in 0..10 {
            ten += p;
            p *= x;
        }
        let tol = x.norm().powi(10) / (1.0 - x.norm());
        assert!(((i.xi_b * e - i.xi_v) * ten - direct[0]).norm() <= tol * 2.0 + 1e-15);
    }
}
