//! Slow-particle decoherence rates of rigid charge distributions, the two-ion
//! orientation scan and Thomson scattering of thermal radiation.

mod charge;
mod thomson;

pub use charge::{body_axis, ChargeDistribution, Pose, SuperpositionPair, Term};
pub use thomson::{thomson_gamma_infinity, thomson_rate};

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::constants::HBAR;
use crate::greens::FluctuationKernel;
use crate::{Error, Result, Vec3};

/// `(1/hbar) sum_{t,u} w_t w_u D_t D'_u h(r_t, r_u)` over a signed list of terms.
fn quadratic_form(terms: &[Term], kernel: &FluctuationKernel) -> Result<f64> {
    for t in terms {
        if !(t.position.z > 0.0) {
            return Err(Error::SiteBelowSurface(t.position.z));
        }
    }
    let mut total = 0.0;
    let mut magnitude = 0.0;
    for (i, a) in terms.iter().enumerate() {
        for (j, b) in terms.iter().enumerate().skip(i) {
            let k = kernel.static_kernel_directional(&a.position, &b.position, &a.dirs, &b.dirs)?;
            let factor = if i == j { 1.0 } else { 2.0 };
            let c = factor * a.weight * b.weight * k;
            total += c;
            magnitude += c.abs();
        }
    }
    if total < 0.0 && total.abs() <= 1e-12 * magnitude {
        total = 0.0;
    }
    Ok(total / HBAR)
}

/// Decoherence rate between the two poses of a superposition, in 1/s.
pub fn decoherence_rate(dist: &ChargeDistribution, pair: &SuperpositionPair, kernel: &FluctuationKernel) -> Result<f64> {
    dist.validate()?;
    let mut terms = dist.terms(&pair.pose_a);
    for p in [&pair.pose_a, &pair.pose_b] {
        if let Some(t) = dist.terms(p).iter().find(|t| !(t.position.z > 0.0)) {
            return Err(Error::SiteBelowSurface(t.position.z));
        }
    }
    if pair.pose_a == pair.pose_b {
        return Ok(0.0);
    }
    terms.extend(dist.terms(&pair.pose_b).into_iter().map(|mut t| {
        t.weight = -t.weight;
        t
    }));
    quadratic_form(&terms, kernel)
}

/// Orientational decoherence of a point quadrupole `Q` at a fixed centre,
/// `(1/36 hbar) [d . dQ d][d' . dQ d'] h` with `dQ = Q_a - Q_b`.
pub fn quadrupole_orientational_rate(
    q: &Matrix3<f64>,
    orientations: ((f64, f64, f64), (f64, f64, f64)),
    r_cm: &Vec3,
    kernel: &FluctuationKernel,
) -> Result<f64> {
    ChargeDistribution::PointQuadrupole { q: *q }.validate()?;
    if !(r_cm.z > 0.0) {
        return Err(Error::SiteBelowSurface(r_cm.z));
    }
    let ra = Pose::new(*r_cm, orientations.0).rotation();
    let rb = Pose::new(*r_cm, orientations.1).rotation();
    let dq = ra * q * ra.transpose() - rb * q * rb.transpose();
    if dq.norm() <= 1e-14 * q.norm() {
        return Ok(0.0);
    }
    quadratic_form(&charge::quadrupole_terms(&dq, r_cm, 1.0), kernel)
}

/// Orientation grid of a two-ion scan and the rates on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Azimuths `alpha_i = 2 pi i / n_alpha`.
    pub alphas: Vec<f64>,
    /// Polar angles `beta_j = pi j / (n_beta - 1)`.
    pub betas: Vec<f64>,
    /// Rates in 1/s, row-major in beta then alpha: index `j * n_alpha + i`.
    pub rates: Vec<f64>,
    pub gamma_max: f64,
}

impl ScanResult {
    pub fn rate(&self, i_alpha: usize, j_beta: usize) -> f64 {
        self.rates[j_beta * self.alphas.len() + i_alpha]
    }
}

/// Two ions of charge `q` at `R_cm +- (d_ion/2) n_3`, with `R_cm = height e3`:
/// decoherence between the fixed axis orientation and every grid orientation.
pub fn two_ion_scan(
    q: f64,
    d_ion: f64,
    height: f64,
    kernel: &FluctuationKernel,
    fixed: (f64, f64),
    grid: (usize, usize),
) -> Result<ScanResult> {
    let (n_alpha, n_beta) = grid;
    if n_alpha < 1 || n_beta < 2 {
        return Err(Error::InvalidArgument("scan grid needs n_alpha >= 1 and n_beta >= 2".into()));
    }
    if !(height > 0.5 * d_ion) {
        return Err(Error::SiteBelowSurface(height - 0.5 * d_ion));
    }
    let dist = ChargeDistribution::PointCharges(vec![
        (q, Vec3::new(0.0, 0.0, 0.5 * d_ion)),
        (q, Vec3::new(0.0, 0.0, -0.5 * d_ion)),
    ]);
    let center = Vec3::new(0.0, 0.0, height);
    let fixed_pose = Pose::new(center, (fixed.0, fixed.1, 0.0));
    let alphas: Vec<f64> = (0..n_alpha).map(|i| 2.0 * std::f64::consts::PI * i as f64 / n_alpha as f64).collect();
    let betas: Vec<f64> = (0..n_beta).map(|j| std::f64::consts::PI * j as f64 / (n_beta - 1) as f64).collect();
    let rows: Vec<Vec<f64>> = betas
        .par_iter()
        .map(|&b| {
            alphas
                .iter()
                .map(|&a| {
                    let pair = SuperpositionPair::new(fixed_pose, Pose::new(center, (a, b, 0.0)));
                    decoherence_rate(&dist, &pair, kernel)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rates: Vec<f64> = rows.into_iter().flatten().collect();
    let gamma_max = rates.iter().copied().fold(0.0, f64::max);
    Ok(ScanResult { alphas, betas, rates, gamma_max })
}

/// Orientations `(alpha, beta)` visited when the body axis starting at `start`
/// is rotated once about `axis`, sampled at `n` points.
pub fn great_circle(start: (f64, f64), axis: &Vec3, n: usize) -> Vec<(f64, f64)> {
    let k = axis.normalize();
    let v = body_axis(start.0, start.1);
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let (s, c) = t.sin_cos();
            let w = v * c + k.cross(&v) * s + k * k.dot(&v) * (1.0 - c);
            let beta = w.z.clamp(-1.0, 1.0).acos();
            let alpha = w.y.atan2(w.x).rem_euclid(2.0 * std::f64::consts::PI);
            (alpha, beta)
        })
        .collect()
}
