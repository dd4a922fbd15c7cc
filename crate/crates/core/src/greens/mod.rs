//! Quasistatic Green functions of planar surfaces, their imaginary parts, the
//! static surface-fluctuation kernel `h(r, r')` and directional derivatives.
//!
//! Internally every dielectric enters through its inverse permittivity
//! `u = 1/eps`, which stays finite for metals and superconductors.

pub mod derivatives;
pub mod layered;

use nalgebra::Matrix3;

use crate::constants::{coulomb, HBAR, K_B};
use crate::materials::{bose_occupation, DielectricModel};
use crate::quadrature::{integrate_oscillatory_tail, TailSettings};
use crate::{Error, Result, Vec3, C64};

use derivatives::{inverse_distance, SpectralDerivative};
use layered::Interfaces;

/// Planar surface structure below `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceStructure {
    HalfSpace { bulk: DielectricModel },
    Layered { layer: DielectricModel, thickness: f64, bulk: DielectricModel },
}

/// Surface structure together with its temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGeometry {
    pub structure: SurfaceStructure,
    /// Surface temperature in K.
    pub temperature: f64,
}

impl SurfaceGeometry {
    pub fn half_space(bulk: DielectricModel, temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        Ok(Self { structure: SurfaceStructure::HalfSpace { bulk }, temperature })
    }

    pub fn layered(layer: DielectricModel, thickness: f64, bulk: DielectricModel, temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(Error::InvalidArgument(format!("layer thickness must be > 0, got {thickness}")));
        }
        Ok(Self { structure: SurfaceStructure::Layered { layer, thickness, bulk }, temperature })
    }

    pub fn bulk(&self) -> &DielectricModel {
        match &self.structure {
            SurfaceStructure::HalfSpace { bulk } | SurfaceStructure::Layered { bulk, .. } => bulk,
        }
    }

    pub fn layer(&self) -> Option<(&DielectricModel, f64)> {
        match &self.structure {
            SurfaceStructure::HalfSpace { .. } => None,
            SurfaceStructure::Layered { layer, thickness, .. } => Some((layer, *thickness)),
        }
    }

    pub fn models(&self) -> Vec<&DielectricModel> {
        match &self.structure {
            SurfaceStructure::HalfSpace { bulk } => vec![bulk],
            SurfaceStructure::Layered { layer, bulk, .. } => vec![layer, bulk],
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.models().iter().all(|m| m.is_lossless())
    }

    fn inverse_at(&self, omega: f64) -> Result<(Option<C64>, C64)> {
        let ub = self.bulk().inverse_permittivity(omega)?;
        let us = match self.layer() {
            Some((layer, _)) => Some(layer.inverse_permittivity(omega)?),
            None => None,
        };
        Ok((us, ub))
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {t}")));
    }
    Ok(())
}

/// How `Im g` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelEvalMethod {
    /// Exact image formula of the half-space.
    ClosedForm,
    /// First order in `k d_s` for a thin layer.
    ThinLayerExpansion,
    /// Numerical Bessel integral over the exact layered reflection coefficient.
    FullBesselIntegral,
    /// Thin layer on a bulk that reflects like a perfect mirror.
    MirrorLimit,
}

impl KernelEvalMethod {
    pub fn default_for(geometry: &SurfaceGeometry) -> Self {
        match geometry.structure {
            SurfaceStructure::HalfSpace { .. } => Self::ClosedForm,
            SurfaceStructure::Layered { .. } => Self::ThinLayerExpansion,
        }
    }
}

/// The mirror tensor `M = 1 - 2 e3 e3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MirrorTensor;

impl MirrorTensor {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3::new(v.x, v.y, -v.z)
    }
}

/// Tuning knobs of the kernel evaluator.
#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    /// Minimum `|eps_b| / |eps_s|` for [`KernelEvalMethod::MirrorLimit`].
    pub mirror_ratio: f64,
    /// Minimum height in units of the layer thickness for the thin-layer forms.
    pub thin_layer_ratio: f64,
    pub tail: TailSettings,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { mirror_ratio: 50.0, thin_layer_ratio: 10.0, tail: TailSettings::default() }
    }
}

/// Highest number of directional derivatives per argument of the static kernel.
pub const MAX_STATIC_ORDER: usize = 2;
/// Highest number of directional derivatives per argument of `Im g`.
pub const MAX_RESONANT_ORDER: usize = 3;

/// `Im g` written as a combination of image terms.
#[derive(Debug, Clone, Copy)]
enum Repr {
    /// `mirror / |s| + normal * d/ds_z (1/|s|)` with `s = r - M r'`.
    Image { mirror: f64, normal: f64 },
    /// Full layered reflection coefficient, integrated over `k`.
    Integral { us: C64, ub: C64, thickness: f64, scale: f64 },
}

#[derive(Debug, Clone)]
enum StaticForm {
    Zero,
    /// `1/eps = u0 + i eta u1` so that `Im g / eta` is the slope at zero frequency.
    ComplexStep { us: Option<C64>, ub: C64, eta: f64 },
    /// `n(w) Im g` at three low tabulated frequencies, extrapolated to zero.
    Extrapolated { omegas: [f64; 3] },
    Unsupported(Error),
}

/// Evaluator for `Im g(r, r', w)`, `h(r, r')` and their directional derivatives
/// for points above the surface.
#[derive(Debug, Clone)]
pub struct FluctuationKernel {
    geometry: SurfaceGeometry,
    method: KernelEvalMethod,
    options: KernelOptions,
    static_form: StaticForm,
}

impl FluctuationKernel {
    pub fn new(geometry: &SurfaceGeometry, method: KernelEvalMethod) -> Result<Self> {
        Self::with_options(geometry, method, KernelOptions::default())
    }

    pub fn with_default_method(geometry: &SurfaceGeometry) -> Result<Self> {
        Self::new(geometry, KernelEvalMethod::default_for(geometry))
    }

    pub fn with_options(geometry: &SurfaceGeometry, method: KernelEvalMethod, options: KernelOptions) -> Result<Self> {
        match (&geometry.structure, method) {
            (SurfaceStructure::HalfSpace { .. }, KernelEvalMethod::ThinLayerExpansion | KernelEvalMethod::MirrorLimit) => {
                return Err(Error::MethodInvalid(format!("{method:?} requires a layered surface")));
            }
            (SurfaceStructure::Layered { .. }, KernelEvalMethod::ClosedForm) => {
                return Err(Error::MethodInvalid("the closed form applies to half-spaces only".into()));
            }
            _ => {}
        }
        let static_form = static_form(geometry);
        Ok(Self { geometry: geometry.clone(), method, options, static_form })
    }

    pub fn geometry(&self) -> &SurfaceGeometry {
        &self.geometry
    }

    pub fn method(&self) -> KernelEvalMethod {
        self.method
    }

    pub fn temperature(&self) -> f64 {
        self.geometry.temperature
    }

    /// `Im g(r, r', w)` in m/F.
    pub fn im_green(&self, r: &Vec3, rp: &Vec3, omega: f64) -> Result<f64> {
        self.im_green_directional(r, rp, omega, &[], &[])
    }

    /// `(a_1 . d_r) ... (b_1 . d_r') ... Im g(r, r', w)`.
    pub fn im_green_directional(&self, r: &Vec3, rp: &Vec3, omega: f64, left: &[Vec3], right: &[Vec3]) -> Result<f64> {
        check_points(r, rp)?;
        check_order(left, right, MAX_RESONANT_ORDER)?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::OutOfRange(format!("Im g needs omega > 0, got {omega}")));
        }
        let (us, ub) = self.geometry.inverse_at(omega)?;
        let repr = self.repr(us, ub, coulomb(), r.z.min(rp.z))?;
        self.evaluate(repr, r, rp, left, right)
    }

    /// Static kernel `h(r, r') = -lim_{w -> 0} n(w) Im g(r, r', w)`.
    pub fn static_kernel(&self, r: &Vec3, rp: &Vec3) -> Result<f64> {
        self.static_kernel_directional(r, rp, &[], &[])
    }

    /// Mixed directional derivative of `h(r, r')`, at most two per argument.
    pub fn static_kernel_directional(&self, r: &Vec3, rp: &Vec3, left: &[Vec3], right: &[Vec3]) -> Result<f64> {
        check_points(r, rp)?;
        check_order(left, right, MAX_STATIC_ORDER)?;
        let t = self.geometry.temperature;
        match &self.static_form {
            StaticForm::Zero => Ok(0.0),
            StaticForm::Unsupported(e) => Err(e.clone()),
            StaticForm::ComplexStep { us, ub, eta } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let scale = -coulomb() * K_B * t / (HBAR * eta);
                let repr = self.repr(*us, *ub, scale, r.z.min(rp.z))?;
                self.evaluate(repr, r, rp, left, right)
            }
            StaticForm::Extrapolated { omegas } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                log::warn!("static kernel extrapolated from tabulated data at {omegas:?} rad/s");
                let mut values = [0.0; 3];
                for (v, &w) in values.iter_mut().zip(omegas) {
                    let (us, ub) = self.geometry.inverse_at(w)?;
                    let repr = self.repr(us, ub, coulomb(), r.z.min(rp.z))?;
                    *v = bose_occupation(w, t) * self.evaluate(repr, r, rp, left, right)?;
                }
                Ok(-extrapolate_to_zero(omegas, &values))
            }
        }
    }

    fn repr(&self, us: Option<C64>, ub: C64, scale: f64, z_min: f64) -> Result<Repr> {
        let one = C64::new(1.0, 0.0);
        match (self.method, us, self.geometry.layer()) {
            (KernelEvalMethod::ClosedForm | KernelEvalMethod::FullBesselIntegral, None, _) => {
                Ok(Repr::Image { mirror: scale * ((ub - one) / (ub + one)).im, normal: 0.0 })
            }
            (KernelEvalMethod::ThinLayerExpansion, Some(us), Some((_, d))) => {
                self.check_thin(z_min, d)?;
                let a = (ub * ub - us * us) / (us * (one + ub) * (one + ub));
                Ok(Repr::Image { mirror: scale * 2.0 * (ub / (one + ub)).im, normal: scale * 2.0 * d * a.im })
            }
            (KernelEvalMethod::MirrorLimit, Some(us), Some((_, d))) => {
                self.check_thin(z_min, d)?;
                if us.norm() < self.options.mirror_ratio * ub.norm() {
                    return Err(Error::MethodInvalid(format!(
                        "mirror limit needs |eps_b| >= {} |eps_s|, found ratio {:.3e}",
                        self.options.mirror_ratio,
                        us.norm() / ub.norm()
                    )));
                }
                Ok(Repr::Image { mirror: scale * 2.0 * ub.im, normal: -scale * 2.0 * d * us.im })
            }
            (KernelEvalMethod::FullBesselIntegral, Some(us), Some((_, d))) => {
                Ok(Repr::Integral { us, ub, thickness: d, scale })
            }
            (m, _, _) => Err(Error::MethodInvalid(format!("{m:?} does not apply to this geometry"))),
        }
    }

    fn check_thin(&self, z_min: f64, d: f64) -> Result<()> {
        if z_min < self.options.thin_layer_ratio * d {
            return Err(Error::MethodInvalid(format!(
                "thin-layer forms need heights >= {} d_s; got z = {z_min:e} m with d_s = {d:e} m",
                self.options.thin_layer_ratio
            )));
        }
        Ok(())
    }

    fn evaluate(&self, repr: Repr, r: &Vec3, rp: &Vec3, left: &[Vec3], right: &[Vec3]) -> Result<f64> {
        let m = MirrorTensor;
        let s = r - m.apply(rp);
        let mut dirs: Vec<Vec3> = left.to_vec();
        dirs.extend(right.iter().map(|b| -m.apply(b)));
        match repr {
            Repr::Image { mirror, normal } => {
                let mut v = 0.0;
                if mirror != 0.0 {
                    v += mirror * inverse_distance(&s, &dirs);
                }
                if normal != 0.0 {
                    dirs.push(Vec3::z());
                    v += normal * inverse_distance(&s, &dirs);
                }
                Ok(v)
            }
            Repr::Integral { us, ub, thickness, scale } => {
                let iface = Interfaces::from_inverse(us, ub);
                let limit = -iface.xi_v;
                let mut v = 0.0;
                if limit.im != 0.0 {
                    v += limit.im * inverse_distance(&s, &dirs);
                }
                let spectral = SpectralDerivative::new(&s, &dirs);
                let size = limit.norm().max(iface.xi_b.norm()) * inverse_distance(&s, &dirs).abs();
                let tail = TailSettings { abs_tol: 1e-2 * self.options.tail.rel_tol * size, ..self.options.tail };
                let remainder = integrate_oscillatory_tail(
                    |k| {
                        let c1 = layered::coefficients(k, thickness, iface)[0];
                        let dc = (c1 - limit).im;
                        if dc == 0.0 {
                            0.0
                        } else {
                            dc * spectral.at(k, 0.0)
                        }
                    },
                    spectral.rho(),
                    s.z + 2.0 * thickness,
                    tail,
                )?;
                Ok(scale * (v + remainder))
            }
        }
    }
}

fn check_points(r: &Vec3, rp: &Vec3) -> Result<()> {
    for p in [r, rp] {
        if !(p.z > 0.0) || !p.iter().all(|c| c.is_finite()) {
            return Err(Error::OutOfRange(format!("point ({}, {}, {}) is not in the vacuum half-space", p.x, p.y, p.z)));
        }
    }
    Ok(())
}

fn check_order(left: &[Vec3], right: &[Vec3], max: usize) -> Result<()> {
    let n = left.len().max(right.len());
    if n > max {
        return Err(Error::OrderUnsupported(n));
    }
    Ok(())
}

fn static_form(geometry: &SurfaceGeometry) -> StaticForm {
    if geometry.is_lossless() {
        return StaticForm::Zero;
    }
    let models = geometry.models();
    if models.iter().any(|m| matches!(m, DielectricModel::Tabulated(_))) {
        return extrapolation_form(geometry);
    }
    let mut parts = Vec::new();
    for m in &models {
        match m.static_inverse() {
            Ok(s) => parts.push(s),
            Err(e) => return StaticForm::Unsupported(e),
        }
    }
    let max_u1 = parts.iter().map(|p| p.u1.abs()).fold(0.0, f64::max);
    if max_u1 == 0.0 {
        return StaticForm::Zero;
    }
    let eta = 1e-20 / max_u1;
    let u = |p: &crate::materials::StaticInverse| C64::new(p.u0, eta * p.u1);
    match geometry.structure {
        SurfaceStructure::HalfSpace { .. } => StaticForm::ComplexStep { us: None, ub: u(&parts[0]), eta },
        SurfaceStructure::Layered { .. } => StaticForm::ComplexStep { us: Some(u(&parts[0])), ub: u(&parts[1]), eta },
    }
}

fn extrapolation_form(geometry: &SurfaceGeometry) -> StaticForm {
    let mut candidates: Vec<f64> = geometry
        .models()
        .iter()
        .filter_map(|m| match m {
            DielectricModel::Tabulated(t) => Some(t.samples().map(|(w, _)| w).collect::<Vec<_>>()),
            _ => None,
        })
        .flatten()
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let usable: Vec<f64> = candidates.into_iter().filter(|&w| geometry.inverse_at(w).is_ok()).take(3).collect();
    if usable.len() < 3 {
        return StaticForm::Unsupported(Error::UnsupportedStaticLimit(
            "fewer than three tabulated frequencies available for extrapolation".into(),
        ));
    }
    let t = geometry.temperature;
    if t > 0.0 && HBAR * usable[2] > 0.01 * K_B * t {
        return StaticForm::Unsupported(Error::UnsupportedStaticLimit(format!(
            "lowest tabulated frequencies reach {:.3e} rad/s, not small against k_B T / hbar = {:.3e} rad/s",
            usable[2],
            K_B * t / HBAR
        )));
    }
    StaticForm::Extrapolated { omegas: [usable[0], usable[1], usable[2]] }
}

/// Quadratic Lagrange extrapolation of `f(w_i)` to `w = 0`.
fn extrapolate_to_zero(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= x[j] / (x[j] - x[i]);
            }
        }
        total += w * y[i];
    }
    total
}

/// `Im g(r, r', w)` with an explicit evaluation method.
pub fn im_green(r: &Vec3, rp: &Vec3, omega: f64, geometry: &SurfaceGeometry, method: KernelEvalMethod) -> Result<f64> {
    FluctuationKernel::new(geometry, method)?.im_green(r, rp, omega)
}

/// Static kernel `h(r, r')` with the default method of the geometry.
pub fn kernel_h(r: &Vec3, rp: &Vec3, geometry: &SurfaceGeometry) -> Result<f64> {
    FluctuationKernel::with_default_method(geometry)?.static_kernel(r, rp)
}

/// Directional derivatives of `h(r, r')` with the default method of the geometry.
pub fn kernel_h_directional(
    r: &Vec3,
    rp: &Vec3,
    geometry: &SurfaceGeometry,
    left: &[Vec3],
    right: &[Vec3],
) -> Result<f64> {
    FluctuationKernel::with_default_method(geometry)?.static_kernel_directional(r, rp, left, right)
}

/// `Im g` of a layered surface by numerical integration over the exact reflection coefficient.
pub fn im_green_layered_integral(r: &Vec3, rp: &Vec3, omega: f64, geometry: &SurfaceGeometry) -> Result<f64> {
    if geometry.layer().is_none() {
        return Err(Error::MethodInvalid("layered geometry required".into()));
    }
    im_green(r, rp, omega, geometry, KernelEvalMethod::FullBesselIntegral)
}

/// Coefficients `c_1 .. c_10` of the layered Green function.
pub fn layer_coefficients(k: f64, omega: f64, geometry: &SurfaceGeometry) -> Result<[C64; 10]> {
    let (us, ub) = geometry.inverse_at(omega)?;
    let (Some(us), Some((_, d))) = (us, geometry.layer()) else {
        return Err(Error::MethodInvalid("layered geometry required".into()));
    };
    if !(k > 0.0) {
        return Err(Error::OutOfRange(format!("wavenumber must be > 0, got {k}")));
    }
    Ok(layered::coefficients(k, d, Interfaces::from_inverse(us, ub)))
}

/// Full complex Green function of a layered surface for any placement of the points.
pub fn green_layered_full(r: &Vec3, rp: &Vec3, omega: f64, geometry: &SurfaceGeometry) -> Result<C64> {
    let (us, ub) = geometry.inverse_at(omega)?;
    let (Some(us), Some((_, d))) = (us, geometry.layer()) else {
        return Err(Error::MethodInvalid("layered geometry required".into()));
    };
    layered::green_full(r, rp, d, us, ub, TailSettings::default())
}

/// Complex Green function of a dielectric half-space; points with `z >= 0`
/// count as vacuum.
pub fn green_halfspace(r: &Vec3, rp: &Vec3, omega: f64, bulk: &DielectricModel) -> Result<C64> {
    if r == rp {
        return Err(Error::CoincidentPoints);
    }
    let u = bulk.inverse_permittivity(omega)?;
    let one = C64::new(1.0, 0.0);
    let image = (u - one) / (u + one);
    let direct = 1.0 / (r - rp).norm();
    let mirrored = 1.0 / (r - MirrorTensor.apply(rp)).norm();
    let g = match (r.z >= 0.0, rp.z >= 0.0) {
        (true, true) => direct + image * mirrored,
        (true, false) | (false, true) => 2.0 * u / (u + one) * direct,
        (false, false) => u * (direct - image * mirrored),
    };
    Ok(coulomb() * g)
}
