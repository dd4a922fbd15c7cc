//! Scenario documents: parsing, unit normalisation and resolution into core types.

use serde::{Deserialize, Serialize};
use surfnoise::constants::HBAR;
use surfnoise::greens::{FluctuationKernel, KernelEvalMethod, KernelOptions, SurfaceGeometry};
use surfnoise::lindblad::{BosonicModeSpec, EvolveOptions, FreeRotorOptions, Occupation, RotorOperators};
use surfnoise::materials::{DielectricModel, DrudeLorentzModel, DrudeMetal, Resonance, Superconductor, TabulatedResponse};
use surfnoise::rates::{ChargeDistribution, Pose, SuperpositionPair};
use surfnoise::{Vec3, C64};

use crate::error::CliError;
use crate::units::{Dim, Quantity, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub geometry: GeometryCfg,
    pub material: MaterialCfg,
    #[serde(default)]
    pub particle: ParticleCfg,
    pub motion: MotionCfg,
    #[serde(default)]
    pub compute: ComputeCfg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    HalfSpace,
    Layered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodCfg {
    #[default]
    Default,
    ClosedForm,
    ThinLayer,
    BesselIntegral,
    MirrorLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryCfg {
    pub structure: Structure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_thickness: Option<Quantity>,
    pub temperature: Quantity,
    #[serde(default)]
    pub method: MethodCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin_layer_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<ModelCfg>,
    pub bulk: ModelCfg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceCfg {
    pub strength: f64,
    pub omega: Quantity,
    pub gamma: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelCfg {
    Vacuum,
    Constant {
        re: f64,
        im: f64,
    },
    DrudeLorentz {
        resonances: Vec<ResonanceCfg>,
    },
    Drude {
        omega_p: Quantity,
        gamma: Quantity,
    },
    /// Literature Drude parameters of gold.
    Gold,
    Superconductor {
        omega_p: Quantity,
        gamma: Quantity,
        critical_temperature: Quantity,
        london: Quantity,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        temperature: Option<Quantity>,
    },
    /// Rows of `[omega, Re eps, Im eps]`.
    Tabulated {
        frequency_unit: String,
        samples: Vec<[f64; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<ChargeCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<Quantity>,
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointChargeCfg {
    pub q: Quantity,
    pub position: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChargeCfg {
    Monopole {
        q: Quantity,
    },
    Dipole {
        p: Quantity,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
    },
    /// Axial quadrupole `Q_33 (3 n n - 1) / 2`.
    Quadrupole {
        q33: Quantity,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
    },
    PointCharges {
        charges: Vec<PointChargeCfg>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseCfg {
    pub position: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<Quantity<[f64; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<Quantity>,
    pub direction: [f64; 3],
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    /// Dipole axis along the surface normal.
    Normal,
    /// Dipole axis in the surface plane.
    InPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameCfg {
    Named(FrameName),
    Axes([[f64; 3]; 3]),
}

impl Default for FrameCfg {
    fn default() -> Self {
        FrameCfg::Named(FrameName::Normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationCfg {
    #[default]
    Thermal,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorsCfg {
    #[default]
    Full,
    ZeroProjectionSources,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionCfg {
    /// Particle at rest; kernels and spectra are evaluated at `position`.
    Fixed { position: Vector },
    /// Two poses of a slow particle.
    Superposition { a: PoseCfg, b: PoseCfg },
    Oscillator { position: Vector, modes: Vec<ModeCfg> },
    FreeRotor {
        position: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freq: Option<Quantity>,
        l_max: usize,
        #[serde(default)]
        frame: FrameCfg,
        #[serde(default)]
        occupation: OccupationCfg,
        #[serde(default)]
        operators: OperatorsCfg,
    },
    /// Two equal charges `separation` apart, centred at `height`.
    TwoIon {
        height: Quantity,
        separation: Quantity,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixed: Option<Quantity<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitCfg {
    pub from: Quantity,
    pub to: Quantity,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreatCircleCfg {
    pub axis: [f64; 3],
    pub points: usize,
}

/// One amplitude of the initial state: `l, m` for rotors, `fock` for oscillators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<Vec<usize>>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "tenth")]
    pub retardation: f64,
    #[serde(default = "tenth")]
    pub markov: f64,
}

fn tenth() -> f64 {
    0.1
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { retardation: 0.1, markov: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeCfg {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frequencies: Vec<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_static: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distances: Vec<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_point: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_fit: Option<FitCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub great_circle: Option<GreatCircleCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial: Vec<AmplitudeCfg>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coherences: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub separations: Vec<Quantity>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum Motion {
    Fixed { position: Vec3 },
    Superposition(SuperpositionPair),
    Oscillator { position: Vec3, modes: Vec<BosonicModeSpec> },
    FreeRotor { position: Vec3, omega_0: f64, inertia: f64, l_max: usize, frame: [Vec3; 3], options: FreeRotorOptions },
    TwoIon { height: f64, separation: f64, fixed: (f64, f64) },
}

impl Motion {
    /// Characteristic frequency of the particle motion; zero for a slow particle.
    pub fn frequency(&self) -> f64 {
        match self {
            Motion::Oscillator { modes, .. } => modes.iter().map(|m| m.omega).fold(0.0, f64::max),
            Motion::FreeRotor { omega_0, .. } => *omega_0,
            _ => 0.0,
        }
    }

    /// Largest height of any point the particle occupies.
    pub fn height(&self) -> f64 {
        match self {
            Motion::Fixed { position } | Motion::Oscillator { position, .. } | Motion::FreeRotor { position, .. } => position.z,
            Motion::Superposition(p) => p.pose_a.position.z.max(p.pose_b.position.z),
            Motion::TwoIon { height, separation, .. } => height + 0.5 * separation,
        }
    }

    pub fn position(&self) -> Vec3 {
        match self {
            Motion::Fixed { position } | Motion::Oscillator { position, .. } | Motion::FreeRotor { position, .. } => *position,
            Motion::Superposition(p) => 0.5 * (p.pose_a.position + p.pose_b.position),
            Motion::TwoIon { height, .. } => Vec3::new(0.0, 0.0, *height),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Amplitude {
    Rotor { l: usize, m: i32, value: C64 },
    Fock { occupation: Vec<usize>, value: C64 },
}

#[derive(Debug, Clone)]
pub struct Compute {
    pub frequencies: Vec<f64>,
    pub include_static: bool,
    pub distances: Vec<f64>,
    pub zero_point: bool,
    pub distance_fit: Option<(f64, f64, usize)>,
    pub grid: (usize, usize),
    pub great_circle: Option<(Vec3, usize)>,
    pub duration: Option<f64>,
    pub steps: usize,
    pub initial: Vec<Amplitude>,
    pub coherences: Vec<(usize, usize)>,
    pub separations: Vec<f64>,
    pub thresholds: Thresholds,
    pub evolve: EvolveOptions,
}

/// A fully resolved scenario in SI units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: SurfaceGeometry,
    pub kernel: FluctuationKernel,
    pub charge: Option<ChargeDistribution>,
    pub mass: Option<f64>,
    pub motion: Motion,
    pub compute: Compute,
}

impl Scenario {
    pub fn charge(&self) -> Result<&ChargeDistribution, CliError> {
        self.charge.as_ref().ok_or_else(|| CliError::config("particle.charge is required for this command"))
    }

    pub fn mass(&self) -> Result<f64, CliError> {
        self.mass.ok_or_else(|| CliError::config("particle.mass is required for this command"))
    }
}

/// Parses a config document; run manifests are accepted through their `config` member.
pub fn parse(text: &str) -> Result<Config, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::config(format!("malformed JSON: {e}")))?;
    let body = match value.get("manifest") {
        Some(_) => value.get("config").cloned().ok_or_else(|| CliError::config("manifest has no config member"))?,
        None => value,
    };
    serde_json::from_value(body).map_err(|e| CliError::config(e.to_string()))
}

fn unit_vector(v: [f64; 3], field: &str) -> Result<Vec3, CliError> {
    let v = Vec3::from(v);
    if !(v.norm() > 0.0 && v.norm().is_finite()) {
        return Err(CliError::config(format!("{field}: direction must be a non-zero vector")));
    }
    Ok(v.normalize())
}

fn positive(v: f64, field: &str) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("{field} must be > 0")))
    }
}

fn frequency(omega: &mut Option<Quantity>, freq: &mut Option<Quantity>, field: &str) -> Result<Option<f64>, CliError> {
    let q = match (omega.take(), freq.take()) {
        (Some(_), Some(_)) => return Err(CliError::config(format!("{field}: give either omega or freq, not both"))),
        (Some(q), None) => q,
        (None, Some(q)) => {
            if q.unit == "rad/s" {
                return Err(CliError::config(format!("{field}.freq is a cyclic frequency; use Hz units or the omega key")));
            }
            q
        }
        (None, None) => return Ok(None),
    };
    let mut q = q;
    let w = q.normalize(Dim::Frequency, field)?;
    *omega = Some(q);
    Ok(Some(w))
}

fn resolve_model(cfg: &mut ModelCfg, temperature: f64, field: &str) -> Result<DielectricModel, CliError> {
    if let ModelCfg::Gold = cfg {
        let g = DrudeMetal::gold();
        *cfg = ModelCfg::Drude {
            omega_p: Quantity { value: g.omega_p, unit: "rad/s".into() },
            gamma: Quantity { value: g.gamma, unit: "1/s".into() },
        };
    }
    let model = match cfg {
        ModelCfg::Vacuum => DielectricModel::Vacuum,
        ModelCfg::Constant { re, im } => DielectricModel::Constant(C64::new(*re, *im)),
        ModelCfg::DrudeLorentz { resonances } => {
            let mut out = Vec::with_capacity(resonances.len());
            for (i, r) in resonances.iter_mut().enumerate() {
                let w = r.omega.normalize(Dim::Frequency, &format!("{field}.resonances[{i}].omega"))?;
                let g = r.gamma.normalize(Dim::Rate, &format!("{field}.resonances[{i}].gamma"))?;
                out.push(Resonance::new(r.strength, w, g));
            }
            DielectricModel::DrudeLorentz(DrudeLorentzModel::new(out)?)
        }
        ModelCfg::Drude { omega_p, gamma } => {
            let wp = omega_p.normalize(Dim::Frequency, &format!("{field}.omega_p"))?;
            let g = gamma.normalize(Dim::Rate, &format!("{field}.gamma"))?;
            DielectricModel::DrudeMetal(DrudeMetal::new(wp, g)?)
        }
        ModelCfg::Gold => unreachable!(),
        ModelCfg::Superconductor { omega_p, gamma, critical_temperature, london, temperature: t } => {
            let wp = omega_p.normalize(Dim::Frequency, &format!("{field}.omega_p"))?;
            let g = gamma.normalize(Dim::Rate, &format!("{field}.gamma"))?;
            let tc = critical_temperature.normalize(Dim::Temperature, &format!("{field}.critical_temperature"))?;
            let l0 = london.normalize(Dim::London, &format!("{field}.london"))?;
            let t = t.get_or_insert(Quantity { value: temperature, unit: "K".into() });
            let t = t.normalize(Dim::Temperature, &format!("{field}.temperature"))?;
            DielectricModel::Superconductor(Superconductor::new(wp, g, tc, l0, t)?)
        }
        ModelCfg::Tabulated { frequency_unit, samples } => {
            let unit = Quantity { value: 1.0, unit: frequency_unit.clone() };
            let f = unit.si(Dim::Frequency, &format!("{field}.frequency_unit"))?;
            for s in samples.iter_mut() {
                s[0] *= f;
            }
            *frequency_unit = "rad/s".into();
            let data = samples.iter().map(|s| (s[0], C64::new(s[1], s[2]))).collect();
            DielectricModel::Tabulated(TabulatedResponse::new(data)?)
        }
    };
    Ok(model)
}

fn resolve_charge(cfg: &mut ChargeCfg) -> Result<ChargeDistribution, CliError> {
    let dist = match cfg {
        ChargeCfg::Monopole { q } => ChargeDistribution::Monopole { q: q.normalize(Dim::Charge, "particle.charge.q")? },
        ChargeCfg::Dipole { p, axis } => {
            let p = p.normalize(Dim::Dipole, "particle.charge.p")?;
            ChargeDistribution::PointDipole { p: p * unit_vector(*axis, "particle.charge.axis")? }
        }
        ChargeCfg::Quadrupole { q33, axis } => {
            let q33 = q33.normalize(Dim::Quadrupole, "particle.charge.q33")?;
            ChargeDistribution::axial_quadrupole(q33, &unit_vector(*axis, "particle.charge.axis")?)
        }
        ChargeCfg::PointCharges { charges } => {
            let mut out = Vec::with_capacity(charges.len());
            for (i, c) in charges.iter_mut().enumerate() {
                let q = c.q.normalize(Dim::Charge, &format!("particle.charge.charges[{i}].q"))?;
                let r = c.position.normalize(Dim::Length, &format!("particle.charge.charges[{i}].position"))?;
                out.push((q, Vec3::from(r)));
            }
            ChargeDistribution::PointCharges(out)
        }
    };
    dist.validate()?;
    Ok(dist)
}

fn resolve_pose(cfg: &mut PoseCfg, field: &str) -> Result<Pose, CliError> {
    let r = Vec3::from(cfg.position.normalize(Dim::Length, &format!("{field}.position"))?);
    let e = match cfg.euler.as_mut() {
        Some(q) => q.normalize(Dim::Angle, &format!("{field}.euler"))?,
        None => [0.0; 3],
    };
    Ok(Pose::new(r, (e[0], e[1], e[2])))
}

fn frame_axes(cfg: &FrameCfg) -> Result<[Vec3; 3], CliError> {
    match cfg {
        FrameCfg::Named(FrameName::Normal) => Ok([Vec3::x(), Vec3::y(), Vec3::z()]),
        FrameCfg::Named(FrameName::InPlane) => Ok([Vec3::y(), Vec3::z(), Vec3::x()]),
        FrameCfg::Axes(a) => {
            let axes = [unit_vector(a[0], "motion.frame")?, unit_vector(a[1], "motion.frame")?, unit_vector(a[2], "motion.frame")?];
            let gram = nalgebra::Matrix3::from_columns(&axes);
            if (gram.transpose() * gram - nalgebra::Matrix3::identity()).norm() > 1e-9 {
                return Err(CliError::config("motion.frame axes must be orthonormal"));
            }
            Ok(axes)
        }
    }
}

fn resolve_motion(cfg: &mut MotionCfg, particle: &mut ParticleCfg, mass: Option<f64>) -> Result<Motion, CliError> {
    let motion = match cfg {
        MotionCfg::Fixed { position } => Motion::Fixed { position: Vec3::from(position.normalize(Dim::Length, "motion.position")?) },
        MotionCfg::Superposition { a, b } => {
            let pa = resolve_pose(a, "motion.a")?;
            let pb = resolve_pose(b, "motion.b")?;
            Motion::Superposition(SuperpositionPair::new(pa, pb))
        }
        MotionCfg::Oscillator { position, modes } => {
            let position = Vec3::from(position.normalize(Dim::Length, "motion.position")?);
            let mass = mass.ok_or_else(|| CliError::config("oscillator motion needs particle.mass"))?;
            let mut out = Vec::with_capacity(modes.len());
            for (i, m) in modes.iter_mut().enumerate() {
                let field = format!("motion.modes[{i}]");
                let w = frequency(&mut m.omega, &mut m.freq, &field)?
                    .ok_or_else(|| CliError::config(format!("{field} needs omega or freq")))?;
                out.push(BosonicModeSpec {
                    omega: positive(w, &format!("{field}.omega"))?,
                    direction: unit_vector(m.direction, &format!("{field}.direction"))?,
                    inertia: mass,
                    n_max: m.n_max,
                });
            }
            if out.is_empty() {
                return Err(CliError::config("motion.modes must not be empty"));
            }
            Motion::Oscillator { position, modes: out }
        }
        MotionCfg::FreeRotor { position, omega, freq, l_max, frame, occupation, operators } => {
            let position = Vec3::from(position.normalize(Dim::Length, "motion.position")?);
            let w = frequency(omega, freq, "motion")?;
            let inertia = match particle.inertia.as_mut() {
                Some(q) => Some(positive(q.normalize(Dim::Inertia, "particle.inertia")?, "particle.inertia")?),
                None => None,
            };
            let (omega_0, inertia) = match (w, inertia) {
                (Some(w), None) => (positive(w, "motion.omega")?, HBAR / w),
                (None, Some(i)) => (HBAR / i, i),
                (Some(w), Some(i)) => {
                    if ((HBAR / i - w) / w).abs() > 1e-12 {
                        return Err(CliError::config("motion.omega and particle.inertia disagree (omega_0 = hbar / I)"));
                    }
                    (w, i)
                }
                (None, None) => return Err(CliError::config("free rotor needs motion.omega, motion.freq or particle.inertia")),
            };
            if particle.inertia.is_none() {
                particle.inertia = Some(Quantity { value: inertia, unit: "kg m^2".into() });
            }
            let options = FreeRotorOptions {
                occupation: match occupation {
                    OccupationCfg::Thermal => Occupation::Thermal,
                    OccupationCfg::Zero => Occupation::Zero,
                },
                operators: match operators {
                    OperatorsCfg::Full => RotorOperators::Full,
                    OperatorsCfg::ZeroProjectionSources => RotorOperators::ZeroProjectionSources,
                },
            };
            Motion::FreeRotor { position, omega_0, inertia, l_max: *l_max, frame: frame_axes(frame)?, options }
        }
        MotionCfg::TwoIon { height, separation, fixed } => {
            let height = positive(height.normalize(Dim::Length, "motion.height")?, "motion.height")?;
            let separation = positive(separation.normalize(Dim::Length, "motion.separation")?, "motion.separation")?;
            let fixed = match fixed.as_mut() {
                Some(q) => q.normalize(Dim::Angle, "motion.fixed")?,
                None => [0.0; 2],
            };
            Motion::TwoIon { height, separation, fixed: (fixed[0], fixed[1]) }
        }
    };
    Ok(motion)
}

fn resolve_compute(cfg: &mut ComputeCfg) -> Result<Compute, CliError> {
    let mut frequencies = Vec::with_capacity(cfg.frequencies.len());
    for (i, q) in cfg.frequencies.iter_mut().enumerate() {
        frequencies.push(positive(q.normalize(Dim::Frequency, &format!("compute.frequencies[{i}]"))?, "compute.frequencies")?);
    }
    let mut distances = Vec::with_capacity(cfg.distances.len());
    for (i, q) in cfg.distances.iter_mut().enumerate() {
        distances.push(positive(q.normalize(Dim::Length, &format!("compute.distances[{i}]"))?, "compute.distances")?);
    }
    let mut separations = Vec::with_capacity(cfg.separations.len());
    for (i, q) in cfg.separations.iter_mut().enumerate() {
        let s = q.normalize(Dim::Length, &format!("compute.separations[{i}]"))?;
        if s < 0.0 {
            return Err(CliError::config("compute.separations must be >= 0"));
        }
        separations.push(s);
    }
    let distance_fit = match cfg.distance_fit.as_mut() {
        Some(f) => Some((
            positive(f.from.normalize(Dim::Length, "compute.distance_fit.from")?, "compute.distance_fit.from")?,
            positive(f.to.normalize(Dim::Length, "compute.distance_fit.to")?, "compute.distance_fit.to")?,
            f.points,
        )),
        None => None,
    };
    let great_circle = match &cfg.great_circle {
        Some(g) => Some((unit_vector(g.axis, "compute.great_circle.axis")?, g.points)),
        None => None,
    };
    let duration = match cfg.duration.as_mut() {
        Some(q) => Some(positive(q.normalize(Dim::Time, "compute.duration")?, "compute.duration")?),
        None => None,
    };
    let mut initial = Vec::with_capacity(cfg.initial.len());
    for (i, a) in cfg.initial.iter().enumerate() {
        let value = C64::new(a.re, a.im);
        let amp = match (a.l, a.m, &a.fock) {
            (Some(l), Some(m), None) => Amplitude::Rotor { l, m, value },
            (None, None, Some(f)) => Amplitude::Fock { occupation: f.clone(), value },
            _ => return Err(CliError::config(format!("compute.initial[{i}] needs either l and m, or fock"))),
        };
        initial.push(amp);
    }
    let mut evolve = EvolveOptions::default();
    if let Some(t) = cfg.rel_tol {
        evolve.rel_tol = positive(t, "compute.rel_tol")?;
    }
    if let Some(t) = cfg.abs_tol {
        evolve.abs_tol = positive(t, "compute.abs_tol")?;
    }
    let grid = cfg.grid.unwrap_or([180, 90]);
    Ok(Compute {
        frequencies,
        include_static: cfg.include_static.unwrap_or(true),
        distances,
        zero_point: cfg.zero_point.unwrap_or(true),
        distance_fit,
        grid: (grid[0], grid[1]),
        great_circle,
        duration,
        steps: cfg.steps.unwrap_or(100).max(1),
        initial,
        coherences: cfg.coherences.iter().map(|c| (c[0], c[1])).collect(),
        separations,
        thresholds: cfg.thresholds,
        evolve,
    })
}

impl Config {
    /// Resolves the scenario and rewrites every quantity of `self` in SI units.
    pub fn resolve(&mut self) -> Result<Scenario, CliError> {
        let t = self.geometry.temperature.normalize(Dim::Temperature, "geometry.temperature")?;
        let bulk = resolve_model(&mut self.material.bulk, t, "material.bulk")?;
        let geometry = match self.geometry.structure {
            Structure::HalfSpace => {
                if self.material.layer.is_some() || self.geometry.layer_thickness.is_some() {
                    return Err(CliError::config("a half-space takes no layer or layer_thickness"));
                }
                SurfaceGeometry::half_space(bulk, t)?
            }
            Structure::Layered => {
                let layer = self.material.layer.as_mut().ok_or_else(|| CliError::config("layered geometry needs material.layer"))?;
                let layer = resolve_model(layer, t, "material.layer")?;
                let d = self
                    .geometry
                    .layer_thickness
                    .as_mut()
                    .ok_or_else(|| CliError::config("layered geometry needs geometry.layer_thickness"))?
                    .normalize(Dim::Length, "geometry.layer_thickness")?;
                SurfaceGeometry::layered(layer, d, bulk, t)?
            }
        };
        let method = match self.geometry.method {
            MethodCfg::Default => KernelEvalMethod::default_for(&geometry),
            MethodCfg::ClosedForm => KernelEvalMethod::ClosedForm,
            MethodCfg::ThinLayer => KernelEvalMethod::ThinLayerExpansion,
            MethodCfg::BesselIntegral => KernelEvalMethod::FullBesselIntegral,
            MethodCfg::MirrorLimit => KernelEvalMethod::MirrorLimit,
        };
        let mut options = KernelOptions::default();
        if let Some(r) = self.geometry.mirror_ratio {
            options.mirror_ratio = positive(r, "geometry.mirror_ratio")?;
        }
        if let Some(r) = self.geometry.thin_layer_ratio {
            options.thin_layer_ratio = positive(r, "geometry.thin_layer_ratio")?;
        }
        let kernel = FluctuationKernel::with_options(&geometry, method, options)?;
        let charge = match self.particle.charge.as_mut() {
            Some(c) => Some(resolve_charge(c)?),
            None => None,
        };
        let mass = match self.particle.mass.as_mut() {
            Some(q) => Some(positive(q.normalize(Dim::Mass, "particle.mass")?, "particle.mass")?),
            None => None,
        };
        let motion = resolve_motion(&mut self.motion, &mut self.particle, mass)?;
        let compute = resolve_compute(&mut self.compute)?;
        Ok(Scenario { geometry, kernel, charge, mass, motion, compute })
    }
}
