//! Computations behind each subcommand.

use clap::ValueEnum;
use nalgebra::DVector;
use surfnoise::constants::HBAR;
use surfnoise::lindblad::{
    build_free_rotor_dissipator, build_oscillator_dissipator, evolve as integrate, frame_kernel, AngularMomentumBasis,
    DensityMatrix, DissipatorSpec, Hamiltonian, ModeSeparation, Trajectory,
};
use surfnoise::materials::bose_occupation;
use surfnoise::noise::{fit_distance_exponent, heating_rate_monopole, psd_e, SpectralPoint};
use surfnoise::rates::{
    decoherence_rate, great_circle, thomson_gamma_infinity, thomson_rate, two_ion_scan, ChargeDistribution, Pose, SuperpositionPair,
};
use surfnoise::{Error, Vec3, C64};

use crate::config::{Amplitude, Motion, Scenario};
use crate::error::CliError;
use crate::output::{num, snapshots, Output, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Im g and the fluctuation kernel h at the particle position.
    Kernel,
    /// Electric-field noise spectra.
    Psd,
    /// Decoherence rate of a superposition or a free rotor.
    Rate,
    /// Two-ion orientation scan.
    Scan,
    /// Master-equation evolution.
    Evolve,
    /// Heating rates of trapped-charge modes.
    Heating,
    /// Decoherence of a charge by thermal radiation in free space.
    Thomson,
    /// Validity report only.
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Psd => "psd",
            Command::Rate => "rate",
            Command::Scan => "scan",
            Command::Evolve => "evolve",
            Command::Heating => "heating",
            Command::Thomson => "thomson",
            Command::Check => "check",
        }
    }
}

pub fn run(command: Command, s: &Scenario) -> Result<Output, CliError> {
    match command {
        Command::Kernel => kernel(s),
        Command::Psd => psd(s),
        Command::Rate => rate(s),
        Command::Scan => scan(s),
        Command::Evolve => evolve(s),
        Command::Heating => heating(s),
        Command::Thomson => thomson(s),
        Command::Check => Ok(Output::default()),
    }
}

fn sample_points(s: &Scenario) -> Vec<Vec3> {
    let base = s.motion.position();
    if s.compute.distances.is_empty() {
        vec![base]
    } else {
        s.compute.distances.iter().map(|&d| Vec3::new(base.x, base.y, d)).collect()
    }
}

fn spectral_points(s: &Scenario) -> Vec<SpectralPoint> {
    let mut points = Vec::new();
    if s.compute.include_static {
        points.push(SpectralPoint::Static);
    }
    points.extend(s.compute.frequencies.iter().map(|&w| SpectralPoint::Frequency(w)));
    points
}

fn skip_static(out: &mut Output, e: Error) -> Result<(), CliError> {
    match e {
        Error::UnsupportedStaticLimit(m) => {
            log::warn!("static point skipped: {m}");
            out.notes.push(format!("static point skipped: {m}"));
            Ok(())
        }
        e => Err(e.into()),
    }
}

fn kernel(s: &Scenario) -> Result<Output, CliError> {
    let mut out = Output::default();
    let mut t = Table::new(&["distance", "omega", "im_green", "kernel_h"]);
    let temperature = s.geometry.temperature;
    for r in sample_points(s) {
        for point in spectral_points(s) {
            match point {
                SpectralPoint::Static => match s.kernel.static_kernel(&r, &r) {
                    Ok(h) => t.push(vec![num(r.z), num(0.0), num(0.0), num(h)]),
                    Err(e) => skip_static(&mut out, e)?,
                },
                SpectralPoint::Frequency(w) => {
                    let g = s.kernel.im_green(&r, &r, w)?;
                    t.push(vec![num(r.z), num(w), num(g), num(-bose_occupation(w, temperature) * g)]);
                }
            }
        }
    }
    out.tables.push(("kernel.csv".into(), t));
    Ok(out)
}

fn psd(s: &Scenario) -> Result<Output, CliError> {
    let mut out = Output::default();
    let mut t = Table::new(&["distance", "omega", "s_xx", "s_yy", "s_zz", "s_xy", "s_xz", "s_yz"]);
    for r in sample_points(s) {
        for point in spectral_points(s) {
            match psd_e(&s.kernel, &r, point, s.compute.zero_point) {
                Ok(p) => {
                    let m = p.tensor;
                    t.push(
                        [r.z, point.omega(), m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(0, 1)], m[(0, 2)], m[(1, 2)]]
                            .iter()
                            .map(|&v| num(v))
                            .collect(),
                    );
                }
                Err(e) => skip_static(&mut out, e)?,
            }
        }
    }
    out.tables.push(("psd.csv".into(), t));
    if let Some((from, to, n)) = s.compute.distance_fit {
        let mut fit = Table::new(&["omega", "exponent"]);
        for point in spectral_points(s) {
            match fit_distance_exponent(&s.kernel, point, (from, to), n) {
                Ok(e) => fit.push(vec![num(point.omega()), num(e)]),
                Err(e) => skip_static(&mut out, e)?,
            }
        }
        out.tables.push(("psd_exponent.csv".into(), fit));
    }
    Ok(out)
}

fn dipole_moment(s: &Scenario) -> Result<f64, CliError> {
    match s.charge()? {
        ChargeDistribution::PointDipole { p } => Ok(p.norm()),
        _ => Err(CliError::config("a free rotor needs a dipole particle.charge")),
    }
}

fn rate(s: &Scenario) -> Result<Output, CliError> {
    let gamma = match &s.motion {
        Motion::Superposition(pair) => decoherence_rate(s.charge()?, pair, &s.kernel)?,
        Motion::FreeRotor { position, inertia, frame, .. } => {
            let p = dipole_moment(s)?;
            let w = AngularMomentumBasis::transition_frequency(0, *inertia);
            p * p * frame_kernel(&s.kernel, position, w, frame)?.trace() / HBAR
        }
        _ => return Err(CliError::config("rate needs superposition or free_rotor motion")),
    };
    let mut out = Output::default();
    let mut t = Table::new(&["gamma"]);
    t.push(vec![num(gamma)]);
    out.tables.push(("rate.csv".into(), t));
    out.result("gamma", gamma);
    out.relaxation_rate = Some(gamma);
    Ok(out)
}

fn scan(s: &Scenario) -> Result<Output, CliError> {
    let Motion::TwoIon { height, separation, fixed } = s.motion else {
        return Err(CliError::config("scan needs two_ion motion"));
    };
    let q = match s.charge()? {
        ChargeDistribution::Monopole { q } => *q,
        _ => return Err(CliError::config("scan needs a monopole particle.charge (the charge of each ion)")),
    };
    let result = two_ion_scan(q, separation, height, &s.kernel, fixed, s.compute.grid)?;
    let mut t = Table::new(&["alpha", "beta", "gamma_rate", "normalized_rate"]);
    let norm = if result.gamma_max > 0.0 { result.gamma_max } else { 1.0 };
    for (j, b) in result.betas.iter().enumerate() {
        for (i, a) in result.alphas.iter().enumerate() {
            let g = result.rate(i, j);
            t.push(vec![num(*a), num(*b), num(g), num(g / norm)]);
        }
    }
    let mut out = Output::default();
    out.tables.push(("scan.csv".into(), t));
    if let Some((axis, n)) = s.compute.great_circle {
        let dist = ChargeDistribution::PointCharges(vec![
            (q, Vec3::new(0.0, 0.0, 0.5 * separation)),
            (q, Vec3::new(0.0, 0.0, -0.5 * separation)),
        ]);
        let center = Vec3::new(0.0, 0.0, height);
        let fixed_pose = Pose::new(center, (fixed.0, fixed.1, 0.0));
        let mut gc = Table::new(&["alpha", "beta", "gamma_rate"]);
        for (a, b) in great_circle(fixed, &axis, n) {
            let g = decoherence_rate(&dist, &SuperpositionPair::new(fixed_pose, Pose::new(center, (a, b, 0.0))), &s.kernel)?;
            gc.push(vec![num(a), num(b), num(g)]);
        }
        out.tables.push(("scan_great_circle.csv".into(), gc));
    }
    out.result("gamma_max", result.gamma_max);
    out.relaxation_rate = Some(result.gamma_max);
    Ok(out)
}

fn default_duration(spec: &DissipatorSpec) -> Result<f64, CliError> {
    let k = spec.prepare().decay().clone();
    let slowest = (1..spec.dim()).map(|i| k[(i, i)].re).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        Ok(10.0 / slowest)
    } else {
        Err(CliError::config("no dissipation: compute.duration is required"))
    }
}

fn initial_state(dim: usize, index: impl Fn(&Amplitude) -> Result<usize, CliError>, amps: &[Amplitude]) -> Result<DensityMatrix, CliError> {
    if amps.is_empty() {
        return Err(CliError::config("evolve needs compute.initial"));
    }
    let mut psi = DVector::from_element(dim, C64::new(0.0, 0.0));
    for a in amps {
        let v = match a {
            Amplitude::Rotor { value, .. } | Amplitude::Fock { value, .. } => *value,
        };
        psi[index(a)?] += v;
    }
    Ok(DensityMatrix::from_pure(&psi)?)
}

fn evolve(s: &Scenario) -> Result<Output, CliError> {
    let (spec, energies, labels, rho0) = match &s.motion {
        Motion::FreeRotor { position, inertia, l_max, frame, options, .. } => {
            let basis = AngularMomentumBasis::new(*l_max);
            let spec = build_free_rotor_dissipator(dipole_moment(s)?, *inertia, position, &s.kernel, *l_max, frame, *options)?;
            let index = |a: &Amplitude| match a {
                Amplitude::Rotor { l, m, .. } if *l <= *l_max && m.unsigned_abs() as usize <= *l => Ok(basis.index(*l, *m)),
                _ => Err(CliError::config("compute.initial: rotor states need 0 <= l <= l_max and |m| <= l")),
            };
            let rho0 = initial_state(basis.dim(), index, &s.compute.initial)?;
            let labels: Vec<String> = (0..basis.dim()).map(|i| basis.label(i)).collect();
            (spec, basis.energies(*inertia), labels, rho0)
        }
        Motion::Oscillator { position, modes } => {
            let md = build_oscillator_dissipator(s.charge()?, modes, position, &s.kernel, ModeSeparation::default())?;
            let dims = md.dims.clone();
            let digits = |mut i: usize| {
                let mut d = vec![0; dims.len()];
                for k in (0..dims.len()).rev() {
                    d[k] = i % dims[k];
                    i /= dims[k];
                }
                d
            };
            let labels: Vec<String> = (0..md.dim())
                .map(|i| digits(i).iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"))
                .collect();
            let index = |a: &Amplitude| match a {
                Amplitude::Fock { occupation, .. } if occupation.len() == dims.len() && occupation.iter().zip(&dims).all(|(n, d)| n < d) => {
                    Ok(occupation.iter().zip(&dims).fold(0, |acc, (n, d)| acc * d + n))
                }
                _ => Err(CliError::config("compute.initial: fock states need one occupation <= n_max per mode")),
            };
            let rho0 = initial_state(md.dim(), index, &s.compute.initial)?;
            (md.spec.clone(), md.energies(modes), labels, rho0)
        }
        _ => return Err(CliError::config("evolve needs free_rotor or oscillator motion")),
    };
    let dim = energies.len();
    for &(a, b) in &s.compute.coherences {
        if a >= dim || b >= dim {
            return Err(CliError::config(format!("compute.coherences: index out of range for dimension {dim}")));
        }
    }
    let duration = match s.compute.duration {
        Some(d) => d,
        None => default_duration(&spec)?,
    };
    let n = s.compute.steps;
    let times: Vec<f64> = (0..=n).map(|i| duration * i as f64 / n as f64).collect();
    let traj: Trajectory = integrate(&rho0, &Hamiltonian::Diagonal(energies), &spec, &times, s.compute.evolve)?;

    let mut header = vec!["time".to_string()];
    header.extend(labels.iter().map(|l| format!("p({l})")));
    header.extend(s.compute.coherences.iter().map(|&(a, b)| format!("|rho({}|{})|", labels[a], labels[b])));
    let mut t = Table { header, rows: Vec::new() };
    for (time, st) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![num(*time)];
        row.extend(st.populations().iter().map(|&p| num(p)));
        row.extend(s.compute.coherences.iter().map(|&(a, b)| num(st.coherence(a, b).norm())));
        t.push(row);
    }
    let mut out = Output::default();
    out.tables.push(("evolve.csv".into(), t));
    out.texts.push(("evolve_rho.txt".into(), snapshots(&traj)));
    let last = traj.states.last().expect("at least one output time");
    out.result("duration", duration);
    out.result("final_trace", last.trace());
    out.result("final_purity", last.purity());
    out.relaxation_rate = Some(spec.max_rate());
    Ok(out)
}

fn heating(s: &Scenario) -> Result<Output, CliError> {
    let Motion::Oscillator { position, modes } = &s.motion else {
        return Err(CliError::config("heating needs oscillator motion"));
    };
    let q = match s.charge()? {
        ChargeDistribution::Monopole { q } => *q,
        _ => return Err(CliError::config("heating needs a monopole particle.charge")),
    };
    let mass = s.mass()?;
    let mut t = Table::new(&["mode", "omega", "gamma_h", "gamma_h_psd"]);
    let mut fastest: f64 = 0.0;
    for (i, m) in modes.iter().enumerate() {
        let h = heating_rate_monopole(q, mass, m.omega, &m.direction, position, &s.kernel)?;
        fastest = fastest.max(h.gamma_h);
        t.push(vec![i.to_string(), num(m.omega), num(h.gamma_h), num(h.gamma_h_psd)]);
    }
    let mut out = Output::default();
    out.tables.push(("heating.csv".into(), t));
    out.relaxation_rate = Some(fastest);
    Ok(out)
}

fn thomson(s: &Scenario) -> Result<Output, CliError> {
    let q = match s.charge()? {
        ChargeDistribution::Monopole { q } => *q,
        _ => return Err(CliError::config("thomson needs a monopole particle.charge")),
    };
    let mass = s.mass()?;
    let temperature = s.geometry.temperature;
    let mut t = Table::new(&["separation", "rate"]);
    for &d in &s.compute.separations {
        t.push(vec![num(d), num(thomson_rate(q, mass, temperature, d)?)]);
    }
    let inf = thomson_gamma_infinity(q, mass, temperature);
    t.push(vec!["inf".into(), num(inf)]);
    let mut out = Output::default();
    out.tables.push(("thomson.csv".into(), t));
    out.result("gamma_infinity", inf);
    Ok(out)
}
