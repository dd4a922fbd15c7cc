//! Lindblad dissipators in channel and GKS form, and their builders for the
//! resonant-limit master equations.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

use super::rotor::{lowering_component, AngularMomentumBasis};
use super::CMatrix;
use crate::constants::{coulomb, HBAR};
use crate::greens::FluctuationKernel;
use crate::materials::bose_occupation;
use crate::rates::ChargeDistribution;
use crate::{Error, Result, Vec3, C64};

/// One jump operator with a non-negative rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rate: f64,
    pub operator: CMatrix,
    pub label: String,
}

/// `sum_ij C_ij (A_i rho A_j^+ - {A_j^+ A_i, rho}/2)` with a Hermitian PSD matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct GksBlock {
    pub operators: Vec<CMatrix>,
    pub coefficients: CMatrix,
    pub label: String,
}

/// Dissipator made of independent channels and GKS blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipatorSpec {
    dim: usize,
    pub channels: Vec<Channel>,
    pub blocks: Vec<GksBlock>,
    /// Basis states at which a truncated jump operator loses normalisation.
    pub boundary_states: Vec<usize>,
}

/// Precomputed operators for fast application of a dissipator.
#[derive(Debug, Clone)]
pub struct PreparedDissipator {
    /// Pairs `(A, B)` with jump part `sum A rho B^+`.
    jumps: Vec<(CMatrix, CMatrix)>,
    /// `sum_ij C_ij A_j^+ A_i`.
    decay: CMatrix,
}

impl PreparedDissipator {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = (&self.decay * rho + rho * &self.decay) * C64::new(-0.5, 0.0);
        for (a, b) in &self.jumps {
            out += a * rho * b.adjoint();
        }
        out
    }

    pub fn jumps(&self) -> &[(CMatrix, CMatrix)] {
        &self.jumps
    }

    pub fn decay(&self) -> &CMatrix {
        &self.decay
    }
}

/// Positive semidefiniteness by Cholesky factorisation with full pivoting;
/// pivots down to `-tol * ||C||` are accepted.
pub fn is_positive_semidefinite(c: &CMatrix, tol: f64) -> bool {
    let n = c.nrows();
    if n != c.ncols() {
        return false;
    }
    let scale = c.norm().max(f64::MIN_POSITIVE);
    if (c - c.adjoint()).norm() > 1e-12 * scale {
        return false;
    }
    let mut a = c.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| a[(*x.1, *x.1)].re.total_cmp(&a[(*y.1, *y.1)].re))
            .expect("non-empty");
        let pivot = a[(p, p)].re;
        if pivot < -tol * scale {
            return false;
        }
        remaining.remove(pos);
        if pivot <= tol * scale {
            // Remaining diagonal is numerically zero; off-diagonals must vanish too.
            return remaining
                .iter()
                .all(|&i| remaining.iter().all(|&j| a[(i, j)].norm() <= tol.sqrt() * scale));
        }
        for &i in &remaining {
            for &j in &remaining {
                let v = a[(i, p)] * a[(p, j)] / pivot;
                a[(i, j)] -= v;
            }
        }
    }
    true
}

impl DissipatorSpec {
    pub fn new(dim: usize) -> Self {
        Self { dim, channels: Vec::new(), blocks: Vec::new(), boundary_states: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_channel(&mut self, rate: f64, operator: CMatrix, label: impl Into<String>) -> Result<()> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidArgument(format!("channel rate must be >= 0, got {rate}")));
        }
        self.check_dim(&operator)?;
        if rate > 0.0 {
            self.channels.push(Channel { rate, operator, label: label.into() });
        }
        Ok(())
    }

    pub fn add_block(&mut self, operators: Vec<CMatrix>, coefficients: CMatrix, label: impl Into<String>) -> Result<()> {
        for op in &operators {
            self.check_dim(op)?;
        }
        if coefficients.nrows() != operators.len() || coefficients.ncols() != operators.len() {
            return Err(Error::DimensionMismatch("GKS coefficient matrix does not match operator count".into()));
        }
        if !is_positive_semidefinite(&coefficients, 1e-12) {
            return Err(Error::InvalidArgument("GKS coefficient matrix is not Hermitian positive semidefinite".into()));
        }
        if coefficients.iter().any(|c| *c != C64::new(0.0, 0.0)) {
            self.blocks.push(GksBlock { operators, coefficients, label: label.into() });
        }
        Ok(())
    }

    fn check_dim(&self, op: &CMatrix) -> Result<()> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, dissipator acts on dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.channels.is_empty() && self.blocks.is_empty()
    }

    pub fn prepare(&self) -> PreparedDissipator {
        let n = self.dim;
        let mut decay = CMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for ch in &self.channels {
            decay += ch.operator.adjoint() * &ch.operator * C64::new(ch.rate, 0.0);
            jumps.push((ch.operator.clone() * C64::new(ch.rate, 0.0), ch.operator.clone()));
        }
        for blk in &self.blocks {
            let k = blk.operators.len();
            for i in 0..k {
                let mut b = CMatrix::zeros(n, n);
                for j in 0..k {
                    let c = blk.coefficients[(i, j)];
                    if c != C64::new(0.0, 0.0) {
                        b += &blk.operators[j] * c.conj();
                        decay += blk.operators[j].adjoint() * &blk.operators[i] * c;
                    }
                }
                jumps.push((blk.operators[i].clone(), b));
            }
        }
        PreparedDissipator { jumps, decay }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.prepare().apply(rho)
    }

    /// Classical transition rates `W[(b, a)]` from basis state `a` to `b`.
    pub fn transition_rates(&self) -> DMatrix<f64> {
        let n = self.dim;
        let p = self.prepare();
        DMatrix::from_fn(n, n, |b, a| {
            if a == b {
                return 0.0;
            }
            p.jumps.iter().map(|(x, y)| (x[(b, a)] * y[(b, a)].conj()).re).sum()
        })
    }

    /// Largest total decay rate out of any basis state.
    pub fn max_rate(&self) -> f64 {
        let d = self.prepare().decay;
        (0..self.dim).map(|i| d[(i, i)].re).fold(0.0, f64::max)
    }
}

/// Harmonic mode of an oscillating or librating particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonicModeSpec {
    pub omega: f64,
    pub direction: Vec3,
    /// Mass in kg for translations, moment of inertia in kg m^2 for librations.
    pub inertia: f64,
    pub n_max: usize,
}

/// Rotating-wave validity check for multi-mode dissipators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSeparation {
    /// Required ratio of the smallest frequency gap to the largest damping rate.
    pub factor: f64,
    /// Downgrade a failed check to a warning.
    pub allow_degenerate: bool,
}

impl Default for ModeSeparation {
    fn default() -> Self {
        Self { factor: 10.0, allow_degenerate: false }
    }
}

/// Dissipator on a product of truncated Fock spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDissipator {
    pub spec: DissipatorSpec,
    /// Local dimensions `n_max + 1`, first mode most significant.
    pub dims: Vec<usize>,
    /// Energy damping rate `gamma_k` of each mode (the rate of `a_k` at zero temperature).
    pub damping: Vec<f64>,
    pub occupations: Vec<f64>,
}

impl ModeDissipator {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Energies `sum_k hbar w_k n_k` of the product basis.
    pub fn energies(&self, modes: &[BosonicModeSpec]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|idx| {
                let occ = fock_digits(idx, &self.dims);
                occ.iter().zip(modes).map(|(k, m)| HBAR * m.omega * *k as f64).sum()
            })
            .collect()
    }
}

fn fock_digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Annihilation operator of mode `k` on the product space.
pub fn annihilation(dims: &[usize], k: usize) -> CMatrix {
    let n: usize = dims.iter().product();
    let mut a = CMatrix::zeros(n, n);
    let stride: usize = dims[k + 1..].iter().product();
    for idx in 0..n {
        let occ = fock_digits(idx, dims)[k];
        if occ > 0 {
            a[(idx - stride, idx)] = C64::new((occ as f64).sqrt(), 0.0);
        }
    }
    a
}

fn thermal_mode_dissipator(
    modes: &[BosonicModeSpec],
    damping: Vec<f64>,
    temperature: f64,
    separation: ModeSeparation,
) -> Result<ModeDissipator> {
    for m in modes {
        if !(m.omega > 0.0 && m.inertia > 0.0) {
            return Err(Error::InvalidArgument("mode frequency and inertia must be > 0".into()));
        }
    }
    let occupations: Vec<f64> = modes.iter().map(|m| bose_occupation(m.omega, temperature)).collect();
    let max_rate = damping.iter().zip(&occupations).map(|(g, n)| g * (n + 1.0)).fold(0.0, f64::max);
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            let gap = (modes[i].omega - modes[j].omega).abs();
            if gap <= separation.factor * max_rate {
                let msg = format!(
                    "modes {i} and {j} differ by {gap:.3e} rad/s, below {} x damping {max_rate:.3e} 1/s",
                    separation.factor
                );
                if separation.allow_degenerate {
                    log::warn!("{msg}");
                } else {
                    return Err(Error::DegenerateModes(msg));
                }
            }
        }
    }
    let dims: Vec<usize> = modes.iter().map(|m| m.n_max + 1).collect();
    let mut spec = DissipatorSpec::new(dims.iter().product());
    for (k, (g, n)) in damping.iter().zip(&occupations).enumerate() {
        if *g < 0.0 {
            return Err(Error::InvalidArgument(format!("mode {k} has negative damping {g:e}")));
        }
        let a = annihilation(&dims, k);
        spec.add_channel(g * (n + 1.0), a.clone(), format!("mode {k} down"))?;
        spec.add_channel(g * n, a.adjoint(), format!("mode {k} up"))?;
        let top = (0..spec.dim()).filter(|&idx| fock_digits(idx, &dims)[k] == dims[k] - 1);
        spec.boundary_states.extend(top);
    }
    spec.boundary_states.sort_unstable();
    spec.boundary_states.dedup();
    Ok(ModeDissipator { spec, dims, damping, occupations })
}

/// `-sum w_a w_b D_a D'_b Im g(r, r, w)` over weighted direction lists.
fn resonant_kernel(
    kernel: &FluctuationKernel,
    r: &Vec3,
    omega: f64,
    terms: &[(f64, Vec<Vec3>)],
) -> Result<f64> {
    let mut total = 0.0;
    for (wa, da) in terms {
        for (wb, db) in terms {
            total -= wa * wb * kernel.im_green_directional(r, r, omega, da, db)?;
        }
    }
    Ok(total)
}

fn quadrupole_eigen(q: &Matrix3<f64>) -> Vec<(f64, Vec3)> {
    let eig = SymmetricEigen::new(*q);
    (0..3)
        .filter(|&k| eig.eigenvalues[k] != 0.0)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into()))
        .collect()
}

/// Axial moment `Q_33` of an axially symmetric traceless quadrupole.
pub fn axial_moment(q: &Matrix3<f64>) -> Result<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(*q).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let scale = q.norm().max(f64::MIN_POSITIVE);
    if (ev[0] - ev[1]).abs() <= 1e-9 * scale {
        Ok(ev[2])
    } else if (ev[1] - ev[2]).abs() <= 1e-9 * scale {
        Ok(ev[0])
    } else {
        Err(Error::InvalidArgument("quadrupole is not axially symmetric".into()))
    }
}

/// Thermal dissipator of a charge oscillating harmonically along the given
/// modes about `r_eq`. The spatial-derivative kernel of each mode is chosen by
/// the multipole order of the distribution.
pub fn build_oscillator_dissipator(
    dist: &ChargeDistribution,
    modes: &[BosonicModeSpec],
    r_eq: &Vec3,
    kernel: &FluctuationKernel,
    separation: ModeSeparation,
) -> Result<ModeDissipator> {
    dist.validate()?;
    let mut damping = Vec::with_capacity(modes.len());
    for m in modes {
        let e = m.direction.normalize();
        let (prefactor, terms): (f64, Vec<(f64, Vec<Vec3>)>) = match dist {
            ChargeDistribution::Monopole { q } => (q * q, vec![(1.0, vec![e])]),
            ChargeDistribution::PointDipole { p } => (1.0, vec![(1.0, vec![e, *p])]),
            ChargeDistribution::PointQuadrupole { q } => (
                1.0 / 36.0,
                quadrupole_eigen(q).into_iter().map(|(l, v)| (l, vec![e, v, v])).collect(),
            ),
            ChargeDistribution::PointCharges(_) => {
                return Err(Error::InvalidArgument("oscillator dissipators need a point multipole".into()));
            }
        };
        let h = if prefactor == 0.0 { 0.0 } else { resonant_kernel(kernel, r_eq, m.omega, &terms)? };
        damping.push(prefactor * h / (m.inertia * m.omega));
    }
    thermal_mode_dissipator(modes, damping, kernel.temperature(), separation)
}

/// Thermal dissipator of a dipolar or axially quadrupolar rotor librating
/// about `eps_eq` along two modes.
pub fn build_libration_dissipator(
    dist: &ChargeDistribution,
    modes: &[BosonicModeSpec; 2],
    eps_eq: &Vec3,
    r_cm: &Vec3,
    kernel: &FluctuationKernel,
    separation: ModeSeparation,
) -> Result<ModeDissipator> {
    dist.validate()?;
    let axis = eps_eq.normalize();
    for m in modes {
        if m.direction.normalize().dot(&axis).abs() > 1e-9 {
            return Err(Error::InvalidArgument("libration directions must be orthogonal to the equilibrium axis".into()));
        }
    }
    let mut damping = Vec::with_capacity(2);
    for m in modes {
        let e = m.direction.normalize();
        let (prefactor, dirs) = match dist {
            ChargeDistribution::PointDipole { p } => (p.norm_squared(), vec![e]),
            ChargeDistribution::PointQuadrupole { q } => {
                let q33 = axial_moment(q)?;
                (q33 * q33 / 4.0, vec![e, axis])
            }
            _ => return Err(Error::InvalidArgument("libration needs a dipole or axial quadrupole".into())),
        };
        let h = if prefactor == 0.0 { 0.0 } else { resonant_kernel(kernel, r_cm, m.omega, &[(1.0, dirs)])? };
        damping.push(prefactor * h / (m.inertia * m.omega));
    }
    thermal_mode_dissipator(modes, damping, kernel.temperature(), separation)
}

/// Planar rotor basis `e^{i m alpha}`, `m = -m_max..=m_max`, at index `m + m_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanarBasis {
    pub m_max: i32,
}

impl PlanarBasis {
    pub fn dim(&self) -> usize {
        (2 * self.m_max + 1) as usize
    }

    pub fn index(&self, m: i32) -> usize {
        (m + self.m_max) as usize
    }

    /// Truncated `e^{-i s alpha}`: `|m - s><m|`.
    pub fn lowering(&self, step: i32) -> CMatrix {
        let n = self.dim();
        let mut a = CMatrix::zeros(n, n);
        for m in -self.m_max..=self.m_max {
            let target = m - step;
            if target.abs() <= self.m_max {
                a[(self.index(target), self.index(m))] = C64::new(1.0, 0.0);
            }
        }
        a
    }
}

/// Dissipator of a dipole or axial quadrupole rotating in the plane spanned
/// by `plane.0` and `plane.1` at angular frequency `omega_rot`.
pub fn build_rotation_dissipator(
    dist: &ChargeDistribution,
    omega_rot: f64,
    r_cm: &Vec3,
    plane: (Vec3, Vec3),
    kernel: &FluctuationKernel,
    m_max: i32,
) -> Result<DissipatorSpec> {
    dist.validate()?;
    if !(omega_rot > 0.0) {
        return Err(Error::OutOfRange("rotation frequency must be > 0".into()));
    }
    if m_max < 1 {
        return Err(Error::InvalidArgument("planar basis cutoff must be >= 1".into()));
    }
    let e1 = plane.0.normalize();
    let e2 = (plane.1 - e1 * e1.dot(&plane.1)).normalize();
    let basis = PlanarBasis { m_max };
    let n_occ = bose_occupation(omega_rot, kernel.temperature());
    let (rate, step) = match dist {
        ChargeDistribution::PointDipole { p } => {
            let mut h = 0.0;
            for e in [e1, e2] {
                h -= kernel.im_green_directional(r_cm, r_cm, omega_rot, &[e], &[e])?;
            }
            (p.norm_squared() / (2.0 * HBAR) * h, 1)
        }
        ChargeDistribution::PointQuadrupole { q } => {
            let q33 = axial_moment(q)?;
            let i = C64::new(0.0, 1.0);
            let one = C64::new(1.0, 0.0);
            let left = [(one, [e1, e1]), (-2.0 * i, [e1, e2]), (-one, [e2, e2])];
            let right = [(one, [e1, e1]), (2.0 * i, [e1, e2]), (-one, [e2, e2])];
            let mut h = C64::new(0.0, 0.0);
            for (a, da) in &left {
                for (b, db) in &right {
                    h -= a * b * kernel.im_green_directional(r_cm, r_cm, omega_rot, da, db)?;
                }
            }
            (q33 * q33 / (128.0 * HBAR) * h.re, 2)
        }
        _ => return Err(Error::InvalidArgument("rotation needs a dipole or axial quadrupole".into())),
    };
    let mut spec = DissipatorSpec::new(basis.dim());
    let down = basis.lowering(step);
    spec.add_channel(rate * (n_occ + 1.0), down.clone(), "rotation down")?;
    spec.add_channel(rate * n_occ, down.adjoint(), "rotation up")?;
    spec.boundary_states = (0..step).flat_map(|s| [s as usize, basis.dim() - 1 - s as usize]).collect();
    spec.boundary_states.sort_unstable();
    Ok(spec)
}

/// Bath occupation used by the free-rotor dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Occupation {
    /// `n(w_l)` at the surface temperature, with detailed-balance excitation.
    #[default]
    Thermal,
    /// `n = 0`: decay only, at the bare rate `2 p^2 h / hbar`.
    Zero,
}

/// Which states of the upper manifold the transition operators act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotorOperators {
    /// `n_{l,i} = P_l n_i P_{l+1}` on the whole manifold.
    #[default]
    Full,
    /// For `l >= 1` only `|l + 1, 0>` is a source; all of `l = 1` decays to `|0, 0>`.
    ZeroProjectionSources,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FreeRotorOptions {
    pub occupation: Occupation,
    pub operators: RotorOperators,
}

/// Free dipolar linear rotor: GKS blocks for every transition `l + 1 -> l`
/// (weight `n + 1`) and `l -> l + 1` (weight `n`), with the kernel
/// `h_ij = -(eps_i . d)(eps_j . d') Im g(R, R, w_l)` in the quantisation frame `eps`.
pub fn build_free_rotor_dissipator(
    p: f64,
    inertia: f64,
    r_cm: &Vec3,
    kernel: &FluctuationKernel,
    l_max: usize,
    frame: &[Vec3; 3],
    options: FreeRotorOptions,
) -> Result<DissipatorSpec> {
    if l_max < 1 {
        return Err(Error::InvalidArgument("free rotor needs l_max >= 1".into()));
    }
    if !(inertia > 0.0) {
        return Err(Error::InvalidArgument("moment of inertia must be > 0".into()));
    }
    let basis = AngularMomentumBasis::new(l_max);
    let mut spec = DissipatorSpec::new(basis.dim());
    if p == 0.0 {
        return Ok(spec);
    }
    for l in 0..l_max {
        let w = AngularMomentumBasis::transition_frequency(l, inertia);
        let h = frame_kernel(kernel, r_cm, w, frame)?;
        let n = match options.occupation {
            Occupation::Thermal => bose_occupation(w, kernel.temperature()),
            Occupation::Zero => 0.0,
        };
        let mut lower: Vec<CMatrix> = (0..3).map(|i| lowering_component(&basis, l, i)).collect();
        if options.operators == RotorOperators::ZeroProjectionSources && l >= 1 {
            let keep = basis.index(l + 1, 0);
            for a in lower.iter_mut() {
                for col in 0..a.ncols() {
                    if col != keep {
                        a.column_mut(col).fill(C64::new(0.0, 0.0));
                    }
                }
            }
        }
        let raise: Vec<CMatrix> = lower.iter().map(|a| a.adjoint()).collect();
        let c = h.map(|v| C64::new(2.0 * p * p / HBAR * v, 0.0));
        spec.add_block(lower, &c * C64::new(n + 1.0, 0.0), format!("l {} -> {l}", l + 1))?;
        if n > 0.0 {
            spec.add_block(raise, c.transpose() * C64::new(n, 0.0), format!("l {l} -> {}", l + 1))?;
        }
    }
    Ok(spec)
}

/// `-(eps_i . d)(eps_j . d') Im g(R, R, w)` as a symmetric 3x3 matrix.
pub fn frame_kernel(kernel: &FluctuationKernel, r: &Vec3, omega: f64, frame: &[Vec3; 3]) -> Result<DMatrix<f64>> {
    let mut h = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in i..3 {
            let v = -kernel.im_green_directional(r, r, omega, &[frame[i]], &[frame[j]])?;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Image-charge energies of a monopole above a perfect mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePotential {
    /// `-(q^2 / 4 pi eps0) / (2 |2 R . e3|)` in J.
    pub static_energy: f64,
    /// Coefficient of `a0^+ a0`: `-(q^2/4 pi eps0)(hbar / 2 m w0)(2d)^-3 (1 + (eps0 . e3)^2)` in J.
    pub mode_shift: f64,
}

pub fn image_potential_monopole(q: f64, r_eq: &Vec3, mass: f64, omega_0: f64, direction: &Vec3) -> Result<ImagePotential> {
    if !(r_eq.z > 0.0) {
        return Err(Error::SiteBelowSurface(r_eq.z));
    }
    let d = r_eq.z;
    let c = q * q * coulomb();
    let e = direction.normalize();
    Ok(ImagePotential {
        static_energy: -c / (2.0 * 2.0 * d),
        mode_shift: -c * HBAR / (2.0 * mass * omega_0) / (2.0 * d).powi(3) * (1.0 + e.z * e.z),
    })
}
