//! Density matrices, time evolution under a Lindblad generator and steady states.

use nalgebra::{DMatrix, DVector};

use super::dissipator::{DissipatorSpec, PreparedDissipator};
use super::CMatrix;
use crate::constants::{HBAR, K_B};
use crate::{Error, Result, C64};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    /// Validates `rho` to within `tol` in trace, hermiticity and eigenvalue sign.
    pub fn new(rho: CMatrix, tol: f64) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::DimensionMismatch("density matrix must be square and non-empty".into()));
        }
        if (rho.trace() - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidArgument(format!("density matrix trace is {}", rho.trace())));
        }
        if (&rho - rho.adjoint()).norm() > tol {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        let herm = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let min = herm.symmetric_eigenvalues().min();
        if min < -tol {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(Self { rho: herm })
    }

    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("state vector is zero".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(Self { rho: &v * v.adjoint() })
    }

    /// Basis state `|k><k|`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch(format!("basis index {k} outside dimension {dim}")));
        }
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self { rho })
    }

    /// Gibbs state for diagonal energies in J.
    pub fn thermal(energies: &[f64], temperature: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::DimensionMismatch("no energies".into()));
        }
        let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = if temperature > 0.0 {
            energies.iter().map(|e| (-(e - e0) / (K_B * temperature)).exp()).collect()
        } else {
            energies.iter().map(|e| if *e == e0 { 1.0 } else { 0.0 }).collect()
        };
        let z: f64 = w.iter().sum();
        let n = energies.len();
        Ok(Self { rho: CMatrix::from_fn(n, n, |a, b| if a == b { C64::new(w[a] / z, 0.0) } else { C64::new(0.0, 0.0) }) })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub fn coherence(&self, a: usize, b: usize) -> C64 {
        self.rho[(a, b)]
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `Tr(rho O)`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.rho * op).trace()
    }
}

/// System Hamiltonian in J.
#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonian {
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(e) => e.len(),
            Self::Dense(h) => h.nrows(),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            Self::Diagonal(e) => CMatrix::from_diagonal(&DVector::from_iterator(e.len(), e.iter().map(|x| C64::new(*x, 0.0)))),
            Self::Dense(h) => h.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Rotating frame of a diagonal Hamiltonian when the dissipator is secular.
    pub interaction_picture: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-9, max_steps: 10_000_000, interaction_picture: true }
    }
}

/// States at the requested output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub steps: usize,
    pub interaction_picture: bool,
}

/// Whether every jump of `prep` changes the energy by a single Bohr frequency.
pub fn is_secular(energies: &[f64], prep: &PreparedDissipator) -> bool {
    let spread = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let tol = 1e-9 * spread.max(f64::MIN_POSITIVE);
    let check = |m: &CMatrix, freq: &mut Option<f64>| {
        for b in 0..m.nrows() {
            for a in 0..m.ncols() {
                if m[(b, a)].norm() == 0.0 {
                    continue;
                }
                let w = energies[a] - energies[b];
                match freq {
                    None => *freq = Some(w),
                    Some(f) if (*f - w).abs() > tol => return false,
                    _ => {}
                }
            }
        }
        true
    };
    prep.jumps().iter().all(|(a, b)| {
        let mut f = None;
        check(a, &mut f) && check(b, &mut f)
    })
}

struct Generator {
    prep: PreparedDissipator,
    coherent: Option<CMatrix>,
}

impl Generator {
    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = self.prep.apply(rho);
        if let Some(h) = &self.coherent {
            out += (h * rho - rho * h) * C64::new(0.0, -1.0 / HBAR);
        }
        out
    }
}

const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn combo(y: &CMatrix, h: f64, ks: &[&CMatrix], coeffs: &[f64]) -> CMatrix {
    let mut out = y.clone();
    for (k, c) in ks.iter().zip(coeffs) {
        if *c != 0.0 {
            out += *k * C64::new(h * c, 0.0);
        }
    }
    out
}

/// Integrates `drho/dt = -i/hbar [H, rho] + D(rho)` from `rho0` at `t = 0`
/// and returns the states at `times` (non-decreasing, `>= 0`).
pub fn evolve(
    rho0: &DensityMatrix,
    hamiltonian: &Hamiltonian,
    dissipator: &DissipatorSpec,
    times: &[f64],
    options: EvolveOptions,
) -> Result<Trajectory> {
    let n = rho0.dim();
    if hamiltonian.dim() != n || dissipator.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {n}, Hamiltonian {}, dissipator {}",
            hamiltonian.dim(),
            dissipator.dim()
        )));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("output times must be finite, non-negative and sorted".into()));
    }
    let prep = dissipator.prepare();
    let (gen, rotating) = match hamiltonian {
        Hamiltonian::Diagonal(e) if options.interaction_picture && is_secular(e, &prep) => {
            (Generator { prep, coherent: None }, Some(e.clone()))
        }
        _ => (Generator { prep, coherent: Some(hamiltonian.matrix()) }, None),
    };
    let rate_scale = {
        let mut s = dissipator.max_rate();
        if let Some(h) = &gen.coherent {
            s = s.max(h.iter().map(|x| x.norm()).fold(0.0, f64::max) / HBAR);
        }
        s
    };
    let mut y = rho0.rho.clone();
    let mut t = 0.0;
    let mut h = if rate_scale > 0.0 { 0.01 / rate_scale } else { times.last().copied().unwrap_or(0.0) };
    let mut steps = 0;
    let mut k1 = gen.rhs(&y);
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            if steps >= options.max_steps {
                return Err(Error::IntegratorFailure(format!("step budget exhausted at t = {t:e}")));
            }
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            if !(step > 1e-15 * t.max(target)) && !last {
                return Err(Error::IntegratorFailure(format!("step size underflow at t = {t:e}")));
            }
            let k2 = gen.rhs(&combo(&y, step, &[&k1], &[A21]));
            let k3 = gen.rhs(&combo(&y, step, &[&k1, &k2], &A3));
            let k4 = gen.rhs(&combo(&y, step, &[&k1, &k2, &k3], &A4));
            let k5 = gen.rhs(&combo(&y, step, &[&k1, &k2, &k3, &k4], &A5));
            let k6 = gen.rhs(&combo(&y, step, &[&k1, &k2, &k3, &k4, &k5], &A6));
            let y5 = combo(&y, step, &[&k1, &k2, &k3, &k4, &k5, &k6], &B5);
            let k7 = gen.rhs(&y5);
            let y4 = combo(&y, step, &[&k1, &k2, &k3, &k4, &k5, &k6, &k7], &B4);
            let err = y5
                .iter()
                .zip(y4.iter())
                .zip(y.iter())
                .map(|((a, b), c)| (a - b).norm() / (options.abs_tol + options.rel_tol * a.norm().max(c.norm())))
                .fold(0.0, f64::max);
            steps += 1;
            if !err.is_finite() {
                return Err(Error::IntegratorFailure(format!("non-finite state at t = {t:e}")));
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = (&y5 + y5.adjoint()) * C64::new(0.5, 0.0);
                k1 = if (&y - &y5).norm() == 0.0 { k7 } else { gen.rhs(&y) };
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last || err > 1.0 {
                h = step * factor;
            }
        }
        let mut out = y.clone();
        if let Some(e) = &rotating {
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] *= C64::from_polar(1.0, -(e[a] - e[b]) * target / HBAR);
                }
            }
        }
        states.push(DensityMatrix { rho: out });
    }
    Ok(Trajectory { times: times.to_vec(), states, steps, interaction_picture: rotating.is_some() })
}

/// Column-major superoperator of the full generator.
pub fn liouvillian(hamiltonian: &Hamiltonian, dissipator: &DissipatorSpec) -> Result<CMatrix> {
    let n = dissipator.dim();
    if hamiltonian.dim() != n {
        return Err(Error::DimensionMismatch("Hamiltonian and dissipator dimensions differ".into()));
    }
    let eye = CMatrix::identity(n, n);
    let prep = dissipator.prepare();
    let h = hamiltonian.matrix();
    let k = prep.decay();
    let mut l = (eye.kronecker(&h) - h.transpose().kronecker(&eye)) * C64::new(0.0, -1.0 / HBAR);
    l -= (eye.kronecker(k) + k.transpose().kronecker(&eye)) * C64::new(0.5, 0.0);
    for (a, b) in prep.jumps() {
        l += b.map(|x| x.conj()).kronecker(a);
    }
    Ok(l)
}

/// Stationary state from the null space of the Liouvillian with the trace fixed to one.
pub fn steady_state(hamiltonian: &Hamiltonian, dissipator: &DissipatorSpec) -> Result<DensityMatrix> {
    let n = dissipator.dim();
    let mut l = liouvillian(hamiltonian, dissipator)?;
    for c in 0..n * n {
        l[(0, c)] = C64::new(0.0, 0.0);
    }
    for i in 0..n {
        l[(0, i + i * n)] = C64::new(1.0, 0.0);
    }
    let mut rhs = DVector::zeros(n * n);
    rhs[0] = C64::new(1.0, 0.0);
    let x = l
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::IntegratorFailure("Liouvillian has no unique stationary state".into()))?;
    let rho = CMatrix::from_column_slice(n, n, x.as_slice());
    Ok(DensityMatrix { rho: (&rho + rho.adjoint()) * C64::new(0.5, 0.0) })
}

/// Stationary populations of the classical rate equation built from
/// [`DissipatorSpec::transition_rates`].
pub fn pauli_steady_state(dissipator: &DissipatorSpec) -> Result<Vec<f64>> {
    let w = dissipator.transition_rates();
    let n = w.nrows();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                m[(b, a)] += w[(b, a)];
                m[(a, a)] -= w[(b, a)];
            }
        }
    }
    for c in 0..n {
        m[(0, c)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    let p = m.lu().solve(&rhs).ok_or_else(|| Error::IntegratorFailure("rate equation is singular".into()))?;
    Ok(p.iter().copied().collect())
}
