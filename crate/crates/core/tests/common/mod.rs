#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::rngs::StdRng;
use rand::RngExt;
use surfnoise::constants::{DEBYE, E_CHARGE, HBAR};
use surfnoise::greens::{FluctuationKernel, MirrorTensor, SurfaceGeometry};
use surfnoise::lindblad::{
    build_free_rotor_dissipator, evolve, AngularMomentumBasis, DensityMatrix, DissipatorSpec, EvolveOptions,
    FreeRotorOptions, Hamiltonian, Trajectory,
};
use surfnoise::rates::{ChargeDistribution, Pose};
use surfnoise::materials::{DielectricModel, DrudeLorentzModel, DrudeMetal, Resonance, Superconductor};
use surfnoise::{Vec3, C64};

pub fn fig2_model() -> DrudeLorentzModel {
    let mut r: Vec<_> = (1..=4).map(|n| Resonance::new(2e-5, 10f64.powi(6 + n), 10f64.powi(8 + n))).collect();
    r.push(Resonance::new(2.0, 1e13, 1e12));
    DrudeLorentzModel::new(r).unwrap()
}

/// Lossless superconductor well below its critical temperature.
pub fn pristine_superconductor() -> DielectricModel {
    DielectricModel::Superconductor(Superconductor::new(1.37e16, 4.05e13, 9.2, 1.9e-21, 0.0).unwrap())
}

pub fn gold() -> DielectricModel {
    DielectricModel::DrudeMetal(DrudeMetal::gold())
}

pub fn fig5_geometry() -> SurfaceGeometry {
    SurfaceGeometry::layered(DielectricModel::DrudeLorentz(fig2_model()), 5e-9, pristine_superconductor(), 300.0).unwrap()
}

pub struct Example2 {
    pub p: f64,
    pub omega_0: f64,
    pub inertia: f64,
    pub r_cm: Vec3,
    pub kernel: FluctuationKernel,
}

pub fn example2() -> Example2 {
    let omega_0 = 2.0 * PI * 5.5e9;
    let geo = SurfaceGeometry::layered(DielectricModel::Constant(C64::new(3.0, 0.003)), 4e-9, pristine_superconductor(), 0.1)
        .unwrap();
    Example2 {
        p: 4.36 * DEBYE,
        omega_0,
        inertia: HBAR / omega_0,
        r_cm: Vec3::new(0.0, 0.0, 100e-9),
        kernel: FluctuationKernel::with_default_method(&geo).unwrap(),
    }
}

impl Example2 {
    pub fn dissipator(&self, frame: &[Vec3; 3], l_max: usize, options: FreeRotorOptions) -> DissipatorSpec {
        build_free_rotor_dissipator(self.p, self.inertia, &self.r_cm, &self.kernel, l_max, frame, options).unwrap()
    }

    /// Evolution of `(|2,0> + |1,0>)/sqrt 2` under the free-rotor master equation.
    pub fn run(&self, spec: &DissipatorSpec, l_max: usize, times: &[f64]) -> Trajectory {
        let basis = AngularMomentumBasis::new(l_max);
        let mut psi = nalgebra::DVector::zeros(basis.dim());
        psi[basis.index(1, 0)] = C64::new(1.0, 0.0);
        psi[basis.index(2, 0)] = C64::new(1.0, 0.0);
        let rho0 = DensityMatrix::from_pure(&psi).unwrap();
        let h = Hamiltonian::Diagonal(basis.energies(self.inertia));
        evolve(&rho0, &h, spec, times, EvolveOptions::default()).unwrap()
    }
}

/// Longest population relaxation time: the inverse of the smallest total
/// decay rate out of any excited state.
pub fn slowest_relaxation_time(spec: &DissipatorSpec) -> f64 {
    let k = spec.prepare().decay().clone();
    let slowest = (1..spec.dim()).map(|i| k[(i, i)].re).fold(f64::INFINITY, f64::min);
    1.0 / slowest
}

/// Quantisation frame with the dipole axis along the surface normal.
pub fn normal_frame() -> [Vec3; 3] {
    [Vec3::x(), Vec3::y(), Vec3::z()]
}

/// Quantisation frame with the dipole axis in the surface plane.
pub fn in_plane_frame() -> [Vec3; 3] {
    [Vec3::y(), Vec3::z(), Vec3::x()]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Least-squares line through `(x, y)`: slope and coefficient of determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

/// Product basis `|j1 m1> |j2 m2>` at index `(m1 + j1) (2 j2 + 1) + m2 + j2`.
pub struct Coupling {
    pub j1: i32,
    pub j2: i32,
}

impl Coupling {
    pub fn dim(&self) -> usize {
        ((2 * self.j1 + 1) * (2 * self.j2 + 1)) as usize
    }

    pub fn index(&self, m1: i32, m2: i32) -> usize {
        ((m1 + self.j1) * (2 * self.j2 + 1) + m2 + self.j2) as usize
    }

    pub fn lowering(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut l = DMatrix::zeros(n, n);
        for m1 in -self.j1..=self.j1 {
            for m2 in -self.j2..=self.j2 {
                let from = self.index(m1, m2);
                if m1 > -self.j1 {
                    l[(self.index(m1 - 1, m2), from)] += (((self.j1 + m1) * (self.j1 - m1 + 1)) as f64).sqrt();
                }
                if m2 > -self.j2 {
                    l[(self.index(m1, m2 - 1), from)] += (((self.j2 + m2) * (self.j2 - m2 + 1)) as f64).sqrt();
                }
            }
        }
        l
    }

    /// Coupled states `|J M>` built from highest-weight vectors and repeated lowering,
    /// phased so that `<j1 j1; j2 J-j1 | J J> > 0`.
    pub fn coupled_states(&self) -> Vec<(i32, i32, DVector<f64>)> {
        let lower = self.lowering();
        let mut found: Vec<(i32, i32, DVector<f64>)> = Vec::new();
        for big_j in ((self.j1 - self.j2).abs()..=self.j1 + self.j2).rev() {
            let mut v = DVector::zeros(self.dim());
            for m1 in -self.j1..=self.j1 {
                let m2 = big_j - m1;
                if m2.abs() <= self.j2 {
                    v[self.index(m1, m2)] = 1.0 + 0.1 * m1 as f64;
                }
            }
            for (_, m, u) in &found {
                if *m == big_j {
                    let overlap = u.dot(&v);
                    v -= overlap * u;
                }
            }
            v /= v.norm();
            if v[self.index(self.j1, big_j - self.j1)] < 0.0 {
                v = -v;
            }
            let mut m = big_j;
            found.push((big_j, m, v.clone()));
            while m > -big_j {
                let norm = (((big_j + m) * (big_j - m + 1)) as f64).sqrt();
                v = &lower * &v / norm;
                m -= 1;
                found.push((big_j, m, v.clone()));
            }
        }
        found
    }
}

pub fn parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn random_unit(rng: &mut StdRng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            return v.normalize();
        }
    }
}

/// Worst relative mismatch between every derivative and a central difference
/// of one order lower.
pub fn derivative_mismatch(
    f: &dyn Fn(&Vec3, &Vec3, &[Vec3], &[Vec3]) -> f64,
    r: Vec3,
    rp: Vec3,
    max_order: usize,
    step: f64,
    rng: &mut StdRng,
) -> f64 {
    let left: Vec<Vec3> = (0..max_order).map(|_| random_unit(rng)).collect();
    let right: Vec<Vec3> = (0..max_order).map(|_| random_unit(rng)).collect();
    let dist = (r - MirrorTensor.apply(&rp)).norm();
    let delta = step * dist;
    let mut worst: f64 = 0.0;
    for nl in 0..=max_order {
        for nr in 0..=max_order {
            if nl + nr == 0 {
                continue;
            }
            let (l, rr) = (&left[..nl], &right[..nr]);
            let analytic = f(&r, &rp, l, rr);
            let numeric = if nl > 0 {
                let a = l[nl - 1];
                (f(&(r + a * delta), &rp, &l[..nl - 1], rr) - f(&(r - a * delta), &rp, &l[..nl - 1], rr)) / (2.0 * delta)
            } else {
                let b = rr[nr - 1];
                (f(&r, &(rp + b * delta), l, &rr[..nr - 1]) - f(&r, &(rp - b * delta), l, &rr[..nr - 1])) / (2.0 * delta)
            };
            let scale = f(&r, &rp, &[], &[]).abs() / dist.powi((nl + nr) as i32);
            worst = worst.max((analytic - numeric).abs() / analytic.abs().max(1e-3 * scale));
        }
    }
    worst
}

pub fn finite_dipole(p: &Vec3, l: f64) -> ChargeDistribution {
    let n = p.normalize();
    let q = p.norm() / l;
    ChargeDistribution::PointCharges(vec![(q, 0.5 * l * n), (-q, -0.5 * l * n)])
}

/// `+q, -q, -q, +q` along `n` at `-3l/2, -l/2, l/2, 3l/2`: an axial quadrupole with `Q_33 = 8 q l^2`.
pub fn linear_quadrupole(q33: f64, n: &Vec3, l: f64) -> ChargeDistribution {
    let q = q33 / (8.0 * l * l);
    ChargeDistribution::PointCharges(
        [(q, -1.5), (-q, -0.5), (-q, 0.5), (q, 1.5)].iter().map(|&(c, s)| (c, s * l * n)).collect(),
    )
}

/// Observed order from the first and last `(size, error)` pairs.
pub fn convergence_order(errors: &[(f64, f64)]) -> f64 {
    let (l0, e0) = errors[0];
    let (l1, e1) = errors[errors.len() - 1];
    (e0 / e1).ln() / (l0 / l1).ln()
}

pub fn random_distribution(rng: &mut StdRng) -> ChargeDistribution {
    match rng.random_range(0..4) {
        0 => ChargeDistribution::Monopole { q: E_CHARGE * rng.random_range(-3.0..3.0) },
        1 => ChargeDistribution::PointDipole {
            p: DEBYE * Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
        },
        2 => {
            let a = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let s = a + a.transpose();
            ChargeDistribution::PointQuadrupole { q: 1e-36 * (s - Matrix3::identity() * (s.trace() / 3.0)) }
        }
        _ => {
            let n = rng.random_range(1..5);
            ChargeDistribution::PointCharges(
                (0..n)
                    .map(|_| {
                        let r = 1e-6 * Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                        (E_CHARGE * rng.random_range(-2.0..2.0), r)
                    })
                    .collect(),
            )
        }
    }
}

pub fn random_pose(rng: &mut StdRng) -> Pose {
    Pose::new(
        Vec3::new(rng.random_range(-20e-6..20e-6), rng.random_range(-20e-6..20e-6), rng.random_range(5e-6..50e-6)),
        (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)),
    )
}
