mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use surfnoise::constants::{E_CHARGE, HBAR, K_B};
use surfnoise::greens::{FluctuationKernel, SurfaceGeometry};
use surfnoise::lindblad::*;
use surfnoise::noise::heating_rate_monopole;
use surfnoise::rates::ChargeDistribution;
use surfnoise::{Error, Vec3, C64};

use common::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn wigner_symbols_match_brute_force_clebsch_gordan() {
    for j1 in 0..=3 {
        for j2 in 0..=3 {
            let cg = Coupling { j1, j2 };
            for (big_j, big_m, state) in cg.coupled_states() {
                for m1 in -j1..=j1 {
                    for m2 in -j2..=j2 {
                        let brute = state[cg.index(m1, m2)];
                        let w = wigner3j(j1, j2, big_j, m1, m2, -big_m);
                        let formula = parity(j1 - j2 + big_m) * ((2 * big_j + 1) as f64).sqrt() * w;
                        assert!((brute - formula).abs() < 1e-12, "({j1} {m1} {j2} {m2} | {big_j} {big_m}): {brute} vs {formula}");
                    }
                }
            }
        }
    }
}

#[test]
fn wigner_symbol_orthogonality_and_values() {
    for (j1, j2) in [(1, 1), (2, 1), (3, 2)] {
        for j3 in (j1 - j2 as i32).abs()..=j1 + j2 {
            for j3p in (j1 - j2 as i32).abs()..=j1 + j2 {
                for m3 in -j3.min(j3p)..=j3.min(j3p) {
                    let mut s = 0.0;
                    for m1 in -j1..=j1 {
                        let m2 = -m1 - m3;
                        s += wigner3j(j1, j2, j3, m1, m2, m3) * wigner3j(j1, j2, j3p, m1, m2, m3);
                    }
                    let expected = if j3 == j3p { 1.0 / (2 * j3 + 1) as f64 } else { 0.0 };
                    assert!((s - expected).abs() < 1e-13);
                }
            }
        }
    }
    assert!((wigner3j(1, 1, 0, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert_eq!(wigner3j(1, 1, 3, 0, 0, 0), 0.0);
    assert_eq!(wigner3j(1, 1, 1, 1, 1, -1), 0.0);
    assert_eq!(wigner3j(1, 1, 1, 0, 0, 0), 0.0);
}

fn legendre(l: i32, m: i32, x: f64) -> f64 {
    let mut pmm = 1.0;
    let s = (1.0 - x * x).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in m + 2..=l {
        p = (x * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = p;
    }
    p
}

/// Polar part of `Y_lm = theta_lm(cos t) e^{i m phi}` with the Condon-Shortley phase.
fn theta(l: i32, m: i32, x: f64) -> f64 {
    let a = m.abs();
    let fact = |n: i32| (1..=n).map(|k| k as f64).product::<f64>();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - a) / fact(l + a)).sqrt();
    let v = norm * legendre(l, a, x);
    if m < 0 {
        parity(a) * v
    } else {
        v
    }
}

/// `<l m| n_i |l' m'>` by integrating spherical harmonics; the azimuthal
/// integrals are done in closed form.
fn orientation_element(l: i32, m: i32, lp: i32, mp: i32) -> [C64; 3] {
    let polar = |f: &dyn Fn(f64) -> f64| {
        surfnoise::quadrature::integrate(|x: f64| theta(l, m, x) * theta(lp, mp, x) * f(x), -1.0, 1.0, 1e-15, 1e-14, 200)
            .unwrap()
            .value
    };
    let sin = polar(&|x: f64| (1.0 - x * x).sqrt());
    let cos = polar(&|x: f64| x);
    let up = if m == mp + 1 { 1.0 } else { 0.0 };
    let down = if m == mp - 1 { 1.0 } else { 0.0 };
    [
        c(PI * (up + down) * sin),
        C64::new(0.0, -PI * (up - down) * sin),
        c(if m == mp { 2.0 * PI * cos } else { 0.0 }),
    ]
}

#[test]
fn orientation_matrix_elements_match_spherical_harmonic_integrals() {
    for l in 0..=3 {
        for lp in 0..=3 {
            for m in -l..=l {
                for mp in -lp..=lp {
                    let analytic = dipole_coefficients(l, m, lp, mp);
                    let numeric = orientation_element(l, m, lp, mp);
                    for i in 0..3 {
                        assert!((analytic[i] - numeric[i]).norm() < 1e-12, "<{l} {m}|n_{i}|{lp} {mp}>: {} vs {}", analytic[i], numeric[i]);
                    }
                }
            }
        }
    }
}

#[test]
fn orientation_operators_are_hermitian_unit_vectors() {
    let basis = AngularMomentumBasis::new(3);
    let ops: Vec<CMatrix> = (0..3).map(|i| orientation_operator(&basis, i)).collect();
    for op in &ops {
        assert!((op - op.adjoint()).norm() < 1e-14);
    }
    let n2 = ops.iter().fold(CMatrix::zeros(basis.dim(), basis.dim()), |acc, o| acc + o * o);
    let inner = AngularMomentumBasis::new(2).dim();
    for a in 0..inner {
        for b in 0..inner {
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((n2[(a, b)] - c(expected)).norm() < 1e-12);
        }
    }
    for a in 0..basis.dim() {
        for b in 0..basis.dim() {
            let (la, ma) = basis.state(a);
            let (lb, mb) = basis.state(b);
            if (la as i32 - lb as i32).abs() != 1 || (ma - mb).abs() > 1 {
                assert!(ops.iter().all(|o| o[(a, b)].norm() == 0.0));
            }
        }
    }
}

fn gold_kernel(t: f64) -> FluctuationKernel {
    FluctuationKernel::with_default_method(&SurfaceGeometry::half_space(gold(), t).unwrap()).unwrap()
}

fn calcium_mode(omega: f64, n_max: usize, dir: Vec3) -> BosonicModeSpec {
    BosonicModeSpec { omega, direction: dir, inertia: 40.0 * surfnoise::constants::AMU, n_max }
}

#[test]
fn oscillator_relaxes_to_truncated_boltzmann_distribution() {
    let omega = 2.0 * PI * 1e6;
    let t = 2.0 * HBAR * omega / K_B;
    let k = gold_kernel(t);
    let modes = [calcium_mode(omega, 30, Vec3::z())];
    let md = build_oscillator_dissipator(&ChargeDistribution::Monopole { q: E_CHARGE }, &modes, &Vec3::new(0.0, 0.0, 50e-6), &k, ModeSeparation::default())
        .unwrap();
    let energies = md.energies(&modes);
    let boltzmann = DensityMatrix::thermal(&energies, t).unwrap().populations();
    let h = Hamiltonian::Diagonal(energies.clone());
    let ss = steady_state(&h, &md.spec).unwrap().populations();
    let pauli = pauli_steady_state(&md.spec).unwrap();
    for i in 0..energies.len() {
        assert!((ss[i] - boltzmann[i]).abs() < 1e-6, "{i}: {} vs {}", ss[i], boltzmann[i]);
        assert!((pauli[i] - boltzmann[i]).abs() < 1e-6);
    }
    assert_eq!(md.spec.boundary_states, vec![30]);
}

#[test]
fn rates_obey_detailed_balance() {
    let ex = example2();
    let spec = ex.dissipator(&in_plane_frame(), 2, FreeRotorOptions::default());
    let w = spec.transition_rates();
    let basis = AngularMomentumBasis::new(2);
    let e = basis.energies(ex.inertia);
    let t = ex.kernel.temperature();
    for a in 0..basis.dim() {
        for b in 0..basis.dim() {
            if a != b && w[(b, a)] > 0.0 {
                let ratio = w[(a, b)] / w[(b, a)];
                let expected = (-(e[a] - e[b]) / (K_B * t)).exp();
                assert!(rel(ratio, expected) < 1e-9, "{a} {b}: {ratio} vs {expected}");
            }
        }
    }
    let ss = steady_state(&Hamiltonian::Diagonal(e.clone()), &spec).unwrap().populations();
    let gibbs = DensityMatrix::thermal(&e, t).unwrap().populations();
    for i in 0..e.len() {
        assert!((ss[i] - gibbs[i]).abs() < 1e-6);
    }
}

fn max_trace_and_hermiticity_error(traj: &Trajectory) -> (f64, f64) {
    traj.states.iter().fold((0.0, 0.0), |(t, h), s| {
        let m = s.matrix();
        ((s.trace() - 1.0).abs().max(t), (m - m.adjoint()).norm().max(h))
    })
}

#[test]
fn pure_dephasing_of_a_two_level_system() {
    let gamma = 3e3;
    let mut spec = DissipatorSpec::new(2);
    let sz = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]));
    spec.add_channel(gamma, sz, "dephasing").unwrap();
    let psi = DVector::from_vec(vec![c(1.0), c(1.0)]);
    let rho0 = DensityMatrix::from_pure(&psi).unwrap();
    let split = HBAR * 2.0 * PI * 1e4;
    let h = Hamiltonian::Diagonal(vec![0.0, split]);
    let times: Vec<f64> = (0..=20).map(|i| i as f64 * 5e-5).collect();
    for interaction_picture in [true, false] {
        let options = EvolveOptions { interaction_picture, ..Default::default() };
        let traj = evolve(&rho0, &h, &spec, &times, options).unwrap();
        assert_eq!(traj.interaction_picture, interaction_picture);
        for (t, s) in times.iter().zip(&traj.states) {
            let expected = C64::from_polar(0.5 * (-2.0 * gamma * t).exp(), split * t / HBAR);
            assert!((s.coherence(0, 1) - expected).norm() < 1e-7, "{t}: {} vs {expected}", s.coherence(0, 1));
            assert!((s.populations()[0] - 0.5).abs() < 1e-12);
        }
        let (tr, herm) = max_trace_and_hermiticity_error(&traj);
        assert!(tr < 1e-10 && herm < 1e-12);
    }
}

#[test]
fn amplitude_damping_matches_closed_form() {
    let gamma = 50.0;
    let mut spec = DissipatorSpec::new(2);
    let mut a = CMatrix::zeros(2, 2);
    a[(0, 1)] = c(1.0);
    spec.add_channel(gamma, a, "decay").unwrap();
    let rho0 = DensityMatrix::from_pure(&DVector::from_vec(vec![c(0.6), c(0.8)])).unwrap();
    let h = Hamiltonian::Diagonal(vec![0.0, HBAR * 1e5]);
    let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
    let traj = evolve(&rho0, &h, &spec, &times, EvolveOptions::default()).unwrap();
    for (t, s) in times.iter().zip(&traj.states) {
        assert!((s.populations()[1] - 0.64 * (-gamma * t).exp()).abs() < 1e-8);
        assert!((s.coherence(1, 0).norm() - 0.48 * (-0.5 * gamma * t).exp()).abs() < 1e-8);
    }
}

#[test]
fn no_dissipation_leaves_populations_fixed() {
    let spec = DissipatorSpec::new(3);
    let psi = DVector::from_vec(vec![c(1.0), C64::new(0.0, 1.0), c(0.5)]);
    let rho0 = DensityMatrix::from_pure(&psi).unwrap();
    let e = vec![0.0, HBAR * 1e3, HBAR * 2.5e3];
    let traj = evolve(&rho0, &Hamiltonian::Diagonal(e.clone()), &spec, &[0.0, 1e-3, 1.0], EvolveOptions::default()).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        for a in 0..3 {
            for b in 0..3 {
                let expected = rho0.coherence(a, b) * C64::from_polar(1.0, -(e[a] - e[b]) * t / HBAR);
                assert!((s.coherence(a, b) - expected).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn dense_and_diagonal_hamiltonians_agree() {
    let ex = example2();
    let spec = ex.dissipator(&in_plane_frame(), 2, FreeRotorOptions::default());
    let basis = AngularMomentumBasis::new(2);
    let e = basis.energies(ex.inertia);
    let psi = DVector::from_fn(basis.dim(), |i, _| c(1.0 + i as f64));
    let rho0 = DensityMatrix::from_pure(&psi).unwrap();
    let times = [0.0, 1e-3, 5e-3];
    let a = evolve(&rho0, &Hamiltonian::Diagonal(e.clone()), &spec, &times, EvolveOptions::default()).unwrap();
    let hd = Hamiltonian::Dense(Hamiltonian::Diagonal(e.clone()).matrix());
    let short = [0.0, 2e-10, 1e-9];
    let b = evolve(&rho0, &hd, &spec, &short, EvolveOptions::default()).unwrap();
    let a_short = evolve(&rho0, &Hamiltonian::Diagonal(e), &spec, &short, EvolveOptions::default()).unwrap();
    assert!(a.interaction_picture && !b.interaction_picture);
    for (x, y) in a_short.states.iter().zip(&b.states) {
        assert!((x.matrix() - y.matrix()).norm() < 1e-7);
    }
}

#[test]
fn liouvillian_generates_the_same_dynamics() {
    let ex = example2();
    let spec = ex.dissipator(&normal_frame(), 2, FreeRotorOptions::default());
    let basis = AngularMomentumBasis::new(2);
    let h = Hamiltonian::Diagonal(vec![0.0; basis.dim()]);
    let l = liouvillian(&h, &spec).unwrap();
    let psi = DVector::from_fn(basis.dim(), |i, _| C64::new(1.0, 0.3 * i as f64));
    let rho = DensityMatrix::from_pure(&psi).unwrap();
    let flat = DVector::from_column_slice(rho.matrix().as_slice());
    let via_l = CMatrix::from_column_slice(basis.dim(), basis.dim(), (&l * flat).as_slice());
    let direct = spec.apply(rho.matrix());
    assert!((via_l - &direct).norm() <= 1e-12 * direct.norm());
    assert!(direct.trace().norm() <= 1e-12 * direct.norm());
}

#[test]
fn example2_relaxes_and_decoheres_exponentially() {
    let ex = example2();
    let options = FreeRotorOptions { occupation: Occupation::Zero, ..Default::default() };
    let mut slopes = Vec::new();
    for frame in [normal_frame(), in_plane_frame()] {
        let spec = ex.dissipator(&frame, 2, options);
        let t_end = 10.0 * slowest_relaxation_time(&spec);
        let times: Vec<f64> = (0..=40).map(|i| t_end * i as f64 / 40.0).collect();
        let traj = ex.run(&spec, 2, &times);
        let (tr, herm) = max_trace_and_hermiticity_error(&traj);
        assert!(tr < 1e-10 && herm < 1e-12);
        let basis = AngularMomentumBasis::new(2);
        let last = traj.states.last().unwrap();
        assert!(last.populations()[0] > 0.99, "{}", last.populations()[0]);
        for s in &traj.states {
            let m = s.matrix();
            assert!(m.clone().symmetric_eigenvalues().min() > -1e-10);
        }
        let (a, b) = (basis.index(1, 0), basis.index(2, 0));
        let window = &traj.states[..=20];
        let x: Vec<f64> = times[..=20].to_vec();
        let y: Vec<f64> = window.iter().map(|s| s.coherence(a, b).norm().ln()).collect();
        let (slope, r2) = linear_fit(&x, &y);
        assert!(r2 > 0.999, "{r2}");
        slopes.push(slope);
    }
    assert!(slopes[0] < slopes[1], "{slopes:?}");
}

fn cutoff_change(occupation: Occupation) -> f64 {
    let ex = example2();
    let options = FreeRotorOptions { occupation, ..Default::default() };
    let times = [0.0, 0.005, 0.02, 0.05];
    let small = ex.run(&ex.dissipator(&in_plane_frame(), 2, options), 2, &times);
    let large = ex.run(&ex.dissipator(&in_plane_frame(), 3, options), 3, &times);
    let (b2, b3) = (AngularMomentumBasis::new(2), AngularMomentumBasis::new(3));
    let mut worst: f64 = 0.0;
    for (s, l) in small.states.iter().zip(&large.states) {
        for a in 0..b2.dim() {
            for b in 0..b2.dim() {
                let (la, ma) = b2.state(a);
                let (lb, mb) = b2.state(b);
                let d = (s.coherence(a, b) - l.coherence(b3.index(la, ma), b3.index(lb, mb))).norm();
                worst = worst.max(d);
            }
        }
    }
    worst
}

#[test]
fn example2_lowest_level_cutoff_is_stable() {
    assert!(cutoff_change(Occupation::Zero) < 1e-6);
    let thermal = cutoff_change(Occupation::Thermal);
    assert!(thermal < 1e-3, "{thermal:e}");
}

#[test]
fn zero_temperature_forbids_excitation() {
    let ex = example2();
    let spec = ex.dissipator(&normal_frame(), 2, FreeRotorOptions { occupation: Occupation::Zero, ..Default::default() });
    let w = spec.transition_rates();
    let basis = AngularMomentumBasis::new(2);
    for a in 0..basis.dim() {
        for b in 0..basis.dim() {
            if basis.state(b).0 > basis.state(a).0 {
                assert_eq!(w[(b, a)], 0.0);
            }
        }
    }
    let rho0 = DensityMatrix::basis_state(basis.dim(), 0).unwrap();
    let h = Hamiltonian::Diagonal(basis.energies(ex.inertia));
    let traj = evolve(&rho0, &h, &spec, &[0.0, 1e-2, 1.0], EvolveOptions::default()).unwrap();
    for s in &traj.states {
        assert_eq!(s.populations()[0], 1.0);
    }
}

#[test]
fn zero_projection_sources_route_all_decay_through_m_zero() {
    let ex = example2();
    let options = FreeRotorOptions { occupation: Occupation::Zero, operators: RotorOperators::ZeroProjectionSources };
    let spec = ex.dissipator(&normal_frame(), 2, options);
    let w = spec.transition_rates();
    let basis = AngularMomentumBasis::new(2);
    for m in [-2, -1, 1, 2] {
        let from = basis.index(2, m);
        assert!((0..basis.dim()).all(|to| w[(to, from)] == 0.0));
    }
}

#[test]
fn example2_decoherence_scale() {
    let ex = example2();
    let h = frame_kernel(&ex.kernel, &ex.r_cm, ex.omega_0, &normal_frame()).unwrap();
    let scale = ex.p * ex.p * h.trace() / HBAR;
    assert!((300.0..=500.0).contains(&scale), "{scale}");
    assert!(rel(scale, 3.6e2) < 0.05);
}

#[test]
fn rotation_at_zero_temperature_spins_down_monotonically() {
    let ex = example2();
    let geo = SurfaceGeometry::layered(
        surfnoise::materials::DielectricModel::Constant(C64::new(3.0, 0.003)),
        4e-9,
        pristine_superconductor(),
        0.0,
    )
    .unwrap();
    let cold = FluctuationKernel::with_default_method(&geo).unwrap();
    let spec = build_rotation_dissipator(
        &ChargeDistribution::PointDipole { p: Vec3::new(ex.p, 0.0, 0.0) },
        2.0 * PI * 1e3,
        &ex.r_cm,
        (Vec3::x(), Vec3::y()),
        &cold,
        8,
    )
    .unwrap();
    let basis = PlanarBasis { m_max: 8 };
    let rho0 = DensityMatrix::basis_state(basis.dim(), basis.index(4)).unwrap();
    let e: Vec<f64> = (-8..=8).map(|m: i32| HBAR * 2.0 * PI * 1e3 * m as f64).collect();
    let times: Vec<f64> = (0..=30).map(|i| i as f64 * 1e-3).collect();
    let traj = evolve(&rho0, &Hamiltonian::Diagonal(e), &spec, &times, EvolveOptions::default()).unwrap();
    let m_op = CMatrix::from_diagonal(&DVector::from_iterator(basis.dim(), (-8..=8).map(|m| c(m as f64))));
    let mut last = f64::INFINITY;
    for s in &traj.states {
        let m = s.expectation(&m_op).re;
        assert!(m <= last + 1e-12);
        last = m;
    }
    assert!(last < 4.0);
    assert_eq!(spec.boundary_states, vec![0, basis.dim() - 1]);
}

#[test]
fn image_potential_of_a_monopole() {
    let q = E_CHARGE;
    let d = 50e-6;
    let m = 40.0 * surfnoise::constants::AMU;
    let w = 2.0 * PI * 1e6;
    let c0 = q * q * surfnoise::constants::coulomb();
    let lateral = image_potential_monopole(q, &Vec3::new(0.0, 0.0, d), m, w, &Vec3::x()).unwrap();
    let normal = image_potential_monopole(q, &Vec3::new(0.0, 0.0, d), m, w, &Vec3::z()).unwrap();
    assert!(rel(lateral.static_energy, -c0 / (4.0 * d)) < 1e-15);
    assert!(rel(normal.mode_shift, 2.0 * lateral.mode_shift) < 1e-15);
    let curvature = -c0 / (2.0 * d).powi(3);
    assert!(rel(lateral.mode_shift, curvature * HBAR / (2.0 * m * w)) < 1e-15);
    assert!(matches!(image_potential_monopole(q, &Vec3::new(0.0, 0.0, -d), m, w, &Vec3::x()), Err(Error::SiteBelowSurface(_))));
}

#[test]
fn nearly_degenerate_modes_are_rejected() {
    let k = gold_kernel(300.0);
    let w = 2.0 * PI * 1e6;
    let modes = [calcium_mode(w, 3, Vec3::x()), calcium_mode(w * (1.0 + 1e-12), 3, Vec3::y())];
    let r = Vec3::new(0.0, 0.0, 1e-6);
    let q = ChargeDistribution::Monopole { q: E_CHARGE };
    assert!(matches!(build_oscillator_dissipator(&q, &modes, &r, &k, ModeSeparation::default()), Err(Error::DegenerateModes(_))));
    let loose = ModeSeparation { allow_degenerate: true, ..Default::default() };
    assert_eq!(build_oscillator_dissipator(&q, &modes, &r, &k, loose).unwrap().dim(), 16);
    let apart = [calcium_mode(w, 3, Vec3::x()), calcium_mode(1.3 * w, 3, Vec3::y())];
    let md = build_oscillator_dissipator(&q, &apart, &r, &k, ModeSeparation::default()).unwrap();
    assert_eq!(md.damping.len(), 2);
    assert!(md.damping[0] > 0.0);
}

#[test]
fn oscillator_excitation_rate_equals_heating_rate() {
    let k = FluctuationKernel::with_default_method(&fig5_geometry()).unwrap();
    let w = 2.0 * PI * 1e6;
    let r = Vec3::new(0.0, 0.0, 40e-6);
    let dir = Vec3::new(1.0, 0.0, 1.0).normalize();
    let modes = [calcium_mode(w, 4, dir)];
    let md = build_oscillator_dissipator(&ChargeDistribution::Monopole { q: E_CHARGE }, &modes, &r, &k, ModeSeparation::default()).unwrap();
    let heating = heating_rate_monopole(E_CHARGE, modes[0].inertia, w, &dir, &r, &k).unwrap();
    let up = md.spec.transition_rates()[(1, 0)];
    assert!(rel(up, heating.gamma_h) < 1e-12, "{up} vs {}", heating.gamma_h);
}

#[test]
fn libration_and_quadrupole_oscillators() {
    let ex = example2();
    let k = FluctuationKernel::with_default_method(&fig5_geometry()).unwrap();
    let w = 2.0 * PI * 1e5;
    let inertia = 1e-44;
    let modes = [
        BosonicModeSpec { omega: w, direction: Vec3::x(), inertia, n_max: 3 },
        BosonicModeSpec { omega: 1.5 * w, direction: Vec3::y(), inertia, n_max: 3 },
    ];
    let r = Vec3::new(0.0, 0.0, 10e-6);
    let dip = build_libration_dissipator(&ChargeDistribution::PointDipole { p: Vec3::z() * ex.p }, &modes, &Vec3::z(), &r, &k, ModeSeparation::default())
        .unwrap();
    let h = -k.im_green_directional(&r, &r, w, &[Vec3::x()], &[Vec3::x()]).unwrap();
    assert!(rel(dip.damping[0], ex.p * ex.p * h / (inertia * w)) < 1e-12);
    let bad = [BosonicModeSpec { direction: Vec3::z(), ..modes[0] }, modes[1]];
    assert!(build_libration_dissipator(&ChargeDistribution::PointDipole { p: Vec3::z() }, &bad, &Vec3::z(), &r, &k, ModeSeparation::default()).is_err());
    let q = ChargeDistribution::axial_quadrupole(1e-36, &Vec3::z());
    let ChargeDistribution::PointQuadrupole { q: tensor } = q.clone() else { unreachable!() };
    assert!(rel(axial_moment(&tensor).unwrap(), 1e-36) < 1e-12);
    let quad = build_libration_dissipator(&q, &modes, &Vec3::z(), &r, &k, ModeSeparation::default()).unwrap();
    assert!(quad.damping.iter().all(|g| *g > 0.0));
    let osc = build_oscillator_dissipator(&q, &[BosonicModeSpec { inertia: 1e-25, ..modes[0] }], &r, &k, ModeSeparation::default()).unwrap();
    assert!(osc.damping[0] > 0.0);
}

#[test]
fn invalid_arguments_are_reported() {
    let ex = example2();
    assert!(DensityMatrix::basis_state(3, 3).is_err());
    let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
    assert!(DensityMatrix::new(bad, 1e-12).is_err());
    let spec = ex.dissipator(&normal_frame(), 2, FreeRotorOptions::default());
    let rho = DensityMatrix::basis_state(4, 0).unwrap();
    assert!(matches!(
        evolve(&rho, &Hamiltonian::Diagonal(vec![0.0; 4]), &spec, &[0.0], EvolveOptions::default()),
        Err(Error::DimensionMismatch(_))
    ));
    let mut d = DissipatorSpec::new(2);
    assert!(d.add_channel(-1.0, CMatrix::identity(2, 2), "negative").is_err());
    let not_psd = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]));
    assert!(d.add_block(vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)], not_psd, "block").is_err());
    let rho9 = DensityMatrix::basis_state(9, 4).unwrap();
    let tight = EvolveOptions { max_steps: 2, ..Default::default() };
    let h = Hamiltonian::Diagonal(AngularMomentumBasis::new(2).energies(ex.inertia));
    assert!(matches!(evolve(&rho9, &h, &spec, &[1.0], tight), Err(Error::IntegratorFailure(_))));
}
