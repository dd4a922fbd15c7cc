//! Resonant-limit master equations: dissipator builders for oscillating,
//! librating and rotating charge distributions, and their time evolution.

mod dissipator;
mod evolve;
mod rotor;
mod wigner;

pub use dissipator::{
    annihilation, axial_moment, build_free_rotor_dissipator, build_libration_dissipator,
    build_oscillator_dissipator, build_rotation_dissipator, frame_kernel, image_potential_monopole,
    is_positive_semidefinite, BosonicModeSpec, Channel, DissipatorSpec, FreeRotorOptions, GksBlock, ImagePotential, ModeDissipator,
    ModeSeparation, Occupation, PlanarBasis, PreparedDissipator, RotorOperators,
};
pub use evolve::{
    evolve, is_secular, liouvillian, pauli_steady_state, steady_state, DensityMatrix, EvolveOptions, Hamiltonian,
    Trajectory,
};
pub use rotor::{dipole_coefficients, lowering_component, orientation_operator, AngularMomentumBasis};
pub use wigner::wigner3j;

/// Dense complex matrix on a truncated Hilbert space.
pub type CMatrix = nalgebra::DMatrix<crate::C64>;
