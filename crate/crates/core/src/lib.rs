//! Surface-induced decoherence, heating and dissipation of charged rigid
//! bodies held above planar dielectric surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`materials`] holds the dielectric response models and Bose statistics,
//! * [`greens`] evaluates the electrostatic Green function of half-space and
//!   layered surfaces, its imaginary part and the static fluctuation kernel,
//! * [`noise`] turns the kernel into electric-field noise spectra,
//! * [`rates`] computes decoherence and heating rates of charge distributions,
//! * [`lindblad`] assembles and integrates Lindblad master equations for
//!   rotational and vibrational quantum states.
//!
//! All quantities are SI. Positions above the surface have `z > 0`; the surface
//! occupies `z < 0`.

pub mod constants;
pub mod error;
pub mod greens;
pub mod lindblad;
pub mod materials;
pub mod noise;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};

/// Cartesian 3-vector used for positions and directions.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
