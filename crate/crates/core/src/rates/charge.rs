//! Rigid charge distributions and their poses.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::{Error, Result, Vec3};

/// Charge distribution in the body frame.
#[derive(Debug, Clone, PartialEq)]
pub enum ChargeDistribution {
    Monopole { q: f64 },
    PointDipole { p: Vec3 },
    /// Traceless quadrupole tensor, normalised so that the density is `d . Q d delta / 6`.
    PointQuadrupole { q: Matrix3<f64> },
    PointCharges(Vec<(f64, Vec3)>),
}

impl ChargeDistribution {
    /// Axially symmetric quadrupole `Q_33 (3 n n - 1) / 2` about `axis`.
    pub fn axial_quadrupole(q33: f64, axis: &Vec3) -> Self {
        let n = axis.normalize();
        Self::PointQuadrupole { q: 0.5 * q33 * (3.0 * n * n.transpose() - Matrix3::identity()) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Monopole { q } if !q.is_finite() => Err(Error::InvalidArgument("charge is not finite".into())),
            Self::PointDipole { p } if !p.iter().all(|c| c.is_finite()) => {
                Err(Error::InvalidArgument("dipole is not finite".into()))
            }
            Self::PointQuadrupole { q } => {
                let norm = q.norm();
                if (q - q.transpose()).norm() > 1e-12 * norm {
                    return Err(Error::InvalidArgument("quadrupole tensor is not symmetric".into()));
                }
                if q.trace().abs() > 1e-12 * norm {
                    return Err(Error::InvalidArgument("quadrupole tensor is not traceless".into()));
                }
                Ok(())
            }
            Self::PointCharges(list) if list.is_empty() => {
                Err(Error::InvalidArgument("point-charge list is empty".into()))
            }
            _ => Ok(()),
        }
    }

    /// Expansion of `int rho f` for a pose into weighted directional derivatives of `f`.
    pub fn terms(&self, pose: &Pose) -> Vec<Term> {
        let rot = pose.rotation();
        match self {
            Self::Monopole { q } => vec![Term { weight: *q, position: pose.position, dirs: vec![] }],
            Self::PointDipole { p } => vec![Term { weight: 1.0, position: pose.position, dirs: vec![rot * p] }],
            Self::PointQuadrupole { q } => quadrupole_terms(&(rot * q * rot.transpose()), &pose.position, 1.0),
            Self::PointCharges(list) => list
                .iter()
                .map(|(qi, ri)| Term { weight: *qi, position: pose.position + rot * ri, dirs: vec![] })
                .collect(),
        }
    }
}

/// `(1/6) d . Q d` written as `sum_k (lambda_k / 6) (v_k . d)^2` with the eigenpairs of `Q`.
pub(crate) fn quadrupole_terms(q: &Matrix3<f64>, position: &Vec3, sign: f64) -> Vec<Term> {
    let eig = SymmetricEigen::new(*q);
    (0..3)
        .filter(|&k| eig.eigenvalues[k] != 0.0)
        .map(|k| {
            let v: Vec3 = eig.eigenvectors.column(k).into();
            Term { weight: sign * eig.eigenvalues[k] / 6.0, position: *position, dirs: vec![v, v] }
        })
        .collect()
}

/// One contribution `weight * (d_1 . grad) ... f(position)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub position: Vec3,
    pub dirs: Vec<Vec3>,
}

/// Position and orientation of the rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    /// Euler angles `(alpha, beta, gamma)` in the z-y'-z'' convention.
    pub euler: (f64, f64, f64),
}

impl Pose {
    pub fn new(position: Vec3, euler: (f64, f64, f64)) -> Self {
        Self { position, euler }
    }

    pub fn at(position: Vec3) -> Self {
        Self { position, euler: (0.0, 0.0, 0.0) }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        let (a, b, g) = self.euler;
        rotation_z(a) * rotation_y(b) * rotation_z(g)
    }
}

fn rotation_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rotation_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Body axis `n_3 = (cos a sin b, sin a sin b, cos b)` for the angles `(a, b)`.
pub fn body_axis(alpha: f64, beta: f64) -> Vec3 {
    Vec3::new(alpha.cos() * beta.sin(), alpha.sin() * beta.sin(), beta.cos())
}

/// The two branches of a superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionPair {
    pub pose_a: Pose,
    pub pose_b: Pose,
}

impl SuperpositionPair {
    pub fn new(pose_a: Pose, pose_b: Pose) -> Self {
        Self { pose_a, pose_b }
    }
}
