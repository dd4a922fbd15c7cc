//! Linear rotor in the angular momentum basis `|l, m>`.

use nalgebra::DMatrix;

use super::wigner::wigner3j;
use super::CMatrix;
use crate::constants::HBAR;
use crate::C64;

/// States `|l, m>` for `l = 0..=l_max`, `m = -l..=l`, at index `l^2 + l + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularMomentumBasis {
    l_max: usize,
}

impl AngularMomentumBasis {
    pub fn new(l_max: usize) -> Self {
        Self { l_max }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        (self.l_max + 1) * (self.l_max + 1)
    }

    pub fn index(&self, l: usize, m: i32) -> usize {
        debug_assert!(l <= self.l_max && m.unsigned_abs() as usize <= l);
        ((l * l + l) as i64 + m as i64) as usize
    }

    pub fn state(&self, idx: usize) -> (usize, i32) {
        let mut l = 0;
        while (l + 1) * (l + 1) <= idx {
            l += 1;
        }
        (l, idx as i32 - (l * l + l) as i32)
    }

    pub fn label(&self, idx: usize) -> String {
        let (l, m) = self.state(idx);
        format!("{l},{m}")
    }

    /// Rotational energy `hbar^2 l (l + 1) / (2 I)`.
    pub fn energy(l: usize, inertia: f64) -> f64 {
        HBAR * HBAR * (l * (l + 1)) as f64 / (2.0 * inertia)
    }

    /// Transition frequency `hbar (l + 1) / I` between `l + 1` and `l`.
    pub fn transition_frequency(l: usize, inertia: f64) -> f64 {
        HBAR * (l + 1) as f64 / inertia
    }

    pub fn energies(&self, inertia: f64) -> Vec<f64> {
        (0..self.dim()).map(|i| Self::energy(self.state(i).0, inertia)).collect()
    }
}

/// Matrix elements `<l, m| n_i |l', m'>` of the unit orientation vector.
pub fn dipole_coefficients(l: i32, m: i32, lp: i32, mp: i32) -> [C64; 3] {
    let zero = C64::new(0.0, 0.0);
    if (l - lp).abs() != 1 || (m - mp).abs() > 1 || m.abs() > l || mp.abs() > lp {
        return [zero; 3];
    }
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let base = sign * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * wigner3j(l, lp, 1, 0, 0, 0);
    let minus = wigner3j(l, lp, 1, -m, mp, -1);
    let plus = wigner3j(l, lp, 1, -m, mp, 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        C64::new(base * s * (minus - plus), 0.0),
        C64::new(0.0, base * s * (minus + plus)),
        C64::new(base * wigner3j(l, lp, 1, -m, mp, 0), 0.0),
    ]
}

/// Full orientation operator `n_i` on the basis.
pub fn orientation_operator(basis: &AngularMomentumBasis, i: usize) -> CMatrix {
    let n = basis.dim();
    DMatrix::from_fn(n, n, |a, b| {
        let (l, m) = basis.state(a);
        let (lp, mp) = basis.state(b);
        dipole_coefficients(l as i32, m, lp as i32, mp)[i]
    })
}

/// Lowering part `n_{l,i} = P_l n_i P_{l+1}`, mapping the `l + 1` manifold onto `l`.
pub fn lowering_component(basis: &AngularMomentumBasis, l: usize, i: usize) -> CMatrix {
    let n = basis.dim();
    DMatrix::from_fn(n, n, |a, b| {
        let (la, ma) = basis.state(a);
        let (lb, mb) = basis.state(b);
        if la == l && lb == l + 1 {
            dipole_coefficients(la as i32, ma, lb as i32, mb)[i]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
