//! Directional derivatives of `1/|s|` and of its Bessel representation
//! `exp(-k s_z) J_0(k rho)`.

use crate::{Vec3, C64};

/// `(2k - 1)!!` for small `k`, with `(-1)!! = 1`.
fn double_factorial_odd(k: usize) -> f64 {
    (1..=k).map(|j| (2 * j - 1) as f64).product()
}

/// Mixed directional derivative `(a_1 . grad) ... (a_n . grad) 1/|s|`.
///
/// Uses Faa di Bruno on `(s . s)^(-1/2)`: every partition of the directions
/// into singletons `a . s` and pairs `a . b` contributes
/// `(-1)^k (2k-1)!! |s|^-(2k+1)` times the product of its blocks, where `k`
/// counts the blocks.
pub fn inverse_distance(s: &Vec3, dirs: &[Vec3]) -> f64 {
    let n = dirs.len();
    let r2 = s.norm_squared();
    let r = r2.sqrt();
    if n == 0 {
        return 1.0 / r;
    }
    let lin: Vec<f64> = dirs.iter().map(|a| a.dot(s)).collect();
    let mut pair = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            pair[i * n + j] = dirs[i].dot(&dirs[j]);
        }
    }
    let mut by_blocks = vec![0.0; n + 1];
    partitions(0u32, n, 0, 1.0, &lin, &pair, &mut by_blocks);
    let mut total = 0.0;
    for (k, c) in by_blocks.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * double_factorial_odd(k) * c / r.powi(2 * k as i32 + 1);
    }
    total
}

fn partitions(used: u32, n: usize, blocks: usize, product: f64, lin: &[f64], pair: &[f64], out: &mut [f64]) {
    let first = (0..n).find(|&i| used & (1 << i) == 0);
    let Some(i) = first else {
        out[blocks] += product;
        return;
    };
    let used_i = used | (1 << i);
    partitions(used_i, n, blocks + 1, product * lin[i], lin, pair, out);
    for j in (i + 1)..n {
        if used_i & (1 << j) == 0 {
            partitions(used_i | (1 << j), n, blocks + 1, product * pair[i * n + j], lin, pair, out);
        }
    }
}

/// Precomputed angular structure of
/// `(a_1 . grad) ... (a_n . grad) [exp(-k s_z) J_0(k rho)]`.
///
/// Each derivative multiplies the plane-wave representation by
/// `k (-a_z + i (a_x cos phi + a_y sin phi))`; averaging over `phi` turns
/// `exp(i m phi)` into `i^m J_m(k rho) exp(i m phi_0)`.
#[derive(Debug, Clone)]
pub struct SpectralDerivative {
    order: usize,
    rho: f64,
    sz: f64,
    /// `(|m|, coefficient)` with the coefficient multiplying `J_|m|(k rho)`.
    terms: Vec<(u32, C64)>,
}

impl SpectralDerivative {
    pub fn new(s: &Vec3, dirs: &[Vec3]) -> Self {
        let n = dirs.len();
        let i = C64::new(0.0, 1.0);
        // Laurent coefficients for powers w^m, m = -n..n, stored at m + n.
        let mut poly = vec![C64::new(0.0, 0.0); 2 * n + 1];
        poly[n] = C64::new(1.0, 0.0);
        for a in dirs {
            let up = 0.5 * i * C64::new(a.x, -a.y);
            let down = 0.5 * i * C64::new(a.x, a.y);
            let mut next = vec![C64::new(0.0, 0.0); 2 * n + 1];
            for (idx, &c) in poly.iter().enumerate() {
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                next[idx] += c * (-a.z);
                if idx + 1 < next.len() {
                    next[idx + 1] += c * up;
                }
                if idx > 0 {
                    next[idx - 1] += c * down;
                }
            }
            poly = next;
        }
        let rho = (s.x * s.x + s.y * s.y).sqrt();
        let phi0 = if rho > 0.0 { s.y.atan2(s.x) } else { 0.0 };
        let mut by_order = vec![C64::new(0.0, 0.0); n + 1];
        for (idx, &c) in poly.iter().enumerate() {
            let m = idx as i64 - n as i64;
            if rho == 0.0 && m != 0 {
                continue;
            }
            let im = i.powi(m as i32);
            let sign = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
            let phase = C64::from_polar(1.0, m as f64 * phi0);
            by_order[m.unsigned_abs() as usize] += c * im * phase * sign;
        }
        let terms = by_order
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(m, c)| (m as u32, c))
            .collect();
        Self { order: n, rho, sz: s.z, terms }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Value of the derivative of `exp(-k (s_z + shift)) J_0(k rho)` at wavenumber `k`.
    pub fn at(&self, k: f64, shift: f64) -> f64 {
        let mut sum = 0.0;
        for &(m, c) in &self.terms {
            sum += c.re * puruspe::Jn(m, k * self.rho);
        }
        sum * k.powi(self.order as i32) * (-k * (self.sz + shift)).exp()
    }
}
