//! Adaptive Gauss-Kronrod quadrature and semi-infinite Bessel-type integrals.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::{Error, Result, C64};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Rule<T> {
    value: T,
    error: f64,
    l1: f64,
}

fn gauss_kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Rule<T> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.magnitude() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        kronrod = kronrod + s * WGK[j];
        l1 += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    Rule {
        value: kronrod * h,
        error: ((kronrod - gauss) * h).magnitude(),
        l1: l1 * h.abs(),
    }
}

struct Piece<T> {
    a: f64,
    b: f64,
    rule: Rule<T>,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rule.error == other.rule.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rule.error.total_cmp(&other.rule.error)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    /// Integral of the magnitude of the integrand.
    pub l1: f64,
}

/// Globally adaptive 15-point Gauss-Kronrod integration on `[a, b]`.
///
/// Stops when the error estimate drops below `max(abs_tol, rel_tol * l1)`.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate<T>> {
    let first = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut value = first.value;
    let mut error = first.error;
    let mut l1 = first.l1;
    heap.push(Piece { a, b, rule: first });
    while error > abs_tol.max(rel_tol * l1) {
        if heap.len() >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{a}, {b}] after {max_intervals} subintervals (error {error:e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, m);
        let right = gauss_kronrod(&f, m, worst.b);
        value = value - worst.rule.value + left.value + right.value;
        error += left.error + right.error - worst.rule.error;
        l1 += left.l1 + right.l1 - worst.rule.l1;
        heap.push(Piece { a: worst.a, b: m, rule: left });
        heap.push(Piece { a: m, b: worst.b, rule: right });
        if error <= abs_tol.max(rel_tol * l1) {
            value = heap.iter().fold(T::zero(), |acc, p| acc + p.rule.value);
            error = heap.iter().map(|p| p.rule.error).sum();
        }
    }
    Ok(Estimate { value, error, l1 })
}

/// Positive zeros of `J_0`, refined by Newton iteration from McMahon's expansion.
pub fn bessel_j0_zeros(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|s| {
            let beta = (s as f64 - 0.25) * std::f64::consts::PI;
            let b8 = 8.0 * beta;
            let mut x = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3));
            for _ in 0..8 {
                let dx = puruspe::Jn(0, x) / puruspe::Jn(1, x);
                x += dx;
                if dx.abs() < 1e-16 * x {
                    break;
                }
            }
            x
        })
        .collect()
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let p = prev[i + 1];
            next.push(if d == 0.0 { f64::INFINITY } else { p + 1.0 / d });
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Settings for [`integrate_oscillatory_tail`].
#[derive(Debug, Clone, Copy)]
pub struct TailSettings {
    pub rel_tol: f64,
    /// Absolute error floor for each panel, typically `rel_tol` times the expected size of the result.
    pub abs_tol: f64,
    /// Contributions of an end panel below this fraction of the running sum stop the integration.
    pub truncation: f64,
    pub max_panels: usize,
}

impl Default for TailSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 0.0, truncation: 1e-12, max_panels: 20_000 }
    }
}

fn panel_floor(settings: TailSettings, l1_total: f64) -> f64 {
    settings.abs_tol.max(1e-2 * settings.rel_tol * l1_total).max(1e-300)
}

fn tail_sum<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    edges: &mut dyn Iterator<Item = f64>,
    settings: TailSettings,
) -> Result<(T, Vec<T>)> {
    let mut total = T::zero();
    let mut l1_total = 0.0;
    let mut partial = Vec::new();
    let mut small_run = 0;
    let mut a = 0.0;
    for (count, b) in edges.enumerate() {
        if count >= settings.max_panels {
            return Err(Error::QuadratureFailure(format!(
                "semi-infinite integral not converged after {} panels",
                settings.max_panels
            )));
        }
        let est = integrate(f, a, b, panel_floor(settings, l1_total), settings.rel_tol, 400)?;
        total = total + est.value;
        l1_total += est.l1;
        partial.push(total);
        if est.l1 <= settings.truncation * total.magnitude().max(1e-3 * l1_total) {
            small_run += 1;
            if small_run >= 3 {
                return Ok((total, Vec::new()));
            }
        } else {
            small_run = 0;
        }
        if l1_total == 0.0 && count > 64 {
            return Ok((total, Vec::new()));
        }
        a = b;
    }
    Ok((total, partial))
}

/// Integral over `k in [0, inf)` of an integrand whose envelope decays like
/// `exp(-decay k)` and which oscillates with the period of `J_m(k rho)`.
///
/// Panels end at the zeros of `J_0(k rho)` (first 40), are limited in width
/// by `1/decay`, and continue half-period by half-period beyond. When the
/// exponential envelope is too weak to truncate, the alternating sequence of
/// partial sums is accelerated with the Wynn epsilon algorithm.
pub fn integrate_oscillatory_tail<F: Fn(f64) -> f64>(
    f: F,
    rho: f64,
    decay: f64,
    settings: TailSettings,
) -> Result<f64> {
    if !(decay > 0.0 || rho > 0.0) {
        return Err(Error::QuadratureFailure("integrand neither decays nor oscillates".into()));
    }
    let width = if decay > 0.0 { 1.0 / decay } else { f64::INFINITY };
    if rho <= 0.0 {
        let mut edges = (1..).map(|i| i as f64 * width);
        let (v, _) = tail_sum(&f, &mut edges, settings)?;
        return Ok(v);
    }
    let zeros = bessel_j0_zeros(40);
    let half = std::f64::consts::PI / rho;
    let mut edges: Vec<f64> = Vec::new();
    let mut last = 0.0;
    let push = |edges: &mut Vec<f64>, b: f64, last: &mut f64| {
        let n = ((b - *last) / width).ceil().max(1.0) as usize;
        for j in 1..=n {
            edges.push(*last + (b - *last) * j as f64 / n as f64);
        }
        *last = b;
    };
    for z in &zeros {
        push(&mut edges, z / rho, &mut last);
    }
    let head = edges.len();
    let beyond = (1..).map(|j| zeros[39] / rho + j as f64 * half);
    let mut tail_edges: Vec<f64> = Vec::new();
    for b in beyond.take(settings.max_panels) {
        push(&mut tail_edges, b, &mut last);
        if tail_edges.len() + head >= settings.max_panels {
            break;
        }
    }
    let mut all = edges.into_iter().chain(tail_edges);
    let mut total = 0.0;
    let mut l1_total = 0.0;
    let mut small_run = 0;
    let mut a = 0.0;
    let mut sums_at_zeros = Vec::new();
    let mut next_zero = zeros[39] / rho + half;
    let mut extrapolations: Vec<f64> = Vec::new();
    for (count, b) in all.by_ref().enumerate() {
        let est = integrate(&f, a, b, panel_floor(settings, l1_total), settings.rel_tol, 400)?;
        total += est.value;
        l1_total += est.l1;
        if est.l1 <= settings.truncation * total.abs().max(1e-3 * l1_total) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(total);
            }
        } else {
            small_run = 0;
        }
        if count >= head && (b - next_zero).abs() <= 1e-9 * b {
            sums_at_zeros.push(total);
            next_zero += half;
            if sums_at_zeros.len() >= 8 {
                let start = sums_at_zeros.len().saturating_sub(40);
                let e = wynn_epsilon(&sums_at_zeros[start..]);
                extrapolations.push(e);
                let m = extrapolations.len();
                if m >= 3 {
                    let d1 = (extrapolations[m - 1] - extrapolations[m - 2]).abs();
                    let d2 = (extrapolations[m - 2] - extrapolations[m - 3]).abs();
                    let scale = e.abs().max(1e-6 * l1_total);
                    if d1.max(d2) <= 1e-10 * scale {
                        return Ok(e);
                    }
                }
            }
        }
        a = b;
    }
    Err(Error::QuadratureFailure(format!(
        "oscillatory tail not converged after {} panels",
        settings.max_panels
    )))
}

/// Complex version of [`integrate_oscillatory_tail`]; real and imaginary parts
/// are integrated separately.
pub fn integrate_oscillatory_tail_complex<F: Fn(f64) -> C64>(
    f: F,
    rho: f64,
    decay: f64,
    settings: TailSettings,
) -> Result<C64> {
    let re = integrate_oscillatory_tail(|k| f(k).re, rho, decay, settings)?;
    let im = integrate_oscillatory_tail(|k| f(k).im, rho, decay, settings)?;
    Ok(C64::new(re, im))
}

/// Non-oscillatory semi-infinite integral with exponential envelope `exp(-decay k)`.
pub fn integrate_decaying<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    decay: f64,
    settings: TailSettings,
) -> Result<T> {
    if !(decay > 0.0) {
        return Err(Error::QuadratureFailure("integrand does not decay".into()));
    }
    let width = 1.0 / decay;
    let mut edges = (1..).map(|i| i as f64 * width);
    Ok(tail_sum(&f, &mut edges, settings)?.0)
}
