//! Wigner 3-j symbols for integer angular momenta.

fn ln_factorial(n: i32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)` from the Racah sum.
///
/// Returns 0 whenever a selection rule fails: `m1 + m2 + m3 != 0`, `|m_i| > j_i`
/// or the triangle condition on `(j1, j2, j3)`.
pub fn wigner3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if j1 < 0 || j2 < 0 || j3 < 0 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return 0.0;
    }
    let ln_delta = ln_factorial(j1 + j2 - j3) + ln_factorial(j1 - j2 + j3) + ln_factorial(-j1 + j2 + j3)
        - ln_factorial(j1 + j2 + j3 + 1);
    let ln_m = ln_factorial(j1 + m1)
        + ln_factorial(j1 - m1)
        + ln_factorial(j2 + m2)
        + ln_factorial(j2 - m2)
        + ln_factorial(j3 + m3)
        + ln_factorial(j3 - m3);
    let prefactor = 0.5 * (ln_delta + ln_m);
    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = ln_factorial(k)
            + ln_factorial(j3 - j2 + k + m1)
            + ln_factorial(j3 - j1 + k - m2)
            + ln_factorial(j1 + j2 - j3 - k)
            + ln_factorial(j1 - k - m1)
            + ln_factorial(j2 - k + m2);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (prefactor - ln_den).exp();
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * sum
}
