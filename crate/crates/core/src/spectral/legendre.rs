use crate::error::{invalid, Result};

/// Shifted Legendre polynomial `P_i(x)` on `[0,1]`.
pub fn legendre_eval(i: usize, x: f64) -> f64 {
    let t = 2.0 * x - 1.0;
    if i == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, t);
    for k in 1..i {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Writes `P_0(x), …, P_n(x)` into `out[..=n]`.
pub fn legendre_values(n: usize, x: f64, out: &mut [f64]) {
    let t = 2.0 * x - 1.0;
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = t;
    for k in 1..n {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * t * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Writes `P_0'(x), …, P_n'(x)` given the values from [`legendre_values`].
pub fn legendre_derivatives(n: usize, values: &[f64], out: &mut [f64]) {
    out[0] = 0.0;
    if n == 0 {
        return;
    }
    out[1] = 2.0;
    for k in 1..n {
        out[k + 1] = out[k - 1] + 2.0 * (2.0 * k as f64 + 1.0) * values[k];
    }
}

fn check(i: usize, x: f64) -> Result<()> {
    if i == 0 {
        return Err(invalid("basis index must be at least 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(alloc::format!("point {x} outside [0,1]")));
    }
    Ok(())
}

/// `ψ_i(x) = (P_{i−1} − P_{i+1}) / (2(2i+1))`.
pub fn psi_eval(i: usize, x: f64) -> Result<f64> {
    check(i, x)?;
    Ok((legendre_eval(i - 1, x) - legendre_eval(i + 1, x)) / (2.0 * (2 * i + 1) as f64))
}

/// `ψ_i'(x) = −P_i(x)`.
pub fn psi_deriv(i: usize, x: f64) -> Result<f64> {
    check(i, x)?;
    Ok(-legendre_eval(i, x))
}

/// `ψ_i''(x) = −P_i'(x)`.
pub fn psi_second_deriv(i: usize, x: f64) -> Result<f64> {
    check(i, x)?;
    let mut v = alloc::vec![0.0; i + 1];
    let mut d = alloc::vec![0.0; i + 1];
    legendre_values(i, x, &mut v);
    legendre_derivatives(i, &v, &mut d);
    Ok(-d[i])
}

/// Values, first and second derivatives of `ψ_1..ψ_n` at `x`, written to
/// `val[i-1]`, `d1[i-1]`, `d2[i-1]`. `scratch` needs `2(n+2)` entries.
pub fn psi_values(n: usize, x: f64, val: &mut [f64], d1: &mut [f64], d2: &mut [f64], scratch: &mut [f64]) {
    let (p, dp) = scratch.split_at_mut(n + 2);
    legendre_values(n + 1, x, p);
    legendre_derivatives(n + 1, p, dp);
    for i in 1..=n {
        val[i - 1] = (p[i - 1] - p[i + 1]) / (2.0 * (2 * i + 1) as f64);
        d1[i - 1] = -p[i];
        d2[i - 1] = -dp[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_one_is_the_bubble() {
        for x in [0.0, 0.1, 0.5, 0.77, 1.0] {
            assert!((psi_eval(1, x).unwrap() - x * (1.0 - x)).abs() < 1e-15);
        }
        assert!(psi_eval(0, 0.5).is_err());
        assert!(psi_eval(1, 1.5).is_err());
    }

    #[test]
    fn derivative_recurrence_matches_difference_quotient() {
        let h = 1e-6;
        for i in 1..12 {
            let fd = (psi_eval(i, 0.3 + h).unwrap() - psi_eval(i, 0.3 - h).unwrap()) / (2.0 * h);
            assert!((fd - psi_deriv(i, 0.3).unwrap()).abs() < 1e-7);
            let fd2 = (psi_deriv(i, 0.3 + h).unwrap() - psi_deriv(i, 0.3 - h).unwrap()) / (2.0 * h);
            assert!((fd2 - psi_second_deriv(i, 0.3).unwrap()).abs() < 1e-5 * (i * i) as f64);
        }
    }
}
