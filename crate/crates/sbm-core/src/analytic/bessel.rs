//! First-kind Bessel functions `J_m(x)` for integer order.
//!
//! Ascending power series below the switchover, Miller-style backward
//! recurrence normalized by the even-order sum identity
//! `J_0 + 2(J_2 + J_4 + ⋯) = 1` above it. Desk-scale domain
//! `m ≤ 60`, `0 ≤ x ≤ 60`, absolute error ≤ 1e-12.

use crate::error::{Result, SbmError};

pub const MAX_ORDER: u32 = 60;
pub const MAX_ARGUMENT: f64 = 60.0;

/// Series/recurrence switchover; series term count and cancellation
/// both stay benign below it.
const SERIES_SWITCH: f64 = 12.0;

/// `J_m(x)` for `m ≤ 60`, `0 ≤ x ≤ 60`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(SbmError::DomainExceeded(format!(
            "Bessel order {order} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    if !x.is_finite() || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(SbmError::DomainExceeded(format!(
            "Bessel argument {x} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_SWITCH {
        Ok(series(order, x))
    } else {
        Ok(miller(order, x))
    }
}

/// Ascending power series with term recurrence and compensated
/// summation: `J_m(x) = Σ_k (−1)^k (x/2)^{m+2k} / (k! (m+k)!)`.
fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // t_0 = (x/2)^m / m!
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let ratio = -half * half;
    let mut sum = term;
    let mut compensation = 0.0;
    for k in 1..400 {
        term *= ratio / (k as f64 * (order as f64 + k as f64));
        let adjusted = term - compensation;
        let next = sum + adjusted;
        compensation = (next - sum) - adjusted;
        sum = next;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

/// Backward (Miller) recurrence from a high starting order, normalized
/// by `J_0 + 2 Σ_{k even} J_k = 1`.
fn miller(order: u32, x: f64) -> f64 {
    let start = starting_order(order, x);
    let mut above = 0.0_f64; // J̃_{k+1}
    let mut current = 1e-30_f64; // J̃_k
    let mut result = if start == order as usize { current } else { 0.0 };
    let mut even_sum = if start.is_multiple_of(2) { current } else { 0.0 };
    for k in (1..=start).rev() {
        let below = (2.0 * k as f64 / x) * current - above;
        above = current;
        current = below;
        let level = k - 1;
        if level == order as usize {
            result = current;
        }
        if level > 0 && level.is_multiple_of(2) {
            even_sum += current;
        }
        // Rescale before overflow; every accumulator scales together.
        if current.abs() > 1e250 {
            let scale = 1e-250;
            above *= scale;
            current *= scale;
            result *= scale;
            even_sum *= scale;
        }
    }
    let norm = current + 2.0 * even_sum;
    result / norm
}

/// Starting order high enough that the unnormalized recurrence has
/// converged to the true ratio by the time it reaches `order`.
fn starting_order(order: u32, x: f64) -> usize {
    let base = (order as f64).max(x);
    (base + 12.0 * (base + 1.0).cbrt() + 24.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: midpoint discretization of the integral
    /// representation `J_m(x) = (1/π)∫₀^π cos(mθ − x sin θ) dθ`.
    /// Aliasing errors involve orders ≥ 2N − m, negligible for the
    /// domain here.
    fn integral_oracle(order: u32, x: f64) -> f64 {
        let n = 512;
        let mut sum = 0.0;
        for j in 0..n {
            let theta = (j as f64 + 0.5) * std::f64::consts::PI / n as f64;
            sum += (order as f64 * theta - x * theta.sin()).cos();
        }
        sum / n as f64
    }

    /// Truncated power-series oracle (30 terms), adequate for small x.
    fn series_oracle(order: u32, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = 1.0;
        for k in 1..=order {
            term *= half / k as f64;
        }
        let mut sum = term;
        for k in 1..=30 {
            term *= -half * half / (k as f64 * (order as f64 + k as f64));
            sum += term;
        }
        sum
    }

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(bessel_j(1, 1.0).unwrap(), 0.4400505857, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(2, 2.0).unwrap(), 0.3528340286, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(3, 3.0).unwrap(), 0.3090627222, epsilon = 1e-10);
    }

    #[test]
    fn matches_series_oracle_small_arguments() {
        for order in [0u32, 1, 2, 3, 5, 9] {
            for &x in &[0.1, 0.5, 1.0, 2.0, 4.0, 6.0] {
                let value = bessel_j(order, x).unwrap();
                assert_abs_diff_eq!(value, series_oracle(order, x), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn matches_integral_oracle_across_domain() {
        // Exercises both the series and the Miller branch.
        for order in [0u32, 1, 2, 5, 10, 25, 40, 60] {
            for &x in &[0.5, 3.0, 11.9, 12.1, 20.0, 35.0, 47.3, 60.0] {
                let value = bessel_j(order, x).unwrap();
                let oracle = integral_oracle(order, x);
                assert!(
                    (value - oracle).abs() < 1e-12,
                    "J_{order}({x}): {value} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn normalization_identity() {
        // |J_0² + 2Σ J_k² − 1| ≤ 1e-12 for x ≤ 10, K = x + 40.
        for &x in &[0.5, 1.0, 2.5, 5.0, 7.5, 10.0] {
            let top = x as u32 + 40;
            let mut sum = bessel_j(0, x).unwrap().powi(2);
            for k in 1..=top {
                sum += 2.0 * bessel_j(k, x).unwrap().powi(2);
            }
            assert!((sum - 1.0).abs() < 1e-12, "normalization at x = {x}: {sum}");
        }
    }

    #[test]
    fn three_term_recurrence_consistency() {
        // J_{m−1}(x) + J_{m+1}(x) = (2m/x) J_m(x) across the switchover.
        for &x in &[6.0, 11.5, 12.5, 30.0, 55.0] {
            for m in 1u32..=40 {
                let lhs = bessel_j(m - 1, x).unwrap() + bessel_j(m + 1, x).unwrap();
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-11,
                    "recurrence at m = {m}, x = {x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn domain_limits_enforced() {
        assert!(bessel_j(61, 1.0).is_err());
        assert!(bessel_j(1, 60.5).is_err());
        assert!(bessel_j(1, -0.1).is_err());
        assert!(bessel_j(60, 60.0).is_ok());
    }
}
