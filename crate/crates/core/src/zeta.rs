//! Riemann zeta at integer arguments and the constants built from it.

use crate::arith::factorial;

/// `zeta(s)` for integer `s >= 2`, by Euler-Maclaurin summation (error below 1e-15).
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta is only provided for s >= 2");
    const N: u32 = 256;
    let sf = s as f64;
    let head: f64 = (1..N).rev().map(|n| (n as f64).powf(-sf)).sum();
    let n = N as f64;
    let tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf) + sf / 12.0 * n.powf(-sf - 1.0)
        - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * n.powf(-sf - 3.0);
    head + tail
}

/// `beta_n = (zeta(d+1) / zeta(d) / n)^(1/(d+1))`.
pub fn beta_n(d: usize, n: f64) -> f64 {
    (zeta(d as u32 + 1) / zeta(d as u32) / n).powf(1.0 / (d as f64 + 1.0))
}

/// Constant of the strict growth law: `((d+1)! zeta(d+1) / zeta(d))^(1/(d+1))`.
pub fn c_strict(d: usize) -> f64 {
    (factorial(d + 1) * zeta(d as u32 + 1) / zeta(d as u32)).powf(1.0 / (d as f64 + 1.0))
}

/// Constant of the non-strict growth law: `((d+1)! zeta(d+1))^(1/(d+1))`.
pub fn c_nonstrict(d: usize) -> f64 {
    (factorial(d + 1) * zeta(d as u32 + 1)).powf(1.0 / (d as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert!((zeta(2) - PI * PI / 6.0).abs() < 2e-15);
        assert!((zeta(4) - PI.powi(4) / 90.0).abs() < 2e-15);
        assert!((zeta(3) - 1.202_056_903_159_594_3).abs() < 2e-15);
        assert!((zeta(6) - PI.powi(6) / 945.0).abs() < 2e-15);
    }

    #[test]
    fn beta_for_n_500() {
        let b = beta_n(2, 500.0);
        assert!((b - 0.113_484).abs() < 1e-6, "{b}");
    }

    #[test]
    fn planar_constant() {
        assert!((c_strict(2) - 1.636_725_8).abs() < 1e-7);
    }
}
