//! Saddle-point estimate of `σ(u)` for the extremal profile.
//!
//! The saddle `ξ(u)` is the real solution of `(k+1)e^ξ = k + uξ`, given by
//! `ξ = −W(−(k+1)e^{−k/u}/u) − k/u` with `W₀` below `u = k` and `W₋₁` above.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::sigma::SigmaSolution;
use crate::specfun::{ein_real, euler_gamma, lambert_w, log_gamma_of_k, WBranch};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleEstimate<T> {
    pub k: T,
    pub u: T,
    pub xi: T,
    pub main_term: T,
    /// `log |main_term|`, finite even where `main_term` overflows.
    pub log_abs_main_term: T,
    pub in_range: bool,
    pub branch_used: WBranch,
}

/// Whether `(k, u)` satisfies `k ≥ 3`, `k/(2 log k) ≤ u ≤ 10k` and
/// `|u − k| ≥ 2√k`.
pub fn in_saddle_range<T: Real>(k: T, u: T) -> bool {
    k >= lit(3.0)
        && u >= k / (lit::<T>(2.0) * k.ln())
        && u <= lit::<T>(10.0) * k
        && (u - k).abs() >= lit::<T>(2.0) * k.sqrt()
}

/// `ξ(u)` and the branch used. Fails only where the Lambert argument drops
/// below `−1/e` and no real saddle exists.
pub fn xi_of<T: Real>(k: T, u: T) -> Result<(T, WBranch)> {
    if !(u > T::zero()) || !(k > T::zero()) {
        return Err(Error::Domain(format!("xi needs k, u > 0 (k={}, u={})", to_f64(k), to_f64(u))));
    }
    let arg = -(k + T::one()) * (-k / u).exp() / u;
    if arg < -T::E().recip() * (T::one() + lit::<T>(4.0) * T::epsilon()) {
        return Err(Error::Band { k: to_f64(k), u: to_f64(u) });
    }
    let branch = if u < k { WBranch::Principal } else { WBranch::Lower };
    let w = lambert_w(branch, arg.max(-T::E().recip()))?;
    Ok((-w - k / u, branch))
}

/// `I''(ξ) = (ξe^ξ − e^ξ + 1)/ξ²`.
pub fn ein_second_derivative<T: Real>(xi: T) -> T {
    if xi.abs() < T::one() {
        // Σ (n+1) ξⁿ/(n+2)!
        let mut sum = T::zero();
        let mut fact = lit::<T>(2.0);
        let mut pw = T::one();
        for n in 0..24u32 {
            sum = sum + lit::<T>(f64::from(n + 1)) * pw / fact;
            pw = pw * xi;
            fact = fact * lit::<T>(f64::from(n + 3));
        }
        sum
    } else {
        let e = xi.exp();
        (xi * e - e + T::one()) / (xi * xi)
    }
}

/// Main term `−Γ(k) ξ e^{(k+1)(γ+I(ξ)) − uξ} / √(2π(k+1)I''(ξ))`.
pub fn sigma_saddle<T: Real>(k: T, u: T) -> Result<SaddleEstimate<T>> {
    let (xi, branch) = xi_of(k, u)?;
    let kp1 = k + T::one();
    let log_abs = log_gamma_of_k(k) + xi.abs().ln() + kp1 * (euler_gamma::<T>() + ein_real(xi)) - u * xi
        - lit::<T>(0.5) * (lit::<T>(2.0) * T::PI() * kp1 * ein_second_derivative(xi)).ln();
    let sign = if xi > T::zero() {
        -T::one()
    } else if xi < T::zero() {
        T::one()
    } else {
        T::zero()
    };
    Ok(SaddleEstimate {
        k,
        u,
        xi,
        main_term: sign * log_abs.exp(),
        log_abs_main_term: log_abs,
        in_range: in_saddle_range(k, u),
        branch_used: branch,
    })
}

/// Window `[max(k − 3k^{0.6}, k/log k), k + 3k^{0.6}]` expected to contain the
/// first zero of the extremal `σ`.
pub fn theorem3_first_zero_window<T: Real>(k: T) -> Result<(T, T)> {
    if !(k >= lit(3.0)) {
        return Err(Error::Precondition(format!("window needs k >= 3, got {}", to_f64(k))));
    }
    let spread = lit::<T>(3.0) * k.powf(lit(0.6));
    Ok(((k - spread).max(k / k.ln()), k + spread))
}

/// CSV `u,xi,saddle,dde` comparing the estimate with a delay-equation solution.
/// Points without a real saddle get empty estimate cells.
pub fn saddle_table<T: Real>(k: T, us: &[T], dde: &SigmaSolution<T>) -> Result<String> {
    let mut out = String::from("u,xi,saddle,dde\n");
    for &u in us {
        let d = to_f64(dde.sigma_at(u)?);
        match sigma_saddle(k, u) {
            Ok(s) => {
                let _ = writeln!(out, "{:.6},{:.12e},{:.12e},{:.12e}", to_f64(u), to_f64(s.xi), to_f64(s.main_term), d);
            }
            Err(Error::Band { .. }) => {
                let _ = writeln!(out, "{:.6},,,{:.12e}", to_f64(u), d);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(k: f64, u: f64, xi: f64) -> f64 {
        (k + 1.0) * xi.exp() - k - u * xi
    }

    #[test]
    fn xi_small_u_principal() {
        let (xi, b) = xi_of(4.0, 1.0).unwrap();
        assert_eq!(b, WBranch::Principal);
        assert!(residual(4.0, 1.0, xi).abs() < 1e-10);
        assert!(xi < 0.0);
    }

    #[test]
    fn xi_large_u_lower() {
        let (xi, b) = xi_of(4.0, 30.0).unwrap();
        assert_eq!(b, WBranch::Lower);
        assert!(xi > 0.0);
        assert!(residual(4.0, 30.0, xi).abs() < 1e-10 * 5.0);
    }

    #[test]
    fn xi_band_edge_argument() {
        // below k the edge u = k − 2√k clears k + 4/3; above k the margin over
        // k + 1 is thinner and vanishes for small k
        for &k in &[9.0f64, 25.0, 100.0, 1e4] {
            let u = k - 2.0 * k.sqrt();
            assert!(u * ((k - u) / u).exp() >= k + 4.0 / 3.0);
            assert!(xi_of(k, u).is_ok());
        }
        for &k in &[9.0f64, 25.0, 100.0, 1e4] {
            let u = k + 2.0 * k.sqrt();
            assert!(u * ((k - u) / u).exp() > k + 1.0);
            assert!(xi_of(k, u).is_ok());
        }
        let u = 25.0f64 + 10.0;
        assert!(u * ((25.0 - u) / u).exp() < 25.0 + 4.0 / 3.0);
        assert!(matches!(xi_of(4.0, 8.0), Err(Error::Band { .. })));
    }

    #[test]
    fn xi_band_error() {
        assert!(matches!(xi_of(30.0, 30.0), Err(Error::Band { .. })));
    }

    #[test]
    fn second_derivative_series_matches() {
        // I''(x) = ∫₀¹ t e^{xt} dt, by composite Simpson
        let simpson = |x: f64| {
            let n = 2000;
            let h = 1.0 / n as f64;
            let f = |t: f64| t * (x * t).exp();
            let mut s = f(0.0) + f(1.0);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            s * h / 3.0
        };
        for &x in &[-0.5, -0.009, -1e-4, 1e-5, 0.009, 0.011, 2.0] {
            assert!((ein_second_derivative(x) - simpson(x)).abs() < 1e-12, "x={x}");
        }
        assert!((ein_second_derivative(0.0f64) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn sign_law() {
        let s = sigma_saddle(30.0, 15.0).unwrap();
        assert!(s.main_term > 0.0 && s.in_range);
        let s = sigma_saddle(30.0, 45.0).unwrap();
        assert!(s.main_term < 0.0 && s.in_range);
        let s = sigma_saddle(30.0, 2.0).unwrap();
        assert!(!s.in_range);
    }

    #[test]
    fn window() {
        let (lo, hi) = theorem3_first_zero_window(100.0f64).unwrap();
        assert!((lo - 52.45).abs() < 0.1 && (hi - 147.55).abs() < 0.1);
        let (lo, _) = theorem3_first_zero_window(10.0).unwrap();
        assert!((lo - 10.0 / 10f64.ln()).abs() < 1e-12);
        assert!(theorem3_first_zero_window(1.0).is_err());
    }
}
