//! Non-Galois cubic fields: the lower bound for `σ(2A)` assembled from an
//! upper bound on `I₁`, a lower bound on `I₂` and the crude `I₃'` term, and the
//! largest `A` keeping it positive.

use crate::error::{Error, Result};
use crate::incexc::{eval_i3prime, eval_ij, IncExcConfig};
use crate::profiles::{cubic_l_profile, cubic_u_profile, CharEnvelope};
use crate::quad::{integrate_real, QuadOptions};
use crate::scalar::{lit, to_f64, Real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exponent for Galois cubic fields, where `N ≪ q^{1/4+ε} ≪ d_K^{1/8+ε}`.
pub const GALOIS_CUBIC_EXPONENT: f64 = 0.125;

/// Coefficient of `I₃'` in the lower bound.
pub const I3_COEFFICIENT: f64 = 4.5;

/// `A = 1.6625`, the value at which the bound is known to be positive.
pub const REFERENCE_A: f64 = 1.6625;

/// Default `U`-tail exponent.
pub const DEFAULT_M: u32 = 2;

/// The three pieces of the lower bound at one `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicTerms<T> {
    pub a: T,
    pub i1_upper: T,
    pub i2_lower: T,
    pub i3prime: T,
    /// `1 − I₁ + I₂/2 − c₃ I₃'`.
    pub rhs: T,
}

/// `∫_a^b (u − t)/(t u) dt`.
fn g_integral<T: Real>(a: T, b: T, u: T) -> T {
    (b / a).ln() - (b - a) / u
}

/// Upper bound for `I₁(2A)`:
/// `2∫₁^u g + ∫_A^u U g + ½(log A − 1 + (1 + A − 2A/√e)/u + ∫₁^A g)`
/// with `g(t) = (u − t)/(tu)`.
pub fn cubic_i1_upper<T: Real>(a: T, cfg: &IncExcConfig<T>, m: u32) -> Result<T> {
    let env = CharEnvelope::new(a)?;
    let one = T::one();
    let u = lit::<T>(2.0) * a;
    let up = cubic_u_profile(&env, m)?;
    let breaks = up.breakpoints();
    let opts = QuadOptions::new(cfg.quad_tolerance).with_rel(lit(1e-12));
    let mut err = None;
    let tail = integrate_real(
        |t: T| match up.eval(t) {
            Ok(v) => v * (u - t) / (t * u),
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        },
        a,
        u,
        &breaks,
        &opts,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let sqrt_e = lit::<T>(0.5).exp();
    let head = a.ln() - one + (one + a - lit::<T>(2.0) * a / sqrt_e) / u + g_integral(one, a, u);
    Ok(lit::<T>(2.0) * g_integral(one, u, u) + tail + lit::<T>(0.5) * head)
}

/// Lower bound for `I₂(2A)`: the weighted `k = 2` integral of `−P = L`.
pub fn cubic_i2_lower<T: Real>(a: T, cfg: &IncExcConfig<T>) -> Result<T> {
    let env = CharEnvelope::new(a)?;
    let p = cubic_l_profile(&env)?.negated();
    let c = IncExcConfig { weighted: true, ..*cfg };
    eval_ij(&p, lit(2.0), 2, lit::<T>(2.0) * a, &c)
}

/// All terms of the lower bound with a chosen `I₃'` coefficient.
pub fn cubic_terms<T: Real>(a: T, cfg: &IncExcConfig<T>, m: u32, c3: T) -> Result<CubicTerms<T>> {
    let i1_upper = cubic_i1_upper(a, cfg, m)?;
    let i2_lower = cubic_i2_lower(a, cfg)?;
    let i3prime = eval_i3prime(lit::<T>(2.0) * a, cfg);
    let rhs = T::one() - i1_upper + lit::<T>(0.5) * i2_lower - c3 * i3prime;
    Ok(CubicTerms { a, i1_upper, i2_lower, i3prime, rhs })
}

/// `1 − I₁_upper(2A) + I₂_lower(2A)/2 − (9/2) I₃'(2A)` for `A ∈ [√e, 2]`.
pub fn cubic_rhs<T: Real>(a: T, cfg: &IncExcConfig<T>, m: u32) -> Result<T> {
    Ok(cubic_terms(a, cfg, m, lit(I3_COEFFICIENT))?.rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicReport {
    pub a_star: f64,
    /// `(A, rhs)` on the scan grid.
    pub rhs_curve: Vec<(f64, f64)>,
    pub rhs_at_reference_a: f64,
    /// `1/(4 A_star)`, meaning `N ≪ d_K^{exponent}` up to `d_K^ε`.
    pub exponent: f64,
    /// `1/(4√e)`.
    pub baseline: f64,
    pub m_exponent: u32,
    pub i3_coefficient: f64,
    pub quad_tolerance: f64,
    pub grid_step: f64,
    pub bisection_tol: f64,
    pub notes: Vec<String>,
}

/// Grid spacing of the scan in [`cubic_critical_a`].
pub const SCAN_STEP: f64 = 0.01;

/// Values of `|rhs|` below this count as zero.
pub const RHS_ZERO_TOL: f64 = 1e-6;

/// Largest `A ∈ [√e, 2]` with a positive bound, to `1e-4`.
pub fn cubic_critical_a<T: Real>(cfg: &IncExcConfig<T>, m: u32) -> Result<CubicReport> {
    cubic_critical_a_with(cfg, m, lit(I3_COEFFICIENT))
}

/// [`cubic_critical_a`] with a chosen `I₃'` coefficient.
///
/// Scans a grid from `A = 2` downwards and bisects the first sign change met.
pub fn cubic_critical_a_with<T: Real>(cfg: &IncExcConfig<T>, m: u32, c3: T) -> Result<CubicReport> {
    let lo = lit::<T>(0.5).exp();
    let hi = lit::<T>(2.0);
    let step = lit::<T>(SCAN_STEP);
    let n = to_f64(((hi - lo) / step).ceil()) as usize;
    let grid: Vec<T> = (0..=n).map(|i| (hi - step * lit(i as f64)).max(lo)).collect();
    let vals: Vec<T> = grid
        .par_iter()
        .map(|&a| cubic_terms(a, cfg, m, c3).map(|t| t.rhs))
        .collect::<Result<_>>()?;
    let zt = lit::<T>(RHS_ZERO_TOL);
    if vals[0] > zt {
        return Err(Error::Inconsistent(format!(
            "bound still positive at A = 2 (rhs = {:.3e})",
            to_f64(vals[0])
        )));
    }
    let idx = vals
        .iter()
        .position(|&v| v > zt)
        .ok_or_else(|| Error::Inconsistent("bound never positive on [sqrt(e), 2]".into()))?;
    let (mut pos, mut neg) = (grid[idx], grid[idx - 1]);
    let x_tol = lit::<T>(1e-4);
    while neg - pos > x_tol {
        let mid = lit::<T>(0.5) * (pos + neg);
        if cubic_terms(mid, cfg, m, c3)?.rhs > zt {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    let a_star = to_f64(pos);
    let rhs_at_reference_a = to_f64(cubic_terms(lit(REFERENCE_A), cfg, m, c3)?.rhs);
    let baseline = 1.0 / (4.0 * 0.5f64.exp());
    Ok(CubicReport {
        a_star,
        rhs_curve: grid.iter().zip(&vals).rev().map(|(&a, &v)| (to_f64(a), to_f64(v))).collect(),
        rhs_at_reference_a,
        exponent: 1.0 / (4.0 * a_star),
        baseline,
        m_exponent: m,
        i3_coefficient: to_f64(c3),
        quad_tolerance: to_f64(cfg.quad_tolerance),
        grid_step: SCAN_STEP,
        bisection_tol: 1e-4,
        notes: vec![
            "N << d_K^exponent holds up to a factor d_K^eps".into(),
            "A_star is the positive end of the final bracket".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IncExcConfig<f64> {
        IncExcConfig::new(true, 3, 1e-7).unwrap()
    }

    #[test]
    fn g_integral_matches_quadrature() {
        let u = 3.3f64;
        let q = integrate_real(|t: f64| (u - t) / (t * u), 1.0, 2.5, &[], &QuadOptions::new(1e-14));
        assert!((g_integral(1.0, 2.5, u) - q).abs() < 1e-13);
    }

    #[test]
    fn rhs_sign_pattern() {
        let c = cfg();
        assert!(cubic_rhs(REFERENCE_A, &c, 2).unwrap() > 0.0);
        assert!(cubic_rhs(2.0, &c, 2).unwrap() < 0.0);
        assert!(cubic_rhs(0.5f64.exp(), &c, 2).unwrap() > 0.0);
        assert!(cubic_rhs(1.5, &c, 2).is_err());
    }

    #[test]
    fn critical_a_and_tail_exponent() {
        let c = cfg();
        let r2 = cubic_critical_a(&c, 2).unwrap();
        let r3 = cubic_critical_a(&c, 3).unwrap();
        assert!(r2.a_star >= REFERENCE_A && r2.a_star < 1.664, "{}", r2.a_star);
        assert!(r3.a_star >= r2.a_star);
        assert!(r2.exponent < r2.baseline && 1.0 / r2.exponent >= 6.65);
        let r_hard = cubic_critical_a_with(&c, 2, 9.0).unwrap();
        assert!(r_hard.a_star < r2.a_star);
    }

    #[test]
    fn two_step_test_function() {
        // γ = 1 on [1, A/√e], −1 on (A/√e, A]: ∫γ/t = log A − 1 and ∫γ = 2A/√e − 1 − A
        for &a in &[0.5f64.exp(), 1.7, 2.0] {
            let c = a / 0.5f64.exp();
            let gi = c.ln() - (a / c).ln();
            assert!((gi - (a.ln() - 1.0)).abs() < 1e-14);
            let g = (c - 1.0) - (a - c);
            assert!((g - (2.0 * a / 0.5f64.exp() - 1.0 - a)).abs() < 1e-14);
        }
        assert!((1.0 - 0.5f64.exp() - (-0.6487)).abs() < 1e-4);
    }
}
