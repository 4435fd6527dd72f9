//! Special functions behind the saddle-point analysis of the extremal
//! differential-difference equation: the two real Lambert W branches, the
//! entire integral `I(s) = ∫₀^s (e^t − 1)/t dt`, the exponential-type integral
//! `J(s) = ∫₀^∞ e^{−(s+t)}/(s+t) dt`, Euler's constant and log-gamma.
//!
//! `I` and `J` are computed along independent routes (power series or segment
//! quadrature for `I`, half-line quadrature for `J`), so the identity
//! `−J(s) = I(−s) + γ + log s` is a genuine cross-check.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::{lit, to_f64, Real};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Euler's constant to 30 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

pub fn euler_gamma<T: Real>() -> T {
    lit(EULER_GAMMA)
}

/// Real branch of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WBranch {
    /// `W₀`, defined on `[−1/e, ∞)`, values `≥ −1`.
    Principal,
    /// `W₋₁`, defined on `[−1/e, 0)`, values `≤ −1`.
    Lower,
}

/// Series about the branch point in `p = ±√(2(ex + 1))`.
fn branch_point_series<T: Real>(p: T) -> T {
    // coefficients of W = -1 + p - p^2/3 + 11/72 p^3 - 43/540 p^4 + 769/17280 p^5
    let c = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
    ];
    c.iter().rev().fold(T::zero(), |acc, &ci| acc * p + lit(ci))
}

/// Evaluates `W_branch(x)`, the solution `w` of `w·eʷ = x` on the requested
/// real branch.
pub fn lambert_w<T: Real>(branch: WBranch, x: T) -> Result<T> {
    let e = T::E();
    if x.is_nan() {
        return Err(Error::Domain("lambert_w of NaN".into()));
    }
    // distance to the branch point, scaled so that it is O(1)
    let q = e * x + T::one();
    let slack = lit::<T>(4.0) * T::epsilon();
    if q < -slack {
        return Err(Error::Domain(format!(
            "lambert_w argument {} below -1/e",
            to_f64(x)
        )));
    }
    if branch == WBranch::Lower && x >= T::zero() {
        return Err(Error::Domain(format!(
            "lower branch requires x in [-1/e, 0), got {}",
            to_f64(x)
        )));
    }
    if q <= slack {
        return Ok(-T::one());
    }
    if branch == WBranch::Principal && x == T::zero() {
        return Ok(T::zero());
    }
    if branch == WBranch::Principal && x.is_infinite() {
        return Ok(x);
    }

    let near_branch = q < lit(0.25);
    let mut w = match branch {
        WBranch::Principal => {
            if near_branch {
                branch_point_series((lit::<T>(2.0) * q).sqrt())
            } else if x <= e {
                let l = x.ln_1p();
                l * (T::one() - (T::one() + l).ln() / (lit::<T>(2.0) + l))
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        WBranch::Lower => {
            if near_branch {
                branch_point_series(-(lit::<T>(2.0) * q).sqrt())
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };

    let two = lit::<T>(2.0);
    if branch == WBranch::Principal && x > e {
        // Newton on w + ln w = ln x avoids overflow of eʷ for huge x
        let lx = x.ln();
        for _ in 0..64 {
            let g = w + w.ln() - lx;
            let step = g / (T::one() + w.recip());
            w = w - step;
            if step.abs() <= lit::<T>(4.0) * T::epsilon() * w.abs() {
                break;
            }
        }
        return Ok(w);
    }

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + T::one();
        if wp1 == T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = w - step;
        // keep iterates on their branch
        let next = match branch {
            WBranch::Principal => next.max(-T::one()),
            WBranch::Lower => next.min(-T::one()),
        };
        let done = (next - w).abs() <= lit::<T>(4.0) * T::epsilon() * (T::one() + next.abs());
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

/// `(e^z − 1)/z`, accurate near zero.
fn exprel<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < lit(0.1) {
        // Taylor series through z^9 / 10!
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for n in 2..=10 {
            term = term * z / lit::<T>(n as f64);
            sum = sum + term;
        }
        sum
    } else {
        (z.exp() - Complex::new(T::one(), T::zero())) / z
    }
}

/// Power series `Σ_{n≥1} sⁿ/(n·n!)` for `I(s)`.
///
/// Returns the value together with `Σ |terms|`, which bounds the rounding error
/// from cancellation.
pub fn ein_series<T: Real>(s: Complex<T>) -> (Complex<T>, T) {
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut abs_sum = T::zero();
    let r = s.norm();
    let mut n = 1usize;
    loop {
        let nf = lit::<T>(n as f64);
        term = term * s / nf;
        let contrib = term / nf;
        sum = sum + contrib;
        abs_sum = abs_sum + contrib.norm();
        if nf > r && contrib.norm() <= T::epsilon() * sum.norm() {
            break;
        }
        if n > 2000 {
            break;
        }
        n += 1;
    }
    (sum, abs_sum)
}

/// `I(s)` by quadrature along the segment `[0, s]`:
/// `I(s) = ∫₀¹ s·(e^{sx} − 1)/(sx) dx`.
pub fn ein_quadrature<T: Real>(s: Complex<T>) -> Complex<T> {
    if s.norm() == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let opts = QuadOptions::new(T::min_positive_value()).with_rel(lit(1e-14));
    let r = integrate(|x: T| s * exprel(s * x), T::zero(), T::one(), &[], &opts);
    r.value
}

/// The entire function `I(s) = ∫₀^s (e^t − 1)/t dt`.
///
/// Uses the power series for `|s| ≤ 30` whenever its cancellation error stays
/// below `10⁻¹²` relative, and segment quadrature otherwise.
pub fn ein<T: Real>(s: Complex<T>) -> Complex<T> {
    if s.norm() <= lit(30.0) {
        let (v, abs_sum) = ein_series(s);
        if abs_sum * T::epsilon() <= lit::<T>(1e-12) * v.norm() {
            return v;
        }
    }
    ein_quadrature(s)
}

/// Real restriction of [`ein`].
pub fn ein_real<T: Real>(x: T) -> T {
    ein(Complex::new(x, T::zero())).re
}

/// `J(s) = ∫₀^∞ e^{−(s+t)}/(s+t) dt` (the exponential integral `E₁(s)`), by
/// quadrature on the half line. Undefined on the cut `(−∞, 0]`.
pub fn exp_integral_j<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain("exp_integral_j of non-finite argument".into()));
    }
    if s.im == T::zero() && s.re <= T::zero() {
        return Err(Error::BranchCut { value: to_f64(s.re) });
    }
    let one = T::one();
    // t = x/(1-x) maps [0, 1) onto [0, ∞)
    let to_x = |t: T| t / (one + t);
    let mut breaks = vec![];
    let r = s.norm();
    for t in [r / lit(8.0), r / lit(2.0), r, lit::<T>(2.0) * r, lit(1.0), lit(4.0), lit(16.0), lit(48.0)] {
        breaks.push(to_x(t));
    }
    if s.re < T::zero() {
        breaks.push(to_x(-s.re));
    }
    let opts = QuadOptions::new(T::min_positive_value()).with_rel(lit(1e-14));
    let es = (-s).exp();
    let res = integrate(
        |x: T| {
            if x >= one {
                return Complex::new(T::zero(), T::zero());
            }
            let om = one - x;
            let t = x / om;
            let w = (-t).exp() / (om * om);
            if w == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
            (s + Complex::new(t, T::zero())).inv() * w
        },
        T::zero(),
        one,
        &breaks,
        &opts,
    );
    Ok(res.value * es)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `log Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < lit(0.5) {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = lit::<T>(LANCZOS[0]);
    let t = x + lit::<T>(LANCZOS_G + 0.5);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + lit::<T>(c) / (x + lit::<T>(i as f64));
    }
    lit::<T>(0.5) * (lit::<T>(2.0) * T::PI()).ln() + (x + lit(0.5)) * t.ln() - t + a.ln()
}

/// `log n!`, summed exactly for moderate `n`.
pub fn log_factorial<T: Real>(n: u64) -> T {
    if n <= 256 {
        (2..=n).map(|i| lit::<T>(i as f64).ln()).sum()
    } else {
        ln_gamma(lit::<T>(n as f64 + 1.0))
    }
}

/// `log Γ(k)`, i.e. `log (k−1)!`, for real `k ≥ 1`.
pub fn log_gamma_of_k<T: Real>(k: T) -> T {
    if k.fract() == T::zero() && k >= T::one() && k <= lit(257.0) {
        log_factorial(to_f64(k) as u64 - 1)
    } else {
        ln_gamma(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn lambert_principal_zero() {
        assert_eq!(lambert_w(WBranch::Principal, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn lambert_branch_point() {
        let x = -(-1.0f64).exp();
        assert_eq!(lambert_w(WBranch::Lower, x).unwrap(), -1.0);
        assert_eq!(lambert_w(WBranch::Principal, x).unwrap(), -1.0);
    }

    #[test]
    fn lambert_lower_minus_tenth() {
        // Newton oracle on w e^w = -0.1 from w = -4
        let mut w = -4.0f64;
        for _ in 0..100 {
            w -= (w * w.exp() + 0.1) / (w.exp() * (w + 1.0));
        }
        let got = lambert_w(WBranch::Lower, -0.1).unwrap();
        assert!((got - w).abs() < 1e-13, "{got} vs {w}");
        assert!((got + 3.577_152_063_957_297).abs() < 1e-12);
    }

    #[test]
    fn lambert_domain_errors() {
        assert!(lambert_w(WBranch::Principal, -0.5f64).is_err());
        assert!(lambert_w(WBranch::Lower, 0.0f64).is_err());
        assert!(lambert_w(WBranch::Lower, 1.0f64).is_err());
    }

    #[test]
    fn lambert_large_and_tiny() {
        for &x in &[1e-300f64, 1e-10, 3.0, 1e3, 1e100, 1e300] {
            let w = lambert_w(WBranch::Principal, x).unwrap();
            // compare in log form to avoid overflow
            let res = if w < 1.0 { (w * w.exp() - x).abs() / x.max(1.0) } else { (w + w.ln() - x.ln()).abs() };
            assert!(res < 1e-13, "x={x} res={res}");
        }
        let w = lambert_w(WBranch::Lower, -1e-300f64).unwrap();
        assert!(w < -690.0);
        assert!(((w * w.exp()) + 1e-300).abs() < 1e-310);
    }

    #[test]
    fn ein_values() {
        assert_eq!(ein(C::new(0.0, 0.0)), C::new(0.0, 0.0));
        // Σ 1/(n n!) by direct partial sums
        let mut s = 0.0;
        let mut fact = 1.0;
        for n in 1..30 {
            fact *= n as f64;
            s += 1.0 / (n as f64 * fact);
        }
        let v = ein(C::new(1.0, 0.0));
        assert!((v.re - s).abs() < 1e-15);
        assert!((v.re - 1.317_902_151_454_403_9).abs() < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn ein_minus_one_matches_j_identity() {
        let i = ein(C::new(-1.0, 0.0));
        let j = exp_integral_j(C::new(1.0, 0.0)).unwrap();
        // -J(1) = I(-1) + γ + log 1
        assert!((-j.re - (i.re + EULER_GAMMA)).abs() < 1e-13);
    }

    #[test]
    fn j_at_one_and_two() {
        let j1 = exp_integral_j(C::new(1.0, 0.0)).unwrap();
        assert!((j1.re - 0.219_383_934_395_520_3).abs() < 1e-14);
        let j2 = exp_integral_j(C::new(2.0, 0.0)).unwrap();
        let rhs = ein(C::new(-2.0, 0.0)).re + EULER_GAMMA + 2f64.ln();
        assert!((-j2.re - rhs).abs() < 1e-10);
    }

    #[test]
    fn j_decays() {
        let s = 40.0f64;
        let j = exp_integral_j(C::new(s, 0.0)).unwrap().re;
        assert!(j > 0.0);
        assert!(j <= (-s).exp() / s * (1.0 + 1e-12));
    }

    #[test]
    fn j_cut_is_rejected() {
        assert!(matches!(exp_integral_j(C::new(0.0, 0.0)), Err(Error::BranchCut { .. })));
        assert!(exp_integral_j(C::new(-2.0, 0.0)).is_err());
        assert!(exp_integral_j(C::new(-2.0, 0.5)).is_ok());
    }

    #[test]
    fn ein_switches_to_quadrature_when_series_cancels() {
        let s = C::new(-28.0, 0.0);
        let (_, abs_sum) = ein_series(s);
        assert!(abs_sum * f64::EPSILON > 1e-12 * 4.0);
        // I(-x) = -(γ + log x + E1(x))
        let e1 = exp_integral_j(C::new(28.0, 0.0)).unwrap().re;
        let expect = -(EULER_GAMMA + 28f64.ln() + e1);
        assert!((ein(s).re - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn gamma_and_factorials() {
        assert!((ln_gamma(5.0f64) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5f64) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((log_factorial::<f64>(10) - 3_628_800f64.ln()).abs() < 1e-12);
        assert!((log_factorial::<f64>(300) - ln_gamma(301.0)).abs() < 1e-9);
        assert!((log_gamma_of_k(30.0f64) - log_factorial::<f64>(29)).abs() < 1e-12);
    }
}
