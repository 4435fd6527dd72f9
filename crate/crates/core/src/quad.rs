//! One-dimensional numerical kernels: adaptive Gauss-Kronrod quadrature,
//! golden-section maximization and bisection.
//!
//! Multi-dimensional simplex integrals elsewhere in the crate are built by
//! nesting [`integrate`] calls, with panel boundaries aligned to the
//! breakpoints of the integrand.

use crate::scalar::{lit, Real};
use num_complex::Complex;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: real scalars and complex numbers over them.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn zero() -> Self;
    fn norm(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn norm(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn norm(&self) -> T {
        self.re.hypot(self.im)
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(abs_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol: T::zero(),
            max_intervals: 4000,
        }
    }

    pub fn with_rel(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self::new(lit(1e-10))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T, V> {
    pub value: V,
    pub abs_err: T,
    pub intervals: usize,
    pub converged: bool,
}

struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    err: T,
}

fn kronrod<T, V, F>(f: &mut F, a: T, b: T) -> (V, T)
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kron = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for i in 0..7 {
        let dx = half_len * lit(XGK[i]);
        let s = f(center - dx) + f(center + dx);
        kron = kron + s * lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + s * lit(WG[i / 2]);
        }
    }
    let kron = kron * half_len;
    let gauss = gauss * half_len;
    (kron, (kron - gauss).norm())
}

/// Adaptive G7-K15 quadrature of `f` over `[a, b]`.
///
/// `breaks` are interior points where the integrand may lose smoothness; they
/// seed the initial partition. Points outside `(a, b)` are ignored.
pub fn integrate<T, V, F>(mut f: F, a: T, b: T, breaks: &[T], opts: &QuadOptions<T>) -> QuadResult<T, V>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    if !(b > a) {
        return QuadResult {
            value: V::zero(),
            abs_err: T::zero(),
            intervals: 0,
            converged: true,
        };
    }
    let mut nodes: Vec<T> = Vec::with_capacity(breaks.len() + 2);
    nodes.push(a);
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes.dedup();

    let mut panels: Vec<Panel<T, V>> = nodes
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, err) = kronrod(&mut f, w[0], w[1]);
            Panel { a: w[0], b: w[1], value, err }
        })
        .collect();

    let total = |panels: &[Panel<T, V>]| -> (V, T) {
        panels
            .iter()
            .fold((V::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.err))
    };

    let (mut value, mut err) = total(&panels);
    let mut converged = false;
    while panels.len() < opts.max_intervals {
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if err <= target {
            converged = true;
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |(bi, be), (i, p)| {
                if p.err > be {
                    (i, p.err)
                } else {
                    (bi, be)
                }
            });
        let p = panels.swap_remove(worst);
        let mid = lit::<T>(0.5) * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval exhausted at machine precision
            panels.push(Panel { err: T::zero(), ..p });
            let t = total(&panels);
            value = t.0;
            err = t.1;
            continue;
        }
        let (v1, e1) = kronrod(&mut f, p.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, p.b);
        panels.push(Panel { a: p.a, b: mid, value: v1, err: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, err: e2 });
        // re-summing avoids drift from repeated incremental updates
        let t = total(&panels);
        value = t.0;
        err = t.1;
    }
    if !converged {
        converged = err <= opts.abs_tol.max(opts.rel_tol * value.norm());
    }
    QuadResult {
        value,
        abs_err: err,
        intervals: panels.len(),
        converged,
    }
}

/// Shorthand returning only the value of a real integral.
pub fn integrate_real<T, F>(f: F, a: T, b: T, breaks: &[T], opts: &QuadOptions<T>) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate(f, a, b, breaks, opts).value
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<T, F>(mut f: F, mut a: T, mut b: T, x_tol: T) -> (T, T)
where
    T: Real,
    F: FnMut(T) -> T,
{
    let inv_phi = lit::<T>(0.618_033_988_749_894_9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
    }
    let x = lit::<T>(0.5) * (a + b);
    (x, f(x))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns the final bracket `(lo, hi)` with `hi - lo <= x_tol`, or `None` when
/// `f(lo)` and `f(hi)` have the same strict sign. A value with `|f| <= zero_tol`
/// counts as zero and is assigned to the `hi` side.
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, x_tol: T, zero_tol: T) -> Option<(T, T)>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let sign = |v: T| -> i8 {
        if v.abs() <= zero_tol {
            0
        } else if v > T::zero() {
            1
        } else {
            -1
        }
    };
    let s_lo = sign(f(lo));
    let s_hi = sign(f(hi));
    if s_lo == 0 {
        return Some((lo, lo));
    }
    if s_lo == s_hi {
        return None;
    }
    while hi - lo > x_tol {
        let mid = lit::<T>(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if sign(f(mid)) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let opts = QuadOptions::new(1e-14);
        let v = integrate_real(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &[], &opts);
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn kink_needs_breakpoint_or_refinement() {
        let opts = QuadOptions::new(1e-12);
        let f = |x: f64| (x - 0.3).abs();
        let exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
        let with = integrate(f, 0.0, 1.0, &[0.3], &opts);
        assert!((with.value - exact).abs() < 1e-14);
        assert_eq!(with.intervals, 2);
        let without = integrate(f, 0.0, 1.0, &[], &opts);
        assert!((without.value - exact).abs() < 1e-11);
        assert!(without.intervals > 2);
    }

    #[test]
    fn complex_integrand() {
        let opts = QuadOptions::new(1e-13);
        let r = integrate(|x: f64| Complex::new(x.cos(), x.sin()), 0.0, std::f64::consts::PI, &[], &opts);
        assert!(r.value.re.abs() < 1e-13);
        assert!((r.value.im - 2.0).abs() < 1e-13);
    }

    #[test]
    fn empty_interval() {
        let r: QuadResult<f64, f64> = integrate(|x: f64| x, 1.0, 1.0, &[], &QuadOptions::default());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x: f64| -(x - 1.25).powi(2) + 3.0, 0.0, 4.0, 1e-10);
        assert!((x - 1.25).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_brackets_root() {
        let (lo, hi) = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!(hi - lo <= 1e-12);
        assert!((lo - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-6, 0.0).is_none());
    }

    #[test]
    fn works_in_single_precision() {
        let v = integrate_real(|x: f32| x.exp(), 0.0f32, 1.0, &[], &QuadOptions::new(1e-5));
        assert!((v - (1f32.exp() - 1.0)).abs() < 1e-5);
    }
}
