//! Mean values `σ(u)` of multiplicative functions: the convolution equation
//! `uσ(u) = ∫₀^u σ(u−t)P(t) dt` with `σ(u) = u^{k−1}` on `[0, 1]`, and the
//! extremal differential–difference equation
//! `uσ'(u) + (1−k)σ(u) + (k+1)σ(u−1) = 0`.

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::scalar::{from_usize, lit, to_f64, Real};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Convolution,
    Dde,
    Saddle,
}

/// `σ` sampled at `u_i = i·step`.
///
/// When `normalized` is set the samples hold `τ(u) = σ(u)·u^{1−k}` instead of
/// `σ`, which keeps large `k` inside floating-point range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSolution<T> {
    pub k: T,
    pub step: T,
    pub values: Vec<T>,
    /// Derivatives of the stored quantity, when the solver produced them.
    pub derivs: Option<Vec<T>>,
    pub provenance: Provenance,
    pub normalized: bool,
}

impl<T: Real> SigmaSolution<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn u(&self, i: usize) -> T {
        from_usize::<T>(i) * self.step
    }

    pub fn u_max(&self) -> T {
        self.u(self.values.len().saturating_sub(1))
    }

    fn weight(&self, u: T) -> T {
        if self.k == T::one() {
            T::one()
        } else {
            u.powf(self.k - T::one())
        }
    }

    /// `σ(u_i)`.
    pub fn sigma(&self, i: usize) -> T {
        if self.normalized {
            self.values[i] * self.weight(self.u(i))
        } else {
            self.values[i]
        }
    }

    /// `τ(u_i) = σ(u_i)·u_i^{1−k}`; at `u = 0` the limit value 1.
    pub fn tau(&self, i: usize) -> T {
        if self.normalized {
            self.values[i]
        } else if i == 0 {
            T::one()
        } else {
            self.values[i] / self.weight(self.u(i))
        }
    }

    /// Interpolated stored quantity at `u` (cubic Hermite when derivatives are
    /// available, linear otherwise).
    pub fn stored_at(&self, u: T) -> Result<T> {
        let n = self.values.len();
        if n == 0 || u < T::zero() || u > self.u_max() * (T::one() + lit::<T>(1e-12)) {
            return Err(Error::OutOfRange { what: "sigma solution", t: to_f64(u), lo: 0.0, hi: to_f64(self.u_max()) });
        }
        let x = u / self.step;
        let i = (x.floor().to_usize().unwrap_or(0)).min(n.saturating_sub(2));
        if n == 1 {
            return Ok(self.values[0]);
        }
        let s = x - from_usize::<T>(i);
        Ok(self.interp(i, s))
    }

    fn interp(&self, i: usize, s: T) -> T {
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.derivs {
            Some(d) => hermite(y0, y1, d[i] * self.step, d[i + 1] * self.step, s),
            None => y0 + (y1 - y0) * s,
        }
    }

    /// Interpolated `σ(u)`.
    pub fn sigma_at(&self, u: T) -> Result<T> {
        let v = self.stored_at(u)?;
        Ok(if self.normalized { v * self.weight(u) } else { v })
    }

    /// CSV rows `u,sigma,tau`, every `stride`-th sample.
    pub fn to_csv(&self, stride: usize) -> String {
        let mut out = String::from("u,sigma,tau\n");
        let stride = stride.max(1);
        for i in (0..self.values.len()).step_by(stride) {
            let _ = writeln!(
                out,
                "{:.10},{:.12e},{:.12e}",
                to_f64(self.u(i)),
                to_f64(self.sigma(i)),
                to_f64(self.tau(i))
            );
        }
        out
    }
}

fn hermite<T: Real>(y0: T, y1: T, m0: T, m1: T, s: T) -> T {
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let s2 = s * s;
    let s3 = s2 * s;
    (two * s3 - three * s2 + one) * y0 + (s3 - two * s2 + s) * m0 + (-two * s3 + three * s2) * y1 + (s3 - s2) * m1
}

/// Number of grid steps per unit length; `1/step` must be an integer.
fn steps_per_unit<T: Real>(step: T) -> Result<usize> {
    if !(step > T::zero()) || step > T::one() {
        return Err(Error::Precondition(format!("step {} must lie in (0, 1]", to_f64(step))));
    }
    let inv = step.recip();
    let n = inv.round();
    if (inv - n).abs() > lit::<T>(1e-6) * n {
        return Err(Error::Precondition(format!("1/step must be an integer, got {}", to_f64(inv))));
    }
    Ok(n.to_usize().unwrap_or(1))
}

fn grid_len<T: Real>(u_max: T, per_unit: usize) -> usize {
    (u_max * from_usize::<T>(per_unit)).round().to_usize().unwrap_or(0) + 1
}

/// Solves the convolution equation on `[0, u_max]` by the trapezoidal method
/// of steps. `P` is sampled as the mean of its one-sided limits so that jumps
/// on grid nodes keep second-order accuracy.
pub fn solve_convolution<T: Real>(p: &Profile<T>, k: T, u_max: T, step: T) -> Result<SigmaSolution<T>> {
    if !(k >= T::one()) {
        return Err(Error::Domain(format!("k = {} must be at least 1", to_f64(k))));
    }
    if p.t_min() > T::zero() || p.t_max() < u_max * (T::one() - lit::<T>(1e-12)) {
        return Err(Error::OutOfRange {
            what: "profile domain vs u_max",
            t: to_f64(u_max),
            lo: to_f64(p.t_min()),
            hi: to_f64(p.t_max()),
        });
    }
    let per_unit = steps_per_unit(step)?;
    let h = from_usize::<T>(per_unit).recip();
    let n = grid_len(u_max, per_unit);
    let pv: Vec<T> = (0..n).map(|j| p.eval_mid((from_usize::<T>(j) * h).min(p.t_max()))).collect();
    let km1 = k - T::one();
    let mut sigma = vec![T::zero(); n];
    for (i, s) in sigma.iter_mut().enumerate().take(per_unit.min(n - 1) + 1) {
        let u = from_usize::<T>(i) * h;
        *s = if km1 == T::zero() { T::one() } else { u.powf(km1) };
    }
    let half = lit::<T>(0.5);
    for m in (per_unit + 1)..n {
        let u = from_usize::<T>(m) * h;
        let mut acc = half * sigma[0] * pv[m];
        for j in 1..m {
            acc = acc + sigma[m - j] * pv[j];
        }
        sigma[m] = h * acc / (u - h * pv[0] * half);
    }
    Ok(SigmaSolution { k, step: h, values: sigma, derivs: None, provenance: Provenance::Convolution, normalized: false })
}

/// Default step for the extremal delay equation: `10⁻⁴` for `k ≤ 5`, otherwise
/// the coarsest `1/n` with `n ≥ max(1000, 100k)`.
pub fn default_dde_step<T: Real>(k: T) -> T {
    let n = if k <= lit(5.0) { 10_000.0 } else { (100.0 * to_f64(k)).ceil().max(1000.0) };
    lit::<T>(n).recip()
}

/// Which quantity the delay equation is integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DdeVariable {
    /// `τ(u) = σ(u)u^{1−k}`, with `τ'(u) = −((k+1)/u)(1−1/u)^{k−1} τ(u−1)`.
    Tau,
    /// `σ` directly, with `σ'(u) = ((k−1)σ(u) − (k+1)σ(u−1))/u`.
    Sigma,
}

/// Solves the extremal differential–difference equation in `τ` by RK4.
pub fn solve_extremal_dde<T: Real>(k: T, u_max: T, step: T) -> Result<SigmaSolution<T>> {
    solve_extremal_dde_with(k, u_max, step, DdeVariable::Tau)
}

/// RK4 method of steps for the extremal delay equation. Lagged values off the
/// grid come from the cubic Hermite interpolant of stored values and slopes.
pub fn solve_extremal_dde_with<T: Real>(k: T, u_max: T, step: T, var: DdeVariable) -> Result<SigmaSolution<T>> {
    if !(k >= T::one()) {
        return Err(Error::Domain(format!("k = {} must be at least 1", to_f64(k))));
    }
    if k * step > lit(0.01) {
        return Err(Error::StepTooCoarse { k: to_f64(k), step: to_f64(step) });
    }
    let per_unit = steps_per_unit(step)?;
    let h = from_usize::<T>(per_unit).recip();
    let n = grid_len(u_max, per_unit);
    let one = T::one();
    let km1 = k - one;
    let kp1 = k + one;
    let half = lit::<T>(0.5);
    let pow_km1 = |x: T| if km1 == T::zero() { one } else { x.powf(km1) };

    let mut y = vec![T::zero(); n];
    let mut dy = vec![T::zero(); n];
    for i in 0..=per_unit.min(n - 1) {
        let u = from_usize::<T>(i) * h;
        match var {
            DdeVariable::Tau => {
                y[i] = one;
                dy[i] = T::zero();
            }
            DdeVariable::Sigma => {
                y[i] = pow_km1(u);
                dy[i] = if km1 == T::zero() || i == 0 { T::zero() } else { km1 * u.powf(km1 - one) };
            }
        }
    }
    // derivative at u given y(u) and the lagged value y(u−1)
    let rhs = |u: T, yu: T, lag: T| -> T {
        match var {
            DdeVariable::Tau => -(kp1 / u) * pow_km1(one - u.recip()) * lag,
            DdeVariable::Sigma => (km1 * yu - kp1 * lag) / u,
        }
    };
    // dy holds left derivatives; only u = 1 can carry a jump (k = 1)
    let mut dy_right_one = dy[per_unit.min(n - 1)];
    for i in per_unit..n.saturating_sub(1) {
        let u = from_usize::<T>(i) * h;
        let j = i - per_unit;
        let lag0 = y[j];
        let d0 = if j == per_unit { dy_right_one } else { dy[j] };
        let lag_mid = hermite(y[j], y[j + 1], d0 * h, dy[j + 1] * h, half);
        let lag1 = y[j + 1];
        let k1 = if i == per_unit {
            dy_right_one = rhs(u, y[i], lag0);
            dy_right_one
        } else {
            dy[i]
        };
        let k2 = rhs(u + half * h, y[i] + half * h * k1, lag_mid);
        let k3 = rhs(u + half * h, y[i] + half * h * k2, lag_mid);
        let k4 = rhs(u + h, y[i] + h * k3, lag1);
        y[i + 1] = y[i] + h / lit(6.0) * (k1 + lit::<T>(2.0) * (k2 + k3) + k4);
        dy[i + 1] = rhs(u + h, y[i + 1], lag1);
    }
    Ok(SigmaSolution {
        k,
        step: h,
        values: y,
        derivs: Some(dy),
        provenance: Provenance::Dde,
        normalized: var == DdeVariable::Tau,
    })
}

/// First sign change of `σ` from positive to non-positive.
///
/// The bracketing grid cell is refined by bisection on the solution's
/// interpolant; an exact zero on the grid is returned as is. `None` when `σ`
/// stays positive on the whole grid.
pub fn first_zero<T: Real>(sol: &SigmaSolution<T>) -> Option<T> {
    let n = sol.values.len();
    // the sign of σ equals the sign of the stored value for u > 0
    let start = 1.min(n);
    for i in start..n {
        let v = sol.values[i];
        if v == T::zero() {
            return Some(sol.u(i));
        }
        if v < T::zero() {
            if i == 0 {
                return Some(T::zero());
            }
            let (mut lo, mut hi) = (T::zero(), T::one());
            for _ in 0..200 {
                let mid = half_of(lo, hi);
                if !(mid > lo && mid < hi) {
                    break;
                }
                if sol.interp(i - 1, mid) > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(sol.u(i - 1) + half_of(lo, hi) * sol.step);
        }
    }
    None
}

fn half_of<T: Real>(a: T, b: T) -> T {
    lit::<T>(0.5) * (a + b)
}

/// Outcome of comparing the solutions for `P ≤ P♯`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport<T> {
    /// First zero of `σ` (or the end of the grid when there is none).
    pub u0: T,
    pub u0_found: bool,
    /// `max (σ − σ♯)` over grid points `u ≤ u0`.
    pub max_excess: T,
    pub tolerance: T,
    pub holds: bool,
    pub samples: usize,
}

/// Checks `0 ≤ σ ≤ σ♯` up to the first zero of `σ`, where `σ`, `σ♯` solve the
/// convolution equation for `p ≤ p_sharp` with `p = p_sharp` on `[0, 1]`.
pub fn compare_profiles<T: Real>(
    p: &Profile<T>,
    p_sharp: &Profile<T>,
    k: T,
    u_max: T,
    step: T,
) -> Result<OrderingReport<T>> {
    let tol = lit::<T>(1e-12);
    let mut probes: Vec<T> = p.breakpoints();
    probes.extend(p_sharp.breakpoints());
    let grid = 2000usize;
    probes.extend((0..=grid).map(|i| u_max * from_usize::<T>(i) / from_usize::<T>(grid)));
    for &t in &probes {
        if t < T::zero() || t > u_max {
            continue;
        }
        for side in [t, (t - lit::<T>(1e-9)).max(T::zero()), (t + lit::<T>(1e-9)).min(u_max)] {
            let (a, b) = (p.eval(side)?, p_sharp.eval(side)?);
            if side < T::one() && (a - b).abs() > tol {
                return Err(Error::Precondition(format!("profiles differ on [0,1] at t = {}", to_f64(side))));
            }
            if a > b + tol {
                return Err(Error::Precondition(format!("p exceeds p_sharp at t = {}", to_f64(side))));
            }
        }
    }
    let s = solve_convolution(p, k, u_max, step)?;
    let s_sharp = solve_convolution(p_sharp, k, u_max, step)?;
    let z = first_zero(&s);
    let u0 = z.unwrap_or_else(|| s.u_max());
    let mut max_excess = T::neg_infinity();
    let mut samples = 0;
    for i in 0..s.len() {
        if s.u(i) > u0 {
            break;
        }
        max_excess = max_excess.max(s.sigma(i) - s_sharp.sigma(i));
        samples += 1;
    }
    let tolerance = lit::<T>(1e-8);
    Ok(OrderingReport {
        u0,
        u0_found: z.is_some(),
        max_excess,
        tolerance,
        holds: max_excess <= tolerance,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_k1_closed_form() {
        let p = Profile::extremal(1.0, 2.0).unwrap();
        let s = solve_convolution(&p, 1.0, 2.0, 1e-3).unwrap();
        for &u in &[1.2, 1.5, 1.9] {
            let want = 1.0 - 2.0 * f64::ln(u);
            assert!((s.sigma_at(u).unwrap() - want).abs() < 1e-6, "u={u}");
        }
        assert!((s.sigma_at(1.5).unwrap() - 0.18907).abs() < 1e-5);
    }

    #[test]
    fn convolution_initial_condition() {
        let p = Profile::extremal(3.0, 2.0).unwrap();
        let s = solve_convolution(&p, 3.0, 2.0, 1e-3).unwrap();
        assert_eq!(s.sigma(500), 0.25);
    }

    #[test]
    fn convolution_constant_k_keeps_power() {
        let p = Profile::constant(2.0f64, 2.0, 3.0).unwrap();
        let s = solve_convolution(&p, 2.0, 3.0, 1e-3).unwrap();
        for i in (0..s.len()).step_by(250) {
            assert!((s.sigma(i) - s.u(i)).abs() < 1e-9, "u={}", s.u(i));
        }
        assert!(first_zero(&s).is_none());
    }

    #[test]
    fn convolution_rejects_short_profile() {
        let p = Profile::extremal(1.0, 2.0).unwrap();
        assert!(solve_convolution(&p, 1.0, 3.0, 1e-3).is_err());
        assert!(solve_convolution(&p, 1.0, 2.0, 0.0003).is_err());
    }

    #[test]
    fn dde_k1_first_zero() {
        let s = solve_extremal_dde(1.0, 2.0, 1e-4).unwrap();
        let z = first_zero(&s).unwrap();
        assert!((z - 0.5f64.exp()).abs() < 1e-9, "{z}");
    }

    #[test]
    fn dde_k10_tau_decreasing_until_zero() {
        let step = default_dde_step(10.0);
        let s = solve_extremal_dde(10.0, 20.0, step).unwrap();
        let z = first_zero(&s).unwrap();
        assert!(s.values[..=1000].iter().all(|&v| v == 1.0));
        let mut prev = f64::INFINITY;
        for i in 1000..s.len() {
            if s.u(i) >= z {
                break;
            }
            assert!(s.values[i] > 0.0 && s.values[i] <= prev);
            prev = s.values[i];
        }
    }

    #[test]
    fn dde_step_guard() {
        assert!(matches!(solve_extremal_dde(30.0, 60.0, 1e-3), Err(Error::StepTooCoarse { .. })));
        assert!(solve_extremal_dde(30.0, 60.0, default_dde_step(30.0)).is_ok());
    }

    #[test]
    fn dde_variables_agree() {
        let k = 4.0;
        let step = 1e-3;
        let a = solve_extremal_dde_with(k, 8.0, step, DdeVariable::Tau).unwrap();
        let b = solve_extremal_dde_with(k, 8.0, step, DdeVariable::Sigma).unwrap();
        for i in (0..a.len()).step_by(100) {
            let (x, y) = (a.sigma(i), b.sigma(i));
            let scale = s_pow(a.u(i), k - 1.0);
            if x.abs() > 1e-6 * scale {
                assert!((x - y).abs() <= 1e-6 * x.abs(), "u={} {x} {y}", a.u(i));
            }
        }
    }

    fn s_pow(u: f64, e: f64) -> f64 {
        u.powf(e)
    }

    #[test]
    fn csv_export() {
        let s = solve_extremal_dde(1.0, 1.5, 1e-3).unwrap();
        let csv = s.to_csv(500);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "u,sigma,tau");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn identical_profiles_compare_equal() {
        let p = Profile::extremal(2.0, 4.0).unwrap();
        let r = compare_profiles(&p, &p, 2.0, 4.0, 1e-3).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_excess, 0.0);
    }

    #[test]
    fn compare_rejects_disordered_profiles() {
        let p = Profile::extremal(2.0, 4.0).unwrap();
        let q = Profile::constant(2.0, 2.0, 4.0).unwrap();
        assert!(compare_profiles(&q, &p, 2.0, 4.0, 1e-3).is_err());
        assert!(compare_profiles(&p, &q, 2.0, 4.0, 1e-3).unwrap().holds);
    }
}
