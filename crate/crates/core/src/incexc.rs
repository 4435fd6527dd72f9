//! Inclusion–exclusion integrals
//! `I_j(u) = ∫_{t₁+…+t_j ≤ u, tᵢ ≥ 1} ((u − Σtᵢ)/u)^{k−1} Π (k − P(tᵢ))/tᵢ`
//! and the alternating partial sums that bracket `σ(u)`.

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::quad::{integrate, QuadOptions};
use crate::scalar::{lit, to_f64, Real};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncExcConfig<T> {
    /// Include the factor `((u − Σtᵢ)/u)^{k−1}`.
    pub weighted: bool,
    /// Largest order evaluated by quadrature (at most 3).
    pub j_max: u32,
    /// Absolute quadrature tolerance.
    pub quad_tolerance: T,
}

impl<T: Real> Default for IncExcConfig<T> {
    fn default() -> Self {
        IncExcConfig { weighted: true, j_max: 3, quad_tolerance: lit(1e-8) }
    }
}

impl<T: Real> IncExcConfig<T> {
    pub fn new(weighted: bool, j_max: u32, quad_tolerance: T) -> Result<Self> {
        if j_max > 3 {
            return Err(Error::Precondition(format!("j_max = {j_max} exceeds 3")));
        }
        if !(quad_tolerance > T::zero()) {
            return Err(Error::Precondition("quadrature tolerance must be positive".into()));
        }
        Ok(IncExcConfig { weighted, j_max, quad_tolerance })
    }

    fn opts(&self, scale: T) -> QuadOptions<T> {
        QuadOptions::new(self.quad_tolerance * scale).with_rel(lit(1e-12))
    }
}

struct Ctx<'a, T> {
    p: &'a Profile<T>,
    k: T,
    u: T,
    weighted: bool,
    breaks: Vec<T>,
}

impl<'a, T: Real> Ctx<'a, T> {
    fn g(&self, t: T) -> T {
        (self.k - self.p.eval_unchecked(t)) / t
    }

    fn w(&self, r: T) -> T {
        if !self.weighted || self.k == T::one() {
            T::one()
        } else if r <= T::zero() {
            T::zero()
        } else {
            (r / self.u).powf(self.k - T::one())
        }
    }

    /// Profile breakpoints and their shifts `u − b`, `u − b − 1` inside `(lo, hi)`.
    fn breaks_in(&self, lo: T, hi: T, shifts: &[T]) -> Vec<T> {
        let mut out = Vec::new();
        for &b in &self.breaks {
            for &s in shifts {
                let x = s - b;
                if x > lo && x < hi {
                    out.push(x);
                }
            }
            if b > lo && b < hi {
                out.push(b);
            }
        }
        out
    }

    fn i1(&self, opts: &QuadOptions<T>) -> T {
        let one = T::one();
        let br = self.breaks_in(one, self.u, &[]);
        integrate(|t: T| self.g(t) * self.w(self.u - t), one, self.u, &br, opts).value
    }

    /// `∫₁^{r} g(t) w(r − t + rest) dt` over the last coordinate, where `r` is
    /// the remaining budget.
    fn inner(&self, r: T, opts: &QuadOptions<T>) -> T {
        let one = T::one();
        if r <= one {
            return T::zero();
        }
        let br = self.breaks_in(one, r, &[]);
        integrate(|t: T| self.g(t) * self.w(r - t), one, r, &br, opts).value
    }

    fn i2(&self, opts: &QuadOptions<T>, inner: &QuadOptions<T>) -> T {
        let one = T::one();
        let hi = self.u - one;
        let br = self.breaks_in(one, hi, &[self.u]);
        integrate(|t1: T| self.g(t1) * self.inner(self.u - t1, inner), one, hi, &br, opts).value
    }

    /// `2∫_{t₁ ≤ t₂}` form of `I₂`.
    fn i2_symmetric(&self, opts: &QuadOptions<T>, inner: &QuadOptions<T>) -> T {
        let one = T::one();
        let half_u = lit::<T>(0.5) * self.u;
        let br = self.breaks_in(one, half_u, &[self.u]);
        let v = integrate(
            |t1: T| {
                let hi = self.u - t1;
                if hi <= t1 {
                    return T::zero();
                }
                let ib = self.breaks_in(t1, hi, &[]);
                self.g(t1) * integrate(|t2: T| self.g(t2) * self.w(hi - t2), t1, hi, &ib, inner).value
            },
            one,
            half_u,
            &br,
            opts,
        )
        .value;
        lit::<T>(2.0) * v
    }

    fn i3(&self, opts: &QuadOptions<T>, mid: &QuadOptions<T>, inner: &QuadOptions<T>) -> T {
        let one = T::one();
        let two = lit::<T>(2.0);
        let hi = self.u - two;
        let br = self.breaks_in(one, hi, &[self.u, self.u - one]);
        integrate(
            |t1: T| {
                let r = self.u - t1;
                let mb = self.breaks_in(one, r - one, &[r]);
                let m = integrate(|t2: T| self.g(t2) * self.inner(r - t2, inner), one, r - one, &mb, mid).value;
                self.g(t1) * m
            },
            one,
            hi,
            &br,
            opts,
        )
        .value
    }
}

fn factorial(j: u32) -> f64 {
    (1..=j).map(f64::from).product()
}

/// `I_j(u)` for `j ≤ 3`; zero whenever `u ≤ j`.
pub fn eval_ij<T: Real>(p: &Profile<T>, k: T, j: u32, u: T, cfg: &IncExcConfig<T>) -> Result<T> {
    if j == 0 {
        return Ok(T::one());
    }
    if u <= lit(f64::from(j)) {
        return Ok(T::zero());
    }
    if j > 3 || j > cfg.j_max {
        return Err(Error::UnsupportedOrder { j: j as usize, u: to_f64(u) });
    }
    if p.t_max() < u * (T::one() - lit::<T>(1e-12)) {
        return Err(Error::OutOfRange { what: "profile domain vs u", t: to_f64(u), lo: to_f64(p.t_min()), hi: to_f64(p.t_max()) });
    }
    let ctx = Ctx { p, k, u, weighted: cfg.weighted, breaks: p.breakpoints() };
    Ok(match j {
        1 => ctx.i1(&cfg.opts(T::one())),
        2 => ctx.i2(&cfg.opts(T::one()), &cfg.opts(lit(0.05))),
        _ => ctx.i3(&cfg.opts(T::one()), &cfg.opts(lit(0.05)), &cfg.opts(lit(0.002))),
    })
}

/// `I₂(u)` integrated over `t₁ ≤ t₂` and doubled.
pub fn eval_i2_symmetric<T: Real>(p: &Profile<T>, k: T, u: T, cfg: &IncExcConfig<T>) -> Result<T> {
    if u <= lit(2.0) {
        return Ok(T::zero());
    }
    if p.t_max() < u * (T::one() - lit::<T>(1e-12)) {
        return Err(Error::OutOfRange { what: "profile domain vs u", t: to_f64(u), lo: to_f64(p.t_min()), hi: to_f64(p.t_max()) });
    }
    let ctx = Ctx { p, k, u, weighted: cfg.weighted, breaks: p.breakpoints() };
    Ok(ctx.i2_symmetric(&cfg.opts(T::one()), &cfg.opts(lit(0.05))))
}

/// Alternating partial sums `u^{k−1} Σ_{j<2m} (−1)^j I_j/j!` and
/// `u^{k−1} Σ_{j≤2m} (−1)^j I_j/j!` (the factor `u^{k−1}` only in weighted
/// mode). Orders above `j_max` are allowed only where they vanish (`u ≤ j`).
pub fn sigma_bracket<T: Real>(p: &Profile<T>, k: T, u: T, m: u32, cfg: &IncExcConfig<T>) -> Result<(T, T)> {
    let mut partial = T::zero();
    let mut lower = T::zero();
    for j in 0..=2 * m {
        let ij = if j > cfg.j_max && u <= lit(f64::from(j)) {
            T::zero()
        } else if j > cfg.j_max {
            return Err(Error::Precondition(format!(
                "m = {m} needs I_{j}({}) but j_max = {}",
                to_f64(u),
                cfg.j_max
            )));
        } else {
            eval_ij(p, k, j, u, cfg)?
        };
        let term = ij / lit::<T>(factorial(j));
        partial = if j % 2 == 0 { partial + term } else { partial - term };
        if j + 1 == 2 * m {
            lower = partial;
        }
    }
    if m == 0 {
        lower = T::neg_infinity();
    }
    let scale = if cfg.weighted && k != T::one() { u.powf(k - T::one()) } else { T::one() };
    Ok((lower * scale, partial * scale))
}

/// `I₃'(u) = ∫_{t₁+t₂+t₃ ≤ u, tᵢ ≥ 1} (u − t₁ − t₂ − t₃)/(u t₁ t₂ t₃)`.
///
/// The innermost integral is done in closed form,
/// `∫₁^r (r − t)/t dt = r log r − (r − 1)`.
pub fn eval_i3prime<T: Real>(u: T, cfg: &IncExcConfig<T>) -> T {
    let one = T::one();
    let three = lit::<T>(3.0);
    if u <= three {
        return T::zero();
    }
    let closed = |r: T| if r <= one { T::zero() } else { r * r.ln() - (r - one) };
    let outer = cfg.opts(T::one());
    let inner = cfg.opts(lit(0.05));
    let v = integrate(
        |t1: T| {
            let r = u - t1;
            integrate(|t2: T| closed(r - t2) / t2, one, r - one, &[], &inner).value / t1
        },
        one,
        u - lit(2.0),
        &[],
        &outer,
    )
    .value;
    (v / u).max(T::zero())
}

/// CSV table `u,I1,I2,I3` on the given points.
pub fn ij_table<T: Real>(p: &Profile<T>, k: T, us: &[T], cfg: &IncExcConfig<T>) -> Result<String> {
    let mut out = String::from("u,I1,I2,I3\n");
    for &u in us {
        let mut row = vec![to_f64(u)];
        for j in 1..=3 {
            row.push(if j <= cfg.j_max { to_f64(eval_ij(p, k, j, u, cfg)?) } else { f64::NAN });
        }
        let _ = writeln!(out, "{:.6},{:.12e},{:.12e},{:.12e}", row[0], row[1], row[2], row[3]);
    }
    Ok(out)
}
