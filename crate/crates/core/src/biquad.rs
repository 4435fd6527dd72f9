//! Biquadratic fields `Q(√q₁, √q₂)` with `q₁ = q^{1−δ}`, `q₂ = q`: the
//! envelope integral for the product character, the feasibility constraint
//! `4 log A + ∫₂^B (1 − P(t))/t dt ≥ 3` with `B = (2 − δ)A`, and the sweep over `δ`.

use crate::error::{Error, Result};
use crate::incexc::IncExcConfig;
use crate::profiles::{biquad_breakpoints, biquad_pointwise_upper, CharEnvelope};
use crate::quad::{integrate_real, QuadOptions};
use crate::scalar::{lit, to_f64, Real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Prime averages split by the values of `(χ₁(p), χ₂(p))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SQuadruple<T> {
    /// `χ₁ = χ₂ = 1`.
    pub s_pp: T,
    /// `χ₁ = χ₂ = −1`.
    pub s_mm: T,
    /// `χ₁ = 1, χ₂ = −1`.
    pub s_pm: T,
    /// `χ₁ = −1, χ₂ = 1`.
    pub s_mp: T,
}

impl<T: Real> SQuadruple<T> {
    pub fn total(&self) -> T {
        self.s_pp + self.s_mm + self.s_pm + self.s_mp
    }

    /// Average of `χ₁`.
    pub fn p1(&self) -> T {
        self.s_pp - self.s_mm + self.s_pm - self.s_mp
    }

    /// Average of `χ₂`.
    pub fn p2(&self) -> T {
        self.s_pp - self.s_mm - self.s_pm + self.s_mp
    }

    /// Average of `χ₁χ₂`.
    pub fn product(&self) -> T {
        self.s_pp + self.s_mm - self.s_pm - self.s_mp
    }

    /// `2S₁ + 2S₋₁ − 1`, equal to [`Self::product`] when the total is 1.
    pub fn product_reduced(&self) -> T {
        lit::<T>(2.0) * (self.s_pp + self.s_mm) - T::one()
    }
}

/// Upper bound for `∫₂^B (1 − P(t))/t dt`, `B = (2 − δ)A`, integrating the
/// pointwise envelope. Zero when `B ≤ 2`.
pub fn biquad_integral_bound<T: Real>(a: T, delta: T, cfg: &IncExcConfig<T>) -> Result<T> {
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(Error::Domain(format!("delta = {} outside [0, 1]", to_f64(delta))));
    }
    let env = CharEnvelope::new(a)?;
    let two = lit::<T>(2.0);
    let b = (two - delta) * a;
    if b <= two {
        return Ok(T::zero());
    }
    let bp = biquad_breakpoints(&env);
    let breaks = [bp.t_log_end, bp.t0, T::one() + a, bp.t1, lit(3.0), bp.t2];
    let opts = QuadOptions::new(cfg.quad_tolerance * lit(0.01)).with_rel(lit(1e-13));
    let mut err = None;
    let v = integrate_real(
        |t: T| {
            biquad_pointwise_upper(&env, delta, t).unwrap_or_else(|e| {
                err.get_or_insert(e);
                T::zero()
            })
        },
        two,
        b,
        &breaks,
        &opts,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∫₂^{1+e^{1/4}} 8 log(t − 1)/t dt`.
pub fn log_cap_subintegral<T: Real>(cfg: &IncExcConfig<T>) -> T {
    let one = T::one();
    let end = one + lit::<T>(0.25).exp();
    let opts = QuadOptions::new(cfg.quad_tolerance * lit(0.01)).with_rel(lit(1e-14));
    integrate_real(|t: T| lit::<T>(8.0) * (t - one).ln() / t, lit(2.0), end, &[], &opts)
}

/// `4 log A + ∫₂^B (1 − P)/t − 3`.
fn slack<T: Real>(a: T, delta: T, cfg: &IncExcConfig<T>) -> Result<T> {
    Ok(lit::<T>(4.0) * a.ln() + biquad_integral_bound(a, delta, cfg)? - lit(3.0))
}

/// Bisection tolerance of [`biquad_solve_a`].
pub const SOLVE_TOL: f64 = 1e-5;

/// Smallest `A ∈ [√e, 2]` with `4 log A + ∫₂^B (1 − P)/t ≥ 3`.
pub fn biquad_solve_a<T: Real>(delta: T, cfg: &IncExcConfig<T>) -> Result<T> {
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(Error::Domain(format!("delta = {} outside [0, 1)", to_f64(delta))));
    }
    let mut lo = lit::<T>(0.5).exp();
    let mut hi = lit::<T>(2.0);
    if slack(hi, delta, cfg)? < T::zero() {
        return Err(Error::Infeasible { delta: to_f64(delta) });
    }
    if slack(lo, delta, cfg)? >= T::zero() {
        return Ok(lo);
    }
    let tol = lit::<T>(SOLVE_TOL);
    while hi - lo > tol {
        let mid = lit::<T>(0.5) * (lo + hi);
        if slack(mid, delta, cfg)? >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One `δ` of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiquadRow {
    pub delta: f64,
    pub a: f64,
    /// `1/(4A(δ))`.
    pub exp_interaction: f64,
    /// `(1 − δ)/(4√e)`.
    pub exp_trivial: f64,
    /// Minimum of the two, the exponent on `q`.
    pub exp_final: f64,
}

impl BiquadRow {
    /// Exponent on `q₁q₂ = q^{2−δ}`.
    pub fn exp_q1q2(&self) -> f64 {
        self.exp_final / (2.0 - self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiquadReport {
    pub grid_step: f64,
    pub quad_tolerance: f64,
    pub rows: Vec<BiquadRow>,
    /// Argmax over the grid of the exponent on `q₁q₂`.
    pub worst_delta: f64,
    /// Exponent on `q` at `worst_delta`.
    pub worst_exponent_q: f64,
    /// `worst_exponent_q/(2 − worst_delta)`, the exponent on `q₁q₂`.
    pub exponent_q1q2: f64,
    /// Exponent on `q₁q₂` at `δ = 0`.
    pub exponent_q1q2_at_zero: f64,
    pub subintegral: f64,
    pub notes: Vec<String>,
}

impl BiquadReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,A,exp_interaction,exp_trivial,exp_final\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.4},{:.8},{:.8},{:.8},{:.8}\n",
                r.delta, r.a, r.exp_interaction, r.exp_trivial, r.exp_final
            ));
        }
        out
    }
}

/// Upper end of the `δ` grid; past it the trivial exponent is always smaller.
pub const SWEEP_END: f64 = 0.5;

/// Solves for `A(δ)` on `δ ∈ [0, 0.5]` and locates the worst `δ`.
///
/// The exponent on `q` alone is largest at `δ = 0`, since `A(δ)` grows with
/// `δ`. The worst case is taken on the scale of the conductor `q₁q₂ = q^{2−δ}`,
/// where the interaction exponent rises and the trivial one falls.
pub fn biquad_sweep<T: Real>(cfg: &IncExcConfig<T>, grid_step: f64) -> Result<BiquadReport> {
    if !(grid_step > 0.0 && grid_step <= 0.005) {
        return Err(Error::Precondition(format!("grid step {grid_step} must lie in (0, 0.005]")));
    }
    let n = (SWEEP_END / grid_step).round() as usize;
    let trivial_scale = 1.0 / (4.0 * 0.5f64.exp());
    let rows: Vec<BiquadRow> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let delta = i as f64 * grid_step;
            let a = to_f64(biquad_solve_a(lit::<T>(delta), cfg)?);
            let exp_interaction = 1.0 / (4.0 * a);
            let exp_trivial = (1.0 - delta) * trivial_scale;
            Ok(BiquadRow { delta, a, exp_interaction, exp_trivial, exp_final: exp_interaction.min(exp_trivial) })
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().copied().fold(rows[0], |best, r| if r.exp_q1q2() > best.exp_q1q2() { r } else { best });
    Ok(BiquadReport {
        grid_step,
        quad_tolerance: to_f64(cfg.quad_tolerance),
        worst_delta: worst.delta,
        worst_exponent_q: worst.exp_final,
        exponent_q1q2: worst.exp_q1q2(),
        exponent_q1q2_at_zero: rows[0].exp_q1q2(),
        subintegral: to_f64(log_cap_subintegral(cfg)),
        rows,
        notes: vec![
            "shared cancellation point A for both characters".into(),
            "exponents hold up to q^eps".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> IncExcConfig<f64> {
        IncExcConfig::new(true, 3, 1e-8).unwrap()
    }

    fn random_quadruple(rng: &mut ChaCha8Rng) -> SQuadruple<f64> {
        let w: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        let s: f64 = w.iter().sum();
        SQuadruple { s_pp: w[0] / s, s_mm: w[1] / s, s_pm: w[2] / s, s_mp: w[3] / s }
    }

    #[test]
    fn product_average_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let q = random_quadruple(&mut rng);
            assert!((q.total() - 1.0).abs() < 1e-14);
            assert!((q.product() - q.product_reduced()).abs() < 1e-14);
            // both χᵢ averages ≥ α forces P ≥ 2α − 1
            let alpha = q.p1().min(q.p2());
            if alpha > 0.0 {
                assert!(q.product() >= 2.0 * alpha - 1.0 - 1e-14);
            }
        }
    }

    #[test]
    fn log_integral_chain() {
        // with S constant on [1, u]: ∫S₋₁/t ≥ 1 − log u and S₁ ≥ 0 give ∫P/t ≥ 2 − 3 log u
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hits = 0;
        for _ in 0..2000 {
            let q = random_quadruple(&mut rng);
            let u: f64 = rng.gen_range(1.5..std::f64::consts::E);
            let lu = u.ln();
            if q.s_mm * lu >= 1.0 - lu {
                hits += 1;
                assert!(q.product() * lu >= (2.0 * q.s_mm - 1.0) * lu - 1e-14);
                assert!((2.0 * q.s_mm - 1.0) * lu >= 2.0 - 3.0 * lu - 1e-14);
            }
        }
        assert!(hits > 50, "hits={hits}");
    }

    #[test]
    fn subintegral_value() {
        let v = log_cap_subintegral(&cfg());
        assert!(v > 0.135 && v < 0.1354);
        // Simpson oracle
        let (a, b) = (2.0f64, 1.0 + 0.25f64.exp());
        let n = 20_000;
        let h = (b - a) / n as f64;
        let f = |t: f64| 8.0 * (t - 1.0).ln() / t;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        assert!((v - s * h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn integral_bound_basics() {
        let c = cfg();
        assert_eq!(biquad_integral_bound(1.8, 1.0, &c).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 0..=10 {
            let d = 0.05 * f64::from(10 - i);
            let v = biquad_integral_bound(1.773, d, &c).unwrap();
            assert!(v >= prev - 1e-12);
            let bb = (2.0 - d) * 1.773;
            assert!(v <= 2.0 * (bb / 2.0).ln() + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn solve_a_is_tight() {
        let c = cfg();
        for &d in &[0.0, 0.061, 0.3] {
            let a = biquad_solve_a(d, &c).unwrap();
            assert!(slack(a, d, &c).unwrap() >= 0.0);
            assert!(slack(a - 2e-5, d, &c).unwrap() < 0.0);
        }
        // the constraint tends to 4 log A ≥ 3, i.e. A = e^{3/4} > 2
        assert!(matches!(biquad_solve_a(0.99, &c), Err(Error::Infeasible { .. })));
        assert!(biquad_solve_a(1.0, &c).is_err());
    }
}
