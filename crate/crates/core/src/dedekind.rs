//! Bounds from the Dedekind zeta function: the constant
//! `A = sup_λ (1 − (l/(l−1))e^{−λ})/λ`, the resulting exponent for the least
//! non-split prime, and upper bounds for the residue `κ` at `s = 1`.

use crate::error::{Error, Result};
use crate::primes::{asymptotic_sums, least_t_reaching, mangoldt_sums, SIEVE_CAP};
use crate::quad::golden_max;
use crate::scalar::{lit, to_f64, Real};
use crate::specfun::euler_gamma;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Degree `l` and `log d_K` of a number field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams<T> {
    pub l: u32,
    pub log_dk: T,
}

impl<T: Real> FieldParams<T> {
    pub fn new(l: u32, log_dk: T) -> Result<Self> {
        if l < 2 {
            return Err(Error::Domain(format!("degree must be at least 2, got {l}")));
        }
        if !(log_dk > T::zero()) || !log_dk.is_finite() {
            return Err(Error::Domain("log d_K must be positive and finite".into()));
        }
        Ok(FieldParams { l, log_dk })
    }

    /// `k = l − 1`.
    pub fn k(&self) -> T {
        lit(f64::from(self.l) - 1.0)
    }

    /// `d = log d_K / l`.
    pub fn d(&self) -> T {
        self.log_dk / lit(f64::from(self.l))
    }

    /// `log(log d_K / l)`.
    pub fn big_d(&self) -> T {
        self.d().ln()
    }

    /// Discriminants grow at least like `2^l`; smaller inputs are suspicious.
    pub fn below_growth_floor(&self) -> bool {
        self.log_dk < lit::<T>(f64::from(self.l)) * lit::<T>(2.0).ln()
    }
}

/// Choice of the constant `c` in the explicit-formula inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CPolicy {
    StarkHalf,
    Quarter,
    QuarterPlusB,
    Stechkin,
}

impl CPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            CPolicy::StarkHalf => "stark_half",
            CPolicy::Quarter => "quarter",
            CPolicy::QuarterPlusB => "quarter_plus_B",
            CPolicy::Stechkin => "stechkin",
        }
    }

    pub fn resolve<T: Real>(&self, fp: &FieldParams<T>) -> Result<T> {
        Ok(match self {
            CPolicy::StarkHalf => lit(0.5),
            CPolicy::Quarter => lit(0.25),
            CPolicy::Stechkin => (T::one() - lit::<T>(5.0).sqrt().recip()) / lit(2.0),
            CPolicy::QuarterPlusB => lit::<T>(0.25) + b_term(fp)?,
        })
    }
}

impl std::str::FromStr for CPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stark_half" | "half" => Ok(CPolicy::StarkHalf),
            "quarter" => Ok(CPolicy::Quarter),
            "quarter_plus_b" => Ok(CPolicy::QuarterPlusB),
            "stechkin" => Ok(CPolicy::Stechkin),
            _ => Err(Error::Domain(format!("unknown c policy `{s}`"))),
        }
    }
}

/// `B = 2 log D / D` with `D = log d_K / l` (the explicit part only).
pub fn b_term<T: Real>(fp: &FieldParams<T>) -> Result<T> {
    let d = fp.d();
    if d < T::E() {
        return Err(Error::Domain(format!("log d_K / l = {} is below e; B undefined", to_f64(d))));
    }
    Ok(lit::<T>(2.0) * d.ln() / d)
}

/// `a(λ) = (1 − (l/(l−1))e^{−λ})/λ`.
pub fn a_lambda<T: Real>(l: u32, lam: T) -> Result<T> {
    if l < 2 {
        return Err(Error::Domain(format!("degree must be at least 2, got {l}")));
    }
    if !(lam > T::zero()) {
        return Err(Error::Domain(format!("lambda must be positive, got {}", to_f64(lam))));
    }
    let lf = lit::<T>(f64::from(l));
    Ok((T::one() - lf / (lf - T::one()) * (-lam).exp()) / lam)
}

/// `(A, argmax)` with `A = sup_{λ>0} a(λ)`, by golden section on `(0, 50]`.
pub fn sup_a<T: Real>(l: u32) -> Result<(T, T)> {
    if l < 2 {
        return Err(Error::Domain(format!("degree must be at least 2, got {l}")));
    }
    let (arg, val) = golden_max(
        |lam: T| a_lambda(l, lam).unwrap_or(T::neg_infinity()),
        lit(1e-9),
        lit(50.0),
        lit(1e-10),
    );
    Ok((val, arg))
}

/// A bound exponent with its intermediate constants and baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub method: String,
    pub exponent: f64,
    pub baseline: f64,
    pub beats_baseline: bool,
    pub constants: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Exponent `c/(A(l−1))` in `N ≪ d_K^{exponent}`, against the barrier
/// `1/(2(l−1))`.
pub fn theorem1_exponent<T: Real>(fp: &FieldParams<T>, c: CPolicy) -> Result<ExponentReport> {
    let cv = c.resolve(fp)?;
    let (a, lam) = sup_a::<T>(fp.l)?;
    let k = fp.k();
    let exponent = cv / (a * k);
    let baseline = (lit::<T>(2.0) * k).recip();
    let mut constants = BTreeMap::new();
    constants.insert("A".into(), to_f64(a));
    constants.insert("lambda_star".into(), to_f64(lam));
    constants.insert("c".into(), to_f64(cv));
    constants.insert("l".into(), f64::from(fp.l));
    constants.insert("log_dK".into(), to_f64(fp.log_dk));
    let mut notes = vec!["asymptotic: (1+eps) factor and o(1) terms suppressed".to_string()];
    if fp.below_growth_floor() {
        notes.push("log d_K below l log 2; no such field exists".into());
    }
    Ok(ExponentReport {
        method: format!("zeta/{}", c.name()),
        exponent: to_f64(exponent),
        baseline: to_f64(baseline),
        beats_baseline: exponent < baseline,
        constants,
        notes,
    })
}

/// `log x` threshold `(c/(A(l−1)))·log d_K` up to which all primes may split.
pub fn invert_split_bound<T: Real>(fp: &FieldParams<T>, c: CPolicy) -> Result<T> {
    let cv = c.resolve(fp)?;
    let (a, _) = sup_a::<T>(fp.l)?;
    Ok(cv / (a * fp.k()) * fp.log_dk)
}

/// Result of [`find_t`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TThreshold<T> {
    /// `(log d_K/l)(c + 1/α)`.
    pub log_t: T,
    /// `log T` of the least `T` with `l Σ_{n≤T} Λ(n)/n ≥ c log d_K + 1/(σ−1)`
    /// by direct summation, when that `T` is within sieve reach. The sum is
    /// taken at exponent 1, matching the `Σ ≈ log T` step behind `log_t`.
    pub log_t_sieve: Option<T>,
    /// `(log_t_sieve − log_t)/log_t`.
    pub rel_gap: Option<T>,
    /// True when the target exceeds `−ζ'/ζ(σ) ≈ 1/(σ−1) − γ`, so that no `T`
    /// meets the condition at the actual `σ`.
    pub unreachable_at_sigma: bool,
}

/// Largest `T` tried by the summation cross-check of [`find_t`].
pub const FIND_T_SIEVE_LIMIT: u64 = 10_000_000;

/// Threshold `log T = (log d_K/l)(c + 1/α)` with `σ = 1 + α/log d_K`.
pub fn find_t<T: Real>(fp: &FieldParams<T>, c: CPolicy, alpha: T) -> Result<TThreshold<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::Domain("alpha must be positive".into()));
    }
    let cv = c.resolve(fp)?;
    let log_t = fp.d() * (cv + alpha.recip());
    let sigma = T::one() + alpha / fp.log_dk;
    let target = (cv * fp.log_dk + (sigma - T::one()).recip()) / lit(f64::from(fp.l));
    let unreachable_at_sigma = target > (sigma - T::one()).recip() - euler_gamma::<T>();
    // the sum runs about γ behind log T, so e² T is ample headroom
    let cap_log = log_t + lit(2.0);
    let mut log_t_sieve = None;
    if cap_log < lit::<T>(FIND_T_SIEVE_LIMIT as f64).ln() {
        let cap = to_f64(cap_log.exp()).ceil() as u64;
        if let Some(t) = least_t_reaching(target, T::one(), cap.max(2)) {
            log_t_sieve = Some(lit::<T>(t as f64).ln());
        }
    }
    Ok(TThreshold {
        log_t,
        log_t_sieve,
        rel_gap: log_t_sieve.map(|s| (s - log_t) / log_t),
        unreachable_at_sigma,
    })
}

/// Residue bounds, all reported as natural logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub l: u32,
    pub log_dk: f64,
    pub c_policy: String,
    pub c: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub log_t: f64,
    pub s2: f64,
    pub s2_exact: bool,
    /// `cα + l·s2 + log(σ−1)`.
    pub log_greedy: f64,
    /// `log(σ−1) + cα + l(γ + log c + 1/(cα) + log(log d_K/l))`, the closed
    /// form the assembly is bounded by before the final simplification.
    pub log_proof_form: f64,
    /// `(l−1) log(c e^{γ+√(2/l)} log d_K/l)`.
    pub log_theorem2: f64,
    /// `(l−1) log(e log d_K/(2(l−1)))`.
    pub log_louboutin: f64,
    pub notes: Vec<String>,
}

/// Residue bound assembled with `α = 4√l`, `σ = 1 + α/log d_K` and `T` from
/// [`find_t`], together with the closed forms it is compared to.
pub fn residue_bound<T: Real>(fp: &FieldParams<T>, c: CPolicy) -> Result<ResidueReport> {
    b_term(fp)?;
    let cv = c.resolve(fp)?;
    let lf = lit::<T>(f64::from(fp.l));
    let alpha = lit::<T>(4.0) * lf.sqrt();
    let sigma = T::one() + alpha / fp.log_dk;
    let th = find_t(fp, c, alpha)?;
    let log_t = th.log_t;
    let g = euler_gamma::<T>();
    let t_val = log_t.exp();
    let sums = if t_val <= lit(SIEVE_CAP as f64) {
        mangoldt_sums(to_f64(t_val).floor() as u64, sigma)?
    } else {
        asymptotic_sums(log_t, sigma)
    };
    let log_sm1 = (sigma - T::one()).ln();
    let log_greedy = cv * alpha + lf * sums.s2 + log_sm1;
    let log_proof = log_sm1 + cv * alpha + lf * (g + cv.ln() + (cv * alpha).recip() + fp.d().ln());
    let km1 = lf - T::one();
    let log_thm2 = km1 * (cv.ln() + g + (lit::<T>(2.0) / lf).sqrt() + fp.d().ln());
    let log_lou = km1 * (T::one() + (fp.log_dk / (lit::<T>(2.0) * km1)).ln());
    let mut notes = vec!["O(l), o(1) and O(1/log d) terms dropped".to_string()];
    if th.unreachable_at_sigma {
        notes.push("threshold sum cannot reach its target at this sigma; log T taken from the formula".into());
    }
    if !sums.exact {
        notes.push("s2 from log log T + gamma + 2/log^2 T (T beyond sieve)".into());
    }
    if c != CPolicy::QuarterPlusB {
        notes.push("closed forms evaluated with the selected c in place of 1/4 + B".into());
    }
    Ok(ResidueReport {
        l: fp.l,
        log_dk: to_f64(fp.log_dk),
        c_policy: c.name().into(),
        c: to_f64(cv),
        alpha: to_f64(alpha),
        sigma: to_f64(sigma),
        log_t: to_f64(log_t),
        s2: to_f64(sums.s2),
        s2_exact: sums.exact,
        log_greedy: to_f64(log_greedy),
        log_proof_form: to_f64(log_proof),
        log_theorem2: to_f64(log_thm2),
        log_louboutin: to_f64(log_lou),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{lambert_w, WBranch};

    /// `A = −1/W₋₁(−(l−1)/(l e))` from `a'(λ) = 0`.
    fn a_closed(l: u32) -> f64 {
        let x = -(f64::from(l) - 1.0) / (f64::from(l) * std::f64::consts::E);
        -1.0 / lambert_w(WBranch::Lower, x).unwrap()
    }

    #[test]
    fn a_lambda_examples() {
        assert!(a_lambda(2, 2f64.ln()).unwrap().abs() < 1e-15);
        let big = a_lambda(1_000_000, 1.0f64).unwrap();
        assert!((big - (1.0 - (-1.0f64).exp())).abs() < 1e-5);
        assert!(a_lambda(3, 0.0f64).is_err());
        for l in 3..40 {
            let lam = (2.0 / (f64::from(l) - 1.0)).sqrt();
            assert!(a_lambda(l, lam).unwrap() >= 1.0 - lam - 1e-12);
        }
    }

    #[test]
    fn sup_a_values() {
        let (a2, lam2) = sup_a::<f64>(2).unwrap();
        assert!((a2 - a_closed(2)).abs() < 1e-12);
        assert!((a2 - 0.373).abs() < 1e-3 && (lam2 - 1.68).abs() < 0.02);
        let (a3, _) = sup_a::<f64>(3).unwrap();
        let (a4, _) = sup_a::<f64>(4).unwrap();
        assert!(a3 < 0.5 && a4 > 0.5);
        assert!((a4 - 0.510).abs() < 1e-3);
    }

    #[test]
    fn theorem1_examples() {
        let fp = FieldParams::new(4, 100.0f64).unwrap();
        let r = theorem1_exponent(&fp, CPolicy::Quarter).unwrap();
        assert!(r.beats_baseline);
        assert!((1.0 / r.exponent - 6.11).abs() < 0.02);
        let fp2 = FieldParams::new(2, 100.0f64).unwrap();
        let r2 = theorem1_exponent(&fp2, CPolicy::Quarter).unwrap();
        assert!((r2.exponent - 0.25 / a_closed(2)).abs() < 1e-9);
        assert!(r2.exponent > 1.0 / (4.0 * 0.5f64.exp()));
        let r3 = theorem1_exponent(&fp, CPolicy::StarkHalf).unwrap();
        assert!(r3.exponent >= r3.baseline);
    }

    #[test]
    fn split_threshold_linear_in_c() {
        let fp = FieldParams::new(10, 100.0f64).unwrap();
        let a = invert_split_bound(&fp, CPolicy::Quarter).unwrap();
        let b = invert_split_bound(&fp, CPolicy::StarkHalf).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-10);
        assert!((a - 100.0 * 0.25 / (a_closed(10) * 9.0)).abs() < 1e-8);
    }

    #[test]
    fn b_term_at_e() {
        let fp = FieldParams::new(2, 2.0 * std::f64::consts::E).unwrap();
        assert!((b_term(&fp).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-14);
        let small = FieldParams::new(10, 20.0f64).unwrap();
        assert!(b_term(&small).is_err());
        assert!(residue_bound(&small, CPolicy::Quarter).is_err());
    }

    #[test]
    fn find_t_formula() {
        let fp = FieldParams::new(5, 500.0f64).unwrap();
        let alpha = 4.0 * 5f64.sqrt();
        let t = find_t(&fp, CPolicy::Quarter, alpha).unwrap();
        assert!((t.log_t - 100.0 * (0.25 + 0.111_803_398_874_989_5)).abs() < 1e-10);
        assert!(t.log_t_sieve.is_none());
        let t_inf = find_t(&fp, CPolicy::Quarter, 1e12).unwrap();
        assert!((t_inf.log_t - 25.0).abs() < 1e-9);
    }

    #[test]
    fn find_t_sieve_small_field() {
        let fp = FieldParams::new(2, 40.0f64).unwrap();
        let t = find_t(&fp, CPolicy::Quarter, 4.0 * 2f64.sqrt()).unwrap();
        let gap = t.rel_gap.unwrap();
        // Σ Λ(n)/n trails log T by about γ
        assert!(gap > 0.0 && gap < 0.15, "gap={gap}");
        assert!(t.unreachable_at_sigma);
        let fp5 = FieldParams::new(5, 60.0f64).unwrap();
        assert!(!find_t(&fp5, CPolicy::Quarter, 4.0 * 5f64.sqrt()).unwrap().unreachable_at_sigma);
    }

    #[test]
    fn residue_log_sigma_term() {
        let fp = FieldParams::new(10, 1e4f64).unwrap();
        let r = residue_bound(&fp, CPolicy::QuarterPlusB).unwrap();
        let expect = (4.0 * 10f64.sqrt()).ln() - 1e4f64.ln();
        assert!(((r.sigma - 1.0).ln() - expect).abs() < 1e-12);
        assert!(r.log_theorem2 < r.log_louboutin);
    }
}
