//! Piecewise-analytic prime averages `P(t)` and the quadratic-character
//! envelopes they are built from.

use crate::error::{Error, Result};
use crate::quad::bisect;
use crate::scalar::{lit, to_f64, Real};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

/// Analytic form of one profile segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentForm<T> {
    /// `c`
    Constant { c: T },
    /// `a + b·log(t−1) + e·t`
    LogTm1 { a: T, b: T, e: T },
    /// `a + b·log(A/(t−A)) + e·t`
    LogA { a: T, b: T, e: T, cut: T },
    /// `a + b·log(A/(t−A)) + e·t + g·t·(t−3)^m`
    CubicTail { a: T, b: T, e: T, cut: T, g: T, m: u32 },
}

impl<T: Real> SegmentForm<T> {
    /// Unclamped value at `t`.
    pub fn raw(&self, t: T) -> T {
        match *self {
            SegmentForm::Constant { c } => c,
            SegmentForm::LogTm1 { a, b, e } => a + b * (t - T::one()).ln() + e * t,
            SegmentForm::LogA { a, b, e, cut } => a + b * (cut / (t - cut)).ln() + e * t,
            SegmentForm::CubicTail { a, b, e, cut, g, m } => {
                a + b * (cut / (t - cut)).ln() + e * t + g * t * (t - lit(3.0)).powi(m as i32)
            }
        }
    }

    fn negated(&self) -> Self {
        match *self {
            SegmentForm::Constant { c } => SegmentForm::Constant { c: -c },
            SegmentForm::LogTm1 { a, b, e } => SegmentForm::LogTm1 { a: -a, b: -b, e: -e },
            SegmentForm::LogA { a, b, e, cut } => SegmentForm::LogA { a: -a, b: -b, e: -e, cut },
            SegmentForm::CubicTail { a, b, e, cut, g, m } => SegmentForm::CubicTail {
                a: -a,
                b: -b,
                e: -e,
                cut,
                g: -g,
                m,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub t_start: T,
    pub t_end: T,
    pub form: SegmentForm<T>,
}

/// A prime average `P(t)` on `[t_0, t_max]`, evaluated segment by segment and
/// clamped into `[lower_clamp, k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile<T> {
    k: T,
    lower_clamp: T,
    segments: Vec<Segment<T>>,
}

impl<T: Real> Profile<T> {
    pub fn new(k: T, lower_clamp: T, segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Profile("profile has no segments".into()));
        }
        if !(lower_clamp <= k) {
            return Err(Error::Profile("lower clamp exceeds k".into()));
        }
        let tol = lit::<T>(1e-12);
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_start < s.t_end) {
                return Err(Error::Profile(format!("segment {i} is empty or reversed")));
            }
            if i > 0 {
                let prev = segments[i - 1].t_end;
                if (s.t_start - prev).abs() > tol * (T::one() + prev.abs()) {
                    return Err(Error::Profile(format!(
                        "segment {i} starts at {} but previous ends at {}",
                        to_f64(s.t_start),
                        to_f64(prev)
                    )));
                }
            }
        }
        Ok(Profile { k, lower_clamp, segments })
    }

    /// `P(t) = k` on `[0, 1]` and `−1` afterwards.
    pub fn extremal(k: T, t_max: T) -> Result<Self> {
        let one = T::one();
        let mut segs = vec![Segment { t_start: T::zero(), t_end: one, form: SegmentForm::Constant { c: k } }];
        if t_max > one {
            segs.push(Segment { t_start: one, t_end: t_max, form: SegmentForm::Constant { c: -one } });
        }
        Profile::new(k, -one, segs)
    }

    /// Constant profile `P ≡ c` on `[0, t_max]`.
    pub fn constant(k: T, c: T, t_max: T) -> Result<Self> {
        Profile::new(
            k,
            -T::one(),
            vec![Segment { t_start: T::zero(), t_end: t_max, form: SegmentForm::Constant { c } }],
        )
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn lower_clamp(&self) -> T {
        self.lower_clamp
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn t_min(&self) -> T {
        self.segments[0].t_start
    }

    pub fn t_max(&self) -> T {
        self.segments[self.segments.len() - 1].t_end
    }

    /// Interior segment boundaries.
    pub fn breakpoints(&self) -> Vec<T> {
        self.segments[1..].iter().map(|s| s.t_start).collect()
    }

    fn clamp(&self, v: T) -> T {
        v.max(self.lower_clamp).min(self.k)
    }

    fn check(&self, t: T) -> Result<()> {
        let slack = lit::<T>(1e-12) * (T::one() + self.t_max().abs());
        if !(t >= self.t_min() - slack && t <= self.t_max() + slack) {
            return Err(Error::OutOfRange {
                what: "profile",
                t: to_f64(t),
                lo: to_f64(self.t_min()),
                hi: to_f64(self.t_max()),
            });
        }
        Ok(())
    }

    fn index_right(&self, t: T) -> usize {
        // first segment whose end exceeds t; the last segment is closed
        let i = self.segments.partition_point(|s| s.t_end <= t);
        i.min(self.segments.len() - 1)
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, t: T) -> Result<T> {
        self.check(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: T) -> T {
        let s = &self.segments[self.index_right(t)];
        self.clamp(s.form.raw(t))
    }

    /// Left-continuous evaluation.
    pub fn eval_left(&self, t: T) -> Result<T> {
        self.check(t)?;
        Ok(self.eval_left_unchecked(t))
    }

    fn eval_left_unchecked(&self, t: T) -> T {
        let i = self.segments.partition_point(|s| s.t_end < t).min(self.segments.len() - 1);
        self.clamp(self.segments[i].form.raw(t))
    }

    /// Mean of the one-sided limits; equals `eval` away from breakpoints.
    pub fn eval_mid(&self, t: T) -> T {
        let r = self.eval_unchecked(t);
        let l = self.eval_left_unchecked(t);
        if r == l {
            r
        } else {
            lit::<T>(0.5) * (r + l)
        }
    }

    /// The profile `−P` with clamps `[−k, −lower_clamp]`.
    pub fn negated(&self) -> Self {
        Profile {
            k: -self.lower_clamp,
            lower_clamp: -self.k,
            segments: self
                .segments
                .iter()
                .map(|s| Segment { t_start: s.t_start, t_end: s.t_end, form: s.form.negated() })
                .collect(),
        }
    }

    /// Same segments with different clamps.
    pub fn with_clamps(mut self, k: T, lower_clamp: T) -> Result<Self> {
        if !(lower_clamp <= k) {
            return Err(Error::Profile("lower clamp exceeds k".into()));
        }
        self.k = k;
        self.lower_clamp = lower_clamp;
        Ok(self)
    }

    /// Concatenates `other` after `self`.
    pub fn then(mut self, other: &Profile<T>) -> Result<Self> {
        self.segments.extend_from_slice(&other.segments);
        Profile::new(self.k, self.lower_clamp, self.segments)
    }

    /// Renders the profile in the text format accepted by [`Profile::from_str`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k {}", to_f64(self.k));
        let _ = writeln!(out, "lower {}", to_f64(self.lower_clamp));
        for s in &self.segments {
            let (a, b) = (to_f64(s.t_start), to_f64(s.t_end));
            let _ = match s.form {
                SegmentForm::Constant { c } => writeln!(out, "{a} {b} const {}", to_f64(c)),
                SegmentForm::LogTm1 { a: p, b: q, e } => {
                    writeln!(out, "{a} {b} log_tm1 {} {} {}", to_f64(p), to_f64(q), to_f64(e))
                }
                SegmentForm::LogA { a: p, b: q, e, cut } => writeln!(
                    out,
                    "{a} {b} log_a {} {} {} {}",
                    to_f64(p),
                    to_f64(q),
                    to_f64(e),
                    to_f64(cut)
                ),
                SegmentForm::CubicTail { a: p, b: q, e, cut, g, m } => writeln!(
                    out,
                    "{a} {b} cubic_tail {} {} {} {} {} {m}",
                    to_f64(p),
                    to_f64(q),
                    to_f64(e),
                    to_f64(cut),
                    to_f64(g)
                ),
            };
        }
        out
    }
}

impl<T: Real> FromStr for Profile<T> {
    type Err = Error;

    /// Parses one segment per line, `t_start t_end kind params...`, with kinds
    /// `const c`, `log_tm1 a b e`, `log_a a b e A` and `cubic_tail a b e A g m`.
    /// Optional `k <value>` and `lower <value>` lines set the clamps (defaults
    /// 1 and −1). `#` starts a comment.
    fn from_str(src: &str) -> Result<Self> {
        let mut k = T::one();
        let mut lower = -T::one();
        let mut segs = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<T> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(lit)
                    .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad number `{s}`") })
            };
            match toks[0] {
                "k" | "lower" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line: line_no, msg: "expected one value".into() });
                    }
                    let v = num(toks[1])?;
                    if toks[0] == "k" {
                        k = v;
                    } else {
                        lower = v;
                    }
                    continue;
                }
                _ => {}
            }
            if toks.len() < 3 {
                return Err(Error::Parse { line: line_no, msg: "expected `t_start t_end kind params...`".into() });
            }
            let t_start = num(toks[0])?;
            let t_end = num(toks[1])?;
            let params: Vec<&str> = toks[3..].to_vec();
            let want = |n: usize| -> Result<()> {
                if params.len() == n {
                    Ok(())
                } else {
                    Err(Error::Parse {
                        line: line_no,
                        msg: format!("kind `{}` takes {n} parameters, got {}", toks[2], params.len()),
                    })
                }
            };
            let form = match toks[2] {
                "const" => {
                    want(1)?;
                    SegmentForm::Constant { c: num(params[0])? }
                }
                "log_tm1" => {
                    want(3)?;
                    SegmentForm::LogTm1 { a: num(params[0])?, b: num(params[1])?, e: num(params[2])? }
                }
                "log_a" => {
                    want(4)?;
                    SegmentForm::LogA {
                        a: num(params[0])?,
                        b: num(params[1])?,
                        e: num(params[2])?,
                        cut: num(params[3])?,
                    }
                }
                "cubic_tail" => {
                    want(6)?;
                    let m: u32 = params[5]
                        .parse()
                        .map_err(|_| Error::Parse { line: line_no, msg: format!("bad exponent `{}`", params[5]) })?;
                    SegmentForm::CubicTail {
                        a: num(params[0])?,
                        b: num(params[1])?,
                        e: num(params[2])?,
                        cut: num(params[3])?,
                        g: num(params[4])?,
                        m,
                    }
                }
                other => {
                    return Err(Error::Parse { line: line_no, msg: format!("unknown segment kind `{other}`") });
                }
            };
            segs.push(Segment { t_start, t_end, form });
        }
        Profile::new(k, lower, segs)
    }
}

/// Cancellation point `A` of a quadratic character together with
/// `E = 2 log A − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharEnvelope<T> {
    pub a: T,
    pub e: T,
}

impl<T: Real> CharEnvelope<T> {
    pub fn new(a: T) -> Result<Self> {
        let lo = lit::<T>(0.5).exp();
        let slack = lit::<T>(1e-12);
        if !(a >= lo - slack && a <= lit::<T>(2.0) + slack) {
            return Err(Error::Domain(format!("A = {} outside [sqrt(e), 2]", to_f64(a))));
        }
        Ok(CharEnvelope { a, e: lit::<T>(2.0) * a.ln() - T::one() })
    }
}

fn range_err<T: Real>(what: &'static str, t: T, lo: T, hi: T) -> Error {
    Error::OutOfRange { what, t: to_f64(t), lo: to_f64(lo), hi: to_f64(hi) }
}

fn in_range<T: Real>(t: T, lo: T, hi: T) -> bool {
    let slack = lit::<T>(1e-12);
    t >= lo - slack && t <= hi + slack
}

/// Lower bound for `(1 − P(t))/t` on `[2, 4]` for a quadratic character.
pub fn envelope_lower_1mp<T: Real>(env: &CharEnvelope<T>, t: T) -> Result<T> {
    let (two, three, four) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));
    if !in_range(t, two, four) {
        return Err(range_err("envelope_lower_1mp", t, two, four));
    }
    let a = env.a;
    let v = if t <= T::one() + a {
        four / t * (t - T::one()).ln() - two * env.e
    } else {
        let base = four / t * (a / (t - a)).ln() - two * env.e;
        if t <= three {
            base
        } else {
            base - lit::<T>(2.0 / 3.0) * (t - three).powi(2)
        }
    };
    Ok(v.min(two / t))
}

/// Upper bound for `(1 − P(t))/t` on `[2, 2A]` for a quadratic character.
pub fn envelope_upper_1mp<T: Real>(env: &CharEnvelope<T>, t: T) -> Result<T> {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let a = env.a;
    if !in_range(t, two, two * a) {
        return Err(range_err("envelope_upper_1mp", t, two, two * a));
    }
    let v = if t <= T::one() + a {
        four / t * (t - T::one()).ln()
    } else {
        four / t * (a / (t - a)).ln()
    };
    Ok(v.min(two / t).max(T::zero()))
}

/// Lower bound `2 log(b/a) − E` for `∫_a^b (1 − P(t))/t dt`, floored at 0.
pub fn interval_mass_lower<T: Real>(env: &CharEnvelope<T>, a: T, b: T) -> Result<T> {
    if !(in_range(a, T::one(), env.a) && in_range(b, a, env.a)) {
        return Err(Error::Domain(format!(
            "interval [{}, {}] not inside [1, A={}]",
            to_f64(a),
            to_f64(b),
            to_f64(env.a)
        )));
    }
    Ok((lit::<T>(2.0) * (b / a).ln() - env.e).max(T::zero()))
}

/// Upper envelope `U(t) ≥ −P(t)` on `[A, 4]` in the cubic case, with tail
/// exponent `m`.
pub fn cubic_u<T: Real>(env: &CharEnvelope<T>, t: T, m: u32) -> Result<T> {
    let (one, two, three, four) = (T::one(), lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));
    let a = env.a;
    if !in_range(t, a, four) {
        return Err(range_err("cubic_u", t, a, four));
    }
    let v = if t <= two {
        one
    } else if t <= one + a {
        one - two * (t - one).ln() + env.e * t
    } else {
        let base = one - two * (a / (t - a)).ln() + env.e * t;
        if t <= three {
            base
        } else {
            base + t * (t - three).powi(m as i32) / three
        }
    };
    Ok(v.min(one).max(T::zero()))
}

/// Lower envelope `L(t) ≤ −P(t)` on `[1, 2A]` in the cubic case.
pub fn cubic_l<T: Real>(env: &CharEnvelope<T>, t: T) -> Result<T> {
    let (one, two) = (T::one(), lit::<T>(2.0));
    let a = env.a;
    if !in_range(t, one, two * a) {
        return Err(range_err("cubic_l", t, one, two * a));
    }
    let v = if t <= a {
        T::zero()
    } else if t <= two {
        one
    } else if t <= one + a {
        one - two * (t - one).ln()
    } else {
        one - two * (a / (t - a)).ln()
    };
    Ok(v.min(one).max(T::zero()))
}

/// `U` as a profile of `−P` on `[A, 4]`, clamped to `[0, 1]`.
pub fn cubic_u_profile<T: Real>(env: &CharEnvelope<T>, m: u32) -> Result<Profile<T>> {
    let (one, two, three, four) = (T::one(), lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));
    let a = env.a;
    let mut segs = Vec::new();
    if a < two {
        segs.push(Segment { t_start: a, t_end: two, form: SegmentForm::Constant { c: one } });
    }
    segs.push(Segment {
        t_start: two.max(a),
        t_end: one + a,
        form: SegmentForm::LogTm1 { a: one, b: -two, e: env.e },
    });
    if one + a < three {
        segs.push(Segment {
            t_start: one + a,
            t_end: three,
            form: SegmentForm::LogA { a: one, b: -two, e: env.e, cut: a },
        });
    }
    segs.push(Segment {
        t_start: three.max(one + a),
        t_end: four,
        form: SegmentForm::CubicTail { a: one, b: -two, e: env.e, cut: a, g: three.recip(), m },
    });
    Profile::new(one, T::zero(), segs)
}

/// `L` as a profile of `−P` on `[1, 2A]`, clamped to `[0, 1]`.
pub fn cubic_l_profile<T: Real>(env: &CharEnvelope<T>) -> Result<Profile<T>> {
    let (one, two) = (T::one(), lit::<T>(2.0));
    let a = env.a;
    let mut segs = vec![Segment { t_start: one, t_end: a, form: SegmentForm::Constant { c: T::zero() } }];
    if a < two {
        segs.push(Segment { t_start: a, t_end: two, form: SegmentForm::Constant { c: one } });
    }
    segs.push(Segment {
        t_start: two.max(a),
        t_end: one + a,
        form: SegmentForm::LogTm1 { a: one, b: -two, e: T::zero() },
    });
    segs.push(Segment {
        t_start: one + a,
        t_end: two * a,
        form: SegmentForm::LogA { a: one, b: -two, e: T::zero(), cut: a },
    });
    Profile::new(one, T::zero(), segs)
}

/// Cubic-case prime average (values of `f(p)` in `{2, −1, 0}`) built from the
/// envelopes: `P = 2` on `[0, 1]`, and afterwards `P = −U` (`lower = true`,
/// the smallest admissible profile) or `P = −L` (`lower = false`, the largest).
/// On `[1, A]` the lower profile uses the trivial `−P ≤ 1`.
pub fn cubic_profile<T: Real>(env: &CharEnvelope<T>, m: u32, lower: bool) -> Result<Profile<T>> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let head = Profile::new(
        two,
        -one,
        vec![Segment { t_start: T::zero(), t_end: one, form: SegmentForm::Constant { c: two } }],
    )?;
    let tail = if lower {
        let first = Profile::new(
            two,
            -one,
            vec![Segment { t_start: one, t_end: env.a, form: SegmentForm::Constant { c: -one } }],
        )?;
        first.then(&cubic_u_profile(env, m)?.negated())?
    } else {
        cubic_l_profile(env)?.negated()
    };
    head.then(&tail)?.with_clamps(two, -one)
}

/// Crossover points of the biquadratic envelope, see [`biquad_pointwise_upper`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiquadBreakpoints<T> {
    /// `1 + e^{1/4}`, end of the `8 log(t−1)/t` cap.
    pub t_log_end: T,
    /// Where `4(1 − 2 log(t−1) + Et)/t` rises back to `2/t`.
    pub t0: T,
    /// Where `4(1 − 2 log(A/(t−A)) + Et)/t` drops below `2/t`.
    pub t1: T,
    /// `A(1 + e^{1/4})/e^{1/4}`, start of the `8 log(A/(t−A))/t` cap.
    pub t2: T,
}

pub fn biquad_breakpoints<T: Real>(env: &CharEnvelope<T>) -> BiquadBreakpoints<T> {
    let (one, two) = (T::one(), lit::<T>(2.0));
    let a = env.a;
    let q = lit::<T>(0.25).exp();
    let tol = lit::<T>(1e-12);
    // 2(1 − 2 log(t−1) + Et) − 1, decreasing then possibly increasing on (2, 1+A]
    let f0 = |t: T| two * (one - two * (t - one).ln() + env.e * t) - one;
    let t0 = match bisect(f0, two, one + a, tol, T::zero()) {
        Some((lo, hi)) => lit::<T>(0.5) * (lo + hi),
        None => one + a,
    };
    let f1 = |t: T| two * (one - two * (a / (t - a)).ln() + env.e * t) - one;
    let three = lit::<T>(3.0);
    let t1 = if f1(one + a) >= T::zero() {
        one + a
    } else {
        match bisect(f1, one + a, three, tol, T::zero()) {
            Some((lo, hi)) => lit::<T>(0.5) * (lo + hi),
            None => three,
        }
    };
    BiquadBreakpoints { t_log_end: one + q, t0, t1, t2: a * (one + q) / q }
}

/// Upper bound for `(1 − P(t))/t` of the product character `χ₁χ₂` on
/// `[2, (2−δ)A]`: the smallest applicable cap, floored at 0.
pub fn biquad_pointwise_upper<T: Real>(env: &CharEnvelope<T>, delta: T, t: T) -> Result<T> {
    let (one, two, three, four, eight) = (T::one(), lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0), lit::<T>(8.0));
    let a = env.a;
    let b = (two - delta) * a;
    if !in_range(t, two, b) {
        return Err(range_err("biquad_pointwise_upper", t, two, b));
    }
    let q = lit::<T>(0.25).exp();
    let mut cap = two / t;
    if t <= one + q {
        cap = cap.min(eight * (t - one).ln() / t);
    }
    if t > two && t <= one + a {
        cap = cap.min(four * (one - two * (t - one).ln() + env.e * t) / t);
    }
    if t > one + a && t <= three {
        cap = cap.min(four * (one - two * (a / (t - a)).ln() + env.e * t) / t);
    }
    let t2 = a * (one + q) / q;
    if t >= t2 && t <= two * a {
        cap = cap.min(eight * (a / (t - a)).ln() / t);
    }
    Ok(cap.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_e() -> f64 {
        0.5f64.exp()
    }

    #[test]
    fn extremal_values() {
        let p = Profile::extremal(1.0, 5.0).unwrap();
        assert_eq!(p.eval(0.5).unwrap(), 1.0);
        assert_eq!(p.eval(1.5).unwrap(), -1.0);
        assert_eq!(p.eval(1.0).unwrap(), -1.0);
        assert_eq!(p.eval_left(1.0).unwrap(), 1.0);
        assert_eq!(p.eval_mid(1.0), 0.0);
        assert!(p.eval(5.5).is_err());
    }

    #[test]
    fn clamp_applies() {
        let p: Profile<f64> = "k 1\n0 1 const 1\n1 3 log_tm1 5 0 0\n".parse().unwrap();
        assert_eq!(p.eval(2.0).unwrap(), 1.0);
        let q: Profile<f64> = "0 3 const -4\n".parse().unwrap();
        assert_eq!(q.eval(2.0).unwrap(), -1.0);
    }

    #[test]
    fn text_round_trip() {
        let env = CharEnvelope::new(1.7).unwrap();
        let p = cubic_profile(&env, 2, true).unwrap();
        let back: Profile<f64> = p.to_text().parse().unwrap();
        for i in 0..=80 {
            let t = 4.0 * i as f64 / 80.0;
            assert!((p.eval(t).unwrap() - back.eval(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("0 1 wiggle 3".parse::<Profile<f64>>(), Err(Error::Parse { line: 1, .. })));
        assert!(matches!("# c\n0 1 const".parse::<Profile<f64>>(), Err(Error::Parse { line: 2, .. })));
        assert!("0 1 const 1\n2 3 const 1".parse::<Profile<f64>>().is_err());
        assert!("0 1 log_a 1 2 3".parse::<Profile<f64>>().is_err());
    }

    #[test]
    fn u_at_two_point_two() {
        let env = CharEnvelope::new(sqrt_e()).unwrap();
        let u = cubic_u(&env, 2.2, 2).unwrap();
        assert!((u - (1.0 - 2.0 * 1.2f64.ln())).abs() < 1e-12);
        assert!((u - 0.6354).abs() < 1e-4);
    }

    #[test]
    fn u_and_l_cases() {
        let env = CharEnvelope::new(1.6625f64).unwrap();
        assert_eq!(cubic_u(&env, 1.9, 2).unwrap(), 1.0);
        assert_eq!(cubic_l(&env, 1.1).unwrap(), 0.0);
        assert_eq!(cubic_l(&env, 1.9).unwrap(), 1.0);
        for m in [2u32, 3] {
            let t = 3.5f64;
            let a = env.a;
            let raw = 1.0 - 2.0 * (a / (t - a)).ln() + env.e * t + t * (t - 3.0f64).powi(m as i32) / 3.0;
            assert!((cubic_u(&env, t, m).unwrap() - raw.min(1.0)).abs() < 1e-14);
        }
        let p = cubic_u_profile(&env, 2).unwrap();
        for i in 0..=100 {
            let t = env.a + (4.0 - env.a) * i as f64 / 100.0;
            assert!((p.eval(t).unwrap() - cubic_u(&env, t, 2).unwrap()).abs() < 1e-12, "t={t}");
        }
        let l = cubic_l_profile(&env).unwrap();
        for i in 0..=100 {
            let t = 1.0 + (2.0 * env.a - 1.0) * i as f64 / 100.0;
            assert!((l.eval(t).unwrap() - cubic_l(&env, t).unwrap()).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn envelope_examples() {
        let env = CharEnvelope::new(sqrt_e()).unwrap();
        assert!(env.e.abs() < 1e-15);
        assert!(envelope_lower_1mp(&env, 2.0).unwrap().abs() < 1e-15);
        let v = envelope_lower_1mp(&env, 2.5).unwrap();
        assert!((v - 1.6 * 1.5f64.ln()).abs() < 1e-12);
        assert!(v < 0.8);
        let j = 1.0 + env.a;
        let up = envelope_upper_1mp(&env, j).unwrap();
        assert!((up - 4.0 / j * 0.5).abs() < 1e-12);
        let env17 = CharEnvelope::new(1.7).unwrap();
        let e = 2.0 * 1.7f64.ln() - 1.0;
        let want = 4.0 / 3.5 * (1.7f64 / 1.8).ln() - 2.0 * e - 2.0 / 3.0 * 0.25;
        assert!((envelope_lower_1mp(&env17, 3.5).unwrap() - want).abs() < 1e-12);
        let at_end = envelope_upper_1mp(&env17, 3.4).unwrap();
        assert!((0.0..=2.0 / 3.4).contains(&at_end));
        assert!(envelope_lower_1mp(&env, 1.9).is_err());
        assert!(envelope_upper_1mp(&env17, 3.5).is_err());
    }

    #[test]
    fn interval_mass() {
        for a in [sqrt_e(), 1.8, 2.0] {
            let env = CharEnvelope::new(a).unwrap();
            assert!((interval_mass_lower(&env, 1.0, a).unwrap() - 1.0).abs() < 1e-14);
        }
        let env = CharEnvelope::new(sqrt_e()).unwrap();
        assert_eq!(interval_mass_lower(&env, 1.3, 1.3).unwrap(), 0.0);
        let env2 = CharEnvelope::new(2.0).unwrap();
        let v = interval_mass_lower(&env2, 1.2, 1.8).unwrap();
        assert!((v - (2.0 * 1.5f64.ln() - (2.0 * 2f64.ln() - 1.0))).abs() < 1e-14);
        assert!(interval_mass_lower(&env2, 0.9, 1.5).is_err());
    }

    #[test]
    fn envelope_a_range() {
        assert!(CharEnvelope::new(1.5f64).is_err());
        assert!(CharEnvelope::new(2.1f64).is_err());
    }

    #[test]
    fn biquad_caps() {
        let env = CharEnvelope::new(1.75f64).unwrap();
        assert_eq!(biquad_pointwise_upper(&env, 0.0, 2.0).unwrap(), 0.0);
        let bp = biquad_breakpoints(&env);
        let mid = 0.5 * (bp.t_log_end + bp.t0);
        if bp.t0 > bp.t_log_end {
            let v = biquad_pointwise_upper(&env, 0.0, mid).unwrap();
            assert!((v - 2.0 / mid).abs() < 1e-14);
        }
        assert!(biquad_pointwise_upper(&env, 0.1, 3.4).is_err());
    }

    #[test]
    fn cubic_profile_orders() {
        let env = CharEnvelope::new(1.7).unwrap();
        let lo = cubic_profile(&env, 2, true).unwrap();
        let hi = cubic_profile(&env, 2, false).unwrap();
        for i in 0..=340 {
            let t = i as f64 / 100.0;
            let (a, b) = (lo.eval(t).unwrap(), hi.eval(t).unwrap());
            assert!(a <= b + 1e-12, "t={t}: {a} > {b}");
            assert!((-1.0..=2.0).contains(&a));
        }
    }
}
