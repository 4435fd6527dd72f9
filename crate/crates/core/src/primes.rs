//! Prime enumeration and von Mangoldt sums.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::specfun::euler_gamma;
use serde::{Deserialize, Serialize};

/// Largest `T` for which the von Mangoldt sums are computed exactly.
pub const SIEVE_CAP: u64 = 100_000_000;

const SEGMENT: usize = 1 << 18;

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `f` on every prime `p ≤ limit` in increasing order, sieving in
/// fixed-size segments.
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, mut f: F) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let mut mark = vec![false; SEGMENT];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                mark[(j - lo) as usize] = true;
                j += p;
            }
        }
        for (i, &m) in mark[..len].iter().enumerate() {
            if !m {
                f(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

/// `s1 = Σ_{n≤T} Λ(n)/n^σ` and `s2 = Σ_{n≤T} Λ(n)/(n^σ log n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MangoldtSums<T> {
    pub s1: T,
    pub s2: T,
    /// False when `T` exceeded the sieve cap and asymptotic forms were used.
    pub exact: bool,
}

/// Exact sums for `T ≤ SIEVE_CAP`, enumerating prime powers `p^r ≤ T`
/// (`Λ(p^r)/log p^r = 1/r`).
pub fn mangoldt_sums<T: Real>(t: u64, sigma: T) -> Result<MangoldtSums<T>> {
    if !(sigma >= T::one()) {
        return Err(Error::Domain("mangoldt_sums needs sigma >= 1".into()));
    }
    if t > SIEVE_CAP {
        let lt: T = lit::<T>(t as f64).ln();
        return Ok(asymptotic_sums(lt, sigma));
    }
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    let sg = sigma.to_f64().unwrap_or(1.0);
    for_each_prime(t, |p| {
        let lp = (p as f64).ln();
        let mut q = p;
        let mut r = 1u32;
        loop {
            let w = (q as f64).powf(-sg);
            s1 += lp * w;
            s2 += w / f64::from(r);
            match q.checked_mul(p) {
                Some(n) if n <= t => {
                    q = n;
                    r += 1;
                }
                _ => break,
            }
        }
    });
    Ok(MangoldtSums { s1: lit(s1), s2: lit(s2), exact: true })
}

/// Asymptotic stand-ins given `log T`: `s1 ≈ (1 − T^{1−σ})/(σ−1) − γ` (which
/// is `log T − γ` at `σ = 1`) and the upper bound
/// `s2 ≤ log log T + γ + 2/log²T`.
pub fn asymptotic_sums<T: Real>(log_t: T, sigma: T) -> MangoldtSums<T> {
    let g = euler_gamma::<T>();
    let sm1 = sigma - T::one();
    let main = if sm1 == T::zero() { log_t } else { (T::one() - (-sm1 * log_t).exp()) / sm1 };
    MangoldtSums {
        s1: main - g,
        s2: log_t.ln() + g + lit::<T>(2.0) / (log_t * log_t),
        exact: false,
    }
}

/// Smallest `T ≤ cap` with `Σ_{n≤T} Λ(n)/n^σ ≥ target`, by a running sum over
/// prime powers in increasing order.
pub fn least_t_reaching<T: Real>(target: T, sigma: T, cap: u64) -> Option<u64> {
    let sg = sigma.to_f64()?;
    let tg = target.to_f64()?;
    if tg <= 0.0 {
        return Some(1);
    }
    let mut powers: Vec<(u64, f64)> = Vec::new();
    for_each_prime(cap, |p| {
        let lp = (p as f64).ln();
        let mut q = p;
        loop {
            powers.push((q, lp));
            match q.checked_mul(p) {
                Some(n) if n <= cap => q = n,
                _ => break,
            }
        }
    });
    powers.sort_unstable_by_key(|&(q, _)| q);
    let mut acc = 0.0;
    for (q, lp) in powers {
        acc += lp * (q as f64).powf(-sg);
        if acc >= tg {
            return Some(q);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let mut seg = Vec::new();
        for_each_prime(30, |p| seg.push(p));
        assert_eq!(seg, primes_up_to(30));
    }

    #[test]
    fn segmented_matches_plain() {
        let n = 1_000_000;
        let mut seg = Vec::new();
        for_each_prime(n, |p| seg.push(p));
        assert_eq!(seg, primes_up_to(n));
    }

    #[test]
    fn miller_rabin() {
        let plain = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), plain.binary_search(&n).is_ok(), "n={n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(next_prime(7), 11);
        assert_eq!(next_prime(1000), 1009);
    }

    #[test]
    fn sums_at_ten() {
        let s = mangoldt_sums(10, 1.0f64).unwrap();
        // Λ(2..10): 2,3,4,5,7,8,9
        let l2 = 2f64.ln();
        let l3 = 3f64.ln();
        let want = l2 / 2.0 + l3 / 3.0 + l2 / 4.0 + 5f64.ln() / 5.0 + 7f64.ln() / 7.0 + l2 / 8.0 + l3 / 9.0;
        assert!((s.s1 - want).abs() < 1e-14);
        assert!((s.s1 - 1.69465).abs() < 1e-5);
        assert!(s.exact);
        let e = mangoldt_sums(1, 1.3f64).unwrap();
        assert_eq!((e.s1, e.s2), (0.0, 0.0));
    }

    #[test]
    fn fallback_beyond_cap() {
        let s = mangoldt_sums(SIEVE_CAP + 1, 1.0f64).unwrap();
        assert!(!s.exact);
        assert!(mangoldt_sums(10, 0.5f64).is_err());
    }

    #[test]
    fn least_t() {
        let t = least_t_reaching(1.0f64, 1.0, 1000).unwrap();
        // 2: 0.3466, 3: 0.7128, 4: 0.8861, 5: 1.2080
        assert_eq!(t, 5);
        assert!(least_t_reaching(100.0f64, 1.0, 1000).is_none());
    }
}
