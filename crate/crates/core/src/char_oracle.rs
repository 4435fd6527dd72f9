//! Kronecker symbols, least quadratic non-residues and least non-split primes
//! for pairs of quadratic characters, with certificates and range scans.

use crate::error::{Error, Result};
use crate::primes::{is_prime, next_prime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Kronecker symbol `(n/q)` for `q ≥ 1`.
pub fn kronecker(n: i64, q: u64) -> i8 {
    assert!(q >= 1, "kronecker symbol needs q >= 1");
    let mut b = q;
    let mut a = n.rem_euclid((q as i64).max(1) * 4) as u64;
    // strip the 2-part of b
    let mut k: i8 = 1;
    if b.is_multiple_of(2) {
        if a.is_multiple_of(2) {
            return 0;
        }
        let v = b.trailing_zeros();
        b >>= v;
        if v % 2 == 1 && (a % 8 == 3 || a % 8 == 5) {
            k = -k;
        }
    }
    // Jacobi symbol (a/b), b odd
    a %= b.max(1);
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 && (b % 8 == 3 || b % 8 == 5) {
            k = -k;
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        let r = b % a;
        b = a;
        a = r;
    }
    if b == 1 {
        k
    } else {
        0
    }
}

/// Whether `d` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |mut m: u64| {
        let mut p = 2u64;
        while p * p <= m {
            if m.is_multiple_of(p * p) {
                return false;
            }
            if m.is_multiple_of(p) {
                m /= p;
            }
            p += 1;
        }
        true
    };
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CharKind {
    Quadratic { q: u64 },
    Pair { q1: u64, q2: u64 },
}

/// A character (or pair) to query; `fundamental` asks for each modulus to be
/// a fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSpec {
    pub kind: CharKind,
    pub fundamental: bool,
}

impl CharSpec {
    pub fn new(kind: CharKind, fundamental: bool) -> Result<Self> {
        let moduli: Vec<u64> = match kind {
            CharKind::Quadratic { q } => vec![q],
            CharKind::Pair { q1, q2 } => vec![q1, q2],
        };
        for q in moduli {
            if q < 3 {
                return Err(Error::Domain(format!("modulus {q} below 3")));
            }
            if fundamental && !is_fundamental_discriminant(q as i64) {
                return Err(Error::Domain(format!("{q} is not a fundamental discriminant")));
            }
        }
        Ok(CharSpec { kind, fundamental })
    }

    /// Least prime at which some character of the query is not 1.
    pub fn least(&self) -> Certificate {
        match self.kind {
            CharKind::Quadratic { q } => least_nonresidue(q),
            CharKind::Pair { q1, q2 } => least_nonsplit_pair(q1, q2),
        }
    }
}

/// Least prime `n_star` with a symbol `≠ 1`, together with the primes below
/// it at which every symbol was checked to be 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub moduli: Vec<u64>,
    pub n_star: u64,
    pub checked: Vec<u64>,
}

impl Certificate {
    /// Recomputes every symbol and checks that `checked` is exactly the set of
    /// primes below `n_star`.
    pub fn verify(&self) -> bool {
        let ones = |p: u64| self.moduli.iter().all(|&q| kronecker(p as i64, q) == 1);
        let mut p = 2;
        for &c in &self.checked {
            if c != p || !ones(c) {
                return false;
            }
            p = next_prime(p);
        }
        p == self.n_star && is_prime(self.n_star) && !ones(self.n_star)
    }
}

fn least_for(moduli: Vec<u64>) -> Certificate {
    let mut checked = Vec::new();
    let mut p = 2u64;
    while moduli.iter().all(|&q| kronecker(p as i64, q) == 1) {
        checked.push(p);
        p = next_prime(p);
    }
    Certificate { moduli, n_star: p, checked }
}

/// Least prime `p` with `(p/q) ≠ 1`.
pub fn least_nonresidue(q: u64) -> Certificate {
    assert!(q >= 3, "least_nonresidue needs q >= 3");
    least_for(vec![q])
}

/// Least prime that is not a residue for `q1` or not a residue for `q2`.
pub fn least_nonsplit_pair(q1: u64, q2: u64) -> Certificate {
    assert!(q1 >= 3 && q2 >= 3, "least_nonsplit_pair needs moduli >= 3");
    least_for(vec![q1, q2])
}

/// Scan mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Every `q` in the range.
    Quadratic,
    /// Every prime `q` in the range.
    QuadraticPrime,
    /// Prime `q1` in the range paired with `q2 = next_prime(q1)`.
    Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q1: u64,
    pub q2: Option<u64>,
    pub n_star: u64,
    /// `log n_star / log q`, or `log n_star / log(q1 q2)` for pairs.
    pub exponent: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub all_certified: bool,
    /// Largest exponent over `q > 300`.
    pub max_exponent: Option<f64>,
    pub argmax_q: Option<u64>,
    /// Analytic exponent printed alongside, for information only.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub mode: ScanMode,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

/// Largest modulus a scan accepts.
pub const SCAN_LIMIT: u64 = 10_000_000;

/// Moduli at or below this are left out of the summary.
pub const SUMMARY_FLOOR: u64 = 300;

/// Scans `lo..=hi`, certifying every row. Rows come back ordered by `q`.
pub fn scan(lo: u64, hi: u64, mode: ScanMode) -> Result<ScanReport> {
    if hi > SCAN_LIMIT {
        return Err(Error::Precondition(format!("scan upper end {hi} exceeds {SCAN_LIMIT}")));
    }
    let lo = lo.max(3);
    if lo > hi {
        return Err(Error::Precondition(format!("empty scan range [{lo}, {hi}]")));
    }
    let rows: Vec<ScanRow> = (lo..=hi)
        .into_par_iter()
        .filter(|&q| mode == ScanMode::Quadratic || is_prime(q))
        .map(|q| {
            let (cert, q2, denom) = match mode {
                ScanMode::Pair => {
                    let q2 = next_prime(q);
                    (least_nonsplit_pair(q, q2), Some(q2), ((q as f64) * (q2 as f64)).ln())
                }
                _ => (least_nonresidue(q), None, (q as f64).ln()),
            };
            ScanRow { q1: q, q2, n_star: cert.n_star, exponent: (cert.n_star as f64).ln() / denom, certified: cert.verify() }
        })
        .collect();
    let best = rows
        .iter()
        .filter(|r| r.q1 > SUMMARY_FLOOR)
        .fold(None::<&ScanRow>, |b, r| match b {
            Some(b) if b.exponent >= r.exponent => Some(b),
            _ => Some(r),
        });
    let reference = match mode {
        ScanMode::Pair => 0.141 / 2.0,
        _ => 1.0 / (4.0 * 0.5f64.exp()),
    };
    let summary = ScanSummary {
        rows: rows.len(),
        all_certified: rows.iter().all(|r| r.certified),
        max_exponent: best.map(|r| r.exponent),
        argmax_q: best.map(|r| r.q1),
        reference,
    };
    Ok(ScanReport { mode, rows, summary })
}

impl ScanReport {
    /// CSV with a trailing `# summary:` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let pair = self.mode == ScanMode::Pair;
        out.push_str(if pair { "q1,q2,n_star,exponent_q1q2\n" } else { "q,n_star,exponent\n" });
        for r in &self.rows {
            if let Some(q2) = r.q2 {
                let _ = writeln!(out, "{},{},{},{:.6}", r.q1, q2, r.n_star, r.exponent);
            } else {
                let _ = writeln!(out, "{},{},{:.6}", r.q1, r.n_star, r.exponent);
            }
        }
        let s = &self.summary;
        let fmt_opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let _ = writeln!(
            out,
            "# summary: rows={} all_certified={} max_exponent={} at_q={} reference={:.6}",
            s.rows,
            s.all_certified,
            fmt_opt(s.max_exponent.map(|x| format!("{x:.6}"))),
            fmt_opt(s.argmax_q.map(|q| q.to_string())),
            s.reference
        );
        out
    }
}
