//! Exact scan of `LCM(Denom(X), Denom(Y))` over the unit-hyperbola points at
//! `t = n d`, with CSV and log-binned histogram export.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::diophantine::unit_hyperbola_point;
use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub n: u64,
    pub t: Rational,
    /// `None` at the singular points `t = +-1`.
    pub lcm: Option<BigUint>,
}

impl ScanRecord {
    pub fn skipped(&self) -> bool {
        self.lcm.is_none()
    }
}

/// LCM of the reduced denominators of `X(t)`, `Y(t)`; `None` when `t = +-1`.
pub fn denominator_lcm(t: &Rational) -> Option<BigUint> {
    let point = unit_hyperbola_point(t).ok()?;
    Some(point.x.denom().magnitude().lcm(point.y.denom().magnitude()))
}

/// Records for `n = 1..=count`, in index order. Runs on the current rayon
/// pool; the output does not depend on its size.
pub fn scan_lcm(d: &Rational, count: u64) -> Result<Vec<ScanRecord>> {
    if count == 0 {
        return Err(Error::Usage("scan count must be >= 1".into()));
    }
    if d.is_zero() {
        return Err(Error::domain("scan step d must be nonzero"));
    }
    Ok((1..=count)
        .into_par_iter()
        .map(|n| {
            let t = d * Rational::from_integer(BigInt::from(n));
            let lcm = denominator_lcm(&t);
            ScanRecord { n, t, lcm }
        })
        .collect())
}

/// `n,t,lcm,skipped`; skipped rows leave `lcm` empty.
pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 24 + 32);
    out.push_str("n,t,lcm,skipped\n");
    for r in records {
        match &r.lcm {
            Some(l) => writeln!(out, "{},{},{},0", r.n, r.t, l),
            None => writeln!(out, "{},{},,1", r.n, r.t),
        }
        .expect("writing to a String");
    }
    out
}

/// `log10(m)` for `m >= 1`, kept inside `[D - 1, D)` for a `D`-digit `m`
/// so unit-width bins follow the digit count exactly.
pub fn log10_biguint(m: &BigUint) -> f64 {
    let digits = m.to_string();
    let exponent = (digits.len() - 1) as f64;
    let lead: String = digits.chars().take(17).collect();
    let mantissa: f64 = lead.parse::<f64>().unwrap_or(1.0) / 10f64.powi(lead.len() as i32 - 1);
    (exponent + mantissa.log10()).clamp(exponent, (exponent + 1.0).next_down())
}

/// Counts of `log10(lcm)` in bins `[b w, (b+1) w)`; only non-empty bins are
/// listed, ascending. Skipped records are left out.
pub fn histogram(records: &[ScanRecord], width: f64) -> Result<Vec<(f64, u64)>> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::domain(format!("bin width must be positive, got {width}")));
    }
    let mut bins = std::collections::BTreeMap::<i64, u64>::new();
    for l in records.iter().filter_map(|r| r.lcm.as_ref()) {
        let b = (log10_biguint(l) / width).floor() as i64;
        *bins.entry(b).or_default() += 1;
    }
    Ok(bins.into_iter().map(|(b, c)| (b as f64 * width, c)).collect())
}

fn format_edge(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// `bin_lower_log10,count`.
pub fn histogram_csv(bins: &[(f64, u64)]) -> String {
    let mut out = String::from("bin_lower_log10,count\n");
    for (edge, count) in bins {
        writeln!(out, "{},{}", format_edge(*edge), count).expect("writing to a String");
    }
    out
}

/// `lcm * X` and `lcm * Y` are integers.
pub fn closes(record: &ScanRecord) -> bool {
    let Some(l) = &record.lcm else { return true };
    let Ok(point) = unit_hyperbola_point(&record.t) else { return false };
    let l = Rational::from_integer(BigInt::from(l.clone()));
    (&point.x * &l).is_integer() && (&point.y * &l).is_integer()
}

/// Summary statistics used by the CLI's human output.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub records: usize,
    pub skipped: usize,
    pub min_lcm: Option<BigUint>,
    pub max_lcm: Option<BigUint>,
}

pub fn summarize(records: &[ScanRecord]) -> ScanSummary {
    let lcms = records.iter().filter_map(|r| r.lcm.as_ref());
    ScanSummary {
        records: records.len(),
        skipped: records.iter().filter(|r| r.skipped()).count(),
        min_lcm: lcms.clone().min().cloned(),
        max_lcm: lcms.max().cloned(),
    }
}
