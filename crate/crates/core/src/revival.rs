//! Full-revival decisions from exact spectra.
//!
//! A span of eigenvectors with energies `E_0 < E_1 < ...` fully revives iff
//! every ratio `(E_j - E_0) / (E_1 - E_0)` is rational. With `K1` the LCM of
//! the reduced denominators, `delta = (E_1 - E_0) / K1` is the GCD of all
//! gaps and `T = 2 pi / delta` is the shortest revival time.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{is_perfect_square_u128, lcm_of_denominators, rational_sqrt, Rational};
use crate::surd::ExactEnergy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevivalCertificate {
    /// `r_j` for `j = 1..N-1`; `r_1 = 1`.
    pub ratios: Vec<Rational>,
    pub k1: BigUint,
    /// `E_1 - E_0`.
    pub gap_unit: ExactEnergy,
    /// `gap_unit / K1`.
    pub delta: ExactEnergy,
}

impl RevivalCertificate {
    /// `T / pi = 2 K1 / gap_unit`, when the gap unit is rational.
    pub fn period_over_pi(&self) -> Option<Rational> {
        let gap = self.gap_unit.as_rational()?;
        Some(Rational::from_integer(BigInt::from_biguint(Sign::Plus, self.k1.clone()) * 2) / gap)
    }

    pub fn period(&self) -> f64 {
        match self.period_over_pi() {
            Some(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            None => 2.0 * PI * self.k1.to_f64().unwrap_or(f64::NAN) / self.gap_unit.to_f64(),
        }
    }

    /// `2*pi*K1/(gap_unit)`, simplified to `c*pi` when possible.
    pub fn period_exact(&self) -> String {
        match self.period_over_pi() {
            Some(r) if r.is_one() => "pi".to_string(),
            Some(r) if r.is_integer() => format!("{r}*pi"),
            Some(r) => format!("{}*pi/{}", r.numer(), r.denom()),
            None => format!("2*pi*{}/({})", self.k1, self.gap_unit),
        }
    }

    /// Phase counts `(E_j - E_0) T / (2 pi) = r_j K1`; all integers.
    pub fn phase_windings(&self) -> Vec<BigInt> {
        let k1 = Rational::from_integer(BigInt::from_biguint(Sign::Plus, self.k1.clone()));
        self.ratios
            .iter()
            .map(|r| {
                let w = r * &k1;
                debug_assert!(w.is_integer());
                w.to_integer()
            })
            .collect()
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let ratios: Vec<String> = self.ratios.iter().map(|r| r.to_string()).collect();
        format!(
            "ratios={}\nK1={}\ngap_unit={}\ndelta={}\nT={}\nT_float={}\n",
            ratios.join(","),
            self.k1,
            self.gap_unit,
            self.delta,
            self.period_exact(),
            self.period()
        )
    }
}

impl fmt::Display for RevivalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ratios: Vec<String> = self.ratios.iter().map(|r| r.to_string()).collect();
        write!(
            f,
            "r = ({}), K1 = {}, delta = {}, T = {} ~ {:.10}",
            ratios.join(", "),
            self.k1,
            self.delta,
            self.period_exact(),
            self.period()
        )
    }
}

/// Sorted ascending with exact duplicates merged.
pub fn distinct_levels(energies: &[ExactEnergy]) -> Vec<ExactEnergy> {
    let mut levels = energies.to_vec();
    levels.sort();
    levels.dedup();
    levels
}

/// `(E_j - E_0)/(E_1 - E_0)` for `j >= 1` when all are rational.
///
/// Input is sorted and merged first, so any order is accepted.
pub fn gap_ratios(energies: &[ExactEnergy]) -> Result<Option<Vec<Rational>>> {
    let levels = distinct_levels(energies);
    if levels.len() < 2 {
        return Err(Error::SingleLevel);
    }
    let unit = &levels[1] - &levels[0];
    let mut ratios = Vec::with_capacity(levels.len() - 1);
    for e in &levels[1..] {
        match (e - &levels[0]).rational_ratio(&unit)? {
            Some(r) => ratios.push(r),
            None => return Ok(None),
        }
    }
    Ok(Some(ratios))
}

pub fn revival_certificate(energies: &[ExactEnergy]) -> Result<Option<RevivalCertificate>> {
    let Some(ratios) = gap_ratios(energies)? else {
        return Ok(None);
    };
    let levels = distinct_levels(energies);
    let gap_unit = &levels[1] - &levels[0];
    let k1 = lcm_of_denominators(&ratios)?;
    let k1_rat = Rational::from_integer(BigInt::from_biguint(Sign::Plus, k1.clone()));
    let delta = gap_unit.scale(&k1_rat.recip());
    Ok(Some(RevivalCertificate { ratios, k1, gap_unit, delta }))
}

/// `F+-` = `(rho +- X)/(2Y)` with `X = sqrt(alpha^2 + 4(n+1))/2` and
/// `Y = sqrt(alpha^2 + 4n)/2`; each is returned when it is rational.
pub fn adjacent_pair_fractions(
    alpha_squared: &Rational,
    rho: &Rational,
    n: u64,
) -> Result<(Option<Rational>, Option<Rational>)> {
    if alpha_squared < &Rational::zero() {
        return Err(Error::domain(format!("alpha^2 = {alpha_squared} is negative")));
    }
    if n == 0 {
        return Err(Error::domain("pair index n must be >= 1"));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let four = |k: u64| Rational::from_integer(BigInt::from(4u64) * k);
    let x = ExactEnergy::sqrt_of(&(alpha_squared + four(n + 1)))?.scale(&half);
    let two_y = ExactEnergy::sqrt_of(&(alpha_squared + four(n)))?;
    let rho = ExactEnergy::from_rational(rho.clone());
    let frac = |num: ExactEnergy| -> Result<Option<Rational>> {
        Ok(num.checked_div(&two_y)?.and_then(|v| v.as_rational().cloned()))
    };
    Ok((frac(&rho + &x)?, frac(&rho - &x)?))
}

/// Why the resonant adjacent pair `n`, `n + 1` cannot revive:
/// `sqrt((n+1)/n)` is irrational because `n (n+1)` is not a perfect square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceObstruction {
    pub n: u64,
    /// `n (n + 1)`.
    pub product: u128,
    pub floor_sqrt: u128,
    pub holds: bool,
}

pub fn resonance_obstruction(n: u64) -> Result<ResonanceObstruction> {
    if n == 0 {
        return Err(Error::domain("pair index n must be >= 1"));
    }
    let product = n as u128 * (n as u128 + 1);
    let floor_sqrt = num_integer::Roots::sqrt(&product);
    let ratio = Rational::new(BigInt::from(n + 1), BigInt::from(n));
    let holds = rational_sqrt(&ratio)?.is_none() && floor_sqrt * floor_sqrt != product;
    Ok(ResonanceObstruction { n, product, floor_sqrt, holds })
}

/// Integer check of the obstruction for every `n` in `1..=max_n`; returns
/// the `n` where `n (n+1)` is a perfect square (always empty).
pub fn resonance_obstruction_batch(max_n: u64) -> Vec<u64> {
    (1..=max_n)
        .into_par_iter()
        .filter(|&n| is_perfect_square_u128(n as u128 * (n as u128 + 1)))
        .collect()
}
