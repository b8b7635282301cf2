//! Rational and integer points on the conics `X^2 - Y^2 = K`.
//!
//! Rational points of the unit hyperbola come from the secant line
//! `X - 1 = t Y` through `(1, 0)`; each rational `t` gives a revival-admitting
//! detuning for an adjacent block pair. Integer chains
//! `X_{j-1}^2 - X_j^2 = K_j` are searched exhaustively below a bound: there is
//! no general decision procedure for such systems.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::model::{pair_spectrum, PairSpectrum};
use crate::revival::{adjacent_pair_fractions, revival_certificate, RevivalCertificate};
use crate::surd::ExactEnergy;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperbolaPoint {
    pub x: Rational,
    pub y: Rational,
    /// The level `K = X^2 - Y^2`.
    pub k: Rational,
}

impl HyperbolaPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        let k = &x * &x - &y * &y;
        HyperbolaPoint { x, y, k }
    }

    pub fn satisfies(&self) -> bool {
        &self.x * &self.x - &self.y * &self.y == self.k
    }
}

impl fmt::Display for HyperbolaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `X = 1 + 2t^2/(1 - t^2)`, `Y = 2t/(1 - t^2)` on `X^2 - Y^2 = 1`.
pub fn unit_hyperbola_point(t: &Rational) -> Result<HyperbolaPoint> {
    // with t = p/q: X = (q^2 + p^2)/(q^2 - p^2), Y = 2pq/(q^2 - p^2)
    let (p, q) = (t.numer(), t.denom());
    let (p2, q2) = (p * p, q * q);
    let denom = &q2 - &p2;
    if denom.is_zero() {
        return Err(Error::SingularParameter(format!("t = {t} makes 1 - t^2 vanish")));
    }
    let x = Rational::new(q2 + p2, denom.clone());
    let y = Rational::new(BigInt::from(2) * p * q, denom);
    Ok(HyperbolaPoint { x, y, k: Rational::one() })
}

/// Revival-admitting parameters for the block pair `n`, `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesizedParams {
    pub n: u64,
    pub point: HyperbolaPoint,
    /// `alpha + beta`.
    pub rho: Rational,
    /// `4 Y^2 - 4 n`.
    pub alpha_squared: Rational,
    pub alpha: ExactEnergy,
    pub beta: ExactEnergy,
    /// `(F+, F-)`.
    pub fractions: (Rational, Rational),
}

impl SynthesizedParams {
    pub fn spectrum(&self) -> Result<PairSpectrum> {
        pair_spectrum(self.n, &self.alpha, &self.beta)
    }

    pub fn certificate(&self) -> Result<RevivalCertificate> {
        let spectrum = self.spectrum()?;
        revival_certificate(&spectrum.energies())?
            .ok_or_else(|| Error::domain("synthesized parameters failed to produce a certificate"))
    }
}

pub fn synthesize_params(t: &Rational, rho: &Rational, n: u64) -> Result<SynthesizedParams> {
    if n == 0 {
        return Err(Error::domain("pair index n must be >= 1"));
    }
    let point = unit_hyperbola_point(t)?;
    let n_rat = Rational::from_integer(BigInt::from(n));
    let y2 = &point.y * &point.y;
    if y2 < n_rat {
        return Err(Error::AlphaNotReal { y_squared: y2.to_string(), n });
    }
    let four = Rational::from_integer(BigInt::from(4));
    let excess = &y2 - &n_rat;
    let alpha_squared = &four * &excess;
    let alpha = ExactEnergy::sqrt_of(&excess)?.scale(&Rational::from_integer(BigInt::from(2)));
    let beta = &ExactEnergy::from_rational(rho.clone()) - &alpha;
    let fractions = match adjacent_pair_fractions(&alpha_squared, rho, n)? {
        (Some(plus), Some(minus)) => (plus, minus),
        _ => unreachable!("both radicands are rational squares by construction"),
    };
    Ok(SynthesizedParams {
        n,
        point,
        rho: rho.clone(),
        alpha_squared,
        alpha,
        beta,
        fractions,
    })
}

/// `X = (s + K/s)/2`, `Y = (K/s - s)/2`: the line `X - Y = s` meets
/// `X^2 - Y^2 = K` at one rational point for every nonzero `K`, `s`.
pub fn solve_difference_rational(k: &Rational, s: &Rational) -> Result<HyperbolaPoint> {
    if k.is_zero() || s.is_zero() {
        return Err(Error::domain("K and s must be nonzero"));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let ks = k / s;
    Ok(HyperbolaPoint {
        x: (s + &ks) * &half,
        y: (&ks - s) * &half,
        k: k.clone(),
    })
}

/// All `(X, Y)` with `X > Y >= 0` and `X^2 - Y^2 = k`, in descending `X`.
/// Empty iff `k = 2 (mod 4)`.
pub fn solve_difference_integer(k: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut v = 1u64;
    while v * v <= k {
        if k.is_multiple_of(v) {
            let u = k / v;
            if (u - v).is_multiple_of(2) {
                out.push(((u + v) / 2, (u - v) / 2));
            }
        }
        v += 1;
    }
    out
}

fn exact_sqrt_u128(n: u128) -> Option<u128> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Every integer chain `X_0 >= X_1 >= ... >= X_s >= 0` with `X_0 <= bound`
/// and `X_{j-1}^2 - X_j^2 = ks[j-1]`, ascending in `X_0`.
pub fn chain_solver(ks: &[u64], bound: u64) -> Result<Vec<Vec<u64>>> {
    if ks.is_empty() {
        return Err(Error::Usage("chain needs at least one right-hand side".into()));
    }
    // X_0 fixes the rest of the chain
    let chains = (0..=bound)
        .into_par_iter()
        .filter_map(|x0| {
            let mut chain = Vec::with_capacity(ks.len() + 1);
            chain.push(x0);
            let mut sq = x0 as u128 * x0 as u128;
            for &k in ks {
                sq = sq.checked_sub(k as u128)?;
                chain.push(exact_sqrt_u128(sq)? as u64);
            }
            Some(chain)
        })
        .collect();
    Ok(chains)
}

/// `y` is the hypotenuse of a right triangle with positive integer legs.
pub fn is_hypotenuse(y: u64) -> bool {
    let y2 = y as u128 * y as u128;
    (1..y).any(|a| exact_sqrt_u128(y2 - a as u128 * a as u128).is_some_and(|b| b > 0))
}

/// Largest hypotenuse `c` of a triangle with leg `y`; larger `c` never works.
pub fn leg_search_cap(y: u64) -> u128 {
    (y as u128 * y as u128).div_ceil(2) + 1
}

/// `y` is a leg: some `c` in `(y, leg_search_cap(y)]` makes `c^2 - y^2` a
/// positive square. Enumerates `c^2 - L^2 = (c - L)(c + L) = y^2`.
pub fn is_leg(y: u64) -> bool {
    let y2 = y as u128 * y as u128;
    let cap = leg_search_cap(y);
    let mut v: u128 = 1;
    while v * v < y2 {
        if y2.is_multiple_of(v) {
            let u = y2 / v;
            if (u - v).is_multiple_of(2) && (u + v) / 2 <= cap {
                return true;
            }
        }
        v += 1;
    }
    false
}

/// Integers up to `bound` that are both a hypotenuse and a leg of
/// Pythagorean triples, ascending.
pub fn pythagorean_middles(bound: u64) -> Vec<u64> {
    (1..=bound)
        .into_par_iter()
        .filter(|&y| is_hypotenuse(y) && is_leg(y))
        .collect()
}

/// A rational `t` with `|Y(t)|` strictly inside `(lo, hi)`, searched over
/// denominators up to `max_den`. `Y(t)` runs over `(0, inf)` for `t` in
/// `(0, 1)`.
pub fn hyperbola_parameter_in(lo: f64, hi: f64, max_den: u64) -> Option<Rational> {
    if !(hi > lo && hi > 0.0) {
        return None;
    }
    let target = 0.5 * (lo.max(0.0) + hi);
    // Y t^2 + 2 t - Y = 0
    let t_star = ((1.0 + target * target).sqrt() - 1.0) / target;
    (1..=max_den).find_map(|q| {
        let p = (t_star * q as f64).round() as i64;
        if p <= 0 || p as u64 >= q {
            return None;
        }
        let t = Rational::new(BigInt::from(p), BigInt::from(q));
        let point = unit_hyperbola_point(&t).ok()?;
        let y = point.y.abs().to_f64()?;
        (y > lo && y < hi).then_some(t)
    })
}
