//! Exact rational arithmetic helpers: parsing, square-root detection,
//! squarefree splitting and denominator LCMs.
//!
//! [`Rational`] is `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Trial-division bound used by [`squarefree_split`].
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` and reduces. Surrounding whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::parse(format!("invalid rational `{text}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::parse(format!("invalid rational `{text}`")))?;
    if den.is_zero() {
        return Err(Error::parse(format!("zero denominator in `{text}`")));
    }
    Ok(Rational::new(num, den))
}

/// Square root of a non-negative integer if it is a perfect square.
pub fn exact_isqrt(n: &BigUint) -> Option<BigUint> {
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

pub fn is_perfect_square_u128(n: u128) -> bool {
    let root = n.sqrt();
    root * root == n
}

/// Returns `s >= 0` with `s * s == r` when `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Result<Option<Rational>> {
    if r.is_negative() {
        return Err(Error::domain(format!("square root of negative value {r}")));
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    Ok(match (exact_isqrt(num), exact_isqrt(den)) {
        (Some(p), Some(q)) => Some(Rational::new(
            BigInt::from_biguint(Sign::Plus, p),
            BigInt::from_biguint(Sign::Plus, q),
        )),
        _ => None,
    })
}

/// Splits `m = s^2 * f` with `f` squarefree, trial dividing up to
/// [`DEFAULT_FACTOR_BOUND`].
pub fn squarefree_split(m: &BigUint) -> Result<(BigUint, BigUint)> {
    squarefree_split_bounded(m, DEFAULT_FACTOR_BOUND)
}

pub fn squarefree_split_bounded(m: &BigUint, bound: u64) -> Result<(BigUint, BigUint)> {
    if m.is_zero() {
        return Err(Error::domain("squarefree_split of zero"));
    }
    if let Some(small) = m.to_u64() {
        return squarefree_split_u64(small, bound)
            .map(|(s, f)| (BigUint::from(s), BigUint::from(f)));
    }

    let mut residue = m.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p: u64 = 2;
    while p <= bound && BigUint::from(p) * p <= residue {
        let mut exp = 0u32;
        loop {
            let (q, r) = residue.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            residue = q;
            exp += 1;
        }
        if exp > 0 {
            square *= BigUint::from(p).pow(exp / 2);
            if exp % 2 == 1 {
                free *= p;
            }
            if let Some(small) = residue.to_u64() {
                let (s, f) = squarefree_split_u64(small, bound)?;
                return Ok((square * s, free * f));
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let (s, f) = classify_residue(residue, bound)?;
    Ok((square * s, free * f))
}

fn squarefree_split_u64(m: u64, bound: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::domain("squarefree_split of zero"));
    }
    let mut residue = m;
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p <= bound && (p as u128) * (p as u128) <= residue as u128 {
        let mut exp = 0u32;
        while residue.is_multiple_of(p) {
            residue /= p;
            exp += 1;
        }
        square *= p.pow(exp / 2);
        if exp % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let (s, f) = classify_residue(BigUint::from(residue), bound)?;
    // s^2 * f divides m, so both fit in u64
    Ok((square * s.to_u64().unwrap(), free * f.to_u64().unwrap()))
}

/// `residue` has no prime factor up to `bound` (or trial division stopped
/// because `p^2 > residue`).
fn classify_residue(residue: BigUint, bound: u64) -> Result<(BigUint, BigUint)> {
    if residue.is_one() {
        return Ok((BigUint::one(), BigUint::one()));
    }
    // every prime factor exceeds the trial bound, so a residue below
    // (bound+1)^2 is prime
    if residue < BigUint::from(bound + 1).pow(2) {
        return Ok((BigUint::one(), residue));
    }
    if let Some(root) = exact_isqrt(&residue) {
        return Ok((root, BigUint::one()));
    }
    // at most two prime factors above the bound, and not a square
    if residue < BigUint::from(bound + 1).pow(3) {
        return Ok((BigUint::one(), residue));
    }
    Err(Error::FactorizationLimit {
        residue: residue.to_string(),
        bound,
    })
}

/// LCM of the (reduced) denominators.
pub fn lcm_of_denominators(values: &[Rational]) -> Result<BigUint> {
    if values.is_empty() {
        return Err(Error::Usage("lcm_of_denominators of an empty list".into()));
    }
    Ok(values
        .iter()
        .fold(BigUint::one(), |acc, r| acc.lcm(r.denom().magnitude())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(r("6/8"), rational(3, 4));
        assert_eq!(r(" -10 / 4 "), rational(-5, 2));
        assert_eq!(r("3/-6"), rational(-1, 2));
        assert_eq!(r("7"), integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn rational_sqrt_examples() {
        assert_eq!(rational_sqrt(&r("4/9")).unwrap(), Some(r("2/3")));
        assert_eq!(rational_sqrt(&r("2")).unwrap(), None);
        assert_eq!(rational_sqrt(&r("25/9")).unwrap(), Some(r("5/3")));
        assert_eq!(rational_sqrt(&r("0")).unwrap(), Some(r("0")));
        assert!(matches!(rational_sqrt(&r("-1/4")), Err(Error::Domain(_))));
    }

    #[test]
    fn squarefree_examples() {
        let split = |m: u64| {
            let (s, f) = squarefree_split(&BigUint::from(m)).unwrap();
            (s.to_u64().unwrap(), f.to_u64().unwrap())
        };
        assert_eq!(split(28), (2, 7));
        assert_eq!(split(1), (1, 1));
        assert_eq!(split(144), (12, 1));
        assert_eq!(split(2 * 3 * 3 * 5 * 5 * 5), (15, 10));
    }

    #[test]
    fn squarefree_large_prime_square() {
        // 1_000_003 is prime and above the bound
        let p = BigUint::from(1_000_003u64);
        let m = &p * &p * 12u32;
        let (s, f) = squarefree_split(&m).unwrap();
        assert_eq!(s, &p * 2u32);
        assert_eq!(f, BigUint::from(3u32));
    }

    #[test]
    fn squarefree_limit_is_reported() {
        // three primes just above a tiny bound
        let m = BigUint::from(11u64 * 13 * 17);
        assert!(matches!(
            squarefree_split_bounded(&m, 7),
            Err(Error::FactorizationLimit { .. })
        ));
        let (s, f) = squarefree_split_bounded(&BigUint::from(11u64 * 13), 7).unwrap();
        assert_eq!((s, f), (BigUint::one(), BigUint::from(143u32)));
    }

    #[test]
    fn lcm_examples() {
        let lcm = |xs: &[&str]| {
            let v: Vec<_> = xs.iter().map(|x| r(x)).collect();
            lcm_of_denominators(&v).unwrap().to_u64().unwrap()
        };
        assert_eq!(lcm(&["1", "8/5", "3"]), 5);
        assert_eq!(lcm(&["1/2", "1/3"]), 6);
        assert_eq!(lcm(&["7"]), 1);
        assert!(matches!(lcm_of_denominators(&[]), Err(Error::Usage(_))));
    }
}
