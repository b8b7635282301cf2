//! Finite sums of rational multiples of square roots of squarefree integers.
//!
//! Square roots of distinct squarefree integers are linearly independent over
//! the rationals, so a normalized [`ExactEnergy`] has a unique representation
//! and structural equality is numeric equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, squarefree_split, Rational};

/// Initial working precision (bits) of [`ExactEnergy::signum`].
const SIGN_PRECISION_BITS: u32 = 128;

/// `rational + sum(coefficient * sqrt(radicand))`.
///
/// Values produced by the public constructors and arithmetic are normalized:
/// every radicand is squarefree and at least 2, and no coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactEnergy {
    rational: Rational,
    radicals: BTreeMap<BigUint, Rational>,
}

impl ExactEnergy {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn from_rational(rational: Rational) -> Self {
        ExactEnergy {
            rational,
            radicals: BTreeMap::new(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// Builds from raw parts and normalizes the radicands.
    pub fn from_parts<I>(rational: Rational, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, Rational)>,
    {
        surd_normalize(rational, terms)
    }

    /// Exact `sqrt(r)` for rational `r >= 0`, written as `sqrt(p*q)/q` and
    /// normalized.
    pub fn sqrt_of(r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::domain(format!("square root of negative value {r}")));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        let p = r.numer().magnitude();
        let q = r.denom().magnitude();
        let coeff = Rational::new(BigInt::one(), BigInt::from_biguint(Sign::Plus, q.clone()));
        surd_normalize(Rational::zero(), [(p * q, coeff)])
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    /// `(radicand, coefficient)` pairs in ascending radicand order.
    pub fn radical_terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.radicals.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radicals.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.radicals.is_empty().then_some(&self.rational)
    }

    pub fn is_rational(&self) -> bool {
        self.radicals.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExactEnergy {
            rational: &self.rational * c,
            radicals: self
                .radicals
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    /// The square, when it is rational (at most one radical term).
    pub fn rational_square(&self) -> Option<Rational> {
        (self * self).as_rational().cloned()
    }

    /// Divides by a value with at most one radical term and no rational
    /// part alongside it (`c` or `c*sqrt(m)`). Returns `None` for other
    /// divisors.
    pub fn checked_div(&self, divisor: &ExactEnergy) -> Result<Option<Self>> {
        if divisor.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        if let Some(c) = divisor.as_rational() {
            return Ok(Some(self.scale(&c.recip())));
        }
        if !divisor.rational.is_zero() || divisor.radicals.len() != 1 {
            return Ok(None);
        }
        // x / (c sqrt(m)) = x * sqrt(m) / (c m)
        let (m, c) = divisor.radicals.iter().next().unwrap();
        let m_rat = Rational::from_integer(BigInt::from_biguint(Sign::Plus, m.clone()));
        let root = ExactEnergy {
            rational: Rational::zero(),
            radicals: BTreeMap::from([(m.clone(), Rational::one())]),
        };
        Ok(Some((self * &root).scale(&(c * &m_rat).recip())))
    }

    /// When `self = r * other` for a rational `r`, returns `r`.
    pub fn rational_ratio(&self, other: &ExactEnergy) -> Result<Option<Rational>> {
        if other.is_zero() {
            return Err(Error::domain("ratio with zero denominator"));
        }
        let r = match other.radicals.iter().next() {
            Some((m, c)) => match self.radicals.get(m) {
                Some(k) => k / c,
                None => Rational::zero(),
            },
            None => &self.rational / &other.rational,
        };
        Ok((other.scale(&r) == *self).then_some(r))
    }

    pub fn to_f64(&self) -> f64 {
        self.radicals.iter().fold(rat_to_f64(&self.rational), |acc, (m, c)| {
            acc + rat_to_f64(c) * m.to_f64().unwrap_or(f64::INFINITY).sqrt()
        })
    }

    /// Exact sign, resolved by interval refinement of each square root.
    pub fn signum(&self) -> Ordering {
        if self.radicals.is_empty() {
            return self.rational.cmp(&Rational::zero());
        }
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = SIGN_PRECISION_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    /// Rational interval containing the value; each `sqrt(m)` is bracketed
    /// to within `2^-bits`.
    fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let scale = BigUint::one() << bits;
        let scale_int = BigInt::from_biguint(Sign::Plus, scale.clone());
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (m, c) in &self.radicals {
            let floor = (m * &scale * &scale).sqrt();
            let floor = BigInt::from_biguint(Sign::Plus, floor);
            let below = Rational::new(floor.clone(), scale_int.clone());
            let above = Rational::new(floor + 1, scale_int.clone());
            if c.is_positive() {
                lo += c * below;
                hi += c * above;
            } else {
                lo += c * above;
                hi += c * below;
            }
        }
        (lo, hi)
    }

    fn add_term(&mut self, m: BigUint, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.radicals.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Folds square factors out of every radicand, merges like terms and drops
/// zero coefficients. The represented real value is unchanged.
pub fn surd_normalize<I>(rational: Rational, terms: I) -> Result<ExactEnergy>
where
    I: IntoIterator<Item = (BigUint, Rational)>,
{
    let mut out = ExactEnergy::from_rational(rational);
    for (m, c) in terms {
        if c.is_zero() || m.is_zero() {
            continue;
        }
        let (s, f) = squarefree_split(&m)?;
        let c = c * Rational::from_integer(BigInt::from_biguint(Sign::Plus, s));
        if f.is_one() {
            out.rational += c;
        } else {
            out.add_term(f, c);
        }
    }
    Ok(out)
}

impl From<Rational> for ExactEnergy {
    fn from(r: Rational) -> Self {
        ExactEnergy::from_rational(r)
    }
}

impl PartialOrd for ExactEnergy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactEnergy {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

impl Neg for &ExactEnergy {
    type Output = ExactEnergy;
    fn neg(self) -> ExactEnergy {
        self.scale(&-Rational::one())
    }
}

impl Neg for ExactEnergy {
    type Output = ExactEnergy;
    fn neg(self) -> ExactEnergy {
        -&self
    }
}

impl Add for &ExactEnergy {
    type Output = ExactEnergy;
    fn add(self, rhs: &ExactEnergy) -> ExactEnergy {
        let mut out = self.clone();
        out.rational += &rhs.rational;
        for (m, c) in &rhs.radicals {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ExactEnergy {
    type Output = ExactEnergy;
    fn sub(self, rhs: &ExactEnergy) -> ExactEnergy {
        self + &(-rhs)
    }
}

impl Mul for &ExactEnergy {
    type Output = ExactEnergy;
    fn mul(self, rhs: &ExactEnergy) -> ExactEnergy {
        let mut out = ExactEnergy::from_rational(&self.rational * &rhs.rational);
        for (m, c) in &rhs.radicals {
            out.add_term(m.clone(), &self.rational * c);
        }
        for (m, c) in &self.radicals {
            out.add_term(m.clone(), c * &rhs.rational);
        }
        for (m1, c1) in &self.radicals {
            for (m2, c2) in &rhs.radicals {
                // sqrt(m1 m2) = g sqrt(m1 m2 / g^2) with g = gcd(m1, m2),
                // and m1 m2 / g^2 is squarefree since m1, m2 are
                let g = num_integer::Integer::gcd(m1, m2);
                let f = (m1 / &g) * (m2 / &g);
                let c = c1 * c2 * Rational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                if f.is_one() {
                    out.rational += c;
                } else {
                    out.add_term(f, c);
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for ExactEnergy {
            type Output = ExactEnergy;
            fn $method(self, rhs: ExactEnergy) -> ExactEnergy {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactEnergy> for ExactEnergy {
            type Output = ExactEnergy;
            fn $method(self, rhs: &ExactEnergy) -> ExactEnergy {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for ExactEnergy {
    /// `a + b*sqrt(m) - c*sqrt(k)`; unit coefficients print as `sqrt(m)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.rational.is_zero() || self.radicals.is_empty() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (m, c) in &self.radicals {
            let mag = c.abs();
            let body = if mag.is_one() {
                format!("sqrt({m})")
            } else {
                format!("{mag}*sqrt({m})")
            };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for ExactEnergy {
    type Err = Error;

    /// Accepts sums of terms `p/q`, `c*sqrt(m)`, `sqrt(m)`, `c*sqrt(m)/q`
    /// with `+`/`-` between them. The radicand may itself be `p/q`.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse("empty value"));
        }
        let mut value = ExactEnergy::zero();
        for (negative, term) in split_terms(&compact)? {
            let mut parsed = parse_term(term)
                .map_err(|_| Error::parse(format!("invalid term `{term}` in `{text}`")))?;
            if negative {
                parsed = -parsed;
            }
            value = value + parsed;
        }
        Ok(value)
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, &str)>> {
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut negative = false;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev = text[..i].chars().last();
                // leading sign, or sign right after an operator
                if matches!(prev, None | Some('*') | Some('/')) {
                    continue;
                }
                terms.push((negative, &text[start..i]));
                negative = ch == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(format!("unbalanced parentheses in `{text}`")));
    }
    terms.push((negative, &text[start..]));
    if terms.iter().any(|(_, t)| t.is_empty()) {
        return Err(Error::parse(format!("empty term in `{text}`")));
    }
    Ok(terms)
}

fn parse_term(term: &str) -> Result<ExactEnergy> {
    let Some(open) = term.find("sqrt(") else {
        return Ok(ExactEnergy::from_rational(parse_rational(term)?));
    };
    let close = term[open..]
        .find(')')
        .map(|i| open + i)
        .ok_or_else(|| Error::parse("missing `)`"))?;
    let coeff = match &term[..open] {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        pre => parse_rational(pre.strip_suffix('*').ok_or_else(|| Error::parse("missing `*`"))?)?,
    };
    let radicand = parse_rational(&term[open + 5..close])?;
    let divisor = match &term[close + 1..] {
        "" => Rational::one(),
        post => {
            let d = parse_rational(post.strip_prefix('/').ok_or_else(|| Error::parse("junk"))?)?;
            if d.is_zero() {
                return Err(Error::parse("division by zero"));
            }
            d
        }
    };
    Ok(ExactEnergy::sqrt_of(&radicand)?.scale(&(coeff / divisor)))
}
