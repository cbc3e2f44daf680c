//! Laurent polynomials in the metric parameter `l` with exact rational
//! coefficients.
//!
//! Every structure on the group depends on the parameter only through integer
//! powers, so identities can be checked once for all positive values instead of
//! at sampled floats. Division is only defined by monomials `c*l^k`.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Builds a rational from a numerator and denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A Laurent polynomial `sum_k c_k l^k`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<i32, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(rational(num, den))
    }

    /// The formal parameter `l`.
    pub fn lambda() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, exp: i32) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if the scalar has no `l` dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// `Some((c, k))` if the scalar is a nonzero monomial `c*l^k`.
    pub fn as_monomial(&self) -> Option<(&Rational, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, c)| (c, *k))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplicative inverse; defined only for nonzero monomials.
    pub fn inv(&self) -> Result<Self> {
        match self.as_monomial() {
            Some((c, k)) => Ok(Self::monomial(c.recip(), -k)),
            None => Err(Error::NonMonomialDivision(self.to_string())),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Evaluates at `l = at`.
    pub fn eval(&self, at: &Rational) -> Result<Rational> {
        if at.is_zero() && self.terms.keys().any(|k| *k < 0) {
            return Err(Error::Evaluation(format!("{self} at l = 0")));
        }
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            acc += c * pow_rational(at, *k);
        }
        Ok(acc)
    }

    /// Substitutes `l -> value`, where `value` must be a nonzero monomial.
    pub fn substitute(&self, value: &Scalar) -> Result<Scalar> {
        let inv = if self.terms.keys().any(|k| *k < 0) {
            Some(value.inv()?)
        } else {
            None
        };
        let mut acc = Scalar::zero();
        for (k, c) in &self.terms {
            let base = if *k >= 0 { value.pow(*k as u32) } else { inv.as_ref().unwrap().pow((-*k) as u32) };
            acc += base.scale(c);
        }
        Ok(acc)
    }

    fn add_term(&mut self, exp: i32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }
}

fn pow_rational(x: &Rational, k: i32) -> Rational {
    let base = if k < 0 { x.recip() } else { x.clone() };
    (0..k.unsigned_abs()).fold(Rational::one(), |acc, _| acc * &base)
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl From<Rational> for Scalar {
    fn from(v: Rational) -> Self {
        Scalar::constant(v)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c);
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, &-c);
        }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// Terms are printed from the highest power down, e.g. `-12*l^2 + 1/2*l^-1`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = match *k {
                0 => String::new(),
                1 => "l".to_string(),
                k => format!("l^{k}"),
            };
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses the format produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // split into signed terms; a '-' directly after '^' belongs to an exponent
        let mut pieces: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut prev = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev.is_some() && prev != Some('^') {
                pieces.push(std::mem::take(&mut current));
            }
            current.push(ch);
            prev = Some(ch);
        }
        pieces.push(current);

        let mut out = Scalar::zero();
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, piece.strip_prefix('+').unwrap_or(&piece)),
            };
            let (coef, exp) = if let Some(idx) = body.find('l') {
                let coef_str = body[..idx].trim_end_matches('*');
                let coef = if coef_str.is_empty() {
                    Rational::one()
                } else {
                    parse_rational(coef_str).ok_or_else(bad)?
                };
                let rest = &body[idx + 1..];
                let exp = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').and_then(|e| e.parse::<i32>().ok()).ok_or_else(bad)?
                };
                (coef, exp)
            } else {
                (parse_rational(body).ok_or_else(bad)?, 0)
            };
            out.add_term(exp, &(coef * Rational::from_integer(sign.into())));
        }
        Ok(out)
    }
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l() -> Scalar {
        Scalar::lambda()
    }

    #[test]
    fn monomial_division_only() {
        let l3 = l().pow(3);
        assert_eq!(l3.checked_div(&l()).unwrap(), l().pow(2));
        let num = l().pow(2) - Scalar::one();
        let den = l() - Scalar::one();
        assert!(matches!(num.checked_div(&den), Err(Error::NonMonomialDivision(_))));
        assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let s = l() - l();
        assert!(s.is_zero());
        assert_eq!(s, Scalar::zero());
        assert_eq!(s.terms().count(), 0);
    }

    #[test]
    fn display_and_parse() {
        let s = l().pow(2).scale(&rational(-12, 1)) + Scalar::ratio(1, 2) + l().inv().unwrap().scale(&rational(3, 4));
        assert_eq!(s.to_string(), "-12*l^2 + 1/2 + 3/4*l^-1");
        assert_eq!(s.to_string().parse::<Scalar>().unwrap(), s);
        assert_eq!("-l".parse::<Scalar>().unwrap(), -l());
        assert_eq!("0".parse::<Scalar>().unwrap(), Scalar::zero());
        assert!("l^".parse::<Scalar>().is_err());
    }

    #[test]
    fn evaluation_and_substitution() {
        let s = l().pow(2).scale(&rational(-3, 1)) + l().inv().unwrap();
        assert_eq!(s.eval(&rational(2, 1)).unwrap(), rational(-23, 2));
        assert!(s.eval(&rational(0, 1)).is_err());
        let sub = s.substitute(&Scalar::int(2)).unwrap();
        assert_eq!(sub, Scalar::ratio(-23, 2));
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        prop::collection::vec((-3i32..4, -5i64..6, 1i64..4), 0..4).prop_map(|v| {
            v.into_iter()
                .map(|(k, n, d)| Scalar::monomial(rational(n, d), k))
                .sum()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn display_round_trip(a in arb_scalar()) {
            prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
        }
    }
}
