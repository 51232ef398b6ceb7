//! Exact rational arithmetic for series coefficients.
//!
//! Every identity in this crate is exact, so coefficients are rationals with
//! arbitrary-precision fallback. Shuffle coefficients grow factorially, but in
//! practice almost all values fit a machine word, so `Rational` keeps a
//! reduced `i64/i64` fast path and promotes to `BigRational` only when a
//! reduced result no longer fits.
//!
//! Invariants:
//! - Always stored in lowest terms with denominator > 0.
//! - The `Small` representation is used exactly when numerator and
//!   denominator both fit in `i64`, so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    /// Reduced fraction with positive denominator, out of `i64` range.
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    /// Build `numer/denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Self::from_i128_frac(numer as i128, denom as i128)
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// Normalize an `i128` fraction; inputs must stay well inside the `i128`
    /// range (all internal call sites are sums/products of `i64` values).
    fn from_i128_frac(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if n == 0 {
            return Self::zero();
        }
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        let (n, d) = (n / g, d / g);
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(ns), Ok(ds)) => Rational(Repr::Small(ns, ds)),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    /// Demote a reduced `BigRational` to the small representation when it fits.
    fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Rational(Repr::Small(n, d))
        } else {
            Rational(Repr::Big(Box::new(r)))
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => (**r).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.numer().is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Self::from_i128_frac(*d as i128, *n as i128)
            }
            Repr::Big(r) => Self::from_big(r.recip()),
        }
    }

    /// Multiply by a non-negative machine integer (shuffle multiplicities).
    pub fn mul_u64(&self, m: u64) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128_frac(*n as i128 * m as i128, *d as i128),
            Repr::Big(r) => Self::from_big(&**r * BigInt::from(m)),
        }
    }

    /// Lossy conversion used only at the numerical-simulation boundary.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_i128_frac(-(*n as i128), *d as i128),
            Repr::Big(r) => Rational::from_big(-(**r).clone()),
        }
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::ops::Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => Rational::from_i128_frac(
                *an as i128 * *bd as i128 + *bn as i128 * *ad as i128,
                *ad as i128 * *bd as i128,
            ),
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl std::ops::Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => Rational::from_i128_frac(
                *an as i128 * *bd as i128 - *bn as i128 * *ad as i128,
                *ad as i128 * *bd as i128,
            ),
            _ => Rational::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl std::ops::Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => Rational::from_i128_frac(
                *an as i128 * *bn as i128,
                *ad as i128 * *bd as i128,
            ),
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl std::ops::Div for &Rational {
    type Output = Rational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip()
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                std::ops::$trait::$method(&self, rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl std::ops::AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

/// Error parsing the `p`, `-p`, `p/q` rational syntax.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("malformed rational literal")]
    Syntax,
    #[error("rational with zero denominator")]
    ZeroDenominator,
}

fn parse_digits(s: &str) -> Result<BigInt, ParseRationalError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Syntax);
    }
    s.parse::<BigInt>().map_err(|_| ParseRationalError::Syntax)
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `-p` and `p/q` with `q` unsigned; reduction is implied.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (numer_str, denom_str) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        let mut numer = parse_digits(numer_str)?;
        if negative {
            numer = -numer;
        }
        let denom = match denom_str {
            Some(d) => parse_digits(d)?,
            None => BigInt::from(1),
        };
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator);
        }
        Ok(Self::from_big(BigRational::new(numer, denom)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn reduction_and_sign_normalization() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(1, -2), r(-1, 2));
        assert_eq!(r(-3, -6), r(1, 2));
        assert_eq!(r(0, 7), Rational::zero());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&r(1, 2) + &r(1, 3), r(5, 6));
        assert_eq!(&r(1, 2) - &r(1, 2), Rational::zero());
        assert_eq!(&r(2, 3) * &r(3, 4), r(1, 2));
        assert_eq!(&r(1, 2) / &r(1, 4), r(2, 1));
        assert_eq!(-&r(1, 2), r(-1, 2));
        assert_eq!(r(3, 7).recip(), r(7, 3));
        assert_eq!(r(1, 6).mul_u64(12), r(2, 1));
    }

    #[test]
    fn promotion_and_demotion() {
        let huge = r(i64::MAX, 1);
        let sum = &huge + &huge; // exceeds i64
        assert_eq!(&sum - &huge, huge);
        assert!(!sum.is_zero());
        // demotion: big intermediate collapsing back to small
        let back = &sum * &r(0, 1);
        assert_eq!(back, Rational::zero());
        let neg_min = -&r(i64::MIN, 1);
        assert_eq!(&neg_min + &r(i64::MIN, 1), Rational::zero());
    }

    #[test]
    fn extreme_denominators() {
        // normalizing the sign of i64::MIN does not fit i64; must promote
        let v = r(1, i64::MIN);
        assert_eq!(v.to_string(), format!("-1/{}", 1i128 << 63));
        assert_eq!(&v * &r(i64::MIN, 1), Rational::one());
        assert_eq!(r(i64::MIN, i64::MIN), Rational::one());
        assert_eq!(r(i64::MIN, 2).to_string(), format!("-{}", 1i64 << 62));
    }

    #[test]
    fn ordering() {
        assert!(r(1, 3) < r(1, 2));
        assert!(r(-1, 2) < r(0, 1));
        let big = &r(i64::MAX, 1) + &r(1, 1);
        assert!(r(1, 1) < big);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "5", "-5", "1/2", "-7/3", "12345678901234567890123/7"] {
            let v: Rational = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("4/6".parse::<Rational>().unwrap(), r(2, 3));
        assert_eq!("-0".parse::<Rational>().unwrap(), Rational::zero());
    }

    #[test]
    fn parse_rejects_malformed_input() {
        for s in ["", "+1", "1/", "/2", "1/0", "a", "1/-2", "1.5", "1 /2", "--1"] {
            assert!(s.parse::<Rational>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn to_f64_conversion() {
        assert_eq!(r(1, 2).to_f64(), 0.5);
        assert_eq!(r(-3, 4).to_f64(), -0.75);
    }
}
