//! Exact rational scalars and their `num/den` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational token")]
    Empty,
    #[error("invalid integer `{0}` in rational token")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn parse_int(s: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::BadInteger(s.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::BadInteger(s.to_string()))
}

/// Parses `n` or `n/d`. Decimal points, exponents and whitespace inside the
/// token are rejected.
pub fn parse_rational(token: &str) -> Result<Rational, ParseRationalError> {
    if token.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    match token.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(token)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(token.to_string()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Lossless `num/den` form (integers keep the `/1`).
pub fn to_record(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Human form: `n` for integers, `n/d` otherwise.
pub fn to_display(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        to_record(x)
    }
}

/// Decimal approximation for human-facing tables only.
pub fn approx(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive(x: &Rational) -> bool {
    x.is_positive()
}

pub fn is_negative(x: &Rational) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_fraction() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-2/4").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("6/-4").unwrap(), rat(-3, 2));
    }

    #[test]
    fn rejects_non_rational_tokens() {
        for bad in ["", "1.5", "1e3", "a/2", "1/", "/2", "1/2/3", " 1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator("1/0".into()))
        );
    }

    #[test]
    fn record_form_is_lossless() {
        for x in [rat(-7, 3), int(0), int(12), rat(1, 1_000_000_007)] {
            assert_eq!(parse_rational(&to_record(&x)).unwrap(), x);
        }
        assert_eq!(to_record(&int(2)), "2/1");
        assert_eq!(to_display(&int(2)), "2");
    }
}
