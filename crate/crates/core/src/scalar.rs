//! Exact rational scalars and their string forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; always stored reduced with a positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses an integer, `a/b`, or finite decimal (`-0.25`, `1e-3`) exactly.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_int(num)?;
        let den: BigInt = parse_int(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Scalar::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(Error::Parse(format!("no digits in {s:?}")));
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an exact number: {s:?}")));
    }
    if exponent.abs() > 10_000 {
        return Err(Error::Parse(format!("exponent out of range in {s:?}")));
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Scalar::from_integer(
        all_digits
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad digits in {s:?}")))?,
    );
    let shift = exponent - frac.len() as i64;
    let ten = BigInt::from(10);
    let power = Scalar::from_integer(num_traits::pow(ten, shift.unsigned_abs() as usize));
    if shift >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad integer {s:?}")));
    }
    t.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Canonical text: `a` for integers, `a/b` otherwise (reduced, b > 0).
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator overflow f64; fall back to a scaled division
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift > 0 {
            x / Scalar::from_integer(BigInt::one() << shift as usize)
        } else {
            x * Scalar::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Exact square root when `x` is the square of a rational.
pub fn rational_sqrt(x: &Scalar) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Scalar::new(n, d))
    } else {
        None
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn squared_norm(a: &[Scalar]) -> Scalar {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_scalar("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_scalar("-2/6").unwrap(), ratio(-1, 3));
        assert_eq!(parse_scalar("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_scalar("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_scalar("42").unwrap(), int(42));
        assert_eq!(parse_scalar("2.5e-1").unwrap(), ratio(1, 4));
        assert_eq!(parse_scalar(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_inexact_or_malformed() {
        for bad in ["", "abc", "1/0", "nan", "inf", "1..2", "0.3.3", "1/2/3", "1/-"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_scalar(&ratio(6, -4)), "-3/2");
        assert_eq!(format_scalar(&int(7)), "7");
        assert_eq!(parse_scalar(&format_scalar(&ratio(-22, 7))).unwrap(), ratio(-22, 7));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&int(2)), None);
        assert_eq!(rational_sqrt(&int(-4)), None);
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = Scalar::new(BigInt::one() << 2000usize, BigInt::one() << 1999usize);
        assert!((to_f64(&big) - 2.0).abs() < 1e-12);
    }
}
