//! Exact rational parameters such as `2^-8`, `q^-2`, `1/256`, `0.1`, `1e-6`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses an exact rational. `q` substitutes for the symbol `q` in powers.
pub fn parse_ratio(text: &str, q: Option<u64>) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("cannot read {text:?} as an exact number"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let a = parse_ratio(num, q)?;
        let b = parse_ratio(den, q)?;
        if b.is_zero() {
            return Err(Error::Parse(format!("division by zero in {text:?}")));
        }
        return Ok(a / b);
    }
    if let Some((base, exp)) = t.split_once('^') {
        let base = match base.trim() {
            "q" => BigRational::from_integer(
                q.ok_or_else(|| Error::Parse(format!("{text:?} refers to q but no field is given")))?.into(),
            ),
            b => parse_decimal(b).ok_or_else(bad)?,
        };
        let exp: i32 = exp.trim().parse().map_err(|_| bad())?;
        if base.is_zero() && exp < 0 {
            return Err(Error::Parse(format!("division by zero in {text:?}")));
        }
        return Ok(Pow::pow(&base, exp));
    }
    if t == "q" {
        return q.map(|v| BigRational::from_integer(v.into())).ok_or_else(bad);
    }
    parse_decimal(t).ok_or_else(bad)
}

/// Decimal literal with optional fraction and exponent, exactly.
fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let ten = BigRational::from_integer(10.into());
    let scale = exp - i32::try_from(frac.len()).ok()?;
    let v = BigRational::from_integer(digits) * Pow::pow(&ten, scale);
    Some(if neg { -v } else { v })
}

/// Requires `0 < x < 1`.
pub fn check_unit_open(name: &str, x: &BigRational) -> Result<()> {
    if !x.is_positive() || *x >= BigRational::one() {
        return Err(Error::Param(format!("{name} must lie strictly between 0 and 1, got {x}")));
    }
    Ok(())
}

/// Smallest `k >= 0` with `q^k >= x`, by exact comparison.
pub fn ceil_log(q: u64, x: &BigRational) -> u64 {
    debug_assert!(q >= 2);
    let q = BigInt::from(q);
    let mut pow = BigRational::one();
    let mut k = 0;
    while pow < *x {
        pow *= BigRational::from_integer(q.clone());
        k += 1;
    }
    k
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn forms() {
        assert_eq!(parse_ratio("2^-8", None).unwrap(), r(1, 256));
        assert_eq!(parse_ratio("q^-2", Some(16)).unwrap(), r(1, 256));
        assert_eq!(parse_ratio("1/256", None).unwrap(), r(1, 256));
        assert_eq!(parse_ratio("0.1", None).unwrap(), r(1, 10));
        assert_eq!(parse_ratio("1e-6", None).unwrap(), r(1, 1_000_000));
        assert_eq!(parse_ratio("2.5E1", None).unwrap(), r(25, 1));
        assert_eq!(parse_ratio(" 3/4 ", None).unwrap(), r(3, 4));
        assert_eq!(parse_ratio(".5", None).unwrap(), r(1, 2));
        for bad in ["", "q^-2", "abc", "1/0", "0^-1", "2^x", "1..2"] {
            assert!(parse_ratio(bad, None).is_err(), "{bad}");
        }
    }

    #[test]
    fn ceil_log_is_exact() {
        assert_eq!(ceil_log(16, &r(512, 1)), 3);
        assert_eq!(ceil_log(16, &r(256, 1)), 2);
        assert_eq!(ceil_log(16, &r(257, 1)), 3);
        assert_eq!(ceil_log(2, &r(1, 2)), 0);
        assert_eq!(ceil_log(256, &r(1 << 17, 1)), 3);
        assert_eq!(ceil_log(256, &r(1 << 16, 1)), 2);
    }

    #[test]
    fn unit_interval() {
        assert!(check_unit_open("delta", &r(1, 2)).is_ok());
        assert!(check_unit_open("delta", &r(0, 1)).is_err());
        assert!(check_unit_open("delta", &r(1, 1)).is_err());
    }
}
