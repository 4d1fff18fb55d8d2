//! Exact rational scalars and their textual form.
//!
//! Every probability, weight, query cost and LP quantity in this crate is a
//! [`Rat`]. Input files carry rationals as strings: `"3/4"`, `"2"`, or a
//! decimal literal like `"0.25"` (converted exactly, `d` fractional digits
//! become a denominator of `10^d`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Shorthand for small rationals in code and tests.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRatError {
    pub literal: String,
    pub reason: String,
}

fn err(literal: &str, reason: &str) -> ParseRatError {
    ParseRatError {
        literal: literal.to_owned(),
        reason: reason.to_owned(),
    }
}

/// Parses `num/den`, integer, or decimal literals into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, ParseRatError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(err(text, "empty"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| err(text, "numerator is not an integer"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| err(text, "denominator is not an integer"))?;
        if d.is_zero() {
            return Err(err(text, "denominator is zero"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_part = if int_part.is_empty() || int_part == "-" {
            "0"
        } else {
            int_part
        };
        let int: BigInt = int_part
            .parse()
            .map_err(|_| err(text, "integer part is not an integer"))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(text, "fractional part is not digits"));
        }
        let frac: BigInt = frac_part.parse().unwrap();
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let unsigned = int.abs() * &scale + frac;
        let signed = if negative { -unsigned } else { unsigned };
        return Ok(Rat::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err(text, "not an integer"))?;
    Ok(Rat::from_integer(n))
}

/// Canonical `num/den` rendering (`num` alone when the denominator is 1).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with a fixed number of fractional digits, for CSV output.
pub fn format_rat_decimal(r: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * Rat::from_integer(scale.clone())).round();
    let v = scaled.to_integer();
    let negative = v.is_negative();
    let abs = v.abs();
    let int = &abs / &scale;
    let frac = &abs % &scale;
    let sign = if negative { "-" } else { "" };
    format!(
        "{sign}{int}.{frac:0>width$}",
        width = digits as usize,
        frac = frac.to_string()
    )
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat(" -6/8 ").unwrap(), rat(-3, 4));
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
    }

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("10.00").unwrap(), rat_int(10));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a/b").is_err());
        assert!(parse_rat("1.2.3").is_err());
        assert!(parse_rat("1e3").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for r in [rat(1, 3), rat(-7, 2), rat_int(0), rat_int(12)] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_rat_decimal(&rat(3, 4), 6), "0.750000");
        assert_eq!(format_rat_decimal(&rat(-1, 3), 4), "-0.3333");
    }
}
