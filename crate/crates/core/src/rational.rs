//! Exact rational values used for rewards, costs, and objective bookkeeping.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar. Rewards, costs, and objective values are kept in
/// this form so that LP-vs-oracle comparisons can be made without rounding.
pub type Rat = BigRational;

/// Builds a rational from an integer numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Converts a rational to `f64`, for LP solving in float mode and reporting.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite `f64` into a rational.
pub fn f64_to_rat(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Parses a decimal string such as `"1.25"` or `"-0.5"` into a rational.
pub fn parse_decimal(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(Rat::new(num * BigInt::from(sign), den))
}

/// Renders a rational as `"num/den"`, or just `"num"` when the denominator is 1.
pub fn format_rat(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the output of [`format_rat`].
pub fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let num: BigInt = n.trim().parse().ok()?;
            let den: BigInt = d.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rat::new(num, den))
        }
        None => parse_decimal(s),
    }
}

/// True when `r` lies in the closed interval `[0, 1]`.
pub fn in_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && r <= &rat_int(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_strings() {
        assert_eq!(parse_decimal("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_decimal("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_decimal("7").unwrap(), rat_int(7));
        assert!(parse_decimal("").is_none());
        assert!(parse_decimal("1.2.3").is_none());
    }

    #[test]
    fn rat_round_trips_through_string() {
        for r in [rat(3, 7), rat_int(-2), rat(22, 4)] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }
}
