//! Exact degrees.
//!
//! All possibility and necessity degrees are exact rationals. Cut boundaries
//! are compared for equality and `1 - β` is computed directly, so floating
//! point is never involved.

use num_rational::Ratio;
use num_traits::{One, Zero};
use std::fmt;

/// Exact rational used for every degree in the crate.
pub type Rational = Ratio<i64>;

/// Most decimal digits accepted after the point. Keeps `10^k` inside `i64`.
const MAX_FRACTION_DIGITS: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("`{0}` is not a number")]
    Malformed(String),
    #[error("`{0}` has too many digits")]
    Overflow(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

/// Parses a decimal (`0.7`, `.5`, `1`) or a fraction (`7/10`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational, NumberError> {
    let malformed = || NumberError::Malformed(text.to_string());
    let overflow = || NumberError::Overflow(text.to_string());

    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = parse_digits(num).ok_or_else(malformed)?.ok_or_else(overflow)?;
        let den: i64 = parse_digits(den).ok_or_else(malformed)?.ok_or_else(overflow)?;
        if den == 0 {
            return Err(NumberError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(num, den));
    }

    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if frac_part.len() > MAX_FRACTION_DIGITS {
        return Err(overflow());
    }
    let int_value = if int_part.is_empty() {
        0
    } else {
        parse_digits(int_part).ok_or_else(malformed)?.ok_or_else(overflow)?
    };
    if frac_part.is_empty() {
        if text.ends_with('.') {
            return Err(malformed());
        }
        return Ok(Rational::from_integer(int_value));
    }
    let frac_value = parse_digits(frac_part).ok_or_else(malformed)?.ok_or_else(overflow)?;
    let scale = 10i64.pow(frac_part.len() as u32);
    let whole = int_value.checked_mul(scale).ok_or_else(overflow)?;
    let numer = whole.checked_add(frac_value).ok_or_else(overflow)?;
    Ok(Rational::new(numer, scale))
}

/// `None` on a non-digit, `Some(None)` on overflow.
fn parse_digits(s: &str) -> Option<Option<i64>> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(s.parse::<i64>().ok())
}

/// Renders a degree in lowest terms, `3/5` or `1`.
pub fn fraction(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a degree as a decimal. Terminating expansions of at most 18
/// places are exact; others are rounded to six places and prefixed with `~`.
pub fn decimal(r: &Rational) -> String {
    let places = exact_decimal_places(*r.denom());
    let exact = places.is_some_and(|p| p <= 18);
    let digits = if exact { places.unwrap_or(0) } else { 6 };
    let pow = 10i128.pow(digits as u32);
    let (num, den) = (*r.numer() as i128, *r.denom() as i128);
    // Round half away from zero.
    let scaled = (2 * num.abs() * pow + den) / (2 * den);
    let sign = if num < 0 && scaled != 0 { "-" } else { "" };
    let (int, frac) = (scaled / pow, scaled % pow);
    let mut out = format!("{sign}{int}");
    if digits > 0 {
        let frac = format!("{:0width$}", frac, width = digits);
        let frac = frac.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    if exact {
        out
    } else {
        format!("~{out}")
    }
}

/// Exact textual form that parses back to `r`: a decimal when one exists,
/// otherwise a fraction.
pub fn literal(r: &Rational) -> String {
    let d = decimal(r);
    if d.starts_with('~') {
        fraction(r)
    } else {
        d
    }
}

/// Places of the terminating decimal expansion of `1/den`, if any.
fn exact_decimal_places(mut den: i64) -> Option<usize> {
    let (mut twos, mut fives) = (0, 0);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    (den == 1).then_some(twos.max(fives))
}

/// `3/5 (0.6)`.
pub struct Both<'a>(pub &'a Rational);

impl fmt::Display for Both<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", fraction(self.0), decimal(self.0))
    }
}

pub fn is_unit_interval(r: &Rational) -> bool {
    *r >= Rational::zero() && *r <= Rational::one()
}
