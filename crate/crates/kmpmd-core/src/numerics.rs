//! Exact rational arithmetic shared by every other module.
//!
//! All times, distances, dual values, and LP coefficients in this crate are
//! arbitrary-precision rationals. Tight-edge events and simplex pivots are
//! exact roots of linear equations, so no floating point is involved
//! anywhere; results are bit-reproducible across platforms.
//!
//! The canonical text rendering is `p/q` with the `/q` part omitted when the
//! denominator is 1 (`"1/2"`, `"-7"`, `"101/100"`). [`parse_rational`]
//! accepts that form plus terminating decimals, which are converted exactly.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact arbitrary-precision fraction.
///
/// Invariants (maintained by every constructor and operation): the
/// denominator is positive and `gcd(|numerator|, denominator) = 1`.
pub type Rational = num_rational::BigRational;

/// Error raised by [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    /// The text does not match any of the accepted forms.
    Malformed(String),
    /// A fraction with denominator zero, e.g. `"1/0"`.
    ZeroDenominator(String),
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Malformed(s) => write!(f, "malformed rational: {s:?}"),
            ParseRationalError::ZeroDenominator(s) => {
                write!(f, "zero denominator in rational: {s:?}")
            }
        }
    }
}

/// Builds a rational from machine integers (convenience for literals).
///
/// # Panics
/// Panics if `denom == 0`.
///
/// # Examples
/// ```
/// use kmpmd_core::numerics::{rat, render_rational};
/// assert_eq!(render_rational(&rat(3, 6)), "1/2");
/// ```
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "rat: zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds the integer rational `n/1`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn parse_digits(text: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    // Digits only, so this cannot fail.
    Ok(text.parse::<BigInt>().expect("digit-only BigInt parse"))
}

/// Parses the canonical rational forms.
///
/// Accepted: integer `[-]?D+`, fraction `[-]?D+/D+`, terminating decimal
/// `[-]?D+.D+`. Decimals are scaled by powers of ten, never routed through
/// binary floating point. The result is in canonical form.
///
/// # Examples
/// ```
/// use kmpmd_core::numerics::{parse_rational, rat, int};
/// assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
/// assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
/// assert_eq!(parse_rational("-7").unwrap(), int(-7));
/// assert!(parse_rational("1/0").is_err());
/// assert!(parse_rational("1.2.3").is_err());
/// ```
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let magnitude = if let Some((numer, denom)) = body.split_once('/') {
        let numer = parse_digits(numer, text)?;
        let denom = parse_digits(denom, text)?;
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        Rational::new(numer, denom)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let whole = parse_digits(whole, text)?;
        let frac_digits = frac.len() as u32;
        let frac = parse_digits(frac, text)?;
        let scale = BigInt::from(10u32).pow(frac_digits);
        Rational::new(whole * &scale + frac, scale)
    } else {
        Rational::from_integer(parse_digits(body, text)?)
    };
    Ok(if negative { -magnitude } else { magnitude })
}

/// Renders a rational canonically: `p/q`, with `/q` omitted when `q = 1`.
///
/// Round-trip property: `parse_rational(&render_rational(&x)) == Ok(x)`.
pub fn render_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        let mut s = x.numer().to_string();
        s.push('/');
        s.push_str(&x.denom().to_string());
        s
    }
}

/// Renders a rational as a fixed-precision decimal, rounding half away from
/// zero. Used for human-oriented convenience columns; correctness claims
/// always use the exact rendering.
///
/// # Examples
/// ```
/// use kmpmd_core::numerics::{rat, render_decimal};
/// assert_eq!(render_decimal(&rat(301, 50), 6), "6.020000");
/// assert_eq!(render_decimal(&rat(-1, 3), 4), "-0.3333");
/// assert_eq!(render_decimal(&rat(1, 2), 0), "1");
/// ```
pub fn render_decimal(x: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    // round(|x| * 10^digits) with ties away from zero
    let scaled = x.abs() * Rational::from_integer(scale.clone());
    let (quot, rem) = num_integer::Integer::div_rem(scaled.numer(), scaled.denom());
    let rounded = if &rem * BigInt::from(2) >= *scaled.denom() {
        quot + BigInt::one()
    } else {
        quot
    };
    let sign = if x.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return alloc::format!("{sign}{rounded}");
    }
    let (ipart, fpart) = num_integer::Integer::div_rem(&rounded, &scale);
    let frac = fpart.to_string();
    let mut padded = String::new();
    for _ in frac.len()..digits as usize {
        padded.push('0');
    }
    padded.push_str(&frac);
    alloc::format!("{sign}{ipart}.{padded}")
}

/// Binary operation selector for [`rational_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Cmp,
}

/// Result of [`rational_arith`]: a value for the arithmetic ops, an ordering
/// for `Cmp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithResult {
    Value(Rational),
    Ordering(Ordering),
}

/// Error raised by [`rational_arith`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    DivisionByZero,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

/// Exact binary arithmetic in canonical form; `Cmp` is the total order.
///
/// Thin, uniform entry point over the operator impls; useful for table-driven
/// tests and scripting surfaces.
///
/// # Examples
/// ```
/// use core::cmp::Ordering;
/// use kmpmd_core::numerics::{rational_arith, rat, int, ArithOp, ArithResult};
/// let sum = rational_arith(&rat(1, 3), &rat(1, 6), ArithOp::Add).unwrap();
/// assert_eq!(sum, ArithResult::Value(rat(1, 2)));
/// let ord = rational_arith(&rat(1, 3), &rat(2, 7), ArithOp::Cmp).unwrap();
/// assert_eq!(ord, ArithResult::Ordering(Ordering::Greater));
/// ```
pub fn rational_arith(a: &Rational, b: &Rational, op: ArithOp) -> Result<ArithResult, ArithError> {
    Ok(match op {
        ArithOp::Add => ArithResult::Value(a + b),
        ArithOp::Sub => ArithResult::Value(a - b),
        ArithOp::Mul => ArithResult::Value(a * b),
        ArithOp::Div => {
            if b.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            ArithResult::Value(a / b)
        }
        ArithOp::Cmp => ArithResult::Ordering(a.cmp(b)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parses_canonical_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-0").unwrap(), int(0));
        assert_eq!(parse_rational("101/100").unwrap(), rat(101, 100));
        assert_eq!(parse_rational("-3/9").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("10.50").unwrap(), rat(21, 2));
        assert_eq!(parse_rational("007").unwrap(), int(7));
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in [
            "", "-", "/", "1/", "/2", "1//2", "1.2.3", ".5", "5.", "1 / 2", "+3", "0x10", "1e3",
            "1/-2", "--1", "NaN",
        ] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
        assert_eq!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator("1/0".into()))
        );
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(render_rational(&rat(1, 2)), "1/2");
        assert_eq!(render_rational(&int(-7)), "-7");
        assert_eq!(render_rational(&int(0)), "0");
        assert_eq!(render_rational(&rat(-3, 4)), "-3/4");
        assert_eq!(render_rational(&rat(101, 100)), "101/100");
    }

    #[test]
    fn round_trips_parse_render() {
        let cases = vec![
            rat(1, 2),
            int(-7),
            int(0),
            rat(-355, 113),
            rat(101, 100),
            rat(123456789, 987654321),
        ];
        for x in cases {
            assert_eq!(parse_rational(&render_rational(&x)).unwrap(), x);
        }
    }

    #[test]
    fn arithmetic_matches_contract() {
        assert_eq!(
            rational_arith(&rat(1, 3), &rat(1, 6), ArithOp::Add).unwrap(),
            ArithResult::Value(rat(1, 2))
        );
        assert_eq!(
            rational_arith(&rat(2, 3), &rat(3, 2), ArithOp::Mul).unwrap(),
            ArithResult::Value(int(1))
        );
        assert_eq!(
            rational_arith(&rat(1, 3), &rat(2, 7), ArithOp::Cmp).unwrap(),
            ArithResult::Ordering(Ordering::Greater)
        );
        assert_eq!(
            rational_arith(&int(1), &int(0), ArithOp::Div),
            Err(ArithError::DivisionByZero)
        );
        assert_eq!(
            rational_arith(&rat(5, 4), &rat(1, 4), ArithOp::Sub).unwrap(),
            ArithResult::Value(int(1))
        );
    }

    #[test]
    fn decimal_rendering_is_fixed_precision() {
        assert_eq!(render_decimal(&rat(301, 50), 6), "6.020000");
        assert_eq!(render_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(render_decimal(&rat(2, 3), 4), "0.6667");
        assert_eq!(render_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(render_decimal(&int(5), 3), "5.000");
        assert_eq!(render_decimal(&rat(1, 2), 0), "1");
        assert_eq!(render_decimal(&rat(-1, 200), 2), "-0.01");
        assert_eq!(render_decimal(&rat(-1, 2000), 2), "0.00");
    }
}
