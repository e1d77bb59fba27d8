//! Arbitrary-precision rational scalars and string conversions.
//!
//! All quantities in this crate are [`Rat`] values. The `"p/q"` string form
//! used by file formats and reports is handled here so that a zero
//! denominator is a parse error instead of a panic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The scalar type of the whole crate.
pub type Rat = num_rational::BigRational;

/// Shorthand constructor from a machine-integer pair. Panics on `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` with optional sign, in lowest terms.
///
/// Returns `None` for malformed input or a zero denominator.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = match den {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// Renders in the canonical `"p/q"` form, or `"p"` for integers, with the
/// sign on the numerator. This is the inverse of [`parse_rat`] on reduced
/// fractions.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else if r.denom().is_negative() {
        // Ratio keeps reduced denominators positive; a negative one can
        // only reach here through a hand-built value.
        format!("{}/{}", -r.numer(), -r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
