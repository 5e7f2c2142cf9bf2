//! Exact rationals and their `"p/q"` text form.

use num::{BigInt, BigRational, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Longest accepted rational literal, in bytes.
const MAX_LITERAL_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("rational literal longer than {MAX_LITERAL_LEN} bytes")]
    TooLong,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

fn parse_digits(s: &str, allow_sign: bool) -> Option<BigInt> {
    let body = if allow_sign {
        s.strip_prefix('-')
            .or_else(|| s.strip_prefix('+'))
            .unwrap_or(s)
    } else {
        s
    };
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `"p"` or `"p/q"` with an optional sign on `p`. No decimals, no whitespace.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.len() > MAX_LITERAL_LEN {
        return Err(ParseRationalError::TooLong);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    match s.split_once('/') {
        None => parse_digits(s, true)
            .map(Q::from_integer)
            .ok_or_else(malformed),
        Some((p, q)) => {
            let p = parse_digits(p, true).ok_or_else(malformed)?;
            let q = parse_digits(q, false).ok_or_else(malformed)?;
            if q.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            Ok(Q::new(p, q))
        }
    }
}

/// Lossless text form: `"p"` for integers, `"p/q"` otherwise, always in lowest terms.
pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// `(x_1, ..., x_d) -> (x_d, ..., x_1)`.
pub fn reverse_coordinates(x: &[Q]) -> Vec<Q> {
    x.iter().rev().cloned().collect()
}

/// Nearest `f64`; exact for small numerators and denominators.
pub fn to_f64(q: &Q) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // Huge terms: scale down before dividing.
        let (n, d) = (q.numer(), q.denom());
        let shift = n.bits().max(d.bits()).saturating_sub(1000);
        let n = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
        let d = (d >> shift).to_f64().unwrap_or(f64::MAX);
        let v = n / d;
        if q.is_negative() {
            -v
        } else {
            v
        }
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("4").unwrap(), int(4));
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("+7/1").unwrap(), int(7));
        assert_eq!(parse_rational("0/5").unwrap(), int(0));
    }

    #[test]
    fn rejects_bad_literals() {
        for bad in [
            "", "1.5", "1/", "/2", "1/-2", " 1", "1/2/3", "--1", "1e3", "0x10",
        ] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(
            parse_rational("3/0"),
            Err(ParseRationalError::ZeroDenominator("3/0".into()))
        );
        assert_eq!(
            parse_rational(&"9".repeat(5000)),
            Err(ParseRationalError::TooLong)
        );
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(-8, 2)), "-4");
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(
            reverse_coordinates(&[int(1), int(2), int(3)]),
            vec![int(3), int(2), int(1)]
        );
        assert_eq!(reverse_coordinates(&[int(5)]), vec![int(5)]);
    }

    #[test]
    fn huge_values_convert_to_finite_floats() {
        let big = Q::new(
            (BigInt::from(3) << 3000usize) + 1,
            BigInt::from(2) << 3000usize,
        );
        assert!((to_f64(&big) - 1.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let x = ratio(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }

        #[test]
        fn reverse_is_involutive(v in prop::collection::vec(-50i64..50, 0..9)) {
            let x: Vec<Q> = v.into_iter().map(int).collect();
            prop_assert_eq!(reverse_coordinates(&reverse_coordinates(&x)), x);
        }
    }
}
