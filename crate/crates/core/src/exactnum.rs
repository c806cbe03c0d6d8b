//! Exact rational scalars and the factorial combinatorics built on them.
//!
//! Every quantity in the crate is a [`Rational`]. Combinatorial helpers return
//! `Rational` even when the result is integral so that callers never juggle
//! two scalar types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// `a (a-1) ... (a-r+1)`; the empty product for `r = 0`.
pub fn falling_factorial(a: &Rational, r: u32) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..r {
        acc *= &term;
        term -= Rational::one();
    }
    acc
}

/// `a (a+1) ... (a+r-1)`.
pub fn rising_factorial(a: &Rational, r: u32) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..r {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

pub fn factorial(k: u32) -> Rational {
    falling_factorial(&int(k as i64), k)
}

/// Generalized binomial coefficient `a^(falling b) / b!` for rational `a`.
pub fn binomial(a: &Rational, b: u32) -> Rational {
    falling_factorial(a, b) / factorial(b)
}

/// Integer binomial `C(n, k)`, zero when `k > n`.
pub fn binomial_int(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    Rational::from_integer(binomial_bigint(n, k))
}

pub(crate) fn binomial_bigint(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `k!! = k (k-2) (k-4) ...`, with `0!! = (-1)!! = 1`.
///
/// Only `k >= -1` is meaningful; smaller arguments are treated as the empty
/// product as well.
pub fn double_factorial(k: i64) -> Rational {
    let mut acc = BigInt::one();
    let mut j = k;
    while j > 1 {
        acc *= BigInt::from(j);
        j -= 2;
    }
    Rational::from_integer(acc)
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_exact(x: &Rational) -> Result<Rational> {
    if x.is_negative() {
        return Err(Error::NotASquare(format_rational(x)));
    }
    let num = x.numer().sqrt();
    let den = x.denom().sqrt();
    if &(&num * &num) == x.numer() && &(&den * &den) == x.denom() {
        Ok(Rational::new(num, den))
    } else {
        Err(Error::NotASquare(format_rational(x)))
    }
}

/// Closest `f64`. Works for magnitudes far outside the `i64` range.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Shift both parts down to keep the quotient representable.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = |v: &BigInt, bits: i64| -> f64 {
        let s = (bits - 60).max(0) as usize;
        (v >> s).to_f64().unwrap_or(0.0) * 2f64.powi(s as i32)
    };
    let n = shift(x.numer(), nb);
    let d = shift(x.denom(), db);
    n / d
}

/// Exact rational image of a finite `f64`.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).expect("finite float")
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Least common multiple of the denominators.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            xs: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(
            rows: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let raw: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect();
            serde::Serialize::serialize(&raw, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let raw = Vec::<Vec<String>>::deserialize(d)?;
            raw.iter()
                .map(|r| {
                    r.iter()
                        .map(|s| parse_rational(s).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            x: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let raw = Option::<String>::deserialize(d)?;
            raw.map(|s| parse_rational(&s).map_err(D::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(&int(5), 2), int(20));
        assert_eq!(falling_factorial(&ratio(7, 3), 0), int(1));
        assert_eq!(falling_factorial(&ratio(1, 2), 2), ratio(-1, 4));
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(&ratio(3, 2), 2), ratio(15, 4));
        assert_eq!(rising_factorial(&ratio(-5, 7), 1), ratio(-5, 7));
        for d in 1..6i64 {
            for j in (2 * d - 1)..(4 * d) {
                assert!(rising_factorial(&int(2 - 2 * d), j as u32).is_zero());
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(&int(5), 2), int(10));
        assert_eq!(binomial(&ratio(5, 2), 6), ratio(-5, 1024));
        assert_eq!(binomial(&ratio(-3, 11), 0), int(1));
    }

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![Rational::one()];
        for n in 0..=30u64 {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial(&int(n as i64), k as u32), v);
                assert_eq!(&binomial_int(n, k as u64), v);
            }
            let mut next = vec![Rational::one(); row.len() + 1];
            for k in 1..row.len() {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
        }
        assert!(binomial_int(3, 4).is_zero());
    }

    #[test]
    fn double_factorial_examples() {
        assert_eq!(double_factorial(7), int(105));
        assert_eq!(double_factorial(0), int(1));
        assert_eq!(double_factorial(1), int(1));
        assert_eq!(double_factorial(-1), int(1));
    }

    #[test]
    fn double_factorial_identities() {
        for k in 0..=15u32 {
            let two_k = pow(&int(2), k) * factorial(k);
            assert_eq!(double_factorial(2 * k as i64), two_k);
            assert_eq!(double_factorial(2 * k as i64 - 1), factorial(2 * k) / two_k);
        }
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(7)), "7");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("4/2").unwrap(), int(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&ratio(25, 16)).unwrap(), ratio(5, 4));
        assert!(sqrt_exact(&int(2)).is_err());
        assert!(sqrt_exact(&int(-4)).is_err());
    }

    #[test]
    fn huge_values_convert_to_float() {
        let big = pow(&int(10), 400) / pow(&int(10), 398);
        assert!((to_f64(&big) - 100.0).abs() < 1e-9);
        let tiny = Rational::new(BigInt::one(), pow(&int(10), 400).to_integer());
        assert!(to_f64(&tiny) >= 0.0);
    }

    proptest! {
        #[test]
        fn falling_is_signed_rising_of_negation(p in -200i64..200, q in 1i64..50, r in 0u32..=20) {
            let a = ratio(p, q);
            let sign = if r % 2 == 0 { int(1) } else { int(-1) };
            prop_assert_eq!(falling_factorial(&a, r), sign * rising_factorial(&-a, r));
        }
    }
}
