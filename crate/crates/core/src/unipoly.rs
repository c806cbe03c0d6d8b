//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{binomial_int, factorial, int, pow, serde_rational, Rational};

/// Coefficients stored low degree first, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UniPoly {
    #[serde(with = "serde_rational::vec")]
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c k^e`.
    pub fn monomial(c: Rational, e: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); e + 1];
        coeffs[e] = c;
        Self::new(coeffs)
    }

    /// `k - root`.
    pub fn linear(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + crate::exactnum::to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// Euclidean division: `self = divisor * q + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let lead = divisor.leading().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let Some(pd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if pd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); pd - dd + 1];
        for shift in (0..=pd - dd).rev() {
            let c = &rem[shift + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * dc;
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})k"),
                _ => format!("({c})k^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        UniPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// `leading * prod (k - root)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootFormPoly {
    #[serde(with = "serde_rational")]
    pub leading: Rational,
    #[serde(with = "serde_rational::vec")]
    pub roots: Vec<Rational>,
}

impl RootFormPoly {
    pub fn new(leading: Rational, roots: Vec<Rational>) -> Self {
        Self { leading, roots }
    }

    pub fn expand(&self) -> UniPoly {
        self.roots
            .iter()
            .fold(UniPoly::constant(self.leading.clone()), |acc, r| {
                &acc * &UniPoly::linear(r)
            })
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.roots
            .iter()
            .fold(self.leading.clone(), |acc, r| acc * (x - r))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let lead = crate::exactnum::to_f64(&self.leading);
        self.roots
            .iter()
            .fold(lead, |acc, r| acc * (x - crate::exactnum::to_f64(r)))
    }
}

/// Simple-pole expansion `sum_i c_i / (x - pole_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionDecomp {
    pub poles: Vec<Pole>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    #[serde(with = "serde_rational")]
    pub location: Rational,
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
}

impl PartialFractionDecomp {
    /// Evaluates the expansion at `x`, which must avoid every pole.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.poles
            .iter()
            .map(|p| &p.coefficient / (x - &p.location))
            .sum()
    }
}

/// Expansion of `1 / (x - a)^(falling b)` into simple poles at `a, a+1, ..., a+b-1`.
///
/// The coefficient at `a + i` is `(-1)^(b-1-i) / (i! (b-1-i)!)`.
pub fn partial_fractions(a: &Rational, b: u32) -> PartialFractionDecomp {
    assert!(b >= 1, "falling factorial length must be positive");
    let poles = (0..b)
        .map(|i| {
            let sign = if (b - 1 - i).is_multiple_of(2) { 1 } else { -1 };
            Pole {
                location: a + int(i as i64),
                coefficient: int(sign) / (factorial(i) * factorial(b - 1 - i)),
            }
        })
        .collect();
    PartialFractionDecomp { poles }
}

/// `sum_{k=0}^{n} (-1)^k C(n,k) k^c`, which vanishes for `c < n`.
pub fn alternating_moment(n: u32, c: u32) -> Rational {
    (0..=n)
        .map(|k| {
            let term = binomial_int(n as u64, k as u64) * pow(&int(k as i64), c);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{falling_factorial, ratio};
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        let p = UniPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(p.eval(&int(2)), int(3));
        assert!(UniPoly::zero().eval(&ratio(3, 7)).is_zero());
        let rf = RootFormPoly::new(int(1), vec![int(1), int(2)]);
        assert_eq!(rf.expand().eval(&int(3)), int(2));
        assert_eq!(rf.eval(&int(3)), int(2));
        assert_eq!(rf.expand().degree(), Some(2));
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = UniPoly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::from_ints(&[0, 0]).degree(), None);
        let diff = &p - &p;
        assert!(diff.is_zero());
    }

    #[test]
    fn divrem_examples() {
        let k = UniPoly::from_ints(&[0, 1]);
        let (q, r) = UniPoly::from_ints(&[0, 0, 1]).divrem(&k).unwrap();
        assert_eq!(q, k);
        assert!(r.is_zero());

        let (q, r) = UniPoly::from_ints(&[1, 0, 1])
            .divrem(&UniPoly::from_ints(&[-1, 1]))
            .unwrap();
        assert_eq!(q, UniPoly::from_ints(&[1, 1]));
        assert_eq!(r, UniPoly::from_ints(&[2]));

        let p = UniPoly::from_ints(&[3, 1]);
        let (q, r) = p.divrem(&UniPoly::from_ints(&[0, 0, 5])).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, p);

        assert_eq!(p.divrem(&UniPoly::zero()), Err(Error::ZeroDivisor));
    }

    #[test]
    fn partial_fraction_examples() {
        let a = ratio(-7, 3);
        let one = partial_fractions(&a, 1);
        assert_eq!(one.poles.len(), 1);
        assert_eq!(one.poles[0].location, a);
        assert_eq!(one.poles[0].coefficient, int(1));

        let three = partial_fractions(&a, 3);
        let coeffs: Vec<_> = three.poles.iter().map(|p| p.coefficient.clone()).collect();
        assert_eq!(coeffs, vec![ratio(1, 2), int(-1), ratio(1, 2)]);
        let locs: Vec<_> = three.poles.iter().map(|p| p.location.clone()).collect();
        assert_eq!(locs, vec![a.clone(), &a + int(1), &a + int(2)]);

        let two = partial_fractions(&int(0), 2);
        let lhs = int(1) / falling_factorial(&int(3), 2);
        assert_eq!(lhs, ratio(1, 6));
        assert_eq!(two.eval(&int(3)), lhs);
    }

    #[test]
    fn residues_sum_to_zero() {
        for b in 2..10 {
            let total: Rational = partial_fractions(&ratio(5, 9), b)
                .poles
                .iter()
                .map(|p| p.coefficient.clone())
                .sum();
            assert!(total.is_zero());
        }
    }

    #[test]
    fn alternating_moment_examples() {
        assert!(alternating_moment(5, 3).is_zero());
        assert!(alternating_moment(3, 0).is_zero());
        assert_eq!(alternating_moment(3, 3), int(-6));
        for n in 1..=12u32 {
            for c in 0..n {
                assert!(alternating_moment(n, c).is_zero(), "n={n} c={c}");
            }
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(alternating_moment(n, n), int(sign) * factorial(n));
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(p, q)| ratio(p, q))
    }

    fn poly(max_deg: usize) -> impl Strategy<Value = UniPoly> {
        proptest::collection::vec(small_rational(), 0..=max_deg + 1).prop_map(UniPoly::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn divrem_round_trip(p in poly(12), g in poly(12)) {
            prop_assume!(!g.is_zero());
            let (q, r) = p.divrem(&g).unwrap();
            prop_assert_eq!(&(&g * &q) + &r, p);
            if let Some(dr) = r.degree() {
                prop_assert!(dr < g.degree().unwrap());
            }
        }

        #[test]
        fn partial_fractions_agree_pointwise(
            a in small_rational(),
            b in 1u32..=8,
            xs in proptest::collection::vec(small_rational(), 5),
        ) {
            let pf = partial_fractions(&a, b);
            for x in xs {
                let lhs_den = falling_factorial(&(&x - &a), b);
                prop_assume!(!lhs_den.is_zero());
                prop_assert_eq!(int(1) / lhs_den, pf.eval(&x));
            }
        }
    }
}
