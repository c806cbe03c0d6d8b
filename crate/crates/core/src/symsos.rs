//! Symmetry-reduced PSD criterion.
//!
//! For a symmetric weighting `w_0..w_n` the level-`t` moment matrix is PSD as
//! soon as `sum_{k=h}^{n-h} C(n,k) w_k G_h(k) >= 0` for every polynomial
//! `G_h` of degree at most `2t` that vanishes on `{0..h-1} ∪ {n-h+1..n}` and
//! is nonnegative on `[h-1, n-h+1]`.
//!
//! Every such `G_h` factors as `Π_h (p² + s q²)` with
//! `Π_h(k) = prod_{i<h} (k-i)(n-i-k)` and `s(k) = (k-h+1)(n-h+1-k)`
//! (Markov–Lukács on the interval), so the universally quantified condition
//! is equivalent to two Hankel matrices being PSD for each `h`:
//!
//! ```text
//! A_h[i][j] = sum_k C(n,k) w_k Π_h(k)        k^(i+j),   0 <= i,j <= t-h
//! B_h[i][j] = sum_k C(n,k) w_k Π_h(k) s(k)   k^(i+j),   0 <= i,j <  t-h
//! ```
//!
//! Levels `h > floor(n/2)` impose nothing and are skipped.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{binomial_int, int, pow, serde_rational, Rational};
use crate::moments::{psd_exact_dense, PsdVerdict, SymmetricAssignment};
use crate::unipoly::UniPoly;

/// `Π_h(k) = prod_{i=0}^{h-1} (k - i)(n - i - k)`.
pub fn zero_set_poly(n: usize, h: usize) -> UniPoly {
    (0..h).fold(UniPoly::constant(Rational::one()), |acc, i| {
        let left = UniPoly::linear(&int(i as i64));
        let right = UniPoly::from_ints(&[(n - i) as i64, -1]);
        &(&acc * &left) * &right
    })
}

/// `s(k) = (k - h + 1)(n - h + 1 - k)`, nonnegative exactly on `[h-1, n-h+1]`.
pub fn interval_poly(n: usize, h: usize) -> UniPoly {
    let left = UniPoly::from_ints(&[1 - h as i64, 1]);
    let right = UniPoly::from_ints(&[(n + 1 - h) as i64, -1]);
    &left * &right
}

fn zero_set_value(n: usize, h: usize, k: usize) -> Rational {
    (0..h).fold(Rational::one(), |acc, i| {
        acc * int(k as i64 - i as i64) * int(n as i64 - i as i64 - k as i64)
    })
}

fn interval_value(n: usize, h: usize, k: usize) -> Rational {
    int(k as i64 - h as i64 + 1) * int(n as i64 - h as i64 + 1 - k as i64)
}

/// A member `Π_h (p² + s q²)` of the test family at level `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GPolySpec {
    pub n: usize,
    pub t: usize,
    pub h: usize,
    pub sigma_p: UniPoly,
    pub sigma_q: UniPoly,
}

/// Outcome of checking the three membership conditions symbolically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub degree_ok: bool,
    pub zeros_ok: bool,
    pub divisible_by_zero_set: bool,
    pub nonnegative_on_interval: bool,
}

impl Membership {
    pub fn holds(&self) -> bool {
        self.degree_ok
            && self.zeros_ok
            && self.divisible_by_zero_set
            && self.nonnegative_on_interval
    }
}

impl GPolySpec {
    pub fn constant_one(n: usize, t: usize) -> Self {
        Self {
            n,
            t,
            h: 0,
            sigma_p: UniPoly::constant(Rational::one()),
            sigma_q: UniPoly::zero(),
        }
    }

    pub fn expand(&self) -> UniPoly {
        let inner = &(&self.sigma_p * &self.sigma_p)
            + &(&interval_poly(self.n, self.h) * &(&self.sigma_q * &self.sigma_q));
        &zero_set_poly(self.n, self.h) * &inner
    }

    pub fn eval(&self, k: &Rational) -> Rational {
        let p = self.sigma_p.eval(k);
        let q = self.sigma_q.eval(k);
        zero_set_poly(self.n, self.h).eval(k)
            * (&p * &p + interval_poly(self.n, self.h).eval(k) * &q * &q)
    }

    /// Checks degree, the prescribed integer zeros, divisibility by `Π_h` and
    /// the square-form certificate of nonnegativity on `[h-1, n-h+1]`.
    pub fn verify_membership(&self) -> Membership {
        let g = self.expand();
        let degree_ok = g.degree().is_none_or(|d| d <= 2 * self.t) && self.h <= self.t;
        let zeros: Vec<usize> = if self.h == 0 {
            Vec::new()
        } else {
            (0..self.h).chain(self.n + 1 - self.h..=self.n).collect()
        };
        let zeros_ok = zeros.iter().all(|&k| g.eval(&int(k as i64)).is_zero());
        let divisible_by_zero_set = g
            .divrem(&zero_set_poly(self.n, self.h))
            .map(|(_, r)| r.is_zero())
            .unwrap_or(false);
        // p² + s q² is a certificate as long as s >= 0 on the interval, which
        // holds for the fixed factor s; sample the interval as a cross-check.
        let lo = self.h as i64 * 2 - 2;
        let hi = (self.n as i64 - self.h as i64 + 1) * 2;
        let nonnegative_on_interval = self.n + 1 >= 2 * self.h
            && (lo..=hi).all(|twice| !g.eval(&Rational::new(twice.into(), 2.into())).is_negative());
        Membership {
            degree_ok,
            zeros_ok,
            divisible_by_zero_set,
            nonnegative_on_interval,
        }
    }
}

/// Left-hand side `sum_{k=h}^{n-h} C(n,k) w_k G_h(k)`.
pub fn eval_condition(w: &SymmetricAssignment, g: &GPolySpec) -> Rational {
    let n = w.n;
    if 2 * g.h > n {
        return Rational::zero();
    }
    (g.h..=n - g.h)
        .map(|k| binomial_int(n as u64, k as u64) * &w.weights[k] * g.eval(&int(k as i64)))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelBlock {
    pub h: usize,
    #[serde(with = "serde_rational::matrix")]
    pub a: Vec<Vec<Rational>>,
    /// Empty when `t == h`.
    #[serde(with = "serde_rational::matrix")]
    pub b: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedCriterion {
    pub n: usize,
    pub t: usize,
    pub blocks: Vec<HankelBlock>,
}

pub fn build_reduced(w: &SymmetricAssignment, t: usize) -> Result<ReducedCriterion> {
    let n = w.n;
    if t == 0 || t > n {
        return Err(Error::InvalidLevel { t, n });
    }
    let hankel = |mass: &[Rational], size: usize| -> Vec<Vec<Rational>> {
        (0..size)
            .map(|i| (0..size).map(|j| mass[i + j].clone()).collect())
            .collect()
    };
    let blocks = (0..=t.min(n / 2))
        .map(|h| {
            let span = t - h;
            let mut mom_a = vec![Rational::zero(); 2 * span + 1];
            let mut mom_b = vec![Rational::zero(); 2 * span + 1];
            for k in h..=n - h {
                let base =
                    binomial_int(n as u64, k as u64) * &w.weights[k] * zero_set_value(n, h, k);
                if base.is_zero() {
                    continue;
                }
                let with_s = &base * interval_value(n, h, k);
                let kk = int(k as i64);
                for e in 0..=2 * span {
                    let ke = pow(&kk, e as u32);
                    mom_a[e] += &base * &ke;
                    mom_b[e] += &with_s * &ke;
                }
            }
            HankelBlock {
                h,
                a: hankel(&mom_a, span + 1),
                b: hankel(&mom_b, span),
            }
        })
        .collect();
    Ok(ReducedCriterion { n, t, blocks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HankelKind {
    /// the `p²` part
    A,
    /// the `s q²` part
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedFailure {
    pub h: usize,
    pub matrix: HankelKind,
    pub verdict: PsdVerdict,
    /// Explicit member of the test family with a negative condition value.
    pub violating: GPolySpec,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedVerdict {
    pub is_psd: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<ReducedFailure>,
}

/// Runs the exact PSD test on every block, stopping at the first failure.
pub fn check_reduced(c: &ReducedCriterion) -> Result<ReducedVerdict> {
    for block in &c.blocks {
        for (kind, m) in [(HankelKind::A, &block.a), (HankelKind::B, &block.b)] {
            let verdict = psd_exact_dense(m)?;
            if verdict.is_psd {
                continue;
            }
            let poly = UniPoly::new(verdict.witness.clone());
            let (sigma_p, sigma_q) = match kind {
                HankelKind::A => (poly, UniPoly::zero()),
                HankelKind::B => (UniPoly::zero(), poly),
            };
            let violating = GPolySpec {
                n: c.n,
                t: c.t,
                h: block.h,
                sigma_p,
                sigma_q,
            };
            let value = verdict
                .witness_value
                .clone()
                .expect("failed verdict has a value");
            return Ok(ReducedVerdict {
                is_psd: false,
                failure: Some(ReducedFailure {
                    h: block.h,
                    matrix: kind,
                    verdict,
                    violating,
                    value,
                }),
            });
        }
    }
    Ok(ReducedVerdict {
        is_psd: true,
        failure: None,
    })
}

/// `build_reduced` followed by `check_reduced`.
pub fn reduced_verdict(w: &SymmetricAssignment, t: usize) -> Result<ReducedVerdict> {
    check_reduced(&build_reduced(w, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;
    use crate::moments::{build_moment_matrix, psd_exact};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_three_variables_level_one() {
        let w = SymmetricAssignment::uniform(3, ratio(1, 8));
        let c = build_reduced(&w, 1).unwrap();
        // oracle: direct summation of C(3,k) k^e / 8
        let mass = |e: u32| -> Rational {
            (0..=3u64)
                .map(|k| binomial_int(3, k) * pow(&int(k as i64), e) / int(8))
                .sum()
        };
        assert_eq!(mass(0), int(1));
        assert_eq!(mass(1), ratio(3, 2));
        assert_eq!(mass(2), int(3));
        assert_eq!(
            c.blocks[0].a,
            vec![vec![int(1), ratio(3, 2)], vec![ratio(3, 2), int(3)]]
        );
        assert_eq!(c.blocks.len(), 2);
        assert!(c.blocks[1].b.is_empty());
    }

    #[test]
    fn skips_trivial_levels() {
        let w = SymmetricAssignment::uniform(5, int(1));
        let c = build_reduced(&w, 4).unwrap();
        let hs: Vec<usize> = c.blocks.iter().map(|b| b.h).collect();
        assert_eq!(hs, vec![0, 1, 2]);
    }

    #[test]
    fn zero_weights_give_zero_blocks() {
        let c = build_reduced(&SymmetricAssignment::uniform(4, int(0)), 3).unwrap();
        for b in &c.blocks {
            assert!(b.a.iter().chain(&b.b).flatten().all(|x| x.is_zero()));
        }
        assert!(check_reduced(&c).unwrap().is_psd);
    }

    #[test]
    fn invalid_levels() {
        let w = SymmetricAssignment::uniform(3, int(1));
        assert!(build_reduced(&w, 0).is_err());
        assert!(build_reduced(&w, 4).is_err());
    }

    #[test]
    fn uniform_weights_pass() {
        for n in 1..=9 {
            for t in 1..=(n / 2).max(1) {
                let w = SymmetricAssignment::uniform(n, ratio(1, 1 << n));
                assert!(reduced_verdict(&w, t).unwrap().is_psd, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn negative_empty_set_mass_fails_with_constant() {
        let mut weights = vec![int(0); 4];
        weights[0] = int(-1);
        let w = SymmetricAssignment::new(3, weights).unwrap();
        let v = reduced_verdict(&w, 1).unwrap();
        assert!(!v.is_psd);
        let f = v.failure.unwrap();
        assert_eq!(f.h, 0);
        assert_eq!(f.matrix, HankelKind::A);
        // G_0 = p² with p(0) != 0
        assert!(!f.violating.sigma_p.eval(&int(0)).is_zero());
        assert!(eval_condition(&w, &f.violating).is_negative());
        assert_eq!(eval_condition(&w, &GPolySpec::constant_one(3, 1)), int(-1));
    }

    #[test]
    fn constant_member_gives_total_mass() {
        let w = SymmetricAssignment::new(4, (0..5).map(|k| ratio(k - 2, 3)).collect()).unwrap();
        assert_eq!(eval_condition(&w, &GPolySpec::constant_one(4, 2)), w.mass());
    }

    #[test]
    fn zero_set_members_ignore_empty_set_weight() {
        let n = 6;
        let g = GPolySpec {
            n,
            t: 3,
            h: 1,
            sigma_p: UniPoly::from_ints(&[2, -1, 1]),
            sigma_q: UniPoly::from_ints(&[1, 3]),
        };
        assert!(g.verify_membership().holds());
        let mut weights: Vec<Rational> = (0..=n).map(|k| ratio(k as i64 + 1, 5)).collect();
        let before = eval_condition(&SymmetricAssignment::new(n, weights.clone()).unwrap(), &g);
        weights[0] = int(-1000);
        let after = eval_condition(&SymmetricAssignment::new(n, weights).unwrap(), &g);
        assert_eq!(before, after);
    }

    #[test]
    fn membership_detects_violations() {
        let g = GPolySpec {
            n: 5,
            t: 1,
            h: 1,
            sigma_p: UniPoly::from_ints(&[0, 1]),
            sigma_q: UniPoly::zero(),
        };
        // degree 4 > 2t
        assert!(!g.verify_membership().degree_ok);
    }

    fn random_assignment(rng: &mut ChaCha8Rng, n: usize) -> SymmetricAssignment {
        let weights = (0..=n)
            .map(|_| ratio(rng.gen_range(-3..=12), rng.gen_range(1..=4)))
            .collect();
        SymmetricAssignment::new(n, weights).unwrap()
    }

    #[test]
    fn failures_reconstruct_valid_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut failures = 0;
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let t = rng.gen_range(1..=n.min(4));
            let w = random_assignment(&mut rng, n);
            let v = reduced_verdict(&w, t).unwrap();
            if let Some(f) = v.failure {
                failures += 1;
                assert!(f.violating.verify_membership().holds());
                let value = eval_condition(&w, &f.violating);
                assert!(value.is_negative());
                assert_eq!(value, f.value);
            }
        }
        assert!(failures > 5);
    }

    #[test]
    fn reduced_pass_implies_full_psd_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let t = rng.gen_range(1..=n.min(3));
            let w = random_assignment(&mut rng, n);
            let reduced = reduced_verdict(&w, t).unwrap().is_psd;
            let full = psd_exact(&build_moment_matrix(&w, t).unwrap())
                .unwrap()
                .is_psd;
            if reduced {
                assert!(full);
            }
        }
    }
}
