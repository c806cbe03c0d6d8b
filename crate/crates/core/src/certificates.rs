//! Lower-bound certificates for minimizing `f_d(x) = (|x| + d - m - 1)^(falling 2d)`
//! over the cube with `n = 2m + 1` variables.
//!
//! The weighting [`z_solution`] is a positive combination of the single-pole
//! solutions [`y_alpha`]; it passes the PSD test at level `m + d - 1` while
//! the objective stays negative, so that level cannot be exact.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{
    binomial, binomial_int, double_factorial, factorial, falling_factorial, int, is_integer, pow,
    ratio, serde_rational, Rational,
};
use crate::moments::{
    build_moment_matrix, cross_check, moment_dimension, psd_exact, PsdVerdict, SymmetricAssignment,
    MAX_DIM,
};
use crate::symsos::{reduced_verdict, ReducedVerdict};
use crate::unipoly::UniPoly;

/// Odd `n = 2m + 1` with `1 <= d <= m`; the level under test is `t = m + d - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub t: usize,
}

impl Instance {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidInstance(format!("n = {n} must be odd")));
        }
        let m = (n - 1) / 2;
        if d == 0 || d > m {
            return Err(Error::InvalidInstance(format!(
                "d = {d} must lie in 1..={m} for n = {n}"
            )));
        }
        Ok(Self {
            n,
            m,
            d,
            t: m + d - 1,
        })
    }

    /// `n/2`.
    fn half_n(&self) -> Rational {
        ratio(self.n as i64, 2)
    }

    /// Pole of the `j`-th component solution, `n/2 + d - 1 - j`.
    pub fn pole(&self, j: usize) -> Rational {
        self.half_n() + int(self.d as i64 - 1 - j as i64)
    }

    /// Cardinalities `m-d+1 ..= m+d` on which the objective vanishes.
    pub fn middle_band(&self) -> std::ops::RangeInclusive<usize> {
        self.m + 1 - self.d..=self.m + self.d
    }

    /// `2(m + d - 1)`, the largest degree the identity of [`lemma4_identity`] admits.
    pub fn admissible_degree(&self) -> usize {
        2 * self.t
    }
}

pub fn f_d_eval(k: &Rational, inst: &Instance) -> Rational {
    let shift = int(inst.d as i64 - inst.m as i64 - 1);
    falling_factorial(&(k + shift), 2 * inst.d as u32)
}

/// `f_d` as a polynomial in the cardinality.
pub fn f_d_poly(inst: &Instance) -> UniPoly {
    let shift = int(inst.m as i64 + 1 - inst.d as i64);
    (0..2 * inst.d as i64).fold(UniPoly::constant(Rational::one()), |acc, i| {
        &acc * &UniPoly::linear(&(&shift + int(i)))
    })
}

/// `w_k = (n+1) C(α, n+1) (-1)^(n-k) / (α - k)`.
pub fn y_alpha(n: usize, alpha: &Rational) -> Result<SymmetricAssignment> {
    if is_integer(alpha) || !alpha.is_positive() || alpha > &int(n as i64) {
        return Err(Error::IntegralAlpha {
            alpha: crate::exactnum::format_rational(alpha),
        });
    }
    let scale = int(n as i64 + 1) * binomial(alpha, n as u32 + 1);
    let weights = (0..=n)
        .map(|k| {
            let sign = if (n - k).is_multiple_of(2) {
                int(1)
            } else {
                int(-1)
            };
            &scale * sign / (alpha - int(k as i64))
        })
        .collect();
    SymmetricAssignment::new(n, weights)
}

/// `z_k = (2d-2)! (n+1) C(n/2-d+1, n+1) (-1)^(n-k) / (n/2+d-1-k)^(falling 2d-1)`.
pub fn z_solution(inst: &Instance) -> SymmetricAssignment {
    let n = inst.n;
    let d = inst.d as i64;
    let scale = factorial(2 * inst.d as u32 - 2)
        * int(n as i64 + 1)
        * binomial(&(inst.half_n() - int(d - 1)), n as u32 + 1);
    let weights = (0..=n)
        .map(|k| {
            let sign = if (n - k).is_multiple_of(2) {
                int(1)
            } else {
                int(-1)
            };
            let den = falling_factorial(&(inst.pole(k)), 2 * inst.d as u32 - 1);
            &scale * sign / den
        })
        .collect();
    SymmetricAssignment { n, weights }
}

/// `a_j = C(2d-2, j) (n/2+d-1)^(falling j) / (n/2-d+1+j)^(falling j)`, `j = 0..=2d-2`.
pub fn decomposition_coeffs(inst: &Instance) -> Vec<Rational> {
    let d = inst.d as i64;
    let top = inst.half_n() + int(d - 1);
    (0..=2 * inst.d - 2)
        .map(|j| {
            let ju = j as u32;
            binomial_int(2 * inst.d as u64 - 2, j as u64) * falling_factorial(&top, ju)
                / falling_factorial(&(inst.half_n() - int(d - 1) + int(j as i64)), ju)
        })
        .collect()
}

/// Checks `z_k = sum_j a_j y[n/2+d-1-j]_k` for every cardinality.
pub fn decomposition_holds(inst: &Instance) -> Result<bool> {
    let z = z_solution(inst);
    let coeffs = decomposition_coeffs(inst);
    let mut combined = vec![Rational::zero(); inst.n + 1];
    for (j, a) in coeffs.iter().enumerate() {
        let y = y_alpha(inst.n, &inst.pole(j))?;
        for (c, yk) in combined.iter_mut().zip(&y.weights) {
            *c += a * yk;
        }
    }
    Ok(combined == z.weights && coeffs.iter().all(|a| a.is_positive()))
}

/// Rescales to unit mass `sum_k C(n,k) w_k = 1`.
pub fn normalize(w: &SymmetricAssignment) -> Result<SymmetricAssignment> {
    let s = w.mass();
    if !s.is_positive() {
        return Err(Error::NonPositiveNormalization {
            sum: crate::exactnum::format_rational(&s),
        });
    }
    Ok(w.scaled(&(Rational::one() / s)))
}

/// `sum_k C(n,k) w_k f_d(k)`.
pub fn objective_value(w: &SymmetricAssignment, inst: &Instance) -> Rational {
    w.weights
        .iter()
        .enumerate()
        .map(|(k, wk)| binomial_int(w.n as u64, k as u64) * wk * f_d_eval(&int(k as i64), inst))
        .sum()
}

/// `g(d,n)` as the finite sum `sum_j a_j (2d - 3/2 - j)^(falling 2d)`.
pub fn g_sum_form(d: usize, n: usize) -> Result<Rational> {
    g_sum_form_to(d, n, 2 * d - 2)
}

/// The same sum carried up to `last` (terms past `2d-2` vanish).
pub fn g_sum_form_to(d: usize, n: usize, last: usize) -> Result<Rational> {
    let inst = Instance::new(n, d)?;
    let half_n = ratio(n as i64, 2);
    let di = d as i64;
    Ok((0..=last)
        .map(|j| {
            let ju = j as u32;
            let coeff = binomial(&int(2 * di - 2), ju)
                * falling_factorial(&(&half_n + int(di - 1)), ju)
                / falling_factorial(&(&half_n - int(di - 1) + int(j as i64)), ju);
            let point = ratio(4 * di - 3 - 2 * j as i64, 2);
            debug_assert_eq!(point, inst.pole(j) + int(di - inst.m as i64 - 1));
            coeff * falling_factorial(&point, 2 * d as u32)
        })
        .sum())
}

/// Closed form of `g(d,n)` through double factorials.
pub fn g_closed_form(d: usize, n: usize) -> Result<Rational> {
    let inst = Instance::new(n, d)?;
    let (m, di) = (inst.m as i64, d as i64);
    let lead = falling_factorial(&ratio(4 * di - 3, 2), 2 * d as u32);
    let d_part =
        pow(&int(4), d as u32 - 1) * factorial(2 * d as u32 - 2) * double_factorial(2 * di - 1)
            / (factorial(d as u32 - 1) * double_factorial(4 * di - 3));
    let m_part = double_factorial(2 * m - 2 * di + 3) * factorial(inst.m as u32 - 1)
        / (factorial((inst.m - d) as u32) * double_factorial(2 * m + 1));
    Ok(lead * d_part * m_part)
}

/// Both sides of `sum_k C(n,k) w_k P(k) = sum_j a_j P(n/2+d-1-j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySides {
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

impl IdentitySides {
    pub fn agree(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates the remainder identity for `z_solution(inst)`; `P` must have
/// degree at most `2(m+d-1)`.
pub fn lemma4_identity(p: &UniPoly, inst: &Instance) -> Result<IdentitySides> {
    lemma4_identity_with(&z_solution(inst), p, inst)
}

pub fn lemma4_identity_with(
    w: &SymmetricAssignment,
    p: &UniPoly,
    inst: &Instance,
) -> Result<IdentitySides> {
    let degree = p.degree().unwrap_or(0);
    if degree > inst.admissible_degree() {
        return Err(Error::DegreeTooLarge {
            degree,
            bound: inst.admissible_degree(),
        });
    }
    Ok(identity_sides(w, p, inst))
}

fn identity_sides(w: &SymmetricAssignment, p: &UniPoly, inst: &Instance) -> IdentitySides {
    let lhs = w
        .weights
        .iter()
        .enumerate()
        .map(|(k, wk)| binomial_int(w.n as u64, k as u64) * wk * p.eval(&int(k as i64)))
        .sum();
    let rhs = decomposition_coeffs(inst)
        .iter()
        .enumerate()
        .map(|(j, a)| a * p.eval(&inst.pole(j)))
        .sum();
    IdentitySides { lhs, rhs }
}

/// `(n/2+d-1-k)^(falling 2d-1)`, the common denominator of `z_k` up to sign.
pub fn pole_poly(inst: &Instance) -> UniPoly {
    let top = inst.pole(0);
    (0..2 * inst.d as i64 - 1).fold(UniPoly::constant(Rational::one()), |acc, i| {
        &acc * &UniPoly::new(vec![&top - int(i), -Rational::one()])
    })
}

/// The identity one degree past its range: `P(k) = pole_poly(k) k^n` has
/// degree `2(m+d)`, the right side vanishes and the left side does not.
pub fn lemma4_tightness_probe(inst: &Instance) -> (UniPoly, IdentitySides) {
    let p = &pole_poly(inst) * &UniPoly::monomial(Rational::one(), inst.n);
    let sides = identity_sides(&z_solution(inst), &p, inst);
    (p, sides)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub skip_bruteforce: bool,
    /// Brute-force PSD runs only when the moment matrix is at most this large.
    pub bruteforce_max_dim: usize,
    pub float_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            skip_bruteforce: false,
            bruteforce_max_dim: MAX_DIM,
            float_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceCheck {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<PsdVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    /// Float screen disagreed with the exact verdict.
    pub conditioning_warning: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub instance: Instance,
    #[serde(with = "serde_rational::vec")]
    pub z: Vec<Rational>,
    #[serde(with = "serde_rational::vec")]
    pub decomposition_coeffs: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub normalization_sum: Rational,
    #[serde(with = "serde_rational")]
    pub objective_raw: Rational,
    #[serde(with = "serde_rational")]
    pub objective_normalized: Rational,
    #[serde(with = "serde_rational")]
    pub g_sum: Rational,
    #[serde(with = "serde_rational")]
    pub g_closed: Rational,
    pub middle_band_positive: bool,
    pub decomposition_verified: bool,
    pub reduced_psd: ReducedVerdict,
    pub bruteforce_psd: BruteForceCheck,
    pub pass: bool,
}

pub fn verify_theorem2(inst: &Instance, opts: &VerifyOptions) -> Result<CertificateReport> {
    let z = z_solution(inst);
    let middle_band_positive = inst.middle_band().all(|k| z.weights[k].is_positive());
    let decomposition_verified = decomposition_holds(inst)?;
    let normalization_sum = z.mass();
    let objective_raw = objective_value(&z, inst);
    let objective_normalized = if normalization_sum.is_positive() {
        &objective_raw / &normalization_sum
    } else {
        objective_raw.clone()
    };
    let g_sum = g_sum_form(inst.d, inst.n)?;
    let g_closed = g_closed_form(inst.d, inst.n)?;
    let reduced_psd = reduced_verdict(&z, inst.t)?;

    let dimension = moment_dimension(inst.n, inst.t);
    let bruteforce_psd = if opts.skip_bruteforce {
        BruteForceCheck {
            dimension,
            verdict: None,
            skipped: Some("skipped on request".into()),
            conditioning_warning: false,
        }
    } else if dimension > opts.bruteforce_max_dim.min(MAX_DIM) {
        BruteForceCheck {
            dimension,
            verdict: None,
            skipped: Some(format!(
                "dimension {dimension} exceeds limit {}",
                opts.bruteforce_max_dim.min(MAX_DIM)
            )),
            conditioning_warning: false,
        }
    } else {
        let m = build_moment_matrix(&z, inst.t)?;
        let verdict = psd_exact(&m)?;
        let float = cross_check(&m.entries, opts.float_tol)?;
        BruteForceCheck {
            dimension,
            conditioning_warning: float.float != verdict.is_psd,
            verdict: Some(verdict),
            skipped: None,
        }
    };

    let pass = middle_band_positive
        && decomposition_verified
        && normalization_sum.is_positive()
        && reduced_psd.is_psd
        && bruteforce_psd.verdict.as_ref().is_none_or(|v| v.is_psd)
        && objective_raw == g_closed
        && g_sum == g_closed
        && g_closed.is_negative();

    Ok(CertificateReport {
        instance: *inst,
        z: z.weights,
        decomposition_coeffs: decomposition_coeffs(inst),
        normalization_sum,
        objective_raw,
        objective_normalized,
        g_sum,
        g_closed,
        middle_band_positive,
        decomposition_verified,
        reduced_psd,
        bruteforce_psd,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::half;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instance_validation() {
        assert!(Instance::new(6, 1).is_err());
        assert!(Instance::new(5, 0).is_err());
        assert!(Instance::new(5, 3).is_err());
        let i = Instance::new(7, 2).unwrap();
        assert_eq!((i.m, i.t), (3, 4));
        // t = ceil((n + 2d - 1)/2) - 1
        assert_eq!(i.t, (i.n + 2 * i.d - 1).div_ceil(2) - 1);
    }

    #[test]
    fn f_d_examples() {
        for n in [3usize, 5, 7, 9, 11] {
            for d in 1..=(n - 1) / 2 {
                let inst = Instance::new(n, d).unwrap();
                let (m, d) = (inst.m as i64, d as i64);
                assert!(f_d_eval(&int(m - d + 1), &inst).is_zero());
                assert!(f_d_eval(&int(m + d), &inst).is_zero());
                assert_eq!(f_d_eval(&int(m + d + 1), &inst), factorial(2 * d as u32));
                let poly = f_d_poly(&inst);
                for k in 0..=n as i64 {
                    assert_eq!(poly.eval(&int(k)), f_d_eval(&int(k), &inst));
                }
            }
            let inst = Instance::new(n, 1).unwrap();
            assert_eq!(f_d_eval(&ratio(n as i64, 2), &inst), ratio(-1, 4));
        }
    }

    #[test]
    fn max_cut_link() {
        for n in (3..=11usize).step_by(2) {
            let inst = Instance::new(n, 1).unwrap();
            let mm1 = int((inst.m * (inst.m + 1)) as i64);
            for k in 0..=n as i64 {
                assert_eq!(&mm1 - f_d_eval(&int(k), &inst), int(k * (n as i64 - k)));
            }
        }
    }

    #[test]
    fn y_alpha_examples() {
        let y = y_alpha(5, &ratio(5, 2)).unwrap();
        assert_eq!(y.weights[0], ratio(3, 256));
        for n in [3usize, 5, 7, 9] {
            let inst = Instance::new(n, 1).unwrap();
            for (p, q) in [(1, 2), (7, 3), (2 * n as i64 - 1, 2), (5, 4)] {
                let alpha = ratio(p, q);
                if alpha > int(n as i64) {
                    continue;
                }
                let y = y_alpha(n, &alpha).unwrap();
                assert_eq!(y.mass(), int(1));
                assert_eq!(objective_value(&y, &inst), f_d_eval(&alpha, &inst));
            }
        }
        assert!(y_alpha(5, &int(2)).is_err());
        assert!(y_alpha(5, &ratio(11, 2)).is_err());
        assert!(y_alpha(5, &ratio(-1, 2)).is_err());
    }

    #[test]
    fn z_solution_examples() {
        for n in (3..=13usize).step_by(2) {
            let half_n = ratio(n as i64, 2);
            let inst = Instance::new(n, 1).unwrap();
            assert_eq!(z_solution(&inst), y_alpha(n, &half_n).unwrap());
            assert_eq!(objective_value(&z_solution(&inst), &inst), ratio(-1, 4));
            for d in 1..=(n - 1) / 2 {
                let inst = Instance::new(n, d).unwrap();
                let z = z_solution(&inst);
                assert!(inst.middle_band().all(|k| z.weights[k].is_positive()));
                assert!(z.mass().is_positive());
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(
            decomposition_coeffs(&Instance::new(7, 1).unwrap()),
            vec![int(1)]
        );
        for n in (3..=15usize).step_by(2) {
            for d in 1..=(n - 1) / 2 {
                let inst = Instance::new(n, d).unwrap();
                assert!(decomposition_coeffs(&inst).iter().all(|a| a.is_positive()));
                if n <= 13 {
                    assert!(decomposition_holds(&inst).unwrap(), "n={n} d={d}");
                }
            }
        }
    }

    /// Solves `z = sum_j a_j y[pole_j]` on `2d-1` cardinalities by Gaussian
    /// elimination, independent of the closed form.
    #[allow(clippy::needless_range_loop)]
    fn solve_coeffs(inst: &Instance) -> Vec<Rational> {
        let size = 2 * inst.d - 1;
        let z = z_solution(inst);
        let ys: Vec<SymmetricAssignment> = (0..size)
            .map(|j| y_alpha(inst.n, &inst.pole(j)).unwrap())
            .collect();
        let mut rows: Vec<Vec<Rational>> = (0..size)
            .map(|k| {
                let mut r: Vec<Rational> = ys.iter().map(|y| y.weights[k].clone()).collect();
                r.push(z.weights[k].clone());
                r
            })
            .collect();
        for col in 0..size {
            let piv = (col..size).find(|&r| !rows[r][col].is_zero()).unwrap();
            rows.swap(col, piv);
            let lead = rows[col][col].clone();
            for x in rows[col].iter_mut() {
                *x /= &lead;
            }
            for r in 0..size {
                if r != col && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in col..=size {
                        let sub = &f * &rows[col][c];
                        rows[r][c] -= sub;
                    }
                }
            }
        }
        rows.into_iter().map(|r| r[size].clone()).collect()
    }

    #[test]
    fn decomposition_matches_linear_solve() {
        for (n, d) in [(5, 2), (7, 3), (9, 2)] {
            let inst = Instance::new(n, d).unwrap();
            assert_eq!(solve_coeffs(&inst), decomposition_coeffs(&inst));
        }
    }

    #[test]
    fn normalization() {
        let inst = Instance::new(7, 2).unwrap();
        let z = z_solution(&inst);
        let nz = normalize(&z).unwrap();
        assert_eq!(nz.mass(), int(1));
        assert_eq!(normalize(&nz).unwrap(), nz);
        assert_eq!(normalize(&z.scaled(&int(7))).unwrap(), nz);
        assert_eq!(
            objective_value(&nz, &inst),
            objective_value(&z, &inst) / z.mass()
        );
        assert!(normalize(&z.scaled(&int(-1))).is_err());
        assert!(normalize(&SymmetricAssignment::uniform(3, int(0))).is_err());
    }

    #[test]
    fn objective_examples() {
        let inst = Instance::new(9, 1).unwrap();
        let y = y_alpha(9, &ratio(9, 2)).unwrap();
        assert_eq!(objective_value(&y, &inst), ratio(-1, 4));
        let mut w = vec![int(0); 10];
        w[inst.m] = int(1);
        assert!(objective_value(&SymmetricAssignment::new(9, w).unwrap(), &inst).is_zero());
        for n in (3..=11usize).step_by(2) {
            for d in 1..=(n - 1) / 2 {
                let inst = Instance::new(n, d).unwrap();
                assert_eq!(
                    objective_value(&z_solution(&inst), &inst),
                    g_closed_form(d, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn g_forms() {
        for n in (3..=21usize).step_by(2) {
            assert_eq!(g_sum_form(1, n).unwrap(), ratio(-1, 4));
            assert_eq!(g_closed_form(1, n).unwrap(), ratio(-1, 4));
        }
        for d in 1..=5usize {
            for m in d..=10 {
                let n = 2 * m + 1;
                let s = g_sum_form(d, n).unwrap();
                assert_eq!(s, g_closed_form(d, n).unwrap(), "d={d} n={n}");
                assert_eq!(g_sum_form_to(d, n, 4 * d).unwrap(), s);
            }
        }
        for d in 1..=6usize {
            for m in d..=12 {
                assert!(g_closed_form(d, 2 * m + 1).unwrap().is_negative());
            }
        }
        assert!(g_sum_form(3, 5).is_err());
    }

    #[test]
    fn remainder_identity_examples() {
        let inst = Instance::new(7, 2).unwrap();
        let one = lemma4_identity(&UniPoly::constant(int(1)), &inst).unwrap();
        assert!(one.agree());
        let a_sum: Rational = decomposition_coeffs(&inst).iter().sum();
        assert_eq!(one.lhs, a_sum);
        assert_eq!(one.lhs, z_solution(&inst).mass());

        let fd = lemma4_identity(&f_d_poly(&inst), &inst).unwrap();
        assert!(fd.agree());
        assert_eq!(fd.lhs, g_closed_form(2, 7).unwrap());

        let too_big = UniPoly::monomial(int(1), inst.admissible_degree() + 1);
        assert!(matches!(
            lemma4_identity(&too_big, &inst),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn remainder_identity_tightness() {
        for n in (3..=11usize).step_by(2) {
            for d in 1..=(n - 1) / 2 {
                let inst = Instance::new(n, d).unwrap();
                let (p, sides) = lemma4_tightness_probe(&inst);
                assert_eq!(p.degree(), Some(2 * (inst.m + d)));
                assert!(sides.rhs.is_zero());
                assert!(!sides.lhs.is_zero());
            }
        }
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> UniPoly {
        UniPoly::new(
            (0..=deg)
                .map(|_| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect(),
        )
    }

    #[test]
    fn squares_stay_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = [5usize, 7, 9][rng.gen_range(0..3)];
            let d = rng.gen_range(1..=(n - 1) / 2);
            let inst = Instance::new(n, d).unwrap();
            let lo = int(inst.m as i64 - d as i64 + 1);
            let hi = int((inst.m + d) as i64);
            let s = &UniPoly::linear(&lo) * &UniPoly::new(vec![hi, int(-1)]);
            let sigma = random_poly(&mut rng, inst.t);
            let tau = random_poly(&mut rng, inst.t - 1);
            let p = &(&sigma * &sigma) + &(&s * &(&tau * &tau));
            let sides = lemma4_identity(&p, &inst).unwrap();
            assert!(sides.agree());
            assert!(!sides.lhs.is_negative());
        }
        let _ = half();
    }

    #[test]
    fn verify_small_instances() {
        for (n, d) in [(3, 1), (5, 1), (5, 2), (7, 1), (7, 2), (7, 3)] {
            let inst = Instance::new(n, d).unwrap();
            let r = verify_theorem2(&inst, &VerifyOptions::default()).unwrap();
            assert!(r.pass, "n={n} d={d}: {r:?}");
            assert!(r.bruteforce_psd.verdict.as_ref().unwrap().is_psd);
        }
        let r = verify_theorem2(&Instance::new(5, 1).unwrap(), &VerifyOptions::default()).unwrap();
        assert_eq!(r.objective_raw, ratio(-1, 4));
        assert_eq!(r.instance.t, 2);
        let skipped = verify_theorem2(
            &Instance::new(5, 2).unwrap(),
            &VerifyOptions {
                skip_bruteforce: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(skipped.pass && skipped.bruteforce_psd.verdict.is_none());
    }
}
