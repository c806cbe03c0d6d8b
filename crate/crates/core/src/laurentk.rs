//! SoS rank of the polytope `K` with constraints
//! `sum_{r in R} x_r + sum_{r in N \ R} (1 - x_r) >= 1/2` for all `R ⊆ N`,
//! which has no integer points.
//!
//! The constraint for `R` evaluated at the cube point `x_I` equals
//! `|N \ (R △ I)| - 1/2`. Flipping coordinates maps constraints onto each
//! other, so the uniform solution `y_I = 2^-n` is feasible at level `t`
//! whenever anything is, and only the `R = N` constraint, with symmetric
//! weights `(k - 1/2) / 2^n`, has to be examined. Its PSD condition is
//! decided exactly by the reduced Hankel criterion.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{
    binomial_int, falling_factorial, from_f64, half, int, pow, serde_rational, sqrt_exact, to_f64,
    Rational,
};
use crate::moments::{Subset, SymmetricAssignment};
use crate::symsos::{reduced_verdict, ReducedVerdict};

/// Wording attached to every rank value.
pub const RANK_STATUS: &str = "exact under cited-iff assumption";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeK {
    pub n: usize,
}

impl PolytopeK {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn constraint_value(&self, r: Subset, i: Subset) -> Rational {
        constraint_value(r, i, self.n)
    }

    /// Values of the `R = N` constraint per cardinality: `k - 1/2`.
    pub fn full_constraint_by_cardinality(&self) -> Vec<Rational> {
        (0..=self.n).map(|k| int(k as i64) - half()).collect()
    }

    /// The uniform solution `y_I = 2^-n`.
    pub fn uniform_solution(&self) -> SymmetricAssignment {
        SymmetricAssignment::uniform(
            self.n,
            Rational::new(1.into(), pow(&int(2), self.n as u32).to_integer()),
        )
    }

    /// Weights `(k - 1/2) / 2^n` of the `R = N` constraint matrix.
    pub fn constraint_assignment(&self) -> SymmetricAssignment {
        self.uniform_solution()
            .times(&self.full_constraint_by_cardinality())
            .expect("lengths agree")
    }
}

/// `g_R(x_I) = |N \ (R △ I)| - 1/2`.
pub fn constraint_value(r: Subset, i: Subset, n: usize) -> Rational {
    let outside = n - r.sym_diff(i).len();
    int(outside as i64) - half()
}

/// Whether the uniform solution survives level `t` (reduced criterion on the
/// `R = N` constraint).
pub fn symmetric_feasibility(n: usize, t: usize) -> Result<ReducedVerdict> {
    if t == 0 || t > n {
        return Err(Error::InvalidLevel { t, n });
    }
    reduced_verdict(&PolytopeK::new(n).constraint_assignment(), t)
}

/// Margin of the fixed polynomial with roots `n, n-1, ..., n-t+1`:
/// `sum_{k=1}^{n-t} C(n,k) (k - 1/2) ((n-t)^(falling k) / n^(falling k))^2 - 1/2`.
///
/// A negative margin proves the uniform solution infeasible at level `t`.
pub fn upper_bound_certificate(n: usize, t: usize) -> Result<Rational> {
    if t == 0 || t > n {
        return Err(Error::InvalidLevel { t, n });
    }
    let nt = int((n - t) as i64);
    let nn = int(n as i64);
    let sum: Rational = (1..=n - t)
        .map(|k| {
            let ratio = falling_factorial(&nt, k as u32) / falling_factorial(&nn, k as u32);
            binomial_int(n as u64, k as u64) * (int(k as i64) - half()) * &ratio * &ratio
        })
        .sum();
    Ok(sum - half())
}

/// Smallest level with a negative certificate margin.
pub fn first_negative_margin(n: usize) -> Result<Option<usize>> {
    for t in 1..=n {
        if upper_bound_certificate(n, t)?.is_negative() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Exact left side `sum_{k=1}^n C(n,k) (k - 1/2) prod_i ((k - r_i)/r_i)^2`.
/// Feasibility at the level needs this to be at least `1/2` for every root set.
pub fn root_form_objective(n: usize, roots: &[Rational]) -> Rational {
    (1..=n)
        .map(|k| {
            let kk = int(k as i64);
            let prod = roots.iter().fold(Rational::one(), |acc, r| {
                let f = (&kk - r) / r;
                acc * &f * &f
            });
            binomial_int(n as u64, k as u64) * (&kk - half()) * prod
        })
        .sum()
}

fn positive_weights_f64(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                to_f64(&binomial_int(n as u64, k as u64)) * (k as f64 - 0.5)
            }
        })
        .collect()
}

/// Float version of [`root_form_objective`].
pub fn root_form_objective_f64(n: usize, roots: &[f64]) -> f64 {
    let c = positive_weights_f64(n);
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            c[k] * roots
                .iter()
                .map(|r| ((kf - r) / r).powi(2))
                .product::<f64>()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 0,
        }
    }
}

/// One local minimum, re-evaluated exactly at the snapped roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub roots: Vec<f64>,
    pub value: f64,
    pub below_half: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub t: usize,
    pub best: LocalMinimum,
    /// `true` iff some exactly evaluated minimum lies below `1/2`.
    pub found_below_half: bool,
    pub minima: Vec<LocalMinimum>,
}

/// Multi-start minimization of the root-form objective over `[1, n]^t`.
///
/// Starts: all roots at `n`, equispaced roots, then uniform random points.
/// Each start runs coordinate descent: with the other roots fixed the
/// objective is a quadratic in `1/r_i`, minimized in closed form over
/// `[1/n, 1]`, followed by shrinking-step pattern moves.
/// Restart `j` draws from a generator seeded by `(seed, j)`.
pub fn lower_bound_search(n: usize, t: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if n == 0 || t > n {
        return Err(Error::InvalidLevel { t, n });
    }
    let weights = positive_weights_f64(n);
    let restarts = opts.restarts.max(1);
    let minima: Vec<LocalMinimum> = (0..restarts)
        .into_par_iter()
        .map(|j| {
            let start = start_point(n, t, j, opts.seed);
            let roots = descend(n, &weights, start);
            let exact_roots: Vec<Rational> = roots.iter().map(|&r| from_f64(r)).collect();
            let value = root_form_objective(n, &exact_roots);
            LocalMinimum {
                below_half: value < half(),
                value: to_f64(&value),
                roots,
            }
        })
        .collect();
    let best = minima
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .expect("at least one restart");
    Ok(SearchResult {
        n,
        t,
        found_below_half: minima.iter().any(|m| m.below_half),
        best,
        minima,
    })
}

fn start_point(n: usize, t: usize, j: usize, seed: u64) -> Vec<f64> {
    let nf = n as f64;
    match j {
        0 => vec![nf; t],
        1 => (1..=t)
            .map(|i| 1.0 + (nf - 1.0) * i as f64 / (t + 1) as f64)
            .collect(),
        _ => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            (0..t).map(|_| rng.gen_range(1.0..=nf)).collect()
        }
    }
}

fn descend(n: usize, weights: &[f64], mut roots: Vec<f64>) -> Vec<f64> {
    let nf = n as f64;
    let t = roots.len();
    if t == 0 {
        return roots;
    }
    let eval = |r: &[f64]| root_form_objective_f64(n, r);
    let mut value = eval(&roots);
    for _ in 0..500 {
        let before = value;
        for i in 0..t {
            // sum_k c_k Q_k (1 - k u)^2 with Q_k the product over the other roots
            let (mut a, mut b) = (0.0, 0.0);
            for (k, c) in weights.iter().enumerate().skip(1) {
                let kf = k as f64;
                let q: f64 = roots
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != i)
                    .map(|(_, r)| ((kf - r) / r).powi(2))
                    .product();
                a += c * q * kf * kf;
                b += c * q * kf;
            }
            if a > 0.0 {
                let u = (b / a).clamp(1.0 / nf, 1.0);
                let mut trial = roots.clone();
                trial[i] = 1.0 / u;
                let v = eval(&trial);
                if v <= value {
                    roots = trial;
                    value = v;
                }
            }
        }
        if before - value <= 1e-15 * before.abs().max(1.0) {
            break;
        }
    }
    // pattern moves along pairs of coordinates, step halving
    let mut step = (nf - 1.0) / 8.0;
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..t {
            for j in i..t {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut trial = roots.clone();
                    trial[i] = (trial[i] + si * step).clamp(1.0, nf);
                    if j != i {
                        trial[j] = (trial[j] + sj * step).clamp(1.0, nf);
                    }
                    let v = eval(&trial);
                    if v < value {
                        roots = trial;
                        value = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    roots
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub t: usize,
    pub feasible: bool,
    #[serde(with = "serde_rational")]
    pub upper_cert_margin: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_search_best: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_search_found_below_half: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub n: usize,
    pub levels: Vec<LevelReport>,
    /// Smallest infeasible level.
    pub rank: Option<usize>,
    pub rank_ratio: Option<f64>,
    pub first_negative_margin_t: Option<usize>,
    /// Levels where feasibility reappears after an infeasible level.
    pub monotonicity_violations: Vec<usize>,
    pub status: String,
}

pub fn sos_rank(n: usize, search: Option<&SearchOptions>) -> Result<RankReport> {
    if n < 2 {
        return Err(Error::InvalidLevel { t: 0, n });
    }
    let levels: Vec<LevelReport> = (1..=n)
        .into_par_iter()
        .map(|t| -> Result<LevelReport> {
            let feasible = symmetric_feasibility(n, t)?.is_psd;
            let upper_cert_margin = upper_bound_certificate(n, t)?;
            let found = search.map(|s| lower_bound_search(n, t, s)).transpose()?;
            Ok(LevelReport {
                t,
                feasible,
                upper_cert_margin,
                lower_search_best: found.as_ref().map(|f| f.best.value),
                lower_search_found_below_half: found.as_ref().map(|f| f.found_below_half),
            })
        })
        .collect::<Result<_>>()?;
    let rank = levels.iter().find(|l| !l.feasible).map(|l| l.t);
    let monotonicity_violations = match rank {
        Some(r) => levels
            .iter()
            .filter(|l| l.t > r && l.feasible)
            .map(|l| l.t)
            .collect(),
        None => Vec::new(),
    };
    Ok(RankReport {
        n,
        rank,
        rank_ratio: rank.map(|r| r as f64 / n as f64),
        first_negative_margin_t: levels
            .iter()
            .find(|l| l.upper_cert_margin.is_negative())
            .map(|l| l.t),
        monotonicity_violations,
        levels,
        status: RANK_STATUS.to_string(),
    })
}

/// Asymptotic bracket `sqrt(n)/4 <= rank <= n - C n^(1/3)`; advisory only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalBounds {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub constant: f64,
    /// `4^(-sqrt n) sqrt(n)^(sqrt(n)/2) >= 1/2`, the sufficient condition behind the lower bound.
    pub lower_condition_holds: bool,
    pub note: String,
}

pub fn theoretical_bounds(n: usize, constant: f64) -> Result<TheoreticalBounds> {
    if n < 4 {
        return Err(Error::InvalidLevel { t: 0, n });
    }
    let nf = n as f64;
    Ok(TheoreticalBounds {
        n,
        lower: nf.sqrt() / 4.0,
        upper: nf - constant * nf.cbrt(),
        constant,
        lower_condition_holds: lower_condition_holds(n),
        note: "asymptotic; advisory".into(),
    })
}

pub fn lower_condition_holds(n: usize) -> bool {
    let s = (n as f64).sqrt();
    // log of 4^{-s} s^{s/2}
    -s * 4f64.ln() + 0.5 * s * s.ln() >= -(2f64.ln())
}

/// Smallest `n` in `4..=n_max` from which the lower-bound condition holds
/// for every larger `n` up to `n_max`.
pub fn lower_condition_threshold(n_max: usize) -> Option<usize> {
    let mut threshold = None;
    for n in (4..=n_max).rev() {
        if lower_condition_holds(n) {
            threshold = Some(n);
        } else {
            break;
        }
    }
    threshold
}

/// `rank >= ceil(sqrt(n)/4)`, i.e. the uniform solution survives every level
/// below `ceil(sqrt(n)/4)`.
pub fn lower_bound_verified(n: usize) -> Result<bool> {
    let target = ((n as f64).sqrt() / 4.0).ceil() as usize;
    for t in 1..target {
        if !symmetric_feasibility(n, t)?.is_psd {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least-squares fit (through the origin) of `n - t*(n) ≈ C n^(1/3)`, where
/// `t*(n)` is the first level with a negative certificate margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperFit {
    pub constant: f64,
    /// `(n, t*(n))`
    pub points: Vec<(usize, usize)>,
}

pub fn fit_upper_constant(n_min: usize, n_max: usize) -> Result<UpperFit> {
    let points: Vec<(usize, usize)> = (n_min.max(2)..=n_max)
        .into_par_iter()
        .map(|n| first_negative_margin(n).map(|t| (n, t.unwrap_or(n))))
        .collect::<Result<_>>()?;
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(n, t)| {
        let c = (n as f64).cbrt();
        (a + (n - t) as f64 * c, b + c * c)
    });
    Ok(UpperFit {
        constant: if den > 0.0 { num / den } else { 0.0 },
        points,
    })
}

/// A root of the polynomial in the objective; complex roots come in
/// conjugate pairs `re ± i im`.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Real(Rational),
    ConjugatePair { re: Rational, im: Rational },
}

impl Root {
    /// Contribution to the product at integer `k`; a pair contributes
    /// `|(k - r)/r|^4`.
    pub fn factor_at(&self, k: usize) -> Rational {
        let kk = int(k as i64);
        match self {
            Root::Real(r) => {
                let f = (&kk - r) / r;
                &f * &f
            }
            Root::ConjugatePair { re, im } => {
                let num = (re - &kk) * (re - &kk) + im * im;
                let den = re * re + im * im;
                let f = num / den;
                &f * &f
            }
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Root::Real(_) => 1,
            Root::ConjugatePair { .. } => 2,
        }
    }
}

/// Product of all root factors at `k`.
pub fn root_product_at(roots: &[Root], k: usize) -> Rational {
    roots
        .iter()
        .fold(Rational::one(), |acc, r| acc * r.factor_at(k))
}

pub fn root_objective(n: usize, roots: &[Root]) -> Rational {
    (1..=n)
        .map(|k| {
            binomial_int(n as u64, k as u64) * (int(k as i64) - half()) * root_product_at(roots, k)
        })
        .sum()
}

/// The root moves that never increase the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootReplacement {
    /// a conjugate pair becomes a double root at its modulus
    MergeConjugatePair,
    /// a negative root `-a` becomes `a`
    ReflectNegative,
    /// a root in `(0, 1)` becomes `1`
    ClampBelowOne,
    /// a root above `n` becomes `n`
    ClampAboveN,
    /// missing roots up to degree `t` are placed at `n`
    PadToDegree,
}

/// Applies `rep` to the first root it concerns. `PadToDegree` pads to `t`.
/// Merging a pair needs a rational modulus.
pub fn apply_replacement(
    rep: RootReplacement,
    roots: &[Root],
    n: usize,
    t: usize,
) -> Result<Vec<Root>> {
    let nn = int(n as i64);
    let mut out = roots.to_vec();
    match rep {
        RootReplacement::PadToDegree => {
            let deg: usize = out.iter().map(Root::degree).sum();
            for _ in deg..t {
                out.push(Root::Real(nn.clone()));
            }
        }
        _ => {
            let pos = out.iter().position(|r| match (rep, r) {
                (RootReplacement::MergeConjugatePair, Root::ConjugatePair { .. }) => true,
                (RootReplacement::ReflectNegative, Root::Real(r)) => r.is_negative(),
                (RootReplacement::ClampBelowOne, Root::Real(r)) => {
                    r.is_positive() && *r < Rational::one()
                }
                (RootReplacement::ClampAboveN, Root::Real(r)) => *r > nn,
                _ => false,
            });
            if let Some(i) = pos {
                match &out[i] {
                    Root::ConjugatePair { re, im } => {
                        let modulus = sqrt_exact(&(re * re + im * im))?;
                        out[i] = Root::Real(modulus.clone());
                        out.insert(i + 1, Root::Real(modulus));
                    }
                    Root::Real(r) => {
                        out[i] = Root::Real(match rep {
                            RootReplacement::ReflectNegative => -r.clone(),
                            RootReplacement::ClampBelowOne => Rational::one(),
                            RootReplacement::ClampAboveN => nn.clone(),
                            _ => unreachable!(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Pointwise comparison: the replacement's product is at most the
/// original's at every `k` in `1..=n`.
pub fn replacement_dominates(before: &[Root], after: &[Root], n: usize) -> bool {
    (1..=n).all(|k| root_product_at(after, k) <= root_product_at(before, k))
}

/// `(p^2 - q^2, 2pq, p^2 + q^2)` scaled by `s`: a pair with rational modulus.
pub fn pythagorean_pair(p: i64, q: i64, s: Rational) -> Root {
    Root::ConjugatePair {
        re: &s * int(p * p - q * q),
        im: &s * int(2 * p * q),
    }
}
