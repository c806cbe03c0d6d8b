//! Full moment matrices indexed by subsets, and exact PSD decisions.
//!
//! For a weighting `c_I` of the cube points the level-`q` moment matrix is
//! `sum_I c_I Z_I Z_I^T`, where `Z_I` is the zeta vector of `I` over all
//! subsets of size at most `q`. Its `(J1, J2)` entry is the total weight of
//! the supersets of `J1 ∪ J2`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{binomial_int, common_denominator, serde_rational, to_f64, Rational};

/// Largest matrix dimension the builders accept.
pub const MAX_DIM: usize = 5000;

/// A subset of `{1, ..., n}` stored as a bitmask (bit `i` is element `i + 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub fn empty() -> Self {
        Subset(0)
    }

    pub fn full(n: usize) -> Self {
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    /// Builds a subset from 1-based elements.
    pub fn from_elements(elems: &[usize]) -> Self {
        Subset(elems.iter().fold(0u64, |acc, &e| acc | (1u64 << (e - 1))))
    }

    pub fn elements(self) -> Vec<usize> {
        (0..64)
            .filter(|i| self.0 >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn sym_diff(self, other: Subset) -> Subset {
        Subset(self.0 ^ other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Every subset of `{1..n}`, in bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u64 << n).map(Subset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elems = Vec::<usize>::deserialize(d)?;
        if elems.iter().any(|&e| e == 0 || e > 64) {
            return Err(serde::de::Error::custom(
                "subset elements must lie in 1..=64",
            ));
        }
        Ok(Subset::from_elements(&elems))
    }
}

/// Subsets of `{1..n}` with at most `q` elements, by size and then
/// lexicographically on the sorted element lists.
pub fn subsets_up_to(n: usize, q: usize) -> Vec<Subset> {
    let mut out = Vec::new();
    for size in 0..=q.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(Subset(idx.iter().fold(0u64, |acc, &i| acc | 1u64 << i)));
            // advance to the next combination
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == n - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// `sum_{i <= q} C(n, i)`, saturating.
pub fn moment_dimension(n: usize, q: usize) -> usize {
    let mut total: usize = 0;
    let mut c: u128 = 1;
    for i in 0..=q.min(n) {
        if i > 0 {
            c = c * (n - i + 1) as u128 / i as u128;
        }
        total = total.saturating_add(c.min(usize::MAX as u128) as usize);
    }
    total
}

/// Per-cardinality weights `w_0..w_n` of a permutation-invariant solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricAssignment {
    pub n: usize,
    #[serde(with = "serde_rational::vec")]
    pub weights: Vec<Rational>,
}

impl SymmetricAssignment {
    pub fn new(n: usize, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != n + 1 {
            return Err(Error::WeightLength {
                expected: n + 1,
                got: weights.len(),
            });
        }
        Ok(Self { n, weights })
    }

    pub fn uniform(n: usize, value: Rational) -> Self {
        Self {
            n,
            weights: vec![value; n + 1],
        }
    }

    pub fn weight(&self, k: usize) -> &Rational {
        &self.weights[k]
    }

    /// Pointwise product with per-cardinality constraint values.
    pub fn times(&self, g: &[Rational]) -> Result<Self> {
        if g.len() != self.n + 1 {
            return Err(Error::WeightLength {
                expected: self.n + 1,
                got: g.len(),
            });
        }
        Ok(Self {
            n: self.n,
            weights: self.weights.iter().zip(g).map(|(w, c)| w * c).collect(),
        })
    }

    /// `sum_k C(n,k) w_k`, the total mass of the solution.
    pub fn mass(&self) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| binomial_int(self.n as u64, k as u64) * w)
            .sum()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self {
            n: self.n,
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentMatrix {
    pub n: usize,
    pub q: usize,
    pub order: Vec<Subset>,
    #[serde(with = "serde_rational::matrix")]
    pub entries: Vec<Vec<Rational>>,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    /// Oracle construction by enumerating all `2^n` cube points.
    pub fn from_point_weights(
        n: usize,
        q: usize,
        weight: impl Fn(Subset) -> Rational,
    ) -> Result<Self> {
        check_level(n, q)?;
        let order = subsets_up_to(n, q);
        let points: Vec<(Subset, Rational)> = Subset::all(n)
            .map(|s| (s, weight(s)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let dim = order.len();
        let mut entries = vec![vec![Rational::zero(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let u = order[i].union(order[j]);
                let v: Rational = points
                    .iter()
                    .filter(|(s, _)| u.is_subset_of(*s))
                    .map(|(_, c)| c.clone())
                    .sum();
                entries[j][i] = v.clone();
                entries[i][j] = v;
            }
        }
        Ok(Self {
            n,
            q,
            order,
            entries,
        })
    }
}

fn check_level(n: usize, q: usize) -> Result<()> {
    if q > n {
        return Err(Error::LevelTooLarge { q, n });
    }
    let dim = moment_dimension(n, q);
    if dim > MAX_DIM || n > 63 {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

/// `sum_I w_{|I|} Z_I Z_I^T` at level `q`, built by counting supersets.
pub fn build_moment_matrix(w: &SymmetricAssignment, q: usize) -> Result<MomentMatrix> {
    let n = w.n;
    check_level(n, q)?;
    // entry depends only on u = |J1 ∪ J2|: sum_{k >= u} C(n-u, k-u) w_k
    let max_u = (2 * q).min(n);
    let by_union: Vec<Rational> = (0..=max_u)
        .map(|u| {
            (u..=n)
                .map(|k| binomial_int((n - u) as u64, (k - u) as u64) * &w.weights[k])
                .sum()
        })
        .collect();
    let order = subsets_up_to(n, q);
    let dim = order.len();
    let mut entries = vec![vec![Rational::zero(); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let v = &by_union[order[i].union(order[j]).len()];
            entries[i][j] = v.clone();
            entries[j][i] = v.clone();
        }
    }
    Ok(MomentMatrix {
        n,
        q,
        order,
        entries,
    })
}

/// Moment matrix of a symmetric constraint: weights `w_k g_k`.
pub fn build_constraint_matrix(
    w: &SymmetricAssignment,
    g: &[Rational],
    q: usize,
) -> Result<MomentMatrix> {
    build_moment_matrix(&w.times(g)?, q)
}

/// Outcome of an exact PSD test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    /// Integer direction `v` with `v^T M v < 0` when the matrix is not PSD.
    #[serde(
        with = "serde_rational::vec",
        default,
        skip_serializing_if = "Vec::is_empty"
    )]
    pub witness: Vec<Rational>,
    /// The value `v^T M v` of the witness.
    #[serde(
        with = "serde_rational::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub witness_value: Option<Rational>,
}

impl PsdVerdict {
    pub fn psd() -> Self {
        Self {
            is_psd: true,
            witness: Vec::new(),
            witness_value: None,
        }
    }

    fn failed(witness: Vec<Rational>, value: Rational) -> Self {
        Self {
            is_psd: false,
            witness,
            witness_value: Some(value),
        }
    }
}

/// `v^T M v`.
pub fn quadratic_form(m: &[Vec<Rational>], v: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        let row: Rational = m[i]
            .iter()
            .zip(v)
            .filter(|(_, vj)| !vj.is_zero())
            .map(|(a, vj)| a * vj)
            .sum();
        total += vi * row;
    }
    total
}

pub fn psd_exact(m: &MomentMatrix) -> Result<PsdVerdict> {
    psd_exact_dense(&m.entries)
}

/// Exact PSD decision for a dense symmetric rational matrix.
///
/// Symmetric elimination with diagonal pivoting on the integer image of the
/// matrix (fraction-free updates, so every intermediate entry is a minor).
/// A negative pivot, or a zero pivot whose row is not zero, ends the
/// elimination; the failing direction is pulled back through the recorded
/// pivot rows into a witness for the original matrix.
pub fn psd_exact_dense(m: &[Vec<Rational>]) -> Result<PsdVerdict> {
    let dim = m.len();
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row.len(), dim, "matrix must be square");
        for j in 0..i {
            if row[j] != m[j][i] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    if dim == 0 {
        return Ok(PsdVerdict::psd());
    }
    let scale = common_denominator(m.iter().flatten());
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.numer() * (&scale / x.denom()))
                .collect()
        })
        .collect();

    let mut active: Vec<usize> = (0..dim).collect();
    let mut prev = BigInt::one();
    // (pivot index, pivot value, prev before the step, pivot row over the indices active then)
    let mut history: Vec<PivotStep> = Vec::new();

    loop {
        // zero diagonal with a nonzero off-diagonal entry
        let mut keep = Vec::with_capacity(active.len());
        for &i in &active {
            if a[i][i].is_zero() {
                if let Some(&j) = active.iter().find(|&&j| j != i && !a[i][j].is_zero()) {
                    return Ok(witness_for(
                        dim,
                        &history,
                        &prev,
                        &a,
                        Failure::Pair(i, j),
                        m,
                    ));
                }
                // identically zero row: drop it
            } else {
                keep.push(i);
            }
        }
        active = keep;
        if let Some(&i) = active.iter().find(|&&i| a[i][i].is_negative()) {
            return Ok(witness_for(
                dim,
                &history,
                &prev,
                &a,
                Failure::Negative(i),
                m,
            ));
        }
        // smallest positive pivot by bit length keeps entry growth down
        let Some(&p) = active.iter().min_by_key(|&&i| a[i][i].bits()) else {
            return Ok(PsdVerdict::psd());
        };
        let pivot = a[p][p].clone();
        let row: Vec<(usize, BigInt)> = active.iter().map(|&j| (j, a[p][j].clone())).collect();
        active.retain(|&j| j != p);
        for (ii, &i) in active.iter().enumerate() {
            let aip = a[i][p].clone();
            for &j in &active[ii..] {
                let mut v = &pivot * &a[i][j];
                if !aip.is_zero() && !a[p][j].is_zero() {
                    v -= &aip * &a[p][j];
                }
                let v = v / &prev;
                a[j][i] = v.clone();
                a[i][j] = v;
            }
        }
        history.push((p, pivot.clone(), prev.clone(), row));
        prev = pivot;
    }
}

enum Failure {
    Negative(usize),
    Pair(usize, usize),
}

type PivotStep = (usize, BigInt, BigInt, Vec<(usize, BigInt)>);

fn witness_for(
    dim: usize,
    history: &[PivotStep],
    prev: &BigInt,
    a: &[Vec<BigInt>],
    failure: Failure,
    m: &[Vec<Rational>],
) -> PsdVerdict {
    let schur = |i: usize, j: usize| Rational::new(a[i][j].clone(), prev.clone());
    let mut x = vec![Rational::zero(); dim];
    match failure {
        Failure::Negative(i) => x[i] = Rational::one(),
        Failure::Pair(i, j) => {
            // s e_i + e_j with s = -(S_jj + 1) / (2 S_ij) gives value -1
            let s =
                -(schur(j, j) + Rational::one()) / (schur(i, j) * Rational::from_integer(2.into()));
            x[i] = s;
            x[j] = Rational::one();
        }
    }
    // Solve L^T x = y: the pivot coordinates are fixed in reverse elimination order.
    for (p, pivot, _, row) in history.iter().rev() {
        let mut acc = Rational::zero();
        for (j, apj) in row {
            if j != p && !x[*j].is_zero() && !apj.is_zero() {
                acc += Rational::new(apj.clone(), pivot.clone()) * &x[*j];
            }
        }
        x[*p] = -acc;
    }
    let scale = common_denominator(x.iter());
    let x: Vec<Rational> = x
        .into_iter()
        .map(|v| v * Rational::from_integer(scale.clone()))
        .collect();
    let value = quadratic_form(m, &x);
    debug_assert!(
        value.is_negative(),
        "witness must certify a negative direction"
    );
    PsdVerdict::failed(x, value)
}

/// Floating-point screen: smallest eigenvalue of the `f64` image is `>= -tol`.
pub fn psd_float(m: &MomentMatrix, tol: f64) -> bool {
    psd_float_dense(&m.entries, tol)
}

pub fn psd_float_dense(m: &[Vec<Rational>], tol: f64) -> bool {
    let dim = m.len();
    if dim == 0 {
        return true;
    }
    let mat = nalgebra::DMatrix::from_fn(dim, dim, |i, j| to_f64(&m[i][j]));
    let eig = nalgebra::SymmetricEigen::new(mat);
    eig.eigenvalues.iter().all(|&l| l >= -tol)
}

/// Exact and float verdicts side by side; disagreement marks an
/// ill-conditioned matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub exact: bool,
    pub float: bool,
    pub conditioning_warning: bool,
}

pub fn cross_check(m: &[Vec<Rational>], tol: f64) -> Result<CrossCheck> {
    let exact = psd_exact_dense(m)?.is_psd;
    let float = psd_float_dense(m, tol);
    Ok(CrossCheck {
        exact,
        float,
        conditioning_warning: exact != float,
    })
}
