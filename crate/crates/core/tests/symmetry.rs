use lasserre_sym::exactnum::{int, pow, Rational};
use lasserre_sym::laurentk::{constraint_value, symmetric_feasibility};
use lasserre_sym::moments::{psd_exact_dense, subsets_up_to, Subset};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sum_I c(I) Z_{I △ S} Z_{I △ S}^T`, built from explicit zeta vectors.
fn rotated_matrix(
    n: usize,
    t: usize,
    s: Subset,
    c: impl Fn(Subset) -> Rational,
) -> Vec<Vec<Rational>> {
    let order = subsets_up_to(n, t);
    let mut m = vec![vec![Rational::zero(); order.len()]; order.len()];
    for i in Subset::all(n) {
        let weight = c(i);
        let point = i.sym_diff(s);
        let zeta: Vec<bool> = order.iter().map(|j| j.is_subset_of(point)).collect();
        for (a, za) in zeta.iter().enumerate() {
            if !za {
                continue;
            }
            for (b, zb) in zeta.iter().enumerate() {
                if *zb {
                    m[a][b] += &weight;
                }
            }
        }
    }
    m
}

#[test]
fn flipped_constraint_matrices_share_the_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let t = rng.gen_range(1..=2.min(n));
        let r = Subset(rng.gen_range(0..1u64 << n));
        let s = Subset(rng.gen_range(0..1u64 << n));
        let scale = Rational::one() / pow(&int(2), n as u32);
        let plain = rotated_matrix(n, t, Subset::empty(), |i| {
            &scale * constraint_value(r, i, n)
        });
        let flipped = rotated_matrix(n, t, s, |i| &scale * constraint_value(r.sym_diff(s), i, n));
        let a = psd_exact_dense(&plain).unwrap().is_psd;
        let b = psd_exact_dense(&flipped).unwrap().is_psd;
        assert_eq!(a, b, "n={n} t={t} R={r:?} S={s:?}");
        assert_eq!(
            a,
            symmetric_feasibility(n, t).unwrap().is_psd,
            "n={n} t={t}"
        );
    }
}
