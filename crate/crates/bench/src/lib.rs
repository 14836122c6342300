//! Deterministic inputs shared by the benchmarks.

use pencilcount::{FieldCtx, Poly, ScalarMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrices(
    field: &FieldCtx,
    rows: usize,
    cols: usize,
    count: usize,
    seed: u64,
) -> Vec<ScalarMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order() as i64;
    (0..count)
        .map(|_| {
            let e = (0..rows * cols)
                .map(|_| field.elem(rng.gen_range(0..q)).unwrap())
                .collect();
            ScalarMatrix::from_entries(rows, cols, e).unwrap()
        })
        .collect()
}

/// Random monic polynomials of the given degree.
pub fn random_monic(field: &FieldCtx, degree: usize, count: usize, seed: u64) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order() as i64;
    (0..count)
        .map(|_| {
            let mut c: Vec<_> = (0..degree)
                .map(|_| field.elem(rng.gen_range(0..q)).unwrap())
                .collect();
            c.push(field.elem(1).unwrap());
            Poly::from_coeffs(c)
        })
        .collect()
}
