//! Closed-form counts of matrices over `F_q` by invariant factors, invariant
//! subspace, reachability rank and characteristic polynomial, all in exact
//! big-integer arithmetic.

mod partition;
mod report;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::gf::Subspace;
use crate::polyring::{Poly, PolyError, PolyRing};
use crate::smith::InvariantFactors;

pub use partition::Partition;
pub use report::{CensusKind, CensusReport, Source};

pub type BigCount = BigUint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invariant factors have total degree {actual}, expected {expected}")]
    DegreeMismatch { expected: usize, actual: usize },
    #[error("polynomial degree {degree} exceeds k = {k}")]
    DegreeTooLarge { degree: usize, k: usize },
    #[error("{0} is not monic")]
    NonMonic(String),
    #[error("expected an integer count, got {0}")]
    NonIntegral(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn big_pow(q: u64, e: u64) -> BigUint {
    BigUint::from(q).pow(u32::try_from(e).expect("exponent fits in u32"))
}

/// `∏_{i=from}^{to} (q^n - q^i)`, empty when `from > to`.
fn tail_product(q: u64, n: usize, from: usize, to: usize) -> BigUint {
    let qn = big_pow(q, n as u64);
    (from..=to).fold(BigUint::one(), |acc, i| acc * (&qn - big_pow(q, i as u64)))
}

/// `c_f(λ) = ∏_{i>=1} ∏_{j=1}^{m_i} (q^{d h_i} - q^{d (h_i - j)})` where
/// `m_i = λ'_i - λ'_{i+1}`, `h_i = λ'_1 + ... + λ'_i` and `d = deg f`.
pub fn c_f(lambda: &Partition, d: u32, q: u64) -> BigCount {
    let conj = lambda.conjugate();
    let lc = conj.parts();
    let mut acc = BigUint::one();
    let mut h = 0u64;
    for (i, &li) in lc.iter().enumerate() {
        h += li as u64;
        let m_i = li - lc.get(i + 1).copied().unwrap_or(0);
        let top = big_pow(q, d as u64 * h);
        for j in 1..=m_i as u64 {
            acc *= &top - big_pow(q, d as u64 * (h - j));
        }
    }
    acc
}

/// `|GL_n(F_q)| = ∏_{i=0}^{n-1} (q^n - q^i)`; 1 for `n = 0`.
pub fn gl_order(n: usize, q: u64) -> BigCount {
    if n == 0 {
        return BigUint::one();
    }
    tail_product(q, n, 0, n - 1)
}

/// Gaussian binomial `[k choose d]_q`, zero when `d > k`.
pub fn q_binomial(k: usize, d: usize, q: u64) -> BigCount {
    if d > k {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= big_pow(q, (k - i) as u64) - 1u32;
        den *= big_pow(q, (d - i) as u64) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quot
}

/// `Φ_I(f) = (ν_f(p_k), ν_f(p_{k-1}), ...)` for each irreducible `f` dividing
/// `∏ p_i`, truncated at the first zero.
pub fn phi_profile(ring: &PolyRing, inv: &InvariantFactors) -> BTreeMap<Poly, Partition> {
    let product = inv.product(ring);
    let fact = ring
        .factorize(&product)
        .expect("invariant factors are nonzero");
    fact.factors
        .into_iter()
        .map(|(f, _)| {
            let parts: Vec<u32> = inv
                .polys()
                .iter()
                .rev()
                .map(|p| ring.nu_unchecked(&f, p))
                .take_while(|&e| e > 0)
                .collect();
            (f, Partition::new(parts))
        })
        .collect()
}

/// `|GL_d| / ∏_f c_f(Φ_I(f))`: the size of the conjugacy class in `M_d(F_q)`
/// whose nonunit invariant factors are those of `inv`, `d = deg ∏ p_i`.
fn class_size(ring: &PolyRing, inv: &InvariantFactors) -> Result<BigCount, CensusError> {
    let q = ring.field().order() as u64;
    let denom = phi_profile(ring, inv)
        .iter()
        .fold(BigUint::one(), |acc, (f, lambda)| {
            acc * c_f(lambda, f.deg0() as u32, q)
        });
    let (quot, rem) = gl_order(inv.degree(), q).div_rem(&denom);
    if !rem.is_zero() {
        return Err(CensusError::NonIntegral(format!(
            "{} / {denom}",
            gl_order(inv.degree(), q)
        )));
    }
    Ok(quot)
}

/// Number of `n x n` matrices with invariant factors `inv` (length `n`);
/// zero unless `deg ∏ p_i = n`.
pub fn count_conjugacy_class(
    ring: &PolyRing,
    inv: &InvariantFactors,
) -> Result<BigCount, CensusError> {
    if inv.degree() != inv.len() {
        return Ok(BigUint::zero());
    }
    class_size(ring, inv)
}

fn check_dims(n: usize, k: usize, inv: &InvariantFactors) -> Result<(), CensusError> {
    if k == 0 || k > n {
        return Err(CensusError::Params(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if inv.len() != k {
        return Err(CensusError::Params(format!(
            "expected {k} invariant factors, got {}",
            inv.len()
        )));
    }
    Ok(())
}

/// Number of maps `T: W -> V` (`dim V = n`, `dim W = k`) whose largest
/// invariant subspace is a fixed `d`-dimensional `U` and whose invariant
/// factors are `inv`:
/// `|GL_d| / ∏ c_f(Φ_I(f)) · ∏_{i=d+1}^{k} (q^n - q^i)`.
pub fn count_with_subspace(
    ring: &PolyRing,
    n: usize,
    k: usize,
    d: usize,
    inv: &InvariantFactors,
) -> Result<BigCount, CensusError> {
    check_dims(n, k, inv)?;
    if inv.degree() != d {
        return Err(CensusError::DegreeMismatch {
            expected: d,
            actual: inv.degree(),
        });
    }
    if d > k {
        return Err(CensusError::Params(format!("d = {d} exceeds k = {k}")));
    }
    let q = ring.field().order() as u64;
    Ok(class_size(ring, inv)? * tail_product(q, n, d + 1, k))
}

/// `N_q(n,k;I)`: number of `B ∈ M_{n,k}(F_q)` whose pencil `x I_{n,k} - B`
/// has invariant factors `inv`.
pub fn count_invariant_factors(
    ring: &PolyRing,
    n: usize,
    k: usize,
    inv: &InvariantFactors,
) -> Result<BigCount, CensusError> {
    check_dims(n, k, inv)?;
    let d = inv.degree();
    if d > k {
        return Ok(BigUint::zero());
    }
    let q = ring.field().order() as u64;
    Ok(q_binomial(k, d, q) * count_with_subspace(ring, n, k, d, inv)?)
}

/// Number of maps whose largest invariant subspace is a fixed `d`-dimensional
/// `U`: `q^{d^2} ∏_{i=d+1}^{k} (q^n - q^i)`.
pub fn count_given_u(n: usize, k: usize, d: usize, q: u64) -> Result<BigCount, CensusError> {
    if d > k || k > n {
        return Err(CensusError::Params(format!(
            "need 0 <= d <= k <= n, got n={n}, k={k}, d={d}"
        )));
    }
    Ok(big_pow(q, (d * d) as u64) * tail_product(q, n, d + 1, k))
}

/// Pairs `(A, B) ∈ M_k × M_{k,n-k}` with `rank [B AB ... A^{k-1}B] = r`:
/// `[k choose r]_q q^{(k-r)^2} ∏_{i=k-r+1}^{k} (q^n - q^i)`.
pub fn count_reachability(k: usize, n: usize, r: usize, q: u64) -> Result<BigCount, CensusError> {
    if r > k || k >= n {
        return Err(CensusError::Params(format!(
            "need 0 <= r <= k < n, got k={k}, n={n}, r={r}"
        )));
    }
    let d = k - r;
    Ok(q_binomial(k, r, q) * big_pow(q, (d * d) as u64) * tail_product(q, n, d + 1, k))
}

/// `F(Q, r) = ∏_{i=1}^{r} (1 - Q^{-i})`
fn f_factor(base: &BigUint, r: u32) -> BigRational {
    let base = BigInt::from(base.clone());
    (1..=r).fold(BigRational::one(), |acc, i| {
        let qi = base.pow(i);
        acc * BigRational::new(&qi - 1, qi)
    })
}

fn into_count(value: BigRational) -> Result<BigCount, CensusError> {
    if !value.is_integer() {
        return Err(CensusError::NonIntegral(value.to_string()));
    }
    value
        .to_integer()
        .to_biguint()
        .ok_or_else(|| CensusError::NonIntegral(value.to_string()))
}

/// `q^{d^2-d} F(q,d) / ∏ F(q^{d_i}, e_i)` over the factorization of `f`.
fn char_poly_fiber(ring: &PolyRing, f: &Poly) -> Result<BigCount, CensusError> {
    if !f.is_monic() {
        return Err(CensusError::NonMonic(ring.format(f)));
    }
    let q = ring.field().order() as u64;
    let d = f.deg0() as u32;
    let mut value = BigRational::from_integer(BigInt::from(big_pow(q, (d * d - d) as u64)))
        * f_factor(&BigUint::from(q), d);
    for (fi, e) in ring.factorize(f)?.factors {
        value /= f_factor(&big_pow(q, fi.deg0() as u64), e);
    }
    into_count(value)
}

/// Number of `n x n` matrices with characteristic polynomial `f`, `n = deg f`.
pub fn count_char_poly_square(ring: &PolyRing, f: &Poly) -> Result<BigCount, CensusError> {
    char_poly_fiber(ring, f)
}

/// Number of `B ∈ M_{n,k}(F_q)` with `δ_k(x I_{n,k} - B) = f`:
/// `[k choose d]_q |Φ_d^{-1}(f)| ∏_{i=d+1}^{k} (q^n - q^i)`, `d = deg f`.
pub fn count_char_poly_rect(
    ring: &PolyRing,
    f: &Poly,
    n: usize,
    k: usize,
) -> Result<BigCount, CensusError> {
    if k == 0 || k > n {
        return Err(CensusError::Params(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let d = f
        .degree()
        .ok_or_else(|| CensusError::NonMonic("0".into()))?;
    if d > k {
        return Err(CensusError::DegreeTooLarge { degree: d, k });
    }
    let q = ring.field().order() as u64;
    Ok(q_binomial(k, d, q) * char_poly_fiber(ring, f)? * tail_product(q, n, d + 1, k))
}

/// Maps `W -> V` extendable to a nilpotent operator on `V`:
/// `q^{n(k-1)} (q^n - q^k + 1)`.
pub fn count_nilpotent_extendable(k: usize, n: usize, q: u64) -> Result<BigCount, CensusError> {
    if k == 0 || k > n {
        return Err(CensusError::Params(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(big_pow(q, (n * (k - 1)) as u64) * (big_pow(q, n as u64) - big_pow(q, k as u64) + 1u32))
}

/// The same count as a sum of fibers, `Σ_{l=0}^{k} |Φ_{n,k}^{-1}(x^l)|`.
pub fn nilpotent_extendable_via_fibers(
    ring: &PolyRing,
    k: usize,
    n: usize,
) -> Result<BigCount, CensusError> {
    let mut total = BigUint::zero();
    for l in 0..=k {
        total += count_char_poly_rect(ring, &Poly::monomial(crate::gf::Elem::ONE, l), n, k)?;
    }
    Ok(total)
}

/// Evaluates both sides of
/// `y^d = Σ_{j=0}^{d} q^{j^2} ∏_{i=j+1}^{d} (y - q^i) [d choose j]_q`
/// at an integer `y`.
pub fn check_q_identity(d: usize, q: u64, y: &BigInt) -> bool {
    let lhs = y.pow(d as u32);
    let qi = |i: usize| BigInt::from(big_pow(q, i as u64));
    let mut rhs = BigInt::zero();
    for j in 0..=d {
        let prod = (j + 1..=d).fold(BigInt::one(), |acc, i| acc * (y - qi(i)));
        rhs += qi(j * j) * prod * BigInt::from(q_binomial(d, j, q));
    }
    lhs == rhs
}

/// All chains `p_1 | ... | p_k` of monic polynomials with `∏ p_i = f`.
///
/// For each irreducible `f_i^{e_i}` in `f`, the exponents of `f_i` in
/// `p_k, p_{k-1}, ...` form a partition of `e_i` with at most `k` parts; the
/// chains are the products of those choices.
pub fn chains_with_product(
    ring: &PolyRing,
    f: &Poly,
    k: usize,
) -> Result<Vec<InvariantFactors>, CensusError> {
    if !f.is_monic() {
        return Err(CensusError::NonMonic(ring.format(f)));
    }
    let fact = ring.factorize(f)?;
    let mut tuples: Vec<Vec<Poly>> = vec![vec![Poly::one(); k]];
    for (fi, e) in &fact.factors {
        let choices = Partition::all_with_at_most(*e, k);
        let mut next = Vec::with_capacity(tuples.len() * choices.len());
        for t in &tuples {
            for lambda in &choices {
                let mut t = t.clone();
                for (j, &part) in lambda.parts().iter().enumerate() {
                    let slot = k - 1 - j;
                    t[slot] = ring.mul(&t[slot], &ring.pow(fi, part));
                }
                next.push(t);
            }
        }
        tuples = next;
    }
    let mut out: Vec<InvariantFactors> = tuples
        .into_iter()
        .map(InvariantFactors::new_unchecked)
        .collect();
    out.sort();
    Ok(out)
}

/// Every chain of `k` monic polynomials with `deg ∏ p_i <= k`, i.e. every
/// tuple that can occur for a pencil in `M_{n,k}`.
pub fn all_invariant_factor_tuples(ring: &PolyRing, k: usize) -> Vec<InvariantFactors> {
    let mut out = Vec::new();
    for f in ring.monic_up_to(k) {
        out.extend(chains_with_product(ring, &f, k).expect("monic"));
    }
    out
}

fn insert_nonzero(entries: &mut BTreeMap<String, BigCount>, key: String, value: BigCount) {
    if !value.is_zero() {
        entries.insert(key, value);
    }
}

/// Closed-form `N_q(n,k;I)` for every tuple `I` that occurs.
pub fn pencil_census(ring: &PolyRing, n: usize, k: usize) -> Result<CensusReport, CensusError> {
    let mut report = CensusReport::new(CensusKind::Pencil, ring.field(), n, k, Source::ClosedForm);
    for inv in all_invariant_factor_tuples(ring, k) {
        let count = count_invariant_factors(ring, n, k, &inv)?;
        insert_nonzero(&mut report.entries, inv.key(ring), count);
    }
    Ok(report)
}

/// Closed-form `N(V,W,U;I)` for a fixed subspace `U` of `F_q^k`.
pub fn subspace_census(
    ring: &PolyRing,
    n: usize,
    k: usize,
    u: &Subspace,
) -> Result<CensusReport, CensusError> {
    if u.ambient() != k {
        return Err(CensusError::Params(format!(
            "subspace lives in F_q^{}, expected F_q^{k}",
            u.ambient()
        )));
    }
    let d = u.dim();
    let mut report =
        CensusReport::new(CensusKind::Subspace, ring.field(), n, k, Source::ClosedForm);
    report.subspace = Some(u.basis().to_rows());
    for inv in all_invariant_factor_tuples(ring, k) {
        if inv.degree() == d {
            let count = count_with_subspace(ring, n, k, d, &inv)?;
            insert_nonzero(&mut report.entries, inv.key(ring), count);
        }
    }
    Ok(report)
}

/// Closed-form distribution of reachability ranks, keyed by `r`.
pub fn pair_census(ring: &PolyRing, k: usize, n: usize) -> Result<CensusReport, CensusError> {
    let q = ring.field().order() as u64;
    let mut report = CensusReport::new(CensusKind::Pair, ring.field(), n, k, Source::ClosedForm);
    for r in 0..=k {
        insert_nonzero(
            &mut report.entries,
            r.to_string(),
            count_reachability(k, n, r, q)?,
        );
    }
    Ok(report)
}

/// Closed-form fiber sizes of `B -> δ_k(x I_{n,k} - B)`, keyed by polynomial.
pub fn fiber_census(ring: &PolyRing, n: usize, k: usize) -> Result<CensusReport, CensusError> {
    let mut report = CensusReport::new(CensusKind::Fiber, ring.field(), n, k, Source::ClosedForm);
    for f in ring.monic_up_to(k) {
        let count = count_char_poly_rect(ring, &f, n, k)?;
        insert_nonzero(&mut report.entries, ring.format(&f), count);
    }
    Ok(report)
}

/// Key used by nilpotent-extendability reports.
pub const EXTENDABLE_KEY: &str = "extendable";

pub fn nilext_census(ring: &PolyRing, n: usize, k: usize) -> Result<CensusReport, CensusError> {
    let q = ring.field().order() as u64;
    let mut report = CensusReport::new(CensusKind::Nilext, ring.field(), n, k, Source::ClosedForm);
    report.entries.insert(
        EXTENDABLE_KEY.to_string(),
        count_nilpotent_extendable(k, n, q)?,
    );
    Ok(report)
}

#[cfg(test)]
mod tests;
