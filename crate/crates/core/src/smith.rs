//! Polynomial matrices, Smith normal form and the invariants of a linear map
//! `T: W -> V` defined on a subspace `W` of `V`.
//!
//! With bases chosen so that the basis of `W` is an initial segment of the
//! basis of `V`, `T` is an `n x k` scalar matrix `B`; its invariant factors
//! are those of the pencil `x I_{n,k} - B`. Writing `B = [A; C]` with `A` the
//! top `k x k` block, the largest `T`-invariant subspace inside `W` is
//! `⋂_{i<k} ker(C A^i)`.

use thiserror::Error;

use crate::gf::{
    combinations, kernel_intersection, Elem, FieldCtx, GfError, ScalarMatrix, Subspace,
};
use crate::polyring::{Poly, PolyError, PolyRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmithError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("minor order {order} outside 1..={max}")]
    OutOfRange { order: usize, max: usize },
    #[error("invariant factor {0} is not monic")]
    NotMonic(String),
    #[error("invariant factors do not form a divisibility chain: {0} does not divide {1}")]
    NotChain(String, String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<Poly>,
    ) -> Result<PolyMatrix, SmithError> {
        if entries.len() != rows * cols {
            return Err(SmithError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Diagonal `rows x cols` matrix with the given leading diagonal entries.
    pub fn diagonal(rows: usize, cols: usize, diag: &[Poly]) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d.clone());
        }
        m
    }

    /// The pencil `x I_{n,k} - B`.
    pub fn pencil(field: &FieldCtx, b: &ScalarMatrix) -> PolyMatrix {
        let (n, k) = (b.rows(), b.cols());
        let mut m = PolyMatrix::zeros(n, k);
        for i in 0..n {
            for j in 0..k {
                let c = field.neg(b.get(i, j));
                let entry = if i == j {
                    Poly::from_coeffs(vec![c, Elem::ONE])
                } else {
                    Poly::constant(c)
                };
                m.set(i, j, entry);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.entries[i * self.cols + j] = v;
    }
}

/// A tuple `(p_1, ..., p_k)` of monic polynomials with `p_i | p_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantFactors(Vec<Poly>);

impl InvariantFactors {
    pub fn new(ring: &PolyRing, polys: Vec<Poly>) -> Result<InvariantFactors, SmithError> {
        for p in &polys {
            if !p.is_monic() {
                return Err(SmithError::NotMonic(ring.format(p)));
            }
        }
        for w in polys.windows(2) {
            if !ring.divides(&w[0], &w[1]) {
                return Err(SmithError::NotChain(ring.format(&w[0]), ring.format(&w[1])));
            }
        }
        Ok(InvariantFactors(polys))
    }

    pub(crate) fn new_unchecked(polys: Vec<Poly>) -> InvariantFactors {
        InvariantFactors(polys)
    }

    /// Parses the `p_1|p_2|...|p_k` key format.
    pub fn parse(ring: &PolyRing, s: &str) -> Result<InvariantFactors, SmithError> {
        let polys = s
            .split('|')
            .map(|t| ring.parse(t))
            .collect::<Result<Vec<_>, _>>()?;
        InvariantFactors::new(ring, polys)
    }

    pub fn polys(&self) -> &[Poly] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, ring: &PolyRing) -> Poly {
        ring.product(&self.0)
    }

    /// `deg ∏ p_i`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(Poly::deg0).sum()
    }

    /// Canonical census key `p_1|p_2|...|p_k`.
    pub fn key(&self, ring: &PolyRing) -> String {
        self.join(ring, "|")
    }

    /// Human form `p_1 | p_2 | ... | p_k`.
    pub fn display(&self, ring: &PolyRing) -> String {
        self.join(ring, " | ")
    }

    fn join(&self, ring: &PolyRing, sep: &str) -> String {
        self.0
            .iter()
            .map(|p| ring.format(p))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `min(n, k)` entries: the nonzero invariant factors followed by zeros.
    pub diagonal: Vec<Poly>,
    pub rank: usize,
}

impl SnfResult {
    pub fn invariant_factors(&self) -> InvariantFactors {
        InvariantFactors(self.diagonal[..self.rank].to_vec())
    }
}

struct Work<'r, 'f> {
    ring: &'r PolyRing<'f>,
    rows: usize,
    cols: usize,
    m: Vec<Poly>,
}

impl Work<'_, '_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> &Poly {
        &self.m[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.m.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.m.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    // row[dst] -= factor * row[src] on columns from..
    fn row_sub(&mut self, dst: usize, src: usize, factor: &Poly, from: usize) {
        for j in from..self.cols {
            let s = self.at(src, j);
            if s.is_zero() {
                continue;
            }
            let t = self.ring.mul(factor, s);
            let d = &self.m[dst * self.cols + j];
            self.m[dst * self.cols + j] = self.ring.sub(d, &t);
        }
    }

    fn col_sub(&mut self, dst: usize, src: usize, factor: &Poly, from: usize) {
        for i in from..self.rows {
            let s = self.at(i, src);
            if s.is_zero() {
                continue;
            }
            let t = self.ring.mul(factor, s);
            let d = &self.m[i * self.cols + dst];
            self.m[i * self.cols + dst] = self.ring.sub(d, &t);
        }
    }

    /// Nonzero entry of least degree in the block `[t.., t..]`, first in
    /// row-major order among ties.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                if let Some(d) = self.at(i, j).degree() {
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn min_in_column(&self, t: usize) -> Option<usize> {
        (t + 1..self.rows)
            .filter_map(|i| self.at(i, t).degree().map(|d| (d, i)))
            .min()
            .map(|(_, i)| i)
    }

    fn min_in_row(&self, t: usize) -> Option<usize> {
        (t + 1..self.cols)
            .filter_map(|j| self.at(t, j).degree().map(|d| (d, j)))
            .min()
            .map(|(_, j)| j)
    }
}

/// Diagonal of the Smith normal form by gcd-pivot elimination.
///
/// For each block the nonzero entry of least degree becomes the pivot; its
/// column and row are reduced by division with remainder, and any nonzero
/// remainder (necessarily of smaller degree) replaces the pivot. A final
/// gcd/lcm sweep over the diagonal enforces `p_i | p_{i+1}`.
pub fn snf(ring: &PolyRing, a: &PolyMatrix) -> SnfResult {
    let mut w = Work {
        ring,
        rows: a.rows,
        cols: a.cols,
        m: a.entries.clone(),
    };
    let r = a.rows.min(a.cols);
    let mut diag = Vec::with_capacity(r);
    for t in 0..r {
        let Some((pi, pj)) = w.min_entry(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let pivot = w.at(t, t).clone();
            for i in t + 1..w.rows {
                if w.at(i, t).is_zero() {
                    continue;
                }
                let (q, _) = ring.divmod(w.at(i, t), &pivot).expect("pivot is nonzero");
                if !q.is_zero() {
                    w.row_sub(i, t, &q, t);
                }
            }
            if let Some(i) = w.min_in_column(t) {
                w.swap_rows(t, i);
                continue;
            }
            for j in t + 1..w.cols {
                if w.at(t, j).is_zero() {
                    continue;
                }
                let (q, _) = ring.divmod(w.at(t, j), &pivot).expect("pivot is nonzero");
                if !q.is_zero() {
                    w.col_sub(j, t, &q, t);
                }
            }
            if let Some(j) = w.min_in_row(t) {
                w.swap_cols(t, j);
                continue;
            }
            break;
        }
        diag.push(ring.monic(w.at(t, t)));
    }
    let rank = diag.len();
    for i in 0..rank {
        for j in i + 1..rank {
            if !ring.divides(&diag[i], &diag[j]) {
                let g = ring.gcd_or_zero(&diag[i], &diag[j]);
                let l = ring.lcm(&diag[i], &diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    diag.resize(r, Poly::zero());
    SnfResult {
        diagonal: diag,
        rank,
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(ring: &PolyRing, a: &PolyMatrix) -> Result<Poly, SmithError> {
    if a.rows != a.cols {
        return Err(SmithError::Shape(format!(
            "determinant of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let rows: Vec<usize> = (0..a.rows).collect();
    let cols: Vec<usize> = (0..a.cols).collect();
    Ok(minor(ring, a, &rows, &cols))
}

fn minor(ring: &PolyRing, a: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Poly {
    match rows.len() {
        0 => Poly::one(),
        1 => a.get(rows[0], cols[0]).clone(),
        _ => {
            let mut acc = Poly::zero();
            let sub_rows = &rows[1..];
            for (idx, &c) in cols.iter().enumerate() {
                let e = a.get(rows[0], c);
                if e.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = ring.mul(e, &minor(ring, a, sub_rows, &sub_cols));
                acc = if idx % 2 == 0 {
                    ring.add(&acc, &term)
                } else {
                    ring.sub(&acc, &term)
                };
            }
            acc
        }
    }
}

/// `δ_i(A)`: monic gcd of all `i x i` minors, zero if they all vanish.
///
/// Plain cofactor expansion over every minor; cost grows like
/// `C(n,i) C(k,i) i!`, fine for `min(n, k) <= 6`.
pub fn det_divisor(ring: &PolyRing, a: &PolyMatrix, order: usize) -> Result<Poly, SmithError> {
    let max = a.rows.min(a.cols);
    if order == 0 || order > max {
        return Err(SmithError::OutOfRange { order, max });
    }
    let row_sets = combinations(a.rows, order);
    let col_sets = combinations(a.cols, order);
    let mut g = Poly::zero();
    for rs in &row_sets {
        for cs in &col_sets {
            let m = minor(ring, a, rs, cs);
            if !m.is_zero() {
                g = ring.gcd_or_zero(&g, &m);
                if g.is_one() {
                    return Ok(g);
                }
            }
        }
    }
    Ok(g)
}

/// The `k` invariant factors of `x I_{n,k} - B`.
pub fn pencil_invariant_factors(
    field: &FieldCtx,
    b: &ScalarMatrix,
) -> Result<InvariantFactors, SmithError> {
    let (n, k) = (b.rows(), b.cols());
    if k == 0 || n < k {
        return Err(SmithError::Shape(format!(
            "pencil needs n >= k >= 1, got {n}x{k}"
        )));
    }
    let ring = PolyRing::new(field);
    let res = snf(&ring, &PolyMatrix::pencil(field, b));
    debug_assert_eq!(res.rank, k, "pencils always have full column rank");
    Ok(res.invariant_factors())
}

/// `⋂_{i=0}^{k-1} ker(C A^i)` for `A` `k x k` and `C` `(n-k) x k`.
pub fn max_invariant_subspace(
    field: &FieldCtx,
    a: &ScalarMatrix,
    c: &ScalarMatrix,
) -> Result<Subspace, SmithError> {
    let k = a.rows();
    if a.cols() != k || c.cols() != k {
        return Err(SmithError::Shape(format!(
            "A is {}x{}, C is {}x{}",
            a.rows(),
            a.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let mut blocks = Vec::with_capacity(k);
    let mut cur = c.clone();
    for i in 0..k {
        if i > 0 {
            cur = cur.mul(field, a)?;
        }
        blocks.push(cur.clone());
    }
    let refs: Vec<&ScalarMatrix> = blocks.iter().collect();
    if refs.is_empty() {
        return Ok(Subspace::zero(0));
    }
    Ok(kernel_intersection(field, &refs)?)
}

/// Splits `B` (`n x k`) into `A` (top `k` rows) and `C` and returns the
/// largest invariant subspace of the map it represents.
pub fn invariant_subspace_of(field: &FieldCtx, b: &ScalarMatrix) -> Result<Subspace, SmithError> {
    let k = b.cols();
    if b.rows() < k {
        return Err(SmithError::Shape(format!(
            "{}x{} has fewer rows than columns",
            b.rows(),
            k
        )));
    }
    let a = b.row_block(0, k);
    let c = b.row_block(k, b.rows());
    max_invariant_subspace(field, &a, &c)
}

/// `[B  AB  ...  A^{k-1}B]`.
pub fn reachability_matrix(
    field: &FieldCtx,
    a: &ScalarMatrix,
    b: &ScalarMatrix,
) -> Result<ScalarMatrix, SmithError> {
    let k = a.rows();
    if a.cols() != k || b.rows() != k || b.cols() == 0 || k == 0 {
        return Err(SmithError::Shape(format!(
            "need A k x k and B k x (n-k) with n > k >= 1, got A {}x{} and B {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut blocks = Vec::with_capacity(k);
    let mut cur = b.clone();
    for i in 0..k {
        if i > 0 {
            cur = a.mul(field, &cur)?;
        }
        blocks.push(cur.clone());
    }
    let refs: Vec<&ScalarMatrix> = blocks.iter().collect();
    Ok(ScalarMatrix::hstack(&refs)?)
}

pub fn reachability_rank(
    field: &FieldCtx,
    a: &ScalarMatrix,
    b: &ScalarMatrix,
) -> Result<usize, SmithError> {
    Ok(reachability_matrix(field, a, b)?.rank(field))
}
