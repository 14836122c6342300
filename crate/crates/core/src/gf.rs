//! Finite fields `F_q`, `q = p^m <= 2^16`, and dense linear algebra over them.
//!
//! Elements are compact `u16` handles carrying no reference to their field;
//! every operation takes the [`FieldCtx`] explicitly. An element's value is
//! the base-`p` integer whose digits are its polynomial-basis coordinates
//! (digit `i` is the coefficient of `x^i` modulo the field's defining
//! polynomial), so in `F_4 = F_2[x]/(x^2+x+1)` the element `x` is `2` and
//! `x + 1` is `3`.

use std::fmt;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {p}^{m} exceeds the cap of 2^16")]
    TooLarge { p: u64, m: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not an element of a field of order {q}")]
    OutOfRange { value: i64, q: u32 },
    #[error("invalid field spec {0:?}, expected \"p\", \"p^m\" or a prime power q")]
    BadSpec(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("bad subspace basis: {0}")]
    BadSubspace(String),
}

/// An element of some `F_q`, stored as its canonical integer in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub(crate) fn from_raw(v: u32) -> Elem {
        debug_assert!((v as u64) < MAX_ORDER);
        Elem(v as u16)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct LogTables {
    // exp has length 2(q-1) so that exp[log a + log b] never wraps.
    exp: Vec<u16>,
    log: Vec<u32>,
}

/// Immutable description of `F_q` together with its arithmetic tables.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    /// Ascending coefficients over `F_p` of the monic defining polynomial (`m > 1` only).
    modulus: Option<Vec<u32>>,
    logs: Option<LogTables>,
    inverses: Vec<u16>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds `F_{p^m}`. For `m > 1` the defining polynomial is the smallest
    /// monic irreducible of degree `m` when coefficients are compared from the
    /// highest degree down.
    pub fn new(p: u64, m: u32) -> Result<FieldCtx, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = (p as u128)
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER as u128);
        let q = match q {
            Some(q) => q as u32,
            None => return Err(GfError::TooLarge { p, m }),
        };
        let p = p as u32;
        let mut ctx = FieldCtx {
            p,
            m,
            q,
            modulus: None,
            logs: None,
            inverses: Vec::new(),
        };
        if m > 1 {
            let modulus = smallest_irreducible(p, m);
            ctx.modulus = Some(modulus);
            ctx.logs = Some(ctx.build_log_tables());
        }
        ctx.inverses = ctx.build_inverses();
        Ok(ctx)
    }

    pub fn prime(p: u64) -> Result<FieldCtx, GfError> {
        FieldCtx::new(p, 1)
    }

    /// Parses `"p"`, `"p^m"`, or a prime power `"q"` such as `"4"`.
    pub fn from_spec(spec: &str) -> Result<FieldCtx, GfError> {
        let bad = || GfError::BadSpec(spec.to_string());
        let s = spec.trim();
        if let Some((p, m)) = s.split_once('^') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let m: u32 = m.trim().parse().map_err(|_| bad())?;
            return FieldCtx::new(p, m);
        }
        let q: u64 = s.parse().map_err(|_| bad())?;
        if q < 2 {
            return Err(bad());
        }
        if q > MAX_ORDER {
            return Err(GfError::TooLarge { p: q, m: 1 });
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or_else(bad)?;
        let mut rest = q;
        let mut m = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(GfError::NotPrime(q));
        }
        FieldCtx::new(p, m)
    }

    /// `"p"` for prime fields, `"p^m"` otherwise.
    pub fn spec(&self) -> String {
        if self.m == 1 {
            self.p.to_string()
        } else {
            format!("{}^{}", self.p, self.m)
        }
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    /// Checked conversion from a canonical integer.
    pub fn elem(&self, value: i64) -> Result<Elem, GfError> {
        if value < 0 || value >= self.q as i64 {
            return Err(GfError::OutOfRange { value, q: self.q });
        }
        Ok(Elem(value as u16))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, value: i64) -> Elem {
        Elem(value.rem_euclid(self.p as i64) as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q).map(Elem::from_raw)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.m == 1 {
            let s = a.0 as u32 + b.0 as u32;
            return Elem(if s >= self.p { s - self.p } else { s } as u16);
        }
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.m == 1 {
            return if a.0 == 0 {
                a
            } else {
                Elem((self.p - a.0 as u32) as u16)
            };
        }
        if self.p == 2 {
            return a;
        }
        self.digitwise(a, Elem::ZERO, |x, _| (self.p - x) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.logs {
            None => Elem(((a.0 as u32 * b.0 as u32) % self.p) as u16),
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
        }
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(Elem(self.inverses[a.0 as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn digitwise(&self, a: Elem, b: Elem, op: impl Fn(u32, u32) -> u32) -> Elem {
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            out += op(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Elem(out as u16)
    }

    fn digits(&self, v: u32) -> Vec<u32> {
        let mut v = v;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    // Schoolbook product modulo the defining polynomial; only used to build tables.
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let m = self.m as usize;
        let modulus = self.modulus.as_ref().expect("extension field");
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for top in (m..prod.len()).rev() {
            let c = prod[top];
            if c != 0 {
                for (i, &mc) in modulus.iter().enumerate().take(m) {
                    let idx = top - m + i;
                    prod[idx] = (prod[idx] + (p - c) * mc as u64) % p;
                }
                prod[top] = 0;
            }
        }
        let low: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.undigits(&low)
    }

    fn build_log_tables(&self) -> LogTables {
        let q = self.q;
        let order = q - 1;
        for g in 2..q {
            let mut exp = Vec::with_capacity(2 * order as usize);
            let mut x = 1u32;
            let mut cycle = 0;
            loop {
                exp.push(x as u16);
                x = self.slow_mul(x, g);
                cycle += 1;
                if x == 1 || cycle > order {
                    break;
                }
            }
            if cycle != order {
                continue;
            }
            let mut log = vec![0u32; q as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            let doubled: Vec<u16> = exp.iter().chain(exp.iter()).copied().collect();
            return LogTables { exp: doubled, log };
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn build_inverses(&self) -> Vec<u16> {
        let q = self.q as usize;
        let mut inv = vec![0u16; q];
        match &self.logs {
            Some(t) => {
                let order = self.q - 1;
                for (a, slot) in inv.iter_mut().enumerate().skip(1) {
                    *slot = t.exp[((order - t.log[a]) % order) as usize];
                }
            }
            None => {
                let p = self.p as i64;
                for (a, slot) in inv.iter_mut().enumerate().skip(1) {
                    // extended Euclid on (a, p)
                    let (mut r0, mut r1) = (a as i64, p);
                    let (mut s0, mut s1) = (1i64, 0i64);
                    while r1 != 0 {
                        let t = r0 / r1;
                        (r0, r1) = (r1, r0 - t * r1);
                        (s0, s1) = (s1, s0 - t * s1);
                    }
                    *slot = s0.rem_euclid(p) as u16;
                }
            }
        }
        inv
    }
}

/// Remainder of `a` modulo monic `b`, both ascending over `F_p`.
fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let c = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * bc as u64) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn monic_with_low_digits(p: u32, deg: u32, mut v: u64) -> Vec<u32> {
    let mut c = Vec::with_capacity(deg as usize + 1);
    for _ in 0..deg {
        c.push((v % p as u64) as u32);
        v /= p as u64;
    }
    c.push(1);
    c
}

fn is_irreducible_fp(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for v in 0..(p as u64).pow(d) {
            let g = monic_with_low_digits(p, d, v);
            if fp_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

// Digit m-1 of v is the most significant, so increasing v walks candidates in
// lexicographic order read from the highest degree down.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    (0..(p as u64).pow(m))
        .map(|v| monic_with_low_digits(p, m, v))
        .find(|f| is_irreducible_fp(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> ScalarMatrix {
        ScalarMatrix {
            rows,
            cols,
            entries: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> ScalarMatrix {
        let mut m = ScalarMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<Elem>,
    ) -> Result<ScalarMatrix, GfError> {
        if entries.len() != rows * cols {
            return Err(GfError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ScalarMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows of canonical integers. An empty slice gives
    /// a `0 x 0` matrix.
    pub fn from_rows(field: &FieldCtx, rows: &[Vec<i64>]) -> Result<ScalarMatrix, GfError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(GfError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for &v in row {
                entries.push(field.elem(v)?);
            }
        }
        Ok(ScalarMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.value()).collect())
            .collect()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut t = ScalarMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> ScalarMatrix {
        ScalarMatrix {
            rows: end - start,
            cols: self.cols,
            entries: self.entries[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn mul(&self, field: &FieldCtx, rhs: &ScalarMatrix) -> Result<ScalarMatrix, GfError> {
        if self.cols != rhs.rows {
            return Err(GfError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ScalarMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = field.add(out.get(i, j), field.mul(a, rhs.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[&ScalarMatrix]) -> Result<ScalarMatrix, GfError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if let Some(b) = blocks.iter().find(|b| b.cols != cols) {
            return Err(GfError::Shape(format!(
                "vertical stack of blocks with {} and {cols} columns",
                b.cols
            )));
        }
        let entries: Vec<Elem> = blocks
            .iter()
            .flat_map(|b| b.entries.iter().copied())
            .collect();
        Ok(ScalarMatrix {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            entries,
        })
    }

    pub fn hstack(blocks: &[&ScalarMatrix]) -> Result<ScalarMatrix, GfError> {
        let t: Vec<ScalarMatrix> = blocks.iter().map(|b| b.transpose()).collect();
        let refs: Vec<&ScalarMatrix> = t.iter().collect();
        Ok(ScalarMatrix::vstack(&refs)?.transpose())
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, field: &FieldCtx) -> (ScalarMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = eliminate(field, &mut m, true);
        (m, pivots)
    }

    pub fn rank(&self, field: &FieldCtx) -> usize {
        let mut m = self.clone();
        eliminate(field, &mut m, false).len()
    }

    pub fn inverse(&self, field: &FieldCtx) -> Result<ScalarMatrix, GfError> {
        if self.rows != self.cols {
            return Err(GfError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = ScalarMatrix::hstack(&[self, &ScalarMatrix::identity(n)])?;
        let (r, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(GfError::Singular);
        }
        let mut inv = ScalarMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }
}

fn row_axpy(
    field: &FieldCtx,
    m: &mut ScalarMatrix,
    dst: usize,
    src: usize,
    factor: Elem,
    from: usize,
) {
    let cols = m.cols;
    for j in from..cols {
        let s = m.entries[src * cols + j];
        if !s.is_zero() {
            let d = &mut m.entries[dst * cols + j];
            *d = field.sub(*d, field.mul(factor, s));
        }
    }
}

// Gaussian elimination taking the first nonzero entry of each column, scanning
// rows top-down, as pivot. With `reduced` the result is in RREF.
fn eliminate(field: &FieldCtx, m: &mut ScalarMatrix, reduced: bool) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.entries.swap(pr * cols + j, r * cols + j);
            }
        }
        if reduced {
            let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..cols {
                let v = field.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
        }
        let pivot_inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
        let targets = if reduced { 0..rows } else { r + 1..rows };
        for i in targets {
            if i == r {
                continue;
            }
            let v = m.get(i, c);
            if !v.is_zero() {
                row_axpy(field, m, i, r, field.mul(v, pivot_inv), c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &FieldCtx, m: &ScalarMatrix) -> usize {
    m.rank(field)
}

/// A subspace of `F_q^ambient`, held as the nonzero rows of its reduced row
/// echelon basis. Two subspaces are equal iff these bases are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: ScalarMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: ScalarMatrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: ScalarMatrix::identity(ambient),
        }
    }

    /// Row space of `generators`.
    pub fn span(field: &FieldCtx, generators: &ScalarMatrix) -> Subspace {
        let (r, pivots) = generators.rref(field);
        Subspace {
            ambient: generators.cols(),
            basis: r.row_block(0, pivots.len()),
        }
    }

    /// Accepts a basis only if it is already in reduced row echelon form with
    /// no zero rows.
    pub fn from_echelon(field: &FieldCtx, basis: ScalarMatrix) -> Result<Subspace, GfError> {
        let (r, pivots) = basis.rref(field);
        if pivots.len() != basis.rows() {
            return Err(GfError::BadSubspace("rows are linearly dependent".into()));
        }
        if r != basis {
            return Err(GfError::BadSubspace(
                "basis is not in reduced row echelon form".into(),
            ));
        }
        Ok(Subspace {
            ambient: basis.cols(),
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &ScalarMatrix {
        &self.basis
    }

    /// Every `dim`-dimensional subspace of `F_q^ambient`, generated as reduced
    /// echelon matrices (pivot sets in lexicographic order, then free entries
    /// counted in base `q`).
    pub fn enumerate(field: &FieldCtx, ambient: usize, dim: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        if dim > ambient {
            return out;
        }
        for pivots in combinations(ambient, dim) {
            // free slots: (row, col) with col > pivot[row] and col not a pivot
            let free: Vec<(usize, usize)> = (0..dim)
                .flat_map(|r| {
                    let pv = &pivots;
                    ((pv[r] + 1)..ambient)
                        .filter(move |c| !pv.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let q = field.order() as u64;
            let total = q.pow(free.len() as u32);
            for mut idx in 0..total {
                let mut b = ScalarMatrix::zeros(dim, ambient);
                for (r, &c) in pivots.iter().enumerate() {
                    b.set(r, c, Elem::ONE);
                }
                for &(r, c) in free.iter().rev() {
                    b.set(r, c, Elem::from_raw((idx % q) as u32));
                    idx /= q;
                }
                out.push(Subspace { ambient, basis: b });
            }
        }
        out
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `⋂ ker(M_i)` for matrices sharing a column count, as a canonical subspace.
pub fn kernel_intersection(field: &FieldCtx, mats: &[&ScalarMatrix]) -> Result<Subspace, GfError> {
    let stacked = ScalarMatrix::vstack(mats)?;
    Ok(kernel(field, &stacked))
}

pub fn kernel(field: &FieldCtx, m: &ScalarMatrix) -> Subspace {
    let k = m.cols();
    let (r, pivots) = m.rref(field);
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    let mut gens = ScalarMatrix::zeros(free.len(), k);
    for (row, &f) in free.iter().enumerate() {
        gens.set(row, f, Elem::ONE);
        for (pi, &pc) in pivots.iter().enumerate() {
            gens.set(row, pc, field.neg(r.get(pi, f)));
        }
    }
    Subspace::span(field, &gens)
}
