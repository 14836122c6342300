//! Brute-force enumeration engines that tally the same quantities the closed
//! forms in [`crate::census`] predict, and a diff between the two.
//!
//! Matrices are indexed by base-`q` integers: the entries in row-major order
//! are the digits, first entry most significant. For pair censuses the digits
//! of `A` (`k x k`) precede those of `B` (`k x (n-k)`).

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::census::{self, CensusError, CensusKind, CensusReport, Source, EXTENDABLE_KEY};
use crate::gf::{Elem, FieldCtx, ScalarMatrix, Subspace};
use crate::polyring::{Poly, PolyRing};
use crate::smith::{
    invariant_subspace_of, pencil_invariant_factors, reachability_rank, SmithError,
};

pub const DEFAULT_BUDGET: u64 = 1 << 24;
pub const DEFAULT_CHUNK: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("bad subspace: {0}")]
    BadSubspace(String),
    #[error("reports differ in parameters: {0}")]
    ParamMismatch(String),
    #[error("completion search found {completion} extendable maps, criterion found {criterion} ({disagreements} disagreements)")]
    CriterionMismatch {
        completion: u64,
        criterion: u64,
        disagreements: u64,
    },
    #[error("invalid configuration: {0}")]
    Shape(String),
    #[error(transparent)]
    Smith(#[from] SmithError),
    #[error(transparent)]
    Census(#[from] CensusError),
}

#[derive(Clone, Debug)]
pub struct EnumConfig {
    pub field: FieldCtx,
    pub mode: CensusKind,
    pub n: usize,
    pub k: usize,
    /// Required for `CensusKind::Subspace`.
    pub subspace: Option<Subspace>,
    pub workers: usize,
    pub chunk_size: u64,
    pub budget: u64,
}

impl EnumConfig {
    /// Single worker, default chunk size and budget.
    pub fn new(field: FieldCtx, mode: CensusKind, n: usize, k: usize) -> EnumConfig {
        EnumConfig {
            field,
            mode,
            n,
            k,
            subspace: None,
            workers: 1,
            chunk_size: DEFAULT_CHUNK,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> EnumConfig {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> EnumConfig {
        self.budget = budget;
        self
    }

    pub fn with_subspace(mut self, u: Subspace) -> EnumConfig {
        self.subspace = Some(u);
        self
    }

    /// Checks shapes and mode-specific requirements (not the budget).
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.k == 0 || self.k > self.n {
            return Err(OracleError::Shape(format!(
                "need n >= k >= 1, got n={}, k={}",
                self.n, self.k
            )));
        }
        if self.workers == 0 || self.chunk_size == 0 {
            return Err(OracleError::Shape(
                "workers and chunk size must be positive".into(),
            ));
        }
        match self.mode {
            CensusKind::Pair if self.k >= self.n => Err(OracleError::Shape(format!(
                "pair census needs k < n, got n={}, k={}",
                self.n, self.k
            ))),
            CensusKind::Subspace => match &self.subspace {
                None => Err(OracleError::BadSubspace(
                    "subspace census needs a subspace".into(),
                )),
                Some(u) if u.ambient() != self.k => Err(OracleError::BadSubspace(format!(
                    "subspace lives in F_q^{}, expected F_q^{}",
                    u.ambient(),
                    self.k
                ))),
                Some(_) => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Number of base-`q` digits in one enumeration index.
    fn digits(&self) -> usize {
        match self.mode {
            CensusKind::Pair => self.k * self.k + self.k * (self.n - self.k),
            _ => self.n * self.k,
        }
    }

    /// Matrices evaluated by the enumeration, `None` on overflow.
    pub fn evaluations(&self) -> Option<u64> {
        let q = self.field.order() as u64;
        let exp = match self.mode {
            CensusKind::Nilext => self.n * self.n,
            _ => self.digits(),
        };
        q.checked_pow(u32::try_from(exp).ok()?)
    }

    fn check_budget(&self) -> Result<(), OracleError> {
        match self.evaluations() {
            Some(e) if e <= self.budget => Ok(()),
            Some(e) => Err(OracleError::BudgetExceeded {
                needed: e.to_string(),
                budget: self.budget,
            }),
            None => Err(OracleError::BudgetExceeded {
                needed: format!("{}^{}", self.field.order(), self.n * self.n.max(self.k)),
                budget: self.budget,
            }),
        }
    }
}

/// The matrix with base-`q` index `idx` (see the module docs).
pub fn decode_matrix(field: &FieldCtx, rows: usize, cols: usize, mut idx: u64) -> ScalarMatrix {
    let q = field.order() as u64;
    let mut e = vec![Elem::ZERO; rows * cols];
    for slot in e.iter_mut().rev() {
        *slot = Elem::from_raw((idx % q) as u32);
        idx /= q;
    }
    ScalarMatrix::from_entries(rows, cols, e).expect("shape")
}

/// Increments the base-`q` digit vector, last digit least significant.
fn step(digits: &mut [Elem], q: u32) {
    for d in digits.iter_mut().rev() {
        let v = d.value() + 1;
        if v < q {
            *d = Elem::from_raw(v);
            return;
        }
        *d = Elem::ZERO;
    }
}

/// Classifies every index in `[0, total)` across `cfg.workers` threads and
/// sums the per-key counts. `classify` sees the digit vector of the index and
/// may return `None` to skip it.
fn tally<K, F>(
    cfg: &EnumConfig,
    total: u64,
    digits: usize,
    classify: F,
) -> Result<HashMap<K, u64>, OracleError>
where
    K: Eq + Hash + Send,
    F: Fn(&[Elem]) -> Result<Option<K>, OracleError> + Sync,
{
    let q = cfg.field.order();
    let next = AtomicU64::new(0);
    let failed = AtomicBool::new(false);
    let first_error: Mutex<Option<OracleError>> = Mutex::new(None);

    let worker = || {
        let mut local: HashMap<K, u64> = HashMap::new();
        loop {
            if failed.load(Ordering::Relaxed) {
                break;
            }
            let start = next.fetch_add(cfg.chunk_size, Ordering::Relaxed);
            if start >= total {
                break;
            }
            let end = (start + cfg.chunk_size).min(total);
            let mut cur = decode_matrix(&cfg.field, 1, digits, start)
                .entries()
                .to_vec();
            for idx in start..end {
                match classify(&cur) {
                    Ok(Some(key)) => *local.entry(key).or_insert(0) += 1,
                    Ok(None) => {}
                    Err(e) => {
                        failed.store(true, Ordering::Relaxed);
                        first_error.lock().unwrap().get_or_insert(e);
                        return local;
                    }
                }
                if idx + 1 < end {
                    step(&mut cur, q);
                }
            }
        }
        local
    };

    let partials: Vec<HashMap<K, u64>> = if cfg.workers == 1 {
        vec![worker()]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.workers).map(|_| s.spawn(worker)).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut merged: HashMap<K, u64> = HashMap::new();
    for part in partials {
        for (key, c) in part {
            *merged.entry(key).or_insert(0) += c;
        }
    }
    Ok(merged)
}

fn finish<K>(
    cfg: &EnumConfig,
    counts: HashMap<K, u64>,
    key: impl Fn(&K) -> String,
) -> CensusReport {
    let mut report = CensusReport::new(cfg.mode, &cfg.field, cfg.n, cfg.k, Source::Enumerated);
    let mut entries = BTreeMap::new();
    for (k, c) in counts {
        *entries.entry(key(&k)).or_insert_with(BigUint::zero) += c;
    }
    report.entries = entries;
    report
}

fn start(cfg: &EnumConfig, mode: CensusKind) -> Result<u64, OracleError> {
    if cfg.mode != mode {
        return Err(OracleError::Shape(format!(
            "config is for {:?}, not {mode:?}",
            cfg.mode
        )));
    }
    cfg.validate()?;
    cfg.check_budget()?;
    Ok(cfg.evaluations().expect("checked"))
}

fn pencil_from(digits: &[Elem], n: usize, k: usize) -> ScalarMatrix {
    ScalarMatrix::from_entries(n, k, digits.to_vec()).expect("shape")
}

/// Tallies every `B ∈ M_{n,k}(F_q)` by the invariant factors of `x I_{n,k} - B`.
pub fn enumerate_pencils(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    let total = start(cfg, CensusKind::Pencil)?;
    let (n, k) = (cfg.n, cfg.k);
    let counts = tally(cfg, total, n * k, |d| {
        Ok(Some(pencil_invariant_factors(
            &cfg.field,
            &pencil_from(d, n, k),
        )?))
    })?;
    let ring = PolyRing::new(&cfg.field);
    Ok(finish(cfg, counts, |inv| inv.key(&ring)))
}

/// Tallies every pair `(A, B) ∈ M_k × M_{k,n-k}` by `rank [B AB ... A^{k-1}B]`.
pub fn enumerate_pairs(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    let total = start(cfg, CensusKind::Pair)?;
    let (n, k) = (cfg.n, cfg.k);
    let counts = tally(cfg, total, cfg.digits(), |d| {
        let a = ScalarMatrix::from_entries(k, k, d[..k * k].to_vec()).expect("shape");
        let b = ScalarMatrix::from_entries(k, n - k, d[k * k..].to_vec()).expect("shape");
        Ok(Some(reachability_rank(&cfg.field, &a, &b)?))
    })?;
    Ok(finish(cfg, counts, |r| r.to_string()))
}

/// Tallies every `B ∈ M_{n,k}(F_q)` by `δ_k(x I_{n,k} - B)`, the product of its
/// invariant factors.
pub fn enumerate_fibers(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    let total = start(cfg, CensusKind::Fiber)?;
    let (n, k) = (cfg.n, cfg.k);
    let ring = PolyRing::new(&cfg.field);
    let counts = tally(cfg, total, n * k, |d| {
        let inv = pencil_invariant_factors(&cfg.field, &pencil_from(d, n, k))?;
        Ok(Some(inv.product(&ring)))
    })?;
    Ok(finish(cfg, counts, |f| ring.format(f)))
}

/// Tallies, by invariant factors, the `B` whose largest invariant subspace is
/// exactly `cfg.subspace`.
pub fn enumerate_subspace_census(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    let total = start(cfg, CensusKind::Subspace)?;
    let u = cfg.subspace.as_ref().expect("validated");
    let (n, k) = (cfg.n, cfg.k);
    let counts = tally(cfg, total, n * k, |d| {
        let b = pencil_from(d, n, k);
        if invariant_subspace_of(&cfg.field, &b)? != *u {
            return Ok(None);
        }
        Ok(Some(pencil_invariant_factors(&cfg.field, &b)?))
    })?;
    let ring = PolyRing::new(&cfg.field);
    let mut report = finish(cfg, counts, |inv| inv.key(&ring));
    report.subspace = Some(u.basis().to_rows());
    Ok(report)
}

fn is_nilpotent(field: &FieldCtx, m: &ScalarMatrix) -> bool {
    let n = m.rows();
    let mut p = m.clone();
    let mut reach = 1;
    while reach < n {
        p = p.mul(field, &p).expect("square");
        reach *= 2;
    }
    p.is_zero()
}

/// Whether some choice of the last `n - k` columns makes `[B | X]` nilpotent.
fn has_nilpotent_completion(field: &FieldCtx, b: &[Elem], n: usize, k: usize) -> bool {
    let extra = n * (n - k);
    let q = field.order();
    let mut x = vec![Elem::ZERO; extra];
    let combos = (q as u64).pow(extra as u32);
    let mut m = ScalarMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..k {
            m.set(i, j, b[i * k + j]);
        }
    }
    for c in 0..combos {
        for i in 0..n {
            for j in k..n {
                m.set(i, j, x[i * (n - k) + (j - k)]);
            }
        }
        if is_nilpotent(field, &m) {
            return true;
        }
        if c + 1 < combos {
            step(&mut x, q);
        }
    }
    false
}

/// Counts the `B ∈ M_{n,k}(F_q)` that extend to a nilpotent operator on
/// `F_q^n`, by exhaustive completion search. Each `B` is also tested against
/// the criterion "the product of the invariant factors divides `x^n`"; any
/// disagreement is an error.
pub fn enumerate_nilpotent_extendable(cfg: &EnumConfig) -> Result<BigUint, OracleError> {
    let total_evals = start(cfg, CensusKind::Nilext)?;
    let (n, k) = (cfg.n, cfg.k);
    let q = cfg.field.order() as u64;
    let total = total_evals / q.pow((n * (n - k)) as u32);
    let ring = PolyRing::new(&cfg.field);
    let counts = tally(cfg, total, n * k, |d| {
        let by_search = has_nilpotent_completion(&cfg.field, d, n, k);
        let product = pencil_invariant_factors(&cfg.field, &pencil_from(d, n, k))?.product(&ring);
        let by_criterion = product
            .degree()
            .is_some_and(|e| e <= n && product == Poly::monomial(Elem::ONE, e));
        Ok(Some((by_search, by_criterion)))
    })?;
    let get = |key| counts.get(&key).copied().unwrap_or(0);
    let completion = get((true, true)) + get((true, false));
    let criterion = get((true, true)) + get((false, true));
    let disagreements = get((true, false)) + get((false, true));
    if disagreements > 0 {
        return Err(OracleError::CriterionMismatch {
            completion,
            criterion,
            disagreements,
        });
    }
    Ok(BigUint::from(completion))
}

/// Runs the enumeration selected by `cfg.mode`.
pub fn enumerate(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    match cfg.mode {
        CensusKind::Pencil => enumerate_pencils(cfg),
        CensusKind::Pair => enumerate_pairs(cfg),
        CensusKind::Fiber => enumerate_fibers(cfg),
        CensusKind::Subspace => enumerate_subspace_census(cfg),
        CensusKind::Nilext => {
            let count = enumerate_nilpotent_extendable(cfg)?;
            let mut report =
                CensusReport::new(cfg.mode, &cfg.field, cfg.n, cfg.k, Source::Enumerated);
            report.entries.insert(EXTENDABLE_KEY.to_string(), count);
            Ok(report)
        }
    }
}

/// The closed-form report predicting what `enumerate(cfg)` should return.
pub fn closed_form(cfg: &EnumConfig) -> Result<CensusReport, OracleError> {
    cfg.validate()?;
    let ring = PolyRing::new(&cfg.field);
    let (n, k) = (cfg.n, cfg.k);
    Ok(match cfg.mode {
        CensusKind::Pencil => census::pencil_census(&ring, n, k)?,
        CensusKind::Pair => census::pair_census(&ring, k, n)?,
        CensusKind::Fiber => census::fiber_census(&ring, n, k)?,
        CensusKind::Subspace => {
            census::subspace_census(&ring, n, k, cfg.subspace.as_ref().expect("validated"))?
        }
        CensusKind::Nilext => census::nilext_census(&ring, n, k)?,
    })
}

fn opt_decimal<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_some(&n.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub key: String,
    #[serde(serialize_with = "opt_decimal")]
    pub expected: Option<BigUint>,
    #[serde(serialize_with = "opt_decimal")]
    pub observed: Option<BigUint>,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub entries: Vec<DiffEntry>,
    pub verdict: bool,
}

impl DiffReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &DiffEntry> {
        self.entries.iter().filter(|e| !e.matches)
    }

    pub fn summary(&self) -> String {
        let total = self.entries.len();
        if self.verdict {
            format!("all {total} keys match")
        } else {
            format!("{} of {total} keys differ", self.mismatches().count())
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diff serializes");
        s.push('\n');
        s
    }
}

/// Exact per-key comparison over the union of both key sets.
pub fn verify(expected: &CensusReport, observed: &CensusReport) -> Result<DiffReport, OracleError> {
    if !expected.same_parameters(observed) {
        return Err(OracleError::ParamMismatch(format!(
            "expected {:?} over {} (n={}, k={}), observed {:?} over {} (n={}, k={})",
            expected.kind,
            expected.field,
            expected.n,
            expected.k,
            observed.kind,
            observed.field,
            observed.n,
            observed.k
        )));
    }
    let mut keys: Vec<&String> = expected
        .entries
        .keys()
        .chain(observed.entries.keys())
        .collect();
    keys.sort();
    keys.dedup();
    let entries: Vec<DiffEntry> = keys
        .into_iter()
        .map(|key| {
            let e = expected.entries.get(key).cloned();
            let o = observed.entries.get(key).cloned();
            DiffEntry {
                key: key.clone(),
                matches: e.is_some() && e == o,
                expected: e,
                observed: o,
            }
        })
        .collect();
    let verdict = entries.iter().all(|e| e.matches);
    Ok(DiffReport { entries, verdict })
}
