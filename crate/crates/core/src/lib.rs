//! Exact counting of matrices over finite fields by invariant factors,
//! invariant subspaces, reachability rank and characteristic polynomial,
//! together with brute-force enumerators that check every count.

pub mod census;
pub mod gf;
pub mod oracle;
pub mod polyring;
pub mod smith;

pub use census::{BigCount, CensusError, CensusKind, CensusReport, Partition, Source};
pub use gf::{Elem, FieldCtx, GfError, ScalarMatrix, Subspace};
pub use oracle::{DiffEntry, DiffReport, EnumConfig, OracleError};
pub use polyring::{Factorization, Poly, PolyError, PolyRing};
pub use smith::{InvariantFactors, PolyMatrix, SmithError, SnfResult};
