use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::gf::FieldCtx;

/// What a census tallies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusKind {
    /// `B ∈ M_{n,k}` keyed by the invariant factors of `x I_{n,k} - B`.
    Pencil,
    /// `(A, B) ∈ M_k × M_{k,n-k}` keyed by reachability rank.
    Pair,
    /// `B ∈ M_{n,k}` keyed by `δ_k(x I_{n,k} - B)`.
    Fiber,
    /// Like `Pencil`, restricted to maps whose largest invariant subspace is `U`.
    Subspace,
    /// Maps extendable to a nilpotent operator.
    Nilext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    Enumerated,
}

/// Exact tally keyed by a canonical string. Counts are serialized as decimal
/// strings and keys are kept sorted, so equal reports serialize identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub kind: CensusKind,
    pub field: String,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    /// Reduced echelon basis of `U`, for subspace censuses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<u32>>>,
    pub source: Source,
    #[serde(with = "decimal_map")]
    pub entries: BTreeMap<String, BigUint>,
}

mod decimal_map {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<String, BigUint>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k, v.to_str_radix(10))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, BigUint>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                BigUint::parse_bytes(v.as_bytes(), 10)
                    .map(|n| (k, n))
                    .ok_or_else(|| {
                        D::Error::custom(format!("count {v:?} is not a decimal integer"))
                    })
            })
            .collect()
    }
}

impl CensusReport {
    pub fn new(
        kind: CensusKind,
        field: &FieldCtx,
        n: usize,
        k: usize,
        source: Source,
    ) -> CensusReport {
        CensusReport {
            kind,
            field: field.spec(),
            q: field.order(),
            n,
            k,
            subspace: None,
            source,
            entries: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> BigUint {
        self.entries
            .values()
            .fold(BigUint::zero(), |acc, v| acc + v)
    }

    /// Whether two reports describe the same experiment (ignoring source).
    pub fn same_parameters(&self, other: &CensusReport) -> bool {
        self.kind == other.kind
            && self.field == other.field
            && self.n == other.n
            && self.k == other.k
            && self.subspace == other.subspace
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<CensusReport, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// `key,count` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,count\n");
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{},{}", csv_field(k), v);
        }
        s
    }

    /// Aligned two-column text.
    pub fn to_table(&self) -> String {
        let width = self
            .entries
            .keys()
            .map(|k| k.len())
            .max()
            .unwrap_or(0)
            .max("total".len());
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k:<width$}  {v}");
        }
        let _ = writeln!(s, "{:<width$}  {}", "total", self.total());
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CensusReport {
        let f = FieldCtx::prime(2).unwrap();
        let mut r = CensusReport::new(CensusKind::Pencil, &f, 2, 1, Source::Enumerated);
        r.entries.insert("x+1".into(), BigUint::from(1u32));
        r.entries.insert("1".into(), BigUint::from(2u32));
        r.entries.insert(
            "x".into(),
            BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap(),
        );
        r
    }

    #[test]
    fn json_round_trip_keeps_big_integers_exact() {
        let r = sample();
        let js = r.to_json();
        assert!(js.contains("\"123456789012345678901234567890\""));
        assert!(js.contains("\"source\": \"enumerated\""));
        assert_eq!(CensusReport::from_json(&js).unwrap(), r);
    }

    #[test]
    fn entries_serialize_in_key_order() {
        let js = sample().to_json();
        let a = js.find("\"1\":").unwrap();
        let b = js.find("\"x\":").unwrap();
        let c = js.find("\"x+1\":").unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn rejects_non_decimal_counts() {
        let js = sample().to_json().replace("\"2\"", "\"two\"");
        assert!(CensusReport::from_json(&js).is_err());
    }

    #[test]
    fn csv_and_table() {
        let r = sample();
        assert_eq!(
            r.to_csv(),
            "key,count\n1,2\nx,123456789012345678901234567890\nx+1,1\n"
        );
        assert!(r
            .to_table()
            .ends_with("total  123456789012345678901234567893\n"));
    }
}
