use std::fmt;

/// Integer partition with parts stored in weakly decreasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `λ'_i = #{j : λ_j >= i}`.
    pub fn conjugate(&self) -> Partition {
        let largest = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=largest)
                .map(|i| self.0.iter().filter(|&&p| p >= i).count() as u32)
                .collect(),
        )
    }

    /// Every partition of `total` with at most `max_parts` parts, in
    /// reverse lexicographic order.
    pub fn all_with_at_most(total: u32, max_parts: usize) -> Vec<Partition> {
        fn rec(rest: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if slots == 0 {
                return;
            }
            for part in (1..=cap.min(rest)).rev() {
                cur.push(part);
                rec(rest - part, part, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(total, total, max_parts, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
