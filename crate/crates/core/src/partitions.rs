//! Integer partitions: construction, conjugation, containment, the pairing
//! `(λ|μ) = Σ λ_i μ_i`, and enumeration.
//!
//! Every stream in this module is emitted in graded order: by size `|λ|`
//! ascending, then reverse-lexicographically on the parts (so `(2)` comes
//! before `(1,1)`). Truncated sums built on these streams are therefore
//! reproducible term by term.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// A weakly decreasing finite sequence of positive integers. Zero parts are
/// dropped on construction; the empty partition is a regular value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partition from parts in any order; zeros are discarded.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    /// Like [`Partition::new`] but rejects sequences that are not weakly
    /// decreasing (trailing zeros are allowed).
    pub fn from_decreasing(parts: &[u32]) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Self::new(parts.to_vec()))
    }

    /// `1^{m_1} 2^{m_2} ...` from a map `part -> multiplicity`.
    pub fn from_multiplicities<I>(mults: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, i64)>,
    {
        let mut parts = Vec::new();
        for (value, m) in mults {
            if m < 0 {
                return Err(invalid(format!("negative multiplicity {m} for part {value}")));
            }
            if value == 0 {
                continue;
            }
            parts.extend(std::iter::repeat_n(value, m as usize));
        }
        Ok(Self::new(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&x| x as u64).sum()
    }

    pub fn first_part(&self) -> u32 {
        self.part(0)
    }

    /// `part -> multiplicity`, only for parts that occur.
    pub fn multiplicities(&self) -> BTreeMap<u32, u64> {
        let mut m = BTreeMap::new();
        for &x in &self.parts {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.first_part() as usize;
        let parts = (1..=width as u32)
            .map(|k| self.parts.iter().take_while(|&&x| x >= k).count() as u32)
            .collect();
        Partition { parts }
    }

    /// `(λ|μ) = Σ λ_i μ_i`, shorter sequence padded with zeros.
    pub fn pairing(&self, other: &Partition) -> u64 {
        self.parts
            .iter()
            .zip(&other.parts)
            .map(|(&a, &b)| a as u64 * b as u64)
            .sum()
    }

    /// `μ ⊆ λ`: `μ_i <= λ_i` for all `i`.
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && mu.parts.iter().zip(&self.parts).all(|(m, l)| m <= l)
    }

    /// All `μ ⊆ λ`, in graded order.
    pub fn subpartitions(&self) -> std::vec::IntoIter<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.len());
        sub_rec(&self.parts, 0, u32::MAX, &mut cur, &mut out);
        sort_graded(&mut out);
        out.into_iter()
    }
}

fn sub_rec(bound: &[u32], i: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    out.push(Partition { parts: cur.clone() });
    if i == bound.len() {
        return;
    }
    for v in 1..=bound[i].min(cap) {
        cur.push(v);
        sub_rec(bound, i + 1, v, cur, out);
        cur.pop();
    }
}

fn sort_graded(v: &mut [Partition]) {
    v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| b.parts.cmp(&a.parts)));
}

/// Every partition with `λ_1 <= max_first_part` and length `<= max_length`,
/// in graded order.
pub fn partitions_up_to(max_first_part: u32, max_length: usize) -> std::vec::IntoIter<Partition> {
    let bound = vec![max_first_part; max_length];
    Partition { parts: bound }.subpartitions()
}

/// Every partition of size at most `max_size`, in graded order.
pub fn partitions_of_size_at_most(max_size: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        let mut cur = Vec::new();
        of_size_rec(n, n, &mut cur, &mut out);
    }
    out
}

fn of_size_rec(rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition { parts: cur.clone() });
        return;
    }
    for v in (1..=rest.min(cap)).rev() {
        cur.push(v);
        of_size_rec(rest - v, v, cur, out);
        cur.pop();
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Accepts the comma form `"2,1,1"` and the multiplicity form `"1^2 2^1"`.
/// The empty string (or `"0"`, or `"∅"`) is the empty partition.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Partition::empty());
        }
        let bad = |tok: &str| Error::Parse(format!("bad partition token {tok:?} in {s:?}"));
        if s.contains('^') {
            let mut mults = Vec::new();
            for tok in s.split_whitespace() {
                let (v, m) = tok.split_once('^').ok_or_else(|| bad(tok))?;
                let v: u32 = v.parse().map_err(|_| bad(tok))?;
                let m: i64 = m.parse().map_err(|_| bad(tok))?;
                mults.push((v, m));
            }
            return Partition::from_multiplicities(mults);
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad(t)))
            .collect::<Result<Vec<u32>>>()?;
        Partition::from_decreasing(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn multiplicity_construction() {
        assert_eq!(Partition::from_multiplicities([(1, 2), (2, 1)]).unwrap(), p(&[2, 1, 1]));
        assert_eq!(Partition::from_multiplicities([]).unwrap(), Partition::empty());
        assert_eq!(Partition::from_multiplicities([(3, 2)]).unwrap(), p(&[3, 3]));
        assert!(matches!(
            Partition::from_multiplicities([(1, -1)]),
            Err(Error::InvalidInput(_))
        ));
        let lam = p(&[3, 1, 1, 1]);
        let back = Partition::from_multiplicities(
            lam.multiplicities().into_iter().map(|(k, v)| (k, v as i64)),
        )
        .unwrap();
        assert_eq!(back, lam);
    }

    #[test]
    fn conjugates() {
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[2, 1]).conjugate(), p(&[2, 1]));
        assert_eq!(p(&[1, 1, 1]).conjugate(), p(&[3]));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
    }

    #[test]
    fn pairings() {
        assert_eq!(p(&[2, 1]).pairing(&p(&[1, 1])), 3);
        assert_eq!(p(&[4, 2]).pairing(&Partition::empty()), 0);
        assert_eq!(p(&[2, 1]).pairing(&p(&[2, 1])), 5);
    }

    #[test]
    fn containment() {
        assert!(p(&[2, 1]).contains(&p(&[1, 1])));
        assert!(!p(&[2, 1]).contains(&p(&[2, 2])));
        assert!(p(&[5]).contains(&Partition::empty()));
        assert!(!p(&[1]).contains(&p(&[1, 1])));
    }

    #[test]
    fn subpartition_streams() {
        let v: Vec<_> = p(&[1, 1]).subpartitions().collect();
        assert_eq!(v, vec![Partition::empty(), p(&[1]), p(&[1, 1])]);
        let v: Vec<_> = p(&[2, 1]).subpartitions().collect();
        assert_eq!(
            v,
            vec![Partition::empty(), p(&[1]), p(&[2]), p(&[1, 1]), p(&[2, 1])]
        );
        assert_eq!(Partition::empty().subpartitions().count(), 1);
    }

    #[test]
    fn bounded_streams() {
        let v: Vec<_> = partitions_up_to(1, 2).collect();
        assert_eq!(v, vec![Partition::empty(), p(&[1]), p(&[1, 1])]);
        let v: Vec<_> = partitions_up_to(2, 1).collect();
        assert_eq!(v, vec![Partition::empty(), p(&[1]), p(&[2])]);
        let v: Vec<_> = partitions_up_to(0, 4).collect();
        assert_eq!(v, vec![Partition::empty()]);
        // C(a+b, b) partitions fit in an a x b box.
        assert_eq!(partitions_up_to(5, 3).count(), 56);
    }

    #[test]
    fn sizes_enumeration() {
        let counts: Vec<usize> = (0..=8)
            .map(|n| partitions_of_size_at_most(n).iter().filter(|l| l.size() == n as u64).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("2,1,1".parse::<Partition>().unwrap(), p(&[2, 1, 1]));
        assert_eq!("1^2 2^1".parse::<Partition>().unwrap(), p(&[2, 1, 1]));
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        assert_eq!("3,0".parse::<Partition>().unwrap(), p(&[3]));
        assert!("1,2".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
        assert!("1^-1".parse::<Partition>().is_err());
        assert_eq!(p(&[2, 1, 1]).to_string(), "2,1,1");
    }

    #[test]
    fn subpartition_count_bounded_by_box() {
        for lam in partitions_of_size_at_most(12) {
            let bound: u64 = lam.parts().iter().map(|&x| x as u64 + 1).product();
            let subs: Vec<_> = lam.subpartitions().collect();
            assert!(subs.len() as u64 <= bound, "{lam}");
            assert!(subs.iter().all(|m| lam.contains(m)));
            let mut dedup = subs.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), subs.len());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn partition() -> impl Strategy<Value = Partition> {
            proptest::collection::vec(1u32..=6, 0..=6)
                .prop_map(Partition::new)
                .prop_filter("size <= 12", |l| l.size() <= 12)
        }

        proptest! {
            #[test]
            fn conjugation_is_size_preserving_involution(l in partition()) {
                let c = l.conjugate();
                prop_assert_eq!(c.size(), l.size());
                prop_assert_eq!(c.conjugate(), l.clone());
                prop_assert!(c.parts().windows(2).all(|w| w[0] >= w[1]));
            }

            #[test]
            fn containment_commutes_with_conjugation(l in partition(), m in partition()) {
                prop_assert_eq!(l.contains(&m), l.conjugate().contains(&m.conjugate()));
            }

            #[test]
            fn pairing_symmetric(l in partition(), m in partition()) {
                prop_assert_eq!(l.pairing(&m), m.pairing(&l));
            }

            #[test]
            fn display_parse_round_trip(l in partition()) {
                prop_assert_eq!(l.to_string().parse::<Partition>().unwrap(), l);
            }
        }
    }
}
