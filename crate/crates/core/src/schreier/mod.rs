//! Schreier families `S_ξ` of finite subsets of ℕ.
//!
//! * `S_0` is the singletons together with `∅`.
//! * `S_{ζ+1}` holds the sets `F = F_1 ∪ … ∪ F_n` with `F_i ∈ S_ζ` and
//!   `n ≤ F_1 < … < F_n`.
//! * For a limit `ξ`, `S_ξ = ⋃_n {F ∈ S_{ζ_n} : n ≤ min F}` along the
//!   fundamental sequence fixed in [`Ordinal::fundamental`].
//! * `S_{ω_1}` ([`FamilyIndex::Unrestricted`]) is every finite set.
//!
//! `∅` belongs to every family.

mod enumerate;
pub mod oracle;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{FamilyIndex, Ordinal, OrdinalError};

pub use enumerate::{
    combined_member, enumerate_maximal, enumerate_members, find_l, threshold, FoundL, Threshold,
};

/// Default bound on the universe `{1..N}` for exhaustive enumeration.
pub const DEFAULT_MAX_UNIVERSE: u32 = 20;

/// Sets longer than this are not memoized.
const MEMO_MAX_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchreierError {
    #[error("elements must be positive and strictly increasing: {0:?}")]
    NotIncreasing(Vec<u32>),
    #[error("universe size {n} exceeds the configured limit {limit}")]
    UniverseTooLarge { n: u32, limit: u32 },
    #[error("universe size must be positive")]
    EmptyUniverse,
    #[error("spreading sequence has {have} terms but the set needs {need}")]
    PrefixTooShort { have: usize, need: u32 },
    #[error("blocks must be nonempty and successive (E_1 < E_2 < …)")]
    NotSuccessive,
    #[error("index {0} is not allowed here")]
    BadIndex(FamilyIndex),
    #[error("threshold needs xi <= zeta, got xi = {xi}, zeta = {zeta}")]
    IndexOrder { xi: FamilyIndex, zeta: FamilyIndex },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("cannot parse set {0:?}")]
    Parse(String),
}

/// A finite subset of ℕ = {1, 2, …} stored as a strictly increasing list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct FiniteSet(Vec<u32>);

impl FiniteSet {
    pub fn new(elements: Vec<u32>) -> Result<Self, SchreierError> {
        let ok =
            elements.first().is_none_or(|&x| x >= 1) && elements.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(FiniteSet(elements))
        } else {
            Err(SchreierError::NotIncreasing(elements))
        }
    }

    /// Builds a set from arbitrary elements, sorting and deduplicating.
    pub fn from_unsorted(mut elements: Vec<u32>) -> Result<Self, SchreierError> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(elements)
    }

    pub fn empty() -> Self {
        FiniteSet(Vec::new())
    }

    /// `{a, a+1, …, b}`
    pub fn interval(a: u32, b: u32) -> Self {
        assert!(a >= 1, "sets live in ℕ = {{1, 2, …}}");
        FiniteSet((a..=b).collect())
    }

    /// The set encoded by the bits of `mask`: bit `i` stands for `i + 1`.
    pub fn from_mask(mask: u64) -> Self {
        FiniteSet(
            (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_element(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_element(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        FiniteSet::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Accepts `5,6,7`, `{5,6,7}` and the empty forms `{}` / ``.
impl FromStr for FiniteSet {
    type Err = SchreierError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let inner = text
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .trim();
        if inner.is_empty() {
            return Ok(FiniteSet::empty());
        }
        let elements = inner
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| SchreierError::Parse(text.to_string()))?;
        FiniteSet::new(elements)
    }
}

/// Membership oracle for the Schreier families with a concurrent memo table.
///
/// Successor membership uses the greedy decomposition (repeatedly strip the
/// longest prefix lying in `S_ζ`). Because `S_ζ` is hereditary, the greedy
/// cut uses the fewest blocks, and the admissibility condition `n ≤ min F`
/// does not depend on the cut, so greedy decides membership exactly.
#[derive(Default)]
pub struct Schreier {
    memo: DashMap<(Ordinal, Box<[u32]>), bool>,
}

impl Schreier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide instance used by the free functions of this module.
    pub fn global() -> &'static Schreier {
        static GLOBAL: OnceLock<Schreier> = OnceLock::new();
        GLOBAL.get_or_init(Schreier::new)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_member(&self, set: &FiniteSet, xi: &FamilyIndex) -> bool {
        match xi {
            FamilyIndex::Unrestricted => true,
            FamilyIndex::Countable(o) => self.contains(set.as_slice(), o),
        }
    }

    /// Membership of a strictly increasing slice of positive integers.
    pub fn contains(&self, set: &[u32], xi: &Ordinal) -> bool {
        if set.len() <= 1 {
            return true;
        }
        match xi.as_finite() {
            Some(0) => return false,
            Some(1) => return set.len() <= set[0] as usize,
            _ => {}
        }
        // Every family from S_1 up contains S_1.
        if set.len() <= set[0] as usize {
            return true;
        }
        if set.len() > MEMO_MAX_LEN {
            return self.decide(set, xi);
        }
        let key = (xi.clone(), Box::<[u32]>::from(set));
        if let Some(hit) = self.memo.get(&key) {
            return *hit;
        }
        let answer = self.decide(set, xi);
        self.memo.insert(key, answer);
        answer
    }

    fn decide(&self, set: &[u32], xi: &Ordinal) -> bool {
        if xi.is_limit() {
            // n ≤ min F, largest first: for γ+ω the sequence γ+n is a chain,
            // so the first try settles it.
            let min = u64::from(set[0]);
            let chain = xi.terms().last().is_some_and(|&(e, _)| e == 1);
            let lows: Box<dyn Iterator<Item = u64>> = if chain {
                Box::new(std::iter::once(min))
            } else {
                Box::new((1..=min).rev())
            };
            for n in lows {
                let zeta = xi.fundamental(n).expect("limit ordinal");
                if self.contains(set, &zeta) {
                    return true;
                }
            }
            return false;
        }
        // Successor: S_β ⊆ S_{β+1}, so climb γ, γ+1, …, ξ (γ the limit or
        // zero part of ξ) and stop at the first family that holds the set.
        // Sets in S_{γ+j} grow quickly with j, which keeps the climb short.
        let pred = xi.predecessor().expect("successor ordinal");
        let top = xi.as_finite();
        let finite_part = xi.terms().last().map_or(0, |&(_, c)| c);
        let base = pred
            .terms()
            .iter()
            .copied()
            .filter(|&(e, _)| e > 0)
            .collect::<Vec<_>>();
        let base = Ordinal::normalize(&base);
        let start = if top.is_some() { 1 } else { 0 };
        for j in start..finite_part {
            let lower = base.add(&Ordinal::finite(j));
            if lower.is_limit() {
                if self.contains(set, &lower) {
                    return true;
                }
            } else if self.greedy_successor(set, &lower) {
                return true;
            }
        }
        self.greedy_successor(set, xi)
    }

    /// Greedy decision of `set ∈ S_{β+1}` from membership in `S_β`.
    fn greedy_successor(&self, set: &[u32], xi: &Ordinal) -> bool {
        if xi.as_finite() == Some(1) {
            return set.len() <= set[0] as usize;
        }
        let pred = xi.predecessor().expect("successor ordinal");
        let allowed = set[0] as usize;
        let mut rest = set;
        let mut blocks = 0usize;
        while !rest.is_empty() {
            blocks += 1;
            if blocks > allowed {
                return false;
            }
            let take = self.longest_prefix(rest, &pred);
            rest = &rest[take..];
        }
        true
    }

    /// Length of the longest prefix of `set` lying in `S_ζ`. Prefix
    /// membership is monotone because the family is hereditary.
    fn longest_prefix(&self, set: &[u32], zeta: &Ordinal) -> usize {
        let (mut lo, mut hi) = (1usize, set.len());
        if self.contains(set, zeta) {
            return hi;
        }
        // invariant: prefix of length lo is in, prefix of length hi is out
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.contains(&set[..mid], zeta) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// `F ∈ S_ξ` using the process-wide memo table.
pub fn is_member(set: &FiniteSet, xi: &FamilyIndex) -> bool {
    Schreier::global().is_member(set, xi)
}

/// `F(M) = (m_i)_{i∈E}`: substitutes the elements of `set` as 1-based
/// positions into the increasing sequence `spread`.
pub fn apply_spread(set: &FiniteSet, spread: &[u32]) -> Result<FiniteSet, SchreierError> {
    if let Some(max) = set.max_element() {
        if max as usize > spread.len() {
            return Err(SchreierError::PrefixTooShort {
                have: spread.len(),
                need: max,
            });
        }
    }
    FiniteSet::new(
        set.as_slice()
            .iter()
            .map(|&i| spread[i as usize - 1])
            .collect(),
    )
}

/// Decides whether the given successive blocks witness
/// `⋃E_i ∈ S_ξ[S_ζ]`: each block lies in `S_ζ` and the set of block
/// minima lies in `S_ξ`.
pub fn combine_member(
    blocks: &[FiniteSet],
    xi: &FamilyIndex,
    zeta: &FamilyIndex,
) -> Result<bool, SchreierError> {
    if blocks.iter().any(FiniteSet::is_empty)
        || blocks
            .windows(2)
            .any(|w| w[0].max_element() >= w[1].min_element())
    {
        return Err(SchreierError::NotSuccessive);
    }
    let schreier = Schreier::global();
    let mins = FiniteSet(blocks.iter().filter_map(FiniteSet::min_element).collect());
    Ok(blocks.iter().all(|b| schreier.is_member(b, zeta)) && schreier.is_member(&mins, xi))
}

/// `{2n, 2n+2 : n ∈ A}`
pub fn double(set: &FiniteSet) -> FiniteSet {
    let mut out: Vec<u32> = set
        .as_slice()
        .iter()
        .flat_map(|&n| [2 * n, 2 * n + 2])
        .collect();
    out.sort_unstable();
    out.dedup();
    FiniteSet(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> FiniteSet {
        s.parse().unwrap()
    }

    fn idx(s: &str) -> FamilyIndex {
        s.parse().unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(is_member(&set("3,5,9"), &idx("1")));
        assert!(!is_member(&set("2,3,4"), &idx("1")));
        assert!(is_member(&set("2,3,4,5"), &idx("2")));
        assert!(is_member(&set("5,6,7,8,9,10"), &idx("w")));
        assert!(is_member(&set("1,2,3,4,5,6,7,8"), &idx("w1")));
    }

    #[test]
    fn empty_set_is_in_every_family() {
        for xi in ["0", "1", "3", "w", "w^2+w", "w1"] {
            assert!(is_member(&FiniteSet::empty(), &idx(xi)));
        }
    }

    #[test]
    fn s0_is_singletons() {
        assert!(is_member(&set("7"), &idx("0")));
        assert!(!is_member(&set("7,8"), &idx("0")));
    }

    #[test]
    fn min_one_only_admits_singletons() {
        for xi in ["1", "5", "w", "w^2*2+3"] {
            assert!(!is_member(&set("1,2"), &idx(xi)), "{xi}");
        }
    }

    #[test]
    fn large_sets_in_high_finite_families() {
        // {a..N} with a large lands in S_a quickly through the chain climb
        let big = FiniteSet::interval(300, 20_000);
        assert!(is_member(&big, &idx("w")));
        assert!(is_member(&big, &idx("400")));
        assert!(!is_member(&big, &idx("1")));
    }

    #[test]
    fn spread_examples() {
        let evens: Vec<u32> = (1..=10).map(|i| 2 * i).collect();
        assert_eq!(apply_spread(&set("1,2"), &evens).unwrap(), set("2,4"));
        assert_eq!(apply_spread(&set(""), &evens).unwrap(), set(""));
        assert_eq!(
            apply_spread(&set("2,5"), &[3, 4, 7, 10, 11]).unwrap(),
            set("4,11")
        );
        assert_eq!(
            apply_spread(&set("2,6"), &[3, 4, 7, 10, 11]),
            Err(SchreierError::PrefixTooShort { have: 5, need: 6 })
        );
    }

    #[test]
    fn combine_examples() {
        let one = idx("1");
        assert!(combine_member(&[set("2,3"), set("5,6")], &one, &one).unwrap());
        assert!(!combine_member(&[set("1,2")], &one, &one).unwrap());
        assert!(combine_member(&[set("3,4"), set("5"), set("7,8,9")], &one, &one).unwrap());
        assert_eq!(
            combine_member(&[set("3,4"), set("4,5")], &one, &one),
            Err(SchreierError::NotSuccessive)
        );
        assert_eq!(
            combine_member(&[set("3,4"), set("")], &one, &one),
            Err(SchreierError::NotSuccessive)
        );
    }

    #[test]
    fn double_examples() {
        assert_eq!(double(&set("2,3")), set("4,6,8"));
        assert_eq!(double(&set("")), set(""));
        assert_eq!(double(&set("1,4")), set("2,4,8,10"));
    }

    #[test]
    fn finite_set_validation() {
        assert!(FiniteSet::new(vec![0, 1]).is_err());
        assert!(FiniteSet::new(vec![3, 3]).is_err());
        assert!(FiniteSet::new(vec![4, 2]).is_err());
        assert_eq!(FiniteSet::from_unsorted(vec![4, 2, 4]).unwrap(), set("2,4"));
        assert_eq!(FiniteSet::from_mask(0b1011), set("1,2,4"));
        assert_eq!(set("{2, 5}").to_string(), "{2,5}");
        assert!(serde_json::from_str::<FiniteSet>("[3,2]").is_err());
    }
}
