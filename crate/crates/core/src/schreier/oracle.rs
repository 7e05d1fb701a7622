//! Brute-force membership straight from the definitions.
//!
//! Successor families try every cut of the set into successive blocks; limit
//! families try every admissible `n ≤ min F`. No greedy choice, chain
//! shortcut or closed form is used, so this is an independent check on
//! [`super::Schreier`]. Single-threaded; give each worker its own instance.

use std::collections::HashMap;

use super::FiniteSet;
use crate::ordinal::{FamilyIndex, Ordinal};

#[derive(Default)]
pub struct ExhaustiveOracle {
    memo: HashMap<(Ordinal, Vec<u32>), bool>,
}

impl ExhaustiveOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_member(&mut self, set: &FiniteSet, xi: &FamilyIndex) -> bool {
        match xi {
            FamilyIndex::Unrestricted => true,
            FamilyIndex::Countable(o) => self.contains(set.as_slice(), o),
        }
    }

    pub fn contains(&mut self, set: &[u32], xi: &Ordinal) -> bool {
        if set.is_empty() {
            return true;
        }
        if xi.is_zero() {
            return set.len() == 1;
        }
        let key = (xi.clone(), set.to_vec());
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let answer = if xi.is_limit() {
            (1..=u64::from(set[0])).any(|n| {
                let zeta = xi.fundamental(n).expect("limit ordinal");
                self.contains(set, &zeta)
            })
        } else {
            let pred = xi.predecessor().expect("successor ordinal");
            self.cuts(set, &pred, set[0] as usize)
        };
        self.memo.insert(key, answer);
        answer
    }

    /// Can `set` be cut into at most `budget` successive blocks of `S_ζ`?
    fn cuts(&mut self, set: &[u32], zeta: &Ordinal, budget: usize) -> bool {
        if set.is_empty() {
            return true;
        }
        if budget == 0 {
            return false;
        }
        (1..=set.len()).any(|take| {
            self.contains(&set[..take], zeta) && self.cuts(&set[take..], zeta, budget - 1)
        })
    }

    /// `set ∈ S_ξ[S_ζ]` by trying all `2^(|set|-1)` cuts into blocks.
    pub fn is_combined_member(
        &mut self,
        set: &FiniteSet,
        xi: &FamilyIndex,
        zeta: &FamilyIndex,
    ) -> bool {
        let s = set.as_slice();
        if s.is_empty() {
            return self.is_member(set, xi);
        }
        let gaps = s.len() - 1;
        (0..1u64 << gaps).any(|cut_mask| {
            let mut blocks = Vec::new();
            let mut start = 0;
            for i in 0..gaps {
                if cut_mask >> i & 1 == 1 {
                    blocks.push(&s[start..=i]);
                    start = i + 1;
                }
            }
            blocks.push(&s[start..]);
            let mins = FiniteSet::new(blocks.iter().map(|b| b[0]).collect()).expect("increasing");
            blocks.iter().all(|b| {
                let b = FiniteSet::new(b.to_vec()).expect("increasing");
                self.is_member(&b, zeta)
            }) && self.is_member(&mins, xi)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_checked_members() {
        let mut o = ExhaustiveOracle::new();
        let s = |v: &[u32]| FiniteSet::new(v.to_vec()).unwrap();
        let xi = |t: &str| t.parse::<FamilyIndex>().unwrap();
        assert!(o.is_member(&s(&[2, 3, 4, 5]), &xi("2")));
        assert!(!o.is_member(&s(&[1, 2]), &xi("2")));
        assert!(o.is_member(&s(&[5, 6, 7, 8, 9, 10]), &xi("w")));
        // {2,3,4,5,6,7}: cuts into two S_1 blocks need a block of 2 at 2
        // and the rest {4..7} (4 elements, min 4) -> S_2
        assert!(o.is_member(&s(&[2, 3, 4, 5, 6, 7]), &xi("2")));
        assert!(!o.is_member(&s(&[2, 3, 4, 5, 6, 7, 8]), &xi("2")));
        assert!(o.is_combined_member(&s(&[3, 4, 5, 7, 8, 9]), &xi("1"), &xi("1")));
    }
}
