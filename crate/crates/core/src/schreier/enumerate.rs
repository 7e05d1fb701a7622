use serde::{Deserialize, Serialize};

use super::{apply_spread, FiniteSet, Schreier, SchreierError};
use crate::ordinal::FamilyIndex;

fn check_universe(n: u32, limit: u32) -> Result<(), SchreierError> {
    if n == 0 {
        Err(SchreierError::EmptyUniverse)
    } else if n > limit {
        Err(SchreierError::UniverseTooLarge { n, limit })
    } else {
        Ok(())
    }
}

/// Every member of a hereditary family inside `{1..n}`, in lexicographic
/// order, found by depth-first extension (a non-member has no member
/// supersets, so its subtree is skipped).
fn members_where(n: u32, mut member: impl FnMut(&[u32]) -> bool) -> Vec<FiniteSet> {
    let mut out = vec![FiniteSet::empty()];
    let mut stack: Vec<u32> = Vec::new();
    // next candidate to push after the current top
    let mut next = 1u32;
    loop {
        if next <= n {
            stack.push(next);
            if member(&stack) {
                out.push(FiniteSet(stack.clone()));
                next += 1;
            } else {
                stack.pop();
                next += 1;
            }
        } else {
            match stack.pop() {
                Some(top) => next = top + 1,
                None => break,
            }
        }
    }
    out
}

/// All members of `S_ξ` inside `{1..n}` (including `∅`), lexicographically.
pub fn enumerate_members(
    xi: &FamilyIndex,
    n: u32,
    limit: u32,
) -> Result<Vec<FiniteSet>, SchreierError> {
    check_universe(n, limit)?;
    let schreier = Schreier::global();
    Ok(match xi {
        FamilyIndex::Unrestricted => members_where(n, |_| true),
        FamilyIndex::Countable(o) => members_where(n, |s| schreier.contains(s, o)),
    })
}

/// The maximal members of `S_ξ` inside `{1..n}`, sorted lexicographically.
pub fn enumerate_maximal(
    xi: &FamilyIndex,
    n: u32,
    limit: u32,
) -> Result<Vec<FiniteSet>, SchreierError> {
    if xi.is_unrestricted() {
        return Err(SchreierError::BadIndex(xi.clone()));
    }
    let schreier = Schreier::global();
    let mut maximal: Vec<FiniteSet> = enumerate_members(xi, n, limit)?
        .into_iter()
        .filter(|f| {
            (1..=n).filter(|&x| !f.contains(x)).all(|x| {
                let mut bigger = f.as_slice().to_vec();
                let pos = bigger.partition_point(|&y| y < x);
                bigger.insert(pos, x);
                !schreier.is_member(&FiniteSet(bigger), xi)
            })
        })
        .collect();
    maximal.sort();
    Ok(maximal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "d")]
pub enum Threshold {
    Found(u32),
    /// Every candidate `d ≤ N` is refuted inside the universe.
    NotFound,
}

/// Smallest `d` such that every `S ⊆ {1..n}` with `S ∈ S_ξ` and
/// `min S ≥ d` also lies in `S_ζ`. This is an empirical lower estimate of
/// the threshold `d(ξ, ζ)`; it depends on the fundamental sequences.
pub fn threshold(
    xi: &FamilyIndex,
    zeta: &FamilyIndex,
    n: u32,
    limit: u32,
) -> Result<Threshold, SchreierError> {
    let one = FamilyIndex::finite(1);
    if xi < &one || zeta < &one {
        return Err(SchreierError::BadIndex(xi.min(zeta).clone()));
    }
    if xi > zeta {
        return Err(SchreierError::IndexOrder {
            xi: xi.clone(),
            zeta: zeta.clone(),
        });
    }
    let schreier = Schreier::global();
    let worst = enumerate_members(xi, n, limit)?
        .iter()
        .filter(|s| !schreier.is_member(s, zeta))
        .filter_map(FiniteSet::min_element)
        .max();
    Ok(match worst {
        None => Threshold::Found(1),
        Some(m) if m < n => Threshold::Found(m + 1),
        Some(_) => Threshold::NotFound,
    })
}

/// Exhaustive decision of `set ∈ S_ξ[S_ζ]`: searches every cut of `set`
/// into successive blocks lying in `S_ζ` whose minima form a set in `S_ξ`.
pub fn combined_member(set: &[u32], xi: &FamilyIndex, zeta: &FamilyIndex) -> bool {
    fn search(
        rest: &[u32],
        mins: &mut Vec<u32>,
        xi: &FamilyIndex,
        zeta: &FamilyIndex,
        schreier: &Schreier,
    ) -> bool {
        if rest.is_empty() {
            return schreier.is_member(&FiniteSet(mins.clone()), xi);
        }
        mins.push(rest[0]);
        // S_ξ is hereditary: a failing set of minima cannot be repaired
        if !schreier.is_member(&FiniteSet(mins.clone()), xi) {
            mins.pop();
            return false;
        }
        for take in 1..=rest.len() {
            if !schreier.is_member(&FiniteSet(rest[..take].to_vec()), zeta) {
                break;
            }
            if search(&rest[take..], mins, xi, zeta, schreier) {
                mins.pop();
                return true;
            }
        }
        mins.pop();
        false
    }
    search(set, &mut Vec::new(), xi, zeta, Schreier::global())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundL {
    pub xi: FamilyIndex,
    pub zeta: FamilyIndex,
    /// The target family index `ζ + ξ`.
    pub target: FamilyIndex,
    /// Verified prefix `l_1 < l_2 < …` of `L`.
    pub prefix: Vec<u32>,
    /// Number of nonempty sets of `S_ξ[S_ζ]` whose spread image was checked.
    pub checked_sets: usize,
}

/// Greedily grows `L = (l_1 < l_2 < …) ⊆ {1..n}` so that for every
/// `E ∈ S_ξ[S_ζ]` with `E ⊆ {1..|L|}` the spread image `(l_i)_{i∈E}`
/// lies in `S_{ζ+ξ}`. Candidates that break the inclusion are skipped; the
/// return is the longest verified prefix.
pub fn find_l(
    xi: &FamilyIndex,
    zeta: &FamilyIndex,
    n: u32,
    limit: u32,
) -> Result<FoundL, SchreierError> {
    check_universe(n, limit)?;
    let target = zeta.add(xi)?;
    let schreier = Schreier::global();
    // members of S_ξ[S_ζ] on {1..t}; the family does not depend on L
    let mut family: Vec<Vec<u32>> = vec![Vec::new()];
    let mut prefix: Vec<u32> = Vec::new();
    let mut checked = 0usize;
    let mut candidate = 1u32;
    for position in 1..=n {
        // members containing the new position extend earlier members
        let fresh: Vec<Vec<u32>> = family
            .iter()
            .map(|g| {
                let mut h = g.clone();
                h.push(position);
                h
            })
            .filter(|h| combined_member(h, xi, zeta))
            .collect();
        let accepted = loop {
            if candidate > n {
                break None;
            }
            let c = candidate;
            candidate += 1;
            let mut spread = prefix.clone();
            spread.push(c);
            let ok = fresh.iter().all(|h| {
                let image = apply_spread(&FiniteSet(h.clone()), &spread)
                    .expect("positions lie inside the spread");
                schreier.is_member(&image, &target)
            });
            if ok {
                break Some(c);
            }
        };
        match accepted {
            Some(c) => {
                prefix.push(c);
                checked += fresh.len();
                family.extend(fresh);
            }
            None => break,
        }
    }
    Ok(FoundL {
        xi: xi.clone(),
        zeta: zeta.clone(),
        target,
        prefix,
        checked_sets: checked,
    })
}
