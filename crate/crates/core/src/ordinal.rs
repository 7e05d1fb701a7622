//! Ordinals below ω^ω in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `ω^e1·c1 + ω^e2·c2 + …` with strictly
//! decreasing exponents and positive coefficients. [`FamilyIndex`] adds the
//! unrestricted sentinel `ω_1`, which only makes sense as the index of a
//! Schreier family (the family of all finite sets).
//!
//! Text syntax: `w^2*3+w+4`, `w*2`, `7`, `0`, and `w1` for the sentinel.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("fundamental sequence index must be positive")]
    ZeroIndex,
    #[error("the unrestricted index w1 does not support ordinal arithmetic")]
    Unrestricted,
    #[error("cannot parse ordinal {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A countable ordinal below ω^ω.
///
/// Terms are `(exponent, coefficient)` pairs with strictly decreasing
/// exponents and nonzero coefficients; the empty list is 0. With that
/// invariant the derived lexicographic order on the term list is exactly the
/// ordinal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub const fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    /// ω
    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    /// ω^e
    pub fn omega_pow(e: u32) -> Self {
        Ordinal {
            terms: vec![(e, 1)],
        }
    }

    /// ω^e · c
    pub fn monomial(e: u32, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(e, c)],
            }
        }
    }

    /// Interprets `raw` as the ordinal sum `ω^e1·c1 + ω^e2·c2 + …` taken in
    /// the given order. Zero coefficients vanish, equal neighbouring exponents
    /// merge and lower terms standing left of a higher one are absorbed.
    pub fn normalize(raw: &[(u32, u64)]) -> Self {
        raw.iter()
            .fold(Self::zero(), |acc, &(e, c)| acc.add(&Self::monomial(e, c)))
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns `Some(n)` when the ordinal is finite.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some(&(e, _)) if e > 0)
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some(&(0, _)))
    }

    /// For a successor `β+1`, returns `β`.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        last.1 -= 1;
        if last.1 == 0 {
            terms.pop();
        }
        Some(Ordinal { terms })
    }

    /// `self + 1`
    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::finite(1))
    }

    /// Ordinal addition. Terms of `self` below the leading exponent of
    /// `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(&(lead, lead_coeff)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .take_while(|&(e, _)| e >= lead)
            .collect();
        match terms.last_mut() {
            Some(last) if last.0 == lead => {
                last.1 = last
                    .1
                    .checked_add(lead_coeff)
                    .expect("ordinal coefficient overflow");
                terms.extend_from_slice(&other.terms[1..]);
            }
            _ => terms.extend_from_slice(&other.terms),
        }
        Ordinal { terms }
    }

    /// The `n`-th term (`n ≥ 1`) of the fixed fundamental sequence of a limit
    /// ordinal: `γ+ω ↦ γ+n` and `γ+ω^m ↦ γ+ω^(m-1)·n+1` for `m ≥ 2`.
    /// Every term is a successor, the sequence is strictly increasing and its
    /// supremum is `self`.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if n == 0 {
            return Err(OrdinalError::ZeroIndex);
        }
        let &(e, c) = self
            .terms
            .last()
            .filter(|&&(e, _)| e > 0)
            .ok_or_else(|| OrdinalError::NotLimit(self.clone()))?;
        let mut gamma = self.terms.clone();
        gamma.pop();
        if c > 1 {
            gamma.push((e, c - 1));
        }
        let gamma = Ordinal { terms: gamma };
        Ok(if e == 1 {
            gamma.add(&Ordinal::finite(n))
        } else {
            gamma
                .add(&Ordinal::monomial(e - 1, n))
                .add(&Ordinal::finite(1))
        })
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| OrdinalError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(err("empty"));
        }
        if trimmed == "w1" {
            return Err(OrdinalError::Unrestricted);
        }
        let mut raw = Vec::new();
        for term in trimmed.split('+') {
            let term = term.trim();
            let parse_num = |s: &str| -> Result<u64, OrdinalError> {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| err(&format!("bad number {s:?}")))
            };
            if let Some(rest) = term.strip_prefix('w') {
                let (pow, coeff) = match rest.split_once('*') {
                    Some((pow, coeff)) => (pow, parse_num(coeff)?),
                    None => (rest, 1),
                };
                let exponent = match pow.trim() {
                    "" => 1,
                    p => {
                        let p = p
                            .strip_prefix('^')
                            .ok_or_else(|| err(&format!("bad term {term:?}")))?;
                        u32::try_from(parse_num(p)?).map_err(|_| err("exponent too large"))?
                    }
                };
                raw.push((exponent, coeff));
            } else {
                raw.push((0, parse_num(term)?));
            }
        }
        Ok(Ordinal::normalize(&raw))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Index of a Schreier family: a countable ordinal or the unrestricted
/// sentinel `ω_1` standing for the family of all finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyIndex {
    Countable(Ordinal),
    Unrestricted,
}

impl FamilyIndex {
    pub fn finite(n: u64) -> Self {
        FamilyIndex::Countable(Ordinal::finite(n))
    }

    pub fn ordinal(&self) -> Option<&Ordinal> {
        match self {
            FamilyIndex::Countable(o) => Some(o),
            FamilyIndex::Unrestricted => None,
        }
    }

    pub fn is_unrestricted(&self) -> bool {
        matches!(self, FamilyIndex::Unrestricted)
    }

    /// Ordinal sum; the sentinel is rejected.
    pub fn add(&self, other: &FamilyIndex) -> Result<FamilyIndex, OrdinalError> {
        match (self, other) {
            (FamilyIndex::Countable(a), FamilyIndex::Countable(b)) => {
                Ok(FamilyIndex::Countable(a.add(b)))
            }
            _ => Err(OrdinalError::Unrestricted),
        }
    }

    pub fn compare(&self, other: &FamilyIndex) -> Ordering {
        self.cmp(other)
    }
}

impl From<Ordinal> for FamilyIndex {
    fn from(o: Ordinal) -> Self {
        FamilyIndex::Countable(o)
    }
}

impl fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyIndex::Countable(o) => o.fmt(f),
            FamilyIndex::Unrestricted => f.write_str("w1"),
        }
    }
}

impl FromStr for FamilyIndex {
    type Err = OrdinalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.parse::<Ordinal>() {
            Ok(o) => Ok(FamilyIndex::Countable(o)),
            Err(OrdinalError::Unrestricted) => Ok(FamilyIndex::Unrestricted),
            Err(e) => Err(e),
        }
    }
}

impl Serialize for FamilyIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilyIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(Ordinal::normalize(&[(0, 3)]), Ordinal::finite(3));
        assert_eq!(
            Ordinal::normalize(&[(1, 1), (1, 1)]),
            Ordinal::monomial(1, 2)
        );
        assert_eq!(Ordinal::normalize(&[(0, 2), (1, 1)]), Ordinal::omega());
        assert_eq!(Ordinal::normalize(&[(2, 0), (0, 0)]), Ordinal::zero());
    }

    #[test]
    fn add_examples() {
        assert_eq!(Ordinal::omega().add(&Ordinal::finite(1)), ord("w+1"));
        assert_eq!(Ordinal::finite(1).add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(ord("w*2+3").add(&ord("w^2")), ord("w^2"));
        assert_eq!(ord("w^2+w*3").add(&ord("w*2+1")), ord("w^2+w*5+1"));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(Ordinal::omega().cmp(&Ordinal::finite(5)), Ordering::Greater);
        assert_eq!(ord("w^2+1").cmp(&ord("w^2+1")), Ordering::Equal);
        assert_eq!(ord("w*3").cmp(&ord("w^2")), Ordering::Less);
        assert_eq!(ord("w").cmp(&ord("w+1")), Ordering::Less);
        let unrestricted = FamilyIndex::Unrestricted;
        assert_eq!(
            unrestricted.compare(&FamilyIndex::Countable(ord("w^9*9"))),
            Ordering::Greater
        );
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(Ordinal::omega().fundamental(4).unwrap(), Ordinal::finite(4));
        assert_eq!(ord("w^2").fundamental(3).unwrap(), ord("w*3+1"));
        assert_eq!(ord("w*2").fundamental(5).unwrap(), ord("w+5"));
        assert_eq!(ord("w^3+w^2").fundamental(2).unwrap(), ord("w^3+w*2+1"));
    }

    #[test]
    fn fundamental_rejects_non_limits() {
        assert!(matches!(
            Ordinal::finite(3).fundamental(1),
            Err(OrdinalError::NotLimit(_))
        ));
        assert!(Ordinal::zero().fundamental(1).is_err());
        assert_eq!(
            ord("w+1").fundamental(2),
            Err(OrdinalError::NotLimit(ord("w+1")))
        );
        assert_eq!(
            Ordinal::omega().fundamental(0),
            Err(OrdinalError::ZeroIndex)
        );
    }

    #[test]
    fn fundamental_sequences_increase_to_their_limit() {
        for xi in ["w", "w*2", "w^2", "w^2+w", "w^3"] {
            let xi = ord(xi);
            let mut prev = Ordinal::zero();
            for n in 1..=100 {
                let z = xi.fundamental(n).unwrap();
                assert!(!z.is_limit(), "{z} is a limit");
                assert!(z > prev && z < xi, "{prev} < {z} < {xi} fails");
                prev = z;
            }
            // sup = xi: everything strictly below xi is eventually passed
            let below = match xi.terms().last() {
                Some(&(e, _)) if e >= 2 => xi
                    .fundamental(7)
                    .unwrap()
                    .add(&Ordinal::monomial(e - 2, 50)),
                _ => xi.fundamental(40).unwrap(),
            };
            assert!(xi.fundamental(60).unwrap() > below);
        }
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "w", "w*2", "w^2*3+w*1+4", "w^5+w^2+1"] {
            let o = ord(s);
            let printed = o.to_string();
            assert_eq!(ord(&printed), o);
            assert_eq!(ord(&printed).to_string(), printed);
        }
        assert_eq!(ord("w^2*3+w*1+4").to_string(), "w^2*3+w+4");
        assert_eq!(
            "w1".parse::<FamilyIndex>().unwrap(),
            FamilyIndex::Unrestricted
        );
        assert_eq!(FamilyIndex::Unrestricted.to_string(), "w1");
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
    }

    #[test]
    fn sentinel_rejected_by_arithmetic() {
        let a = FamilyIndex::finite(1);
        assert_eq!(
            a.add(&FamilyIndex::Unrestricted),
            Err(OrdinalError::Unrestricted)
        );
        assert_eq!(
            a.add(&FamilyIndex::finite(2)).unwrap(),
            FamilyIndex::finite(3)
        );
    }

    fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
        prop::collection::vec((0u32..5, 0u64..6), 0..4).prop_map(|raw| Ordinal::normalize(&raw))
    }

    proptest! {
        #[test]
        fn addition_is_associative(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn zero_is_right_identity(a in arb_ordinal()) {
            prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
            prop_assert_eq!(Ordinal::zero().add(&a), a);
        }

        #[test]
        fn addition_is_strictly_monotone_on_the_right(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            if b < c {
                prop_assert!(a.add(&b) < a.add(&c));
            }
        }

        #[test]
        fn normalize_is_idempotent(raw in prop::collection::vec((0u32..5, 0u64..6), 0..6)) {
            let once = Ordinal::normalize(&raw);
            prop_assert_eq!(Ordinal::normalize(once.terms()), once);
        }

        #[test]
        fn printer_round_trips(a in arb_ordinal()) {
            let text = a.to_string();
            prop_assert_eq!(text.parse::<Ordinal>().unwrap(), a);
        }
    }
}
