//! Finitely supported vectors and their ℓ_p, c_0, Lorentz `d(w,q)` and
//! direct-sum norms.

pub mod dd;
pub mod sums;
pub mod weights;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dd::{DoubleDouble, Precision, Real};
pub use sums::{power_sum, power_sum_direct, power_sum_euler_maclaurin, Neumaier};
pub use weights::{Segment, SegmentForm, WeightSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("coefficient indices start at 1")]
    ZeroIndex,
    #[error("coefficient index {0} appears twice")]
    DuplicateIndex(u64),
    #[error("coefficient at index {0} is not finite")]
    NonFinite(u64),
    #[error("exponent must lie in [1, inf], got {0}")]
    BadExponent(f64),
    #[error("weights cover 1..={have} but 1..={need} is needed")]
    Coverage { need: u128, have: u128 },
    #[error("weight specs disagree on q ({0} vs {1})")]
    QMismatch(f64, f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("summing vectors have length at least 1")]
    EmptySumming,
    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A finitely supported coefficient sequence as `(index, value)` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct CoeffVector {
    entries: Vec<(u64, f64)>,
}

impl CoeffVector {
    pub fn new(entries: Vec<(u64, f64)>) -> Result<Self, SeqError> {
        let mut seen = HashSet::with_capacity(entries.len());
        for &(i, v) in &entries {
            if i == 0 {
                return Err(SeqError::ZeroIndex);
            }
            if !v.is_finite() {
                return Err(SeqError::NonFinite(i));
            }
            if !seen.insert(i) {
                return Err(SeqError::DuplicateIndex(i));
            }
        }
        Ok(CoeffVector { entries })
    }

    /// Values placed at indices `1, 2, …`.
    pub fn from_dense(values: &[f64]) -> Result<Self, SeqError> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as u64 + 1, v))
                .collect(),
        )
    }

    /// The summing vector `s_n`.
    pub fn indicator(n: u64) -> Self {
        CoeffVector {
            entries: (1..=n).map(|i| (i, 1.0)).collect(),
        }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices carrying a nonzero value, ascending.
    pub fn support(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self
            .entries
            .iter()
            .filter(|e| e.1 != 0.0)
            .map(|e| e.0)
            .collect();
        s.sort_unstable();
        s
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CoeffVector {
            entries: self.entries.iter().map(|&(i, v)| (i, v * factor)).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for CoeffVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<(u64, f64)>::deserialize(d)?;
        CoeffVector::new(entries).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}:{v}")?;
        }
        Ok(())
    }
}

/// `"1:1,2:-0.5"`; a bare value list `"1,0.5"` is placed at `1, 2, …`.
impl FromStr for CoeffVector {
    type Err = SeqError;
    fn from_str(text: &str) -> Result<Self, SeqError> {
        let bad = |reason: &str| SeqError::Parse {
            text: text.into(),
            reason: reason.into(),
        };
        let parts: Vec<&str> = text
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .collect();
        let mut entries = Vec::with_capacity(parts.len());
        for (k, part) in parts.iter().enumerate() {
            let (i, v) = match part.split_once(':') {
                Some((i, v)) => (i.parse::<u64>().map_err(|_| bad("bad index"))?, v),
                None => (k as u64 + 1, *part),
            };
            entries.push((i, v.parse::<f64>().map_err(|_| bad("bad value"))?));
        }
        CoeffVector::new(entries)
    }
}

/// The summing vector `s_n`, kept symbolic so `n` can be huge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummingVector {
    pub n: u128,
}

impl SummingVector {
    pub fn new(n: u128) -> Result<Self, SeqError> {
        if n == 0 {
            return Err(SeqError::EmptySumming);
        }
        Ok(SummingVector { n })
    }
}

/// `|a|` sorted in nonincreasing order.
pub fn rearrange(a: &CoeffVector) -> Vec<f64> {
    let mut v: Vec<f64> = a.entries.iter().map(|e| e.1.abs()).collect();
    v.sort_unstable_by(|x, y| y.total_cmp(x));
    v
}

/// `(Σ x_n^r m_n)^{1/r}` with the largest entry factored out first.
fn weighted_r_norm(sorted: &[f64], masses: impl Iterator<Item = f64>, r: f64) -> f64 {
    let top = sorted.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0.0;
    }
    let acc: Neumaier<f64> = sorted
        .iter()
        .zip(masses)
        .map(|(&x, m)| (x / top).powf(r) * m)
        .collect();
    top * acc.value().powf(1.0 / r)
}

fn nonzero_prefix(sorted: &[f64]) -> &[f64] {
    let k = sorted.partition_point(|&x| x > 0.0);
    &sorted[..k]
}

fn check_q(q: f64) -> Result<(), SeqError> {
    if q.is_nan() || q < 1.0 || q.is_infinite() {
        return Err(SeqError::BadExponent(q));
    }
    Ok(())
}

pub fn lorentz_norm(a: &CoeffVector, w: &WeightSpec) -> Result<f64, SeqError> {
    check_q(w.q)?;
    let sorted = rearrange(a);
    let sorted = nonzero_prefix(&sorted);
    let weights = w.prefix(sorted.len())?;
    Ok(weighted_r_norm(sorted, weights.into_iter(), w.q))
}

/// `sup_σ (Σ |a_{σ(n)}|^q w_n)^{1/q}` over every ordering of the support.
/// Factorial time; meant as an independent check on [`lorentz_norm`].
pub fn lorentz_norm_over_permutations(a: &CoeffVector, w: &WeightSpec) -> Result<f64, SeqError> {
    check_q(w.q)?;
    let mut vals: Vec<f64> = a
        .entries
        .iter()
        .map(|e| e.1.abs())
        .filter(|&x| x > 0.0)
        .collect();
    assert!(
        vals.len() <= 10,
        "permutation search is limited to 10 nonzero entries"
    );
    let weights = w.prefix(vals.len())?;
    let eval = |v: &[f64]| -> f64 {
        v.iter()
            .zip(&weights)
            .map(|(x, wt)| x.powf(w.q) * wt)
            .sum::<f64>()
            .powf(1.0 / w.q)
    };
    // Heap's algorithm
    let n = vals.len();
    let mut best = eval(&vals);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                vals.swap(0, i);
            } else {
                vals.swap(c[i], i);
            }
            best = best.max(eval(&vals));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// ℓ_p norm; `p = ∞` gives the c_0 (max) norm.
pub fn lp_norm(a: &CoeffVector, p: f64) -> Result<f64, SeqError> {
    if p.is_nan() || p < 1.0 {
        return Err(SeqError::BadExponent(p));
    }
    let sorted = rearrange(a);
    if p.is_infinite() {
        return Ok(sorted.first().copied().unwrap_or(0.0));
    }
    Ok(weighted_r_norm(&sorted, std::iter::repeat(1.0), p))
}

fn same_q(w: &WeightSpec, wt: &WeightSpec) -> Result<(), SeqError> {
    if w.q != wt.q {
        return Err(SeqError::QMismatch(w.q, wt.q));
    }
    check_q(w.q)
}

/// Norm in `(d(w,q) ⊕ d(w̃,q))_{ℓ_q}` as `(Σ a*_n^q (w_n + w̃_n))^{1/q}`.
pub fn pair_norm(a: &CoeffVector, w: &WeightSpec, wt: &WeightSpec) -> Result<f64, SeqError> {
    same_q(w, wt)?;
    let sorted = rearrange(a);
    let sorted = nonzero_prefix(&sorted);
    let (x, y) = (w.prefix(sorted.len())?, wt.prefix(sorted.len())?);
    Ok(weighted_r_norm(
        sorted,
        x.iter().zip(&y).map(|(a, b)| a + b),
        w.q,
    ))
}

/// Same norm as `(‖a‖_{d(w,q)}^q + ‖a‖_{d(w̃,q)}^q)^{1/q}`.
pub fn pair_norm_split(a: &CoeffVector, w: &WeightSpec, wt: &WeightSpec) -> Result<f64, SeqError> {
    same_q(w, wt)?;
    let (x, y) = (lorentz_norm(a, w)?, lorentz_norm(a, wt)?);
    let top = x.max(y);
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok(top * ((x / top).powf(w.q) + (y / top).powf(w.q)).powf(1.0 / w.q))
}

/// `‖s_n‖_{d(w,q)} = (Σ_{j≤n} w_j)^{1/q}` without materialising `s_n`.
pub fn summing_lorentz_norm(s: SummingVector, w: &WeightSpec) -> Result<f64, SeqError> {
    check_q(w.q)?;
    Ok(w.partial_sum(s.n)?.powf(1.0 / w.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(text: &str) -> CoeffVector {
        text.parse().unwrap()
    }

    fn root(q: f64) -> WeightSpec {
        WeightSpec::power_law(0.5, 1000, q)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn rearrange_examples() {
        assert_eq!(rearrange(&v("0.5,2,0")), vec![2.0, 0.5, 0.0]);
        assert_eq!(rearrange(&v("7:-4")), vec![4.0]);
        assert_eq!(rearrange(&v("1,-3,2")), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn lorentz_examples() {
        assert_eq!(lorentz_norm(&v("17:1"), &root(1.0)).unwrap(), 1.0);
        assert_eq!(lorentz_norm(&v("3:-1"), &root(2.0)).unwrap(), 1.0);
        assert!(close(
            lorentz_norm(&v("1,1,1"), &root(1.0)).unwrap(),
            2.284457050376173,
            1e-15
        ));
        assert!(close(
            lorentz_norm(&v("0.5,2,0"), &root(1.0)).unwrap(),
            2.3535533905932737,
            1e-15
        ));
    }

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&v("3,4"), 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&v("1,1,1,1"), 1.0).unwrap(), 4.0);
        assert_eq!(lp_norm(&v("1,-2,2"), f64::INFINITY).unwrap(), 2.0);
        assert_eq!(lp_norm(&v("1"), 0.5), Err(SeqError::BadExponent(0.5)));
    }

    #[test]
    fn pair_examples() {
        let w = root(1.0);
        assert!(close(
            pair_norm(&v("1,1"), &w, &w).unwrap(),
            3.414213562373095,
            1e-15
        ));
        for q in [1.0, 1.5, 3.0] {
            let (w, wt) = (root(q), WeightSpec::power_law(0.9, 10, q));
            assert!(close(
                pair_norm(&v("9:1"), &w, &wt).unwrap(),
                2f64.powf(1.0 / q),
                1e-15
            ));
        }
        // the combined weight v_n = n^{-1/2} already beats ℓ_2 on (1,1)
        let combined = lorentz_norm(&v("1,1"), &root(1.0)).unwrap();
        assert!(close(combined, 1.7071067811865475, 1e-15));
        assert!(combined >= lp_norm(&v("1,1"), 2.0).unwrap());
        assert!(pair_norm(&v("1,1"), &root(1.0), &root(2.0)).is_err());
    }

    #[test]
    fn summing_examples() {
        let s = |n| SummingVector::new(n).unwrap();
        assert_eq!(summing_lorentz_norm(s(1), &root(3.0)).unwrap(), 1.0);
        assert!(close(
            summing_lorentz_norm(s(3), &root(1.0)).unwrap(),
            2.284457050376173,
            1e-15
        ));
        let big = WeightSpec::power_law(0.5, 10_000_000, 1.0);
        let direct = power_sum_direct::<f64>(0.5, 1, 1_000_000);
        assert!(close(
            summing_lorentz_norm(s(1_000_000), &big).unwrap(),
            direct,
            1e-12
        ));
        assert!(summing_lorentz_norm(s(1001), &root(1.0)).is_err());
        assert!(SummingVector::new(0).is_err());
    }

    #[test]
    fn coverage_counts_only_nonzero_entries() {
        let w = WeightSpec::power_law(0.5, 2, 1.0);
        assert!(lorentz_norm(&v("1,0,0,2"), &w).is_ok());
        assert!(lorentz_norm(&v("1,1,1"), &w).is_err());
    }

    #[test]
    fn vector_validation_and_text() {
        assert_eq!(CoeffVector::new(vec![(0, 1.0)]), Err(SeqError::ZeroIndex));
        assert_eq!(
            CoeffVector::new(vec![(2, 1.0), (2, 3.0)]),
            Err(SeqError::DuplicateIndex(2))
        );
        assert_eq!(
            CoeffVector::new(vec![(2, f64::NAN)]),
            Err(SeqError::NonFinite(2))
        );
        let a = v("1:1, 5:-0.25");
        assert_eq!(a.to_string(), "1:1,5:-0.25");
        assert_eq!(a.support(), vec![1, 5]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[1,1.0],[5,-0.25]]");
        assert_eq!(serde_json::from_str::<CoeffVector>(&json).unwrap(), a);
        assert!(serde_json::from_str::<CoeffVector>("[[1,1.0],[1,2.0]]").is_err());
    }

    fn arb_vec(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 1..=max)
    }

    fn arb_weights() -> impl Strategy<Value = WeightSpec> {
        (0.0f64..1.5, 1.0f64..4.0).prop_map(|(s, q)| WeightSpec::power_law(s, 64, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn sorted_form_matches_permutation_sup(vals in arb_vec(7), w in arb_weights()) {
            let a = CoeffVector::from_dense(&vals).unwrap();
            let fast = lorentz_norm(&a, &w).unwrap();
            let slow = lorentz_norm_over_permutations(&a, &w).unwrap();
            prop_assert!(close(fast, slow, 1e-12), "{} vs {}", fast, slow);
        }

        #[test]
        fn norm_axioms(x in arb_vec(20), y in arb_vec(20), t in -50.0f64..50.0, w in arb_weights()) {
            let a = CoeffVector::from_dense(&x).unwrap();
            let b = CoeffVector::from_dense(&y).unwrap();
            let n = x.len().max(y.len());
            let sum: Vec<f64> = (0..n)
                .map(|i| x.get(i).copied().unwrap_or(0.0) + y.get(i).copied().unwrap_or(0.0))
                .collect();
            let ab = CoeffVector::from_dense(&sum).unwrap();
            let na = lorentz_norm(&a, &w).unwrap();
            let nb = lorentz_norm(&b, &w).unwrap();
            prop_assert!(close(lorentz_norm(&a.scaled(t), &w).unwrap(), t.abs() * na, 1e-12));
            prop_assert!(lorentz_norm(&ab, &w).unwrap() <= (na + nb) * (1.0 + 1e-12));
            for p in [1.0, 2.5, f64::INFINITY] {
                let (pa, pb) = (lp_norm(&a, p).unwrap(), lp_norm(&b, p).unwrap());
                prop_assert!(close(lp_norm(&a.scaled(t), p).unwrap(), t.abs() * pa, 1e-12));
                prop_assert!(lp_norm(&ab, p).unwrap() <= (pa + pb) * (1.0 + 1e-12));
            }
            // growing one coordinate in modulus cannot shrink the norm
            let mut bigger = x.clone();
            bigger[0] = bigger[0].signum() * (bigger[0].abs() + 1.0);
            let grown = CoeffVector::from_dense(&bigger).unwrap();
            prop_assert!(lorentz_norm(&grown, &w).unwrap() >= na * (1.0 - 1e-12));
        }

        #[test]
        fn pair_formulas_agree(vals in arb_vec(30), w in arb_weights(), s in 0.0f64..1.0) {
            let a = CoeffVector::from_dense(&vals).unwrap();
            let wt = WeightSpec::power_law(s, 64, w.q);
            let direct = pair_norm(&a, &w, &wt).unwrap();
            let split = pair_norm_split(&a, &w, &wt).unwrap();
            prop_assert!(close(direct, split, 1e-12), "{} vs {}", direct, split);
        }
    }
}
