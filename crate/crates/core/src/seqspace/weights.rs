//! Piecewise-symbolic weight sequences.

use serde::{Deserialize, Serialize};

use super::dd::Real;
use super::sums::{power_sum, Neumaier};
use super::SeqError;

/// Relative slack for the monotonicity and normalisation checks.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentForm {
    /// `w_j = j^{-s}`
    PowerLaw { s: f64 },
    /// `w_j = c`
    Constant {
        c: f64,
        /// Low word of `c` in extended precision.
        #[serde(default, skip_serializing_if = "is_zero")]
        c_lo: f64,
    },
    /// `w_j = c·2^{-j}`
    Geometric {
        c: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        c_lo: f64,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl SegmentForm {
    pub fn constant(c: f64) -> Self {
        SegmentForm::Constant { c, c_lo: 0.0 }
    }

    pub fn geometric(c: f64) -> Self {
        SegmentForm::Geometric { c, c_lo: 0.0 }
    }

    fn coefficient<R: Real>(c: f64, c_lo: f64) -> R {
        R::from_f64(c) + R::from_f64(c_lo)
    }

    pub fn ln_value<R: Real>(&self, j: u128) -> R {
        match *self {
            SegmentForm::PowerLaw { s } => -(R::from_f64(s) * R::from_u128(j).ln()),
            SegmentForm::Constant { c, c_lo } => Self::coefficient::<R>(c, c_lo).ln(),
            SegmentForm::Geometric { c, c_lo } => {
                Self::coefficient::<R>(c, c_lo).ln() - R::from_u128(j) * R::from_f64(2.0).ln()
            }
        }
    }

    /// `w_j` in the given arithmetic; constants come back exactly.
    pub fn value_in<R: Real>(&self, j: u128) -> R {
        match *self {
            SegmentForm::Constant { c, c_lo } => Self::coefficient(c, c_lo),
            _ => self.ln_value::<R>(j).exp(),
        }
    }

    pub fn value(&self, j: u128) -> f64 {
        match *self {
            SegmentForm::PowerLaw { s } => (j as f64).powf(-s),
            SegmentForm::Constant { c, .. } => c,
            SegmentForm::Geometric { c, .. } => (c.log2() - j as f64).exp2(),
        }
    }

    /// `Σ_{j=a}^{b}` of this form, with an absolute error bound.
    pub fn sum<R: Real>(&self, a: u128, b: u128) -> (R, f64) {
        if b < a {
            return (R::zero(), 0.0);
        }
        match *self {
            SegmentForm::PowerLaw { s } => power_sum(s, a, b),
            SegmentForm::Constant { c, c_lo } => {
                let v = Self::coefficient::<R>(c, c_lo) * R::from_u128(b - a + 1);
                (v, 2.0 * R::EPSILON * v.to_f64())
            }
            SegmentForm::Geometric { c, c_lo } => {
                // c·(2^{1-a} - 2^{-b}) = c·2^{1-a}·(1 - 2^{-(b-a+1)})
                let pow2 = |e: u128| if e > 1100 { 0.0 } else { (-(e as f64)).exp2() };
                let first = if a == 0 { 2.0 } else { pow2(a - 1) };
                let v = Self::coefficient::<R>(c, c_lo)
                    * R::from_f64(first)
                    * (R::one() - R::from_f64(pow2(b - a + 1)));
                (v, 4.0 * R::EPSILON * v.to_f64())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: u128,
    pub end: u128,
    pub form: SegmentForm,
}

impl Segment {
    pub fn new(start: u128, end: u128, form: SegmentForm) -> Self {
        Segment { start, end, form }
    }

    pub fn contains(&self, j: u128) -> bool {
        self.start <= j && j <= self.end
    }
}

/// A nonincreasing weight sequence `w_1 = 1 ≥ w_2 ≥ …` on `1..=len()`,
/// stored as contiguous symbolic segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub segments: Vec<Segment>,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_reference: Option<f64>,
}

impl WeightSpec {
    /// `w_j = j^{-s}` on `1..=len`.
    pub fn power_law(s: f64, len: u128, q: f64) -> Self {
        WeightSpec {
            segments: vec![Segment::new(1, len, SegmentForm::PowerLaw { s })],
            q,
            p_reference: None,
        }
    }

    /// Last index covered by the final segment.
    pub fn len(&self) -> u128 {
        self.segments.last().map_or(0, |s| s.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of the segment holding index `j`.
    pub fn locate(&self, j: u128) -> Option<usize> {
        let pos = self.segments.partition_point(|s| s.end < j);
        (pos < self.segments.len() && self.segments[pos].contains(j)).then_some(pos)
    }

    pub fn value(&self, j: u128) -> Option<f64> {
        self.locate(j).map(|i| self.segments[i].form.value(j))
    }

    pub fn ln_value<R: Real>(&self, j: u128) -> Option<R> {
        self.locate(j).map(|i| self.segments[i].form.ln_value(j))
    }

    fn check_coverage(&self, n: u128) -> Result<(), SeqError> {
        let have = self.covered_prefix();
        if n > have {
            return Err(SeqError::Coverage { need: n, have });
        }
        Ok(())
    }

    /// Largest `n` such that `1..=n` is covered without gaps.
    pub fn covered_prefix(&self) -> u128 {
        let mut next = 1;
        for seg in &self.segments {
            if seg.start != next || seg.end < seg.start {
                break;
            }
            next = seg.end + 1;
        }
        next - 1
    }

    /// `w_1, …, w_n` materialised.
    pub fn prefix(&self, n: usize) -> Result<Vec<f64>, SeqError> {
        self.check_coverage(n as u128)?;
        let mut out = Vec::with_capacity(n);
        for seg in &self.segments {
            if out.len() >= n {
                break;
            }
            let stop = seg.end.min(n as u128);
            out.extend((seg.start..=stop).map(|j| seg.form.value(j)));
        }
        Ok(out)
    }

    /// `Σ_{j≤n} w_j` with an absolute error bound, segment by segment.
    pub fn partial_sum_in<R: Real>(&self, n: u128) -> Result<(R, f64), SeqError> {
        self.check_coverage(n)?;
        let mut acc = Neumaier::new();
        let mut err = 0.0;
        for seg in &self.segments {
            if seg.start > n {
                break;
            }
            let (v, e) = seg.form.sum::<R>(seg.start, seg.end.min(n));
            acc.add(v);
            err += e;
        }
        let v = acc.value();
        Ok((v, err + 2.0 * R::EPSILON * v.to_f64()))
    }

    pub fn partial_sum(&self, n: u128) -> Result<f64, SeqError> {
        self.partial_sum_in::<f64>(n).map(|(v, _)| v)
    }

    /// Every violated invariant, in segment order. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.q.is_finite() && self.q >= 1.0) {
            out.push(format!("q = {} is outside [1, inf)", self.q));
        }
        if self.segments.is_empty() {
            out.push("no segments".into());
            return out;
        }
        let mut next = 1u128;
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.end < seg.start {
                out.push(format!("segment {i} is empty ({}..{})", seg.start, seg.end));
            }
            if seg.start != next {
                out.push(format!(
                    "segment {i} starts at {} but {} was expected",
                    seg.start, next
                ));
            }
            next = seg.end.saturating_add(1);
            match seg.form {
                SegmentForm::PowerLaw { s } if !(s.is_finite() && s >= 0.0) => {
                    out.push(format!("segment {i} has power-law exponent {s}"))
                }
                SegmentForm::Constant { c, .. } | SegmentForm::Geometric { c, .. }
                    if !(c.is_finite() && c > 0.0) =>
                {
                    out.push(format!(
                        "segment {i} has nonpositive or non-finite constant {c}"
                    ))
                }
                _ => {}
            }
            // the first value is the largest within a segment
            let head: f64 = seg.form.ln_value(seg.start);
            if head > WEIGHT_TOLERANCE {
                out.push(format!("w_{} = {} exceeds 1", seg.start, head.exp()));
            }
            if i > 0 {
                let prev = &self.segments[i - 1];
                let before: f64 = prev.form.ln_value(prev.end);
                if head > before + WEIGHT_TOLERANCE {
                    out.push(format!(
                        "w increases across index {} -> {} ({} -> {})",
                        prev.end,
                        seg.start,
                        before.exp(),
                        head.exp()
                    ));
                }
            }
        }
        if self.segments[0].start == 1 {
            let w1: f64 = self.segments[0].form.ln_value(1);
            if w1.abs() > WEIGHT_TOLERANCE {
                out.push(format!("w_1 = {} rather than 1", w1.exp()));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SeqError::InvalidWeights(v.join("; ")))
        }
    }
}
