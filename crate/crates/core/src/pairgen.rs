//! The alternating weight pair: two Lorentz weights `w`, `w̃` whose summing
//! vectors fail to dominate ℓ_p in turn while `w_n + w̃_n ≥ n^{1/p-1/q}`.
//!
//! Stage `t ≥ 2` hands the power law to the dominant weight `A` (`w` for
//! even `t`, `w̃` for odd) up to `m_t`, then to the other weight `B` up to
//! `n_t`, while `A` receives a small tail:
//!
//! * `m_t` is the least integer `> n_{t-1}` with `B_{n_{t-1}} ≥ (m_t+1)^{-s}(1+τ)`;
//! * `n_t` is the least integer `> m_t` with `n_t^{1/p} ≥ t(‖s_{m_t}‖_{d(A,q)} + 1)(1+τ)`.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seqspace::{
    lp_norm, pair_norm, CoeffVector, DoubleDouble, Precision, Real, Segment, SegmentForm, SeqError,
    WeightSpec,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_STAGES: u32 = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Relative slack allowed when re-checking by-construction inequalities.
pub const CHECK_TOLERANCE: f64 = 1e-12;
/// Largest support drawn for random domination samples.
pub const SAMPLE_SUPPORT: usize = 50;
/// Indicator vectors `s_n` are swept up to this length.
pub const INDICATOR_LIMIT: u128 = 1_000_000;
pub const FLAG_N_CONDITION: &str = "n-condition-uses-m_{k+1}";
pub const FLAG_FLAT_TAIL: &str = "flat-tail";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PairError {
    #[error("need 1 <= q < p < inf, got p = {p}, q = {q}")]
    Domain { p: f64, q: f64 },
    #[error("need between 1 and {limit} stages, got {k}")]
    Stages { k: u32, limit: u32 },
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error(
        "stage {stage} needs an index above {limit}, beyond what {precision} precision resolves"
    )]
    IndexBudget {
        stage: u32,
        limit: u128,
        precision: Precision,
    },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// How the dominant weight continues on `(m_t, n_t]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// `min(A_m, 1/(n-m))`, constant.
    #[default]
    Flat,
    /// `A_m · 2^{-j}`.
    Geometric,
}

impl std::str::FromStr for TailRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flat" => Ok(TailRule::Flat),
            "geometric" => Ok(TailRule::Geometric),
            other => Err(format!("unknown tail rule {other:?}")),
        }
    }
}

/// One of the two weights of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    W,
    Wt,
}

impl Which {
    /// The weight that carries the power law first at stage `t`.
    pub fn dominant(t: u32) -> Which {
        if t.is_multiple_of(2) {
            Which::W
        } else {
            Which::Wt
        }
    }

    pub fn other(self) -> Which {
        match self {
            Which::W => Which::Wt,
            Which::Wt => Which::W,
        }
    }
}

impl std::str::FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "w" => Ok(Which::W),
            "wt" => Ok(Which::Wt),
            other => Err(format!("expected w or wt, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub precision: Precision,
    pub tail: TailRule,
    pub tolerance: f64,
    pub max_stages: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            precision: Precision::Double,
            tail: TailRule::Flat,
            tolerance: DEFAULT_TOLERANCE,
            max_stages: DEFAULT_MAX_STAGES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub m: u128,
    pub n: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingPair {
    pub schema_version: u32,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub stages: Vec<Stage>,
    pub segments_w: Vec<Segment>,
    pub segments_wt: Vec<Segment>,
    pub precision: Precision,
    pub tail: TailRule,
    pub tolerance: f64,
    pub deviation_flags: Vec<String>,
}

impl AlternatingPair {
    pub fn weights(&self, which: Which) -> WeightSpec {
        let segments = match which {
            Which::W => self.segments_w.clone(),
            Which::Wt => self.segments_wt.clone(),
        };
        WeightSpec {
            segments,
            q: self.q,
            p_reference: Some(self.p),
        }
    }

    pub fn w(&self) -> WeightSpec {
        self.weights(Which::W)
    }

    pub fn wt(&self) -> WeightSpec {
        self.weights(Which::Wt)
    }

    /// `N_built`, the last stage index.
    pub fn n_built(&self) -> u128 {
        self.stages.last().map_or(0, |st| st.n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pair serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn check_domain(p: f64, q: f64) -> Result<(), PairError> {
    if !(q >= 1.0 && q < p && p.is_finite()) {
        return Err(PairError::Domain { p, q });
    }
    Ok(())
}

/// `B_{n_{t-1}} ≥ (m+1)^{-s}(1+τ)`, given `ln B_{n_{t-1}}`.
pub fn m_condition<R: Real>(ln_b: R, m: u128, s: f64, tolerance: f64) -> bool {
    let rhs = -(R::from_f64(s) * R::from_u128(m + 1).ln()) + R::from_f64(tolerance.ln_1p());
    ln_b >= rhs
}

/// `n^{1/p} ≥ t(‖s_m‖ + 1)(1+τ)`, given `‖s_m‖_{d(A,q)}`.
pub fn n_condition<R: Real>(norm_at_m: R, n: u128, t: u32, p: f64, tolerance: f64) -> bool {
    let lhs = R::from_u128(n).ln() / R::from_f64(p);
    let rhs = R::from_f64(f64::from(t)).ln()
        + (norm_at_m + R::one()).ln()
        + R::from_f64(tolerance.ln_1p());
    lhs >= rhs
}

/// `‖s_n‖_{d(w,q)}` in the given arithmetic.
pub fn summing_norm_in<R: Real>(w: &WeightSpec, n: u128) -> Result<R, SeqError> {
    let (sum, _) = w.partial_sum_in::<R>(n)?;
    Ok((sum.ln() / R::from_f64(w.q)).exp())
}

/// Least integer in `(lo, ∞)` satisfying a monotone predicate, starting the
/// search at `guess`. `None` when the answer would pass `budget`.
fn least_above(lo: u128, guess: u128, budget: u128, pred: impl Fn(u128) -> bool) -> Option<u128> {
    let mut low = lo;
    let mut hi = guess.max(lo + 1);
    let mut step = 1u128;
    while !pred(hi) {
        low = hi;
        hi = hi.checked_add(step)?;
        step = step.saturating_mul(2);
        if hi > budget.saturating_mul(2) {
            return None;
        }
    }
    while hi - low > 1 {
        let mid = low + (hi - low) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            low = mid;
        }
    }
    (hi <= budget).then_some(hi)
}

fn push_merged(segments: &mut Vec<Segment>, seg: Segment) {
    if seg.end < seg.start {
        return;
    }
    if let Some(last) = segments.last_mut() {
        if last.form == seg.form && last.end + 1 == seg.start {
            last.end = seg.end;
            return;
        }
    }
    segments.push(seg);
}

fn guess_from_f64(x: f64) -> u128 {
    if x.is_finite() && x > 0.0 {
        (x.ceil() as u128).max(1)
    } else {
        u128::MAX / 4
    }
}

fn build_in<R: Real>(
    p: f64,
    q: f64,
    k: u32,
    opts: &BuildOptions,
) -> Result<AlternatingPair, PairError> {
    let s = 1.0 / q - 1.0 / p;
    let tau = opts.tolerance;
    let budget = opts.precision.index_budget();
    let power = SegmentForm::PowerLaw { s };
    let mut segs = [
        vec![Segment::new(1, 1, power)],
        vec![Segment::new(1, 1, power)],
    ];
    let slot = |which: Which| match which {
        Which::W => 0,
        Which::Wt => 1,
    };
    let spec = |segs: &[Vec<Segment>; 2], which: Which| WeightSpec {
        segments: segs[slot(which)].clone(),
        q,
        p_reference: Some(p),
    };
    let mut stages = vec![Stage { m: 0, n: 1 }];

    for t in 2..=k {
        let (a, b) = (Which::dominant(t), Which::dominant(t).other());
        let prev = stages.last().expect("base stage").n;

        let ln_b: R = spec(&segs, b)
            .ln_value(prev)
            .expect("built prefix covers n_{t-1}");
        let guess = guess_from_f64(((tau.ln_1p() - ln_b.to_f64()) / s).exp() - 1.0);
        let m = least_above(prev, guess, budget, |m| m_condition(ln_b, m, s, tau)).ok_or(
            PairError::IndexBudget {
                stage: t,
                limit: budget,
                precision: opts.precision,
            },
        )?;
        let b_spec = spec(&segs, b);
        let b_form =
            b_spec.segments[b_spec.locate(prev).expect("built prefix covers n_{t-1}")].form;
        let (c, c_lo) = b_form.value_in::<R>(prev).split();
        push_merged(&mut segs[slot(a)], Segment::new(prev + 1, m, power));
        push_merged(
            &mut segs[slot(b)],
            Segment::new(prev + 1, m, SegmentForm::Constant { c, c_lo }),
        );

        let norm: R = summing_norm_in(&spec(&segs, a), m)?;
        let target = f64::from(t) * (norm.to_f64() + 1.0) * (1.0 + tau);
        let guess = guess_from_f64(target.powf(p));
        let n = least_above(m, guess, budget, |n| n_condition(norm, n, t, p, tau)).ok_or(
            PairError::IndexBudget {
                stage: t,
                limit: budget,
                precision: opts.precision,
            },
        )?;
        let a_m: R = power.value_in(m);
        let tail = match opts.tail {
            TailRule::Flat => {
                let flat = R::one() / R::from_u128(n - m);
                let (c, c_lo) = if flat < a_m { flat } else { a_m }.split();
                SegmentForm::Constant { c, c_lo }
            }
            TailRule::Geometric => {
                let (c, c_lo) = a_m.split();
                SegmentForm::Geometric { c, c_lo }
            }
        };
        push_merged(&mut segs[slot(a)], Segment::new(m + 1, n, tail));
        push_merged(&mut segs[slot(b)], Segment::new(m + 1, n, power));
        stages.push(Stage { m, n });
    }

    let mut deviation_flags = vec![FLAG_N_CONDITION.to_string()];
    if opts.tail == TailRule::Flat {
        deviation_flags.push(FLAG_FLAT_TAIL.to_string());
    }
    let [segments_w, segments_wt] = segs;
    Ok(AlternatingPair {
        schema_version: SCHEMA_VERSION,
        p,
        q,
        s,
        stages,
        segments_w,
        segments_wt,
        precision: opts.precision,
        tail: opts.tail,
        tolerance: tau,
        deviation_flags,
    })
}

/// Runs the first `k` stages of the construction.
pub fn build_pair(
    p: f64,
    q: f64,
    k: u32,
    opts: &BuildOptions,
) -> Result<AlternatingPair, PairError> {
    check_domain(p, q)?;
    if k == 0 || k > opts.max_stages {
        return Err(PairError::Stages {
            k,
            limit: opts.max_stages,
        });
    }
    if !(opts.tolerance.is_finite() && opts.tolerance > 0.0) {
        return Err(PairError::Tolerance(opts.tolerance));
    }
    match opts.precision {
        Precision::Double => build_in::<f64>(p, q, k, opts),
        Precision::Extended => build_in::<DoubleDouble>(p, q, k, opts),
    }
}

/// Re-evaluation of both defining conditions at a stage and one below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMinimality {
    pub stage: u32,
    pub m: u128,
    pub n: u128,
    pub m_holds: bool,
    /// `m - 1` is not above `n_{t-1}`, or the inequality fails there.
    pub m_minus_one_fails: bool,
    /// The failure at `m - 1` is the strict lower bound, not the inequality.
    pub m_at_lower_bound: bool,
    pub n_holds: bool,
    pub n_minus_one_fails: bool,
    pub n_at_lower_bound: bool,
}

impl StageMinimality {
    pub fn is_minimal(&self) -> bool {
        self.m_holds && self.m_minus_one_fails && self.n_holds && self.n_minus_one_fails
    }
}

fn minimality_in<R: Real>(pair: &AlternatingPair) -> Result<Vec<StageMinimality>, SeqError> {
    let mut out = Vec::new();
    for (i, win) in pair.stages.windows(2).enumerate() {
        let t = i as u32 + 2;
        let (prev, Stage { m, n }) = (win[0].n, win[1]);
        let (a, b) = (Which::dominant(t), Which::dominant(t).other());
        let ln_b: R = pair.weights(b).ln_value(prev).ok_or(SeqError::Coverage {
            need: prev,
            have: pair.weights(b).covered_prefix(),
        })?;
        let norm: R = summing_norm_in(&pair.weights(a), m)?;
        let (s, p, tau) = (pair.s, pair.p, pair.tolerance);
        let m_at_lower_bound = m - 1 <= prev;
        let n_at_lower_bound = n - 1 <= m;
        out.push(StageMinimality {
            stage: t,
            m,
            n,
            m_holds: m > prev && m_condition(ln_b, m, s, tau),
            m_minus_one_fails: m_at_lower_bound || !m_condition(ln_b, m - 1, s, tau),
            m_at_lower_bound,
            n_holds: n > m && n_condition(norm, n, t, p, tau),
            n_minus_one_fails: n_at_lower_bound || !n_condition(norm, n - 1, t, p, tau),
            n_at_lower_bound,
        });
    }
    Ok(out)
}

/// Checks every stage `t ≥ 2` against its defining conditions.
pub fn stage_minimality(pair: &AlternatingPair) -> Result<Vec<StageMinimality>, SeqError> {
    match pair.precision {
        Precision::Double => minimality_in::<f64>(pair),
        Precision::Extended => minimality_in::<DoubleDouble>(pair),
    }
}

/// `‖s_{n_k}‖_{ℓ_p} / ‖s_{n_k}‖_{d(·,q)}` for stage `k` (1-based).
pub fn stage_ratio(pair: &AlternatingPair, k: usize, which: Which) -> Result<f64, SeqError> {
    let n = pair.stages[k - 1].n;
    let norm = match pair.precision {
        Precision::Double => summing_norm_in::<f64>(&pair.weights(which), n)?,
        Precision::Extended => summing_norm_in::<DoubleDouble>(&pair.weights(which), n)?.to_f64(),
    };
    Ok((n as f64).powf(1.0 / pair.p) / norm)
}

/// A random vector with support at most [`SAMPLE_SUPPORT`] inside `1..=n_max`.
/// Mixes flat blocks, smooth decay and heavy-tailed entries.
pub fn random_test_vector(rng: &mut impl Rng, n_max: u64) -> CoeffVector {
    let size = rng.random_range(1..=SAMPLE_SUPPORT.min(n_max as usize));
    let mut indices = std::collections::BTreeSet::new();
    while indices.len() < size {
        indices.insert(rng.random_range(1..=n_max));
    }
    let style = rng.random_range(0..3u8);
    let entries = indices
        .into_iter()
        .enumerate()
        .map(|(j, i)| {
            let u: f64 = rng.random_range(0.0..1.0);
            let sign = if rng.random_range(0..2u8) == 0 {
                1.0
            } else {
                -1.0
            };
            let v = match style {
                0 => 1.0,
                1 => ((j + 1) as f64).powf(-u * 2.0),
                _ => u.powi(4) + 1e-6,
            };
            (i, sign * v)
        })
        .collect();
    CoeffVector::new(entries).expect("distinct indices")
}

/// Largest relative shortfall `(‖a‖_p - pair_norm(a))/‖a‖_p` over `samples`
/// random vectors, with the number of vectors below `1 - CHECK_TOLERANCE`.
pub fn sample_pair_domination(
    pair: &AlternatingPair,
    samples: usize,
    seed: u64,
) -> Result<(usize, f64), SeqError> {
    let (w, wt) = (pair.w(), pair.wt());
    let n_max = pair.n_built().min(u128::from(u64::MAX)) as u64;
    let outcomes: Vec<Result<f64, SeqError>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let a = random_test_vector(&mut rng, n_max);
            let lp = lp_norm(&a, pair.p)?;
            Ok((lp - pair_norm(&a, &w, &wt)?) / lp)
        })
        .collect();
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for o in outcomes {
        let shortfall = o?;
        if shortfall > CHECK_TOLERANCE {
            violations += 1;
        }
        worst = worst.max(shortfall);
    }
    Ok((violations, worst))
}

/// Checks `pair_norm(s_n) ≥ ‖s_n‖_p` for every `n ≤ min(N_built, limit)`.
/// Returns how many `n` were checked and how many failed.
pub fn indicator_pair_domination(
    pair: &AlternatingPair,
    limit: u128,
) -> Result<(u128, u128), SeqError> {
    let len = pair.n_built().min(limit) as usize;
    let (w, wt) = (pair.w().prefix(len)?, pair.wt().prefix(len)?);
    let mut acc = crate::seqspace::Neumaier::<f64>::new();
    let mut failures = 0;
    for (j, (a, b)) in w.iter().zip(&wt).enumerate() {
        acc.add(a + b);
        let n = (j + 1) as f64;
        if acc.value().powf(1.0 / pair.q) < n.powf(1.0 / pair.p) * (1.0 - CHECK_TOLERANCE) {
            failures += 1;
        }
    }
    Ok((len as u128, failures))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub schema_version: u32,
    pub p: f64,
    pub q: f64,
    pub stages: usize,
    pub n_built: u128,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl PairReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check_interleaving(pair: &AlternatingPair) -> Check {
    let mut problems = Vec::new();
    if pair.stages.first() != Some(&Stage { m: 0, n: 1 }) {
        problems.push("first stage is not (0, 1)".to_string());
    }
    for (i, st) in pair.stages.iter().enumerate() {
        if st.m >= st.n {
            problems.push(format!(
                "stage {}: m = {} is not below n = {}",
                i + 1,
                st.m,
                st.n
            ));
        }
        if let Some(next) = pair.stages.get(i + 1) {
            if st.n >= next.m {
                problems.push(format!(
                    "stage {}: n = {} is not below the next m = {}",
                    i + 1,
                    st.n,
                    next.m
                ));
            }
        }
    }
    Check::new("interleaving", problems.is_empty(), problems.join("; "))
}

fn check_monotonicity(pair: &AlternatingPair) -> Check {
    let mut problems = Vec::new();
    for which in [Which::W, Which::Wt] {
        let spec = pair.weights(which);
        for v in spec.violations() {
            problems.push(format!("{which:?}: {v}"));
        }
        if spec.covered_prefix() < pair.n_built() {
            problems.push(format!(
                "{which:?} covers only 1..={}",
                spec.covered_prefix()
            ));
        }
    }
    Check::new("monotonicity", problems.is_empty(), problems.join("; "))
}

/// Symbolic: on every piece of the common refinement of both segment lists,
/// both weights exist and at least one is the power law `j^{-s}`.
pub fn coverage_gaps(pair: &AlternatingPair) -> Vec<(u128, u128)> {
    let end = pair.n_built();
    let mut cuts: Vec<u128> = pair
        .segments_w
        .iter()
        .chain(&pair.segments_wt)
        .flat_map(|s| [s.start, s.end.saturating_add(1)])
        .chain([1, end + 1])
        .filter(|&c| c >= 1 && c <= end + 1)
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    let (w, wt) = (pair.w(), pair.wt());
    let is_power = |spec: &WeightSpec, j: u128| spec.locate(j).map(|i| spec.segments[i].form);
    let mut gaps: Vec<(u128, u128)> = Vec::new();
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1] - 1);
        let forms = (is_power(&w, a), is_power(&wt, a));
        let ok = match forms {
            (Some(x), Some(y)) => [x, y]
                .iter()
                .any(|f| matches!(f, SegmentForm::PowerLaw { s } if *s == pair.s)),
            _ => false,
        };
        if !ok {
            match gaps.last_mut() {
                Some(last) if last.1 + 1 == a => last.1 = b,
                _ => gaps.push((a, b)),
            }
        }
    }
    gaps
}

fn check_coverage(pair: &AlternatingPair) -> Check {
    let gaps = coverage_gaps(pair);
    let detail = gaps
        .iter()
        .take(5)
        .map(|(a, b)| format!("{a}..={b}"))
        .collect::<Vec<_>>()
        .join(", ");
    Check::new("coverage", gaps.is_empty(), detail)
}

fn check_stage_ratios(pair: &AlternatingPair) -> Check {
    let mut problems = Vec::new();
    let mut seen = Vec::new();
    for k in 1..=pair.stages.len() {
        let which = if k % 2 == 0 { Which::W } else { Which::Wt };
        match stage_ratio(pair, k, which) {
            Ok(r) => {
                seen.push(format!("k={k}: {r:.6}"));
                if r < k as f64 * (1.0 - CHECK_TOLERANCE) {
                    problems.push(format!("k={k}: ratio {r} below {k}"));
                }
            }
            Err(e) => problems.push(format!("k={k}: {e}")),
        }
    }
    let detail = if problems.is_empty() {
        seen.join(", ")
    } else {
        problems.join("; ")
    };
    Check::new("stage-ratios", problems.is_empty(), detail)
}

fn check_minimality(pair: &AlternatingPair) -> Check {
    match stage_minimality(pair) {
        Ok(stages) => {
            let bad: Vec<String> = stages
                .iter()
                .filter(|s| !s.is_minimal())
                .map(|s| format!("stage {} (m = {}, n = {})", s.stage, s.m, s.n))
                .collect();
            Check::new("minimality", bad.is_empty(), bad.join("; "))
        }
        Err(e) => Check::new("minimality", false, e.to_string()),
    }
}

fn check_samples(pair: &AlternatingPair, samples: usize, seed: u64) -> Check {
    match sample_pair_domination(pair, samples, seed) {
        Ok((violations, worst)) => Check::new(
            "pair-domination",
            violations == 0,
            format!(
                "{violations} of {samples} samples violate; worst relative shortfall {worst:.3e}"
            ),
        ),
        Err(e) => Check::new("pair-domination", false, e.to_string()),
    }
}

fn check_indicators(pair: &AlternatingPair) -> Check {
    match indicator_pair_domination(pair, INDICATOR_LIMIT) {
        Ok((checked, failures)) => Check::new(
            "indicator-domination",
            failures == 0,
            format!("{failures} of {checked} summing vectors violate"),
        ),
        Err(e) => Check::new("indicator-domination", false, e.to_string()),
    }
}

/// Pass/fail report on the structural invariants, the stage inequalities,
/// minimality and sampled pair domination. Never fails; problems become
/// failed checks.
pub fn validate_pair(pair: &AlternatingPair, samples: usize, seed: u64) -> PairReport {
    let structural = [
        check_interleaving(pair),
        check_monotonicity(pair),
        check_coverage(pair),
    ];
    let sound = structural.iter().all(|c| c.passed);
    let mut checks = structural.to_vec();
    checks.push(check_stage_ratios(pair));
    checks.push(check_minimality(pair));
    if sound {
        checks.push(check_samples(pair, samples, seed));
        checks.push(check_indicators(pair));
    } else {
        for name in ["pair-domination", "indicator-domination"] {
            checks.push(Check::new(
                name,
                false,
                "skipped: weights are not a valid pair",
            ));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    PairReport {
        schema_version: SCHEMA_VERSION,
        p: pair.p,
        q: pair.q,
        stages: pair.stages.len(),
        n_built: pair.n_built(),
        samples,
        seed,
        checks,
        notes: vec![
            "w in c_0 \\ l_1 concerns the infinite sequence and is not checked on a finite prefix"
                .into(),
        ],
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(p: f64, q: f64, k: u32) -> AlternatingPair {
        build_pair(p, q, k, &BuildOptions::default()).unwrap()
    }

    fn indices(pair: &AlternatingPair) -> Vec<(u128, u128)> {
        pair.stages.iter().map(|s| (s.m, s.n)).collect()
    }

    #[test]
    fn base_case() {
        let pair = flat(2.0, 1.0, 1);
        assert_eq!(indices(&pair), vec![(0, 1)]);
        assert_eq!(pair.w().value(1), Some(1.0));
        assert_eq!(pair.wt().len(), 1);
    }

    #[test]
    fn stage_two_by_hand() {
        // m = 2 is the least index above 1; then sqrt(n) ≥ 2(1 + 2^{-1/2} + 1)
        let pair = flat(2.0, 1.0, 2);
        assert_eq!(indices(&pair), vec![(0, 1), (2, 30)]);
        let bound = 2.0 * (2.0 + 0.5f64.sqrt());
        assert!(30f64.sqrt() >= bound && 29f64.sqrt() < bound);
    }

    /// Independent high-precision rerun of the same stage rules.
    #[test]
    fn matches_reference_indices() {
        assert_eq!(
            indices(&flat(2.0, 1.0, 4)),
            vec![(0, 1), (2, 30), (784, 28074), (744744101, 47619301405)]
        );
        assert_eq!(
            indices(&flat(3.0, 1.5, 3)),
            vec![(0, 1), (2, 122), (1728000, 12645016312)]
        );
        let opts = BuildOptions {
            tail: TailRule::Geometric,
            precision: Precision::Extended,
            ..Default::default()
        };
        let geo = build_pair(2.0, 1.0, 3, &opts).unwrap();
        assert_eq!(
            indices(&geo),
            vec![(0, 1), (2, 30), (2305843013825379972, 83010348654579935676)]
        );
    }

    #[test]
    fn both_precisions_agree_on_flat_pairs() {
        let ext = BuildOptions {
            precision: Precision::Extended,
            ..Default::default()
        };
        for (p, q, k) in [(2.0, 1.0, 4), (3.0, 1.5, 3), (5.0, 1.2, 3)] {
            assert_eq!(
                indices(&flat(p, q, k)),
                indices(&build_pair(p, q, k, &ext).unwrap())
            );
        }
    }

    #[test]
    fn geometric_tail_outgrows_double_precision() {
        let opts = BuildOptions {
            tail: TailRule::Geometric,
            ..Default::default()
        };
        assert!(matches!(
            build_pair(2.0, 1.0, 3, &opts),
            Err(PairError::IndexBudget { stage: 3, .. })
        ));
        let two = build_pair(2.0, 1.0, 2, &opts).unwrap();
        assert!(validate_pair(&two, 200, 1).passed);
    }

    #[test]
    fn parameter_errors() {
        let o = BuildOptions::default();
        assert_eq!(
            build_pair(2.0, 2.0, 3, &o),
            Err(PairError::Domain { p: 2.0, q: 2.0 })
        );
        assert!(build_pair(2.0, 0.5, 3, &o).is_err());
        assert!(build_pair(f64::INFINITY, 1.0, 3, &o).is_err());
        assert_eq!(
            build_pair(2.0, 1.0, 9, &o),
            Err(PairError::Stages { k: 9, limit: 8 })
        );
        assert!(build_pair(2.0, 1.0, 0, &o).is_err());
        let bad = BuildOptions {
            tolerance: 0.0,
            ..o
        };
        assert!(build_pair(2.0, 1.0, 2, &bad).is_err());
    }

    #[test]
    fn built_pairs_validate() {
        for (p, q, k) in [(2.0, 1.0, 4), (3.0, 1.5, 3), (1.5, 1.0, 3)] {
            let pair = flat(p, q, k);
            let report = validate_pair(&pair, 500, 11);
            assert!(report.passed, "{report:#?}");
        }
    }

    #[test]
    fn every_stage_is_minimal() {
        for pair in [flat(2.0, 1.0, 4), flat(3.0, 1.5, 3), flat(5.0, 1.2, 3)] {
            for st in stage_minimality(&pair).unwrap() {
                assert!(st.is_minimal(), "{st:?}");
            }
        }
    }

    #[test]
    fn segments_alternate_and_merge() {
        let pair = flat(2.0, 1.0, 4);
        // w: power on 1..=2, tail on 3..=30 merged with its flat run to 784,
        // power to 744744101, then tail
        let forms: Vec<_> = pair.segments_w.iter().map(|s| (s.start, s.end)).collect();
        assert_eq!(
            forms,
            vec![(1, 2), (3, 784), (785, 744744101), (744744102, 47619301405)]
        );
        assert!(coverage_gaps(&pair).is_empty());
        // each boundary steps down
        let w = pair.w();
        for seg in &pair.segments_w[1..] {
            assert!(w.value(seg.start).unwrap() <= w.value(seg.start - 1).unwrap());
        }
    }

    #[test]
    fn injected_increase_fails_monotonicity() {
        let mut pair = flat(2.0, 1.0, 4);
        pair.segments_w[0].end = 1;
        pair.segments_w
            .insert(1, Segment::new(2, 2, SegmentForm::constant(1.5)));
        let report = validate_pair(&pair, 100, 1);
        assert!(!report.check("monotonicity").unwrap().passed);
        assert!(!report.passed);
    }

    #[test]
    fn deleted_segment_fails_coverage() {
        let mut pair = flat(2.0, 1.0, 4);
        pair.segments_wt.remove(2);
        let report = validate_pair(&pair, 100, 1);
        assert!(!report.check("coverage").unwrap().passed);
        assert!(!report.passed);
    }

    #[test]
    fn ratios_grow_with_the_stage() {
        let pair = flat(2.0, 1.0, 4);
        for k in 1..=4 {
            let which = if k % 2 == 0 { Which::W } else { Which::Wt };
            assert!(stage_ratio(&pair, k, which).unwrap() >= k as f64);
        }
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let a = flat(3.0, 1.5, 3);
        let b = flat(3.0, 1.5, 3);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(AlternatingPair::from_json(&a.to_json()).unwrap(), a);
        assert!(a.to_json().contains("\"deviation_flags\""));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let pair = flat(2.0, 1.0, 3);
        assert_eq!(
            sample_pair_domination(&pair, 300, 5).unwrap(),
            sample_pair_domination(&pair, 300, 5).unwrap()
        );
    }
}
