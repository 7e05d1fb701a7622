//! Lower bounds for domination constants `sup ‖a‖_Y / ‖a‖_X` over vectors
//! supported on a Schreier set, singular witnesses along summing vectors, and
//! the finite counterexample report.
//!
//! Every norm here is symmetric and monotone in `|a|`, so the search runs over
//! nonnegative nonincreasing vectors. By spreading and heredity the largest
//! admissible support size in `1..=N` is attained by the tail interval
//! `{N-c+1, …, N}`, so only that size `c*` matters.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::FamilyIndex;
use crate::pairgen::{
    build_pair, coverage_gaps, indicator_pair_domination, sample_pair_domination, stage_ratio,
    AlternatingPair, BuildOptions, PairError, Which, CHECK_TOLERANCE, INDICATOR_LIMIT,
};
use crate::schreier::{FiniteSet, Schreier, SchreierError};
use crate::seqspace::{
    lorentz_norm, lp_norm, pair_norm, CoeffVector, Neumaier, SeqError, WeightSpec,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest `N` for unrestricted supports.
pub const MAX_N_UNRESTRICTED: u32 = 100_000;
/// Largest `N` when supports must lie in a countable `S_ξ`.
pub const MAX_N_COUNTABLE: u32 = 4096;

const GRID_POINTS: usize = 48;
const GRID_HEIGHTS: usize = 19;
const MAX_BLOCKS: usize = 6;
const SWEEPS: usize = 8;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DominateError {
    #[error("N = {n} is outside 1..={limit}")]
    Resource { n: u32, limit: u32 },
    #[error("bad norm descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    #[error(transparent)]
    Pair(#[from] PairError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
// externally tagged: internal tags buffer the content, which drops u128
#[serde(rename_all = "snake_case")]
pub enum NormDescriptor {
    Lp { p: f64 },
    C0,
    Lorentz { weights: WeightSpec },
    PairSum { w: WeightSpec, wt: WeightSpec },
}

impl NormDescriptor {
    pub fn validate(&self) -> Result<(), DominateError> {
        match self {
            NormDescriptor::Lp { p } if !(p.is_finite() && *p >= 1.0) => {
                Err(DominateError::Descriptor(format!(
                    "lp needs a finite p >= 1, got {p} (use c0 for the max norm)"
                )))
            }
            NormDescriptor::Lorentz { weights } => Ok(weights.validate()?),
            NormDescriptor::PairSum { w, wt } => {
                w.validate()?;
                wt.validate()?;
                if w.q != wt.q {
                    return Err(SeqError::QMismatch(w.q, wt.q).into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn norm(&self, a: &CoeffVector) -> Result<f64, SeqError> {
        match self {
            NormDescriptor::Lp { p } => lp_norm(a, *p),
            NormDescriptor::C0 => lp_norm(a, f64::INFINITY),
            NormDescriptor::Lorentz { weights } => lorentz_norm(a, weights),
            NormDescriptor::PairSum { w, wt } => pair_norm(a, w, wt),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormDescriptor::Lp { p } => format!("lp:{p}"),
            NormDescriptor::C0 => "c0".into(),
            NormDescriptor::Lorentz { weights } => format!("lorentz:q={}", weights.q),
            NormDescriptor::PairSum { w, .. } => format!("pair:q={}", w.q),
        }
    }

    /// Norm of a nonincreasing vector as a function of block values.
    fn profile(&self, len: usize) -> Result<Profile, SeqError> {
        let cumulative = |masses: Vec<f64>| {
            let mut acc = Neumaier::<f64>::new();
            let mut cum = Vec::with_capacity(masses.len() + 1);
            cum.push(0.0);
            for m in masses {
                acc.add(m);
                cum.push(acc.value());
            }
            cum
        };
        Ok(match self {
            NormDescriptor::Lp { p } => Profile {
                r: Some(*p),
                cum: (0..=len).map(|i| i as f64).collect(),
            },
            NormDescriptor::C0 => Profile {
                r: None,
                cum: Vec::new(),
            },
            NormDescriptor::Lorentz { weights } => Profile {
                r: Some(weights.q),
                cum: cumulative(weights.prefix(len)?),
            },
            NormDescriptor::PairSum { w, wt } => {
                let (a, b) = (w.prefix(len)?, wt.prefix(len)?);
                Profile {
                    r: Some(w.q),
                    cum: cumulative(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                }
            }
        })
    }
}

/// `(Σ_b v_b^r (P[end_b] - P[end_{b-1}]))^{1/r}`, or `v_1` for the max norm.
struct Profile {
    r: Option<f64>,
    cum: Vec<f64>,
}

impl Profile {
    fn eval(&self, blocks: &[(usize, f64)]) -> f64 {
        let Some(r) = self.r else {
            return blocks.first().map_or(0.0, |b| b.1);
        };
        let mut prev = 0;
        let mut acc = 0.0;
        for &(end, v) in blocks {
            if v > 0.0 {
                acc += v.powf(r) * (self.cum[end] - self.cum[prev]);
            }
            prev = end;
        }
        acc.powf(1.0 / r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FlatFamily,
    Grid,
    RandomRestartAscent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub schema_version: u32,
    pub x: NormDescriptor,
    pub y: NormDescriptor,
    pub xi: FamilyIndex,
    pub n_max: u32,
    pub budget: usize,
    pub seed: u64,
    /// Largest support size admissible in `S_ξ ∩ 2^{1..N}`.
    pub max_support: u32,
    /// Best ratio found; a lower bound for the supremum.
    pub constant_estimate: f64,
    pub is_lower_bound: bool,
    pub method: Method,
    pub witness: CoeffVector,
    pub witness_support: FiniteSet,
}

impl DominationReport {
    /// Re-evaluates the witness and checks its support is admissible.
    pub fn verify(&self, rel_tol: f64) -> Result<bool, DominateError> {
        let ratio = self.y.norm(&self.witness)? / self.x.norm(&self.witness)?;
        let support: Vec<u32> = self.witness.support().iter().map(|&i| i as u32).collect();
        let admissible = support == self.witness_support.as_slice()
            && Schreier::global().is_member(&self.witness_support, &self.xi);
        Ok(admissible
            && (ratio - self.constant_estimate).abs() <= rel_tol * self.constant_estimate.abs())
    }
}

/// Largest `c` such that some `c`-element subset of `1..=n` lies in `S_ξ`.
pub fn max_support(xi: &FamilyIndex, n: u32) -> u32 {
    let FamilyIndex::Countable(o) = xi else {
        return n;
    };
    let schreier = Schreier::global();
    let fits = |c: u32| schreier.contains(&((n - c + 1)..=n).collect::<Vec<_>>(), o);
    // c = 1 always fits; heredity makes `fits` monotone
    let (mut lo, mut hi) = (1u32, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

#[derive(Debug, Clone)]
struct Candidate {
    ratio: f64,
    blocks: Vec<(usize, f64)>,
    method: Method,
}

struct Objective {
    x: Profile,
    y: Profile,
}

impl Objective {
    fn ratio(&self, blocks: &[(usize, f64)]) -> f64 {
        let den = self.x.eval(blocks);
        if den > 0.0 {
            self.y.eval(blocks) / den
        } else {
            0.0
        }
    }

    fn candidate(&self, blocks: Vec<(usize, f64)>, method: Method) -> Candidate {
        Candidate {
            ratio: self.ratio(&blocks),
            blocks,
            method,
        }
    }
}

fn geometric_grid(len: usize, points: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..points)
        .map(|i| ((len as f64).powf(i as f64 / (points - 1) as f64)).round() as usize)
        .chain([1, len])
        .filter(|&x| x >= 1 && x <= len)
        .collect();
    g.sort_unstable();
    g.dedup();
    g
}

fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn ascend(obj: &Objective, len: usize, rng: &mut ChaCha8Rng) -> Candidate {
    // log-uniform support length, a few blocks, descending values from 1
    let l = ((len as f64).powf(rng.random_range(0.0..=1.0)).round() as usize).clamp(1, len);
    let nblocks = rng.random_range(1..=MAX_BLOCKS).min(l);
    let mut ends = std::collections::BTreeSet::new();
    ends.insert(l);
    while ends.len() < nblocks {
        ends.insert(rng.random_range(1..l));
    }
    let mut vals: Vec<f64> = (0..nblocks).map(|_| rng.random_range(0.0..1.0)).collect();
    vals.sort_unstable_by(|a, b| b.total_cmp(a));
    vals[0] = 1.0;
    let mut blocks: Vec<(usize, f64)> = ends.into_iter().zip(vals).collect();
    let mut best = obj.ratio(&blocks);

    for _ in 0..SWEEPS {
        let before = best;
        for i in 1..blocks.len() {
            let hi = blocks[i - 1].1;
            let lo = blocks.get(i + 1).map_or(0.0, |b| b.1);
            let mut trial = blocks.clone();
            let (v, r) = golden_max(
                |v| {
                    trial[i].1 = v;
                    obj.ratio(&trial)
                },
                lo,
                hi,
            );
            if r > best {
                blocks[i].1 = v;
                best = r;
            }
        }
        for i in 0..blocks.len() {
            let lo = if i == 0 { 1 } else { blocks[i - 1].0 + 1 };
            let hi = blocks.get(i + 1).map_or(len, |b| b.0 - 1);
            let here = blocks[i].0;
            for factor in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
                for cand in [
                    ((here as f64) * factor).round() as usize,
                    here.saturating_sub(1),
                    here + 1,
                ] {
                    if cand < lo || cand > hi || cand == here {
                        continue;
                    }
                    let mut trial = blocks.clone();
                    trial[i].0 = cand;
                    let r = obj.ratio(&trial);
                    if r > best {
                        best = r;
                        blocks = trial;
                    }
                }
            }
        }
        if best <= before * (1.0 + 1e-15) {
            break;
        }
    }
    Candidate {
        ratio: best,
        blocks,
        method: Method::RandomRestartAscent,
    }
}

fn keep_better(best: &mut Candidate, cand: Candidate) {
    if cand.ratio > best.ratio {
        *best = cand;
    }
}

/// Best ratio `‖a‖_Y/‖a‖_X` found over vectors supported in
/// `S_ξ ∩ 2^{1..N}`: every flat vector, a grid of two-level vectors, and
/// `budget` seeded random restarts of coordinate ascent.
pub fn domination_constant(
    x: &NormDescriptor,
    y: &NormDescriptor,
    xi: &FamilyIndex,
    n: u32,
    budget: usize,
    seed: u64,
) -> Result<DominationReport, DominateError> {
    let limit = if xi.is_unrestricted() {
        MAX_N_UNRESTRICTED
    } else {
        MAX_N_COUNTABLE
    };
    if n == 0 || n > limit {
        return Err(DominateError::Resource { n, limit });
    }
    x.validate()?;
    y.validate()?;
    let c = max_support(xi, n);
    let len = c as usize;
    let obj = Objective {
        x: x.profile(len)?,
        y: y.profile(len)?,
    };

    let mut best = obj.candidate(vec![(1, 1.0)], Method::FlatFamily);
    for l in 2..=len {
        keep_better(&mut best, obj.candidate(vec![(l, 1.0)], Method::FlatFamily));
    }
    let grid = geometric_grid(len, GRID_POINTS);
    for (a, &i) in grid.iter().enumerate() {
        for &j in &grid[a + 1..] {
            for h in 1..=GRID_HEIGHTS {
                let h = h as f64 / (GRID_HEIGHTS + 1) as f64;
                keep_better(
                    &mut best,
                    obj.candidate(vec![(i, 1.0), (j, h)], Method::Grid),
                );
            }
        }
    }
    let restarts: Vec<Candidate> = (0..budget)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            ascend(&obj, len, &mut rng)
        })
        .collect();
    for cand in restarts {
        keep_better(&mut best, cand);
    }

    // materialise on the admissible tail interval (sentinel: from 1)
    let offset = if xi.is_unrestricted() { 0 } else { n - c };
    let mut entries = Vec::new();
    let mut prev = 0;
    for &(end, v) in &best.blocks {
        if v > 0.0 {
            entries.extend((prev + 1..=end).map(|j| (u64::from(offset) + j as u64, v)));
        }
        prev = end;
    }
    let witness = CoeffVector::new(entries)?;
    let witness_support = FiniteSet::new(witness.support().iter().map(|&i| i as u32).collect())?;
    let constant_estimate = y.norm(&witness)? / x.norm(&witness)?;
    Ok(DominationReport {
        schema_version: SCHEMA_VERSION,
        x: x.clone(),
        y: y.clone(),
        xi: xi.clone(),
        n_max: n,
        budget,
        seed,
        max_support: c,
        constant_estimate,
        is_lower_bound: true,
        method: best.method,
        witness,
        witness_support,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularWitness {
    pub k: u32,
    pub n_k: u128,
    /// `‖s_{n_k}‖_{ℓ_p} / ‖s_{n_k}‖_{d(·,q)}`
    pub ratio: f64,
}

/// Stage witnesses where the chosen weight fails to dominate ℓ_p: even
/// stages for `w`, odd stages for `w̃`.
pub fn singular_witnesses(
    pair: &AlternatingPair,
    which: Which,
) -> Result<Vec<SingularWitness>, SeqError> {
    let parity = match which {
        Which::W => 0,
        Which::Wt => 1,
    };
    (1..=pair.stages.len())
        .filter(|k| k % 2 == parity)
        .map(|k| {
            Ok(SingularWitness {
                k: k as u32,
                n_k: pair.stages[k - 1].n,
                ratio: stage_ratio(pair, k, which)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub schema_version: u32,
    pub p: f64,
    pub q: f64,
    pub stages: u32,
    pub samples: usize,
    pub seed: u64,
    pub witnesses_w: Vec<SingularWitness>,
    pub witnesses_wt: Vec<SingularWitness>,
    /// Every witness ratio reaches its stage number.
    pub singular_ok: bool,
    /// `w_n` or `w̃_n` is `n^{-s}` throughout.
    pub coverage_ok: bool,
    pub sample_violations: usize,
    pub worst_sample_shortfall: f64,
    pub indicators_checked: u128,
    pub indicator_violations: u128,
    pub domination_ok: bool,
    pub verdict: Verdict,
    pub pair: AlternatingPair,
}

/// Builds the pair and checks both halves of the counterexample: each weight
/// alone fails along summing vectors, the pair sum 1-dominates ℓ_p.
pub fn counterexample_report(
    p: f64,
    q: f64,
    k: u32,
    samples: usize,
    seed: u64,
    opts: &BuildOptions,
) -> Result<CounterexampleReport, DominateError> {
    let pair = build_pair(p, q, k, opts)?;
    let witnesses_w = singular_witnesses(&pair, Which::W)?;
    let witnesses_wt = singular_witnesses(&pair, Which::Wt)?;
    let singular_ok = witnesses_w
        .iter()
        .chain(&witnesses_wt)
        .all(|w| w.ratio >= f64::from(w.k) * (1.0 - CHECK_TOLERANCE));
    let coverage_ok = coverage_gaps(&pair).is_empty();
    let (sample_violations, worst_sample_shortfall) = sample_pair_domination(&pair, samples, seed)?;
    let (indicators_checked, indicator_violations) =
        indicator_pair_domination(&pair, INDICATOR_LIMIT)?;
    let domination_ok = coverage_ok && sample_violations == 0 && indicator_violations == 0;
    let verdict = if singular_ok && domination_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CounterexampleReport {
        schema_version: SCHEMA_VERSION,
        p,
        q,
        stages: k,
        samples,
        seed,
        witnesses_w,
        witnesses_wt,
        singular_ok,
        coverage_ok,
        sample_violations,
        worst_sample_shortfall,
        indicators_checked,
        indicator_violations,
        domination_ok,
        verdict,
        pair,
    })
}
