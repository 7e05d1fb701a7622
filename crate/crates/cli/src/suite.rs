//! The bundled property suite: every module invariant at desk scale, one
//! named check each.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use seqsing_core::dominate::{
    counterexample_report, domination_constant, singular_witnesses, DominationReport,
    NormDescriptor, Verdict, MAX_N_COUNTABLE,
};
use seqsing_core::pairgen::{validate_pair, BuildOptions, Check};
use seqsing_core::schreier::oracle::ExhaustiveOracle;
use seqsing_core::schreier::{apply_spread, double, find_l};
use seqsing_core::seqspace::{
    lorentz_norm, lorentz_norm_over_permutations, pair_norm, pair_norm_split, power_sum_direct,
    power_sum_euler_maclaurin, Segment, SegmentForm,
};
use seqsing_core::{
    build_pair, AlternatingPair, CoeffVector, FamilyIndex, FiniteSet, Ordinal, Precision, Schreier,
    WeightSpec, Which,
};

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Pairs every suite run builds: `(p, q, K)`.
pub const SUITE_PAIRS: [(f64, f64, u32); 2] = [(2.0, 1.0, 4), (3.0, 1.5, 3)];
const UNIVERSE: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSettings {
    pub precision: Precision,
    pub tolerance: f64,
    pub max_n: u32,
    pub max_stages: u32,
    pub seed: u64,
    pub samples: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub settings: SuiteSettings,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub verdict: Verdict,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn idx(text: &str) -> FamilyIndex {
    text.parse().expect("suite indices parse")
}

fn listed(problems: &[String]) -> String {
    const SHOWN: usize = 5;
    let mut out = problems
        .iter()
        .take(SHOWN)
        .cloned()
        .collect::<Vec<_>>()
        .join("; ");
    if problems.len() > SHOWN {
        out.push_str(&format!("; … {} more", problems.len() - SHOWN));
    }
    out
}

fn check(name: &str, problems: Vec<String>, ok_detail: impl Into<String>) -> Check {
    if problems.is_empty() {
        Check::new(name, true, ok_detail)
    } else {
        Check::new(name, false, listed(&problems))
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// ---- ordinals ----

fn random_ordinal(rng: &mut ChaCha8Rng) -> Ordinal {
    let terms = rng.random_range(0..=3);
    let raw: Vec<(u32, u64)> = (0..terms)
        .map(|_| (rng.random_range(0..=4), rng.random_range(1..=5)))
        .collect();
    Ordinal::normalize(&raw)
}

fn ordinal_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[Ordinal; 3]> = (0..500)
        .map(|_| {
            [
                random_ordinal(&mut rng),
                random_ordinal(&mut rng),
                random_ordinal(&mut rng),
            ]
        })
        .collect();
    let mut assoc = Vec::new();
    let mut zero = Vec::new();
    let mut monotone = Vec::new();
    let mut text = Vec::new();
    for [a, b, c] in &triples {
        if a.add(b).add(c) != a.add(&b.add(c)) {
            assoc.push(format!("({a}+{b})+{c}"));
        }
        if a.add(&Ordinal::zero()) != *a {
            zero.push(a.to_string());
        }
        if b < c && a.add(b) >= a.add(c) {
            monotone.push(format!("{a}+{b} vs {a}+{c}"));
        }
        match a.to_string().parse::<Ordinal>() {
            Ok(back) if back == *a => {}
            _ => text.push(a.to_string()),
        }
    }
    let mut fundamental = Vec::new();
    for xi in ["w", "w*2", "w^2", "w^2+w", "w^3"] {
        let xi: Ordinal = xi.parse().expect("limit parses");
        let seq: Vec<Ordinal> = (1..=101)
            .map(|n| xi.fundamental(n).expect("limit has a sequence"))
            .collect();
        for (n, pair) in seq.windows(2).enumerate() {
            if pair[0].is_limit() || !(pair[0] < pair[1] && pair[1] < xi) {
                fundamental.push(format!("{xi}[{}] = {}, next {}", n + 1, pair[0], pair[1]));
            }
        }
    }
    vec![
        check("ordinal.add-associative", assoc, "500 sampled triples"),
        check("ordinal.add-zero", zero, "500 samples"),
        check(
            "ordinal.add-monotone",
            monotone,
            "b < c implies a+b < a+c on 500 triples",
        ),
        check(
            "ordinal.fundamental-sequences",
            fundamental,
            "w, w*2, w^2, w^2+w, w^3 for n <= 100",
        ),
        check("ordinal.text-roundtrip", text, "500 samples"),
    ]
}

// ---- Schreier families ----

fn all_sets(n: u32) -> impl Iterator<Item = FiniteSet> {
    (0..1u64 << n).map(FiniteSet::from_mask)
}

fn schreier_checks() -> Vec<Check> {
    let schreier = Schreier::global();
    let mut oracle = ExhaustiveOracle::new();
    let mut out = Vec::new();

    let mut disagree = Vec::new();
    for xi in ["1", "2", "3", "w", "w+1"].map(idx) {
        for f in all_sets(UNIVERSE) {
            if schreier.is_member(&f, &xi) != oracle.is_member(&f, &xi) {
                disagree.push(format!("{f} in S_{xi}"));
            }
        }
    }
    out.push(check(
        "schreier.greedy-matches-exhaustive",
        disagree,
        "4096 sets x 5 indices on {1..12}",
    ));

    // single deletions and unit spreads generate all subsets and spreads
    let (mut hereditary, mut spreading) = (Vec::new(), Vec::new());
    for xi in ["1", "2", "3", "w", "w+1", "w*2"].map(idx) {
        for f in all_sets(UNIVERSE).filter(|f| schreier.is_member(f, &xi)) {
            let s = f.as_slice();
            for i in 0..s.len() {
                let mut g = s.to_vec();
                g.remove(i);
                if !schreier.is_member(&FiniteSet::new(g.clone()).expect("subset"), &xi) {
                    hereditary.push(format!("{f} in S_{xi} but not {g:?}"));
                }
                let bumped = s[i] + 1;
                if bumped <= UNIVERSE && s.get(i + 1).is_none_or(|&next| bumped < next) {
                    let mut g = s.to_vec();
                    g[i] = bumped;
                    if !schreier.is_member(&FiniteSet::new(g.clone()).expect("spread"), &xi) {
                        spreading.push(format!("{f} in S_{xi} but not {g:?}"));
                    }
                }
            }
        }
    }
    out.push(check(
        "schreier.hereditary",
        hereditary,
        "xi in 1,2,3,w,w+1,w*2 on {1..12}",
    ));
    out.push(check(
        "schreier.spreading",
        spreading,
        "xi in 1,2,3,w,w+1,w*2 on {1..12}",
    ));

    let mut chain = Vec::new();
    for zeta in ["1", "2", "w"].map(idx) {
        let next = zeta.add(&FamilyIndex::finite(1)).expect("countable");
        for f in all_sets(UNIVERSE) {
            if schreier.is_member(&f, &zeta) && !schreier.is_member(&f, &next) {
                chain.push(format!("{f} in S_{zeta} but not S_{next}"));
            }
        }
    }
    out.push(check(
        "schreier.successor-chain",
        chain,
        "S_z within S_(z+1) for z in 1,2,w",
    ));

    let mut s1 = Vec::new();
    for xi in ["1", "2", "3", "w", "w+1", "w*2", "w^2"].map(idx) {
        for f in all_sets(UNIVERSE).filter(|f| schreier.is_member(f, &idx("1"))) {
            if !schreier.is_member(&f, &xi) {
                s1.push(format!("{f} not in S_{xi}"));
            }
        }
    }
    let empty_ok = ["0", "1", "w", "w^3", "w1"]
        .map(idx)
        .iter()
        .all(|xi| schreier.is_member(&FiniteSet::empty(), xi));
    if !empty_ok {
        s1.push("empty set rejected".into());
    }
    out.push(check(
        "schreier.s1-inside-every-family",
        s1,
        "S_1 within S_xi on {1..12}; empty set everywhere",
    ));

    let mut doubled = Vec::new();
    for xi in ["1", "2", "w"].map(idx) {
        for a in all_sets(7).filter(|a| schreier.is_member(a, &xi)) {
            let d = double(&a);
            if !oracle.is_member(&d, &xi) {
                doubled.push(format!("{a} in S_{xi} but {d} is not"));
            }
        }
    }
    out.push(check(
        "schreier.doubling",
        doubled,
        "every A within {1..7}, xi in 1,2,w",
    ));

    let mut find = Vec::new();
    match find_l(&idx("1"), &idx("1"), 10, UNIVERSE) {
        Ok(found) if found.prefix == (1..=10).collect::<Vec<u32>>() => {
            for e in all_sets(10) {
                if oracle.is_combined_member(&e, &idx("1"), &idx("1")) {
                    let image = apply_spread(&e, &found.prefix).expect("prefix long enough");
                    if !oracle.is_member(&image, &idx("2")) {
                        find.push(format!("{e} in S_1[S_1] but not S_2"));
                    }
                }
            }
        }
        Ok(found) => find.push(format!("prefix {:?} is not the identity", found.prefix)),
        Err(e) => find.push(e.to_string()),
    }
    out.push(check(
        "schreier.find-l-identity",
        find,
        "L = (1..10); S_1[S_1] within S_2 on {1..10}",
    ));
    out
}

// ---- sequence spaces ----

fn random_vector(rng: &mut ChaCha8Rng, support: usize, universe: u64) -> CoeffVector {
    let size = rng.random_range(1..=support);
    let mut idx = std::collections::BTreeSet::new();
    while idx.len() < size {
        idx.insert(rng.random_range(1..=universe));
    }
    let entries = idx
        .into_iter()
        .map(|i| (i, rng.random_range(-2.0..2.0)))
        .collect();
    CoeffVector::new(entries).expect("distinct indices")
}

fn seqspace_checks(seed: u64, pair: &AlternatingPair) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e95);
    let weights = [
        WeightSpec::power_law(0.5, 64, 1.0),
        WeightSpec::power_law(0.2, 64, 2.5),
        pair.w(),
        pair.wt(),
    ];
    let mut out = Vec::new();

    let mut perm = Vec::new();
    for t in 0..500 {
        let w = &weights[t % weights.len()];
        let a = random_vector(&mut rng, 7, 20);
        let (fast, slow) = (lorentz_norm(&a, w), lorentz_norm_over_permutations(&a, w));
        match (fast, slow) {
            (Ok(x), Ok(y)) if rel_diff(x, y) <= 1e-12 => {}
            other => perm.push(format!("{a}: {other:?}")),
        }
    }
    out.push(check(
        "seqspace.lorentz-permutation-sup",
        perm,
        "500 vectors, support <= 7",
    ));

    let norms: Vec<NormDescriptor> = vec![
        NormDescriptor::Lp { p: 1.0 },
        NormDescriptor::Lp { p: 2.5 },
        NormDescriptor::C0,
        NormDescriptor::Lorentz {
            weights: weights[0].clone(),
        },
        NormDescriptor::Lorentz {
            weights: weights[1].clone(),
        },
        NormDescriptor::PairSum {
            w: pair.w(),
            wt: pair.wt(),
        },
    ];
    let mut axioms = Vec::new();
    for t in 0..1000 {
        let norm = &norms[t % norms.len()];
        let (a, b) = (
            random_vector(&mut rng, 20, 40),
            random_vector(&mut rng, 20, 40),
        );
        let lambda = rng.random_range(-3.0..3.0);
        let sum = {
            let mut dense = std::collections::BTreeMap::new();
            for &(i, v) in a.entries().iter().chain(b.entries()) {
                *dense.entry(i).or_insert(0.0) += v;
            }
            CoeffVector::new(dense.into_iter().collect()).expect("merged")
        };
        let bigger = CoeffVector::new(
            a.entries()
                .iter()
                .map(|&(i, v)| (i, v * (1.0 + rng.random_range(0.0..1.0))))
                .collect(),
        )
        .expect("same support");
        let n = |v: &CoeffVector| norm.norm(v).expect("norm evaluates");
        let (na, nb) = (n(&a), n(&b));
        if rel_diff(n(&a.scaled(lambda)), lambda.abs() * na) > 1e-12 {
            axioms.push(format!("homogeneity of {} at {a}", norm.label()));
        }
        if n(&sum) > (na + nb) * (1.0 + 1e-12) {
            axioms.push(format!("triangle inequality of {}", norm.label()));
        }
        if n(&bigger) < na * (1.0 - 1e-12) {
            axioms.push(format!("monotonicity of {}", norm.label()));
        }
    }
    out.push(check(
        "seqspace.norm-axioms",
        axioms,
        "1000 trials, support <= 20",
    ));

    let mut formulas = Vec::new();
    for _ in 0..1000 {
        let a = random_vector(&mut rng, 20, pair.n_built().min(2000) as u64);
        let (x, y) = (
            pair_norm(&a, &pair.w(), &pair.wt()),
            pair_norm_split(&a, &pair.w(), &pair.wt()),
        );
        match (x, y) {
            (Ok(x), Ok(y)) if rel_diff(x, y) <= 1e-12 => {}
            other => formulas.push(format!("{a}: {other:?}")),
        }
    }
    out.push(check(
        "seqspace.pair-norm-formulas",
        formulas,
        "1000 vectors",
    ));

    let mut validator = Vec::new();
    let pl = SegmentForm::PowerLaw { s: 0.5 };
    let rising = WeightSpec {
        segments: vec![
            Segment::new(1, 3, pl),
            Segment::new(4, 9, SegmentForm::constant(0.9)),
        ],
        q: 1.0,
        p_reference: None,
    };
    let bad_head = WeightSpec {
        segments: vec![Segment::new(1, 5, SegmentForm::constant(0.5))],
        q: 1.0,
        p_reference: None,
    };
    let gap = WeightSpec {
        segments: vec![
            Segment::new(1, 3, pl),
            Segment::new(5, 9, SegmentForm::constant(0.1)),
        ],
        q: 1.0,
        p_reference: None,
    };
    for (name, spec) in [
        ("increase across a boundary", rising),
        ("w_1 != 1", bad_head),
        ("gap", gap),
    ] {
        if spec.validate().is_ok() {
            validator.push(format!("accepted {name}"));
        }
    }
    for w in [pair.w(), pair.wt()] {
        if let Err(e) = w.validate() {
            validator.push(format!("rejected built weights: {e}"));
        }
    }
    out.push(check(
        "seqspace.weight-validator",
        validator,
        "corrupted specs rejected, built specs accepted",
    ));

    let mut em = Vec::new();
    for s in [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5] {
        for (a, b) in [
            (1, 1_000_000),
            (7, 999_999),
            (64, 500_000),
            (1000, 1_000_000),
            (1, 65),
        ] {
            let direct = power_sum_direct::<f64>(s, a, b);
            let (fast, _) = power_sum_euler_maclaurin::<f64>(s, a, b);
            if rel_diff(fast, direct) > 1e-9 {
                em.push(format!("s={s} [{a},{b}]: {fast} vs {direct}"));
            }
        }
    }
    out.push(check(
        "seqspace.euler-maclaurin-vs-direct",
        em,
        "5 exponents x 5 ranges up to 10^6 terms",
    ));
    out
}

// ---- pair construction ----

/// Stage 2 of the `(p, q)` construction by unit-step scanning in plain
/// arithmetic, with no segment machinery: `w̃` is 1 on `(0, 1]`, `w` is the
/// power law up to `m`.
pub fn scan_stage_two(p: f64, q: f64, tolerance: f64) -> (u64, u64) {
    let s = 1.0 / q - 1.0 / p;
    let slack = 1.0 + tolerance;
    let mut m = 2;
    while 1.0 < ((m + 1) as f64).powf(-s) * slack {
        m += 1;
    }
    let norm = (1..=m)
        .map(|j| (j as f64).powf(-s))
        .sum::<f64>()
        .powf(1.0 / q);
    let mut n = m + 1;
    while (n as f64).powf(1.0 / p) < 2.0 * (norm + 1.0) * slack {
        n += 1;
    }
    (m, n)
}

fn pair_label(p: f64, q: f64, k: u32) -> String {
    format!("({p},{q},{k})")
}

fn pair_checks(
    cfg: &RunConfig,
    pairs: &[AlternatingPair],
    opts: &BuildOptions,
) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for pair in pairs {
        let label = pair_label(pair.p, pair.q, pair.stages.len() as u32);
        for c in validate_pair(pair, cfg.samples, cfg.seed).checks {
            out.push(Check::new(
                &format!("pairgen.{label}.{}", c.name),
                c.passed,
                c.detail,
            ));
        }
        let again = build_pair(pair.p, pair.q, pair.stages.len() as u32, opts)?;
        let json = pair.to_json();
        let mut problems = Vec::new();
        if again.to_json() != json {
            problems.push("second build differs".to_string());
        }
        if AlternatingPair::from_json(&json).ok().as_ref() != Some(pair) {
            problems.push("JSON round trip differs".into());
        }
        out.push(check(
            &format!("pairgen.{label}.deterministic"),
            problems,
            "rebuild and JSON round trip identical",
        ));
    }
    let (m, n) = scan_stage_two(2.0, 1.0, cfg.tolerance);
    let built = pairs.first().map(|p| (p.stages[1].m, p.stages[1].n));
    let mut problems = Vec::new();
    if (m, n) != (2, 30) {
        problems.push(format!("scan gives m_2 = {m}, n_2 = {n}"));
    }
    if built != Some((2, 30)) {
        problems.push(format!("construction gives {built:?}"));
    }
    out.push(check(
        "pairgen.(2,1).stage-two",
        problems,
        "m_2 = 2, n_2 = 30 by construction and by scan",
    ));
    Ok(out)
}

// ---- domination ----

fn domination_checks(
    cfg: &RunConfig,
    pair: &AlternatingPair,
) -> Result<Vec<Check>, DominateFailure> {
    let mut out = Vec::new();
    let lp2 = NormDescriptor::Lp { p: 2.0 };
    let root = NormDescriptor::Lorentz {
        weights: WeightSpec::power_law(0.5, 1 << 40, 1.0),
    };
    let sentinel = FamilyIndex::Unrestricted;
    let mut reports: Vec<DominationReport> = Vec::new();
    let mut run = |x: &NormDescriptor, y: &NormDescriptor, xi: &FamilyIndex, n: u32| {
        let r = domination_constant(x, y, xi, n, cfg.budget, cfg.seed)?;
        reports.push(r.clone());
        Ok::<_, DominateFailure>(r)
    };

    let spike = run(&root, &lp2, &sentinel, 1)?;
    let ok = spike.constant_estimate == 1.0 && spike.witness.entries() == [(1, 1.0)];
    out.push(Check::new(
        "dominate.spike",
        ok,
        format!("N = 1 gives {}", spike.constant_estimate),
    ));

    let mut problems = Vec::new();
    let n20 = cfg.max_n.min(20);
    let r = run(&root, &lp2, &sentinel, n20)?;
    if r.constant_estimate > 1.0 + 1e-9 {
        problems.push(format!(
            "root Lorentz vs l_2 at N = {n20}: {}",
            r.constant_estimate
        ));
    }
    let sum = NormDescriptor::PairSum {
        w: pair.w(),
        wt: pair.wt(),
    };
    let n_sum = cfg.max_n.min(3000);
    let r = run(&sum, &NormDescriptor::Lp { p: pair.p }, &sentinel, n_sum)?;
    if r.constant_estimate > 1.0 + 1e-9 {
        problems.push(format!(
            "pair sum vs l_p at N = {n_sum}: {}",
            r.constant_estimate
        ));
    }
    out.push(check(
        "dominate.lorentz-dominates-lp",
        problems,
        "no search exceeds 1 + 1e-9",
    ));

    let n3 = u32::try_from(pair.stages[2].n).unwrap_or(u32::MAX);
    let stage = if n3 <= cfg.max_n {
        let r = run(
            &NormDescriptor::Lorentz { weights: pair.wt() },
            &lp2,
            &sentinel,
            n3,
        )?;
        Check::new(
            "dominate.stage-three-witness",
            r.constant_estimate >= 3.0,
            format!("w~ against l_2 at N = n_3 = {n3}: {}", r.constant_estimate),
        )
    } else {
        Check::new(
            "dominate.stage-three-witness",
            false,
            format!("n_3 = {n3} exceeds max_n = {}", cfg.max_n),
        )
    };
    out.push(stage);

    let mut problems = Vec::new();
    let x = NormDescriptor::Lorentz { weights: pair.w() };
    let mut previous = 0.0;
    for n in [10, 40, 160, 640]
        .into_iter()
        .filter(|&n| n <= cfg.max_n.min(MAX_N_COUNTABLE))
    {
        let mut est = |xi: &str| run(&x, &lp2, &idx(xi), n).map(|r| r.constant_estimate);
        let chain = [est("1")?, est("2")?, est("3")?];
        let top = est("w1")?;
        let others = [est("w")?, est("w^2+1")?];
        if chain.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-9)) {
            problems.push(format!("N = {n}: S_1, S_2, S_3 give {chain:?}"));
        }
        if chain.iter().chain(&others).any(|&e| e > top * (1.0 + 1e-9)) {
            problems.push(format!(
                "N = {n}: unrestricted {top} below a restricted estimate"
            ));
        }
        if top < previous * (1.0 - 1e-9) {
            problems.push(format!("N = {n}: {top} below the previous {previous}"));
        }
        previous = top;
    }
    out.push(check(
        "dominate.monotone",
        problems,
        "nondecreasing in N and in the family",
    ));

    let mut problems = Vec::new();
    for r in &reports {
        let text = serde_json::to_string(r).expect("report serializes");
        let back: DominationReport =
            serde_json::from_str(&text).map_err(|e| DominateFailure(e.to_string()))?;
        if back != *r || !back.verify(1e-9)? {
            problems.push(format!(
                "{} vs {} at N = {}",
                r.y.label(),
                r.x.label(),
                r.n_max
            ));
        }
    }
    out.push(check(
        "dominate.witnesses-reproduce",
        problems,
        format!("{} reports re-evaluated", reports.len()),
    ));
    Ok(out)
}

/// Core failure inside a check that should not fail on valid settings.
#[derive(Debug)]
struct DominateFailure(String);

impl<E: std::fmt::Display> From<E> for DominateFailure {
    fn from(e: E) -> Self {
        DominateFailure(e.to_string())
    }
}

fn counterexample_checks(cfg: &RunConfig, opts: &BuildOptions) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for (p, q, k) in SUITE_PAIRS {
        let r = counterexample_report(p, q, k, cfg.samples, cfg.seed, opts)?;
        let detail = format!(
            "singular {}, coverage {}, {} sample violations, {} of {} indicators fail",
            r.singular_ok,
            r.coverage_ok,
            r.sample_violations,
            r.indicator_violations,
            r.indicators_checked
        );
        out.push(Check::new(
            &format!("dominate.counterexample.{}", pair_label(p, q, k)),
            r.verdict == Verdict::Pass,
            detail,
        ));
    }
    Ok(out)
}

/// Checks a pair read from a file, as if it had been built.
pub fn input_pair_checks(pair: &AlternatingPair, cfg: &RunConfig) -> Vec<Check> {
    let mut out: Vec<Check> = validate_pair(pair, cfg.samples, cfg.seed)
        .checks
        .into_iter()
        .map(|c| Check::new(&format!("input-pair.{}", c.name), c.passed, c.detail))
        .collect();
    let mut problems = Vec::new();
    for which in [Which::W, Which::Wt] {
        match singular_witnesses(pair, which) {
            Ok(ws) => problems.extend(
                ws.iter()
                    .filter(|w| w.ratio < f64::from(w.k))
                    .map(|w| format!("{which:?} stage {}: ratio {}", w.k, w.ratio)),
            ),
            Err(e) => problems.push(e.to_string()),
        }
    }
    out.push(check(
        "input-pair.singular-witnesses",
        problems,
        "every stage ratio reaches k",
    ));
    out
}

pub fn run_suite(
    cfg: &RunConfig,
    input: Option<&AlternatingPair>,
) -> Result<SuiteReport, CliError> {
    cfg.validate()?;
    let needed = SUITE_PAIRS.iter().map(|t| t.2).max().unwrap_or(1);
    if cfg.max_stages < needed {
        return Err(CliError::Config(format!(
            "the suite builds {needed} stages but max_stages = {}",
            cfg.max_stages
        )));
    }
    let opts = BuildOptions {
        precision: cfg.precision,
        tolerance: cfg.tolerance,
        max_stages: cfg.max_stages,
        ..Default::default()
    };
    let pairs = SUITE_PAIRS
        .iter()
        .map(|&(p, q, k)| build_pair(p, q, k, &opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut checks = ordinal_checks(cfg.seed);
    checks.extend(schreier_checks());
    checks.extend(seqspace_checks(cfg.seed, &pairs[0]));
    checks.extend(pair_checks(cfg, &pairs, &opts)?);
    match domination_checks(cfg, &pairs[0]) {
        Ok(c) => checks.extend(c),
        Err(DominateFailure(e)) => checks.push(Check::new("dominate.searches", false, e)),
    }
    checks.extend(counterexample_checks(cfg, &opts)?);
    if let Some(pair) = input {
        checks.extend(input_pair_checks(pair, cfg));
    }

    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        settings: SuiteSettings {
            precision: cfg.precision,
            tolerance: cfg.tolerance,
            max_n: cfg.max_n,
            max_stages: cfg.max_stages,
            seed: cfg.seed,
            samples: cfg.samples,
            budget: cfg.budget,
        },
        checks,
        passed,
        failed,
        verdict: if failed == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_two_scan() {
        assert_eq!(scan_stage_two(2.0, 1.0, 1e-9), (2, 30));
    }
}
