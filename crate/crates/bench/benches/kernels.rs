use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use seqsing_core::dominate::domination_constant;
use seqsing_core::pairgen::{BuildOptions, TailRule};
use seqsing_core::seqspace::{power_sum, DoubleDouble};
use seqsing_core::{
    build_pair, FamilyIndex, FiniteSet, NormDescriptor, Precision, Schreier, WeightSpec,
};

fn membership(c: &mut Criterion) {
    let mut g = c.benchmark_group("schreier");
    for xi in ["2", "w+1", "w^2"] {
        let xi: FamilyIndex = xi.parse().unwrap();
        g.bench_function(format!("all subsets of 1..12 in S_{xi}, cold memo"), |b| {
            b.iter_batched(
                Schreier::new,
                |s| {
                    (0..1u64 << 12)
                        .filter(|&m| s.is_member(&FiniteSet::from_mask(m), &xi))
                        .count()
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn power_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("power_sum");
    g.bench_function("direct, 10^5 terms", |b| {
        b.iter(|| power_sum::<f64>(black_box(0.5), 1, 100_000))
    });
    g.bench_function("euler-maclaurin f64, 2^60 terms", |b| {
        b.iter(|| power_sum::<f64>(black_box(0.5), 1, 1 << 60))
    });
    g.bench_function("euler-maclaurin extended, 2^60 terms", |b| {
        b.iter(|| power_sum::<DoubleDouble>(black_box(0.5), 1, 1 << 60))
    });
    g.finish();
}

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_pair");
    g.bench_function("(2,1,4) double, flat tail", |b| {
        b.iter(|| build_pair(black_box(2.0), 1.0, 4, &BuildOptions::default()).unwrap())
    });
    let extended = BuildOptions {
        precision: Precision::Extended,
        tail: TailRule::Geometric,
        ..Default::default()
    };
    g.bench_function("(2,1,3) extended, geometric tail", |b| {
        b.iter(|| build_pair(black_box(2.0), 1.0, 3, &extended).unwrap())
    });
    g.finish();
}

fn domination(c: &mut Criterion) {
    let mut g = c.benchmark_group("domination_constant");
    g.sample_size(10);
    let x = NormDescriptor::Lorentz {
        weights: WeightSpec::power_law(0.5, 1 << 40, 1.0),
    };
    let y = NormDescriptor::Lp { p: 2.0 };
    for (xi, n) in [("w1", 2000), ("w", 2000)] {
        let xi: FamilyIndex = xi.parse().unwrap();
        g.bench_function(format!("N = {n}, S_{xi}, 64 restarts"), |b| {
            b.iter(|| domination_constant(&x, &y, &xi, n, 64, 1).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, membership, power_sums, construction, domination);
criterion_main!(benches);
