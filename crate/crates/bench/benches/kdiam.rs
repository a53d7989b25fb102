use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kdiam_bench::{config, power_series};
use kdiam_core::diameters::{diameters_between_grades, oracle_diameters_coordinate};
use kdiam_core::invariants::in_diametral;
use kdiam_core::seq::parse;
use kdiam_core::verify::default_catalog;
use kdiam_core::{evaluate, run_campaign, Campaign, CriterionId, KotheMatrix, TheoremId};

fn diameters(c: &mut Criterion) {
    let mut g = c.benchmark_group("diameters");
    for n in [256u64, 4096] {
        let m = power_series("n*log(n+1)", true, n);
        g.bench_with_input(BenchmarkId::new("sorted", n), &n, |b, &n| {
            b.iter(|| diameters_between_grades(black_box(&m), 1, 3, n).unwrap())
        });
    }
    let m = power_series("n", true, 16);
    g.bench_function("oracle_12x4", |b| {
        b.iter(|| oracle_diameters_coordinate(black_box(&m), 1, 3, 12, 4).unwrap())
    });
    let grades = (1..=12)
        .map(|k| parse(&format!("exp({k}*n)")).unwrap())
        .collect();
    let table = KotheMatrix::table(grades).unwrap();
    g.bench_function("table_4096", |b| {
        b.iter(|| diameters_between_grades(black_box(&table), 2, 5, 4096).unwrap())
    });
    g.finish();
}

fn criteria(c: &mut Criterion) {
    let cfg = config(4096, 12);
    let mut g = c.benchmark_group("criteria");
    g.sample_size(10);
    for (name, finite) in [("lambda_1", true), ("lambda_inf", false)] {
        let m = power_series("poly(2)", finite, 4096);
        for id in [
            CriterionId::FiniteDeltaCoincidence,
            CriterionId::D2,
            CriterionId::ConditionB,
        ] {
            g.bench_function(format!("{name}/{}", id.as_str()), |b| {
                b.iter(|| evaluate(id, black_box(&m), name, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn membership(c: &mut Criterion) {
    let cfg = config(4096, 12);
    let m = power_series("n", false, 4096);
    let t = parse("exp(3*n)").unwrap();
    c.bench_function("member/Delta/lambda_inf", |b| {
        b.iter(|| in_diametral(black_box(&m), &t, cfg.resolution).unwrap())
    });
}

fn campaign(c: &mut Criterion) {
    let cfg = config(1024, 12);
    let (catalog, _) = default_catalog(&cfg).unwrap();
    let mut g = c.benchmark_group("campaign");
    g.sample_size(10);
    g.bench_function("T3.1_default_1024", |b| {
        b.iter(|| {
            run_campaign(&Campaign::new(
                vec![TheoremId::T31],
                catalog.clone(),
                cfg.clone(),
            ))
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, diameters, criteria, membership, campaign);
criterion_main!(benches);
