use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lnn::dataset::{parse_mushroom, select, synthetic_mushroom};
use lnn::exec::Exec;
use lnn::memorize::memorize_with;
use lnn::readout::{equivalent_with, EquivalenceOptions};
use lnn::rules::parse_rule_file;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn memorize_replay(c: &mut Criterion) {
    let text = synthetic_mushroom(400, 0);
    let mut group = c.benchmark_group("memorize");
    group.sample_size(10);
    for (attrs, n) in [(10, 25), (20, 75), (22, 200)] {
        let records = select(&parse_mushroom(&text, attrs, usize::MAX).unwrap(), n, 0);
        for (name, exec) in MODES {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{attrs}x{n}")),
                &records,
                |b, r| b.iter(|| memorize_with(r, exec)),
            );
        }
    }
    group.finish();
}

fn equivalence_enumeration(c: &mut Criterion) {
    let a = parse_rule_file(
        "if t0, not t1 then t5\nif t5, t2 unless (t3 and t4) then t6\nif t6 then t7\nif t0, t7 then not t8",
    )
    .unwrap();
    let b = parse_rule_file(
        "if t0, not t1 then t5\nif t5, t2 unless (t4 and t3) then t6\nif t6 then t7\nif t7, t0 then not t8",
    )
    .unwrap();
    let things = ["t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"];
    let mut group = c.benchmark_group("equivalence");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = EquivalenceOptions {
            exec,
            ..Default::default()
        };
        group.bench_function(name, |bch| {
            bch.iter(|| equivalent_with(&a, &b, &things, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, memorize_replay, equivalence_enumeration);
criterion_main!(benches);
