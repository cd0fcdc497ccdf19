use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use qsel::gbdt::{hyperparameter_grid, train};
use qsel::harness::run_cell;
use qsel_bench::{ematch_strategy, model, needles, training_set};

fn solving(c: &mut Criterion) {
    let problems = needles(8, 30, 11);
    let s = ematch_strategy();
    let timeout = Duration::from_secs(60);
    c.bench_function("ematch_needles_unguided", |b| {
        b.iter(|| {
            for p in &problems {
                run_cell(&s, None, p, timeout).unwrap();
            }
        })
    });
    let m = Arc::new(model(&training_set(&needles(40, 30, 12))));
    c.bench_function("ematch_needles_guided", |b| {
        b.iter(|| {
            for p in &problems {
                run_cell(&s, Some(m.clone()), p, timeout).unwrap();
            }
        })
    });
}

fn gbdt(c: &mut Criterion) {
    let data = training_set(&needles(40, 30, 12));
    let m = model(&data);
    let xs: Vec<Vec<u32>> = data.rows.iter().map(|r| r.features.to_dense()).collect();
    c.bench_function("gbdt_predict_rows", |b| {
        b.iter(|| xs.iter().map(|x| m.predict_dense(x)).sum::<f64>())
    });
    let hp = hyperparameter_grid(0)[0];
    c.bench_function("gbdt_train", |b| {
        b.iter_batched(|| data.clone(), |d| train(&d, &hp).unwrap(), BatchSize::LargeInput)
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = solving, gbdt
}
criterion_main!(benches);
