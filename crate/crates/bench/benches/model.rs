use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vnwfet_core::compact_model::{BiasPoint, ModelCard, Vnwfet};
use vnwfet_core::numerics::lambert_w0;

fn lambert(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1000).map(|k| 10f64.powf(-20.0 + 0.04 * f64::from(k))).collect();
    c.bench_function("lambert_w0 x1000", |b| {
        b.iter(|| xs.iter().map(|&x| lambert_w0(black_box(x)).unwrap()).sum::<f64>())
    });
}

fn drain_current(c: &mut Criterion) {
    let dev = Vnwfet::new(ModelCard::d22_nf16()).unwrap();
    c.bench_function("terminal_current", |b| {
        b.iter(|| dev.terminal_current(black_box(BiasPoint::new(-0.8, -0.6))).unwrap())
    });
    c.bench_function("terminal_current_with_derivatives", |b| {
        b.iter(|| {
            dev.terminal_current_with_derivatives(black_box(BiasPoint::new(-0.8, -0.6)))
                .unwrap()
        })
    });
}

criterion_group!(benches, lambert, drain_current);
criterion_main!(benches);
