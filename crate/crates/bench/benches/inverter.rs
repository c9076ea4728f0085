use criterion::{criterion_group, criterion_main, Criterion};
use vnwfet_core::characterize::{simulate_inverter, DynamicOptions};
use vnwfet_core::circuit::{build_inverter, InputDrive, InverterOptions, Topology};
use vnwfet_core::ModelCard;

fn transient(c: &mut Criterion) {
    let opts = DynamicOptions::default();
    let inv = InverterOptions {
        input: InputDrive::square(opts.vdd, opts.frequency, opts.edge),
        ..InverterOptions::default()
    };
    let cell = build_inverter(Topology::Complementary, 4, &ModelCard::default_p_type(), &inv).unwrap();
    let mut group = c.benchmark_group("inverter");
    group.sample_size(10);
    group.bench_function("complementary nf4 3 periods", |b| {
        b.iter(|| simulate_inverter(&cell, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transient);
criterion_main!(benches);
