use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noisefit::generators::{gen_qaoa, synthetic_calibration, QaoaSpec};
use noisefit::harness::reference_hidden_params;
use noisefit::{build_default_model, build_parameterized_model, simulate, GateTag, SimOptions};

fn qaoa(c: &mut Criterion) {
    let opts = SimOptions::default();
    let mut group = c.benchmark_group("simulate_qaoa");
    group.sample_size(10);
    for n in [4usize, 6, 8] {
        let circuit = gen_qaoa(&QaoaSpec::seeded(n, 1, 0, true), &format!("qaoa_{n}")).unwrap();
        let cal = synthetic_calibration(n, 0, GateTag::Cx).unwrap();
        let measured = circuit.measured_qubits();
        let param = build_parameterized_model(&reference_hidden_params(), &cal, &measured).unwrap();
        let default = build_default_model(&cal, &measured).unwrap();
        group.bench_with_input(BenchmarkId::new("ideal", n), &n, |b, _| {
            b.iter(|| simulate(&circuit, None, &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parameterized", n), &n, |b, _| {
            b.iter(|| simulate(&circuit, Some(&param), &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("default", n), &n, |b, _| {
            b.iter(|| simulate(&circuit, Some(&default), &opts).unwrap())
        });
    }
    group.finish();
}

fn model_build(c: &mut Criterion) {
    let cal = synthetic_calibration(9, 0, GateTag::Cx).unwrap();
    let measured: Vec<usize> = (0..9).collect();
    let params = reference_hidden_params();
    c.bench_function("build_parameterized_model_9q", |b| {
        b.iter(|| build_parameterized_model(&params, &cal, &measured).unwrap())
    });
    c.bench_function("build_default_model_9q", |b| b.iter(|| build_default_model(&cal, &measured).unwrap()));
}

criterion_group!(benches, qaoa, model_build);
criterion_main!(benches);
