use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use thermocap::channel::{erasure, DEFAULT_BUDGET};
use thermocap::exec::{with_strategy, Strategy};
use thermocap::implementation::build_universal_implementation;
use thermocap::qcore::{ComplexMatrix, Hamiltonian, ThermoContext};
use thermocap::random;
use thermocap::typic::{spectrum_povm, TypicalityParams};

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn bench_matmul(c: &mut Criterion) {
    let mut group = c.benchmark_group("matmul");
    let mut rng = random::seeded(1);
    for dim in [64, 256] {
        let a = random::ginibre(dim, dim, &mut rng);
        let b = random::ginibre(dim, dim, &mut rng);
        for (name, s) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, dim), &dim, |bench, _| {
                bench.iter(|| with_strategy(s, || black_box(a.matmul(&b))))
            });
        }
    }
    group.finish();
}

fn bench_spectrum_povm(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum_povm");
    group.sample_size(10);
    for n in [5, 7] {
        for (name, s) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |bench, &n| {
                bench.iter(|| with_strategy(s, || black_box(spectrum_povm(2, n).unwrap())))
            });
        }
    }
    group.finish();
}

fn bench_tensor_power(c: &mut Criterion) {
    let mut group = c.benchmark_group("tensor_power");
    let ch = erasure(2);
    for (name, s) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| with_strategy(s, || black_box(ch.tensor_power(6, DEFAULT_BUDGET).unwrap())))
        });
    }
    group.finish();
}

fn bench_implementation(c: &mut Criterion) {
    let mut group = c.benchmark_group("universal_implementation");
    group.sample_size(10);
    let ch = erasure(2).with_hamiltonian(Hamiltonian::diag(&[0.0, 1.0])).unwrap();
    let ctx = ThermoContext::default();
    let params = TypicalityParams::default().with_threshold(0.3);
    for (name, s) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| {
                with_strategy(s, || {
                    black_box(build_universal_implementation(&ch, 4, &params, &ctx).unwrap())
                })
            })
        });
    }
    group.finish();
}

fn bench_kron(c: &mut Criterion) {
    let mut group = c.benchmark_group("kron_power");
    let m = ComplexMatrix::from_real_rows(&[&[0.6, 0.8], &[0.8, -0.6]]);
    for (name, s) in STRATEGIES {
        group.bench_function(name, |bench| {
            bench.iter(|| with_strategy(s, || black_box(m.kron_power(8))))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_matmul,
    bench_spectrum_povm,
    bench_tensor_power,
    bench_implementation,
    bench_kron
);
criterion_main!(benches);
