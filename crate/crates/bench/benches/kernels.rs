use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pvbs_bench::{aklt, two_type_chain, two_type_params};
use pvbs_core::chain::{spectral_gap, ChainOperator, SolverChoice, SolverConfig};
use pvbs_core::mps::{martingale_coefficient, transfer_spectrum};
use pvbs_core::numerics::C64;
use pvbs_core::pvbs::pvbs_mps;
use std::hint::black_box;

fn matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for (name, h) in [("aklt", aklt()), ("pvbs2", two_type_chain())] {
        for n in [6, 8] {
            let op = ChainOperator::new(&h, n).unwrap();
            let x: Vec<C64> = (0..op.dim()).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
            let mut y = vec![C64::new(0.0, 0.0); op.dim()];
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| op.apply(black_box(&x), &mut y)));
        }
    }
    group.finish();
}

fn gaps(c: &mut Criterion) {
    let mut group = c.benchmark_group("gap");
    group.sample_size(10);
    let op = ChainOperator::new(&aklt(), 8).unwrap();
    let krylov = SolverConfig { solver: SolverChoice::Krylov, ..SolverConfig::default() };
    group.bench_function("aklt_n8_krylov", |b| b.iter(|| spectral_gap(&op, Some(4), &krylov).unwrap()));
    let op = ChainOperator::new(&aklt(), 6).unwrap();
    let dense = SolverConfig { solver: SolverChoice::Dense, ..SolverConfig::default() };
    group.bench_function("aklt_n6_dense", |b| b.iter(|| spectral_gap(&op, Some(4), &dense).unwrap()));
    group.finish();
}

fn transfer(c: &mut Criterion) {
    let f = pvbs_mps(&two_type_params()).unwrap();
    c.bench_function("transfer_spectrum_pvbs2", |b| b.iter(|| transfer_spectrum(black_box(&f)).unwrap()));
}

fn martingale(c: &mut Criterion) {
    let h = aklt();
    let mut group = c.benchmark_group("martingale");
    group.sample_size(10);
    for n in [4, 6] {
        group.bench_with_input(BenchmarkId::new("aklt_k3", n), &n, |b, &n| {
            b.iter(|| martingale_coefficient(&h, 3, n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, matvec, gaps, transfer, martingale);
criterion_main!(benches);
