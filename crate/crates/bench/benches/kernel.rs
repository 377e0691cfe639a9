use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dmfbm_core::fbm::{FbmGenerator, RngSpec, SimulationMethod};
use dmfbm_core::fredholm::{assemble, Grid, SolverConfig};
use dmfbm_core::{HurstPair, KernelModel, KernelOptions};

fn models() -> (KernelModel, KernelModel) {
    let h = HurstPair::strict(0.6, 0.7).unwrap();
    (
        KernelModel::new(h, 1.0, KernelOptions::default()).unwrap(),
        KernelModel::new(h, 1.0, KernelOptions::direct()).unwrap(),
    )
}

fn hypergeometric(c: &mut Criterion) {
    let (table, direct) = models();
    let zs: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
    let mut g = c.benchmark_group("F_k");
    for (name, m) in [("table", &table), ("direct", &direct)] {
        g.bench_function(name, |b| {
            b.iter(|| {
                let mut acc = 0.0;
                for (i, &z) in zs.iter().enumerate() {
                    acc += m.eval_f(1 + i % 5, black_box(z)).unwrap();
                }
                acc
            })
        });
    }
    g.finish();
}

fn kernel_factor(c: &mut Criterion) {
    let (table, direct) = models();
    let mut g = c.benchmark_group("L");
    for (name, m) in [("table", &table), ("direct", &direct)] {
        g.bench_function(BenchmarkId::new(name, "lower"), |b| {
            b.iter(|| m.eval_l(black_box(0.7), black_box(0.3)).unwrap())
        });
        g.bench_function(BenchmarkId::new(name, "upper"), |b| {
            b.iter(|| m.eval_l(black_box(0.3), black_box(0.7)).unwrap())
        });
    }
    g.finish();
}

fn assembly(c: &mut Criterion) {
    let (table, _) = models();
    let mut g = c.benchmark_group("assemble");
    g.sample_size(10);
    for n in [25usize, 50] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| assemble(&table, &SolverConfig::new(n)).unwrap())
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let grid = Grid::new(10.0, 1000).unwrap();
    let mut g = c.benchmark_group("fbm");
    for method in [SimulationMethod::Circulant, SimulationMethod::Cholesky] {
        let gen = FbmGenerator::new(0.7, grid, method).unwrap();
        g.bench_function(method.to_string(), |b| {
            let mut k = 0;
            b.iter(|| {
                k += 1;
                gen.sample(&RngSpec::new(1, k))
            })
        });
    }
    g.finish();
}

criterion_group!(benches, hypergeometric, kernel_factor, assembly, simulation);
criterion_main!(benches);
