//! Lattice-sum kernels, sequential against rayon. Without the `parallel`
//! feature both rows run the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use shintani::instances;
use shintani::lseries::kernel::box_norm_product;
use shintani::lseries::{LSeriesConfig, SumKind};
use shintani::padic::PadicExponent;
use shintani::par::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn flagship_truncation(c: &mut Criterion) {
    let inst = instances::sqrt5_n5();
    let chi = inst.quadratic_character().unwrap();
    let s = PadicExponent::from_int(3, 0, 6).unwrap();
    let mut group = c.benchmark_group("flagship_truncate_level2");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = LSeriesConfig::dirichlet(inst.decomposition.clone(), chi.clone(), 3, 6)
            .unwrap()
            .with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| cfg.truncate(&SumKind::Chi, &s, 2).unwrap())
        });
    }
    group.finish();
}

fn norm_product(c: &mut Criterion) {
    let dec = instances::q_sqrt5_decomposition();
    let cone = &dec.cones()[0];
    let mut group = c.benchmark_group("box_norm_product_3^7");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| box_norm_product(cone, &[2187, 2187], 3, 3u64.pow(9), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, flagship_truncation, norm_product);
criterion_main!(benches);
