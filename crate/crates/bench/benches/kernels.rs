use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use insdg::dgops::{
    advection_surface_kernel, advection_volume_kernel, local_gradient_kernel, sipdg_kernel,
    EllipticBc,
};
use insdg_bench::Fixture;

const CELLS: usize = 16;

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    for n in 1..=5 {
        let fx = Fixture::new(CELLS, n).expect("fixture");
        let (re, geom, conn) = (&fx.disc.re, &fx.disc.geom, &fx.disc.conn);
        let [u, v, w, z] = &fx.fields;
        let mut a = vec![0.0; fx.len()];
        let mut b = vec![0.0; fx.len()];
        group.bench_with_input(BenchmarkId::new("local_gradient", n), &n, |bench, _| {
            bench.iter(|| local_gradient_kernel(re, geom, black_box(u), &mut a, &mut b))
        });
        group.bench_with_input(BenchmarkId::new("sipdg", n), &n, |bench, _| {
            bench.iter(|| {
                sipdg_kernel(
                    re,
                    geom,
                    conn,
                    EllipticBc::VELOCITY,
                    1.0,
                    black_box(u),
                    v,
                    w,
                    None,
                    &mut a,
                )
            })
        });
        group.bench_with_input(BenchmarkId::new("advection_volume", n), &n, |bench, _| {
            bench.iter(|| advection_volume_kernel(re, geom, black_box(u), v, w, z, &mut a, &mut b))
        });
        group.bench_with_input(BenchmarkId::new("advection_surface", n), &n, |bench, _| {
            bench.iter(|| {
                advection_surface_kernel(
                    re,
                    geom,
                    conn,
                    black_box(u),
                    v,
                    w,
                    z,
                    &fx.boundary,
                    &mut a,
                    &mut b,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
