use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use emlimit_core::experiments::{Family, FamilyKind};
use emlimit_core::ops::random_divfree_field;
use emlimit_core::timestepping::{EmIntegrator, PropagatorCache, Scheme};
use emlimit_core::{GridSpec, SpectralContext};

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    for n in [16, 32] {
        let grid = GridSpec::new(n).unwrap();
        let ctx = SpectralContext::new(grid);
        let f = random_divfree_field(grid, 1, 1.0, 6.0).unwrap();
        g.bench_with_input(BenchmarkId::new("round_trip", n), &n, |b, _| {
            b.iter(|| ctx.from_physical(&ctx.to_physical(&f)))
        });
    }
    g.finish();
}

/// Plain steps only: the cost per step should not depend on c.
fn em_step(c: &mut Criterion) {
    let grid = GridSpec::new(32).unwrap();
    let ctx = SpectralContext::new(grid);
    let family = Family::new(FamilyKind::FixedE, 7);
    let mhd = family.mhd_initial(grid).unwrap();
    let dt = 1.0 / 512.0;
    let mut g = c.benchmark_group("em_step_n32");
    g.sample_size(20);
    for speed in [4.0, 32.0] {
        let init = family.em_initial(&ctx, &mhd, speed).unwrap();
        let props = PropagatorCache::maxwell(grid, speed, 2);
        let mut it = EmIntegrator::new(&ctx, &props, Scheme::Etd2, &init).unwrap();
        it.advance(dt).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(speed), &speed, |b, _| {
            b.iter(|| it.advance(dt).unwrap())
        });
    }
    g.finish();
}

fn propagator_table(c: &mut Criterion) {
    let grid = GridSpec::new(32).unwrap();
    c.bench_function("telegraph_table_n32", |b| {
        b.iter(|| PropagatorCache::maxwell(grid, 16.0, 2).telegraph(1.0 / 512.0))
    });
}

criterion_group!(benches, transforms, em_step, propagator_table);
criterion_main!(benches);
