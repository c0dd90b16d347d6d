use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use frechet_bench::{diagram, measure1d, spd};
use frechet_core::constructions::{GroupSpec, QuotientSpace, RegularizedSpace};
use frechet_core::spaces::{BuresWassersteinSpace, EuclideanSpace, PersistenceDiagramSpace, Wasserstein1D};
use frechet_core::MetricSpace;

fn distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance");
    let pd = PersistenceDiagramSpace::new(2.0).unwrap();
    for points in [4, 16, 64] {
        let (x, y) = (diagram(points, 1), diagram(points, 2));
        group.bench_with_input(BenchmarkId::new("persistence", points), &points, |b, _| {
            b.iter(|| pd.distance(black_box(&x), black_box(&y)))
        });
    }
    let w = Wasserstein1D::new(2.0).unwrap();
    for atoms in [16, 256, 4096] {
        let (x, y) = (measure1d(atoms, 3), measure1d(atoms, 4));
        group.bench_with_input(BenchmarkId::new("wasserstein1d", atoms), &atoms, |b, _| {
            b.iter(|| w.distance(black_box(&x), black_box(&y)))
        });
    }
    for dim in [2, 8, 32] {
        let bw = BuresWassersteinSpace::new(dim).unwrap();
        let (x, y) = (spd(dim, 5), spd(dim, 6));
        group.bench_with_input(BenchmarkId::new("bures_wasserstein", dim), &dim, |b, _| {
            b.iter(|| bw.distance(black_box(&x), black_box(&y)))
        });
    }
    let plane = EuclideanSpace::new(2).unwrap();
    for order in [4, 32, 256] {
        let rotations = GroupSpec::cyclic_rotations(order).unwrap();
        let quo = QuotientSpace::new(plane, rotations.clone());
        let reg = RegularizedSpace::new(plane, rotations, 1.0).unwrap();
        let (x, y) = (vec![1.0, 2.0], vec![-0.5, 3.0]);
        group.bench_with_input(BenchmarkId::new("quotient", order), &order, |b, _| {
            b.iter(|| quo.distance(black_box(&x), black_box(&y)))
        });
        group.bench_with_input(BenchmarkId::new("regularized", order), &order, |b, _| {
            b.iter(|| reg.distance(black_box(&x), black_box(&y)))
        });
    }
    group.finish();
}

criterion_group!(benches, distances);
criterion_main!(benches);
