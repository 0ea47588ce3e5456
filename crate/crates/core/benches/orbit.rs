use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polyform::block_matrix::StripProfile;
use polyform::orbit_oracle::{census, StateSpace};
use polyform::par;
use polyform::schema::{ColStrip, RowStrip, SchemaId};

fn census_threads(c: &mut Criterion) {
    let cases = [
        ("SnCeta_x_S3", StripProfile::new(vec![(RowStrip::Sn, 1), (RowStrip::Ceta, 1)], vec![(ColStrip::S3, 1)])),
        (
            "SnSn2_x_S2S3",
            StripProfile::new(vec![(RowStrip::Sn, 1), (RowStrip::Sn2, 1)], vec![(ColStrip::S2, 1), (ColStrip::S3, 1)]),
        ),
    ];
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for (label, profile) in cases {
        let space = StateSpace::new(SchemaId::APRIME, &profile.unwrap(), 1 << 22).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", label), &space, |b, s| {
            b.iter(|| par::with_threads(1, || census(s)))
        });
        group.bench_with_input(BenchmarkId::new(format!("parallel-{threads}"), label), &space, |b, s| {
            b.iter(|| par::with_threads(threads, || census(s)))
        });
    }
    group.finish();
}

criterion_group!(benches, census_threads);
criterion_main!(benches);
