use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rifslab_core::boxcount::BoxGrid;
use rifslab_core::hausdorff::hausdorff_distance_with;
use rifslab_core::*;

fn carpet_rifs() -> Rifs {
    let systems = [
        CarpetSpec::from_column_counts(2, 3, &[2, 2]).unwrap(),
        CarpetSpec::from_column_counts(3, 4, &[4, 4, 0]).unwrap(),
    ]
    .iter()
    .enumerate()
    .map(|(i, c)| DeterministicIfs::from_carpet(format!("c{i}"), c).unwrap())
    .collect();
    Rifs::new(AmbientBox::unit(2), systems).unwrap()
}

fn options(exec: Exec) -> CoverOptions {
    CoverOptions {
        exec,
        ..Default::default()
    }
}

fn bench(c: &mut Criterion) {
    let rifs = carpet_rifs();
    let omega = OmegaSeq::periodic(vec![1, 2]).unwrap();
    let modes = [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ];

    let mut g = c.benchmark_group("cylinder_cover");
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::new(name, 10), &exec, |b, &e| {
            b.iter(|| cylinder_cover_with(&rifs, &omega, 10, &options(e)).unwrap())
        });
    }
    g.finish();

    let cover = cylinder_cover(&rifs, &omega, 10).unwrap();
    let grid = BoxGrid::anchored(rifs.ambient(), 1.0 / 512.0).unwrap();
    let mut g = c.benchmark_group("count_boxes");
    for (name, exec) in modes {
        g.bench_function(name, |b| b.iter(|| grid.count_boxes(cover.boxes(), exec)));
    }
    g.finish();

    let a = cylinder_cover(&rifs, &omega, 8).unwrap();
    let b = cylinder_cover(&rifs, &OmegaSeq::periodic(vec![2, 1]).unwrap(), 8).unwrap();
    let mut g = c.benchmark_group("hausdorff_distance");
    g.sample_size(10);
    for (name, exec) in modes {
        g.bench_function(name, |bch| {
            bch.iter(|| hausdorff_distance_with(a.points(), b.points(), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
