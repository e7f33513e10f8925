use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use deltaconf::hex::{ortho_to_hex, resolve_overlaps};
use deltaconf::ortho::{layout_upward_ortho, root_at_leaf};
use deltaconf::render::{build_drawing, LayoutRef};
use deltaconf::tree::build_delta_tree;
use deltaconf::{eliminate, gen_dh_random, ExtensionWeights, RenderOptions};

const SIZES: [usize; 3] = [256, 1024, 4096];

fn recognition(c: &mut Criterion) {
    let mut group = c.benchmark_group("eliminate");
    for n in SIZES {
        let (g, _) = gen_dh_random(n, 1, ExtensionWeights::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| eliminate(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn layouts(c: &mut Criterion) {
    let mut group = c.benchmark_group("layout");
    for n in SIZES {
        let (g, _) = gen_dh_random(n, 2, ExtensionWeights::default()).unwrap();
        let t = build_delta_tree(&g, &eliminate(&g).unwrap()).unwrap();
        let rbt = root_at_leaf(&t, None).unwrap();
        group.bench_with_input(BenchmarkId::new("ortho", n), &rbt, |b, r| {
            b.iter(|| layout_upward_ortho(black_box(r)))
        });
        let ortho = layout_upward_ortho(&rbt);
        group.bench_with_input(BenchmarkId::new("hex", n), &ortho, |b, o| {
            b.iter(|| resolve_overlaps(&ortho_to_hex(black_box(o))).unwrap())
        });
    }
    group.finish();
}

fn rendering(c: &mut Criterion) {
    let (g, _) = gen_dh_random(1024, 3, ExtensionWeights::default()).unwrap();
    let t = build_delta_tree(&g, &eliminate(&g).unwrap()).unwrap();
    let hex = resolve_overlaps(&ortho_to_hex(&layout_upward_ortho(
        &root_at_leaf(&t, None).unwrap(),
    )))
    .unwrap();
    let opts = RenderOptions::default();
    c.bench_function("render/hex/1024", |b| {
        b.iter(|| {
            build_drawing(&t, LayoutRef::Hex(&hex), &opts)
                .unwrap()
                .to_svg(&opts)
        })
    });
}

criterion_group!(benches, recognition, layouts, rendering);
criterion_main!(benches);
