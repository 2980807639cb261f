use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use flatcone::chains::Chain;
use flatcone::fixtures;
use flatcone::geodesic::{trace, DirectedPoint};
use flatcone::saddle::{enumerate_saddle_connections, SaddleOptions};
use flatcone::spectrum::{geodesic_length, CurveWord};
use flatcone::surface::Crossing;
use flatcone::PlanePoint;

fn bench_trace(c: &mut Criterion) {
    let octagon = fixtures::build_octagon();
    let start = DirectedPoint::new(0, PlanePoint::new(0.11, -0.37), PlanePoint::new(3.0, 1.7));
    c.bench_function("trace octagon length 100", |b| {
        b.iter(|| trace(&octagon, black_box(start), black_box(100.0)).unwrap().length)
    });
}

fn bench_saddles(c: &mut Criterion) {
    let torus = fixtures::build_marked_torus();
    c.bench_function("saddles marked torus bound 8", |b| {
        b.iter(|| {
            enumerate_saddle_connections(&torus, black_box(8.0), &SaddleOptions::default())
                .unwrap()
                .len()
        })
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let torus = fixtures::build_torus();
    let word = CurveWord::new(vec![
        Crossing::new(1, true),
        Crossing::new(1, true),
        Crossing::new(1, true),
        Crossing::new(0, false),
        Crossing::new(0, false),
    ]);
    c.bench_function("spectrum torus (3,2) word", |b| {
        b.iter(|| geodesic_length(&torus, black_box(&word)).unwrap().length)
    });
}

fn bench_chain(c: &mut Criterion) {
    let chain = Chain::rational(5, 2, 0.0).unwrap();
    c.bench_function("chain sweep counts to 10^4", |b| {
        b.iter(|| chain.sweep_counts(black_box(10_000)).values.len())
    });
}

criterion_group!(benches, bench_trace, bench_saddles, bench_spectrum, bench_chain);
criterion_main!(benches);
