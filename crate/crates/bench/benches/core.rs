use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shiftcodes::lattice::LatticeKind;
use shiftcodes::mc::{analytic_pe_hex, run_mc, McConfig};
use shiftcodes::ShiftVector;

fn decode(c: &mut Criterion) {
    let hex = LatticeKind::Hexagonal { n: 2 }.build().unwrap();
    let shift = ShiftVector::single(0.31, -0.47);
    c.bench_function("decode_shift hex", |b| b.iter(|| hex.decode_shift(black_box(&shift)).unwrap()));

    let shor = LatticeKind::Shor9.build().unwrap();
    let shift = ShiftVector::new((0..18).map(|i| 0.05 * (i as f64 - 9.0)).collect()).unwrap();
    c.bench_function("decode_shift shor9", |b| b.iter(|| shor.decode_shift(black_box(&shift)).unwrap()));
}

fn analytic(c: &mut Criterion) {
    c.bench_function("analytic_pe_hex", |b| b.iter(|| analytic_pe_hex(black_box(0.5)).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let code = LatticeKind::SymmetricSquare { n: 2 }.build().unwrap();
    let mut cfg = McConfig::new(code, 0.4, 10_000, 1);
    cfg.workers = 1;
    c.bench_function("run_mc square 10k", |b| b.iter(|| run_mc(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, decode, analytic, monte_carlo);
criterion_main!(benches);
