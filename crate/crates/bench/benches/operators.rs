use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use theta_lab::gmks::{shimura_composite, HodgeFrame};
use theta_lab::hermidx::enumerate_indices;
use theta_lab::maass::{delta_iterate, shimura_closed_formula, NearlyHoloForm};
use theta_lab::qexp::frobenius;
use theta_lab::theta::{theta, theta_power};
use theta_lab_bench::{dense, det_input, diagonal_point, eisenstein4, gaussian};

fn series(c: &mut Criterion) {
    let e4 = eisenstein4(30);
    let f2 = dense(2, 6);
    c.bench_function("theta e4 bound 30", |b| b.iter(|| theta(black_box(&e4))));
    c.bench_function("theta^2 n=2 bound 6", |b| b.iter(|| theta_power(black_box(&f2), 2).unwrap()));
    c.bench_function("frobenius p=2 n=2 bound 6", |b| b.iter(|| frobenius(black_box(&f2), 2, None).unwrap()));
    c.bench_function("enumerate n=2 bound 10", |b| b.iter(|| enumerate_indices(2, gaussian(), black_box(10)).unwrap()));
    let form = NearlyHoloForm::from_qexp(&e4, 4).unwrap();
    c.bench_function("delta^3 e4", |b| b.iter(|| delta_iterate(black_box(&form), 3).unwrap()));
}

fn shimura(c: &mut Criterion) {
    let p = diagonal_point(2);
    let input = det_input(2, 7);
    let du = input.to_du_form(2, gaussian());
    let frame = HodgeFrame::new(&p).unwrap();
    c.bench_function("det closed formula n=2", |b| b.iter(|| shimura_closed_formula(black_box(&input), &p).unwrap()));
    c.bench_function("det composite n=2", |b| b.iter(|| shimura_composite(black_box(&du), &frame).unwrap()));
}

criterion_group!(benches, series, shimura);
criterion_main!(benches);
