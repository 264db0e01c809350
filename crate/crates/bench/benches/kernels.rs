use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use haefliger_core::gring::Current;
use haefliger_core::identities::{ahat_cp_ring, verify_coth_cancellation, verify_sqrt_claim};
use haefliger_core::lefschetz::{lefschetz, Complex, Lift, Route, SymbolDatum};
use haefliger_core::series::NamedSeries;
use haefliger_core::spaces::build_universal_example;
use haefliger_core::Cyclotomic;

fn arithmetic(c: &mut Criterion) {
    let a = &Cyclotomic::root_of_unity(24, 5) + &Cyclotomic::from_int(3);
    let b = &Cyclotomic::root_of_unity(40, 7) - &Cyclotomic::zeta(8);
    c.bench_function("cyclotomic mul (conductor 120)", |x| x.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("cyclotomic inverse (conductor 24)", |x| x.iter(|| black_box(&a).inv().unwrap()));
}

fn series(c: &mut Criterion) {
    c.bench_function("Todd series to z^30", |x| x.iter(|| NamedSeries::Todd.build(black_box(30))));
    c.bench_function("coth series to z^19", |x| x.iter(|| NamedSeries::Coth.build(black_box(19))));
}

fn genera(c: &mut Criterion) {
    c.bench_function("Â(CP_12) via the ring", |x| x.iter(|| ahat_cp_ring(black_box(12)).unwrap()));
}

fn lefschetz_numbers(c: &mut Criterion) {
    let components = build_universal_example(3).unwrap();
    let current = Current::dual_named(components[0].base_ring().unwrap(), "eta1*beta1*eta2*beta2").unwrap();
    for (name, complex) in [("signature", Complex::Signature), ("spin+", Complex::Spin(Lift::Plus))] {
        let symbol = SymbolDatum::Classical(complex);
        for route in [Route::Strict, Route::General, Route::Basic3] {
            c.bench_function(&format!("universal k=3 {name} {route}"), |x| {
                x.iter(|| lefschetz(route, &components, &symbol, &current, None).unwrap())
            });
        }
    }
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("identities");
    g.sample_size(10);
    g.bench_function("coth cancellation n=5", |x| x.iter(|| verify_coth_cancellation(black_box(5), None).unwrap()));
    g.bench_function("sqrt claim N=30", |x| x.iter(|| verify_sqrt_claim(black_box(30), None).unwrap()));
    g.finish();
}

criterion_group!(benches, arithmetic, series, genera, lefschetz_numbers, identities);
criterion_main!(benches);
