use criterion::{black_box, criterion_group, criterion_main, Criterion};
use untwist_core::engine::{analyze, AnalysisConfig};
use untwist_core::floer_engine::{partner_v_check, PartialV};
use untwist_core::forms_and_d::{lens_spectrum, m_q};
use untwist_core::knot_model::{load_dataset, torsion_v, torus_knot};
use untwist_core::numeric::{rat, Form2};
use untwist_core::signature_engine::torus_sigma_bar;

fn signature_count(c: &mut Criterion) {
    c.bench_function("torus_sigma_bar 29x31", |b| {
        let x = rat(13, 37);
        b.iter(|| torus_sigma_bar(black_box(29), black_box(31), black_box(&x)).unwrap())
    });
}

fn lens_recursion(c: &mut Criterion) {
    c.bench_function("lens_spectrum 23/17", |b| {
        b.iter(|| lens_spectrum(black_box(23), black_box(17)).unwrap())
    });
    c.bench_function("lens_spectrum 97/64", |b| {
        b.iter(|| lens_spectrum(black_box(97), black_box(64)).unwrap())
    });
}

fn covector_minima(c: &mut Criterion) {
    c.bench_function("m_q 12,11", |b| {
        let form = Form2::new(12, 11);
        b.iter(|| m_q(black_box(&form)).unwrap())
    });
    c.bench_function("m_q 49,48", |b| {
        let form = Form2::new(49, 48);
        b.iter(|| m_q(black_box(&form)).unwrap())
    });
}

fn partner_feasibility(c: &mut Criterion) {
    let v = torsion_v(3, 17).unwrap();
    let pv = PartialV::from(&v);
    c.bench_function("partner_v_check T(3,17) l=7", |b| {
        b.iter(|| partner_v_check(black_box(&pv), black_box(7)))
    });
    let v78 = torsion_v(7, 8).unwrap();
    let pv78 = PartialV::from(&v78);
    c.bench_function("partner_v_check T(7,8) l=8", |b| {
        b.iter(|| partner_v_check(black_box(&pv78), black_box(8)))
    });
}

fn full_analysis(c: &mut Criterion) {
    let data = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/knots_8.json"
    ))
    .unwrap();
    let records = load_dataset(&data).unwrap();
    let config = AnalysisConfig::default();
    c.bench_function("analyze full 8-crossing dataset", |b| {
        b.iter(|| {
            for rec in &records {
                analyze(black_box(rec), &config).unwrap();
            }
        })
    });
    let t78 = torus_knot(7, 8).unwrap();
    c.bench_function("analyze T(7,8)", |b| {
        b.iter(|| analyze(black_box(&t78), &config).unwrap())
    });
}

criterion_group!(
    benches,
    signature_count,
    lens_recursion,
    covector_minima,
    partner_feasibility,
    full_analysis
);
criterion_main!(benches);
