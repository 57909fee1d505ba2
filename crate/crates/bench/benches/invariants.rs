use amalgam_core::amalgam::{s4_s4, sl2z};
use amalgam_core::snf::from_i64;
use amalgam_core::{
    build_a_gamma, character_table, k_groups, smith_normal_form, solve, verify_relations, verify_stationarity,
    FiniteGroup, GaugeWeights, DEFAULT_BALL_BUDGET,
};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn snf(c: &mut Criterion) {
    let m: Vec<Vec<i64>> = (0..8).map(|i| (0..8).map(|j| ((i * 7 + j * 3) % 11) as i64 - 5).collect()).collect();
    let m = from_i64(&m);
    c.bench_function("smith normal form 8x8", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn characters(c: &mut Criterion) {
    let s4 = FiniteGroup::symmetric(4).unwrap();
    let d6 = FiniteGroup::dihedral(6).unwrap();
    c.bench_function("character table S4", |b| b.iter(|| character_table(black_box(&s4)).unwrap()));
    c.bench_function("character table D6", |b| b.iter(|| character_table(black_box(&d6)).unwrap()));
}

fn k_theory(c: &mut Criterion) {
    let spec = s4_s4();
    let table = character_table(spec.subgroup()).unwrap();
    c.bench_function("A_Γ and K-groups S4*S4", |b| {
        b.iter(|| k_groups(&build_a_gamma(black_box(&spec), &table).unwrap()))
    });
}

fn geometry(c: &mut Criterion) {
    let spec = sl2z();
    c.bench_function("ball radius 6 SL2Z", |b| b.iter(|| spec.ball(black_box(6), DEFAULT_BALL_BUDGET).unwrap()));
    c.bench_function("hyperbolicity radius 3 SL2Z", |b| {
        b.iter(|| spec.hyperbolicity_delta(black_box(3), DEFAULT_BALL_BUDGET).unwrap())
    });
}

fn measures(c: &mut Criterion) {
    let spec = s4_s4();
    let sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
    c.bench_function("stationarity depth 2 S4*S4", |b| {
        b.iter(|| verify_stationarity(black_box(&spec), &sol, 2, 1e-10).unwrap())
    });
    let sl = sl2z();
    c.bench_function("fock relations L=4 SL2Z", |b| {
        b.iter(|| verify_relations(black_box(&sl), 4, DEFAULT_BALL_BUDGET).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = snf, characters, k_theory, geometry, measures
}
criterion_main!(benches);
