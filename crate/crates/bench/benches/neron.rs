use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};

use hodge_neron_cli::scenario::{load_scenario, Scenario};
use hodge_neron_core::exact::{vecops, QI};
use hodge_neron_core::neron::{f0m_presentation, tz_limit_points};
use hodge_neron_core::normal_function::graph_closure_fiber;
use hodge_neron_core::orbit::{estimate_scan, ScanGrid};

fn scenario(name: &str) -> Scenario {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/scenarios").join(format!("{name}.json"));
    load_scenario(&p).expect("bundled scenario")
}

fn presentation(c: &mut Criterion) {
    let d = scenario("example2").orbit;
    c.bench_function("presentation example2", |b| b.iter(|| f0m_presentation(&d, 2).unwrap()));
}

fn limits(c: &mut Criterion) {
    let d = scenario("example2").orbit;
    c.bench_function("tz limits example2 height 10", |b| b.iter(|| tz_limit_points(&d, &[0, 1], true, 10).unwrap()));
    let s = scenario("example3");
    let x = s.mixed.as_ref().unwrap();
    c.bench_function("graph closure example3 origin", |b| b.iter(|| graph_closure_fiber(x, &[0, 1], 10).unwrap()));
}

fn scan(c: &mut Criterion) {
    let d = scenario("example2").orbit;
    let grid = ScanGrid { levels: vec![10.0, 20.0, 40.0, 80.0], xs: vec![0.0, 1.0 / 3.0, 2.0 / 3.0] };
    let hs: Vec<Vec<QI>> = (0..4).map(|k| vecops::unit(4, k)).collect();
    c.bench_function("estimate scan example2", |b| b.iter(|| estimate_scan(&d, &hs, &grid, true).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = presentation, limits, scan
}
criterion_main!(benches);
