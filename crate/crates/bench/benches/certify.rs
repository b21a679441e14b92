//! Certificate construction cost at representative speeds.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stickslip_core::attractor::{build_theorem1_pencils, tau0_max};
use stickslip_core::sdp::solve;
use stickslip_core::{certify_attractor, error_matrix, maximize_basin, PhysicalParams};

const P: PhysicalParams = PhysicalParams::table1();

fn lmi_solve(c: &mut Criterion) {
    let tau0 = 0.5 * tau0_max(&error_matrix(&P)).unwrap();
    let problem = build_theorem1_pencils(&P, 10.0, tau0).unwrap();
    c.bench_function("solve attractor LMIs", |b| b.iter(|| solve(black_box(&problem)).unwrap()));
}

fn certificates(c: &mut Criterion) {
    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    for v in [1.45, 10.0] {
        group.bench_function(format!("attractor v_ref={v}"), |b| b.iter(|| certify_attractor(&P, black_box(v)).unwrap()));
        group.bench_function(format!("basin v_ref={v}"), |b| b.iter(|| maximize_basin(&P, black_box(v)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, lmi_solve, certificates);
criterion_main!(benches);
