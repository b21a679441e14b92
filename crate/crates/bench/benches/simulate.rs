//! Time-stepping throughput.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use stickslip_core::{detect_cycle, simulate, step, PhysicalParams, SimConfig};

const P: PhysicalParams = PhysicalParams::table1();

fn single_step(c: &mut Criterion) {
    let tol = 1e-6 * P.v_s;
    c.bench_function("step slip", |b| b.iter(|| step(&P, 1.0, black_box(2.0), black_box(-3.0), 1e-3, tol)));
    c.bench_function("step stick", |b| b.iter(|| step(&P, 1.0, black_box(0.0), black_box(-3.0), 1e-3, tol)));
}

fn full_run(c: &mut Criterion) {
    let cfg = SimConfig::new(&P, 6.0, 0.0);
    let mut group = c.benchmark_group("simulate");
    group.throughput(Throughput::Elements(cfg.steps() as u64));
    for v in [1.0, 10.0] {
        group.bench_function(format!("v_ref={v} T=40"), |b| {
            b.iter(|| {
                let traj = simulate(&P, black_box(v), &cfg).unwrap();
                detect_cycle(&P, &traj, v, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, single_step, full_run);
criterion_main!(benches);
