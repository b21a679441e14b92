//! Time-stepping properties: convergence order, consistency of stick
//! samples, absence of chattering, and agreement with the certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stickslip_core::dynamics::state_rhs;
use stickslip_core::{certify_attractor, detect_cycle, equilibrium, simulate, ErrorState, Mode, PhysicalParams, SimConfig, Vec2};

const P: PhysicalParams = PhysicalParams::table1();

fn config(v0: f64, z0: f64, dt: f64, t_end: f64) -> SimConfig {
    SimConfig {
        dt,
        t_end,
        ..SimConfig::new(&P, v0, z0)
    }
}

#[test]
fn step_halving_is_first_order_on_slip() {
    let finals: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let traj = simulate(&P, 10.0, &config(6.0, 0.0, dt, 2.0)).unwrap();
            assert!(traj.samples.iter().all(|s| s.mode == Mode::Slip && s.v > 0.0));
            traj.samples.last().unwrap().v
        })
        .collect();
    let ratio = (finals[0] - finals[1]).abs() / (finals[1] - finals[2]).abs();
    assert!((1.5..=3.0).contains(&ratio), "step-halving ratio {ratio}");
}

#[test]
fn stick_samples_respect_static_friction() {
    let f_s = P.bounds().f_s;
    let dt = 1e-3;
    for v_ref in [0.5, 1.0] {
        let traj = simulate(&P, v_ref, &config(6.0, 0.0, dt, 40.0)).unwrap();
        let mut sticks = 0;
        for w in traj.samples.windows(2) {
            let s = w[1];
            if s.mode == Mode::Stick {
                sticks += 1;
                assert_eq!(s.v, 0.0);
                assert!((P.k * s.z).abs() <= f_s + 1e-9, "|kz| = {} at t = {}", (P.k * s.z).abs(), s.t);
                assert!((w[0].z - dt * v_ref - s.z).abs() < 1e-12);
            }
        }
        assert!(sticks > 0, "v_ref = {v_ref}: no stick phase observed");
    }
}

#[test]
fn increments_lie_near_the_inclusion() {
    let dt = 1e-3;
    let traj = simulate(&P, 1.0, &config(6.0, 0.0, dt, 40.0)).unwrap();
    let mut worst: f64 = 0.0;
    for w in traj.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        let accel = (b.v - a.v) / dt;
        let d = state_rhs(&P, 1.0, b.v, b.z)
            .first()
            .distance(accel)
            .min(state_rhs(&P, 1.0, a.v, a.z).first().distance(accel));
        worst = worst.max(d);
        assert!(((b.z - a.z) / dt - (b.v - 1.0)).abs() < 1e-9);
    }
    // The Stribeck magnitude is frozen over a step, so the mismatch is O(dt).
    assert!(worst <= 1e3 * dt, "largest distance to the inclusion {worst}");
}

#[test]
fn no_chattering() {
    let traj = simulate(&P, 1.0, &config(6.0, 0.0, 1e-3, 40.0)).unwrap();
    let switches = traj.samples.windows(2).filter(|w| w[0].mode != w[1].mode).count();
    let period = std::f64::consts::TAU * (P.m / P.k).sqrt();
    assert!(switches as f64 <= 4.0 * (40.0 / period).ceil(), "{switches} mode switches");
}

#[test]
fn attractor_level_does_not_grow_outside() {
    for v_ref in [1.0, 10.0] {
        let cert = certify_attractor(&P, v_ref).unwrap();
        let eq = equilibrium(&P, v_ref).unwrap();
        let level = |v: f64, z: f64| cert.p_g.quad(&ErrorState::from_physical(&eq, v, z).as_vec());
        let mut outside = 0;
        let starts = [(6.0, 0.0), (0.0, eq.z_inf + 30.0), (eq.v_inf + 20.0, eq.z_inf - 20.0)];
        for (v0, z0) in starts {
            let traj = simulate(&P, v_ref, &config(v0, z0, 1e-3, 40.0)).unwrap();
            for w in traj.samples.windows(2) {
                let (l0, l1) = (level(w[0].v, w[0].z), level(w[1].v, w[1].z));
                if l0 >= 1.05 {
                    outside += 1;
                    assert!(l1 <= l0 * (1.0 + 1e-6), "v_ref = {v_ref}: level {l0} -> {l1} at t = {}", w[1].t);
                }
            }
        }
        assert!(outside > 0, "v_ref = {v_ref}: trajectory never left the attractor");
    }
}

#[test]
fn high_speed_runs_converge_from_far_away() {
    let v_ref = 10.0;
    let eq = equilibrium(&P, v_ref).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..12 {
        let radius = 50.0 * rng.random::<f64>().sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let eps = Vec2::new(radius * angle.cos(), radius * angle.sin());
        let cfg = config(eq.v_inf + eps.x(), eq.z_inf + eps.y(), 1e-3, 40.0);
        let traj = simulate(&P, v_ref, &cfg).unwrap();
        let report = detect_cycle(&P, &traj, v_ref, &cfg).unwrap();
        assert!(report.converged, "ε₀ = {eps:?}: {report:?}");
        assert!(!report.detected);
    }
}

#[test]
fn limit_cycle_and_its_disappearance() {
    let cfg = config(6.0, 0.0, 1e-3, 40.0);
    let at_one = detect_cycle(&P, &simulate(&P, 1.0, &cfg).unwrap(), 1.0, &cfg).unwrap();
    assert!(at_one.detected, "{at_one:?}");
    assert!((at_one.period - 5.0).abs() <= 0.5);
    assert!((at_one.amplitude - 2.4).abs() <= 0.2);
    let faster = detect_cycle(&P, &simulate(&P, 1.6, &cfg).unwrap(), 1.6, &cfg).unwrap();
    assert!(faster.converged && !faster.detected, "{faster:?}");
}
