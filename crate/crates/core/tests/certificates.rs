//! Certificate conclusions checked against the true friction nonlinearity,
//! independently of the SDP solver.

use stickslip_core::attractor::{scan_tau0, tau0_grid};
use stickslip_core::basin::{certificate_holds_at, corollary1_certificate};
use stickslip_core::{certify_attractor, certify_basin, certify_gas, check_corollary1, maximize_basin, Error, PhysicalParams};

const P: PhysicalParams = PhysicalParams::table1();

#[test]
fn attractor_replays_hold() {
    for v in [0.07, 1.0, 1.45, 10.0] {
        let cert = certify_attractor(&P, v).unwrap();
        assert!(cert.verify(&P).unwrap(), "v_ref = {v}: attractor fails re-verification");
        let report = cert.replay(&P, 200, 7).unwrap();
        assert!(report.passed(), "v_ref = {v}: {report:?}");
        assert!(cert.eta > 0.0);
    }
}

#[test]
fn basin_replays_hold() {
    for v in [0.07, 1.45, 3.0, 10.0] {
        let cert = maximize_basin(&P, v).unwrap();
        assert!(cert.verify(&P).unwrap(), "v_ref = {v}: basin fails re-verification");
        let report = cert.replay(&P, 200, 11).unwrap();
        assert!(report.passed(), "v_ref = {v}: {report:?}");
        assert!(cert.r_l > 0.0 && cert.r_l < v);
        assert!(cert.eta.is_finite() && cert.eta > 0.0);
    }
}

#[test]
fn fixed_radius_basin_at_lower_speed() {
    let cert = certify_basin(&P, 1.45, 0.3).unwrap();
    assert!(cert.verify(&P).unwrap());
    assert!(cert.replay(&P, 200, 3).unwrap().passed());
}

#[test]
fn basin_rejected_in_unstable_zone() {
    assert!(matches!(maximize_basin(&P, 1.0), Err(Error::UnstableZone { .. })));
    assert!(matches!(certify_basin(&P, 1.0, 0.5), Err(Error::UnstableZone { .. })));
}

#[test]
fn gas_inclusion_replay_holds() {
    let cert = certify_gas(&P, 10.0).unwrap();
    assert!(cert.verify(&P).unwrap());
    assert!(cert.attractor.replay(&P, 200, 5).unwrap().passed());
    assert!(cert.basin.replay(&P, 200, 5).unwrap().passed());
    let report = cert.inclusion_replay(500, 13);
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.samples, 500);
}

#[test]
fn gas_not_certified_at_low_speed() {
    assert!(matches!(certify_gas(&P, 3.0), Err(Error::NotCertified(_))));
}

#[test]
fn corollary_certificate_covers_higher_speeds() {
    assert!(check_corollary1(&P, 10.0).unwrap());
    let cert = corollary1_certificate(&P, 10.0).unwrap().unwrap();
    for v in [10.0, 20.0, 80.0] {
        assert!(certificate_holds_at(&P, &cert, v).unwrap(), "certificate lost at v_ref = {v}");
    }
    assert!(check_corollary1(&P, 1.0).is_err());
}

#[test]
fn attractor_lmis_fail_without_viscous_damping() {
    let mut p = P;
    p.k_v = 0.0;
    let verdicts = scan_tau0(&p, 1.0, &tau0_grid(1.0, 100)).unwrap();
    assert_eq!(verdicts.len(), 100);
    assert!(verdicts.iter().all(Option::is_none), "a τ₀ grid point was certified with k_v = 0");
    assert!(scan_tau0(&P, 1.0, &tau0_grid(0.5, 5)).unwrap().iter().any(Option::is_some));
}

#[test]
fn tighter_stall_tolerance_never_worsens_basin() {
    use stickslip_core::basin::{maximize_basin_with, BasinOptions};
    let base = BasinOptions::default();
    let tight = BasinOptions {
        stall_rel_tol: 0.5 * base.stall_rel_tol,
        ..base.clone()
    };
    let a = maximize_basin_with(&P, 3.0, &base, &[]).unwrap();
    let b = maximize_basin_with(&P, 3.0, &tight, &[]).unwrap();
    assert!(b.eta <= a.eta * (1.0 + 1e-9), "η {} -> {}", a.eta, b.eta);
}
