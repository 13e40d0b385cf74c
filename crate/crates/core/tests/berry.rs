use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use berryline::berry::wrap_phase;
use berryline::*;

fn opts() -> WilsonOptions {
    WilsonOptions::default()
}

#[test]
fn two_level_benchmark_converges_to_closed_form() {
    let model = TwoLevelModel::new(1.0, 1.0).unwrap();
    let lp = ParameterLoop::two_level(model, 1, 100_000).unwrap();
    let res = wilson_loop_phase(&lp, Branch::Plus.level(), &opts()).unwrap();
    let exact = -PI * (1.0 - 1.0 / 2f64.sqrt());
    assert!((res.analytic.unwrap() - exact).abs() <= 1e-15);
    assert!((res.numerical - exact).abs() <= 1e-8);
}

#[test]
fn su3_benchmark_unwrapped() {
    let m = ThreeLevelModel::new(FRAC_PI_3, FRAC_PI_4, 0.0, 0.0).unwrap();
    let lp = ParameterLoop::su3(m, 1, 1, 100_000).unwrap();
    let res = wilson_loop_phase(&lp, 2, &opts()).unwrap();
    assert!((res.unwrapped + 5.0 * PI / 4.0).abs() <= 1e-8);
    // The wrapped value sits on the other side of the branch cut.
    assert!((res.numerical - 3.0 * PI / 4.0).abs() <= 1e-8);
}

#[test]
fn branches_are_antisymmetric() {
    for (rc, r) in [(1.0, 1.0), (0.2, 3.0), (5.0, 0.4)] {
        let lp = ParameterLoop::two_level(TwoLevelModel::new(rc, r).unwrap(), 1, 20_000).unwrap();
        let p = wilson_loop_phase(&lp, 1, &opts()).unwrap().numerical;
        let m = wilson_loop_phase(&lp, 0, &opts()).unwrap().numerical;
        assert!(wrap_phase(p + m).abs() <= 1e-10);
    }
}

#[test]
fn reversing_the_loop_negates_the_phase() {
    let two = ParameterLoop::two_level(TwoLevelModel::new(0.7, 1.3).unwrap(), 1, 8192).unwrap();
    let su3 = ParameterLoop::su3(
        ThreeLevelModel::new(0.5, 0.8, 0.1, 0.3).unwrap(),
        2,
        -1,
        8192,
    )
    .unwrap()
    .with_wobble(0.2, 0.4)
    .unwrap();
    for (lp, level) in [(two, 1), (su3, 2)] {
        let fwd = wilson_loop_phase(&lp, level, &opts()).unwrap().numerical;
        let back = wilson_loop_phase(&lp.reversed(), level, &opts())
            .unwrap()
            .numerical;
        assert!(wrap_phase(fwd + back).abs() <= 1e-10, "{fwd} {back}");
    }
}

#[test]
fn doubling_points_does_not_increase_error() {
    let two = ParameterLoop::two_level(TwoLevelModel::new(1.0, 1.0).unwrap(), 1, 256).unwrap();
    let su3 = ParameterLoop::su3(
        ThreeLevelModel::new(FRAC_PI_3, FRAC_PI_4, 0.0, 0.0).unwrap(),
        1,
        1,
        256,
    )
    .unwrap();
    let loose = WilsonOptions {
        phase_tol: 1.0,
        ..opts()
    };
    for (lp, level) in [(two, 1), (su3, 2)] {
        let mut prev = f64::INFINITY;
        for k in [256, 512, 1024, 2048, 4096] {
            let res = wilson_loop_phase(&lp.with_points(k).unwrap(), level, &loose).unwrap();
            let err = res.discrepancy.unwrap();
            assert!(err <= prev, "K = {k}: {err} > {prev}");
            prev = err;
        }
    }
}

#[test]
fn three_routes_agree_on_fixed_loops() {
    for (theta, phi, n1, n2) in [(0.2, 0.3, 1, 0), (1.1, 2.0, -1, 2), (FRAC_PI_4, 0.0, 0, -1)] {
        let lp = ParameterLoop::su3(
            ThreeLevelModel::new(theta, phi, 0.5, 1.5).unwrap(),
            n1,
            n2,
            100_000,
        )
        .unwrap();
        let a = analytic_su3_phase(&lp).unwrap();
        let q = connection_integral_su3(&lp, 4096).unwrap();
        let w = wilson_loop_phase(&lp, 2, &opts()).unwrap().unwrapped;
        assert!((a - q).abs() <= 1e-8 && (a - w).abs() <= 1e-8 && (q - w).abs() <= 1e-8);
    }
}

#[test]
fn wobbling_loop_matches_connection_quadrature() {
    let lp = ParameterLoop::su3(
        ThreeLevelModel::new(0.7, 0.5, 0.0, 0.0).unwrap(),
        1,
        1,
        100_000,
    )
    .unwrap()
    .with_wobble(0.3, 0.6)
    .unwrap();
    assert_eq!(analytic_su3_phase(&lp), Err(Error::UnsupportedLoop));
    let q = connection_integral_su3(&lp, 4096).unwrap();
    let w = wilson_loop_phase(&lp, 2, &opts()).unwrap();
    assert!(w.analytic.is_none());
    assert!((q - w.unwrapped).abs() <= 1e-8, "{q} {}", w.unwrapped);
}

#[test]
fn wobble_must_keep_theta_in_range() {
    let base =
        ParameterLoop::su3(ThreeLevelModel::new(0.1, 0.0, 0.0, 0.0).unwrap(), 1, 0, 64).unwrap();
    assert!(base.with_wobble(0.2, 0.0).is_err());
}

#[test]
fn windings_scale_two_level_phase() {
    let model = TwoLevelModel::new(2.0, 0.5).unwrap();
    let one = wilson_loop_phase(
        &ParameterLoop::two_level(model, 1, 8192).unwrap(),
        1,
        &opts(),
    )
    .unwrap();
    let two = wilson_loop_phase(
        &ParameterLoop::two_level(model, 2, 16384).unwrap(),
        1,
        &opts(),
    )
    .unwrap();
    assert!((two.unwrapped - 2.0 * one.unwrapped).abs() <= 1e-8);
    assert!(two.discrepancy.unwrap() <= 1e-6);
}
