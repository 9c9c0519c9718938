use sag_core::arrival::FutureEstimate;
use sag_core::equilibrium::{solve_online_sse, solve_ossp};
use sag_core::fixtures;
use sag_core::oracle::{
    grid_best_scheme, grid_best_sse, grid_tolerance, ossp_lipschitz, sse_lipschitz, GridMode,
};
use sag_core::AlertTypeId;

fn fixture() -> (sag_core::PayoffStructure, FutureEstimate) {
    let p = fixtures::two_type_payoffs(fixtures::DEFAULT_QUIT_PROB, fixtures::DEFAULT_QUIT_LOSS);
    let est = FutureEstimate::from_kappas(&[3.0, 3.0], &[0.5, 0.5]);
    (p, est)
}

#[test]
fn plain_equilibrium_matches_coverage_grid() {
    let (p, est) = fixture();
    let lp = solve_online_sse(&p, &est, 1.0).unwrap();
    let grid = grid_best_sse(&p, &est, 1.0, 0.01).unwrap();
    assert!((lp.auditor_utility - grid.auditor_utility).abs() < 1e-3);
    assert!(
        (lp.auditor_utility - grid.auditor_utility).abs()
            <= grid_tolerance(sse_lipschitz(&p), 0.01, p.len())
    );
    assert_eq!(grid.best_type, lp.best_type);
}

#[test]
fn signaling_policy_matches_scheme_grid() {
    let (p, est) = fixture();
    let lp = solve_ossp(&p, &est, 1.0).unwrap();
    let grid = grid_best_scheme(&p, &est, 1.0, 0.01, GridMode::Shortcut).unwrap();
    assert!(
        (lp.auditor_utility - grid.auditor_utility).abs() < 1e-3,
        "lp {} grid {}",
        lp.auditor_utility,
        grid.auditor_utility
    );
    assert!(
        (lp.auditor_utility - grid.auditor_utility).abs()
            <= grid_tolerance(ossp_lipschitz(&p, &est), 0.01, 4 * p.len())
    );
    assert_eq!(grid.best_type, AlertTypeId(1));
}

#[test]
fn shortcut_grid_loses_nothing_against_full_grid() {
    let (p, est) = fixture();
    let short = grid_best_scheme(&p, &est, 1.0, 0.05, GridMode::Shortcut).unwrap();
    let full = grid_best_scheme(&p, &est, 1.0, 0.05, GridMode::Exhaustive).unwrap();
    assert!((short.auditor_utility - full.auditor_utility).abs() < 1e-9);
}

#[test]
fn grid_never_beats_lp_on_random_small_games() {
    for i in 0..20 {
        let inst = sag_core::oracle::random_instance(77, i);
        if inst.payoffs.len() > 2 {
            continue;
        }
        let p = inst.payoff_structure().unwrap();
        let est = inst.estimates().unwrap();
        let lp = solve_ossp(&p, &est, inst.budget).unwrap();
        let grid = grid_best_scheme(&p, &est, inst.budget, 0.02, GridMode::Shortcut).unwrap();
        assert!(grid.auditor_utility <= lp.auditor_utility + 1e-6, "instance {i}");
        let bound = grid_tolerance(ossp_lipschitz(&p, &est), 0.02, 4 * p.len());
        assert!(lp.auditor_utility - grid.auditor_utility <= bound, "instance {i}");
    }
}
