use sag_core::arrival::FutureEstimate;
use sag_core::equilibrium::{no_silent_audit_condition, solve_online_sse, solve_ossp, warn_cost_weights};
use sag_core::fixtures;
use sag_core::oracle::{verify_theorems, Property};
use sag_core::{AlertTypeId, PayoffStructure, TypePayoff, EPSILON};

#[test]
fn random_suite_has_no_violations() {
    let report = verify_theorems(1000, 2024);
    for v in report.violations.iter().take(10) {
        eprintln!("{:?} #{}: {}\n  {:?}", v.property, v.index, v.detail, v.instance);
    }
    assert!(report.is_clean(), "{} violations", report.violations.len());
    assert!(report.max_coverage_gap <= 1e-6);
    assert_eq!(report.instances, 1000);
    for t in &report.tallies {
        assert!(t.checked > 0, "{:?} never exercised", t.property);
    }
    assert!(report.tally(Property::CoverageEquality).checked + report.skipped == 1000);
}

#[test]
fn costly_warnings_are_never_sent() {
    // A miss costs less than the usability loss of a warning.
    let t = TypePayoff {
        u_dc: 5.0,
        u_du: -2.0,
        u_ac: -4.0,
        u_au: 3.0,
        audit_cost: 1.0,
        quit_prob: 0.9,
        quit_loss: -5.0,
    };
    let p = PayoffStructure::new(vec![t, TypePayoff { u_du: -3.0, ..t }]).unwrap();
    let est = FutureEstimate::from_lambdas(&[4.0, 4.0], &p);
    let w = warn_cost_weights(&p, &est);
    let s = solve_ossp(&p, &est, 1.0).unwrap();
    assert!(p[s.best_type].u_du > w[s.best_type.0]);
    for e in s.scheme.as_ref().unwrap().entries() {
        assert!(e.p1 <= EPSILON && e.q1 <= EPSILON);
    }
    let sse = solve_online_sse(&p, &est, 1.0).unwrap();
    assert!((s.auditor_utility - sse.auditor_utility).abs() <= 1e-6);
}

#[test]
fn free_warnings_leave_silent_alerts_unaudited() {
    let mut t = fixtures::reference_payoffs().types()[0];
    t.quit_prob = 0.0;
    let p = PayoffStructure::new(vec![t]).unwrap();
    let est = FutureEstimate::from_lambdas(&[30.0], &p);
    assert!(no_silent_audit_condition(&t, 0.0).unwrap());
    let s = solve_ossp(&p, &est, 2.0).unwrap();
    assert_eq!(s.best_type, AlertTypeId(0));
    assert!(s.attacker_utility > 0.0);
    assert!(s.scheme.unwrap().entries()[0].p0 <= EPSILON);
}
