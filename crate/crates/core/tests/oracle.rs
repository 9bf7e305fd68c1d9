use emlimit_core::oracle::run_suite;

#[test]
fn every_oracle_check_passes() {
    let checks = run_suite().unwrap();
    assert!(checks.len() > 20);
    for c in &checks {
        assert!(c.passed(), "{}: error {:e} > {:e}", c.name, c.error, c.tolerance);
    }
}
