//! Acceptance sweep: one test per criterion, each printing its verdict line.
//!
//! The criteria and their tolerances live in `shearfront_core::verify` so the
//! command-line `verify all` and this target agree exactly.

use shearfront_core::verify;

fn check(id: usize) {
    let report = verify::criterion(id).expect("criterion id in range");
    println!("{}", report.line());
    assert!(report.pass, "{}", report.line());
}

#[test]
fn criterion_01_period_map_limit() {
    check(1);
}

#[test]
fn criterion_02_period_map_monotonicity() {
    check(2);
}

#[test]
fn criterion_03_conjugate_shooting_oracle() {
    check(3);
}

#[test]
fn criterion_04_flow_force_structure() {
    check(4);
}

#[test]
fn criterion_05_spectral_asymptotics() {
    check(5);
}

#[test]
fn criterion_06_kernel_certificate() {
    check(6);
}

#[test]
fn criterion_07_small_amplitude_front() {
    check(7);
}

#[test]
fn criterion_08_flow_force_constancy() {
    check(8);
}

#[test]
fn criterion_09_branch_nodal_pattern() {
    check(9);
}

#[test]
fn criterion_10_gradient_bound_and_growth() {
    check(10);
}

#[test]
fn criterion_11_grid_convergence() {
    check(11);
}
