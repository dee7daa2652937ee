//! Oracle suites with a fixed seed, plus controls that the oracles can fail.

use std::sync::Arc;

use pldg::checks::{self, ddg_primal_pairing, two_element_fixture};
use pldg::ldg::Discretization;
use pldg::oracle::ddg_dual_pairing;
use pldg::quadrature::gauss_triangle;

const SEED: u64 = 20;

fn assert_pass(r: checks::CheckResult) {
    assert!(r.passed, "{}: {}", r.name, r.detail);
}

#[test]
fn quadrature_sweep() {
    assert_pass(checks::quadrature_suite());
}

#[test]
fn corrupted_rule_is_caught() {
    let mut rule = gauss_triangle(5).unwrap();
    rule.weights[0] *= 1.0 + 1e-6;
    assert!(!checks::quadrature_moments(&[rule]).passed);

    let mut rule = gauss_triangle(7).unwrap();
    rule.points[3] = [0.6, 0.6];
    assert!(!checks::quadrature_moments(&[rule]).passed);
}

#[test]
fn bernstein_partition() {
    assert_pass(checks::bernstein_suite(SEED, 200));
}

#[test]
fn a_operator() {
    assert_pass(checks::a_operator_suite(SEED, 1000));
}

#[test]
fn convexity() {
    assert_pass(checks::convexity_suite(SEED, 1000));
}

#[test]
fn weak_gradient_adjoint() {
    assert_pass(checks::ddg_adjoint_suite(SEED, 20, 2, 3));
}

// The dual form must notice a wrong boundary term, or it checks nothing.
#[test]
fn adjoint_detects_wrong_data() {
    let mesh = Arc::new(two_element_fixture(None));
    let disc = Discretization::md_ldg(mesh, 2, 10.0).unwrap();
    let v: Vec<f64> = (0..disc.scalar.ndof()).map(|i| (i as f64 * 0.37).sin()).collect();
    let z: Vec<f64> = (0..disc.vector.ndof()).map(|i| (i as f64 * 0.11).cos()).collect();
    let g = |x: [f64; 2]| x[0] * x[1];
    let h = |x: [f64; 2]| x[0] * x[1] + 1e-3;
    let a = ddg_primal_pairing(&disc, &v, &g, &z);
    assert!((a - ddg_dual_pairing(&disc, &v, &g, &z)).abs() <= 1e-12 * a.abs().max(1.0));
    assert!((a - ddg_dual_pairing(&disc, &v, &h, &z)).abs() > 1e-6);
}

#[test]
fn dense_fixture() {
    assert_pass(checks::dense_fixture_suite(SEED));
}

#[test]
fn preconditioner_contract() {
    assert_pass(checks::precond_suite(SEED, 50));
}

#[test]
fn gradient_matches_differences() {
    assert_pass(checks::gradient_fd_suite(SEED, 30));
}

#[test]
fn neumann_smoke() {
    assert_pass(checks::neumann_smoke_suite());
}
