//! Acceptance gate: one test per criterion on the reference dimer
//! (`κ = 2`, `w = 1`, `β = 1`, `c² = 2`, `N = 32`, solver checks at `N = 64`).

use std::sync::OnceLock;

use dimerwave::verify::{self, CriterionResult, ReferenceBranch, VerifyConfig};

fn config() -> &'static VerifyConfig {
    static CONFIG: OnceLock<VerifyConfig> = OnceLock::new();
    CONFIG.get_or_init(VerifyConfig::default)
}

fn reference() -> &'static ReferenceBranch {
    static BRANCH: OnceLock<ReferenceBranch> = OnceLock::new();
    BRANCH.get_or_init(|| verify::reference_branch(config()).expect("reference branch setup"))
}

fn gate(r: CriterionResult) {
    println!("{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_01_dispersion_oracle_equivalence() {
    gate(verify::dispersion_equivalence(config()));
}

#[test]
fn criterion_02_critical_frequency() {
    gate(verify::critical_frequency_checks(config()));
}

#[test]
fn criterion_03_kernel_and_adjoint_kernel() {
    gate(verify::kernel_and_adjoint(config()));
}

#[test]
fn criterion_04_transversality_cross_check() {
    gate(verify::transversality_cross_check(config()));
}

#[test]
fn criterion_05_gradient_structure() {
    gate(verify::gradient_structure(config()));
}

#[test]
fn criterion_06_first_integral() {
    gate(verify::first_integral(config(), reference()));
}

#[test]
fn criterion_07_branch_solve() {
    let r = verify::branch_solve(config(), reference());
    assert_eq!(reference().data.truncation(), 64);
    assert_eq!(reference().fixed_point.points.len(), 20);
    gate(r);
}

#[test]
fn criterion_08_lyapunov_center_consistency() {
    gate(verify::lyapunov_center_consistency(config(), reference()));
}

#[test]
fn criterion_09_independent_newton_oracle() {
    gate(verify::newton_oracle(config(), reference()));
}

#[test]
fn criterion_10_physical_validation() {
    gate(verify::physical_validation(config(), reference()));
}

#[test]
fn criterion_11_coercivity_uniformity() {
    gate(verify::coercivity_uniformity(config()));
}

#[test]
fn criterion_12_symmetry() {
    gate(verify::symmetry(config()));
}

#[test]
fn criterion_13_long_wave() {
    gate(verify::long_wave(config()));
}

#[test]
fn full_suite_summary() {
    let results = verify::run_all(config());
    for r in &results {
        println!("{r}");
    }
    assert_eq!(results.len(), 13);
    assert!(results.iter().all(|r| r.passed));
}
