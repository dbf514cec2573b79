//! Worked examples with independent oracles.

use std::f64::consts::FRAC_PI_2;

use dimerwave::linear::{self, LinearData};
use dimerwave::model::Material;
use dimerwave::operator::WaveProblem;
use dimerwave::solver::{Solver, SolverConfig, SolverError};
use dimerwave::spectral::{l2_norm, Grid, PeriodicField};
use dimerwave::verify::lattice_samples;
use num_complex::Complex64;

fn reference() -> Material {
    Material::new(1.0, 2.0, 1.0)
}

fn reference_setup(n: usize) -> (WaveProblem, LinearData) {
    let c = 2f64.sqrt();
    (WaveProblem::new(&reference(), c, n, None).unwrap(), LinearData::new(&reference(), c, n).unwrap())
}

/// Root of `2K² = 3 + √(1 + 8cos²K)` by plain bisection on `[1, 2]`.
fn bisection_oracle() -> f64 {
    let f = |k: f64| 2.0 * k * k - 3.0 - (1.0 + 8.0 * k.cos().powi(2)).sqrt();
    let (mut lo, mut hi) = (1.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn dispersion_at_quarter_period() {
    let d = linear::dispersion(&reference(), FRAC_PI_2);
    assert_eq!(d.lambda_plus, 4.0);
    assert_eq!(d.lambda_minus, 2.0);
}

#[test]
fn critical_frequency_matches_bisection_oracle() {
    let omega = linear::critical_frequency(&reference(), 2f64.sqrt()).unwrap();
    assert!((omega - bisection_oracle()).abs() < 1e-12, "{omega}");
    let (lo, hi) = linear::omega_bracket(&reference(), 2f64.sqrt());
    assert!(lo < omega && omega < hi);
}

#[test]
fn subsonic_speed_is_rejected() {
    let c_star = linear::speed_of_sound(&reference());
    assert!(linear::critical_frequency(&reference(), 0.99 * c_star).is_err());
}

#[test]
fn coercive_solve_matches_dense_inverse_per_mode() {
    let (_, data) = reference_setup(8);
    let zero = data.coercive_solve(&PeriodicField::zeros(8)).unwrap();
    assert_eq!(l2_norm(&zero.psi), 0.0);
    let eta = PeriodicField::single_mode(8, 2, [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)]);
    let psi = data.coercive_solve(&eta).unwrap().psi;
    let sym = linear::symbol_l(&reference(), data.c, 2.0 * data.omega_c);
    let [[a, b], [c, d]] = sym.0;
    let det = a * d - b * c;
    let expected = [d * 0.5 / det, -c * 0.5 / det];
    let got = psi.mode(2);
    assert!((got[0] - expected[0]).norm() < 1e-14 && (got[1] - expected[1]).norm() < 1e-14);
    for k in [0, 1, 3, 8] {
        assert!(psi.mode(k).iter().all(|z| z.norm() < 1e-15));
    }
}

#[test]
fn pointwise_square_of_sine() {
    let mut f = PeriodicField::zeros(4);
    f.set_mode(1, [Complex64::new(0.0, -0.5), Complex64::new(0.5, 0.0)]);
    let grid = Grid::new(Grid::required_size(4, 2));
    let sq = grid.apply_pointwise(&f, 2, |_, x| x * x).unwrap();
    // sin² = (1 − cos 2x)/2, cos² = (1 + cos 2x)/2.
    let m0 = sq.mode(0);
    let m2 = sq.mode(2);
    assert!((m0[0].re - 0.5).abs() < 1e-15 && (m0[1].re - 0.5).abs() < 1e-15);
    assert!((m2[0].re + 0.25).abs() < 1e-15 && (m2[1].re - 0.25).abs() < 1e-15);
    assert!(sq.mode(1).iter().chain(sq.mode(3).iter()).all(|z| z.norm() < 1e-15));
}

#[test]
fn zero_state_is_trivial_everywhere() {
    let (problem, _) = reference_setup(8);
    let zero = PeriodicField::zeros(8);
    for omega in [0.3, 1.0, 2.5] {
        assert_eq!(l2_norm(&problem.phi(&zero, omega)), 0.0);
        assert_eq!(problem.energy(&zero, omega).total, 0.0);
        assert!(problem.first_integral(&zero, omega).values.iter().all(|v| *v == 0.0));
        assert_eq!(problem.lattice_residual(&zero, omega, &lattice_samples(1, 10)), 0.0);
    }
}

#[test]
fn remainder_has_linear_limit_at_zero_amplitude() {
    let (problem, data) = reference_setup(16);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 16, ..Default::default() }).unwrap();
    let psi = data.project_off_kernel(&PeriodicField::random(&mut rand_chacha_rng(4), 16, 6, 0.1));
    let limit = solver.remainder(&psi, 1e-3, 0.0).unwrap();
    let gap = |a: f64| l2_norm(&(&solver.remainder(&psi, 1e-3, a).unwrap() - &limit));
    let (g4, g6) = (gap(1e-4), gap(1e-6));
    assert!(g4 < 1e-2 && g6 < 1e-4);
    let ratio = g4 / g6;
    assert!((50.0..200.0).contains(&ratio), "ratio {ratio}");
}

fn rand_chacha_rng(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn lattice_residual_on_solved_point() {
    let (problem, data) = reference_setup(32);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 32, ..Default::default() }).unwrap();
    let p = solver.solve_point(1e-3, None).unwrap();
    let res = problem.lattice_residual(&p.profile(&data), p.omega, &lattice_samples(7, 100));
    assert!(res < 1e-8, "{res}");
}

#[test]
fn lattice_residual_tracks_operator_residual() {
    let (problem, data) = reference_setup(32);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 32, ..Default::default() }).unwrap();
    let a = 1e-2;
    let samples = lattice_samples(3, 100);
    let (mut psi, mut s) = (PeriodicField::zeros(32), 0.0);
    let mut ratios = Vec::new();
    for _ in 0..3 {
        let (p, x) = solver.fixed_point_step(&psi, s, a).unwrap();
        psi = p;
        s = x;
        let phi = (&data.nu1 + &psi).scale(a);
        let omega = data.omega_c + s;
        let op = l2_norm(&problem.phi(&phi, omega));
        ratios.push(problem.lattice_residual(&phi, omega, &samples) / op);
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    assert!(hi / lo < 10.0, "{ratios:?}");
}

#[test]
fn newton_cross_check_small_amplitude() {
    let (problem, data) = reference_setup(32);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 32, ..Default::default() }).unwrap();
    let p = solver.solve_point(1e-3, None).unwrap();
    let newton = solver.newton_oracle(1e-3).unwrap();
    assert!(l2_norm(&(&newton.phi - &p.profile(&data))) < 1e-10);
    assert!((newton.omega - p.omega).abs() < 1e-10);
}

#[test]
fn amplitude_above_cap_is_a_config_error() {
    let (problem, data) = reference_setup(16);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 16, ..Default::default() }).unwrap();
    let err = solver.solve_point(2.0 * solver.amplitude_cap(), None).unwrap_err();
    assert!(matches!(err, SolverError::AboveCap { .. }));
    assert!(!err.is_convergence_failure());
    assert!(err.to_string().contains("amplitude above configured cap"));
}

#[test]
fn trivial_amplitude_gives_exact_zero() {
    let (problem, data) = reference_setup(16);
    let solver = Solver::new(&problem, &data, SolverConfig { n: 16, ..Default::default() }).unwrap();
    let p = solver.solve_point(0.0, None).unwrap();
    assert_eq!(l2_norm(&p.psi), 0.0);
    assert_eq!(p.omega, data.omega_c);
}

#[test]
fn mass_dimer_kernel_is_a_cosine() {
    let mat = Material::new(0.5, 1.0, 1.0);
    let data = LinearData::new(&mat, 2f64.sqrt(), 4).unwrap();
    let m = data.nu1.mode(1);
    assert!(m[0].im.abs() < 1e-15 && m[1].im.abs() < 1e-15);
    let x = 0.7;
    let v = data.nu1.eval_at(x);
    assert!((v[0] - 2.0 * m[0].re * x.cos()).abs() < 1e-15);
    assert!((v[1] - 2.0 * m[1].re * x.cos()).abs() < 1e-15);
}

#[test]
fn invalid_material_names_condition() {
    let report = Material::new(2.0, 0.5, 1.0).validate().unwrap_err();
    assert!(report.violations.iter().any(|v| v.condition.contains("w>1 or kappa>1")));
    assert!(Material::new(1.0, 2.0, 1.0).validate().is_ok());
}
