//! Subcommand implementations. Each returns the paths it wrote or an error with its exit code.

use std::path::PathBuf;

use dimerwave::linear::{self, LinearData};
use dimerwave::model::Material;
use dimerwave::operator::WaveProblem;
use dimerwave::solver::{longwave_alpha_cap, longwave_branch, BranchPoint, Solver};
use dimerwave::spectral::{inner_product, l2_norm, PeriodicField};
use dimerwave::symmetry::{
    check_invariance, check_solution_symmetry, symmetric_basis, AlignedDefect, InvarianceReport, SymmetricBasis,
};
use dimerwave::verify::{self, CriterionResult, VerifyConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, OutputDir};

pub struct Context {
    pub config: RunConfig,
    pub out: OutputDir,
}

type Written = Result<Vec<PathBuf>, CliError>;

/// Amplitude used to probe `S`-invariance of `Φ` and `G_c` along `ν₁`.
const INVARIANCE_PROBE: f64 = 0.1;

#[derive(Serialize)]
struct SymmetryReport {
    basis: SymmetricBasis,
    invariance: InvarianceReport,
    aligned: Option<AlignedDefect>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    results: &'a [CriterionResult],
}

#[derive(Serialize)]
struct ResidualReport {
    phi_residual_l2: f64,
    derivative_orthogonality: f64,
    nu0_orthogonality: f64,
    jc_variation: f64,
    lattice_residual_max: f64,
}

struct Setup {
    problem: WaveProblem,
    data: LinearData,
}

fn setup(cfg: &RunConfig, mat: &Material) -> Result<Setup, CliError> {
    let c = cfg.task.speed()?;
    let n = cfg.numerics.n;
    Ok(Setup { problem: WaveProblem::new(mat, c, n, cfg.numerics.grid)?, data: LinearData::new(mat, c, n)? })
}

fn symmetry_report(ctx: &Context, s: &Setup, point: Option<&BranchPoint>) -> Result<Option<PathBuf>, CliError> {
    let Some(kind) = ctx.config.task.symmetry else { return Ok(None) };
    let basis = symmetric_basis(kind, &s.data)?;
    let (probe, omega) = match point {
        Some(p) => (p.profile(&s.data), p.omega),
        None => (s.data.nu1.scale(INVARIANCE_PROBE), s.data.omega_c),
    };
    let invariance = check_invariance(kind, &s.problem, &probe, omega)?;
    let aligned = point.map(|p| check_solution_symmetry(kind, &s.data, p)).transpose()?;
    let report = SymmetryReport { basis, invariance, aligned };
    Ok(Some(ctx.out.write_json("symmetry.json", &report)?))
}

pub fn dispersion(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let t = &ctx.config.task;
    let k_max = t.k_max.unwrap_or(std::f64::consts::PI);
    if t.k_intervals == 0 {
        return Err(CliError::config("task.k_intervals: must be positive"));
    }
    if !(t.k_min.is_finite() && k_max.is_finite() && k_max >= t.k_min) {
        return Err(CliError::config(format!("task.k_max: need finite k_min <= k_max, got [{}, {k_max}]", t.k_min)));
    }
    let span = k_max - t.k_min;
    let rows = (0..=t.k_intervals)
        .map(|i| {
            let k = t.k_min + span * (i as f64 / t.k_intervals as f64);
            let d = linear::dispersion_checked(&mat, k)?;
            Ok(vec![num(k), num(d.lambda_minus), num(d.lambda_plus), num(d.rho)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let path = ctx.out.write_csv("dispersion.csv", &["K", "lambda_minus", "lambda_plus", "rho"], &rows)?;
    Ok(vec![path])
}

pub fn omegac(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let t = &ctx.config.task;
    let c_star = linear::speed_of_sound(&mat);
    let speeds: Vec<f64> = match &t.c_values {
        Some(v) => v.clone(),
        None => t.c_ratios.iter().map(|r| r * c_star).collect(),
    };
    if speeds.is_empty() {
        return Err(CliError::config("task.c_values: no speeds requested"));
    }
    let field = if t.c_values.is_some() { "task.c_values" } else { "task.c_ratios" };
    let results: Vec<_> = speeds
        .par_iter()
        .map(|&c| linear::critical_frequency(&mat, c).map_err(|e| CliError::from(e).context(field)).map(|w| (c, w)))
        .collect::<Result<_, _>>()?;
    let mut all_in = true;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|&(c, w)| {
            let (lo, hi) = linear::omega_bracket(&mat, c);
            let inside = lo <= w && w <= hi;
            all_in &= inside;
            let residual = c * c * w * w - linear::lambda_plus(&mat, w);
            vec![num(c), num(c.abs() / c_star), num(w), num(lo), num(hi), inside.to_string(), num(residual)]
        })
        .collect();
    let header = ["c", "c_over_c_star", "omega_c", "bracket_lo", "bracket_hi", "in_bracket", "residual"];
    let path = ctx.out.write_csv("omegac.csv", &header, &rows)?;
    if !all_in {
        return Err(CliError::verification("omega_c outside its guaranteed bracket; see omegac.csv"));
    }
    Ok(vec![path])
}

pub fn kernel(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let s = setup(&ctx.config, &mat)?;
    let mut written = vec![ctx.out.write_json("lineardata.json", &s.data)?];
    written.extend(symmetry_report(ctx, &s, None)?);
    Ok(written)
}

pub fn solve(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let a = ctx.config.task.amplitude.ok_or_else(|| CliError::config("task.amplitude: required for solve"))?;
    let s = setup(&ctx.config, &mat)?;
    let solver = Solver::new(&s.problem, &s.data, ctx.config.numerics.clone())?;
    let point = solver.solve_point(a, None)?;
    let mut written = vec![ctx.out.write_json("point.json", &point)?];
    written.extend(symmetry_report(ctx, &s, Some(&point))?);
    Ok(written)
}

fn uniform_up_to(cap: f64, count: usize, field: &str) -> Result<Vec<f64>, CliError> {
    if count == 0 {
        return Err(CliError::config(format!("{field}: must be positive")));
    }
    if !cap.is_finite() {
        return Err(CliError::config("numerics.amplitude_cap: default cap is unbounded; set it explicitly"));
    }
    Ok((1..=count).map(|i| cap * (i as f64 / count as f64)).collect())
}

pub fn branch(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let s = setup(&ctx.config, &mat)?;
    let solver = Solver::new(&s.problem, &s.data, ctx.config.numerics.clone())?;
    let cap = solver.amplitude_cap();
    let amps = match &ctx.config.task.amplitudes {
        Some(v) => {
            if let Some(bad) = v.iter().find(|a| !(a.abs() <= cap)) {
                return Err(CliError::config(format!("task.amplitudes: amplitude above configured cap: |a| = {} > {cap}", bad.abs())));
            }
            v.clone()
        }
        None => uniform_up_to(cap, ctx.config.task.amplitude_count, "task.amplitude_count")?,
    };
    let branch = solver.solve_branch(&amps);
    let written = vec![ctx.out.write_json("branch.json", &branch)?];
    if let Some(f) = &branch.failure {
        return Err(CliError::nonconvergence(format!("branch truncated after {} points: {f}", branch.points.len())));
    }
    Ok(written)
}

pub fn longwave(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let t = &ctx.config.task;
    let numerics = &ctx.config.numerics;
    if t.eps.is_empty() {
        return Err(CliError::config("task.eps: no values given"));
    }
    if let Some(bad) = t.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(CliError::config(format!("task.eps: {bad} outside (0, 1)")));
    }
    let alphas = match &t.alphas {
        Some(v) => v.clone(),
        None => uniform_up_to(longwave_alpha_cap(&mat, &t.eps, numerics)?, t.alpha_count, "task.alpha_count")?,
    };
    let collection = longwave_branch(&mat, &t.eps, &alphas, numerics, t.derivative_order).map_err(|e| {
        let err = CliError::from(e);
        if err.message.starts_with("amplitude above") { err.context("task.alphas") } else { err }
    })?;
    let written = vec![ctx.out.write_json("longwave.json", &collection)?];
    if let Some(b) = collection.branches.iter().find(|b| b.branch.failure.is_some()) {
        let f = b.branch.failure.as_deref().unwrap_or_default();
        return Err(CliError::nonconvergence(format!("long-wave branch at eps = {} truncated: {f}", b.eps)));
    }
    Ok(written)
}

pub fn verify(ctx: &Context) -> Written {
    let t = &ctx.config.task;
    let material = ctx.config.material.build()?;
    let cfg = VerifyConfig {
        material,
        c: t.speed()?,
        n: t.verify_n,
        solver_n: ctx.config.numerics.n,
        seed: t.seed,
        dispersion_samples: t.dispersion_samples,
        amplitude_count: t.amplitude_count,
        speed_ratios: t.c_ratios.clone(),
        eps: t.eps.clone(),
        alpha_count: t.alpha_count,
    };
    if cfg.n == 0 {
        return Err(CliError::config("task.verify_n: must be positive"));
    }
    let results = verify::run_all(&cfg);
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().all(|r| r.passed);
    let path = ctx.out.write_json("verify.json", &VerifyReport { passed, results: &results })?;
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if !passed {
        return Err(CliError::verification(format!("{failed} verification criteria failed; see verify.json")));
    }
    Ok(vec![path])
}

pub fn lattice_check(ctx: &Context) -> Written {
    let mat = ctx.config.material.build()?;
    let t = &ctx.config.task;
    let s = setup(&ctx.config, &mat)?;
    let solver = Solver::new(&s.problem, &s.data, ctx.config.numerics.clone())?;
    let point = solver.solve_point(t.amplitude.unwrap_or(1e-3), None)?;
    let phi: PeriodicField = point.profile(&s.data);
    let residual = s.problem.phi(&phi, point.omega);
    let report = ResidualReport {
        phi_residual_l2: l2_norm(&residual),
        derivative_orthogonality: inner_product(&residual, &phi.derivative(1)).abs(),
        nu0_orthogonality: inner_product(&residual, &s.data.nu0).abs(),
        jc_variation: s.problem.first_integral(&phi, point.omega).variation,
        lattice_residual_max: s.problem.lattice_residual(
            &phi,
            point.omega,
            &verify::lattice_samples(t.seed, t.lattice_samples),
        ),
    };
    Ok(vec![ctx.out.write_json("residuals.json", &report)?])
}
