//! Construction of the bifurcating branch `a ↦ (φ_a, ω_a)`.
//!
//! Solutions are sought as `φ = a(ν₁ + ψ)`, `ω = ω_c + s` with
//! `ψ ⊥ {ν₀, ν₁, ν₂}`. Writing `Φ(φ, ω)/a = Lψ + sL′ν₁ − R(ψ, s, a)` the
//! equation becomes the fixed-point system
//!
//! ```text
//! ψ = L⁻¹(I − Π)[R − (PR)L′ν₁],    s = PR,    P η = ⟨η, ν₁⟩/⟨L′ν₁, ν₁⟩.
//! ```
//!
//! The `ν₂` component of the equation is never imposed; it holds because
//! `⟨Φ(φ, ω), φ′⟩ = 0` for every `φ`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::{LinearData, LinearError};
use crate::model::Material;
use crate::operator::{OperatorError, WaveProblem};
use crate::spectral::{inner_product, l2_norm, sobolev_norm, Grid, PeriodicField, SpectralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    #[default]
    FixedPoint,
    LyapunovCenter,
}

/// Iteration contract for one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub n: usize,
    pub grid: Option<usize>,
    /// Bound on `‖Δψ‖_{H²} + |Δs|` between iterates.
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    /// Bound on `‖Φ(φ, ω)‖_{L²}` accepted at convergence.
    pub acceptance_tol: f64,
    /// Overrides the default amplitude cap.
    pub amplitude_cap: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SolverMode::FixedPoint,
            n: 64,
            grid: None,
            tol: 1e-12,
            max_iter: 200,
            relaxation: 1.0,
            acceptance_tol: 1e-10,
            amplitude_cap: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |field: &str, detail: String| Err(SolverError::Config { field: field.into(), detail });
        if self.n == 0 {
            return bad("n", "truncation must be positive".into());
        }
        if !(self.tol > 0.0) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if !(self.acceptance_tol > 0.0) {
            return bad("acceptance_tol", format!("must be positive, got {}", self.acceptance_tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter", "must be positive".into());
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return bad("relaxation", format!("must lie in (0, 1], got {}", self.relaxation));
        }
        if let Some(cap) = self.amplitude_cap {
            if !(cap > 0.0) {
                return bad("amplitude_cap", format!("must be positive, got {cap}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver config field `{field}`: {detail}")]
    Config { field: String, detail: String },
    #[error("amplitude above configured cap: |a| = {a} > {cap}")]
    AboveCap { a: f64, cap: f64 },
    #[error("no convergence at a = {a} after {iterations} iterations (last increment {last})")]
    NotConverged { a: f64, iterations: usize, last: f64, history: Vec<f64> },
    #[error("converged iterate at a = {a} fails acceptance: {what} = {value}")]
    Rejected { a: f64, what: String, value: f64 },
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

impl SolverError {
    /// True for failures of the iteration itself rather than of its inputs.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, SolverError::NotConverged { .. } | SolverError::Rejected { .. })
    }
}

/// One solved wave `φ = a(ν₁ + ψ)`, `ω = ω_c + a·ξ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchPoint {
    pub a: f64,
    pub omega: f64,
    pub xi: f64,
    pub freq_offset: f64,
    pub psi: PeriodicField,
    pub gamma: Option<f64>,
    pub residual_l2: f64,
    pub psi_h2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub cap_binding: bool,
    pub increments: Vec<f64>,
}

impl BranchPoint {
    pub fn profile(&self, data: &LinearData) -> PeriodicField {
        (&data.nu1 + &self.psi).scale(self.a)
    }
}

/// Solved points in increasing amplitude with Lipschitz diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub linear: LinearData,
    pub amplitude_cap: f64,
    pub points: Vec<BranchPoint>,
    pub truncated: bool,
    pub failure: Option<String>,
    pub sup_psi_h2: f64,
    pub sup_abs_xi: f64,
    pub psi_lipschitz: f64,
    pub xi_lipschitz: f64,
    pub freq_offset_lipschitz: f64,
}

/// Result of the constrained Newton oracle.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub phi: PeriodicField,
    pub omega: f64,
    pub iterations: usize,
    pub residual_l2: f64,
}

/// `Π_c η = ⟨η,ν₁⟩ν₁ + ⟨η,ν₂⟩ν₂`.
pub fn project_kernel(data: &LinearData, eta: &PeriodicField) -> PeriodicField {
    data.nu1
        .scale(inner_product(eta, &data.nu1))
        .axpy(inner_product(eta, &data.nu2), &data.nu2)
}

/// Quadratic part `Q` of `Φ(hν₁, ω_c) = hLν₁ + h²Q + O(h³)`, exact for forces of degree ≤ 3.
pub fn quadratic_term(problem: &WaveProblem, data: &LinearData) -> PeriodicField {
    let h = 1e-2;
    let plus = problem.phi(&data.nu1.scale(h), data.omega_c);
    let minus = problem.phi(&data.nu1.scale(-h), data.omega_c);
    (&plus + &minus).scale(0.5 / (h * h))
}

/// `10⁻²·|⟨L′ν₁,ν₁⟩|/‖Q‖`.
pub fn default_amplitude_cap(problem: &WaveProblem, data: &LinearData) -> f64 {
    let q = l2_norm(&quadratic_term(problem, data));
    if q == 0.0 {
        f64::INFINITY
    } else {
        1e-2 * data.transversality.abs() / q
    }
}

/// Fixed-point and Lyapunov-center iterations for one speed.
pub struct Solver<'a> {
    pub problem: &'a WaveProblem,
    pub data: &'a LinearData,
    pub config: SolverConfig,
    lprime_nu1: PeriodicField,
    cap: f64,
}

struct Iterate {
    psi: PeriodicField,
    s: f64,
    gamma: f64,
}

impl<'a> Solver<'a> {
    pub fn new(problem: &'a WaveProblem, data: &'a LinearData, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let lprime_nu1 = data.apply_l_prime(&data.nu1)?;
        let cap = config.amplitude_cap.unwrap_or_else(|| default_amplitude_cap(problem, data));
        Ok(Self { problem, data, config, lprime_nu1, cap })
    }

    pub fn amplitude_cap(&self) -> f64 {
        self.cap
    }

    fn p(&self, eta: &PeriodicField) -> f64 {
        inner_product(eta, &self.data.nu1) / self.data.transversality
    }

    /// `R(ψ, s, a) = Lψ + sL′ν₁ − a⁻¹Φ(a(ν₁+ψ), ω_c+s)`; the `a → 0` limit at `a = 0`.
    pub fn remainder(&self, psi: &PeriodicField, s: f64, a: f64) -> Result<PeriodicField, SolverError> {
        let data = self.data;
        let base = data.apply_l(psi)?.axpy(s, &self.lprime_nu1);
        let dir = &data.nu1 + psi;
        let scaled = if a == 0.0 {
            self.problem.linearization(&dir, data.omega_c + s)?
        } else {
            self.problem.phi(&dir.scale(a), data.omega_c + s).scale(1.0 / a)
        };
        Ok(&base - &scaled)
    }

    /// One step `(ψ, s) ↦ (ψ⁺, s⁺)` of the fixed-point map.
    pub fn fixed_point_step(&self, psi: &PeriodicField, s: f64, a: f64) -> Result<(PeriodicField, f64), SolverError> {
        let r = self.remainder(psi, s, a)?;
        let rhs = r.axpy(-self.p(&r), &self.lprime_nu1);
        let next = self.data.coercive_solve(&self.data.project_off_kernel(&rhs))?.psi;
        let s_next = self.p(&self.remainder(&next, s, a)?);
        Ok((next, s_next))
    }

    /// One step `(ψ, s, γ) ↦ (ψ⁺, s⁺, γ⁺)` for `Φ + γφ′ = 0`.
    pub fn lyapunov_center_step(
        &self,
        psi: &PeriodicField,
        s: f64,
        a: f64,
    ) -> Result<(PeriodicField, f64, f64), SolverError> {
        let r = self.remainder(psi, s, a)?;
        let s_next = self.p(&r);
        let gamma = -inner_product(&r, &self.data.nu2);
        let rhs = r.axpy(-s_next, &self.lprime_nu1).axpy(-gamma, &psi.derivative(1));
        let next = self.data.coercive_solve(&self.data.project_off_kernel(&rhs))?.psi;
        Ok((next, s_next, gamma))
    }

    fn step(&self, it: &Iterate, a: f64) -> Result<Iterate, SolverError> {
        Ok(match self.config.mode {
            SolverMode::FixedPoint => {
                let (psi, s) = self.fixed_point_step(&it.psi, it.s, a)?;
                Iterate { psi, s, gamma: 0.0 }
            }
            SolverMode::LyapunovCenter => {
                let (psi, s, gamma) = self.lyapunov_center_step(&it.psi, it.s, a)?;
                Iterate { psi, s, gamma }
            }
        })
    }

    /// Solves at amplitude `a`, optionally warm-started from a neighbor.
    pub fn solve_point(&self, a: f64, warm: Option<&BranchPoint>) -> Result<BranchPoint, SolverError> {
        if !a.is_finite() || a.abs() > self.cap * (1.0 + 1e-12) {
            return Err(SolverError::AboveCap { a: a.abs(), cap: self.cap });
        }
        let n = self.data.truncation();
        if a == 0.0 {
            let trivial = Iterate { psi: PeriodicField::zeros(n), s: 0.0, gamma: 0.0 };
            return self.finish(a, trivial, Vec::new());
        }
        let mut it = match warm {
            Some(p) => Iterate { psi: p.psi.resized(n), s: p.freq_offset, gamma: p.gamma.unwrap_or(0.0) },
            None => Iterate { psi: PeriodicField::zeros(n), s: 0.0, gamma: 0.0 },
        };
        let theta = self.config.relaxation;
        let mut increments = Vec::new();
        let mut converged = false;
        for _ in 0..self.config.max_iter {
            let next = self.step(&it, a)?;
            let relaxed = Iterate {
                psi: it.psi.scale(1.0 - theta).axpy(theta, &next.psi),
                s: (1.0 - theta) * it.s + theta * next.s,
                gamma: (1.0 - theta) * it.gamma + theta * next.gamma,
            };
            let inc = sobolev_norm(&(&relaxed.psi - &it.psi), 2.0) + (relaxed.s - it.s).abs();
            increments.push(inc);
            it = relaxed;
            if !inc.is_finite() {
                break;
            }
            if inc < self.config.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(SolverError::NotConverged {
                a,
                iterations: increments.len(),
                last: increments.last().copied().unwrap_or(f64::NAN),
                history: increments,
            });
        }
        self.finish(a, it, increments)
    }

    fn finish(&self, a: f64, it: Iterate, increments: Vec<f64>) -> Result<BranchPoint, SolverError> {
        let data = self.data;
        let omega = data.omega_c + it.s;
        let phi = (&data.nu1 + &it.psi).scale(a);
        let residual_l2 = l2_norm(&self.problem.phi(&phi, omega));
        let reject = |what: &str, value: f64| Err(SolverError::Rejected { a, what: what.into(), value });
        if residual_l2 >= self.config.acceptance_tol {
            return reject("phi_residual_l2", residual_l2);
        }
        for (i, nu) in [&data.nu0, &data.nu1, &data.nu2].into_iter().enumerate() {
            let v = inner_product(&it.psi, nu);
            if v.abs() >= 1e-10 {
                return reject(&format!("<psi, nu{i}>"), v);
            }
        }
        let gamma = match self.config.mode {
            SolverMode::FixedPoint => None,
            SolverMode::LyapunovCenter => {
                if it.gamma.abs() >= 1e-10 {
                    return reject("gamma", it.gamma);
                }
                Some(it.gamma)
            }
        };
        Ok(BranchPoint {
            a,
            omega,
            xi: if a == 0.0 { 0.0 } else { it.s / a },
            freq_offset: it.s,
            psi_h2: sobolev_norm(&it.psi, 2.0),
            psi: it.psi,
            gamma,
            residual_l2,
            iterations: increments.len(),
            converged: true,
            cap_binding: a.abs() >= self.cap * (1.0 - 1e-12),
            increments,
        })
    }

    /// Solves over `amplitudes` in increasing order with warm starts.
    pub fn solve_branch(&self, amplitudes: &[f64]) -> Branch {
        let mut sorted = amplitudes.to_vec();
        sorted.sort_by(|x, y| x.total_cmp(y));
        sorted.dedup();
        let mut points: Vec<BranchPoint> = Vec::with_capacity(sorted.len());
        let mut failure = None;
        for &a in &sorted {
            let attempt = self.solve_point(a, points.last());
            let result = match attempt {
                Err(e) if e.is_convergence_failure() && !points.is_empty() => self.solve_point(a, None),
                other => other,
            };
            match result {
                Ok(p) => points.push(p),
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let mut psi_lip: f64 = 0.0;
        let mut xi_lip: f64 = 0.0;
        let mut s_lip: f64 = 0.0;
        for pair in points.windows(2) {
            let da = (pair[1].a - pair[0].a).abs();
            psi_lip = psi_lip.max(sobolev_norm(&(&pair[1].psi - &pair[0].psi), 2.0) / da);
            xi_lip = xi_lip.max((pair[1].xi - pair[0].xi).abs() / da);
            s_lip = s_lip.max((pair[1].freq_offset - pair[0].freq_offset).abs() / da);
        }
        Branch {
            linear: self.data.clone(),
            amplitude_cap: self.cap,
            sup_psi_h2: points.iter().map(|p| p.psi_h2).fold(0.0, f64::max),
            sup_abs_xi: points.iter().map(|p| p.xi.abs()).fold(0.0, f64::max),
            truncated: failure.is_some(),
            failure,
            points,
            psi_lipschitz: psi_lip,
            xi_lipschitz: xi_lip,
            freq_offset_lipschitz: s_lip,
        }
    }

    /// Gauss–Newton on `Φ(φ, ω) = 0` with `⟨φ,ν₀⟩ = 0`, `⟨φ,ν₁⟩ = a`, `⟨φ,ν₂⟩ = 0`,
    /// started from `(aν₁, ω_c)`; independent of the fixed-point map.
    pub fn newton_oracle(&self, a: f64) -> Result<NewtonSolution, SolverError> {
        let data = self.data;
        let n = data.truncation();
        let dim = 4 * n + 2;
        let mut phi = data.nu1.scale(a);
        let mut omega = data.omega_c;
        let constraints = [(&data.nu0, 0.0), (&data.nu1, a), (&data.nu2, 0.0)];
        let residual_vec = |phi: &PeriodicField, omega: f64| {
            let mut v = field_to_vec(&self.problem.phi(phi, omega));
            for (nu, target) in constraints {
                v.push(inner_product(phi, nu) - target);
            }
            DVector::from_vec(v)
        };
        let basis: Vec<PeriodicField> = (0..dim).map(|j| unit_field(n, j)).collect();
        let mut history = Vec::new();
        for iteration in 1..=30 {
            let f = residual_vec(&phi, omega);
            let fnorm = f.norm();
            history.push(fnorm);
            if fnorm < 1e-15 * (1.0 + a.abs()) {
                return Ok(self.newton_result(phi, omega, iteration - 1));
            }
            let mut jac = DMatrix::<f64>::zeros(dim + 3, dim + 1);
            for (j, e) in basis.iter().enumerate() {
                let mut col = field_to_vec(&self.problem.jacobian_apply(&phi, omega, e));
                for (nu, _) in constraints {
                    col.push(inner_product(e, nu));
                }
                jac.set_column(j, &DVector::from_vec(col));
            }
            let mut wcol = field_to_vec(&self.problem.omega_derivative(&phi, omega));
            wcol.extend([0.0; 3]);
            jac.set_column(dim, &DVector::from_vec(wcol));
            let step = jac
                .svd(true, true)
                .solve(&(-f), 1e-13)
                .map_err(|e| SolverError::Rejected { a, what: format!("newton least squares: {e}"), value: fnorm })?;
            phi = phi.axpy(1.0, &vec_to_field(n, step.rows(0, dim).as_slice()));
            omega += step[dim];
            if step.norm() < 1e-15 * (1.0 + a.abs()) {
                return Ok(self.newton_result(phi, omega, iteration));
            }
        }
        let last = *history.last().unwrap_or(&f64::NAN);
        Err(SolverError::NotConverged { a, iterations: history.len(), last, history })
    }

    fn newton_result(&self, phi: PeriodicField, omega: f64, iterations: usize) -> NewtonSolution {
        let residual_l2 = l2_norm(&self.problem.phi(&phi, omega));
        NewtonSolution { phi, omega, iterations, residual_l2 }
    }
}

/// Real coordinates: mode 0 as `(re₁, re₂)`, then `(re₁, im₁, re₂, im₂)` per mode.
pub fn field_to_vec(f: &PeriodicField) -> Vec<f64> {
    let mut v = Vec::with_capacity(4 * f.truncation() + 2);
    for (k, c) in f.coeffs().iter().enumerate() {
        if k == 0 {
            v.extend([c[0].re, c[1].re]);
        } else {
            v.extend([c[0].re, c[0].im, c[1].re, c[1].im]);
        }
    }
    v
}

pub fn vec_to_field(n: usize, v: &[f64]) -> PeriodicField {
    let mut f = PeriodicField::zeros(n);
    f.set_mode(0, [v[0].into(), v[1].into()]);
    for k in 1..=n {
        let b = 2 + 4 * (k - 1);
        f.set_mode(k, [num_complex::Complex64::new(v[b], v[b + 1]), num_complex::Complex64::new(v[b + 2], v[b + 3])]);
    }
    f
}

fn unit_field(n: usize, j: usize) -> PeriodicField {
    let mut v = vec![0.0; 4 * n + 2];
    v[j] = 1.0;
    vec_to_field(n, &v)
}

/// Long-wave parameters of one solved point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LongWaveParams {
    pub eps: f64,
    pub alpha: f64,
    pub c: f64,
    pub a: f64,
    pub big_omega: f64,
    pub phi_sup: f64,
    pub phi_deriv_sup: f64,
}

/// Branch at `c² = c_⋆² + ε²` parametrized by `a = αε²`.
#[derive(Debug, Clone, Serialize)]
pub struct LongWaveBranch {
    pub eps: f64,
    pub c: f64,
    pub omega_bracket: (f64, f64),
    pub frequencies_in_bracket: bool,
    pub frequency_lipschitz: f64,
    pub derivative_order: u32,
    pub params: Vec<LongWaveParams>,
    pub branch: Branch,
}

#[derive(Debug, Clone, Serialize)]
pub struct LongWaveCollection {
    pub alpha_cap: f64,
    pub branches: Vec<LongWaveBranch>,
}

/// Amplitude cap at `c_ε` for every `ε`; the smallest is the common `α` cap.
pub fn longwave_alpha_cap(material: &Material, eps: &[f64], config: &SolverConfig) -> Result<f64, SolverError> {
    if let Some(cap) = config.amplitude_cap {
        return Ok(cap);
    }
    let c_star = crate::linear::speed_of_sound(material);
    let mut cap = f64::INFINITY;
    for &e in eps {
        let c = (c_star * c_star + e * e).sqrt();
        let problem = WaveProblem::new(material, c, config.n, config.grid)?;
        let data = LinearData::new(material, c, config.n)?;
        cap = cap.min(default_amplitude_cap(&problem, &data));
    }
    Ok(cap)
}

/// Solves the long-wave family; `ε` values are processed in parallel.
pub fn longwave_branch(
    material: &Material,
    eps: &[f64],
    alphas: &[f64],
    config: &SolverConfig,
    derivative_order: u32,
) -> Result<LongWaveCollection, SolverError> {
    config.validate()?;
    for &e in eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(SolverError::Config { field: "eps".into(), detail: format!("{e} outside (0, 1)") });
        }
    }
    let alpha_cap = longwave_alpha_cap(material, eps, config)?;
    if let Some(&bad) = alphas.iter().find(|x| x.abs() > alpha_cap * (1.0 + 1e-12)) {
        return Err(SolverError::AboveCap { a: bad.abs(), cap: alpha_cap });
    }
    let c_star = crate::linear::speed_of_sound(material);
    let branches = eps
        .par_iter()
        .map(|&e| -> Result<LongWaveBranch, SolverError> {
            let c = (c_star * c_star + e * e).sqrt();
            let problem = WaveProblem::new(material, c, config.n, config.grid)?;
            let data = LinearData::new(material, c, config.n)?;
            // a = αε² never exceeds the cap at c_ε since α ≤ alpha_cap and ε < 1.
            let solver = Solver::new(&problem, &data, config.clone())?;
            let mut sorted = alphas.to_vec();
            sorted.sort_by(|x, y| x.total_cmp(y));
            sorted.dedup();
            let amps: Vec<f64> = sorted.iter().map(|al| al * e * e).collect();
            let branch = solver.solve_branch(&amps);
            let grid = Grid::new(problem.grid_size());
            let sup = |f: &PeriodicField| {
                grid.to_samples(f).iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
            };
            let params: Vec<LongWaveParams> = branch
                .points
                .iter()
                .zip(sorted.iter())
                .map(|(p, &alpha)| {
                    let phi = p.profile(&data);
                    LongWaveParams {
                        eps: e,
                        alpha,
                        c,
                        a: p.a,
                        big_omega: p.omega / e,
                        phi_sup: sup(&phi),
                        phi_deriv_sup: sup(&phi.derivative(derivative_order)),
                    }
                })
                .collect();
            let (lo, hi) = data.omega_bracket;
            let frequencies_in_bracket = params.iter().all(|p| {
                let w = e * p.big_omega;
                w >= lo && w <= hi
            });
            let frequency_lipschitz = params
                .windows(2)
                .map(|q| (q[1].big_omega - q[0].big_omega).abs() / (q[1].alpha - q[0].alpha).abs())
                .fold(0.0, f64::max);
            Ok(LongWaveBranch {
                eps: e,
                c,
                omega_bracket: data.omega_bracket,
                frequencies_in_bracket,
                frequency_lipschitz,
                derivative_order,
                params,
                branch,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LongWaveCollection { alpha_cap, branches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (WaveProblem, LinearData) {
        let mat = Material::new(1.0, 2.0, 1.0);
        let c = 2f64.sqrt();
        (WaveProblem::new(&mat, c, n, None).unwrap(), LinearData::new(&mat, c, n).unwrap())
    }

    #[test]
    fn trivial_amplitude() {
        let (problem, data) = setup(16);
        let solver = Solver::new(&problem, &data, SolverConfig { n: 16, ..Default::default() }).unwrap();
        let p = solver.solve_point(0.0, None).unwrap();
        assert_eq!(l2_norm(&p.psi), 0.0);
        assert_eq!(p.xi, 0.0);
        assert_eq!(p.omega, data.omega_c);
    }

    #[test]
    fn projection_examples() {
        let (_, data) = setup(8);
        assert!(l2_norm(&(&project_kernel(&data, &data.nu1) - &data.nu1)) < 1e-15);
        let cos2 = PeriodicField::single_mode(8, 2, [0.5.into(), 0.0.into()]);
        assert_eq!(l2_norm(&project_kernel(&data, &cos2)), 0.0);
    }

    #[test]
    fn small_amplitude_point_converges() {
        let (problem, data) = setup(32);
        let solver = Solver::new(&problem, &data, SolverConfig { n: 32, ..Default::default() }).unwrap();
        let p = solver.solve_point(1e-3, None).unwrap();
        assert!(p.residual_l2 < 1e-10);
        assert!(p.xi.is_finite());
    }

    #[test]
    fn above_cap_is_rejected() {
        let (problem, data) = setup(16);
        let cfg = SolverConfig { n: 16, amplitude_cap: Some(1e-3), ..Default::default() };
        let solver = Solver::new(&problem, &data, cfg).unwrap();
        let err = solver.solve_point(2e-3, None).unwrap_err();
        assert!(err.to_string().contains("amplitude above configured cap"));
    }

    #[test]
    fn config_validation_names_field() {
        let err = SolverConfig { relaxation: 0.0, ..Default::default() }.validate().unwrap_err();
        assert!(err.to_string().contains("relaxation"));
    }

    #[test]
    fn coordinate_round_trip() {
        let (_, data) = setup(6);
        let v = field_to_vec(&data.nu1);
        assert_eq!(vec_to_field(6, &v), data.nu1);
    }
}
