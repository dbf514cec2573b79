//! The traveling-wave operator
//! `Φ_c(φ, ω) = c²ω²Mφ″ − Δ₋(ω)V′(Δ₊(ω)φ)`, its potential `G_c = c²T + P`,
//! the first integral `J_c`, and the Newton-law residual on the lattice.
//!
//! Nonlinear terms are evaluated pseudospectrally on a grid large enough
//! that the Galerkin truncation of every polynomial composition is exact.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linear::{speed_of_sound, symbol_l};
use crate::model::{Material, Polynomial, Spring};
use crate::spectral::{inner_product, Grid, PeriodicField, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("subsonic speed: |c| = {c} does not exceed the speed of sound {c_star}")]
    Subsonic { c: f64, c_star: f64 },
    #[error("grid size {grid} below (maxdeg+1)N+1 = {required}")]
    GridTooSmall { grid: usize, required: usize },
    #[error("truncation must be at least 1")]
    EmptyTruncation,
}

/// Speed, material and discretization of one traveling-wave problem.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    pub material: Material,
    pub c: f64,
    n: usize,
    degree: usize,
    grid: Grid,
    fine: Grid,
    dforce: [Polynomial; 2],
    potential: [Polynomial; 2],
}

/// `T`, `P` and `G_c = c²T + P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

/// `J_c(φ, ω)` on a grid together with the checks of its defining identity.
#[derive(Debug, Clone, Serialize)]
pub struct FirstIntegralTrace {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub advance_delay: Vec<f64>,
    pub variation: f64,
    /// `⟨Φ(φ,ω), φ′⟩` from the spectral operator.
    pub phi_dot_derivative: f64,
    /// Mean over the grid of the pointwise formula for `∂_x J_c`.
    pub derivative_quadrature: f64,
    /// `max_x |∂_x J_c − Φ·φ′|` with `∂_x J_c` taken spectrally from the samples.
    pub pointwise_defect: f64,
}

/// Default grid: `max(4N, (d+1)N + 2)`.
pub fn default_grid_size(n: usize, degree: usize) -> usize {
    (4 * n).max((degree + 1) * n + 2)
}

impl WaveProblem {
    pub fn new(material: &Material, c: f64, n: usize, grid: Option<usize>) -> Result<Self, OperatorError> {
        let c_star = speed_of_sound(material);
        if !(c.abs() > c_star) {
            return Err(OperatorError::Subsonic { c: c.abs(), c_star });
        }
        if n == 0 {
            return Err(OperatorError::EmptyTruncation);
        }
        let degree = material.max_degree();
        let size = grid.unwrap_or_else(|| default_grid_size(n, degree));
        let required = Grid::required_size(n, degree);
        if size < required {
            return Err(OperatorError::GridTooSmall { grid: size, required });
        }
        Ok(Self {
            material: material.clone(),
            c,
            n,
            degree,
            grid: Grid::new(size),
            fine: Grid::new(2 * (degree + 1) * n + 2),
            dforce: [material.force1.derivative(), material.force2.derivative()],
            potential: [material.force1.antiderivative(), material.force2.antiderivative()],
        })
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        self.grid.size()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn force(&self, which: usize, r: f64) -> f64 {
        self.material.force(if which == 0 { Spring::First } else { Spring::Second }, r)
    }

    fn pointwise(&self, f: &PeriodicField, map: impl Fn(usize, f64) -> f64) -> PeriodicField {
        self.grid
            .apply_pointwise(&f.resized(self.n), self.degree, map)
            .expect("grid size validated at construction")
    }

    /// Product of `map(p)` and `q` componentwise, truncated to `N`.
    fn pointwise_product(&self, p: &PeriodicField, q: &PeriodicField, map: impl Fn(usize, f64) -> f64) -> PeriodicField {
        let (sp, sq) = (self.grid.to_samples(&p.resized(self.n)), self.grid.to_samples(&q.resized(self.n)));
        let out = [0, 1].map(|c| sp[c].iter().zip(sq[c].iter()).map(|(&x, &y)| map(c, x) * y).collect());
        self.grid.from_samples(&out, self.n)
    }

    /// `c²ω²Mφ″`.
    fn kinetic_term(&self, phi: &PeriodicField, omega: f64) -> PeriodicField {
        let s = self.c * self.c * omega * omega;
        let m = self.material.m;
        phi.map_modes(|k, v| {
            let f = -s * (k * k) as f64;
            [v[0] * f, v[1] * (f * m)]
        })
    }

    /// `Δ₊(ω)φ = (−φ₁ + S^ωφ₂, φ₁ − S^{−ω}φ₂)`.
    pub fn delta_plus(&self, phi: &PeriodicField, omega: f64) -> PeriodicField {
        phi.map_modes(|k, v| {
            let e = Complex64::from_polar(1.0, k as f64 * omega);
            [-v[0] + e * v[1], v[0] - e.conj() * v[1]]
        })
    }

    /// `Δ₋(ω)η = (η₁ − η₂, −S^{−ω}η₁ + S^ωη₂)`.
    pub fn delta_minus(&self, eta: &PeriodicField, omega: f64) -> PeriodicField {
        eta.map_modes(|k, v| {
            let e = Complex64::from_polar(1.0, k as f64 * omega);
            [v[0] - v[1], -e.conj() * v[0] + e * v[1]]
        })
    }

    /// `Φ_c(φ, ω)` in the `Δ`-form.
    pub fn phi(&self, phi: &PeriodicField, omega: f64) -> PeriodicField {
        let stretched = self.delta_plus(phi, omega);
        let forces = self.pointwise(&stretched, |c, r| self.force(c, r));
        &self.kinetic_term(phi, omega) - &self.delta_minus(&forces, omega)
    }

    /// `Φ_c(φ, ω)` written out component by component.
    pub fn phi_direct(&self, phi: &PeriodicField, omega: f64) -> PeriodicField {
        let ahead = phi.shift(omega);
        let behind = phi.shift(-omega);
        // Arguments of V₁′ and of V₂′, one per output component.
        let first = PeriodicField::zeros(phi.truncation()).map_modes(|k, _| {
            let (a, b, p) = (ahead.mode(k), behind.mode(k), phi.mode(k));
            [a[1] - p[0], p[1] - b[0]]
        });
        let second = PeriodicField::zeros(phi.truncation()).map_modes(|k, _| {
            let (a, b, p) = (ahead.mode(k), behind.mode(k), phi.mode(k));
            [p[0] - b[1], a[0] - p[1]]
        });
        let v1 = self.pointwise(&first, |_, r| self.force(0, r));
        let v2 = self.pointwise(&second, |_, r| self.force(1, r));
        let kin = self.kinetic_term(phi, omega);
        kin.map_modes(|k, t| {
            let (a, b) = (v1.mode(k), v2.mode(k));
            [t[0] + b[0] - a[0], t[1] + a[1] - b[1]]
        })
    }

    /// `L_c[ω]η`, the linearization of `Φ_c(·, ω)` at zero.
    pub fn linearization(&self, eta: &PeriodicField, omega: f64) -> Result<PeriodicField, SpectralError> {
        let (mat, c) = (&self.material, self.c);
        eta.apply_symbol(|k| symbol_l(mat, c, omega * k as f64))
    }

    /// `D_φΦ_c(φ, ω)η = c²ω²Mη″ − Δ₋(V″(Δ₊φ)·Δ₊η)`.
    pub fn jacobian_apply(&self, phi: &PeriodicField, omega: f64, eta: &PeriodicField) -> PeriodicField {
        let p = self.delta_plus(phi, omega);
        let q = self.delta_plus(eta, omega);
        let prod = self.pointwise_product(&p, &q, |c, r| self.dforce[c].eval(r));
        &self.kinetic_term(eta, omega) - &self.delta_minus(&prod, omega)
    }

    /// `∂_ωΦ_c(φ, ω)`.
    pub fn omega_derivative(&self, phi: &PeriodicField, omega: f64) -> PeriodicField {
        let p = self.delta_plus(phi, omega);
        let forces = self.pointwise(&p, |c, r| self.force(c, r));
        let dphi2 = phi.derivative(1);
        // ∂_ωΔ₊(ω)φ = (S^ωφ₂′, S^{−ω}φ₂′)
        let dp = dphi2.map_modes(|k, v| {
            let e = Complex64::from_polar(1.0, k as f64 * omega);
            [e * v[1], e.conj() * v[1]]
        });
        let prod = self.pointwise_product(&p, &dp, |c, r| self.dforce[c].eval(r));
        // ∂_ωΔ₋(ω)η = (0, S^{−ω}η₁′ + S^ωη₂′)
        let dforces = forces.derivative(1).map_modes(|k, v| {
            let e = Complex64::from_polar(1.0, k as f64 * omega);
            [Complex64::new(0.0, 0.0), e.conj() * v[0] + e * v[1]]
        });
        let s = 2.0 * self.c * self.c * omega;
        let m = self.material.m;
        let kin = phi.map_modes(|k, v| {
            let f = -s * (k * k) as f64;
            [v[0] * f, v[1] * (f * m)]
        });
        &(&kin - &dforces) - &self.delta_minus(&prod, omega)
    }

    /// `T = (ω²/2)⟨Mφ″, φ⟩`, `P = ⟨V(Δ₊φ), 1⟩`, `G_c = c²T + P`.
    pub fn energy(&self, phi: &PeriodicField, omega: f64) -> Energy {
        let m = self.material.m;
        let mphi2 = phi.derivative(2).map_modes(|_, v| [v[0], v[1] * m]);
        let kinetic = 0.5 * omega * omega * inner_product(&mphi2, phi);
        let samples = self.grid.to_samples(&self.delta_plus(phi, omega).resized(self.n));
        let total_v: f64 = samples[0].iter().map(|&r| self.potential[0].eval(r)).sum::<f64>()
            + samples[1].iter().map(|&r| self.potential[1].eval(r)).sum::<f64>();
        let potential = total_v / self.grid.size() as f64;
        Energy {
            kinetic,
            potential,
            total: self.c * self.c * kinetic + potential,
        }
    }

    /// Evaluates `J_c(φ, ω)` on an alias-free grid.
    pub fn first_integral(&self, phi: &PeriodicField, omega: f64) -> FirstIntegralTrace {
        let fine = &self.fine;
        let g = fine.size();
        let nf = (g - 1) / 2;
        let phi = phi.resized(self.n);
        let d1 = phi.derivative(1);
        let samples = |f: &PeriodicField| fine.to_samples(f);
        let (p, dp, ddp) = (samples(&phi), samples(&d1), samples(&phi.derivative(2)));
        let (ahead, behind) = (samples(&phi.shift(omega)), samples(&phi.shift(-omega)));
        let behind_d = samples(&d1.shift(-omega));
        let (v1, v2) = (&self.material.force1, &self.material.force2);
        let (pot1, pot2) = (&self.potential[0], &self.potential[1]);
        let cw2 = self.c * self.c * omega * omega;
        let m = self.material.m;

        let integrand: Vec<f64> = (0..g)
            .map(|j| v1.eval(ahead[1][j] - p[0][j]) * dp[0][j] + v2.eval(ahead[0][j] - p[1][j]) * dp[1][j])
            .collect();
        let zeros = vec![0.0; g];
        let ghat = fine.from_samples(&[integrand.clone(), zeros.clone()], nf);
        // ∫_x^{x−ω} g = G(x−ω) − G(x) − ω·mean(g) with G the antiderivative of g − mean g.
        let mean = ghat.mode(0)[0].re;
        let antider = ghat.map_modes(|k, v| {
            if k == 0 {
                [Complex64::new(-omega * mean, 0.0), Complex64::new(0.0, 0.0)]
            } else {
                let factor = (Complex64::from_polar(1.0, -(k as f64) * omega) - 1.0) / Complex64::new(0.0, k as f64);
                [v[0] * factor, Complex64::new(0.0, 0.0)]
            }
        });
        let advance_delay = samples(&antider)[0].clone();
        let g_behind = samples(&ghat.shift(-omega))[0].clone();

        let mut values = Vec::with_capacity(g);
        let mut dj = Vec::with_capacity(g);
        let mut full_dot = Vec::with_capacity(g);
        for j in 0..g {
            let a = p[1][j] - behind[0][j];
            let b = p[0][j] - behind[1][j];
            values.push(
                0.5 * cw2 * (dp[0][j].powi(2) + m * dp[1][j].powi(2)) + pot1.eval(a) + pot2.eval(b) + advance_delay[j],
            );
            let local = cw2 * (dp[0][j] * ddp[0][j] + m * dp[1][j] * ddp[1][j]);
            dj.push(
                local
                    + v1.eval(a) * (dp[1][j] - behind_d[0][j])
                    + v2.eval(b) * (dp[0][j] - behind_d[1][j])
                    + g_behind[j]
                    - integrand[j],
            );
            let phi1 = cw2 * ddp[0][j] + v2.eval(b) - v1.eval(ahead[1][j] - p[0][j]);
            let phi2 = cw2 * m * ddp[1][j] + v1.eval(a) - v2.eval(ahead[0][j] - p[1][j]);
            full_dot.push(phi1 * dp[0][j] + phi2 * dp[1][j]);
        }
        let jfield = fine.from_samples(&[values.clone(), zeros], nf);
        let dj_spectral = samples(&jfield.derivative(1))[0].clone();
        let pointwise_defect = dj_spectral
            .iter()
            .zip(full_dot.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        FirstIntegralTrace {
            x: fine.points(),
            advance_delay,
            variation: hi - lo,
            phi_dot_derivative: inner_product(&self.phi(&phi, omega), &d1),
            derivative_quadrature: dj.iter().sum::<f64>() / g as f64,
            pointwise_defect,
            values,
        }
    }

    /// Largest Newton-law residual of the lattice motion `u_j(t) = φ_{1|2}(ω(j − ct))`.
    pub fn lattice_residual(&self, phi: &PeriodicField, omega: f64, samples: &[(i64, f64)]) -> f64 {
        let c = self.c;
        let mat = &self.material;
        let comp = |j: i64| if j.rem_euclid(2) == 1 { 0 } else { 1 };
        let u = |j: i64, t: f64| phi.eval_at(omega * (j as f64 - c * t))[comp(j)];
        samples
            .iter()
            .map(|&(j, t)| {
                let acc = c * c * omega * omega * phi.eval_derivative_at(omega * (j as f64 - c * t), 2)[comp(j)];
                let (um, u0, up) = (u(j - 1, t), u(j, t), u(j + 1, t));
                let res = mat.mass(j) * acc - mat.force(Material::spring_after(j), up - u0)
                    + mat.force(Material::spring_after(j - 1), u0 - um);
                res.abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::l2_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn problem(n: usize) -> WaveProblem {
        WaveProblem::new(&Material::new(1.0, 2.0, 1.0), 2f64.sqrt(), n, None).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = problem(8);
        let z = PeriodicField::zeros(8);
        assert_eq!(l2_norm(&p.phi(&z, 1.3)), 0.0);
        assert_eq!(p.energy(&z, 1.3).total, 0.0);
        let trace = p.first_integral(&z, 1.3);
        assert!(trace.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grid_validation() {
        let mat = Material::with_forces(1.0, vec![0.0, 1.0, 0.0, 1.0], vec![0.0, 2.0, 1.0]);
        assert_eq!(default_grid_size(16, 3), 66);
        let err = WaveProblem::new(&mat, 2.0, 16, Some(64)).unwrap_err();
        assert_eq!(err, OperatorError::GridTooSmall { grid: 64, required: 65 });
        assert!(WaveProblem::new(&mat, 0.5, 16, None).is_err());
    }

    #[test]
    fn both_forms_agree() {
        let p = problem(12);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phi = PeriodicField::random(&mut rng, 12, 6, 0.3);
        let diff = l2_norm(&(&p.phi(&phi, 1.1) - &p.phi_direct(&phi, 1.1)));
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn jacobian_matches_difference_quotient() {
        let p = problem(10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = PeriodicField::random(&mut rng, 10, 5, 0.3);
        let eta = PeriodicField::random(&mut rng, 10, 5, 1.0);
        let h = 1e-5;
        let fd = (&p.phi(&phi.axpy(h, &eta), 1.2) - &p.phi(&phi.axpy(-h, &eta), 1.2)).scale(0.5 / h);
        assert!(l2_norm(&(&fd - &p.jacobian_apply(&phi, 1.2, &eta))) < 1e-8);
        let fdw = (&p.phi(&phi, 1.2 + h) - &p.phi(&phi, 1.2 - h)).scale(0.5 / h);
        assert!(l2_norm(&(&fdw - &p.omega_derivative(&phi, 1.2))) < 1e-8);
    }

    #[test]
    fn first_integral_identity_on_random_field() {
        let p = problem(10);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = PeriodicField::random(&mut rng, 10, 6, 0.4);
        let t = p.first_integral(&phi, 1.4);
        assert!((t.phi_dot_derivative - t.derivative_quadrature).abs() < 1e-9);
        assert!(t.pointwise_defect < 1e-11, "{}", t.pointwise_defect);
    }
}
