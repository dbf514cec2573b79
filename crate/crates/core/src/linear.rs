//! Linearization of the traveling-wave operator at a fixed speed.
//!
//! `L̃_c(K) = −c²K²M + D̃(K)` with `M = diag(1, m)` is the symbol of
//! `L_c[ω]` at mode `k` when `K = ωk`. The critical frequency `ω_c` makes
//! `L̃_c(±ω_c)` singular, and the kernel of `L_c[ω_c]` is spanned by the
//! constant `ν₀` and the first-mode fields `ν₁`, `ν₂ = S^{−π/2}ν₁`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::Material;
use crate::spectral::{inner_product, l2_norm, sobolev_norm, Mat2, Pair, PeriodicField, SpectralError};

const ROOT_TOL: f64 = 1e-13;
const NEWTON_STEPS: usize = 5;
const SIGN_SAMPLES: usize = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error("subsonic speed: |c| = {c} does not exceed the speed of sound {c_star}")]
    Subsonic { c: f64, c_star: f64 },
    #[error("critical-frequency function does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("critical frequency is not unique: {count} sign changes on (0, {hi}]")]
    NotUnique { count: usize, hi: f64 },
    #[error("critical frequency residual {residual} above tolerance")]
    RootResidual { residual: f64 },
    #[error("closed-form dispersion disagrees with eigensolve at K = {k}: {detail}")]
    DispersionMismatch { k: f64, detail: String },
    #[error("kernel field nu{index} is not annihilated: residual {residual}")]
    KernelResidual { index: usize, residual: f64 },
    #[error("transversality mismatch: numeric {numeric}, closed form {closed_form}")]
    TransversalityMismatch { numeric: f64, closed_form: f64 },
    #[error("<L' nu1, nu2> = {value} is not zero")]
    OtherTransverse { value: f64 },
    #[error("right-hand side not orthogonal to the kernel: <eta, nu{index}> = {value}")]
    NotOrthogonal { index: usize, value: f64 },
    #[error("singular symbol block at mode {mode}")]
    SingularMode { mode: i64 },
    #[error("coercive solve residual {residual} exceeds tolerance")]
    CoerciveResidual { residual: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `D̃(K)`, Hermitian for real `K`.
pub fn symbol_d(mat: &Material, k: f64) -> Mat2 {
    let kappa = mat.kappa;
    let diag = Complex64::new(1.0 + kappa, 0.0);
    Mat2::new(
        diag,
        -(cis(k) + cis(-k) * kappa),
        -(cis(k) * kappa + cis(-k)),
        diag,
    )
}

/// `dD̃/dK`.
pub fn symbol_d_prime(mat: &Material, k: f64) -> Mat2 {
    let kappa = mat.kappa;
    let i = Complex64::new(0.0, 1.0);
    Mat2::new(
        0.0.into(),
        -i * (cis(k) - cis(-k) * kappa),
        -i * (cis(k) * kappa - cis(-k)),
        0.0.into(),
    )
}

/// `L̃_c(K) = −c²K²M + D̃(K)`.
pub fn symbol_l(mat: &Material, c: f64, k: f64) -> Mat2 {
    let s = c * c * k * k;
    symbol_d(mat, k).add(&Mat2::real(-s, 0.0, 0.0, -s * mat.m))
}

/// `L̃_c′(K) = −2c²KM + D̃′(K)`.
pub fn symbol_l_prime(mat: &Material, c: f64, k: f64) -> Mat2 {
    let s = 2.0 * c * c * k;
    symbol_d_prime(mat, k).add(&Mat2::real(-s, 0.0, 0.0, -s * mat.m))
}

/// Branches of the dispersion relation at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dispersion {
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub rho: f64,
}

pub fn rho(mat: &Material, k: f64) -> f64 {
    let (w, kappa) = (mat.w, mat.kappa);
    let cos2 = k.cos().powi(2);
    ((1.0 + w).powi(2) * (1.0 - kappa).powi(2) + 4.0 * kappa * ((1.0 - w).powi(2) + 4.0 * w * cos2)).sqrt()
}

/// Closed-form eigenvalues of `M⁻¹D̃(K)`.
pub fn dispersion(mat: &Material, k: f64) -> Dispersion {
    let r = rho(mat, k);
    let mid = (1.0 + mat.kappa) * (1.0 + mat.w) / 2.0;
    Dispersion {
        lambda_minus: mid - r / 2.0,
        lambda_plus: mid + r / 2.0,
        rho: r,
    }
}

pub fn lambda_plus(mat: &Material, k: f64) -> f64 {
    dispersion(mat, k).lambda_plus
}

/// `λ̃₊′(K) = −4κw sin(2K)/ρ̃(K)`.
pub fn lambda_plus_prime(mat: &Material, k: f64) -> f64 {
    -4.0 * mat.kappa * mat.w * (2.0 * k).sin() / rho(mat, k)
}

/// Eigenvalues of `M⁻¹D̃(K)` from the matrix entries, ascending.
pub fn direct_eigenvalues(mat: &Material, k: f64) -> [f64; 2] {
    let a = Mat2::real(1.0, 0.0, 0.0, mat.w).matmul(&symbol_d(mat, k));
    let tr = a.trace();
    let disc = (tr * tr - a.det() * 4.0).sqrt();
    let (x, y) = (((tr - disc) / 2.0).re, ((tr + disc) / 2.0).re);
    if x <= y {
        [x, y]
    } else {
        [y, x]
    }
}

/// Closed form checked against the matrix eigenvalues to `1e-10` relative.
pub fn dispersion_checked(mat: &Material, k: f64) -> Result<Dispersion, LinearError> {
    let d = dispersion(mat, k);
    let [lo, hi] = direct_eigenvalues(mat, k);
    let scale = (1.0 + mat.kappa) * (1.0 + mat.w);
    let err = (d.lambda_minus - lo).abs().max((d.lambda_plus - hi).abs());
    if err > 1e-10 * scale {
        return Err(LinearError::DispersionMismatch {
            k,
            detail: format!("closed ({}, {}) vs eigen ({lo}, {hi})", d.lambda_minus, d.lambda_plus),
        });
    }
    Ok(d)
}

/// `√(4κw/((1+κ)(1+w)))`.
pub fn speed_of_sound(mat: &Material) -> f64 {
    (4.0 * mat.kappa * mat.w / ((1.0 + mat.kappa) * (1.0 + mat.w))).sqrt()
}

/// Interval guaranteed to contain `ω_c`.
pub fn omega_bracket(mat: &Material, c: f64) -> (f64, f64) {
    let c = c.abs();
    (
        lambda_plus(mat, std::f64::consts::FRAC_PI_2).sqrt() / c,
        ((1.0 + mat.kappa) * (1.0 + mat.w)).sqrt() / c,
    )
}

/// Lower bound for `|1 + κ − c²ω_c²|` that does not depend on `c`.
pub fn v2_lower_bound(mat: &Material) -> f64 {
    let (w, kappa) = (mat.w, mat.kappa);
    if w > 1.0 {
        (1.0 + kappa) * (w - 1.0) / 2.0
    } else {
        let a = (1.0 + kappa) * (1.0 - w);
        ((a * a + 4.0 * w * (1.0 - kappa).powi(2)).sqrt() - a) / 2.0
    }
}

/// The unique `K > 0` with `c²K² = λ̃₊(K)`.
pub fn critical_frequency(mat: &Material, c: f64) -> Result<f64, LinearError> {
    let c_star = speed_of_sound(mat);
    if !(c.abs() > c_star) {
        return Err(LinearError::Subsonic { c: c.abs(), c_star });
    }
    let c2 = c * c;
    let f = |k: f64| c2 * k * k - lambda_plus(mat, k);
    let fp = |k: f64| 2.0 * c2 * k - lambda_plus_prime(mat, k);
    let (mut lo, mut hi) = omega_bracket(mat, c);
    let (upper, lower) = (hi, lo);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(LinearError::NoSignChange { lo, hi });
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..200 {
        k = 0.5 * (lo + hi);
        let v = f(k);
        if v.abs() < ROOT_TOL || hi - lo < 4.0 * f64::EPSILON * hi {
            break;
        }
        if v < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
    }
    for _ in 0..NEWTON_STEPS {
        let next = k - f(k) / fp(k);
        if next.is_finite() && next >= lower && next <= upper && f(next).abs() <= f(k).abs() {
            k = next;
        }
    }
    let residual = f(k).abs();
    if residual >= ROOT_TOL {
        return Err(LinearError::RootResidual { residual });
    }
    let changes = (0..=SIGN_SAMPLES)
        .map(|i| f(upper * i as f64 / SIGN_SAMPLES as f64).signum())
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|p| p[0] != p[1] && p[1] != 0.0)
        .count();
    if changes != 1 {
        return Err(LinearError::NotUnique { count: changes, hi: upper });
    }
    Ok(k)
}

/// Smallest singular value of a 2×2 complex matrix.
pub fn min_singular_value(a: &Mat2) -> f64 {
    let h = a.adjoint().matmul(a);
    let (p, q) = (h.0[0][0].re, h.0[1][1].re);
    let b = h.0[0][1].norm();
    let disc = (((p - q) / 2.0).powi(2) + b * b).sqrt();
    ((p + q) / 2.0 - disc).max(0.0).sqrt()
}

/// Intermediate quantities of the transversality closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakdown {
    pub z1: f64,
    pub z2: Complex64,
    pub v1: Complex64,
    pub v2: f64,
}

/// Ratio `‖ψ‖_{H²}/‖η‖_{L²}` and residual of one coercive solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CoerciveSolution {
    pub psi: PeriodicField,
    pub constant: f64,
    pub residual: f64,
}

/// Everything the linearization at speed `c` provides.
#[derive(Debug, Clone, Serialize)]
pub struct LinearData {
    #[serde(skip)]
    pub material: Material,
    pub c: f64,
    pub c_star: f64,
    pub omega_c: f64,
    pub omega_bracket: (f64, f64),
    pub mu_c: Pair,
    pub normalizer: f64,
    pub nu0: PeriodicField,
    pub nu1: PeriodicField,
    pub nu2: PeriodicField,
    pub transversality: f64,
    pub transversality_closed_form: f64,
    pub lambda_plus_prime: f64,
    pub v2_lower_bound: f64,
    pub breakdown: Breakdown,
    pub kernel_residuals: [f64; 3],
}

impl LinearData {
    /// Builds and certifies the linear data at truncation `n ≥ 1`.
    pub fn new(mat: &Material, c: f64, n: usize) -> Result<Self, LinearError> {
        let omega_c = critical_frequency(mat, c)?;
        let kappa = mat.kappa;
        let v1 = cis(omega_c) + cis(-omega_c) * kappa;
        let v2 = 1.0 + kappa - c * c * omega_c * omega_c;
        let z1 = -2.0 * c * c * omega_c;
        let z2 = cis(omega_c) - cis(-omega_c) * kappa;
        let mu_c = [v1, Complex64::new(v2, 0.0)];
        let normalizer = 2f64.sqrt() * (mu_c[0].norm_sqr() + mu_c[1].norm_sqr()).sqrt();
        let nu0 = PeriodicField::constant(n, 1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt());
        let nu1 = PeriodicField::single_mode(n, 1, [mu_c[0] / normalizer, mu_c[1] / normalizer]);
        let nu2 = nu1.shift(-std::f64::consts::FRAC_PI_2);
        let lpp = lambda_plus_prime(mat, omega_c);
        let mut data = LinearData {
            material: mat.clone(),
            c,
            c_star: speed_of_sound(mat),
            omega_c,
            omega_bracket: omega_bracket(mat, c),
            mu_c,
            normalizer,
            nu0,
            nu1,
            nu2,
            transversality: 0.0,
            transversality_closed_form: 0.0,
            lambda_plus_prime: lpp,
            v2_lower_bound: v2_lower_bound(mat),
            breakdown: Breakdown { z1, z2, v1, v2 },
            kernel_residuals: [0.0; 3],
        };
        for (i, nu) in [&data.nu0, &data.nu1, &data.nu2].into_iter().enumerate() {
            let residual = l2_norm(&data.apply_l(nu)?);
            data.kernel_residuals[i] = residual;
            if residual >= 1e-11 {
                return Err(LinearError::KernelResidual { index: i, residual });
            }
        }
        let (numeric, closed) = (data.transversality_numeric()?, data.transversality_closed());
        if (numeric - closed).abs() > 1e-8 * closed.abs() {
            return Err(LinearError::TransversalityMismatch { numeric, closed_form: closed });
        }
        let other = inner_product(&data.apply_l_prime(&data.nu1)?, &data.nu2);
        if other.abs() >= 1e-11 {
            return Err(LinearError::OtherTransverse { value: other });
        }
        data.transversality = numeric;
        data.transversality_closed_form = closed;
        Ok(data)
    }

    pub fn truncation(&self) -> usize {
        self.nu1.truncation()
    }

    /// `L_c[ω]` applied to a field.
    pub fn apply_l_at(&self, omega: f64, f: &PeriodicField) -> Result<PeriodicField, SpectralError> {
        let (mat, c) = (&self.material, self.c);
        f.apply_symbol(|k| symbol_l(mat, c, omega * k as f64))
    }

    /// `L_c[ω_c]`.
    pub fn apply_l(&self, f: &PeriodicField) -> Result<PeriodicField, SpectralError> {
        self.apply_l_at(self.omega_c, f)
    }

    /// `L_c′[ω_c]`, symbol `k L̃_c′(ω_c k)`.
    pub fn apply_l_prime(&self, f: &PeriodicField) -> Result<PeriodicField, SpectralError> {
        let (mat, c, w) = (&self.material, self.c, self.omega_c);
        f.apply_symbol(|k| symbol_l_prime(mat, c, w * k as f64).scale((k as f64).into()))
    }

    /// Adjoint of `L_c[ω_c]: H² → L²`, symbol `(1+k²)^{−2} L̃_c(ω_c k)^*`.
    pub fn apply_l_adjoint(&self, f: &PeriodicField) -> Result<PeriodicField, SpectralError> {
        let (mat, c, w) = (&self.material, self.c, self.omega_c);
        f.apply_symbol(|k| {
            let weight = (1.0 + (k * k) as f64).powi(-2);
            symbol_l(mat, c, w * k as f64).adjoint().scale(weight.into())
        })
    }

    /// `⟨L′ν₁, ν₁⟩` through the multiplier.
    pub fn transversality_numeric(&self) -> Result<f64, SpectralError> {
        Ok(inner_product(&self.apply_l_prime(&self.nu1)?, &self.nu1))
    }

    /// `(2ρ̃v₂/(wN²))(2c²ω_c − λ̃₊′(ω_c))`.
    pub fn transversality_closed(&self) -> f64 {
        let mat = &self.material;
        let r = rho(mat, self.omega_c);
        let v2 = self.breakdown.v2;
        2.0 * r * v2 / (mat.w * self.normalizer.powi(2))
            * (2.0 * self.c * self.c * self.omega_c - self.lambda_plus_prime)
    }

    /// `2c²ω_c − λ̃₊′(ω_c)`.
    pub fn crossing_speed(&self) -> f64 {
        2.0 * self.c * self.c * self.omega_c - self.lambda_plus_prime
    }

    /// Minimum singular value of `L̃_c(ω_c k)` over `2 ≤ k ≤ N`.
    pub fn min_singular_value_off_kernel(&self) -> f64 {
        (2..=self.truncation())
            .map(|k| min_singular_value(&symbol_l(&self.material, self.c, self.omega_c * k as f64)))
            .fold(f64::INFINITY, f64::min)
    }

    /// `η − ⟨η,ν₀⟩ν₀ − ⟨η,ν₁⟩ν₁ − ⟨η,ν₂⟩ν₂`.
    pub fn project_off_kernel(&self, eta: &PeriodicField) -> PeriodicField {
        let mut out = eta.clone();
        for nu in [&self.nu0, &self.nu1, &self.nu2] {
            out = out.axpy(-inner_product(eta, nu), nu);
        }
        out
    }

    /// Solves `L_c[ω_c]ψ = η` with `ψ ⊥ {ν₀, ν₁, ν₂}` for `η ⊥ {ν₀, ν₁, ν₂}`.
    pub fn coercive_solve(&self, eta: &PeriodicField) -> Result<CoerciveSolution, LinearError> {
        let eta_norm = l2_norm(eta);
        for (index, nu) in [&self.nu0, &self.nu1, &self.nu2].into_iter().enumerate() {
            let value = inner_product(eta, nu);
            if value.abs() > 1e-10 * eta_norm.max(1.0) {
                return Err(LinearError::NotOrthogonal { index, value });
            }
        }
        let eta = self.project_off_kernel(eta);
        let (mat, c, w) = (&self.material, self.c, self.omega_c);
        let mut psi = PeriodicField::zeros(eta.truncation());
        for k in 0..=eta.truncation() {
            let e = eta.mode(k as i64);
            let v = match k {
                0 => {
                    let p = e[0].re / (2.0 * (1.0 + mat.kappa));
                    [p.into(), (-p).into()]
                }
                1 => {
                    let mu = self.mu_c;
                    let u = [mu[1].conj(), -mu[0].conj()];
                    let eig = symbol_l(mat, c, w).trace().re;
                    let unorm = u[0].norm_sqr() + u[1].norm_sqr();
                    if eig.abs() * unorm < 1e-14 {
                        return Err(LinearError::SingularMode { mode: 1 });
                    }
                    let coef = (e[0] * u[0].conj() + e[1] * u[1].conj()) / (unorm * eig);
                    [u[0] * coef, u[1] * coef]
                }
                _ => symbol_l(mat, c, w * k as f64)
                    .inverse()
                    .ok_or(LinearError::SingularMode { mode: k as i64 })?
                    .apply(&e),
            };
            psi.set_mode(k, v);
        }
        let residual = l2_norm(&(&self.apply_l(&psi)? - &eta));
        if residual > 1e-10 * eta_norm.max(f64::MIN_POSITIVE) && eta_norm > 0.0 {
            return Err(LinearError::CoerciveResidual { residual });
        }
        let constant = if eta_norm > 0.0 { sobolev_norm(&psi, 2.0) / eta_norm } else { 0.0 };
        Ok(CoerciveSolution { psi, constant, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_mat() -> Material {
        Material::new(1.0, 2.0, 1.0)
    }

    #[test]
    fn symbol_examples() {
        let mat = default_mat();
        let d0 = symbol_d(&mat, 0.0);
        let v = d0.apply(&[1.0.into(), 1.0.into()]);
        assert!(v[0].norm() < 1e-15 && v[1].norm() < 1e-15);
        let d = symbol_d(&mat, std::f64::consts::FRAC_PI_2);
        let expect = Mat2::new(3.0.into(), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), 3.0.into());
        assert!(d.max_diff(&expect) < 1e-15);
        assert!(d.max_diff(&d.adjoint()) < 1e-15);
    }

    #[test]
    fn dispersion_examples() {
        let mat = default_mat();
        let d = dispersion_checked(&mat, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((d.rho - 2.0).abs() < 1e-14);
        assert!((d.lambda_plus - 4.0).abs() < 1e-14);
        assert!((d.lambda_minus - 2.0).abs() < 1e-14);
        assert!(dispersion(&mat, 0.0).lambda_minus.abs() < 1e-14);
    }

    #[test]
    fn sound_speed_examples() {
        assert!((speed_of_sound(&default_mat()) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let mono = Material::new(1.0, 1.0, 1.0);
        assert!((speed_of_sound(&mono) - 1.0).abs() < 1e-15);
        let k = 1e-4;
        let approx = dispersion(&default_mat(), k).lambda_minus.sqrt() / k;
        assert!((approx - speed_of_sound(&default_mat())).abs() < 1e-6);
    }

    #[test]
    fn critical_frequency_example() {
        let mat = default_mat();
        let c = 2f64.sqrt();
        let w = critical_frequency(&mat, c).unwrap();
        assert!((w - 1.428).abs() < 1e-3);
        let (lo, hi) = omega_bracket(&mat, c);
        assert!(lo <= w && w <= hi);
        assert!((c * c * w * w - lambda_plus(&mat, w)).abs() < 1e-12);
        assert!(matches!(critical_frequency(&mat, 1.0), Err(LinearError::Subsonic { .. })));
    }

    #[test]
    fn kernel_is_orthonormal() {
        let data = LinearData::new(&default_mat(), 2f64.sqrt(), 16).unwrap();
        let basis = [&data.nu0, &data.nu1, &data.nu2];
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner_product(a, b) - expect).abs() < 1e-14);
            }
        }
        assert!(data.breakdown.v2.abs() >= data.v2_lower_bound);
        assert!(data.crossing_speed() > 0.0);
        assert!(data.min_singular_value_off_kernel() > 1e-6);
    }

    #[test]
    fn derivative_identities_of_kernel() {
        let data = LinearData::new(&default_mat(), 2f64.sqrt(), 8).unwrap();
        assert!(l2_norm(&(&data.nu1.derivative(1) + &data.nu2)) < 1e-15);
        assert!(l2_norm(&(&data.nu2.derivative(1) - &data.nu1)) < 1e-15);
    }

    #[test]
    fn coercive_zero_and_cosine() {
        let data = LinearData::new(&default_mat(), 2f64.sqrt(), 8).unwrap();
        let zero = data.coercive_solve(&PeriodicField::zeros(8)).unwrap();
        assert_eq!(l2_norm(&zero.psi), 0.0);
        let eta = PeriodicField::single_mode(8, 2, [0.5.into(), 0.0.into()]);
        let sol = data.coercive_solve(&eta).unwrap();
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn coercive_rejects_kernel_components() {
        let data = LinearData::new(&default_mat(), 2f64.sqrt(), 8).unwrap();
        let err = data.coercive_solve(&data.nu1).unwrap_err();
        assert!(matches!(err, LinearError::NotOrthogonal { index: 1, .. }));
    }
}
