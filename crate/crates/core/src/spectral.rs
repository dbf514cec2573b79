//! Two-component real 2π-periodic fields stored as truncated Fourier
//! coefficients, and the Fourier multipliers acting on them.
//!
//! Coefficients are synthesis coefficients, `f(x) = Σ_k f̂(k) e^{ikx}`, and
//! only modes `0..=N` are stored; negative modes are the conjugates. The
//! inner product is `⟨f, g⟩ = Σ_k f̂(k)·conj ĝ(k)` over both components,
//! which equals the mean of `f·g` over one period.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Pair = [Complex64; 2];

const ZERO_PAIR: Pair = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("symbol breaks Hermitian symmetry at mode {mode}")]
    HermitianViolation { mode: i64 },
    #[error("grid size {grid} too small for exact dealiasing: need at least {required}")]
    GridTooSmall { grid: usize, required: usize },
    #[error("mode records must list k = 0..=N in order; found k = {found} at position {position}")]
    BadRecords { position: usize, found: i64 },
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn zero() -> Self {
        Mat2::real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2::new(a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), d)
    }

    pub fn scalar(s: Complex64) -> Self {
        Mat2::diag(s, s)
    }

    pub fn apply(&self, v: &Pair) -> Pair {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn matmul(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, orow) in out.iter_mut().zip(other.0.iter()) {
            for (x, y) in row.iter_mut().zip(orow.iter()) {
                *x += *y;
            }
        }
        Mat2(out)
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = self.0;
        for x in out.iter_mut().flatten() {
            *x *= s;
        }
        Mat2(out)
    }

    pub fn conj(&self) -> Mat2 {
        let mut out = self.0;
        for x in out.iter_mut().flatten() {
            *x = x.conj();
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Inverse, or `None` when the determinant vanishes relative to the entries.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() <= 1e-300 || d.norm() <= f64::EPSILON * self.max_abs().powi(2) {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(d.inv()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Two-component real periodic field truncated at modes `|k| ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    coeffs: Vec<Pair>,
}

/// Serialized form of one nonnegative mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub k: i64,
    pub re1: f64,
    pub im1: f64,
    pub re2: f64,
    pub im2: f64,
}

impl PeriodicField {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![ZERO_PAIR; n + 1],
        }
    }

    /// Constant field `(c1, c2)`.
    pub fn constant(n: usize, c1: f64, c2: f64) -> Self {
        let mut f = Self::zeros(n);
        f.coeffs[0] = [c1.into(), c2.into()];
        f
    }

    /// Field with a single mode pair `±k` (coefficient `v` at `+k`).
    pub fn single_mode(n: usize, k: usize, v: Pair) -> Self {
        let mut f = Self::zeros(n);
        f.set_mode(k, v);
        f
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient at any integer mode; conjugated for `k < 0`, zero beyond `N`.
    pub fn mode(&self, k: i64) -> Pair {
        match self.coeffs.get(k.unsigned_abs() as usize) {
            None => ZERO_PAIR,
            Some(v) if k >= 0 => *v,
            Some(v) => [v[0].conj(), v[1].conj()],
        }
    }

    /// Sets mode `k ≥ 0` (and implicitly `−k`). Mode 0 keeps only real parts.
    pub fn set_mode(&mut self, k: usize, v: Pair) {
        self.coeffs[k] = if k == 0 { [v[0].re.into(), v[1].re.into()] } else { v };
    }

    pub fn coeffs(&self) -> &[Pair] {
        &self.coeffs
    }

    /// Copy at truncation `n`, zero-padding or cutting higher modes.
    pub fn resized(&self, n: usize) -> Self {
        let mut f = Self::zeros(n);
        for (k, v) in self.coeffs.iter().enumerate().take(n + 1) {
            f.coeffs[k] = *v;
        }
        f
    }

    /// Largest imaginary part carried by mode 0; zero for a real field.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs[0][0].im.abs().max(self.coeffs[0][1].im.abs())
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, &Pair) -> Pair) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, v)| f(k as i64, v))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, v| [v[0] * s, v[1] * s])
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &PeriodicField) -> Self {
        let n = self.truncation().max(other.truncation());
        let mut out = Self::zeros(n);
        for k in 0..=n {
            let (a, b) = (self.mode(k as i64), other.mode(k as i64));
            out.coeffs[k] = [a[0] + b[0] * s, a[1] + b[1] * s];
        }
        out
    }

    /// Swaps the two components.
    pub fn swap_components(&self) -> Self {
        self.map_modes(|_, v| [v[1], v[0]])
    }

    /// Reflection `x ↦ −x`: mode `k` takes the value of mode `−k`.
    pub fn reflect(&self) -> Self {
        self.map_modes(|_, v| [v[0].conj(), v[1].conj()])
    }

    /// Multiplies mode `k` by `e^{ikθ}`, i.e. `f(x) ↦ f(x + θ)`.
    pub fn shift(&self, theta: f64) -> Self {
        self.map_modes(|k, v| {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            [v[0] * e, v[1] * e]
        })
    }

    /// Multiplies mode `k` by `(ik)^order`.
    pub fn derivative(&self, order: u32) -> Self {
        self.map_modes(|k, v| {
            let e = Complex64::new(0.0, k as f64).powu(order);
            [v[0] * e, v[1] * e]
        })
    }

    /// Mode-wise `f̂(k) ← M̃(k) f̂(k)`; checks `M̃(−k) = conj M̃(k)` at every stored mode.
    pub fn apply_symbol(&self, symbol: impl Fn(i64) -> Mat2) -> Result<Self, SpectralError> {
        let mut out = Self::zeros(self.truncation());
        for (k, v) in self.coeffs.iter().enumerate() {
            let kk = k as i64;
            let m = symbol(kk);
            let mirror = if k == 0 { m } else { symbol(-kk) };
            let tol = 1e-12 * (1.0 + m.max_abs());
            if mirror.conj().max_diff(&m) > tol {
                return Err(SpectralError::HermitianViolation { mode: kk });
            }
            out.coeffs[k] = m.apply(v);
        }
        if out.hermitian_defect() > 1e-12 * (1.0 + self.coeffs[0][0].norm() + self.coeffs[0][1].norm()) {
            return Err(SpectralError::HermitianViolation { mode: 0 });
        }
        out.coeffs[0] = [out.coeffs[0][0].re.into(), out.coeffs[0][1].re.into()];
        Ok(out)
    }

    /// Pointwise value at `x` by direct synthesis.
    pub fn eval_at(&self, x: f64) -> [f64; 2] {
        self.eval_derivative_at(x, 0)
    }

    /// Value of the `order`-th derivative at `x` by direct synthesis.
    pub fn eval_derivative_at(&self, x: f64, order: u32) -> [f64; 2] {
        let mut out = [self.coeffs[0][0].re, self.coeffs[0][1].re];
        if order > 0 {
            out = [0.0, 0.0];
        }
        for (k, v) in self.coeffs.iter().enumerate().skip(1) {
            let e = Complex64::new(0.0, k as f64).powu(order) * Complex64::from_polar(1.0, k as f64 * x);
            out[0] += 2.0 * (v[0] * e).re;
            out[1] += 2.0 * (v[1] * e).re;
        }
        out
    }

    pub fn to_records(&self) -> Vec<ModeRecord> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, v)| ModeRecord {
                k: k as i64,
                re1: v[0].re,
                im1: v[0].im,
                re2: v[1].re,
                im2: v[1].im,
            })
            .collect()
    }

    pub fn from_records(records: &[ModeRecord]) -> Result<Self, SpectralError> {
        if records.is_empty() {
            return Err(SpectralError::BadRecords { position: 0, found: -1 });
        }
        let mut f = Self::zeros(records.len() - 1);
        for (i, r) in records.iter().enumerate() {
            if r.k != i as i64 {
                return Err(SpectralError::BadRecords { position: i, found: r.k });
            }
            f.set_mode(i, [Complex64::new(r.re1, r.im1), Complex64::new(r.re2, r.im2)]);
        }
        Ok(f)
    }

    /// Random real field with modes up to `band`, coefficients decaying like `(1+k²)^{-1}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, band: usize, amplitude: f64) -> Self {
        let mut f = Self::zeros(n);
        for k in 0..=band.min(n) {
            let weight = amplitude / (1.0 + (k * k) as f64);
            let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * weight;
            let v = [draw(), draw()];
            f.set_mode(k, v);
        }
        f
    }
}

impl Serialize for PeriodicField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PeriodicField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<ModeRecord>::deserialize(deserializer)?;
        PeriodicField::from_records(&records).map_err(serde::de::Error::custom)
    }
}

impl Add for &PeriodicField {
    type Output = PeriodicField;
    fn add(self, rhs: &PeriodicField) -> PeriodicField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &PeriodicField {
    type Output = PeriodicField;
    fn sub(self, rhs: &PeriodicField) -> PeriodicField {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &PeriodicField {
    type Output = PeriodicField;
    fn neg(self) -> PeriodicField {
        self.scale(-1.0)
    }
}

impl Mul<&PeriodicField> for f64 {
    type Output = PeriodicField;
    fn mul(self, rhs: &PeriodicField) -> PeriodicField {
        rhs.scale(self)
    }
}

/// `Σ_k f̂(k)·conj ĝ(k)` over `|k| ≤ N` and both components; shorter fields are zero-padded.
pub fn inner_product(f: &PeriodicField, g: &PeriodicField) -> f64 {
    let n = f.truncation().min(g.truncation());
    let mut sum = 0.0;
    for k in 0..=n {
        let (a, b) = (f.coeffs[k], g.coeffs[k]);
        let term = (a[0] * b[0].conj() + a[1] * b[1].conj()).re;
        sum += if k == 0 { term } else { 2.0 * term };
    }
    sum
}

/// `(Σ_k (1+k²)^r |f̂(k)|²)^{1/2}`.
pub fn sobolev_norm(f: &PeriodicField, r: f64) -> f64 {
    let mut sum = 0.0;
    for (k, v) in f.coeffs.iter().enumerate() {
        let weight = (1.0 + (k * k) as f64).powf(r);
        let term = weight * (v[0].norm_sqr() + v[1].norm_sqr());
        sum += if k == 0 { term } else { 2.0 * term };
    }
    sum.sqrt()
}

pub fn l2_norm(f: &PeriodicField) -> f64 {
    sobolev_norm(f, 0.0)
}

/// Uniform grid on `[0, 2π)` with cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("size", &self.size).finish()
    }
}

impl Grid {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    /// Smallest grid giving exact products of `degree` factors at truncation `n`.
    pub fn required_size(n: usize, degree: usize) -> usize {
        (degree + 1) * n + 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size).map(|j| 2.0 * PI * j as f64 / self.size as f64).collect()
    }

    /// Samples of both components. Requires `size > 2N`.
    pub fn to_samples(&self, f: &PeriodicField) -> [Vec<f64>; 2] {
        let g = self.size;
        let n = f.truncation();
        assert!(g > 2 * n, "grid of size {g} cannot represent truncation {n}");
        let i = Complex64::new(0.0, 1.0);
        let mut buf = vec![Complex64::new(0.0, 0.0); g];
        buf[0] = f.coeffs[0][0] + i * f.coeffs[0][1];
        for k in 1..=n {
            let v = f.coeffs[k];
            buf[k] = v[0] + i * v[1];
            buf[g - k] = v[0].conj() + i * v[1].conj();
        }
        self.inverse.process(&mut buf);
        [buf.iter().map(|z| z.re).collect(), buf.iter().map(|z| z.im).collect()]
    }

    /// Interpolating coefficients truncated at `n` (aliased modes fold in).
    pub fn from_samples(&self, samples: &[Vec<f64>; 2], n: usize) -> PeriodicField {
        let g = self.size;
        assert!(g > 2 * n, "grid of size {g} cannot represent truncation {n}");
        let mut buf: Vec<Complex64> = samples[0]
            .iter()
            .zip(samples[1].iter())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / g as f64;
        let i = Complex64::new(0.0, 1.0);
        let mut f = PeriodicField::zeros(n);
        for k in 0..=n {
            let z = buf[k] * scale;
            let zm = buf[(g - k) % g].conj() * scale;
            f.set_mode(k, [(z + zm) * 0.5, (z - zm) / (2.0 * i)]);
        }
        f
    }

    /// Field whose samples are `map(component, value)` of `f`'s samples, truncated to `N`.
    pub fn apply_pointwise(
        &self,
        f: &PeriodicField,
        degree: usize,
        map: impl Fn(usize, f64) -> f64,
    ) -> Result<PeriodicField, SpectralError> {
        let n = f.truncation();
        let required = Self::required_size(n, degree);
        if self.size < required {
            return Err(SpectralError::GridTooSmall { grid: self.size, required });
        }
        let [s1, s2] = self.to_samples(f);
        let mapped = [
            s1.into_iter().map(|x| map(0, x)).collect(),
            s2.into_iter().map(|x| map(1, x)).collect(),
        ];
        Ok(self.from_samples(&mapped, n))
    }

    /// Mean of `f_1 g_1 + f_2 g_2` over the grid.
    pub fn quadrature_inner(&self, f: &PeriodicField, g: &PeriodicField) -> f64 {
        let (a, b) = (self.to_samples(f), self.to_samples(g));
        let mut sum = 0.0;
        for c in 0..2 {
            sum += a[c].iter().zip(b[c].iter()).map(|(x, y)| x * y).sum::<f64>();
        }
        sum / self.size as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cos_x(n: usize) -> PeriodicField {
        PeriodicField::single_mode(n, 1, [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)])
    }

    #[test]
    fn inner_product_examples() {
        let f = cos_x(8);
        assert_eq!(inner_product(&PeriodicField::zeros(8), &f), 0.0);
        assert!((inner_product(&f, &f) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sobolev_examples() {
        let c = PeriodicField::constant(4, 3.0, 4.0);
        for r in [0.0, 1.0, 2.5] {
            assert!((sobolev_norm(&c, r) - 5.0).abs() < 1e-14);
        }
        assert!((sobolev_norm(&cos_x(8), 2.0) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_padding_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = PeriodicField::random(&mut rng, 6, 6, 1.0);
        let g = PeriodicField::random(&mut rng, 10, 10, 1.0);
        let direct = inner_product(&f.resized(10), &g);
        assert!((inner_product(&f, &g) - direct).abs() < 1e-15);
    }

    #[test]
    fn square_of_cosine() {
        let grid = Grid::new(32);
        let f = cos_x(8).axpy(1.0, &PeriodicField::single_mode(8, 1, [0.0.into(), Complex64::new(0.5, 0.0)]));
        let sq = grid
            .apply_pointwise(&f, 2, |c, x| if c == 0 { x * x } else { x })
            .unwrap();
        assert!((sq.mode(0)[0].re - 0.5).abs() < 1e-15);
        assert!((sq.mode(2)[0] - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert!((sq.mode(1)[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn grid_too_small_is_rejected() {
        let grid = Grid::new(20);
        let err = grid.apply_pointwise(&cos_x(8), 2, |_, x| x).unwrap_err();
        assert_eq!(err, SpectralError::GridTooSmall { grid: 20, required: 25 });
    }

    #[test]
    fn non_hermitian_symbol_is_named() {
        let f = cos_x(4);
        let err = f
            .apply_symbol(|k| if k == 3 { Mat2::scalar(Complex64::new(0.0, 1.0)) } else { Mat2::identity() })
            .unwrap_err();
        assert_eq!(err, SpectralError::HermitianViolation { mode: 3 });
    }

    #[test]
    fn records_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = PeriodicField::random(&mut rng, 5, 5, 1.0);
        let json = serde_json::to_string(&f).unwrap();
        let back: PeriodicField = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn direct_synthesis_matches_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PeriodicField::random(&mut rng, 7, 7, 1.0);
        let grid = Grid::new(24);
        let s = grid.to_samples(&f);
        for (j, x) in grid.points().into_iter().enumerate() {
            let v = f.eval_at(x);
            assert!((v[0] - s[0][j]).abs() < 1e-13 && (v[1] - s[1][j]).abs() < 1e-13);
        }
    }

    #[test]
    fn mat2_inverse() {
        let a = Mat2::new(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, 0.0),
        );
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).max_diff(&Mat2::identity()) < 1e-15);
        assert!(Mat2::real(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }
}
