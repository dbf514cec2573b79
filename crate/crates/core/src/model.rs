//! Dimer material data and polynomial spring forces.
//!
//! Odd-indexed particles have mass 1 and even-indexed particles mass `m`.
//! The spring to the right of an odd particle has force `V1'`, the spring to
//! the right of an even particle has force `V2'`.

use serde::{Deserialize, Serialize};

/// Default maximum polynomial degree accepted for a spring force.
pub const DEFAULT_MAX_DEGREE: usize = 3;

/// Which of the two alternating springs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spring {
    First,
    Second,
}

/// Real polynomial stored by ascending powers: `coeffs[i]` multiplies `r^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Degree ignoring trailing zeros; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial { coeffs }
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Polynomial { coeffs }
    }
}

/// Lattice parameters of a dimer FPUT chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub m: f64,
    pub w: f64,
    pub kappa: f64,
    pub force1: Polynomial,
    pub force2: Polynomial,
}

/// One failed standing hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub detail: String,
}

/// All failed hypotheses of a material; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} ({})", v.condition, v.detail)?;
        }
        Ok(())
    }
}

impl Material {
    /// Quadratic default forces `V1' = r + r^2`, `V2' = kappa r + beta r^2`.
    pub fn new(m: f64, kappa: f64, beta: f64) -> Self {
        Self {
            m,
            w: 1.0 / m,
            kappa,
            force1: Polynomial::new(vec![0.0, 1.0, 1.0]),
            force2: Polynomial::new(vec![0.0, kappa, beta]),
        }
    }

    /// Material with explicit force polynomials; `kappa` is read off `force2`.
    pub fn with_forces(m: f64, force1: Vec<f64>, force2: Vec<f64>) -> Self {
        let force2 = Polynomial::new(force2);
        Self {
            m,
            w: 1.0 / m,
            kappa: force2.coeff(1),
            force1: Polynomial::new(force1),
            force2,
        }
    }

    pub fn polynomial(&self, which: Spring) -> &Polynomial {
        match which {
            Spring::First => &self.force1,
            Spring::Second => &self.force2,
        }
    }

    /// Largest degree among the two force polynomials.
    pub fn max_degree(&self) -> usize {
        self.force1.degree().max(self.force2.degree()).max(1)
    }

    pub fn validate(&self) -> Result<(), ViolationReport> {
        self.validate_with_degree(DEFAULT_MAX_DEGREE)
    }

    pub fn validate_with_degree(&self, max_degree: usize) -> Result<(), ViolationReport> {
        let mut report = ViolationReport::default();
        let mut push = |condition: &str, detail: String| {
            report.violations.push(Violation {
                condition: condition.to_string(),
                detail,
            })
        };
        let all_finite = [self.m, self.w, self.kappa]
            .iter()
            .chain(self.force1.coeffs.iter())
            .chain(self.force2.coeffs.iter())
            .all(|x| x.is_finite());
        if !all_finite {
            push("all coefficients finite", "non-finite value present".into());
        }
        if !(self.m > 0.0) {
            push("m > 0", format!("m = {}", self.m));
        }
        if !(self.kappa > 0.0) {
            push("kappa > 0", format!("kappa = {}", self.kappa));
        }
        if (self.w * self.m - 1.0).abs() > 1e-14 {
            push("w = 1/m", format!("w = {}, m = {}", self.w, self.m));
        }
        if !(self.w > 1.0 || self.kappa > 1.0) {
            push(
                "w>1 or kappa>1 fails",
                format!("w = {}, kappa = {}", self.w, self.kappa),
            );
        }
        if self.force1.coeff(0) != 0.0 || self.force2.coeff(0) != 0.0 {
            push("force(0) = 0", "constant coefficient must vanish".into());
        }
        if self.force1.coeff(1) != 1.0 {
            push(
                "force1 linear coefficient equals 1",
                format!("got {}", self.force1.coeff(1)),
            );
        }
        if self.force2.coeff(1) != self.kappa {
            push(
                "force2 linear coefficient equals kappa",
                format!("got {}, kappa = {}", self.force2.coeff(1), self.kappa),
            );
        }
        for (name, p) in [("force1", &self.force1), ("force2", &self.force2)] {
            if p.degree() > max_degree {
                push(
                    "polynomial degree within maximum",
                    format!("{name} has degree {} > {max_degree}", p.degree()),
                );
            }
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(report)
        }
    }

    /// `V_j'(r)`.
    pub fn force(&self, which: Spring, r: f64) -> f64 {
        self.polynomial(which).eval(r)
    }

    /// `V_j^{(order+1)}(r)` for `order` in 1..=2.
    pub fn force_deriv(&self, which: Spring, order: usize, r: f64) -> f64 {
        let mut p = self.polynomial(which).clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p.eval(r)
    }

    /// `V_j(r)` with `V_j(0) = 0`.
    pub fn potential(&self, which: Spring, r: f64) -> f64 {
        self.polynomial(which).antiderivative().eval(r)
    }

    /// Mass of particle `j`.
    pub fn mass(&self, j: i64) -> f64 {
        if j.rem_euclid(2) == 1 {
            1.0
        } else {
            self.m
        }
    }

    /// Spring between particles `j` and `j+1`.
    pub fn spring_after(j: i64) -> Spring {
        if j.rem_euclid(2) == 1 {
            Spring::First
        } else {
            Spring::Second
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(Material::new(1.0, 2.0, 1.0).validate().is_ok());
        let err = Material::new(1.0, 1.0, 1.0).validate().unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].condition, "w>1 or kappa>1 fails");
        assert!(Material::new(0.5, 1.0, 0.0).validate().is_ok());
    }

    #[test]
    fn validate_reports_each_condition() {
        let mut mat = Material::with_forces(1.0, vec![0.0, 2.0, 0.0, 0.0, 1.0], vec![0.0, 1.0]);
        mat.kappa = 1.0;
        let err = mat.validate().unwrap_err();
        let names: Vec<_> = err.violations.iter().map(|v| v.condition.as_str()).collect();
        assert!(names.contains(&"w>1 or kappa>1 fails"));
        assert!(names.contains(&"force1 linear coefficient equals 1"));
        assert!(names.contains(&"polynomial degree within maximum"));
    }

    #[test]
    fn force_examples() {
        let mat = Material::new(1.0, 2.0, 1.0);
        assert_eq!(mat.force(Spring::First, 0.0), 0.0);
        assert!((mat.force(Spring::First, 0.1) - 0.11).abs() < 1e-15);
        assert_eq!(mat.force_deriv(Spring::Second, 1, 0.0), 2.0);
        assert_eq!(mat.force_deriv(Spring::Second, 2, 0.3), 2.0);
        assert!((mat.potential(Spring::First, 0.3) - (0.045 + 0.009)).abs() < 1e-15);
    }

    #[test]
    fn lattice_indexing() {
        let mat = Material::new(0.5, 1.0, 1.0);
        assert_eq!(mat.mass(1), 1.0);
        assert_eq!(mat.mass(-1), 1.0);
        assert_eq!(mat.mass(2), 0.5);
        assert_eq!(Material::spring_after(-3), Spring::First);
        assert_eq!(Material::spring_after(0), Spring::Second);
    }
}
