//! Reflection symmetries of mass dimers (`S_M = −R`) and spring dimers
//! (`S_K = −RJ`), where `(Rφ)(x) = φ(−x)` and `J` swaps components.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::LinearData;
use crate::model::Material;
use crate::operator::WaveProblem;
use crate::solver::BranchPoint;
use crate::spectral::{inner_product, l2_norm, PeriodicField};

const CLASSIFY_TOL: f64 = 1e-8;
const FREQUENCY_TOL: f64 = 1e-8;
const ALIGN_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryKind {
    Mass,
    Spring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `Sν₁ = ν₁`.
    Fixed,
    /// `Sν₁ = −ν₁`.
    Anti,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("{kind:?} symmetry requires {requirement}")]
    Mismatch { kind: SymmetryKind, requirement: &'static str },
    #[error("degenerate symmetric combination: norm {norm}")]
    Degenerate { norm: f64 },
    #[error("symmetric basis check failed: {what} = {value}")]
    BasisCheck { what: &'static str, value: f64 },
}

/// `Sφ` for the given kind.
pub fn apply_symmetry(kind: SymmetryKind, phi: &PeriodicField) -> PeriodicField {
    match kind {
        SymmetryKind::Mass => phi.reflect().scale(-1.0),
        SymmetryKind::Spring => phi.reflect().swap_components().scale(-1.0),
    }
}

/// Mass kind needs identical springs (`κ = 1`, `V₁ = V₂`); spring kind needs `w = 1`.
pub fn check_material(kind: SymmetryKind, mat: &Material) -> Result<(), SymmetryError> {
    match kind {
        SymmetryKind::Mass => {
            let n = mat.force1.coeffs.len().max(mat.force2.coeffs.len());
            let same = (0..n).all(|i| mat.force1.coeff(i) == mat.force2.coeff(i));
            if mat.kappa != 1.0 || !same {
                return Err(SymmetryError::Mismatch { kind, requirement: "kappa = 1 and identical spring forces" });
            }
        }
        SymmetryKind::Spring => {
            if mat.w != 1.0 {
                return Err(SymmetryError::Mismatch { kind, requirement: "w = 1" });
            }
        }
    }
    Ok(())
}

/// Defects of `Φ` and `G_c` under `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub operator_defect: f64,
    pub energy_defect: f64,
}

pub fn check_invariance(
    kind: SymmetryKind,
    problem: &WaveProblem,
    phi: &PeriodicField,
    omega: f64,
) -> Result<InvarianceReport, SymmetryError> {
    check_material(kind, &problem.material)?;
    let s_phi = apply_symmetry(kind, phi);
    let lhs = problem.phi(&s_phi, omega);
    let rhs = apply_symmetry(kind, &problem.phi(phi, omega));
    Ok(InvarianceReport {
        operator_defect: l2_norm(&(&lhs - &rhs)),
        energy_defect: (problem.energy(&s_phi, omega).total - problem.energy(phi, omega).total).abs(),
    })
}

/// Orthonormal basis of `span(ν₁, ν₂)` with `Sν₊ = ν₊`, `Sν₋ = −ν₋`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricBasis {
    pub kind: SymmetryKind,
    pub classification: Classification,
    /// Spring kind only: the case predicted from `ω_c` modulo `π`.
    pub predicted: Option<Classification>,
    pub nu_plus: PeriodicField,
    pub nu_minus: PeriodicField,
    pub transversality_plus: f64,
}

fn frequency_prediction(omega_c: f64) -> Classification {
    let j = (omega_c / std::f64::consts::PI).round();
    if (omega_c - j * std::f64::consts::PI).abs() >= FREQUENCY_TOL {
        Classification::Generic
    } else if (j as i64).rem_euclid(2) == 0 {
        Classification::Fixed
    } else {
        Classification::Anti
    }
}

pub fn symmetric_basis(kind: SymmetryKind, data: &LinearData) -> Result<SymmetricBasis, SymmetryError> {
    check_material(kind, &data.material)?;
    let (nu1, nu2) = (&data.nu1, &data.nu2);
    let s1 = apply_symmetry(kind, nu1);
    let classification = if l2_norm(&(&s1 - nu1)) < CLASSIFY_TOL {
        Classification::Fixed
    } else if l2_norm(&(&s1 + nu1)) < CLASSIFY_TOL {
        Classification::Anti
    } else {
        Classification::Generic
    };
    let (nu_plus, nu_minus) = match classification {
        Classification::Fixed => (nu1.clone(), nu2.clone()),
        Classification::Anti => (nu2.clone(), nu1.clone()),
        Classification::Generic => {
            let plus = nu1 + &s1;
            let minus = nu2 - &apply_symmetry(kind, nu2);
            let (np, nm) = (l2_norm(&plus), l2_norm(&minus));
            if np < 1e-10 || nm < 1e-10 {
                return Err(SymmetryError::Degenerate { norm: np.min(nm) });
            }
            (plus.scale(1.0 / np), minus.scale(1.0 / nm))
        }
    };
    let checks = [
        ("|S nu+ - nu+|", l2_norm(&(&apply_symmetry(kind, &nu_plus) - &nu_plus))),
        ("|S nu- + nu-|", l2_norm(&(&apply_symmetry(kind, &nu_minus) + &nu_minus))),
        ("<nu+, nu->", inner_product(&nu_plus, &nu_minus).abs()),
    ];
    for (what, value) in checks {
        if value >= 1e-12 {
            return Err(SymmetryError::BasisCheck { what, value });
        }
    }
    let lp = data.apply_l_prime(&nu_plus).expect("kernel symbols are Hermitian");
    let transversality_plus = inner_product(&lp, &nu_plus);
    let t = data.transversality;
    if (transversality_plus - t).abs() >= 1e-10 * t.abs().max(1.0) {
        return Err(SymmetryError::BasisCheck { what: "<L' nu+, nu+> - <L' nu1, nu1>", value: transversality_plus - t });
    }
    Ok(SymmetricBasis {
        kind,
        classification,
        predicted: (kind == SymmetryKind::Spring).then(|| frequency_prediction(data.omega_c)),
        nu_plus,
        nu_minus,
        transversality_plus,
    })
}

/// Minimal `‖S(S^θφ) − S^θφ‖` over shifts `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignedDefect {
    pub theta: f64,
    pub defect: f64,
}

pub fn phase_aligned_defect(kind: SymmetryKind, phi: &PeriodicField) -> AlignedDefect {
    let defect = |theta: f64| {
        let shifted = phi.shift(theta);
        l2_norm(&(&apply_symmetry(kind, &shifted) - &shifted))
    };
    let step = 2.0 * std::f64::consts::PI / ALIGN_GRID as f64;
    let best = (0..ALIGN_GRID)
        .map(|i| (i, defect(i as f64 * step)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (defect(x1), defect(x2));
    while hi - lo > 1e-14 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = defect(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = defect(x2);
        }
    }
    let candidates = [(x1, f1), (x2, f2), (best as f64 * step, defect(best as f64 * step))];
    let (theta, value) = candidates.into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
    AlignedDefect { theta: theta.rem_euclid(2.0 * std::f64::consts::PI), defect: value }
}

/// Phase-aligned symmetry defect of a solved point.
pub fn check_solution_symmetry(
    kind: SymmetryKind,
    data: &LinearData,
    point: &BranchPoint,
) -> Result<AlignedDefect, SymmetryError> {
    check_material(kind, &data.material)?;
    Ok(phase_aligned_defect(kind, &point.profile(data)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn involution_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = PeriodicField::random(&mut rng, 8, 8, 1.0);
        for kind in [SymmetryKind::Mass, SymmetryKind::Spring] {
            assert_eq!(apply_symmetry(kind, &apply_symmetry(kind, &f)), f);
        }
    }

    #[test]
    fn general_dimer_is_rejected() {
        let mat = Material::new(0.5, 2.0, 1.0);
        assert!(check_material(SymmetryKind::Mass, &mat).is_err());
        assert!(check_material(SymmetryKind::Spring, &mat).is_err());
    }

    #[test]
    fn mass_dimer_kernel_is_anti_symmetric() {
        let data = LinearData::new(&Material::new(0.5, 1.0, 1.0), 2f64.sqrt(), 8).unwrap();
        let basis = symmetric_basis(SymmetryKind::Mass, &data).unwrap();
        assert_eq!(basis.classification, Classification::Anti);
        assert_eq!(basis.nu_plus, data.nu2);
    }

    #[test]
    fn frequency_prediction_cases() {
        use std::f64::consts::PI;
        assert_eq!(frequency_prediction(2.0 * PI), Classification::Fixed);
        assert_eq!(frequency_prediction(3.0 * PI + 1e-10), Classification::Anti);
        assert_eq!(frequency_prediction(1.4), Classification::Generic);
    }
}
