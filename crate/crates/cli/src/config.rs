//! Run configuration: JSON file plus `--param key.path=value` overrides.

use std::path::{Path, PathBuf};

use dimerwave::model::{Material, DEFAULT_MAX_DEGREE};
use dimerwave::solver::SolverConfig;
use dimerwave::symmetry::SymmetryKind;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialBlock,
    pub numerics: SolverConfig,
    pub task: TaskBlock,
    pub output: OutputBlock,
}

/// Either `(m, kappa, beta)` with quadratic forces or explicit force coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialBlock {
    pub m: f64,
    pub kappa: Option<f64>,
    pub beta: f64,
    pub force1: Option<Vec<f64>>,
    pub force2: Option<Vec<f64>>,
    pub max_degree: usize,
}

impl Default for MaterialBlock {
    fn default() -> Self {
        Self { m: 1.0, kappa: None, beta: 1.0, force1: None, force2: None, max_degree: DEFAULT_MAX_DEGREE }
    }
}

impl MaterialBlock {
    /// Builds and validates the material; violations name the failed condition.
    pub fn build(&self) -> Result<Material, CliError> {
        let mat = match (&self.force1, &self.force2) {
            (None, None) => Material::new(self.m, self.kappa.unwrap_or(2.0), self.beta),
            (Some(f1), Some(f2)) => {
                if f2.len() < 2 {
                    return Err(CliError::config("material.force2: needs at least the coefficients of r^0 and r^1"));
                }
                if let Some(k) = self.kappa {
                    if k != f2[1] {
                        return Err(CliError::config(format!(
                            "material.kappa: {k} disagrees with material.force2[1] = {}",
                            f2[1]
                        )));
                    }
                }
                Material::with_forces(self.m, f1.clone(), f2.clone())
            }
            (None, Some(_)) => return Err(CliError::config("material.force1: required when material.force2 is given")),
            (Some(_), None) => return Err(CliError::config("material.force2: required when material.force1 is given")),
        };
        mat.validate_with_degree(self.max_degree)
            .map_err(|r| CliError::config(format!("material: {r}")))?;
        Ok(mat)
    }
}

/// Subcommand inputs; each subcommand reads only the fields it needs.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskBlock {
    pub c: Option<f64>,
    pub k_min: f64,
    pub k_max: Option<f64>,
    /// Number of uniform steps; the dispersion table has `k_intervals + 1` rows.
    pub k_intervals: usize,
    pub c_values: Option<Vec<f64>>,
    pub c_ratios: Vec<f64>,
    pub amplitude: Option<f64>,
    pub amplitudes: Option<Vec<f64>>,
    pub amplitude_count: usize,
    pub eps: Vec<f64>,
    pub alphas: Option<Vec<f64>>,
    pub alpha_count: usize,
    pub derivative_order: u32,
    pub seed: u64,
    pub lattice_samples: usize,
    pub verify_n: usize,
    pub dispersion_samples: usize,
    pub symmetry: Option<SymmetryKind>,
}

impl Default for TaskBlock {
    fn default() -> Self {
        Self {
            c: None,
            k_min: 0.0,
            k_max: None,
            k_intervals: 100,
            c_values: None,
            c_ratios: vec![1.01, 1.1, 1.5, 2.0, 3.0],
            amplitude: None,
            amplitudes: None,
            amplitude_count: 20,
            eps: vec![0.05, 0.1, 0.2],
            alphas: None,
            alpha_count: 8,
            derivative_order: 1,
            seed: 1,
            lattice_samples: 100,
            verify_n: 32,
            dispersion_samples: 1000,
            symmetry: None,
        }
    }
}

impl TaskBlock {
    pub fn speed(&self) -> Result<f64, CliError> {
        let c = self.c.unwrap_or(std::f64::consts::SQRT_2);
        if !c.is_finite() {
            return Err(CliError::config(format!("task.c: must be finite, got {c}")));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Sets `root[a][b]...` from `a.b...=value`; the value is JSON if it parses, else a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--param: expected key=value, got `{assignment}`")))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::config(format!("--param: malformed key path `{path}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::config(format!("--param: `{}` is not an object", keys[..i].join("."))))?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("key path is non-empty")
}

pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("config: cannot read {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("config: {} is not valid JSON: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::config("config: top level must be a JSON object"));
    }
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        CliError::config(format!("config field `{field}`: {}", e.inner()))
    })?;
    config
        .numerics
        .validate()
        .map_err(|e| CliError::config(format!("numerics: {e}")))?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_create_nested_objects() {
        let mut v = json!({"material": {"m": 1.0}});
        apply_override(&mut v, "material.kappa=3").unwrap();
        apply_override(&mut v, "task.symmetry=spring").unwrap();
        apply_override(&mut v, "task.eps=[0.1,0.2]").unwrap();
        assert_eq!(v, json!({"material": {"m": 1.0, "kappa": 3}, "task": {"symmetry": "spring", "eps": [0.1, 0.2]}}));
    }

    #[test]
    fn override_errors_name_the_flag() {
        let mut v = json!({"material": 1});
        assert!(apply_override(&mut v, "novalue").unwrap_err().message.contains("--param"));
        assert!(apply_override(&mut v, "material.m=2").unwrap_err().message.contains("`material`"));
    }

    #[test]
    fn empty_config_is_reference_dimer() {
        let cfg: RunConfig = serde_json::from_value(json!({})).unwrap();
        let mat = cfg.material.build().unwrap();
        assert_eq!((mat.m, mat.kappa), (1.0, 2.0));
        assert_eq!(cfg.task.speed().unwrap(), 2f64.sqrt());
    }
}
