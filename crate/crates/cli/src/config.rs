//! Run configuration: a JSON document, overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use qcurrent::current::TestFunction;
use qcurrent::fock::dense::{DENSE_MAX_DIM, DENSE_MAX_PARTICLES};
use qcurrent::irreps::{Spin, DEFAULT_DIM_CAP};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Size of the space used by the dense tensor cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenseDims {
    pub radial_order: usize,
    pub angular_order: usize,
    pub degree: usize,
    pub particles: usize,
    pub states: usize,
    pub max_norm: f64,
}

impl Default for DenseDims {
    fn default() -> Self {
        // 2 nodes × 4 coefficients = dimension 8
        Self {
            radial_order: 1,
            angular_order: 2,
            degree: 3,
            particles: 4,
            states: 6,
            max_norm: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub commutator: f64,
    pub slope_target: f64,
    pub slope: f64,
    pub cocycle: f64,
    pub homomorphism: f64,
    pub unitary: f64,
    pub quadrature: f64,
    pub nu_norm: f64,
    pub isometry: f64,
    pub group_compatibility: f64,
    pub pi_richardson: f64,
    pub theta_linearity: f64,
    pub raising: f64,
    pub vacuum_component: f64,
    pub node_values: f64,
    pub cartan_one_particle: f64,
    pub weight_scaling: f64,
    pub dense_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            commutator: 1e-10,
            slope_target: 2.0,
            slope: 0.1,
            cocycle: 1e-9,
            homomorphism: 1e-6,
            unitary: 1e-8,
            quadrature: 1e-12,
            nu_norm: 1e-10,
            isometry: 1e-9,
            group_compatibility: 1e-9,
            pi_richardson: 1e-8,
            theta_linearity: 1e-9,
            raising: 1e-10,
            vacuum_component: 1e-12,
            node_values: 1e-12,
            cartan_one_particle: 1e-10,
            weight_scaling: 1e-12,
            dense_slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub q_values: Vec<f64>,
    pub spin_max: Spin,
    pub dim_cap: usize,
    pub bergman_degree: usize,
    /// Bergman truncation used by the Fock-space and direct-integral checks.
    pub rep_degree: usize,
    /// Truncation for the finite-difference generator checks, whose error
    /// grows with the degree.
    pub theta_degree: usize,
    pub radial_order: usize,
    pub angular_order: usize,
    pub fd_step: f64,
    pub samples: usize,
    pub max_expansion_ratio: f64,
    /// Largest `s` in the boosts `a = cosh s`, `c = sinh s` drawn for the
    /// pseudo-unitarity check.
    pub unitary_max_rapidity: f64,
    pub coherent_samples: usize,
    pub dense_check_dims: DenseDims,
    pub test_functions: Vec<TestFunction>,
    pub weight_scale: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q_values: vec![0.5, 0.9, 1.1, 2.0],
            spin_max: Spin::from_twice(16),
            dim_cap: DEFAULT_DIM_CAP,
            bergman_degree: 64,
            rep_degree: 32,
            theta_degree: 8,
            radial_order: 6,
            angular_order: 8,
            fd_step: 1e-3,
            samples: 100,
            max_expansion_ratio: 0.3,
            unitary_max_rapidity: 0.2,
            coherent_samples: 20,
            dense_check_dims: DenseDims::default(),
            test_functions: vec![
                TestFunction::constant(1.0),
                TestFunction::GaussianBump {
                    amplitude: 1.2,
                    width: 0.5,
                },
            ],
            weight_scale: 2.0,
            tolerances: Tolerances::default(),
            seed: 20240531,
            out_dir: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.q_values.is_empty() {
            return bad("q_values must list at least one deformation parameter".into());
        }
        if let Some(q) = self.q_values.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
            return bad(format!("q must be finite and positive, got {q}"));
        }
        if self.spin_max.dim() > self.dim_cap {
            return bad(format!(
                "spin_max {} has dimension {}, above dim_cap {}; lower --spin-max or raise dim_cap",
                self.spin_max,
                self.spin_max.dim(),
                self.dim_cap
            ));
        }
        if !(4..=256).contains(&self.bergman_degree) {
            return bad(format!("bergman_degree must be in 4..=256, got {}", self.bergman_degree));
        }
        if !(2..=64).contains(&self.rep_degree) {
            return bad(format!("rep_degree must be in 2..=64, got {}", self.rep_degree));
        }
        if !(1..=64).contains(&self.theta_degree) {
            return bad(format!("theta_degree must be in 1..=64, got {}", self.theta_degree));
        }
        if !(self.unitary_max_rapidity > 0.0 && self.unitary_max_rapidity < 3.0) {
            return bad(format!(
                "unitary_max_rapidity must be in (0, 3), got {}",
                self.unitary_max_rapidity
            ));
        }
        if !(1..=128).contains(&self.radial_order) || !(1..=256).contains(&self.angular_order) {
            return bad(format!(
                "mesh orders must be in 1..=128 (radial) and 1..=256 (angular), got {}x{}",
                self.radial_order, self.angular_order
            ));
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 0.1) {
            return bad(format!("fd_step must be in (0, 0.1], got {}", self.fd_step));
        }
        if self.samples == 0 || self.samples > 100_000 {
            return bad(format!("samples must be in 1..=100000, got {}", self.samples));
        }
        if self.coherent_samples == 0 || self.coherent_samples > 10_000 {
            return bad(format!("coherent_samples must be in 1..=10000, got {}", self.coherent_samples));
        }
        if !(self.max_expansion_ratio > 0.0 && self.max_expansion_ratio < 1.0) {
            return bad(format!(
                "max_expansion_ratio must be in (0, 1), got {}",
                self.max_expansion_ratio
            ));
        }
        let d = &self.dense_check_dims;
        let dim = d.radial_order * d.angular_order * (d.degree + 1);
        if d.radial_order == 0 || d.angular_order == 0 || dim > DENSE_MAX_DIM || d.particles > DENSE_MAX_PARTICLES {
            return bad(format!(
                "dense_check_dims give dimension {dim} with {} particles; limits are {DENSE_MAX_DIM} and {DENSE_MAX_PARTICLES}",
                d.particles
            ));
        }
        if d.states == 0 || !(d.max_norm >= 0.0 && d.max_norm.is_finite()) {
            return bad("dense_check_dims needs at least one state and a finite max_norm".into());
        }
        if self.test_functions.is_empty() {
            return bad("test_functions must list at least one preset".into());
        }
        for tf in &self.test_functions {
            match tf {
                TestFunction::Constant { value } if !value.is_finite() => {
                    return bad(format!("constant test function must be finite, got {value}"))
                }
                TestFunction::GaussianBump { amplitude, width } if !(amplitude.is_finite() && *width > 0.0) => {
                    return bad(format!("gaussian bump needs finite amplitude and positive width, got {amplitude}, {width}"))
                }
                TestFunction::Sampled { values } if values.len() != self.radial_order * self.angular_order => {
                    return bad(format!(
                        "sampled test function has {} values for a {}x{} mesh",
                        values.len(),
                        self.radial_order,
                        self.angular_order
                    ))
                }
                _ => {}
            }
        }
        if !(self.weight_scale > 0.0 && self.weight_scale.is_finite()) {
            return bad(format!("weight_scale must be positive, got {}", self.weight_scale));
        }
        let t = &self.tolerances;
        let all = [
            t.commutator,
            t.slope,
            t.cocycle,
            t.homomorphism,
            t.unitary,
            t.quadrature,
            t.nu_norm,
            t.isometry,
            t.group_compatibility,
            t.pi_richardson,
            t.theta_linearity,
            t.raising,
            t.vacuum_component,
            t.node_values,
            t.cartan_one_particle,
            t.weight_scaling,
            t.dense_slack,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || !t.slope_target.is_finite() {
            return bad("tolerances must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// Parses `3`, `1.5` or `3/2`.
pub fn parse_spin(s: &str) -> Result<Spin, String> {
    let value = match s.split_once('/') {
        Some((num, "2")) => num.trim().parse::<u32>().map_err(|e| e.to_string())? as f64 / 2.0,
        Some(_) => return Err(format!("spin {s} must be an integer, a half-integer or n/2")),
        None => s.trim().parse::<f64>().map_err(|e| e.to_string())?,
    };
    Spin::new(value).map_err(|e| e.to_string())
}
