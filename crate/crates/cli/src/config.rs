//! Experiment configuration read from JSON.
//!
//! Every field has a fixed meaning; unknown keys are rejected. After
//! defaults are filled in, the same structure is serialized back into each
//! output summary.

use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use tunnelopt::EvolveConfig;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Path of Hamiltonians `H(q)`, `q ∈ [0, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    #[serde(default)]
    pub dephasing: DephasingSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Adiabatic parameter, the inverse of the total fast time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    /// Start of the slow-time partition used by `zerotunnel`.
    #[serde(default)]
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grover: Option<GroverSpec>,
    /// Seed for randomized fixtures; `--seed` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A complex matrix as row-major `[re, im]` pairs.
pub type ComplexEntries = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// `H(q) = (1 - q) H₀ + q H₁` with explicit Hermitian endpoints.
    Linear { h0: ComplexEntries, h1: ComplexEntries },
    /// Linear path between two seeded random Hermitian matrices.
    RandomLinear { dim: usize },
    /// `g(q) = gap·(sin(πq/2), 0, cos(πq/2))`.
    QuarterCircle { gap: f64 },
    /// `g(q) = (q, 0, 1 - q)`.
    Chord,
    /// `g(q) = start + q (end - start)`.
    Segment { start: [f64; 3], end: [f64; 3] },
    /// Constant field `g`.
    Constant { field: [f64; 3] },
    /// Two-level reduction of adiabatic search over `n` items.
    Grover { n: usize },
    /// A mass profile given directly, without a Hamiltonian.
    SyntheticMass { profile: MassShape },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum MassShape {
    /// `M(q) = 1`.
    Constant,
    /// `M(q) = q²`.
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DephasingSpec {
    #[default]
    Unitary,
    /// Constant scalar rate.
    Scalar { gamma: f64 },
    /// Scalar rate set from the database size of a `grover` path.
    GroverRule { rule: RuleSpec },
    /// Constant real symmetric PSD rate matrix, row by row.
    Matrix { gamma: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    /// `γ = c/√N`.
    ProportionalToG0 { c: f64 },
    Fixed { gamma: f64 },
    /// `γ = N^(-α/2)`.
    PowerLaw { alpha: f64 },
}

impl From<RuleSpec> for tunnelopt::GammaRule<f64> {
    fn from(r: RuleSpec) -> Self {
        match r {
            RuleSpec::ProportionalToG0 { c } => Self::ProportionalToG0(c),
            RuleSpec::Fixed { gamma } => Self::Fixed(gamma),
            RuleSpec::PowerLaw { alpha } => Self::PowerLaw(alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    #[default]
    Uniform,
    /// Minimizer of the first-order tunneling functional.
    Optimal,
    /// `q` values on a uniform grid of `s`, from 0 to 1.
    Grid { q: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSpec {
    /// Initial step is at most `step_ratio·ε`.
    pub step_ratio: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Stored trajectory points, evenly spaced in `s`.
    pub samples: usize,
    pub gap_tol: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        let d = EvolveConfig::default();
        Self { step_ratio: d.step_ratio, rtol: d.rtol, max_steps: d.max_steps, samples: d.samples, gap_tol: d.gap_tol }
    }
}

impl From<&IntegratorSpec> for EvolveConfig {
    fn from(s: &IntegratorSpec) -> Self {
        Self { step_ratio: s.step_ratio, rtol: s.rtol, max_steps: s.max_steps, samples: s.samples, gap_tol: s.gap_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GroverSpec {
    /// Ascending database sizes; the two smallest are left out of the fit.
    pub n_list: Vec<usize>,
    pub rule: RuleSpec,
    /// Optional sweep over fixed rates at one size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_sweep: Option<GammaSweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GammaSweepSpec {
    pub n: usize,
    pub gammas: Vec<f64>,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: &[f64]) -> Result<(), CliError> {
    match v.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(CliError::Config(format!("{name} contains a non-finite value {x}"))),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn load(file: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(file)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks ranges that the type system does not capture.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(eps) = self.epsilon {
            positive("epsilon", eps)?;
        }
        finite("offset", &[self.offset])?;
        let it = &self.integrator;
        positive("integrator.step_ratio", it.step_ratio)?;
        positive("integrator.rtol", it.rtol)?;
        positive("integrator.gap_tol", it.gap_tol)?;
        if it.samples < 2 || it.max_steps == 0 {
            return Err(CliError::Config("integrator.samples must be at least 2 and max_steps positive".into()));
        }
        match &self.path {
            Some(PathSpec::Linear { h0, h1 }) => {
                for (name, m) in [("h0", h0), ("h1", h1)] {
                    finite(name, &m.iter().flatten().copied().collect::<Vec<_>>())?;
                }
            }
            Some(PathSpec::RandomLinear { dim }) if *dim < 2 => {
                return Err(CliError::Config("random_linear.dim must be at least 2".into()))
            }
            Some(PathSpec::QuarterCircle { gap }) => positive("quarter_circle.gap", *gap)?,
            Some(PathSpec::Segment { start, end }) => finite("segment", &[start.as_slice(), end.as_slice()].concat())?,
            Some(PathSpec::Constant { field }) => finite("constant.field", field)?,
            Some(PathSpec::Grover { n }) if *n < 2 => {
                return Err(CliError::Config("grover.n must be at least 2".into()))
            }
            _ => {}
        }
        match &self.dephasing {
            DephasingSpec::Scalar { gamma } => positive("dephasing.gamma", *gamma)?,
            DephasingSpec::Matrix { gamma } => finite("dephasing.gamma", &gamma.concat())?,
            _ => {}
        }
        if let ScheduleSpec::Grid { q } = &self.schedule {
            finite("schedule.q", q)?;
        }
        if let Some(g) = &self.grover {
            if g.n_list.iter().any(|&n| n < 2) {
                return Err(CliError::Config("grover.n_list entries must be at least 2".into()));
            }
            if let Some(sw) = &g.gamma_sweep {
                for &x in &sw.gammas {
                    positive("grover.gamma_sweep.gammas", x)?;
                }
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> Result<f64, CliError> {
        self.epsilon.ok_or_else(|| CliError::Config("epsilon is required".into()))
    }
}

/// JSON schema of [`ExperimentConfig`].
pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(ExperimentConfig)).expect("schema serializes")
}
