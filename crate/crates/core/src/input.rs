//! JSON input documents for the `qfid` command line.
//!
//! ```json
//! {
//!   "target":   { "axis": [1, 0, 0], "angle": 3.141592653589793, "kind": "unitary" },
//!   "channel":  { "type": "named", "name": "depolarizing", "parameter": 0.3 },
//!   "sequence": { "preset": "composite_90x_180y_90x" },
//!   "sweep":    { "epsilon": { "min": -0.2, "max": 0.2, "steps": 9 },
//!                 "off_resonance": { "min": 0, "max": 0, "steps": 1 } },
//!   "point_to_point": { "start": [0, 0, 1], "target": [0, 0, -1] },
//!   "estimator": { "name": "six_state" }
//! }
//! ```
//!
//! `target` may instead carry `"matrix"`: a 2×2 array of `[re, im]` pairs.
//! The full schema lives in `docs/input-schema.md`.

use serde::{Deserialize, Serialize};

use crate::channels::{matrix_from_json, ChannelSpec, MatrixJson, TargetKind, TargetMap};
use crate::error::Error;
use crate::pulses::{PulseSequence, PulseSpec};
use crate::states::{BlochVector, DensityMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub target: TargetSpec,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    #[serde(default)]
    pub sequence: Option<SequenceSpec>,
    #[serde(default)]
    pub sweep: Option<SweepGrid>,
    #[serde(default)]
    pub point_to_point: Option<PointToPointSpec>,
    #[serde(default)]
    pub estimator: EstimatorBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default = "default_kind")]
    pub kind: TargetKind,
}

fn default_kind() -> TargetKind {
    TargetKind::Unitary
}

/// Structural problem in an otherwise well-formed document.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn schema(field: &str, message: impl Into<String>) -> SchemaError {
    SchemaError { field: field.into(), message: message.into() }
}

/// Either a schema problem (bad input shape) or a value that breaks a model invariant.
#[derive(Debug)]
pub enum BuildError {
    Schema(SchemaError),
    Model { field: String, error: Error },
}

pub(crate) fn model(field: &str) -> impl FnOnce(Error) -> BuildError + '_ {
    move |error| match error {
        Error::UnknownChannel(_) => BuildError::Schema(schema(field, error.to_string())),
        error => BuildError::Model { field: field.to_string(), error },
    }
}

impl TargetSpec {
    pub fn build(&self) -> std::result::Result<TargetMap, BuildError> {
        match (&self.matrix, self.axis, self.angle) {
            (Some(m), None, None) => TargetMap::new(matrix_from_json(m), self.kind).map_err(model("target.matrix")),
            (None, Some(axis), Some(angle)) => TargetMap::rotation(axis, angle, self.kind).map_err(model("target")),
            _ => Err(BuildError::Schema(schema("target", "give either `matrix` or both `axis` and `angle`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses: Option<Vec<PulseSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SequenceSpec {
    pub fn build(&self) -> std::result::Result<PulseSequence, BuildError> {
        match (&self.preset, &self.pulses) {
            (Some(name), None) => PulseSequence::preset(name)
                .ok_or_else(|| BuildError::Schema(schema("sequence.preset", format!("unknown preset `{name}`")))),
            (None, Some(pulses)) => {
                let label = self.label.clone().unwrap_or_else(|| "custom".into());
                PulseSequence::new(pulses.clone(), label).map_err(model("sequence.pulses"))
            }
            _ => Err(BuildError::Schema(schema("sequence", "give exactly one of `preset` or `pulses`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub const ZERO: Self = Self { min: 0.0, max: 0.0, steps: 1 };

    fn validate(&self, field: &str) -> std::result::Result<(), SchemaError> {
        if self.steps < 1 {
            return Err(schema(field, "steps must be at least 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(schema(field, format!("need finite min <= max, got {} and {}", self.min, self.max)));
        }
        Ok(())
    }

    /// Grid points, endpoints exact: `(1 − s)·min + s·max`.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let s = i as f64 / last;
                (1.0 - s) * self.min + s * self.max
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub epsilon: AxisRange,
    #[serde(default = "zero_range")]
    pub off_resonance: AxisRange,
}

fn zero_range() -> AxisRange {
    AxisRange::ZERO
}

impl SweepGrid {
    pub fn validate(&self) -> std::result::Result<(), SchemaError> {
        self.epsilon.validate("sweep.epsilon")?;
        self.off_resonance.validate("sweep.off_resonance")
    }

    /// `(ε, f)` pairs in row-major order: ε outer, f inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let fs = self.off_resonance.values();
        self.epsilon.values().into_iter().flat_map(|e| fs.iter().map(move |&f| (e, f))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointToPointSpec {
    #[serde(default = "north")]
    pub start: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<[f64; 3]>,
}

fn north() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Start and target states for the point-to-point figure. Defaults: start at
/// +z, target = the ideal operation applied to the start.
pub fn point_to_point_states(
    spec: Option<&PointToPointSpec>,
    ideal: &TargetMap,
) -> std::result::Result<(DensityMatrix, DensityMatrix), BuildError> {
    let start_v = spec.map_or(north(), |s| s.start);
    let start = pure_from(start_v, "point_to_point.start")?;
    let target = match spec.and_then(|s| s.target) {
        Some(v) => pure_from(v, "point_to_point.target")?,
        None => crate::channels::apply_target(ideal, &start),
    };
    Ok((start, target))
}

fn pure_from(v: [f64; 3], field: &str) -> std::result::Result<DensityMatrix, BuildError> {
    let rho = BlochVector::from_array(v).map(DensityMatrix::from_bloch).map_err(model(field))?;
    rho.require_pure().map_err(model(field))?;
    Ok(rho)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[default]
    SixState,
    Pauli,
    Tetrahedron,
    Quadrature,
    MonteCarlo,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        EstimatorKind::SixState,
        EstimatorKind::Pauli,
        EstimatorKind::Tetrahedron,
        EstimatorKind::Quadrature,
        EstimatorKind::MonteCarlo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::SixState => "six_state",
            EstimatorKind::Pauli => "pauli",
            EstimatorKind::Tetrahedron => "tetrahedron",
            EstimatorKind::Quadrature => "quadrature",
            EstimatorKind::MonteCarlo => "monte_carlo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorBlock {
    #[serde(default)]
    pub name: EstimatorKind,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_n_theta() -> usize {
    2
}

fn default_n_phi() -> usize {
    4
}

fn default_samples() -> u64 {
    DEFAULT_SAMPLES
}

impl Default for EstimatorBlock {
    fn default() -> Self {
        Self {
            name: EstimatorKind::SixState,
            n_theta: default_n_theta(),
            n_phi: default_n_phi(),
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

/// Parses a document, reporting the JSON path plus line and column on failure.
pub fn parse_input(text: &str) -> std::result::Result<InputFile, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            inner.to_string()
        } else {
            format!("field `{path}`: {inner}")
        }
    })
}
