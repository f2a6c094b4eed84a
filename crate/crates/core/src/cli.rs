//! The `qfid` commands: `fidelity`, `verify` and `sweep`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | I/O failure (unreadable input, unwritable output) |
//! | 2 | malformed input (JSON syntax, schema, unknown names) |
//! | 3 | input violates a model invariant (non-trace-preserving map, non-unitary target, ...) |
//! | 4 | `verify`: estimators disagree by 1e-8 or more |
//!
//! A map that is trace preserving but not completely positive only triggers a
//! warning on stderr.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::channels::{Channel, KrausChannel, TargetMap};
use crate::fidelity::{
    average_fidelity_monte_carlo, average_fidelity_pauli, average_fidelity_probe_set, average_fidelity_quadrature,
    average_fidelity_six_state, cardinal_state_fidelities, FidelityValue, MonteCarloSpec, QuadratureSpec,
};
use crate::input::{parse_input, point_to_point_states, BuildError, EstimatorBlock, EstimatorKind, InputFile};
use crate::linalg::UnitQuaternion;
use crate::numfmt::format_g17;
use crate::pulses::{sequence_report, sequence_unitary, ErrorModel};
use crate::states::{rotated_octahedron_probe_set, tetrahedron_probe_set, CARDINAL_LABELS};

/// Largest estimator disagreement `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

/// Header of the CSV written by `sweep`.
pub const SWEEP_HEADER: &str = "epsilon,off_resonance,avg_fidelity,quaternion_fidelity,point_to_point";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Fidelity,
    Verify,
    Sweep,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub estimator: Option<EstimatorKind>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl RunConfig {
    pub fn new(command: Command, input_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input_path: input_path.into(),
            output_path: None,
            estimator: None,
            n_theta: None,
            n_phi: None,
            samples: None,
            seed: None,
            quiet: false,
        }
    }

    fn estimator_block(&self, file: &EstimatorBlock) -> EstimatorBlock {
        EstimatorBlock {
            name: self.estimator.unwrap_or(file.name),
            n_theta: self.n_theta.unwrap_or(file.n_theta),
            n_phi: self.n_phi.unwrap_or(file.n_phi),
            samples: self.samples.unwrap_or(file.samples),
            seed: self.seed.unwrap_or(file.seed),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Schema(s) => CliError::Parse(s.to_string()),
            BuildError::Model { field, error } => CliError::Invariant(format!("{field}: {error}")),
        }
    }
}

/// What a command produced, before it is written anywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

/// Reads the input file and evaluates the command without writing output.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&config.input_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.input_path.display())))?;
    execute_text(config, &text)
}

pub fn execute_text(config: &RunConfig, text: &str) -> Result<Outcome, CliError> {
    let input = parse_input(text).map_err(CliError::Parse)?;
    match config.command {
        Command::Fidelity => cmd_fidelity(config, &input),
        Command::Verify => cmd_verify(config, &input),
        Command::Sweep => cmd_sweep(&input),
    }
}

/// Runs a command end to end and returns the process exit code. Output files
/// are written to a temporary file and renamed into place only on success.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qfid: {e}");
            return e.exit_code();
        }
    };
    if !config.quiet {
        for w in &outcome.warnings {
            eprintln!("qfid: warning: {w}");
        }
    }
    let written = match &config.output_path {
        Some(path) => write_atomically(path, outcome.report.as_bytes()),
        None => std::io::stdout()
            .write_all(outcome.report.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    };
    if let Err(e) = written {
        eprintln!("qfid: {e}");
        return e.exit_code();
    }
    outcome.exit_code
}

pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

struct Problem {
    target: TargetMap,
    channel: Channel,
    warnings: Vec<String>,
}

fn load_problem(input: &InputFile) -> Result<Problem, CliError> {
    let target = input.target.build()?;
    let spec =
        input.channel.as_ref().ok_or_else(|| CliError::Parse("field `channel` is required for this command".into()))?;
    let channel = spec.build().map_err(crate::input::model("channel"))?;
    let mut warnings = Vec::new();
    match channel.is_cp() {
        Ok(true) => {}
        Ok(false) => warnings.push(
            "channel is not completely positive; the average fidelity is still well defined for \
             trace-preserving maps"
                .to_string(),
        ),
        Err(e) => warnings.push(format!("could not check complete positivity: {e}")),
    }
    Ok(Problem { target, channel, warnings })
}

fn quadrature_spec(block: &EstimatorBlock) -> Result<QuadratureSpec, CliError> {
    QuadratureSpec::new(block.n_theta, block.n_phi).map_err(|e| CliError::Parse(format!("estimator: {e}")))
}

fn monte_carlo_spec(block: &EstimatorBlock) -> Result<MonteCarloSpec, CliError> {
    MonteCarloSpec::new(block.samples, block.seed).map_err(|e| CliError::Parse(format!("estimator: {e}")))
}

/// Fixed generic rotation for the octahedron row of `verify`.
fn verify_octahedron_rotation() -> UnitQuaternion {
    UnitQuaternion::from_axis_angle([1.0, 2.0, 3.0], 1.0).expect("nonzero axis")
}

fn cmd_fidelity(config: &RunConfig, input: &InputFile) -> Result<Outcome, CliError> {
    let problem = load_problem(input)?;
    let block = config.estimator_block(&input.estimator);
    let (t, m) = (&problem.target, &problem.channel);

    let mut out = String::new();
    let _ = writeln!(out, "estimator: {}", block.name.name());
    match block.name {
        EstimatorKind::MonteCarlo => {
            let spec = monte_carlo_spec(&block)?;
            let est = average_fidelity_monte_carlo(t, m, &spec);
            let _ = writeln!(out, "average_fidelity: {}", format_g17(est.fidelity.value()));
            let _ = writeln!(out, "standard_error: {}", format_g17(est.standard_error));
            let _ = writeln!(out, "samples: {}", spec.samples);
            let _ = writeln!(out, "seed: {}", spec.seed);
        }
        kind => {
            let value = single_estimate(kind, t, m, &block)?;
            let _ = writeln!(out, "average_fidelity: {}", format_g17(value.value()));
        }
    }
    let _ = writeln!(out, "cardinal_state_fidelities:");
    for (label, f) in CARDINAL_LABELS.iter().zip(cardinal_state_fidelities(t, m)) {
        let _ = writeln!(out, "  {label} {}", format_g17(FidelityValue::new(f).value()));
    }
    Ok(Outcome { report: out, warnings: problem.warnings, exit_code: 0 })
}

fn single_estimate(
    kind: EstimatorKind,
    t: &TargetMap,
    m: &Channel,
    block: &EstimatorBlock,
) -> Result<FidelityValue, CliError> {
    Ok(match kind {
        EstimatorKind::SixState => average_fidelity_six_state(t, m),
        EstimatorKind::Pauli => {
            average_fidelity_pauli(t, m).map_err(|e| CliError::Invariant(format!("channel: {e}")))?
        }
        EstimatorKind::Tetrahedron => average_fidelity_probe_set(t, m, &tetrahedron_probe_set()),
        EstimatorKind::Quadrature => average_fidelity_quadrature(t, m, &quadrature_spec(block)?),
        EstimatorKind::MonteCarlo => average_fidelity_monte_carlo(t, m, &monte_carlo_spec(block)?).fidelity,
    })
}

fn cmd_verify(config: &RunConfig, input: &InputFile) -> Result<Outcome, CliError> {
    if input.channel.is_none() && input.sequence.is_some() {
        return verify_sequence(config, input);
    }
    let problem = load_problem(input)?;
    let block = config.estimator_block(&input.estimator);
    let (t, m) = (&problem.target, &problem.channel);

    let rows = deterministic_rows(t, m, &block)?;
    let reference = rows[0].1;
    let mc = average_fidelity_monte_carlo(t, m, &monte_carlo_spec(&block)?);

    let mut out = String::new();
    let _ = writeln!(out, "{:<20} {:<24} |value - six_state|", "estimator", "value");
    let mut worst: f64 = 0.0;
    for (name, v) in &rows {
        let d = (v.raw() - reference.raw()).abs();
        worst = worst.max(d);
        let _ = writeln!(out, "{name:<20} {:<24} {}", format_g17(v.value()), format_g17(d));
    }
    let _ = writeln!(
        out,
        "{:<20} {:<24} {} (excluded: +/- {} standard error, n={}, seed={})",
        "monte_carlo",
        format_g17(mc.fidelity.value()),
        format_g17((mc.fidelity.raw() - reference.raw()).abs()),
        format_g17(mc.standard_error),
        block.samples,
        block.seed,
    );
    let pass = worst < VERIFY_TOLERANCE;
    let _ = writeln!(out, "max_discrepancy: {}", format_g17(worst));
    let _ = writeln!(out, "status: {}", if pass { "PASS" } else { "FAIL" });
    Ok(Outcome { report: out, warnings: problem.warnings, exit_code: if pass { 0 } else { 4 } })
}

/// Deterministic estimators checked against six-state by `verify`, in report order.
fn deterministic_rows<M: crate::channels::QubitMap>(
    t: &TargetMap,
    m: &M,
    block: &EstimatorBlock,
) -> Result<Vec<(&'static str, FidelityValue)>, CliError> {
    let octahedron = rotated_octahedron_probe_set(&verify_octahedron_rotation());
    Ok(vec![
        ("six_state", average_fidelity_six_state(t, m)),
        ("pauli", average_fidelity_pauli(t, m).map_err(|e| CliError::Invariant(format!("channel: {e}")))?),
        ("tetrahedron", average_fidelity_probe_set(t, m, &tetrahedron_probe_set())),
        ("rotated_octahedron", average_fidelity_probe_set(t, m, &octahedron)),
        ("quadrature", average_fidelity_quadrature(t, m, &quadrature_spec(block)?)),
    ])
}

/// `verify` for a pulse-sequence input: the estimators are cross-checked on the
/// realized sequence channel at every sweep grid point (or at zero error when
/// the input has no grid).
fn verify_sequence(config: &RunConfig, input: &InputFile) -> Result<Outcome, CliError> {
    let ideal = input.target.build()?;
    let sequence = input.sequence.as_ref().expect("checked by caller").build()?;
    let block = config.estimator_block(&input.estimator);
    let points = match &input.sweep {
        Some(grid) => {
            grid.validate().map_err(|e| CliError::Parse(e.to_string()))?;
            grid.points()
        }
        None => vec![(0.0, 0.0)],
    };
    let invariant = |e: crate::Error| CliError::Invariant(format!("sweep: {e}"));
    let mut worst_by_row: Vec<(&'static str, f64)> = Vec::new();
    for &(eps, f) in &points {
        let e = ErrorModel::new(eps, f).map_err(invariant)?;
        let channel = KrausChannel::unitary(sequence_unitary(&sequence, &e)).map_err(invariant)?;
        let rows = deterministic_rows(&ideal, &channel, &block)?;
        let reference = rows[0].1.raw();
        if worst_by_row.is_empty() {
            worst_by_row = rows.iter().map(|(name, _)| (*name, 0.0)).collect();
        }
        for (slot, (_, v)) in worst_by_row.iter_mut().zip(&rows) {
            slot.1 = slot.1.max((v.raw() - reference).abs());
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "sequence: {} over {} grid point(s)", sequence.label(), points.len());
    let _ = writeln!(out, "{:<20} max |value - six_state|", "estimator");
    let mut worst: f64 = 0.0;
    for (name, d) in &worst_by_row {
        worst = worst.max(*d);
        let _ = writeln!(out, "{name:<20} {}", format_g17(*d));
    }
    let pass = worst < VERIFY_TOLERANCE;
    let _ = writeln!(out, "max_discrepancy: {}", format_g17(worst));
    let _ = writeln!(out, "status: {}", if pass { "PASS" } else { "FAIL" });
    Ok(Outcome { report: out, warnings: Vec::new(), exit_code: if pass { 0 } else { 4 } })
}

fn cmd_sweep(input: &InputFile) -> Result<Outcome, CliError> {
    let ideal = input.target.build()?;
    let seq_spec =
        input.sequence.as_ref().ok_or_else(|| CliError::Parse("field `sequence` is required for sweep".into()))?;
    let sequence = seq_spec.build()?;
    let grid = input.sweep.as_ref().ok_or_else(|| CliError::Parse("field `sweep` is required for sweep".into()))?;
    grid.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    let (start, target) = point_to_point_states(input.point_to_point.as_ref(), &ideal)?;

    let rows: Vec<Result<String, CliError>> = grid
        .points()
        .par_iter()
        .map(|&(eps, f)| {
            let e = ErrorModel::new(eps, f).map_err(|err| CliError::Invariant(format!("sweep: {err}")))?;
            let r = sequence_report(&sequence, &e, &ideal, &start, &target)
                .map_err(|err| CliError::Invariant(format!("sweep: {err}")))?;
            Ok(format!(
                "{},{},{},{},{}",
                format_g17(eps),
                format_g17(f),
                format_g17(r.average_fidelity.value()),
                format_g17(r.quaternion_fidelity),
                format_g17(r.point_to_point.value()),
            ))
        })
        .collect();

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(Outcome { report: out, warnings: Vec::new(), exit_code: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(command: Command, text: &str) -> Result<Outcome, CliError> {
        execute_text(&RunConfig::new(command, "inline.json"), text)
    }

    fn value_line(report: &str) -> f64 {
        report.lines().find_map(|l| l.strip_prefix("average_fidelity: ")).unwrap().parse().unwrap()
    }

    #[test]
    fn fidelity_identity() {
        let o = run_text(
            Command::Fidelity,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "named", "name": "identity"}}"#,
        )
        .unwrap();
        assert_eq!(o.exit_code, 0);
        assert_eq!(value_line(&o.report), 1.0);
        assert_eq!(o.report.lines().filter(|l| l.ends_with(" 1")).count(), 7);
    }

    #[test]
    fn fidelity_depolarizing_and_sigma_x() {
        let o = run_text(
            Command::Fidelity,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "named", "name": "depolarizing", "parameter": 0.3}}"#,
        )
        .unwrap();
        assert!((value_line(&o.report) - 0.85).abs() < 1e-15);

        let o = run_text(
            Command::Fidelity,
            r#"{"target": {"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}, "channel": {"type": "named", "name": "identity"}}"#,
        )
        .unwrap();
        assert!(o.report.contains("average_fidelity: 0.3333333333333333"));
    }

    #[test]
    fn every_estimator_runs() {
        for kind in EstimatorKind::ALL {
            let mut cfg = RunConfig::new(Command::Fidelity, "inline.json");
            cfg.estimator = Some(kind);
            cfg.samples = Some(2000);
            let o = execute_text(
                &cfg,
                r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "named", "name": "depolarizing", "parameter": 0.3}}"#,
            )
            .unwrap();
            assert!(o.report.starts_with(&format!("estimator: {}", kind.name())));
        }
    }

    #[test]
    fn error_classes() {
        let parse = run_text(Command::Fidelity, "{ not json").unwrap_err();
        assert_eq!(parse.exit_code(), 2);
        let unknown = run_text(
            Command::Fidelity,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "named", "name": "warp"}}"#,
        )
        .unwrap_err();
        assert_eq!(unknown.exit_code(), 2);
        let non_tp = run_text(
            Command::Fidelity,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "kraus", "operators": [[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}}"#,
        )
        .unwrap_err();
        assert_eq!(non_tp.exit_code(), 3, "{non_tp}");
        let missing = run_text(Command::Fidelity, r#"{"target": {"axis": [0,0,1], "angle": 0}}"#).unwrap_err();
        assert_eq!(missing.exit_code(), 2);
    }

    #[test]
    fn non_cp_warns_but_computes() {
        let o = run_text(
            Command::Fidelity,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "affine", "a": [[1,0,0],[0,-1,0],[0,0,1]], "t": [0,0,0]}}"#,
        )
        .unwrap();
        assert_eq!(o.exit_code, 0);
        assert_eq!(o.warnings.len(), 1);
        assert!((value_line(&o.report) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn verify_identity() {
        let o = run_text(
            Command::Verify,
            r#"{"target": {"axis": [0,0,1], "angle": 0}, "channel": {"type": "named", "name": "identity"}}"#,
        )
        .unwrap();
        assert_eq!(o.exit_code, 0);
        let worst: f64 = o.report.lines().find_map(|l| l.strip_prefix("max_discrepancy: ")).unwrap().parse().unwrap();
        assert!(worst < 1e-15, "{}", o.report);
        assert!(o.report.contains("(excluded"));
    }

    #[test]
    fn sweep_rows_and_header() {
        let o = run_text(
            Command::Sweep,
            r#"{"target": {"axis": [1,0,0], "angle": 3.141592653589793},
                "sequence": {"preset": "plain_180x"},
                "sweep": {"epsilon": {"min": -0.2, "max": 0.2, "steps": 5}}}"#,
        )
        .unwrap();
        let lines: Vec<&str> = o.report.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[3], "0,0,1,1,1");
        for line in &lines[1..] {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            let want = (std::f64::consts::PI * cols[0] / 2.0).cos().powi(2);
            assert!((cols[4] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn verify_sequence_grid() {
        let o = run_text(
            Command::Verify,
            r#"{"target": {"axis": [0,1,0], "angle": 3.141592653589793},
                "sequence": {"preset": "composite_90x_180y_90x"},
                "sweep": {"epsilon": {"min": -0.2, "max": 0.2, "steps": 3}, "off_resonance": {"min": -0.1, "max": 0.1, "steps": 2}}}"#,
        )
        .unwrap();
        assert_eq!(o.exit_code, 0, "{}", o.report);
        assert!(o.report.starts_with("sequence: composite_90x_180y_90x over 6 grid point(s)\n"), "{}", o.report);
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let err = run_text(
            Command::Sweep,
            r#"{"target": {"axis": [1,0,0], "angle": 3.141592653589793},
                "sequence": {"preset": "plain_180x"},
                "sweep": {"epsilon": {"min": 0.2, "max": -0.2, "steps": 5}}}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_text(
            Command::Sweep,
            r#"{"target": {"axis": [1,0,0], "angle": 3.141592653589793},
                "sequence": {"preset": "plain_180x"},
                "sweep": {"epsilon": {"min": -2, "max": 0, "steps": 2}}}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
