//! Composite rotation sequences under systematic pulse-length and
//! off-resonance errors, scored three ways: average map fidelity, quaternion
//! fidelity and point-to-point fidelity.
//!
//! Sequences are written chronologically: `pulses[0]` is applied first, so the
//! realized unitary is `U_n ··· U_2 · U_1`.
//!
//! The quaternion fidelity used here is the absolute inner product `|q_u · q_v|`
//! of the SU(2) quaternions (an adopted convention). It equals `|Tr(U†V)|/2`,
//! which ties it to the average fidelity of the unitary channel `V·V†`
//! against target `U`: `F̄ = (2 + 4·qf²)/6`.

use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, TargetKind, TargetMap};
use crate::error::{Error, Result};
use crate::fidelity::{average_fidelity_six_state, FidelityValue};
use crate::linalg::{rotation_unitary, Mat2C, UnitQuaternion};
use crate::states::DensityMatrix;

/// A hard pulse: rotation by `angle` about the in-plane axis at azimuth `phase`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub angle: f64,
    #[serde(default)]
    pub phase: f64,
}

impl PulseSpec {
    pub fn new(angle: f64, phase: f64) -> Result<Self> {
        if !(angle.is_finite() && phase.is_finite()) || angle < 0.0 {
            return Err(Error::InvalidParameter {
                what: "pulse",
                reason: format!("angle {angle} must be finite and non-negative, phase {phase} finite"),
            });
        }
        Ok(Self { angle, phase })
    }

    pub fn x(angle: f64) -> Self {
        Self { angle, phase: 0.0 }
    }

    pub fn y(angle: f64) -> Self {
        Self { angle, phase: std::f64::consts::FRAC_PI_2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pulses: Vec<PulseSpec>,
    label: String,
}

impl PulseSequence {
    pub fn new(pulses: Vec<PulseSpec>, label: impl Into<String>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::InvalidParameter { what: "sequence", reason: "no pulses".into() });
        }
        for p in &pulses {
            PulseSpec::new(p.angle, p.phase)?;
        }
        Ok(Self { pulses, label: label.into() })
    }

    /// A single 180° pulse about x.
    pub fn plain_180x() -> Self {
        Self { pulses: vec![PulseSpec::x(std::f64::consts::PI)], label: "plain_180x".into() }
    }

    /// 90x–180y–90x composite inversion.
    pub fn composite_90x_180y_90x() -> Self {
        use std::f64::consts::{FRAC_PI_2, PI};
        Self {
            pulses: vec![PulseSpec::x(FRAC_PI_2), PulseSpec::y(PI), PulseSpec::x(FRAC_PI_2)],
            label: "composite_90x_180y_90x".into(),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "plain_180x" => Some(Self::plain_180x()),
            "composite_90x_180y_90x" => Some(Self::composite_90x_180y_90x()),
            _ => None,
        }
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Systematic errors applied identically to every pulse.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorModel {
    /// ε: every rotation angle is scaled by `1 + ε`.
    pub pulse_length_fraction: f64,
    /// f: detuning over nutation rate; tilts the axis out of the xy-plane.
    pub off_resonance_fraction: f64,
}

impl ErrorModel {
    pub fn new(pulse_length_fraction: f64, off_resonance_fraction: f64) -> Result<Self> {
        for (what, v) in
            [("pulse length error", pulse_length_fraction), ("off-resonance error", off_resonance_fraction)]
        {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::InvalidParameter { what, reason: format!("{v} is outside [-1, 1]") });
            }
        }
        Ok(Self { pulse_length_fraction, off_resonance_fraction })
    }

    pub fn ideal() -> Self {
        Self::default()
    }
}

/// `exp(−i(θ_eff/2) n̂·σ)` with axis `(cos φ, sin φ, f)/√(1+f²)` and
/// `θ_eff = θ(1+ε)√(1+f²)`.
pub fn pulse_unitary(p: &PulseSpec, e: &ErrorModel) -> Mat2C {
    let f = e.off_resonance_fraction;
    let (s, c) = p.phase.sin_cos();
    let scale = (1.0 + f * f).sqrt();
    let angle = p.angle * (1.0 + e.pulse_length_fraction) * scale;
    rotation_unitary([c, s, f], angle).expect("axis has unit in-plane component")
}

/// Product `U_n ··· U_1` of the pulse unitaries in chronological order.
pub fn sequence_unitary(s: &PulseSequence, e: &ErrorModel) -> Mat2C {
    s.pulses.iter().fold(Mat2C::identity(), |acc, p| pulse_unitary(p, e) * acc)
}

/// `|q_u · q_v|`, independent of the global phase of either argument.
pub fn quaternion_fidelity(u: &Mat2C, v: &Mat2C) -> Result<f64> {
    let qu = UnitQuaternion::from_su2(u)?;
    let qv = UnitQuaternion::from_su2(v)?;
    Ok(qu.dot(&qv).abs().min(1.0))
}

/// `Tr(target · V start V†)` for the realized sequence unitary `V`.
pub fn point_to_point_fidelity(
    s: &PulseSequence,
    e: &ErrorModel,
    start: &DensityMatrix,
    target: &DensityMatrix,
) -> Result<FidelityValue> {
    start.require_pure()?;
    target.require_pure()?;
    let v = sequence_unitary(s, e);
    Ok(FidelityValue::new(target.matrix().trace_product(&v.sandwich(start.matrix()))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceReport {
    pub realized_unitary: Mat2C,
    pub average_fidelity: FidelityValue,
    pub quaternion_fidelity: f64,
    pub point_to_point: FidelityValue,
}

pub fn sequence_report(
    s: &PulseSequence,
    e: &ErrorModel,
    ideal: &TargetMap,
    start: &DensityMatrix,
    target: &DensityMatrix,
) -> Result<SequenceReport> {
    if ideal.kind() != TargetKind::Unitary {
        return Err(Error::InvalidParameter {
            what: "ideal target",
            reason: "pulse sequences can only be compared with unitary targets".into(),
        });
    }
    let v = sequence_unitary(s, e);
    let channel = KrausChannel::unitary(v)?;
    Ok(SequenceReport {
        realized_unitary: v,
        average_fidelity: average_fidelity_six_state(ideal, &channel),
        quaternion_fidelity: quaternion_fidelity(ideal.matrix(), &v)?,
        point_to_point: point_to_point_fidelity(s, e, start, target)?,
    })
}
