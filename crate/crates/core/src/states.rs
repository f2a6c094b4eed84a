//! Qubit states as density matrices and Bloch vectors, and the probe-state
//! sets used by the finite-average fidelity estimators.

use crate::error::{Error, Result};
use crate::linalg::{dot3, herm2_eigenvalues, Mat2C, UnitQuaternion};

/// Tolerance for the density-matrix and Bloch-ball representation checks.
pub const STATE_TOL: f64 = 1e-10;

/// Real Bloch coordinates `(x, y, z)` with `ρ = ½(I + xσ_x + yσ_y + zσ_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: Self = Self { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("Bloch vector"));
        }
        let n = v.norm();
        if n > 1.0 + STATE_TOL {
            return Err(Error::BlochVectorTooLong(n));
        }
        Ok(v)
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        dot3(self.to_array(), self.to_array()).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot3(self.to_array(), other.to_array())
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= STATE_TOL
    }
}

/// A validated qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2C);

impl DensityMatrix {
    pub fn new(m: Mat2C) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = m.hermiticity_deviation();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let (_, lo) = herm2_eigenvalues(&m);
        if lo < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be a valid state.
    pub(crate) fn new_unchecked(m: Mat2C) -> Self {
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2C::identity().scale_re(0.5))
    }

    pub fn from_bloch(v: BlochVector) -> Self {
        Self(Mat2C::from_pauli_coefficients(0.5, [0.5 * v.x, 0.5 * v.y, 0.5 * v.z]))
    }

    pub fn bloch(&self) -> BlochVector {
        let (_, c) = self.0.pauli_coefficients();
        BlochVector { x: c[0], y: c[1], z: c[2] }
    }

    pub fn matrix(&self) -> &Mat2C {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0)
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= STATE_TOL
    }

    /// Fails with [`Error::NotPure`] unless `Tr ρ² = 1` within tolerance.
    pub fn require_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::NotPure(self.purity()))
        }
    }
}

/// The pure state at polar angle `theta` and azimuth `phi` on the Bloch sphere.
pub fn pure_state(theta: f64, phi: f64) -> DensityMatrix {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    DensityMatrix::from_bloch(BlochVector { x: st * cp, y: st * sp, z: ct })
}

/// Pure state along a unit direction; the direction is normalized.
pub(crate) fn pure_state_along(d: [f64; 3]) -> DensityMatrix {
    let n = dot3(d, d).sqrt();
    DensityMatrix::from_bloch(BlochVector { x: d[0] / n, y: d[1] / n, z: d[2] / n })
}

pub fn bloch_to_density(v: BlochVector) -> Result<DensityMatrix> {
    let v = BlochVector::new(v.x, v.y, v.z)?;
    Ok(DensityMatrix::from_bloch(v))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    rho.bloch()
}

/// A weighted list of pure probe states whose weighted average is `I/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub states: Vec<DensityMatrix>,
    pub weights: Vec<f64>,
    pub label: String,
}

impl ProbeSet {
    fn uniform(label: &str, directions: &[[f64; 3]]) -> Self {
        let w = 1.0 / directions.len() as f64;
        Self {
            states: directions.iter().map(|&d| pure_state_along(d)).collect(),
            weights: vec![w; directions.len()],
            label: label.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DensityMatrix, f64)> {
        self.states.iter().zip(self.weights.iter().copied())
    }

    /// `Σ_k w_k ρ_k`; equals `I/2` for every set built here.
    pub fn weighted_mean(&self) -> Mat2C {
        self.iter().fold(Mat2C::zero(), |acc, (rho, w)| acc + rho.matrix().scale_re(w))
    }
}

/// Cardinal directions in the fixed order +x, −x, +y, −y, +z, −z.
pub const CARDINAL_DIRECTIONS: [[f64; 3]; 6] =
    [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];

pub const CARDINAL_LABELS: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];

/// Sign patterns of the tetrahedron vertices, each scaled by 1/√3.
pub const TETRAHEDRON_SIGNS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];

pub fn cardinal_probe_set() -> ProbeSet {
    ProbeSet::uniform("cardinal", &CARDINAL_DIRECTIONS)
}

pub fn tetrahedron_probe_set() -> ProbeSet {
    let s = 1.0 / 3f64.sqrt();
    let dirs = TETRAHEDRON_SIGNS.map(|d| d.map(|c| c * s));
    ProbeSet::uniform("tetrahedron", &dirs)
}

/// The cardinal octahedron with every vertex rotated by `q`.
pub fn rotated_octahedron_probe_set(q: &UnitQuaternion) -> ProbeSet {
    let dirs = CARDINAL_DIRECTIONS.map(|d| q.rotate(d));
    ProbeSet::uniform("rotated_octahedron", &dirs)
}
