//! Target maps (unitary or anti-unitary) and general trace-preserving qubit
//! maps in Kraus, affine-Bloch and Choi form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat3_mul, mat3_vec, rotation_unitary, Complex, Herm4, Mat2C};
use crate::states::DensityMatrix;

/// Tolerance on `Σ K†K = I` and on the trace of mapped operators.
pub const TP_TOL: f64 = 1e-9;
/// Smallest Choi eigenvalue still accepted as completely positive.
pub const CP_TOL: f64 = 1e-9;
/// Tolerance on `U†U = I` for targets.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Unitary,
    AntiUnitary,
}

/// The ideal operation: `ρ ↦ UρU†`, or `ρ ↦ U·conj(ρ)·U†` for an anti-unitary target
/// (complex conjugation in the computational basis followed by `U`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetMap {
    u: Mat2C,
    kind: TargetKind,
}

impl TargetMap {
    pub fn new(u: Mat2C, kind: TargetKind) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NonFinite("target matrix"));
        }
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { u, kind })
    }

    pub fn unitary(u: Mat2C) -> Result<Self> {
        Self::new(u, TargetKind::Unitary)
    }

    pub fn anti_unitary(u: Mat2C) -> Result<Self> {
        Self::new(u, TargetKind::AntiUnitary)
    }

    pub fn identity() -> Self {
        Self { u: Mat2C::identity(), kind: TargetKind::Unitary }
    }

    /// Plain complex conjugation (the transpose on density matrices).
    pub fn conjugation() -> Self {
        Self { u: Mat2C::identity(), kind: TargetKind::AntiUnitary }
    }

    pub fn rotation(axis: [f64; 3], angle: f64, kind: TargetKind) -> Result<Self> {
        Self::new(rotation_unitary(axis, angle)?, kind)
    }

    pub fn matrix(&self) -> &Mat2C {
        &self.u
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    /// Action on an arbitrary operator. Real-linear; complex-linear on Hermitian
    /// combinations, which is all the estimators need.
    pub fn apply_operator(&self, x: &Mat2C) -> Mat2C {
        match self.kind {
            TargetKind::Unitary => self.u.sandwich(x),
            TargetKind::AntiUnitary => self.u.sandwich(&x.conj()),
        }
    }

    /// The 3×3 real matrix the target induces on Bloch vectors. Orthogonal with
    /// determinant +1 for unitary targets and −1 for anti-unitary ones.
    pub fn bloch_matrix(&self) -> [[f64; 3]; 3] {
        let mut r = [[0.0; 3]; 3];
        for (k, p) in Mat2C::paulis().iter().enumerate() {
            let (_, c) = self.apply_operator(p).pauli_coefficients();
            for j in 0..3 {
                r[j][k] = 0.5 * c[j];
            }
        }
        r
    }
}

pub fn apply_target(t: &TargetMap, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(t.apply_operator(rho.matrix()))
}

/// A linear qubit map, extended to all 2×2 operators.
pub trait QubitMap {
    fn apply_operator(&self, x: &Mat2C) -> Mat2C;

    /// Largest deviation of `Tr M[|k⟩⟨l|]` from `δ_kl`.
    fn trace_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                let out = self.apply_operator(&matrix_unit(k, l)).trace();
                let want = if k == l { 1.0 } else { 0.0 };
                dev = dev.max((out - Complex::new(want, 0.0)).norm());
            }
        }
        dev
    }

    /// `a_jk = ½Tr(σ_j M[σ_k])`, `t_j = ½Tr(σ_j M[I])`.
    fn to_affine(&self) -> AffineBlochMap {
        let paulis = Mat2C::paulis();
        let image_id = self.apply_operator(&Mat2C::identity());
        let mut a = [[0.0; 3]; 3];
        let mut t = [0.0; 3];
        for (j, sj) in paulis.iter().enumerate() {
            t[j] = 0.5 * sj.trace_product(&image_id);
            for (k, sk) in paulis.iter().enumerate() {
                a[j][k] = 0.5 * sj.trace_product(&self.apply_operator(sk));
            }
        }
        AffineBlochMap { a, t }
    }

    /// `Σ_kl M[|k⟩⟨l|] ⊗ |k⟩⟨l|`, trace 2 for trace-preserving maps.
    fn choi(&self) -> Result<ChoiMatrix> {
        let mut c = [[Complex::new(0.0, 0.0); 4]; 4];
        for k in 0..2 {
            for l in 0..2 {
                let img = self.apply_operator(&matrix_unit(k, l));
                for a in 0..2 {
                    for b in 0..2 {
                        c[2 * a + k][2 * b + l] = img.m[a][b];
                    }
                }
            }
        }
        Ok(ChoiMatrix { c: Herm4::new(c)? })
    }
}

fn matrix_unit(k: usize, l: usize) -> Mat2C {
    let mut m = Mat2C::zero();
    m.m[k][l] = Complex::new(1.0, 0.0);
    m
}

/// Completely positive trace-preserving map `ρ ↦ Σ K_i ρ K_i†` with one to four operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Mat2C>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Mat2C>) -> Result<Self> {
        if operators.is_empty() || operators.len() > 4 {
            return Err(Error::KrausCount(operators.len()));
        }
        if operators.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite("Kraus operator"));
        }
        let ch = Self { operators };
        let dev = ch.completeness_deviation();
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    /// Accepts any number of operators; sets larger than four are replaced by
    /// the canonical Kraus set read off the Choi eigendecomposition.
    pub fn from_operators(operators: Vec<Mat2C>) -> Result<Self> {
        if operators.len() <= 4 {
            return Self::new(operators);
        }
        let raw = Self { operators };
        let dev = raw.completeness_deviation();
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Self::new(canonical_kraus(&raw.choi()?)?)
    }

    pub fn identity() -> Self {
        Self { operators: vec![Mat2C::identity()] }
    }

    pub fn unitary(u: Mat2C) -> Result<Self> {
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Self::new(vec![u])
    }

    pub fn operators(&self) -> &[Mat2C] {
        &self.operators
    }

    /// Max entrywise deviation of `Σ K†K` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        self.operators.iter().fold(Mat2C::zero(), |acc, k| acc + k.dagger() * *k).max_abs_diff(&Mat2C::identity())
    }
}

impl QubitMap for KrausChannel {
    fn apply_operator(&self, x: &Mat2C) -> Mat2C {
        self.operators.iter().fold(Mat2C::zero(), |acc, k| acc + k.sandwich(x))
    }
}

pub fn apply_channel(m: &KrausChannel, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(m.apply_operator(rho.matrix()))
}

pub fn kraus_to_affine(m: &KrausChannel) -> AffineBlochMap {
    m.to_affine()
}

pub fn kraus_to_choi(m: &KrausChannel) -> Result<ChoiMatrix> {
    m.choi()
}

pub fn choi_is_cp(c: &ChoiMatrix) -> Result<bool> {
    c.is_cp()
}

fn canonical_kraus(choi: &ChoiMatrix) -> Result<Vec<Mat2C>> {
    let (values, vectors) = choi.c.eigen()?;
    if values[3] < -CP_TOL {
        return Err(Error::NotPsd(values[3]));
    }
    let floor = 1e-14 * values[0].max(1.0);
    let ops: Vec<Mat2C> = values
        .iter()
        .zip(vectors.iter())
        .filter(|(&v, _)| v > floor)
        .map(|(&v, vec)| {
            let s = v.sqrt();
            Mat2C::new(vec[0], vec[1], vec[2], vec[3]).scale_re(s)
        })
        .collect();
    Ok(ops)
}

/// Trace-preserving qubit map in Bloch form: `r ↦ a·r + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineBlochMap {
    pub a: [[f64; 3]; 3],
    pub t: [f64; 3],
}

impl AffineBlochMap {
    /// Validates that the map sends the unit ball into itself (within 1e-9).
    pub fn new(a: [[f64; 3]; 3], t: [f64; 3]) -> Result<Self> {
        if a.iter().flatten().chain(t.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("affine map"));
        }
        let map = Self { a, t };
        let worst = map.max_image_radius();
        if worst > 1.0 + TP_TOL {
            return Err(Error::LeavesBlochBall(worst));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        Self { a: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], t: [0.0; 3] }
    }

    /// The transpose map `ρ ↦ ρᵀ`: positive and trace preserving, not completely positive.
    pub fn transpose() -> Self {
        Self { a: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]], t: [0.0; 3] }
    }

    pub fn apply_bloch(&self, r: [f64; 3]) -> [f64; 3] {
        let v = mat3_vec(&self.a, r);
        [v[0] + self.t[0], v[1] + self.t[1], v[2] + self.t[2]]
    }

    /// `then ∘ self`
    pub fn then(&self, then: &AffineBlochMap) -> AffineBlochMap {
        AffineBlochMap { a: mat3_mul(&then.a, &self.a), t: then.apply_bloch(self.t) }
    }

    /// Largest image radius of the unit sphere, estimated on a dense Fibonacci
    /// lattice plus the cardinal directions. Exact bound used when it is already ≤ 1.
    pub fn max_image_radius(&self) -> f64 {
        let fro = self.a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let tn = (self.t.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if fro + tn <= 1.0 {
            return fro + tn;
        }
        const N: usize = 4000;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let lattice = (0..N).map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / N as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [r * c, r * s, z]
        });
        lattice
            .chain(crate::states::CARDINAL_DIRECTIONS)
            .map(|d| {
                let v = self.apply_bloch(d);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

impl QubitMap for AffineBlochMap {
    fn apply_operator(&self, x: &Mat2C) -> Mat2C {
        // X = ½(x0·I + Σ x_j σ_j) with complex coefficients.
        let paulis = Mat2C::paulis();
        let x0 = x.trace();
        let xs: [Complex; 3] = std::array::from_fn(|j| (*x * paulis[j]).trace());
        let mut out = Mat2C::identity().scale(x0 * 0.5);
        for (j, sj) in paulis.iter().enumerate() {
            let mut yj = x0 * self.t[j];
            for (k, xk) in xs.iter().enumerate() {
                yj += xk * self.a[j][k];
            }
            out = out + sj.scale(yj * 0.5);
        }
        out
    }

    fn trace_deviation(&self) -> f64 {
        0.0
    }

    fn to_affine(&self) -> AffineBlochMap {
        *self
    }
}

/// Choi matrix `Σ_kl M[|k⟩⟨l|] ⊗ |k⟩⟨l|` (trace 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub c: Herm4,
}

impl ChoiMatrix {
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        self.c.eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[3])
    }

    pub fn is_cp(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -CP_TOL)
    }
}

/// Either representation of a general map, as accepted by the estimators.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Kraus(KrausChannel),
    Affine(AffineBlochMap),
}

impl Channel {
    /// `then ∘ self`, staying in Kraus form when both sides are Kraus.
    pub fn then(&self, then: &Channel) -> Result<Channel> {
        match (self, then) {
            (Channel::Kraus(a), Channel::Kraus(b)) => Ok(Channel::Kraus(compose_channels(a, b)?)),
            _ => Ok(Channel::Affine(self.to_affine().then(&then.to_affine()))),
        }
    }

    pub fn is_cp(&self) -> Result<bool> {
        match self {
            Channel::Kraus(_) => Ok(true),
            Channel::Affine(a) => a.choi()?.is_cp(),
        }
    }
}

impl QubitMap for Channel {
    fn apply_operator(&self, x: &Mat2C) -> Mat2C {
        match self {
            Channel::Kraus(k) => k.apply_operator(x),
            Channel::Affine(a) => a.apply_operator(x),
        }
    }

    fn trace_deviation(&self) -> f64 {
        match self {
            Channel::Kraus(k) => k.trace_deviation(),
            Channel::Affine(a) => a.trace_deviation(),
        }
    }
}

impl From<KrausChannel> for Channel {
    fn from(k: KrausChannel) -> Self {
        Channel::Kraus(k)
    }
}

impl From<AffineBlochMap> for Channel {
    fn from(a: AffineBlochMap) -> Self {
        Channel::Affine(a)
    }
}

pub const NAMED_CHANNELS: [&str; 6] =
    ["identity", "depolarizing", "amplitude_damping", "phase_damping", "bit_flip", "phase_flip"];

/// Standard single-qubit noise channels, parameter in `[0, 1]`:
///
/// | name | Kraus operators |
/// |---|---|
/// | `identity` | `I` |
/// | `depolarizing` p | `√(1−3p/4)·I, √(p/4)·σ_x, √(p/4)·σ_y, √(p/4)·σ_z` |
/// | `amplitude_damping` γ | `[[1,0],[0,√(1−γ)]], [[0,√γ],[0,0]]` |
/// | `phase_damping` λ | `[[1,0],[0,√(1−λ)]], [[0,0],[0,√λ]]` |
/// | `bit_flip` p | `√(1−p)·I, √p·σ_x` |
/// | `phase_flip` p | `√(1−p)·I, √p·σ_z` |
pub fn named_channel(name: &str, parameter: f64) -> Result<KrausChannel> {
    if !NAMED_CHANNELS.contains(&name) {
        return Err(Error::UnknownChannel(name.to_string()));
    }
    if !(0.0..=1.0).contains(&parameter) {
        return Err(Error::ParameterOutOfRange { name: name.to_string(), value: parameter });
    }
    let p = parameter;
    let [x, y, z] = Mat2C::paulis();
    let id = Mat2C::identity();
    let ops = match name {
        "identity" => vec![id],
        "depolarizing" if p == 0.0 => vec![id],
        "depolarizing" => {
            let s = (p / 4.0).sqrt();
            vec![id.scale_re((1.0 - 0.75 * p).sqrt()), x.scale_re(s), y.scale_re(s), z.scale_re(s)]
        }
        "amplitude_damping" => vec![Mat2C::real(1.0, 0.0, 0.0, (1.0 - p).sqrt()), Mat2C::real(0.0, p.sqrt(), 0.0, 0.0)],
        "phase_damping" => vec![Mat2C::real(1.0, 0.0, 0.0, (1.0 - p).sqrt()), Mat2C::real(0.0, 0.0, 0.0, p.sqrt())],
        "bit_flip" => vec![id.scale_re((1.0 - p).sqrt()), x.scale_re(p.sqrt())],
        "phase_flip" => vec![id.scale_re((1.0 - p).sqrt()), z.scale_re(p.sqrt())],
        _ => unreachable!("name checked above"),
    };
    KrausChannel::new(ops)
}

/// `then ∘ first`: Kraus set `{L_j K_i}`, compressed back to at most four operators.
pub fn compose_channels(first: &KrausChannel, then: &KrausChannel) -> Result<KrausChannel> {
    let ops = then.operators.iter().flat_map(|l| first.operators.iter().map(move |k| *l * *k)).collect();
    KrausChannel::from_operators(ops)
}

/// 2×2 complex matrix as JSON: rows of `[re, im]` pairs.
pub type MatrixJson = [[[f64; 2]; 2]; 2];

pub fn matrix_from_json(m: &MatrixJson) -> Mat2C {
    let c = |p: [f64; 2]| Complex::new(p[0], p[1]);
    Mat2C::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1]))
}

/// Declarative description of a channel, as read from input files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Unitary {
        axis: [f64; 3],
        angle: f64,
    },
    Named {
        name: String,
        #[serde(default)]
        parameter: f64,
    },
    Kraus {
        operators: Vec<MatrixJson>,
    },
    Affine {
        a: [[f64; 3]; 3],
        t: [f64; 3],
    },
    Composition {
        channels: Vec<ChannelSpec>,
    },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Unitary { axis, angle } => Ok(KrausChannel::unitary(rotation_unitary(*axis, *angle)?)?.into()),
            ChannelSpec::Named { name, parameter } => Ok(named_channel(name, *parameter)?.into()),
            ChannelSpec::Kraus { operators } => {
                Ok(KrausChannel::new(operators.iter().map(matrix_from_json).collect())?.into())
            }
            ChannelSpec::Affine { a, t } => Ok(AffineBlochMap::new(*a, *t)?.into()),
            ChannelSpec::Composition { channels } => {
                let mut iter = channels.iter();
                let Some(first) = iter.next() else {
                    return Err(Error::InvalidParameter {
                        what: "composition",
                        reason: "needs at least one channel".into(),
                    });
                };
                iter.try_fold(first.build()?, |acc, next| acc.then(&next.build()?))
            }
        }
    }
}
