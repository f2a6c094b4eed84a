//! Small fixed-size complex linear algebra: 2×2 operators, 4×4 Hermitian
//! matrices and unit quaternions.
//!
//! Everything here is closed-form or tiny-iterative; there is no general
//! n×n machinery.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// Negative eigenvalues down to this size are treated as roundoff and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// 2×2 complex matrix, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub m: [[Complex; 2]; 2],
}

impl fmt::Debug for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

impl Mat2C {
    pub const fn new(a00: Complex, a01: Complex, a10: Complex, a11: Complex) -> Self {
        Self { m: [[a00, a01], [a10, a11]] }
    }

    pub const fn real(a00: f64, a01: f64, a10: f64, a11: f64) -> Self {
        Self::new(Complex::new(a00, 0.0), Complex::new(a01, 0.0), Complex::new(a10, 0.0), Complex::new(a11, 0.0))
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn pauli_y() -> Self {
        Self::new(ZERO, Complex::new(0.0, -1.0), I, ZERO)
    }

    pub const fn pauli_z() -> Self {
        Self::new(ONE, ZERO, ZERO, Complex::new(-1.0, 0.0))
    }

    /// σ_x, σ_y, σ_z in that order.
    pub const fn paulis() -> [Self; 3] {
        [Self::pauli_x(), Self::pauli_y(), Self::pauli_z()]
    }

    /// `c0·I + c·σ` for real coefficients.
    pub fn from_pauli_coefficients(c0: f64, c: [f64; 3]) -> Self {
        Self::new(
            Complex::new(c0 + c[2], 0.0),
            Complex::new(c[0], -c[1]),
            Complex::new(c[0], c[1]),
            Complex::new(c0 - c[2], 0.0),
        )
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[0][1].conj(), m[1][0].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn scale(&self, s: Complex) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    /// `A X A†`
    pub fn sandwich(&self, x: &Mat2C) -> Self {
        *self * *x * self.dagger()
    }

    pub fn max_abs_diff(&self, other: &Mat2C) -> f64 {
        self.entries().zip(other.entries()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn entries(&self) -> impl Iterator<Item = Complex> + '_ {
        self.m.iter().flat_map(|row| row.iter().copied())
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Mat2C::identity())
    }

    /// Real coefficients `(Tr A, Tr(Aσ_x), Tr(Aσ_y), Tr(Aσ_z))` of a Hermitian matrix;
    /// `A = ½(c0·I + c·σ)`.
    pub fn pauli_coefficients(&self) -> (f64, [f64; 3]) {
        let m = &self.m;
        let c0 = (m[0][0] + m[1][1]).re;
        let cx = (m[0][1] + m[1][0]).re;
        let cy = (m[1][0] - m[0][1]).im;
        let cz = (m[0][0] - m[1][1]).re;
        (c0, [cx, cy, cz])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.m;
        Some(Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(d.inv()))
    }

    /// Hilbert–Schmidt inner product Tr(A B) for Hermitian arguments, real part only.
    pub fn trace_product(&self, other: &Mat2C) -> f64 {
        (*self * *other).trace().re
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;

    fn mul(self, b: Mat2C) -> Mat2C {
        let a = &self.m;
        let b = &b.m;
        Mat2C::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2C {
    type Output = Mat2C;

    fn add(self, b: Mat2C) -> Mat2C {
        let a = &self.m;
        let b = &b.m;
        Mat2C::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;

    fn sub(self, b: Mat2C) -> Mat2C {
        self + (-b)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;

    fn neg(self) -> Mat2C {
        self.scale_re(-1.0)
    }
}

/// Eigenvalues of a 2×2 Hermitian matrix in descending order.
pub fn herm2_eigenvalues(a: &Mat2C) -> (f64, f64) {
    let p = a.m[0][0].re;
    let q = a.m[1][1].re;
    let half_trace = 0.5 * (p + q);
    let radius = (0.5 * (p - q)).hypot(a.m[0][1].norm());
    (half_trace + radius, half_trace - radius)
}

/// Principal square root of a 2×2 Hermitian positive semidefinite matrix.
///
/// Uses `√A = (A + √(λ₊λ₋)·I) / (√λ₊ + √λ₋)`, which holds on each
/// eigenvector and needs no eigenvectors. Eigenvalues in `[-1e-10, 0)` are
/// clamped to zero.
pub fn herm2_sqrt(a: &Mat2C) -> Result<Mat2C> {
    if !a.is_finite() {
        return Err(Error::NonFinite("herm2_sqrt input"));
    }
    let dev = a.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let (hi, lo) = herm2_eigenvalues(a);
    if lo < -PSD_CLAMP {
        return Err(Error::NotPsd(lo));
    }
    if hi <= 0.0 {
        return Ok(Mat2C::zero());
    }
    let mut s = if lo < 0.0 {
        // Clamped: keep only the top eigenprojector (A − λ₋I)/(λ₊ − λ₋).
        (*a - Mat2C::identity().scale_re(lo)).scale_re(hi.sqrt() / (hi - lo))
    } else {
        let shift = (hi * lo).sqrt();
        (*a + Mat2C::identity().scale_re(shift)).scale_re(1.0 / (hi.sqrt() + lo.sqrt()))
    };
    // Symmetrize so the result is exactly Hermitian.
    s = (s + s.dagger()).scale_re(0.5);
    Ok(s)
}

/// 4×4 Hermitian matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Herm4 {
    m: [[Complex; 4]; 4],
}

/// Maximum number of Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-13;

impl Herm4 {
    #[allow(clippy::needless_range_loop)] // symmetric (i, j)/(j, i) access
    pub fn new(m: [[Complex; 4]; 4]) -> Result<Self> {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if !(m[i][j].re.is_finite() && m[i][j].im.is_finite()) {
                    return Err(Error::NonFinite("Herm4 entry"));
                }
                dev = dev.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { m })
    }

    pub fn from_diagonal(d: [f64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, v) in d.into_iter().enumerate() {
            m[i][i] = Complex::new(v, 0.0);
        }
        Self { m }
    }

    pub fn entries(&self) -> &[[Complex; 4]; 4] {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        self.eigen().map(|(vals, _)| vals)
    }

    /// Eigenvalues (descending) and matching orthonormal eigenvectors, by
    /// cyclic complex Jacobi rotations.
    ///
    /// `vectors[k]` is the eigenvector of `values[k]`.
    #[allow(clippy::needless_range_loop)] // paired row updates of the Jacobi rotation
    pub fn eigen(&self) -> Result<([f64; 4], [[Complex; 4]; 4])> {
        let mut a = self.m;
        // Columns of `v` accumulate the eigenvectors.
        let mut v = [[ZERO; 4]; 4];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = ONE;
        }
        let scale = frobenius4(&a).max(1.0);

        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) < JACOBI_TOL * scale {
                converged = true;
                break;
            }
            for p in 0..3 {
                for q in (p + 1)..4 {
                    let apq = a[p][q];
                    let r = apq.norm();
                    if r < f64::MIN_POSITIVE {
                        continue;
                    }
                    // Phase e^{iα} of a_pq; after the diagonal phase the pivot is real.
                    let phase = apq / r;
                    let app = a[p][p].re;
                    let aqq = a[q][q].re;
                    let tau = (aqq - app) / (2.0 * r);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G = diag(1, e^{-iα})·[[c, s], [-s, c]] on the (p,q) block.
                    let gpp = Complex::new(c, 0.0);
                    let gqp = -phase.conj() * s;
                    let gpq = Complex::new(s, 0.0);
                    let gqq = phase.conj() * c;
                    // A <- A G
                    for row in a.iter_mut() {
                        let x = row[p];
                        let y = row[q];
                        row[p] = x * gpp + y * gqp;
                        row[q] = x * gpq + y * gqq;
                    }
                    // A <- G† A
                    for k in 0..4 {
                        let x = a[p][k];
                        let y = a[q][k];
                        a[p][k] = gpp.conj() * x + gqp.conj() * y;
                        a[q][k] = gpq.conj() * x + gqq.conj() * y;
                    }
                    a[p][q] = ZERO;
                    a[q][p] = ZERO;
                    a[p][p].im = 0.0;
                    a[q][q].im = 0.0;
                    for row in v.iter_mut() {
                        let x = row[p];
                        let y = row[q];
                        row[p] = x * gpp + y * gqp;
                        row[q] = x * gpq + y * gqq;
                    }
                }
            }
        }
        if !converged && off_diagonal_norm(&a) >= JACOBI_TOL * scale {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }

        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&i, &j| a[j][j].re.total_cmp(&a[i][i].re));
        let mut values = [0.0; 4];
        let mut vectors = [[ZERO; 4]; 4];
        for (k, &idx) in order.iter().enumerate() {
            values[k] = a[idx][idx].re;
            for row in 0..4 {
                vectors[k][row] = v[row][idx];
            }
        }
        Ok((values, vectors))
    }
}

fn off_diagonal_norm(a: &[[Complex; 4]; 4]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x.norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn frobenius4(a: &[[Complex; 4]; 4]) -> f64 {
    a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit quaternion `w + x·i + y·j + z·k`, identified with the SU(2) element
/// `w·I − i(x·σ_x + y·σ_y + z·σ_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes the four components; fails on a zero or non-finite input.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidParameter {
                what: "quaternion",
                reason: format!("cannot normalize ({w}, {x}, {y}, {z})"),
            });
        }
        Ok(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    /// Rotation by `angle` (right-handed) about `axis`, which need not be normalized.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n.is_finite() && n > 0.0 && angle.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "rotation axis",
                reason: format!("axis {axis:?} with angle {angle} is not usable"),
            });
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self { w: c, x: s * axis[0] / n, y: s * axis[1] / n, z: s * axis[2] / n })
    }

    pub fn norm_deviation(&self) -> f64 {
        (self.dot(self) - 1.0).abs()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn conjugate(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Hamilton product; `a.mul(&b)` corresponds to the matrix product `A·B`.
    pub fn mul(&self, o: &Self) -> Self {
        Self {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    /// Applies the sign convention `w ≥ 0`, with `w ≈ 0` ties broken by making the
    /// first nonzero of (x, y, z) non-negative.
    pub fn canonical(self) -> Self {
        const TIE: f64 = 1e-12;
        let flip = if self.w.abs() > TIE {
            self.w < 0.0
        } else {
            [self.x, self.y, self.z].into_iter().find(|c| c.abs() > TIE).is_some_and(|c| c < 0.0)
        };
        if flip {
            Self { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
        } else {
            self
        }
    }

    pub fn to_su2(&self) -> Mat2C {
        Mat2C::new(
            Complex::new(self.w, -self.z),
            Complex::new(-self.y, -self.x),
            Complex::new(self.y, -self.x),
            Complex::new(self.w, self.z),
        )
    }

    /// Projects a unitary onto SU(2) by removing its determinant phase, then
    /// reads off the quaternion components.
    pub fn from_su2(u: &Mat2C) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NonFinite("quaternion_from_su2 input"));
        }
        let dev = u.unitarity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        let det = u.det();
        let fix = Complex::from_polar(1.0, -0.5 * det.arg());
        let v = u.scale(fix);
        let m = &v.m;
        let w = 0.5 * (m[0][0].re + m[1][1].re);
        let z = 0.5 * (m[1][1].im - m[0][0].im);
        let y = 0.5 * (m[1][0].re - m[0][1].re);
        let x = -0.5 * (m[0][1].im + m[1][0].im);
        Ok(Self::new(w, x, y, z)?.canonical())
    }

    /// 3×3 rotation matrix acting on Bloch vectors.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        mat3_vec(&self.rotation_matrix(), v)
    }
}

pub(crate) fn mat3_vec(a: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

pub(crate) fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `exp(−i·(angle/2)·n̂·σ)` for a unit axis `n̂`.
pub fn rotation_unitary(axis: [f64; 3], angle: f64) -> Result<Mat2C> {
    Ok(UnitQuaternion::from_axis_angle(axis, angle)?.to_su2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn pauli_products() {
        let [x, y, z] = Mat2C::paulis();
        let id = Mat2C::identity();
        assert_eq!(id * id, id);
        assert_eq!(x * x, id);
        assert_eq!(x * y, z.scale(I));
        // σ_jσ_k = δ_jk I + i ε_jkl σ_l on every pair.
        let p = Mat2C::paulis();
        for j in 0..3 {
            for k in 0..3 {
                let mut expect = if j == k { id } else { Mat2C::zero() };
                for (l, pl) in p.iter().enumerate() {
                    let eps = levi_civita(j, k, l);
                    if eps != 0.0 {
                        expect = expect + pl.scale(c(0.0, eps));
                    }
                }
                assert!((p[j] * p[k]).max_abs_diff(&expect) < 1e-15, "{j} {k}");
            }
        }
    }

    fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn traces() {
        assert_eq!(Mat2C::identity().trace(), c(2.0, 0.0));
        for p in Mat2C::paulis() {
            assert_eq!(p.trace(), ZERO);
            assert_eq!(p.scale_re(0.5).trace(), ZERO);
        }
    }

    #[test]
    fn sqrt_examples() {
        let id = Mat2C::identity();
        assert!(herm2_sqrt(&id).unwrap().max_abs_diff(&id) < 1e-15);
        let d = herm2_sqrt(&Mat2C::real(4.0, 0.0, 0.0, 1.0)).unwrap();
        assert!(d.max_abs_diff(&Mat2C::real(2.0, 0.0, 0.0, 1.0)) < 1e-15);

        // (I + 0.6σ_x)/2 has eigenvalues 0.8 on |+⟩ and 0.2 on |−⟩, so its root is
        // √0.8·|+⟩⟨+| + √0.2·|−⟩⟨−| = ½(√0.8+√0.2)·I + ½(√0.8−√0.2)·σ_x.
        let rho = Mat2C::real(0.5, 0.3, 0.3, 0.5);
        let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
        let expect = Mat2C::from_pauli_coefficients(0.5 * (a + b), [0.5 * (a - b), 0.0, 0.0]);
        let s = herm2_sqrt(&rho).unwrap();
        assert!(s.max_abs_diff(&expect) < 1e-14);
        assert!((s * s).max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn sqrt_clamps_and_rejects() {
        let nearly = Mat2C::real(1.0, 0.0, 0.0, -5e-11);
        let s = herm2_sqrt(&nearly).unwrap();
        assert!(s.max_abs_diff(&Mat2C::real(1.0, 0.0, 0.0, 0.0)) < 1e-15);
        assert!(matches!(herm2_sqrt(&Mat2C::real(1.0, 0.0, 0.0, -1e-6)), Err(Error::NotPsd(_))));
        assert!(matches!(herm2_sqrt(&Mat2C::real(1.0, 1.0, 0.0, 1.0)), Err(Error::NotHermitian(_))));
        assert_eq!(herm2_sqrt(&Mat2C::zero()).unwrap(), Mat2C::zero());
    }

    #[test]
    fn herm4_diagonal() {
        let h = Herm4::from_diagonal([1.0, 3.0, 2.0, 4.0]);
        assert_eq!(h.eigenvalues().unwrap(), [4.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn herm4_maximally_entangled_projector() {
        let mut m = [[ZERO; 4]; 4];
        for i in [0, 3] {
            for j in [0, 3] {
                m[i][j] = ONE;
            }
        }
        let ev = Herm4::new(m).unwrap().eigenvalues().unwrap();
        let expect = [2.0, 0.0, 0.0, 0.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn herm4_rejects_non_hermitian() {
        let mut m = [[ZERO; 4]; 4];
        m[0][1] = ONE;
        assert!(matches!(Herm4::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn herm4_eigenvectors_diagonalize() {
        let mut m = [[ZERO; 4]; 4];
        m[0][1] = c(0.3, -0.7);
        m[1][0] = c(0.3, 0.7);
        m[2][3] = c(0.0, 1.1);
        m[3][2] = c(0.0, -1.1);
        m[0][3] = c(-0.2, 0.4);
        m[3][0] = c(-0.2, -0.4);
        m[1][1] = c(0.5, 0.0);
        m[2][2] = c(-1.0, 0.0);
        let h = Herm4::new(m).unwrap();
        let (vals, vecs) = h.eigen().unwrap();
        for k in 0..4 {
            for i in 0..4 {
                let hv: Complex = (0..4).map(|j| m[i][j] * vecs[k][j]).sum();
                assert!((hv - vecs[k][i] * vals[k]).norm() < 1e-12);
            }
        }
        assert!((vals.iter().sum::<f64>() - h.trace()).abs() < 1e-12);
    }

    #[test]
    fn quaternion_examples() {
        let q = UnitQuaternion::from_su2(&Mat2C::identity()).unwrap();
        assert_eq!(q, UnitQuaternion::IDENTITY);

        let minus_i_x = Mat2C::pauli_x().scale(c(0.0, -1.0));
        let q = UnitQuaternion::from_su2(&minus_i_x).unwrap();
        assert!((q.x - 1.0).abs() < 1e-15 && q.w.abs() < 1e-15);

        // exp(−i(π/2)σ_y/2) = cos(π/4)·I − i·sin(π/4)·σ_y
        let h = std::f64::consts::FRAC_PI_4;
        let u = Mat2C::identity().scale_re(h.cos()) - Mat2C::pauli_y().scale(c(0.0, h.sin()));
        let q = UnitQuaternion::from_su2(&u).unwrap();
        assert!((q.w - h.cos()).abs() < 1e-15);
        assert!((q.y - h.sin()).abs() < 1e-15);
        assert!(q.x.abs() < 1e-15 && q.z.abs() < 1e-15);

        // Global phase and sign do not matter.
        let q2 = UnitQuaternion::from_su2(&u.scale(Complex::from_polar(1.0, 2.3))).unwrap();
        assert!((q.dot(&q2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quaternion_tie_break() {
        let q = UnitQuaternion { w: 0.0, x: 0.0, y: -1.0, z: 0.0 }.canonical();
        assert_eq!(q.y, 1.0);
        let q = UnitQuaternion { w: -0.5, x: 0.5, y: 0.5, z: 0.5 }.canonical();
        assert_eq!(q.w, 0.5);
        assert_eq!(q.x, -0.5);
    }

    #[test]
    fn quaternion_rejects_non_unitary() {
        let m = Mat2C::real(1.0, 0.1, 0.0, 1.0);
        assert!(matches!(UnitQuaternion::from_su2(&m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn hamilton_product_matches_matrix_product() {
        let a = UnitQuaternion::from_axis_angle([1.0, 2.0, -0.5], 0.7).unwrap();
        let b = UnitQuaternion::from_axis_angle([-0.3, 0.1, 1.0], 2.1).unwrap();
        let prod = a.mul(&b).to_su2();
        assert!(prod.max_abs_diff(&(a.to_su2() * b.to_su2())) < 1e-15);
    }

    #[test]
    fn rotation_matrix_matches_adjoint_action() {
        let q = UnitQuaternion::from_axis_angle([0.2, -1.0, 0.4], 1.3).unwrap();
        let u = q.to_su2();
        for (k, p) in Mat2C::paulis().iter().enumerate() {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let rotated = q.rotate(e);
            let (_, coeffs) = u.sandwich(p).pauli_coefficients();
            for j in 0..3 {
                assert!((0.5 * coeffs[j] - rotated[j]).abs() < 1e-14);
            }
        }
    }
}
