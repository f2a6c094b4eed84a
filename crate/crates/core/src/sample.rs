//! Random states, unitaries and maps for property tests and benchmarks.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{AffineBlochMap, KrausChannel, TargetKind, TargetMap};
use crate::linalg::{herm2_sqrt, Complex, Mat2C, UnitQuaternion};
use crate::states::{BlochVector, DensityMatrix};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-uniform point on the unit sphere: `cos θ` uniform in [−1, 1], `φ` uniform in [0, 2π).
pub fn sphere_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let u: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - u * u).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), u]
}

pub fn haar_pure_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let [x, y, z] = sphere_point(rng);
    DensityMatrix::from_bloch(BlochVector { x, y, z })
}

/// Uniform in the Bloch ball.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let r: f64 = rng.random::<f64>().cbrt();
    let [x, y, z] = sphere_point(rng);
    DensityMatrix::from_bloch(BlochVector { x: r * x, y: r * y, z: r * z })
}

pub fn haar_quaternion<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let q = [normal(rng), normal(rng), normal(rng), normal(rng)];
        if let Ok(q) = UnitQuaternion::new(q[0], q[1], q[2], q[3]) {
            return q;
        }
    }
}

/// Haar-random element of U(2): an SU(2) element times a uniform global phase.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2C {
    let phase: f64 = rng.random_range(0.0..2.0 * PI);
    haar_quaternion(rng).to_su2().scale(Complex::from_polar(1.0, phase))
}

pub fn random_target<R: Rng + ?Sized>(rng: &mut R, kind: TargetKind) -> TargetMap {
    TargetMap::new(haar_unitary(rng), kind).expect("Haar unitary is unitary")
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R) -> Mat2C {
    let mut c = || Complex::new(normal(rng), normal(rng));
    Mat2C::new(c(), c(), c(), c())
}

/// Random CPTP channel with `n_ops` Kraus operators: Ginibre matrices `G_i`
/// normalized as `K_i = G_i·S^{-1/2}`, `S = Σ G_i†G_i`.
pub fn random_kraus_channel<R: Rng + ?Sized>(rng: &mut R, n_ops: usize) -> KrausChannel {
    assert!((1..=4).contains(&n_ops), "1 to 4 Kraus operators");
    loop {
        let gs: Vec<Mat2C> = (0..n_ops).map(|_| ginibre(rng)).collect();
        let s = gs.iter().fold(Mat2C::zero(), |acc, g| acc + g.dagger() * *g);
        let Some(inv_root) = herm2_sqrt(&s).ok().and_then(|r| r.inverse()) else {
            continue;
        };
        if let Ok(ch) = KrausChannel::new(gs.iter().map(|g| *g * inv_root).collect()) {
            return ch;
        }
    }
}

/// Random trace-preserving affine map sending the Bloch ball into itself. Most
/// draws are not completely positive.
pub fn random_affine_map<R: Rng + ?Sized>(rng: &mut R) -> AffineBlochMap {
    let a: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| normal(rng)));
    let t: [f64; 3] = std::array::from_fn(|_| normal(rng));
    let fro = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let tn = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    // Split the unit budget between the linear part and the shift.
    let share: f64 = rng.random_range(0.5..1.0);
    let sa = share / fro;
    let st = (1.0 - share) / tn.max(f64::MIN_POSITIVE);
    AffineBlochMap::new(a.map(|r| r.map(|v| v * sa)), t.map(|v| v * st))
        .expect("norm bound keeps the ball inside itself")
}
