//! State fidelities and the average map fidelity between a target operation
//! and a general trace-preserving map.
//!
//! All average-fidelity estimators compute the same Haar average
//! `(1/4π)∮ Tr(T[ψ]·M[ψ]) dΩ` over pure inputs `ψ`:
//!
//! * [`average_fidelity_six_state`]: mean over the six cardinal states (reference);
//! * [`average_fidelity_pauli`]: `½ + ⅓ Σ_j Tr(T[σ_j/2]·M[σ_j/2])`;
//! * [`average_fidelity_probe_set`]: any weighted tetrahedron/octahedron;
//! * [`average_fidelity_quadrature`]: Gauss–Legendre in `cos θ` times a uniform rule in `φ`;
//! * [`average_fidelity_monte_carlo`]: seeded Haar sampling.
//!
//! The integrand is a degree-2 polynomial in the Bloch coordinates, so every
//! rule that integrates degree-2 polynomials on the sphere exactly gives the
//! exact value.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{QubitMap, TargetMap, TP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{herm2_sqrt, Mat2C};
use crate::states::{cardinal_probe_set, BlochVector, DensityMatrix, ProbeSet, CARDINAL_DIRECTIONS};

/// A fidelity. Keeps the unclamped value; [`FidelityValue::value`] clamps to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FidelityValue {
    raw: f64,
}

impl FidelityValue {
    pub fn new(raw: f64) -> Self {
        Self { raw }
    }

    pub fn value(&self) -> f64 {
        self.raw.clamp(0.0, 1.0)
    }

    pub fn raw(&self) -> f64 {
        self.raw
    }
}

impl fmt::Display for FidelityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value().fmt(f)
    }
}

/// Uhlmann fidelity `(Tr√(√ρ₁ ρ₂ √ρ₁))²`, returned from the qubit closed form
/// `Tr(ρ₁ρ₂) + 2√(det ρ₁ · det ρ₂)`.
///
/// Debug builds also evaluate the square-root chain and assert agreement.
pub fn uhlmann_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<FidelityValue> {
    let closed = uhlmann_closed_form(rho1, rho2);
    #[cfg(debug_assertions)]
    {
        let chain = uhlmann_sqrt_chain(rho1, rho2)?;
        let tol = chain_tolerance(rho1, rho2);
        debug_assert!((chain - closed).abs() <= tol, "Uhlmann routes disagree: chain {chain}, closed form {closed}");
    }
    Ok(FidelityValue::new(closed))
}

/// Agreement bound between the two Uhlmann routes. When either state is
/// (nearly) pure the square roots amplify roundoff in its tiny determinant, so
/// the bound widens to the size of that amplified roundoff.
#[cfg(debug_assertions)]
fn chain_tolerance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    let d = rho1.matrix().det().re.min(rho2.matrix().det().re);
    if d > 1e-12 {
        1e-9
    } else {
        1e-9 + 8.0 * f64::EPSILON.sqrt()
    }
}

/// Determinants at or below this are roundoff on a pure state and count as
/// zero, so a pure input reduces the closed form exactly to `Tr(ψρ)`. Without
/// this the square root would lift `1e-17`-sized roundoff to `1e-9`.
pub const PURE_DET_CUTOFF: f64 = 4.0 * f64::EPSILON;

pub fn uhlmann_closed_form(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    let overlap = rho1.matrix().trace_product(rho2.matrix());
    let det = |rho: &DensityMatrix| {
        let d = rho.matrix().det().re;
        if d <= PURE_DET_CUTOFF {
            0.0
        } else {
            d
        }
    };
    overlap + 2.0 * (det(rho1) * det(rho2)).sqrt()
}

/// The defining square-root chain, evaluated with [`herm2_sqrt`].
pub fn uhlmann_sqrt_chain(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let s = herm2_sqrt(rho1.matrix())?;
    let inner = s * *rho2.matrix() * s;
    let inner = (inner + inner.dagger()).scale_re(0.5);
    let tr = herm2_sqrt(&inner)?.trace().re;
    Ok(tr * tr)
}

/// `Tr(ψρ)` for a pure `ψ`.
pub fn pure_overlap_fidelity(psi: &DensityMatrix, rho: &DensityMatrix) -> Result<FidelityValue> {
    psi.require_pure()?;
    Ok(FidelityValue::new(psi.matrix().trace_product(rho.matrix())))
}

#[inline]
fn overlap<M: QubitMap + ?Sized>(t: &TargetMap, m: &M, rho: &Mat2C) -> f64 {
    t.apply_operator(rho).trace_product(&m.apply_operator(rho))
}

/// `Tr(T[ψ]·M[ψ])` for a pure input `ψ`.
pub fn state_fidelity_under_map<M: QubitMap + ?Sized>(
    t: &TargetMap,
    m: &M,
    psi: &DensityMatrix,
) -> Result<FidelityValue> {
    psi.require_pure()?;
    Ok(FidelityValue::new(overlap(t, m, psi.matrix())))
}

/// Fidelities of the six cardinal states in the order +x, −x, +y, −y, +z, −z.
pub fn cardinal_state_fidelities<M: QubitMap + ?Sized>(t: &TargetMap, m: &M) -> [f64; 6] {
    let set = cardinal_probe_set();
    std::array::from_fn(|k| overlap(t, m, set.states[k].matrix()))
}

pub fn average_fidelity_six_state<M: QubitMap + ?Sized>(t: &TargetMap, m: &M) -> FidelityValue {
    FidelityValue::new(cardinal_state_fidelities(t, m).iter().sum::<f64>() / 6.0)
}

/// `Σ_k w_k Tr(T[ρ_k]·M[ρ_k])` over a probe set.
pub fn average_fidelity_probe_set<M: QubitMap + ?Sized>(t: &TargetMap, m: &M, probes: &ProbeSet) -> FidelityValue {
    FidelityValue::new(probes.iter().map(|(rho, w)| w * overlap(t, m, rho.matrix())).sum())
}

/// Pauli-basis form `½ + ⅓ Σ_j Tr(T[σ_j/2]·M[σ_j/2])`, with `M[σ_j/2]`
/// evaluated as `M[ρ_{+j}] − M[ρ_0]`. The constant `½` relies on `M` being
/// trace preserving, which is checked.
pub fn average_fidelity_pauli<M: QubitMap + ?Sized>(t: &TargetMap, m: &M) -> Result<FidelityValue> {
    let dev = m.trace_deviation();
    if dev > TP_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let mixed = *DensityMatrix::maximally_mixed().matrix();
    let t_mixed = t.apply_operator(&mixed);
    let m_mixed = m.apply_operator(&mixed);
    let sum: f64 = [0, 2, 4]
        .into_iter()
        .map(|k| {
            let d = CARDINAL_DIRECTIONS[k];
            let rho = *DensityMatrix::from_bloch(BlochVector { x: d[0], y: d[1], z: d[2] }).matrix();
            let t_half_sigma = t.apply_operator(&rho) - t_mixed;
            let m_half_sigma = m.apply_operator(&rho) - m_mixed;
            t_half_sigma.trace_product(&m_half_sigma)
        })
        .sum();
    Ok(FidelityValue::new(0.5 + sum / 3.0))
}

/// Node counts for the product rule on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    n_theta: usize,
    n_phi: usize,
}

impl QuadratureSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 4 {
            return Err(Error::InvalidParameter {
                what: "quadrature",
                reason: format!("need n_theta >= 2 and n_phi >= 4, got ({n_theta}, {n_phi})"),
            });
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_theta: 2, n_phi: 4 }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product-rule approximation of the Haar average: Gauss–Legendre in `u = cos θ`
/// and the uniform (trapezoid) rule in `φ`. Exact for `n_theta ≥ 2`, `n_phi ≥ 4`.
pub fn average_fidelity_quadrature<M: QubitMap + ?Sized>(t: &TargetMap, m: &M, q: &QuadratureSpec) -> FidelityValue {
    let (nodes, weights) = gauss_legendre(q.n_theta);
    let dphi = 2.0 * std::f64::consts::PI / q.n_phi as f64;
    let mut total = 0.0;
    for (&u, &w) in nodes.iter().zip(&weights) {
        let s = (1.0 - u * u).max(0.0).sqrt();
        let ring: f64 = (0..q.n_phi)
            .map(|k| {
                let (sp, cp) = (dphi * k as f64).sin_cos();
                let rho = DensityMatrix::from_bloch(BlochVector { x: s * cp, y: s * sp, z: u });
                overlap(t, m, rho.matrix())
            })
            .sum();
        total += w * ring / q.n_phi as f64;
    }
    // ∫du over [−1, 1] has measure 2.
    FidelityValue::new(0.5 * total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloSpec {
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloSpec {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter { what: "monte carlo", reason: "samples must be at least 1".into() });
        }
        Ok(Self { samples, seed })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub fidelity: FidelityValue,
    /// Sample standard deviation over `√n`; zero for a single sample.
    pub standard_error: f64,
}

/// Samples per independent random stream.
const MC_CHUNK: u64 = 8192;

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Self = Self { n: 0.0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Self) -> Self {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Self { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

/// Mean of `Tr(T[ψ]·M[ψ])` over Haar-random pure `ψ` (`cos θ ~ U[−1,1]`, `φ ~ U[0,2π)`).
///
/// Samples are drawn in fixed-size chunks; chunk `k` uses ChaCha8 seeded with
/// `seed` on stream `k`. Chunks run in parallel and are merged in index order,
/// so the result depends only on `(seed, samples)`.
pub fn average_fidelity_monte_carlo<M: QubitMap + Sync + ?Sized>(
    t: &TargetMap,
    m: &M,
    spec: &MonteCarloSpec,
) -> MonteCarloEstimate {
    let chunks = spec.samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(k);
            let len = MC_CHUNK.min(spec.samples - k * MC_CHUNK);
            let mut acc = Moments::EMPTY;
            for _ in 0..len {
                let u: f64 = rng.random_range(-1.0..=1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
                let s = (1.0 - u * u).max(0.0).sqrt();
                let rho = DensityMatrix::from_bloch(BlochVector { x: s * phi.cos(), y: s * phi.sin(), z: u });
                acc.push(overlap(t, m, rho.matrix()));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::EMPTY, Moments::merge);
    let standard_error =
        if total.n > 1.0 { (total.m2 / (total.n - 1.0)).max(0.0).sqrt() / total.n.sqrt() } else { 0.0 };
    MonteCarloEstimate { fidelity: FidelityValue::new(total.mean), standard_error }
}
