//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Runs without the
//! libtest harness so the lines always reach stdout; exits nonzero on failure.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use qfid::channels::{named_channel, Channel, KrausChannel, TargetKind, TargetMap};
use qfid::fidelity::{
    average_fidelity_monte_carlo, average_fidelity_pauli, average_fidelity_probe_set, average_fidelity_quadrature,
    average_fidelity_six_state, pure_overlap_fidelity, uhlmann_closed_form, uhlmann_sqrt_chain, MonteCarloSpec,
    QuadratureSpec,
};
use qfid::linalg::Mat2C;
use qfid::pulses::{point_to_point_fidelity, quaternion_fidelity, sequence_unitary, ErrorModel, PulseSequence};
use qfid::sample::{
    haar_pure_state, haar_quaternion, haar_unitary, random_affine_map, random_kraus_channel, random_mixed_state,
    random_target,
};
use qfid::states::{rotated_octahedron_probe_set, tetrahedron_probe_set, BlochVector, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random (target, map) pair covering unitary and anti-unitary targets, CP
/// Kraus channels of every rank, and trace-preserving maps that are not CP.
fn random_pair(rng: &mut ChaCha8Rng, i: usize) -> (TargetMap, Channel) {
    let kind = if i.is_multiple_of(2) { TargetKind::Unitary } else { TargetKind::AntiUnitary };
    let target = random_target(rng, kind);
    let channel: Channel = if i % 3 == 2 {
        random_affine_map(rng).into()
    } else {
        let n_ops = rng.random_range(1..=4);
        random_kraus_channel(rng, n_ops).into()
    };
    (target, channel)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let quad = QuadratureSpec::default();
    let (mut worst_exact, mut worst_quad) = (0.0f64, 0.0f64);
    let mut non_cp = 0;
    for i in 0..200 {
        let (t, m) = random_pair(&mut r, i);
        if !m.is_cp().unwrap() {
            non_cp += 1;
        }
        let six = average_fidelity_six_state(&t, &m).raw();
        let pauli = average_fidelity_pauli(&t, &m).unwrap().raw();
        let tetra = average_fidelity_probe_set(&t, &m, &tetrahedron_probe_set()).raw();
        let octa = average_fidelity_probe_set(&t, &m, &rotated_octahedron_probe_set(&haar_quaternion(&mut r))).raw();
        let q = average_fidelity_quadrature(&t, &m, &quad).raw();
        for v in [pauli, tetra, octa] {
            worst_exact = worst_exact.max((v - six).abs());
        }
        worst_quad = worst_quad.max((q - six).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_exact < 1e-10 && worst_quad < 1e-9 && secs < 5.0 && non_cp > 0,
        format!(
            "max |Δ| exact estimators {worst_exact:.2e}, quadrature {worst_quad:.2e}, {non_cp} non-CP maps, {secs:.3} s"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let coarse = QuadratureSpec::new(2, 4).unwrap();
    let fine = QuadratureSpec::new(20, 40).unwrap();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let (t, m) = random_pair(&mut r, i);
        let a = average_fidelity_quadrature(&t, &m, &coarse).raw();
        let b = average_fidelity_quadrature(&t, &m, &fine).raw();
        worst = worst.max((a - b).abs());
    }
    outcome(worst < 1e-11, format!("max |Q(2,4) - Q(20,40)| = {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let t = TargetMap::identity();
    type Oracle = fn(f64) -> f64;
    let oracles: [(&str, Oracle); 3] = [
        ("depolarizing", |p| 1.0 - p / 2.0),
        ("amplitude_damping", |g| (4.0 - g + 2.0 * (1.0 - g).sqrt()) / 6.0),
        ("phase_damping", |l| 0.5 + (2.0 * (1.0 - l).sqrt() + 1.0) / 6.0),
    ];
    let mut worst = 0.0f64;
    for (name, oracle) in oracles {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let m = named_channel(name, p).unwrap();
            worst = worst.max((average_fidelity_six_state(&t, &m).raw() - oracle(p)).abs());
        }
    }
    outcome(worst < 1e-12, format!("3 channels x 11 points, max |Δ| = {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = haar_unitary(&mut r);
        let v = haar_unitary(&mut r);
        let t = TargetMap::unitary(u).unwrap();
        let m = KrausChannel::unitary(v).unwrap();
        let overlap = (u.dagger() * v).trace().norm();
        let oracle = (2.0 + overlap * overlap) / 6.0;
        worst = worst.max((average_fidelity_six_state(&t, &m).raw() - oracle).abs());
    }
    outcome(worst < 1e-10, format!("100 pairs, max |Δ| = {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let f = average_fidelity_six_state(&TargetMap::conjugation(), &KrausChannel::identity()).raw();
    let d = (f - 2.0 / 3.0).abs();
    outcome(d < 1e-12, format!("F = {f:.17}, |Δ| = {d:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut worst_chain = 0.0f64;
    let mut worst_pure = 0.0f64;
    for _ in 0..200 {
        let a = random_mixed_state(&mut r);
        let b = random_mixed_state(&mut r);
        let closed = uhlmann_closed_form(&a, &b);
        let chain = uhlmann_sqrt_chain(&a, &b).unwrap();
        worst_chain = worst_chain.max((closed - chain).abs());

        let psi = haar_pure_state(&mut r);
        let overlap = pure_overlap_fidelity(&psi, &b).unwrap().raw();
        worst_pure = worst_pure.max((overlap - uhlmann_closed_form(&psi, &b)).abs());
        worst_pure = worst_pure.max((overlap - uhlmann_closed_form(&b, &psi)).abs());
    }
    outcome(
        worst_chain < 1e-9 && worst_pure < 1e-9,
        format!("200 pairs, closed vs chain {worst_chain:.2e}, pure specialization {worst_pure:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let sigma_x = TargetMap::unitary(Mat2C::pauli_x()).unwrap();
    let m = KrausChannel::identity();
    let mut within = 0;
    for seed in 0..100 {
        let est = average_fidelity_monte_carlo(&sigma_x, &m, &MonteCarloSpec::new(100_000, seed).unwrap());
        if (est.fidelity.raw() - 1.0 / 3.0).abs() < 5.0 * est.standard_error {
            within += 1;
        }
    }
    let spec = MonteCarloSpec::new(100_000, 12345).unwrap();
    let a = average_fidelity_monte_carlo(&sigma_x, &m, &spec);
    let b = average_fidelity_monte_carlo(&sigma_x, &m, &spec);
    let identical = a.fidelity.raw().to_bits() == b.fidelity.raw().to_bits()
        && a.standard_error.to_bits() == b.standard_error.to_bits();
    outcome(within >= 97 && identical, format!("{within}/100 seeds within 5 SE, repeat run bit-identical: {identical}"))
}

fn criterion_8() -> Outcome {
    let plain = PulseSequence::plain_180x();
    let composite = PulseSequence::composite_90x_180y_90x();
    let start = DensityMatrix::from_bloch(BlochVector::new(0.0, 0.0, 1.0).unwrap());
    let target = DensityMatrix::from_bloch(BlochVector::new(0.0, 0.0, -1.0).unwrap());
    let ideal_plain = sequence_unitary(&plain, &ErrorModel::ideal());
    let ideal_composite = sequence_unitary(&composite, &ErrorModel::ideal());

    let mut ordered = true;
    let mut worst_sin = 0.0f64;
    let mut worst_bridge = 0.0f64;
    for eps in [-0.2, -0.1, -0.05, 0.05, 0.1, 0.2] {
        let e = ErrorModel::new(eps, 0.0).unwrap();
        let inf_plain = 1.0 - point_to_point_fidelity(&plain, &e, &start, &target).unwrap().raw();
        let inf_composite = 1.0 - point_to_point_fidelity(&composite, &e, &start, &target).unwrap().raw();
        ordered &= inf_composite < inf_plain;
        worst_sin = worst_sin.max((inf_plain - (PI * eps / 2.0).sin().powi(2)).abs());
        for (seq, u) in [(&plain, ideal_plain), (&composite, ideal_composite)] {
            let v = sequence_unitary(seq, &e);
            let qf = quaternion_fidelity(&u, &v).unwrap();
            worst_bridge = worst_bridge.max(((u.dagger() * v).trace().norm() - 2.0 * qf).abs());
        }
    }
    outcome(
        ordered && worst_sin < 1e-12 && worst_bridge < 1e-10,
        format!(
            "composite < plain infidelity: {ordered}, |1-F - sin²(πε/2)| {worst_sin:.2e}, bridge {worst_bridge:.2e}"
        ),
    )
}

fn testdata() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata")
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qfid");
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for name in ["sweep_plain", "sweep_composite"] {
        let out = dir.path().join(format!("{name}.csv"));
        let status = Command::new(bin)
            .args(["sweep", "--quiet"])
            .arg(testdata().join(format!("{name}.json")))
            .arg("-o")
            .arg(&out)
            .status()
            .unwrap();
        let expected = std::fs::read(testdata().join(format!("{name}.expected.csv"))).unwrap();
        let same = status.success() && std::fs::read(&out).map(|got| got == expected).unwrap_or(false);
        pass &= same;
        notes.push(format!("{name} byte-identical: {same}"));
    }
    let mut examples: Vec<PathBuf> = std::fs::read_dir(testdata())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    examples.sort();
    let mut verified = 0;
    for ex in &examples {
        let status = Command::new(bin).args(["verify", "--quiet"]).arg(ex).output().unwrap().status;
        if status.code() == Some(0) {
            verified += 1;
        } else {
            pass = false;
            notes.push(format!("verify {} exited {:?}", ex.display(), status.code()));
        }
    }
    notes.push(format!("verify exit 0 on {verified}/{} examples", examples.len()));
    outcome(pass && !examples.is_empty(), notes.join(", "))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 9] = [
        ("estimator equivalence", criterion_1),
        ("quadrature exactness", criterion_2),
        ("closed-form noise oracles", criterion_3),
        ("two-unitary oracle", criterion_4),
        ("conjugation vs identity = 2/3", criterion_5),
        ("Uhlmann consistency", criterion_6),
        ("Monte Carlo coverage and determinism", criterion_7),
        ("composite pulses", criterion_8),
        ("CLI sweep reproducibility and verify", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!("[{}] {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
