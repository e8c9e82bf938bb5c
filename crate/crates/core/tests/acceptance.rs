//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinqc::analysis::{concurrence, gate_error_sweep, thermal_state, SweepConfig};
use spinqc::frame::{
    eigen_residual, eigenstates, factorization_distance, verify_field_compensation,
    verify_isotropization,
};
use spinqc::gates::{
    cnot, corrected_swap, phase_shifted_swap, phased_swap_action, single_phase_swap_action,
    sqrt_swap, swap_time,
};
use spinqc::model::{build_hamiltonian, build_isotropic};
use spinqc::spinalg::{herm_eig, phase_distance, StateVector};
use spinqc::{ExchangeParams, Orientation};

const TAN_OMEGAS: [f64; 4] = [1e-4, 5e-3, 0.1, 0.5];
const THETAS: [f64; 4] = [0.0, PI / 6.0, 5.0 * PI / 6.0, 1.5 * PI];
const TIGHT: f64 = 1e-12;

fn grid() -> Vec<ExchangeParams> {
    let mut out = Vec::new();
    for &t in &TAN_OMEGAS {
        for &theta in &THETAS {
            out.push(ExchangeParams::new(1.0, Orientation::Xy { theta }, t).unwrap());
        }
        out.push(ExchangeParams::new(1.0, Orientation::Z, t).unwrap());
    }
    out
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        o.ok = false;
    }
    o.detail = format!(
        "{} [{:.3}s, limit {}s]",
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    o
}

fn isotropization() -> Outcome {
    let worst = grid().iter().map(verify_isotropization).fold(0.0, f64::max);
    outcome(
        worst < TIGHT,
        format!("max |T H T^dag - H0| = {worst:.2e} (< 1e-12)"),
    )
}

fn factorization() -> Outcome {
    let worst = grid()
        .iter()
        .map(|p| factorization_distance(p).unwrap())
        .fold(0.0, f64::max);
    outcome(
        worst < TIGHT,
        format!("max phase distance = {worst:.2e} (< 1e-12)"),
    )
}

fn eigen() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    for p in grid() {
        let h = build_hamiltonian(&p);
        for s in eigenstates(&p) {
            worst_res = worst_res.max(eigen_residual(&h, &s.state));
        }
        let values = herm_eig(&h).unwrap().values;
        let expected = [-0.75 * p.j(), 0.25 * p.j(), 0.25 * p.j(), 0.25 * p.j()];
        for (v, e) in values.iter().zip(expected) {
            worst_spec = worst_spec.max((v - e).abs());
        }
    }
    outcome(
        worst_res < TIGHT && worst_spec < TIGHT,
        format!("eigen residual {worst_res:.2e}, spectrum deviation {worst_spec:.2e} (< 1e-12)"),
    )
}

fn sweep_decades() -> Outcome {
    let unc = gate_error_sweep(&SweepConfig::reference(false))
        .unwrap()
        .rows;
    let cor = gate_error_sweep(&SweepConfig::reference(true))
        .unwrap()
        .rows;
    let span = |rows: &[spinqc::analysis::SweepRow]| {
        rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
            (lo.min(r.error), hi.max(r.error))
        })
    };
    let (ulo, uhi) = span(&unc);
    let (clo, chi) = span(&cor);
    let unc_ok = ulo >= 5e-6 / 3.0 && uhi <= 1e-5 * 3.0;
    let cor_ok = clo >= 1e-8 / 3.0 && chi <= 5e-7 * 3.0;
    let ordered = unc.len() == cor.len()
        && unc.iter().zip(&cor).all(|(u, c)| {
            u.delta_omega_ratio == c.delta_omega_ratio
                && u.delta_theta_ratio == c.delta_theta_ratio
                && c.error <= u.error
        });
    outcome(
        unc_ok && cor_ok && ordered,
        format!(
            "uncorrected [{ulo:.2e}, {uhi:.2e}] in [5e-6, 1e-5] x3; corrected [{clo:.2e}, {chi:.2e}] in [1e-8, 5e-7] x3; corrected <= uncorrected at all {} points: {ordered}",
            unc.len()
        ),
    )
}

fn gate_constructions() -> Outcome {
    let (mut sw, mut root, mut cn): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for p in grid() {
        let swap = corrected_swap(&p).unwrap();
        sw = sw.max(swap.phase_distance_to_target);
        let r = sqrt_swap(&p).unwrap().matrix;
        root = root.max(phase_distance(&(&r * &r), &swap.matrix).unwrap());
        cn = cn.max(cnot(&p).unwrap().phase_distance_to_target);
    }
    outcome(
        sw < TIGHT && root < TIGHT && cn < 1e-10,
        format!(
            "swap {sw:.2e} (< 1e-12), sqrt_swap^2 {root:.2e} (< 1e-12), cnot {cn:.2e} (< 1e-10)"
        ),
    )
}

fn random_qubit(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}

/// Worst state distance between the phase-shifted swap and `action` over
/// 100 random product states per (params, B).
fn psw_worst(
    action: fn([Complex64; 2], [Complex64; 2], f64, f64) -> spinqc::Result<StateVector>,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst: f64 = 0.0;
    for p in grid() {
        for b in [0.1 * p.j(), p.j()] {
            let u = phase_shifted_swap(&p, b).unwrap().matrix;
            let tau = swap_time(p.j());
            for _ in 0..100 {
                let (q1, q2) = (random_qubit(&mut rng), random_qubit(&mut rng));
                let out = u.apply(&StateVector::product(q1, q2).unwrap()).unwrap();
                let expected = action(q1, q2, b, tau).unwrap();
                worst = worst.max(out.phase_distance(&expected));
            }
        }
    }
    worst
}

fn compensating_fields() -> Outcome {
    let mut field: f64 = 0.0;
    for p in grid() {
        for b in [0.1 * p.j(), p.j()] {
            field = field.max(verify_field_compensation(&p, b));
        }
    }
    let literal = psw_worst(single_phase_swap_action);
    let physical = psw_worst(phased_swap_action);
    println!("  info: swap with e^(-iB tau) on |0> of both qubits matches within {physical:.2e}");
    outcome(
        field < TIGHT && literal < 1e-10,
        format!(
            "field residual {field:.2e} (< 1e-12); swap with e^(iB tau/2) on the first qubit's |0> only: worst distance {literal:.2e} (< 1e-10)"
        ),
    )
}

fn thermal() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid() {
        let h = build_hamiltonian(&p);
        let h0 = build_isotropic(p.j()).unwrap();
        for bj in [0.1, 1.0, 10.0] {
            let beta = bj / p.j();
            let c = concurrence(&thermal_state(&h, beta).unwrap()).unwrap();
            let c0 = concurrence(&thermal_state(&h0, beta).unwrap()).unwrap();
            worst = worst.max((c - c0).abs());
        }
    }
    outcome(
        worst < TIGHT,
        format!("max |C(rho_H) - C(rho_H0)| = {worst:.2e} (< 1e-12)"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_spinqc"))
            .args(["sweep", "--out"])
            .arg(&path)
            .stdout(Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "sweep exited with {status}");
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    outcome(
        a == b && !a.is_empty(),
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("1 isotropization", Duration::from_secs(1), isotropization),
        (
            "2 local factorization",
            Duration::from_secs(1),
            factorization,
        ),
        ("3 closed-form eigenstates", Duration::from_secs(1), eigen),
        (
            "4 misestimation error decades",
            Duration::from_secs(10),
            sweep_decades,
        ),
        (
            "5 gate constructions",
            Duration::from_secs(1),
            gate_constructions,
        ),
        (
            "6 compensating fields",
            Duration::from_secs(2),
            compensating_fields,
        ),
        (
            "7 thermal concurrence invariance",
            Duration::from_secs(2),
            thermal,
        ),
        ("8 sweep determinism", Duration::from_secs(30), determinism),
    ];
    let mut failed = Vec::new();
    for (name, limit, check) in criteria {
        let o = timed(limit, check);
        println!(
            "{} criterion {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.ok {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
