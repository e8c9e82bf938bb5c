//! The local frame rotation `T = U₁⊗U₂` that maps the anisotropic
//! Hamiltonian onto `H₀ = J S₁·S₂`, its ZYZ factorization, and the
//! closed-form eigenstates.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::model::{
    build_hamiltonian, build_isotropic, build_zeeman, compensating_fields, spin_operators,
    ExchangeParams, Orientation,
};
use crate::spinalg::{cis, kron, ComplexMatrix, StateVector, I, ONE};

/// Closed-form `T` for the given couplings.
pub fn rotation_matrix(p: &ExchangeParams) -> ComplexMatrix {
    let omega = p.omega();
    match p.orientation() {
        Orientation::Xy { theta } => {
            let (c, s) = ((omega / 4.0).cos(), (omega / 4.0).sin());
            let (cc, ss, cs) = (c * c, s * s, c * s);
            let e = |phi: f64, amp: f64| cis(phi) * amp;
            let re = |x: f64| Complex64::new(x, 0.0);
            ComplexMatrix::from_rows(&[
                vec![
                    e(theta - FRAC_PI_4, cc),
                    e(FRAC_PI_4, cs),
                    e(FRAC_PI_4, -cs),
                    e(-(theta + FRAC_PI_4), ss),
                ],
                vec![
                    e(theta + FRAC_PI_2, cs),
                    re(cc),
                    re(ss),
                    e(-(theta + FRAC_PI_2), cs),
                ],
                vec![
                    e(theta - FRAC_PI_2, cs),
                    re(ss),
                    re(cc),
                    e(-(theta - FRAC_PI_2), cs),
                ],
                vec![
                    e(theta + FRAC_PI_4, ss),
                    e(-FRAC_PI_4, cs),
                    e(-FRAC_PI_4, -cs),
                    e(-(theta - FRAC_PI_4), cc),
                ],
            ])
            .expect("4×4")
        }
        Orientation::Z => ComplexMatrix::diag(&[ONE, cis(-omega / 2.0), cis(omega / 2.0), ONE]),
    }
}

/// `R^z(α)·R^y(γ)·R^z(β)` with `R^a(φ) = e^{iφ S^a}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EulerZyz {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl EulerZyz {
    pub fn new(alpha: f64, gamma: f64, beta: f64) -> Self {
        Self {
            alpha: wrap_angle(alpha),
            gamma: wrap_angle(gamma),
            beta: wrap_angle(beta),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        &(&rz(self.alpha) * &ry(self.gamma)) * &rz(self.beta)
    }
}

/// Map into `(−2π, 2π]`. Half-angle rotations have period 4π, so this
/// leaves the rotation matrix unchanged.
fn wrap_angle(a: f64) -> f64 {
    let period = 4.0 * PI;
    let mut w = a.rem_euclid(period);
    if w > 2.0 * PI {
        w -= period;
    }
    if w <= -2.0 * PI {
        w += period;
    }
    w
}

/// `e^{iα S^z}` on one qubit.
pub fn rz(alpha: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[cis(alpha / 2.0), cis(-alpha / 2.0)])
}

/// `e^{iγ S^y}` on one qubit.
pub fn ry(gamma: f64) -> ComplexMatrix {
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    ComplexMatrix::from_real_rows([[c, s], [-s, c]])
}

/// Per-qubit Euler angles plus a global phase, realizing `T = U₁⊗U₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotationPlan {
    pub qubit1: EulerZyz,
    pub qubit2: EulerZyz,
    pub global_phase: f64,
}

/// Local rotations reproducing `rotation_matrix(p)` up to a global phase.
/// The global phase is left at zero.
pub fn rotation_plan(p: &ExchangeParams) -> RotationPlan {
    let half = p.omega() / 2.0;
    let (qubit1, qubit2) = match p.orientation() {
        Orientation::Xy { theta } => (
            EulerZyz::new(-3.0 * FRAC_PI_4, half, theta + FRAC_PI_2),
            EulerZyz::new(FRAC_PI_4, half, theta - FRAC_PI_2),
        ),
        Orientation::Z => (
            EulerZyz::new(-half, 0.0, 0.0),
            EulerZyz::new(half, 0.0, 0.0),
        ),
    };
    RotationPlan {
        qubit1,
        qubit2,
        global_phase: 0.0,
    }
}

/// `e^{iδ}·(U₁ ⊗ U₂)`
pub fn assemble(plan: &RotationPlan) -> ComplexMatrix {
    kron(&plan.qubit1.matrix(), &plan.qubit2.matrix())
        .expect("2×2 factors")
        .scale(cis(plan.global_phase))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledState {
    pub label: &'static str,
    pub state: StateVector,
}

/// The four closed-form eigenstates `φ₁..φ₄` of `build_hamiltonian(p)`.
pub fn eigenstates(p: &ExchangeParams) -> [LabeledState; 4] {
    let omega = p.omega();
    let (c2, s2) = ((omega / 2.0).cos(), (omega / 2.0).sin());
    let psi_p = StateVector::psi_plus();
    let psi_m = StateVector::psi_minus();
    let phi_p = StateVector::phi_plus();
    let phi_m = StateVector::phi_minus();

    let combine = |terms: &[(Complex64, &StateVector)]| {
        let amps = std::array::from_fn(|k| {
            terms
                .iter()
                .map(|(coef, v)| coef * v.amplitudes()[k])
                .sum::<Complex64>()
        });
        StateVector::from_amplitudes(amps).expect("nonzero combination")
    };
    let re = |x: f64| Complex64::new(x, 0.0);

    let states = match p.orientation() {
        Orientation::Xy { theta } => {
            let (st, ct) = (theta.sin(), theta.cos());
            let h = FRAC_1_SQRT_2;
            [
                psi_p,
                combine(&[
                    (re(h * (st + ct * c2)), &phi_m),
                    (I * (h * (ct - st * c2)), &phi_p),
                    (I * (-h * s2), &psi_m),
                ]),
                combine(&[
                    (re(h * (ct + st * c2)), &phi_p),
                    (I * (-h * (st - ct * c2)), &phi_m),
                    (re(h * s2), &psi_m),
                ]),
                combine(&[
                    (I * (-ct * s2), &phi_m),
                    (re(-st * s2), &phi_p),
                    (re(c2), &psi_m),
                ]),
            ]
        }
        Orientation::Z => {
            let t = (omega / 2.0).tan();
            [
                phi_m,
                phi_p,
                combine(&[(ONE, &psi_p), (I * t, &psi_m)]),
                combine(&[(ONE, &psi_m), (I * t, &psi_p)]),
            ]
        }
    };
    let labels = ["φ1", "φ2", "φ3", "φ4"];
    std::array::from_fn(|i| LabeledState {
        label: labels[i],
        state: states[i],
    })
}

/// `⟨v|h|v⟩` for a normalized `v`.
pub fn rayleigh_quotient(h: &ComplexMatrix, v: &StateVector) -> f64 {
    let hv = h.mul_amplitudes(v.amplitudes());
    v.amplitudes()
        .iter()
        .zip(hv)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re
}

/// `max |h·v − λv|` with `λ` the Rayleigh quotient.
pub fn eigen_residual(h: &ComplexMatrix, v: &StateVector) -> f64 {
    let lambda = rayleigh_quotient(h, v);
    h.mul_amplitudes(v.amplitudes())
        .iter()
        .zip(v.amplitudes())
        .map(|(hv, a)| (hv - a * lambda).norm())
        .fold(0.0, f64::max)
}

/// Largest entry of `|T·H·T† − H₀|`.
pub fn verify_isotropization(p: &ExchangeParams) -> f64 {
    let t = rotation_matrix(p);
    let rotated = &(&t * &build_hamiltonian(p)) * &t.adjoint();
    let h0 = build_isotropic(p.j()).expect("J validated by ExchangeParams");
    rotated.max_abs_diff(&h0)
}

/// Largest entry of `|T(B₁·S₁ + B₂·S₂)T† − B(S₁ᶻ+S₂ᶻ)|` for the
/// compensating field pair of strength `b`.
pub fn verify_field_compensation(p: &ExchangeParams, b: f64) -> f64 {
    let t = rotation_matrix(p);
    let zeeman = build_zeeman(&compensating_fields(p, b));
    let rotated = &(&t * &zeeman) * &t.adjoint();
    rotated.max_abs_diff(&spin_operators().total_z().scale_re(b))
}

/// Phase distance between the assembled local plan and the closed form.
pub fn factorization_distance(p: &ExchangeParams) -> Result<f64> {
    crate::spinalg::phase_distance(&assemble(&rotation_plan(p)), &rotation_matrix(p))
}
