//! Gate fidelity, gate-error sweeps around a reference operating point, and
//! thermal-state entanglement.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::frame::rotation_matrix;
use crate::gates::{synthesize, GateKind};
use crate::model::{build_hamiltonian, ExchangeParams, Orientation};
use crate::spinalg::{herm_eig, kron, pauli, trace_overlap, Axis, ComplexMatrix, HERMITIAN_TOL};

/// `|Tr(u†u₀)| / Tr(u₀†u₀)`, which is `1` iff the gates agree up to a
/// global phase.
pub fn fidelity(u: &ComplexMatrix, u0: &ComplexMatrix) -> Result<f64> {
    trace_overlap(u, u0)
}

/// Parameters for a gate-error sweep around `(ω₀, θ₀)` with the xy
/// orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub j: f64,
    pub tan_omega0: f64,
    pub theta0: f64,
    /// `Δω/ω₀`
    pub delta_omega_ratios: Vec<f64>,
    /// `Δθ/θ₀`
    pub delta_theta_ratios: Vec<f64>,
    /// Conjugate by the reference frame rotation `T(ω₀, θ₀)`.
    pub corrected: bool,
    pub gate: GateKind,
}

impl SweepConfig {
    /// Swap-gate sweep at `tan ω₀ = 5×10⁻³`, `θ₀ = 5π/6`, with
    /// `Δω/ω₀ ∈ [0, 0.1]` (50 points) and `Δθ/θ₀ ∈ {0.1, 0.01}`.
    pub fn reference(corrected: bool) -> Self {
        let n = 50;
        Self {
            j: 1.0,
            tan_omega0: 5e-3,
            theta0: 5.0 * PI / 6.0,
            delta_omega_ratios: (0..n).map(|k| 0.1 * k as f64 / (n - 1) as f64).collect(),
            delta_theta_ratios: vec![0.1, 0.01],
            corrected,
            gate: GateKind::Swap,
        }
    }

    pub fn omega0(&self) -> f64 {
        self.tan_omega0.atan()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.j > 0.0) {
            return invalid(format!(
                "exchange constant J must be finite and J > 0, got {}",
                self.j
            ));
        }
        if !(self.tan_omega0.is_finite() && self.tan_omega0 >= 0.0) {
            return invalid("tan_omega0 must be finite and >= 0");
        }
        if !self.theta0.is_finite() {
            return invalid("theta0 must be finite");
        }
        let omega0 = self.omega0();
        for &r in &self.delta_omega_ratios {
            let omega = omega0 * (1.0 + r);
            if !r.is_finite() || !(0.0..PI / 2.0).contains(&omega) {
                return invalid(format!(
                    "delta_omega ratio {r} puts omega = {omega} outside [0, pi/2)"
                ));
            }
        }
        if self.delta_theta_ratios.iter().any(|r| !r.is_finite()) {
            return invalid("delta_theta ratios must be finite");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta_omega_ratio: f64,
    pub delta_theta_ratio: f64,
    pub corrected: bool,
    pub fidelity: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub config: SweepConfig,
}

/// Gate error at every `(Δω/ω₀, Δθ/θ₀)` point.
///
/// Each point evolves under `H(ω₀+Δω, θ₀+Δθ)`; corrected mode conjugates by
/// the fixed `T(ω₀, θ₀)`. Rows are sorted by `(Δθ/θ₀, Δω/ω₀)`.
pub fn gate_error_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let omega0 = cfg.omega0();
    let reference =
        ExchangeParams::from_omega(cfg.j, Orientation::Xy { theta: cfg.theta0 }, omega0)?;
    let frame = cfg.corrected.then(|| rotation_matrix(&reference));
    let target = cfg.gate.target();

    let mut rows = Vec::with_capacity(cfg.delta_omega_ratios.len() * cfg.delta_theta_ratios.len());
    for &dt in &cfg.delta_theta_ratios {
        for &dw in &cfg.delta_omega_ratios {
            let theta = cfg.theta0 * (1.0 + dt);
            let p =
                ExchangeParams::from_omega(cfg.j, Orientation::Xy { theta }, omega0 * (1.0 + dw))?;
            let u = synthesize(cfg.gate, &build_hamiltonian(&p), cfg.j, frame.as_ref())?;
            let f = fidelity(&u, &target)?;
            rows.push(SweepRow {
                delta_omega_ratio: dw,
                delta_theta_ratio: dt,
                corrected: cfg.corrected,
                fidelity: f,
                error: 1.0 - f,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.delta_theta_ratio
            .total_cmp(&b.delta_theta_ratio)
            .then(a.delta_omega_ratio.total_cmp(&b.delta_omega_ratio))
    });
    Ok(SweepResult {
        rows,
        config: cfg.clone(),
    })
}

/// `exp(−βh) / Tr exp(−βh)`
pub fn thermal_state(h: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return invalid(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        ));
    }
    let eig = herm_eig(h)?;
    let ground = eig.values[0];
    let z: f64 = eig
        .values
        .iter()
        .map(|l| (-beta * (l - ground)).exp())
        .sum();
    Ok(eig.map_spectrum(|l| Complex64::new((-beta * (l - ground)).exp() / z, 0.0)))
}

/// Eigenvalues of a density matrix below this are treated as zero.
const RANK_TOL: f64 = 1e-14;

/// Wootters concurrence `max(0, λ₁−λ₂−λ₃−λ₄)`.
///
/// The `λᵢ` are the singular values of `τᵢⱼ = wᵢᵀ(σʸ⊗σʸ)wⱼ` with
/// `wᵢ = √pᵢ vᵢ` from the spectral decomposition of `ρ`; these equal the
/// square roots of the eigenvalues of `ρ(σʸ⊗σʸ)ρ*(σʸ⊗σʸ)` without taking
/// square roots of near-zero numbers.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return invalid("concurrence needs a 4×4 density matrix");
    }
    let trace = rho.trace();
    if (trace - 1.0).norm() > 1e-10 {
        return invalid(format!("density matrix must have unit trace, got {trace}"));
    }
    let eig = herm_eig(rho)?;
    if eig.values[0] < -HERMITIAN_TOL {
        return invalid(format!(
            "density matrix must be positive semidefinite (min eigenvalue {:.3e})",
            eig.values[0]
        ));
    }
    let kept: Vec<usize> = (0..4).filter(|&i| eig.values[i] > RANK_TOL).collect();
    let w = DMatrix::from_fn(4, kept.len(), |r, c| {
        eig.vectors[(r, kept[c])] * eig.values[kept[c]].sqrt()
    });
    let yy = kron(&pauli(Axis::Y), &pauli(Axis::Y))?;
    let tau = w.transpose() * yy.as_nalgebra() * &w;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = sv.iter().skip(1).sum();
    Ok((sv.first().copied().unwrap_or(0.0) - rest).clamp(0.0, 1.0))
}
