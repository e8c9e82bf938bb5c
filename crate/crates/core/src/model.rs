//! Two-spin exchange Hamiltonian with symmetric and antisymmetric
//! (Dzyaloshinskii-Moriya) anisotropy, plus Zeeman terms.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::spinalg::{kron, pauli, Axis, ComplexMatrix};

/// Orientation `n` of the asymmetric exchange vector `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Orientation {
    /// `n = cos θ e_x + sin θ e_y`
    Xy { theta: f64 },
    /// `n = e_z`
    Z,
}

impl Orientation {
    pub fn unit_vector(&self) -> [f64; 3] {
        match *self {
            Orientation::Xy { theta } => [theta.cos(), theta.sin(), 0.0],
            Orientation::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Orientation::Xy { .. } => "xy",
            Orientation::Z => "z",
        }
    }
}

/// Exchange couplings of the pair. `ω = arctan(|b|/J)` is derived on demand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExchangeParams {
    j: f64,
    orientation: Orientation,
    b_over_j: f64,
}

impl ExchangeParams {
    pub fn new(j: f64, orientation: Orientation, b_over_j: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return invalid(format!(
                "exchange constant J must be finite and J > 0, got {j}"
            ));
        }
        if !(b_over_j.is_finite() && b_over_j >= 0.0) {
            return invalid(format!(
                "relative asymmetric exchange |b|/J must be finite and >= 0, got {b_over_j}"
            ));
        }
        if let Orientation::Xy { theta } = orientation {
            if !theta.is_finite() {
                return invalid("orientation angle theta must be finite");
            }
        }
        Ok(Self {
            j,
            orientation,
            b_over_j,
        })
    }

    /// Construct from the mixing angle directly; `ω` must lie in `[0, π/2)`.
    pub fn from_omega(j: f64, orientation: Orientation, omega: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&omega) {
            return invalid(format!(
                "mixing angle omega must lie in [0, pi/2), got {omega}"
            ));
        }
        Self::new(j, orientation, omega.tan())
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn b_over_j(&self) -> f64 {
        self.b_over_j
    }

    /// `ω = arctan(|b|/J)`
    pub fn omega(&self) -> f64 {
        self.b_over_j.atan()
    }

    /// `None` for the z orientation.
    pub fn theta(&self) -> Option<f64> {
        match self.orientation {
            Orientation::Xy { theta } => Some(theta),
            Orientation::Z => None,
        }
    }
}

/// Single-spin operators `S = σ/2` embedded in the two-qubit space.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub s1: [ComplexMatrix; 3],
    pub s2: [ComplexMatrix; 3],
}

impl SpinOperators {
    /// `n·S₁`
    pub fn along1(&self, n: [f64; 3]) -> ComplexMatrix {
        dot(n, &self.s1)
    }

    /// `n·S₂`
    pub fn along2(&self, n: [f64; 3]) -> ComplexMatrix {
        dot(n, &self.s2)
    }

    /// `S₁·S₂`
    pub fn exchange(&self) -> ComplexMatrix {
        (0..3)
            .map(|a| &self.s1[a] * &self.s2[a])
            .fold(ComplexMatrix::zeros(4), |acc, m| &acc + &m)
    }

    /// `(S₁×S₂)ᵃ = ε_abc S₁ᵇ S₂ᶜ`
    pub fn cross(&self) -> [ComplexMatrix; 3] {
        let (s1, s2) = (&self.s1, &self.s2);
        std::array::from_fn(|a| {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            &(&s1[b] * &s2[c]) - &(&s1[c] * &s2[b])
        })
    }

    /// `S₁ᶻ + S₂ᶻ`
    pub fn total_z(&self) -> ComplexMatrix {
        &self.s1[2] + &self.s2[2]
    }
}

fn dot(n: [f64; 3], ops: &[ComplexMatrix; 3]) -> ComplexMatrix {
    (0..3)
        .map(|a| ops[a].scale_re(n[a]))
        .fold(ComplexMatrix::zeros(4), |acc, m| &acc + &m)
}

pub fn spin_operators() -> &'static SpinOperators {
    static OPS: OnceLock<SpinOperators> = OnceLock::new();
    OPS.get_or_init(|| {
        let id = ComplexMatrix::identity(2);
        let half = |a| pauli(a).scale_re(0.5);
        SpinOperators {
            s1: Axis::ALL.map(|a| kron(&half(a), &id).expect("2×2")),
            s2: Axis::ALL.map(|a| kron(&id, &half(a)).expect("2×2")),
        }
    })
}

/// `J cos ω S₁·S₂ + 2J sin²(ω/2)(n·S₁)(n·S₂) + J sin ω n·(S₁×S₂)`
pub fn build_hamiltonian(p: &ExchangeParams) -> ComplexMatrix {
    let ops = spin_operators();
    let (j, omega) = (p.j(), p.omega());
    let n = p.orientation().unit_vector();

    let symmetric = ops.exchange().scale_re(j * omega.cos());
    let anisotropic =
        (&ops.along1(n) * &ops.along2(n)).scale_re(2.0 * j * (omega / 2.0).sin().powi(2));
    let dm = dot(n, &ops.cross()).scale_re(j * omega.sin());
    &(&symmetric + &anisotropic) + &dm
}

/// `J S₁·S₂`
pub fn build_isotropic(j: f64) -> Result<ComplexMatrix> {
    if !(j.is_finite() && j > 0.0) {
        return invalid(format!(
            "exchange constant J must be finite and J > 0, got {j}"
        ));
    }
    Ok(spin_operators().exchange().scale_re(j))
}

/// Fields on the two spins, in energy units (`g μ_B` absorbed).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldSpec {
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

impl FieldSpec {
    pub fn new(b1: [f64; 3], b2: [f64; 3]) -> Result<Self> {
        if b1.iter().chain(&b2).any(|x| !x.is_finite()) {
            return invalid("field components must be finite");
        }
        Ok(Self { b1, b2 })
    }

    pub fn magnitudes(&self) -> (f64, f64) {
        let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm(self.b1), norm(self.b2))
    }
}

/// `B₁·S₁ + B₂·S₂`
pub fn build_zeeman(f: &FieldSpec) -> ComplexMatrix {
    let ops = spin_operators();
    &ops.along1(f.b1) + &ops.along2(f.b2)
}

/// Field pair that the frame rotation maps onto the uniform field
/// `B (S₁ᶻ + S₂ᶻ)`.
///
/// For the xy orientation the z components `∓B sin(ω/2)·cot(ω/2)` are
/// written as `B cos(ω/2)`, which stays finite as `ω → 0`.
pub fn compensating_fields(p: &ExchangeParams, b: f64) -> FieldSpec {
    match p.orientation() {
        Orientation::Xy { theta } => {
            let half = p.omega() / 2.0;
            let (s, c) = (b * half.sin(), b * half.cos());
            FieldSpec {
                b1: [-s * theta.sin(), s * theta.cos(), c],
                b2: [s * theta.sin(), -s * theta.cos(), c],
            }
        }
        Orientation::Z => FieldSpec {
            b1: [0.0, 0.0, b],
            b2: [0.0, 0.0, b],
        },
    }
}

/// Golden matrix for the z orientation, expanded by hand:
/// `J·[[1/4,0,0,0],[0,−1/4,e^{iω}/2,0],[0,e^{−iω}/2,−1/4,0],[0,0,0,1/4]]`.
#[cfg(test)]
pub(crate) fn z_hamiltonian_golden(j: f64, omega: f64) -> ComplexMatrix {
    use crate::spinalg::{cis, ZERO};
    use num_complex::Complex64;
    let q = Complex64::new(0.25 * j, 0.0);
    ComplexMatrix::from_rows(&[
        vec![q, ZERO, ZERO, ZERO],
        vec![ZERO, -q, cis(omega) * (0.5 * j), ZERO],
        vec![ZERO, cis(-omega) * (0.5 * j), -q, ZERO],
        vec![ZERO, ZERO, ZERO, q],
    ])
    .unwrap()
}
