//! Gates synthesized from timed exchange evolution inside the frame rotation:
//! swap, square-root swap, CNOT, and the phase-shifted swap in compensating
//! fields.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::frame::rotation_matrix;
use crate::model::{
    build_hamiltonian, build_zeeman, compensating_fields, spin_operators, ExchangeParams,
};
use crate::spinalg::{
    cis, expm_unitary, kron, phase_distance, ComplexMatrix, StateVector, HERMITIAN_TOL,
};

#[derive(Clone, Debug)]
pub struct Segment {
    pub hamiltonian: ComplexMatrix,
    pub duration: f64,
}

/// Piecewise-constant Hamiltonian, segments in time order.
#[derive(Clone, Debug, Default)]
pub struct PulseSchedule {
    segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, hamiltonian: ComplexMatrix, duration: f64) -> Result<&mut Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return invalid(format!(
                "segment duration must be finite and >= 0, got {duration}"
            ));
        }
        if hamiltonian.dim() != 4 || !hamiltonian.is_hermitian(HERMITIAN_TOL) {
            return invalid("segment Hamiltonian must be a Hermitian 4×4 matrix");
        }
        self.segments.push(Segment {
            hamiltonian,
            duration,
        });
        Ok(self)
    }

    pub fn with(mut self, hamiltonian: ComplexMatrix, duration: f64) -> Result<Self> {
        self.push(hamiltonian, duration)?;
        Ok(self)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// Time-ordered product of the segment propagators, later segments on the
/// left.
pub fn evolve(schedule: &PulseSchedule) -> Result<ComplexMatrix> {
    schedule
        .segments
        .iter()
        .try_fold(ComplexMatrix::identity(4), |acc, seg| {
            Ok(&expm_unitary(&seg.hamiltonian, seg.duration)? * &acc)
        })
}

/// Smallest positive swap time, `J τ_s = π`.
pub fn swap_time(j: f64) -> f64 {
    PI / j
}

#[derive(Clone, Debug, Serialize)]
pub struct GateReport {
    pub label: String,
    #[serde(skip)]
    pub matrix: ComplexMatrix,
    pub target_label: String,
    pub phase_distance_to_target: f64,
}

impl GateReport {
    fn new(
        label: impl Into<String>,
        matrix: ComplexMatrix,
        target_label: &str,
        target: &ComplexMatrix,
    ) -> Result<Self> {
        let phase_distance_to_target = phase_distance(&matrix, target)?;
        Ok(Self {
            label: label.into(),
            matrix,
            target_label: target_label.to_string(),
            phase_distance_to_target,
        })
    }
}

/// Gates built from a swap-time exchange pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Swap,
    SqrtSwap,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 3] = [GateKind::Swap, GateKind::SqrtSwap, GateKind::Cnot];

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Swap => "swap",
            GateKind::SqrtSwap => "sqrt_swap",
            GateKind::Cnot => "cnot",
        }
    }

    /// The ideal gate this kind should realize.
    pub fn target(&self) -> ComplexMatrix {
        match self {
            GateKind::Swap => swap_gate(),
            GateKind::SqrtSwap => sqrt_swap_gate(),
            GateKind::Cnot => cnot_gate(),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown gate '{s}'")))
    }
}

pub fn swap_gate() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// Square root of swap with `(1 ± i)/2` in the `|01⟩, |10⟩` block.
pub fn sqrt_swap_gate() -> ComplexMatrix {
    let p = Complex64::new(0.5, 0.5);
    let m = Complex64::new(0.5, -0.5);
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    ComplexMatrix::from_rows(&[
        vec![o, z, z, z],
        vec![z, p, m, z],
        vec![z, m, p, z],
        vec![z, z, z, o],
    ])
    .expect("4×4")
}

/// CNOT with qubit 1 as control.
pub fn cnot_gate() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn controlled_phase_gate() -> ComplexMatrix {
    ComplexMatrix::real_diag(&[1.0, 1.0, 1.0, -1.0])
}

/// `e^{iφ S}` for a diagonal or otherwise Hermitian spin operator `S`.
fn spin_rotation(op: &ComplexMatrix, angle: f64) -> ComplexMatrix {
    expm_unitary(op, -angle).expect("spin operators are Hermitian")
}

fn sandwich(frame: Option<&ComplexMatrix>, u: ComplexMatrix) -> ComplexMatrix {
    match frame {
        Some(t) => &(t * &u) * &t.adjoint(),
        None => u,
    }
}

/// Builds `kind` from evolution under `h` with swap time `π/J`, optionally
/// conjugated by the frame rotation `T` as `T·U·T†`.
///
/// The CNOT uses the sequence
/// `e^{iπ/2 S₁ᶻ} e^{−iπ/2 S₂ᶻ} U_sw^{1/2} e^{iπ S₁ᶻ} U_sw^{1/2}`, which
/// yields `(Z⊗Z)·CZ` up to phase; it conserves total `Sᶻ` and so cannot be a
/// CNOT by itself. A fixed correction turns it into CNOT: the z-rotation
/// pair `e^{iπ S₁ᶻ} e^{iπ S₂ᶻ}` and a Hadamard change of basis on qubit 2.
pub fn synthesize(
    kind: GateKind,
    h: &ComplexMatrix,
    j: f64,
    frame: Option<&ComplexMatrix>,
) -> Result<ComplexMatrix> {
    let tau = swap_time(j);
    match kind {
        GateKind::Swap => Ok(sandwich(frame, expm_unitary(h, tau)?)),
        GateKind::SqrtSwap => Ok(sandwich(frame, expm_unitary(h, tau / 2.0)?)),
        GateKind::Cnot => {
            let root = sandwich(frame, expm_unitary(h, tau / 2.0)?);
            Ok(cnot_correction(&cnot_sequence(&root)))
        }
    }
}

/// The raw z-rotation / square-root-swap sequence, given the square-root swap.
pub fn cnot_sequence(root_swap: &ComplexMatrix) -> ComplexMatrix {
    let ops = spin_operators();
    let (s1z, s2z) = (&ops.s1[2], &ops.s2[2]);
    let head = &spin_rotation(s1z, PI / 2.0) * &spin_rotation(s2z, -PI / 2.0);
    let middle = spin_rotation(s1z, PI);
    &(&(&head * root_swap) * &middle) * root_swap
}

fn cnot_correction(raw: &ComplexMatrix) -> ComplexMatrix {
    let ops = spin_operators();
    let z_pair = &spin_rotation(&ops.s1[2], PI) * &spin_rotation(&ops.s2[2], PI);
    let hadamard = ComplexMatrix::from_real_rows([
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ]);
    let h2 = kron(&ComplexMatrix::identity(2), &hadamard).expect("2×2");
    &(&(&h2 * &z_pair) * raw) * &h2
}

/// Swap pulse without the frame correction.
pub fn uncorrected_swap(p: &ExchangeParams) -> Result<GateReport> {
    let u = synthesize(GateKind::Swap, &build_hamiltonian(p), p.j(), None)?;
    GateReport::new("swap (no frame rotation)", u, "swap", &swap_gate())
}

/// `T·exp(−iHτ_s)·T†`
pub fn corrected_swap(p: &ExchangeParams) -> Result<GateReport> {
    let t = rotation_matrix(p);
    let u = synthesize(GateKind::Swap, &build_hamiltonian(p), p.j(), Some(&t))?;
    GateReport::new("swap", u, "swap", &swap_gate())
}

/// `T·exp(−iHτ_s/2)·T†`
pub fn sqrt_swap(p: &ExchangeParams) -> Result<GateReport> {
    let t = rotation_matrix(p);
    let u = synthesize(GateKind::SqrtSwap, &build_hamiltonian(p), p.j(), Some(&t))?;
    GateReport::new("sqrt_swap", u, "sqrt_swap", &sqrt_swap_gate())
}

pub fn cnot(p: &ExchangeParams) -> Result<GateReport> {
    let t = rotation_matrix(p);
    let u = synthesize(GateKind::Cnot, &build_hamiltonian(p), p.j(), Some(&t))?;
    GateReport::new(
        "cnot: e^{i pi/2 S1z} e^{-i pi/2 S2z} sqrt_swap e^{i pi S1z} sqrt_swap, \
         corrected by e^{i pi S1z} e^{i pi S2z} and a Hadamard basis change on qubit 2",
        u,
        "cnot",
        &cnot_gate(),
    )
}

/// Swap in the compensating fields: `T·exp(−i(H + B₁·S₁ + B₂·S₂)τ_s)·T†`.
///
/// In the rotated frame the field is the uniform `B(S₁ᶻ+S₂ᶻ)`, which
/// commutes with the exchange, so the result is
/// `exp(−iBτ_s(S₁ᶻ+S₂ᶻ))·SWAP`; the report measures the distance to that.
pub fn phase_shifted_swap(p: &ExchangeParams, b: f64) -> Result<GateReport> {
    if !b.is_finite() {
        return invalid("field strength B must be finite");
    }
    let t = rotation_matrix(p);
    let h = &build_hamiltonian(p) + &build_zeeman(&compensating_fields(p, b));
    let tau = swap_time(p.j());
    let u = sandwich(Some(&t), expm_unitary(&h, tau)?);
    GateReport::new("psw", u, "phased_swap", &phased_swap_target(b, tau))
}

/// `exp(−iBτ(S₁ᶻ+S₂ᶻ))·SWAP`
pub fn phased_swap_target(b: f64, tau: f64) -> ComplexMatrix {
    let field = expm_unitary(&spin_operators().total_z().scale_re(b), tau).expect("Hermitian");
    &field * &swap_gate()
}

/// Product-state action of [`phased_swap_target`]: the qubits are exchanged
/// and each picks up the relative phase `e^{−iBτ}` on its `|0⟩` component.
pub fn phased_swap_action(
    q1: [Complex64; 2],
    q2: [Complex64; 2],
    b: f64,
    tau: f64,
) -> Result<StateVector> {
    let ph = cis(-b * tau);
    StateVector::product([q2[0] * ph, q2[1]], [q1[0] * ph, q1[1]])
}

/// Swap with the relative phase `e^{iBτ/2}` applied to the first qubit's
/// `|0⟩` component only:
/// `(a₁|0⟩+b₁|1⟩)⊗(a₂|0⟩+b₂|1⟩) → (a₂e^{iBτ/2}|0⟩+b₂|1⟩)⊗(a₁|0⟩+b₁|1⟩)`.
pub fn single_phase_swap_action(
    q1: [Complex64; 2],
    q2: [Complex64; 2],
    b: f64,
    tau: f64,
) -> Result<StateVector> {
    StateVector::product([q2[0] * cis(b * tau / 2.0), q2[1]], q1)
}
