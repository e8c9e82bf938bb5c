//! Dense complex linear algebra for the 2×2 single-qubit and 4×4 two-qubit
//! operators used throughout the crate.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Tolerance used to accept a matrix as Hermitian on input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance used to accept a matrix as unitary on input. Long gate
/// sequences accumulate rounding, so this is looser than the 1e-12 that
/// freshly built unitaries satisfy.
pub const UNITARY_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{iφ}`
#[inline]
pub fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Dense square complex matrix of dimension 2 or 4, row-major `(row, col)`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 2 || dim == 4 {
            Ok(())
        } else {
            invalid(format!("matrix dimension must be 2 or 4, got {dim}"))
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::check_dim(dim).expect("dimension");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::check_dim(dim).expect("dimension");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::check_dim(dim).expect("dimension");
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Build from a row-major slice of rows. Fails unless the rows form a
    /// 2×2 or 4×4 square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        Self::check_dim(dim)?;
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("matrix rows must all have the same length as the row count");
        }
        Ok(Self::from_fn(dim, |r, c| rows[r][c]))
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        Self::from_fn(entries.len(), |r, c| if r == c { entries[r] } else { ZERO })
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        Self::from_fn(entries.len(), |r, c| {
            if r == c {
                Complex64::new(entries[r], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Wrap an existing nalgebra matrix.
    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return invalid("matrix must be square");
        }
        Self::check_dim(inner.nrows())?;
        Ok(Self { inner })
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    /// Rows as nested vectors, for serialization.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.inner[(r, c)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            inner: self.inner.map(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_error(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim())).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn mul_amplitudes(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        assert_eq!(self.dim(), 4, "two-qubit operator required");
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.inner[(r, c)] * v[c]).sum();
        }
        out
    }

    /// Apply a two-qubit unitary to a state.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        StateVector::from_amplitudes(self.mul_amplitudes(v.amplitudes()))
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(self.dim()), |acc, _| &acc * self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}×{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.inner[(r, c)];
                write!(f, " {:>+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.inner[(r, c)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                ComplexMatrix {
                    inner: &self.inner $op &rhs.inner,
                }
            }
        }

        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;

            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

/// Pauli axis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        Axis::Y => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        Axis::Z => ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
    }
    .expect("2×2")
}

/// Kronecker product of two single-qubit operators; `a` acts on qubit 1
/// (the most significant index).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != 2 || b.dim() != 2 {
        return invalid(format!(
            "kron expects two 2×2 matrices, got {}×{} and {}×{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        ));
    }
    Ok(ComplexMatrix::from_fn(4, |r, c| {
        a[(r / 2, c / 2)] * b[(r % 2, c % 2)]
    }))
}

/// Normalized two-qubit state over `{|00⟩, |01⟩, |10⟩, |11⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector([Complex64; 4]);

impl StateVector {
    /// Normalizes the given amplitudes. Fails on a zero or non-finite vector.
    pub fn from_amplitudes(amps: [Complex64; 4]) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return invalid("state vector must have finite nonzero norm");
        }
        Ok(Self(amps.map(|z| z / norm)))
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        Self(amps)
    }

    /// `(a₁|0⟩+b₁|1⟩) ⊗ (a₂|0⟩+b₂|1⟩)`
    pub fn product(q1: [Complex64; 2], q2: [Complex64; 2]) -> Result<Self> {
        Self::from_amplitudes([q1[0] * q2[0], q1[0] * q2[1], q1[1] * q2[0], q1[1] * q2[1]])
    }

    /// `(|01⟩ + |10⟩)/√2`
    pub fn psi_plus() -> Self {
        Self::bell(1, 2, 1.0)
    }

    /// `(|01⟩ − |10⟩)/√2`
    pub fn psi_minus() -> Self {
        Self::bell(1, 2, -1.0)
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus() -> Self {
        Self::bell(0, 3, 1.0)
    }

    /// `(|00⟩ − |11⟩)/√2`
    pub fn phi_minus() -> Self {
        Self::bell(0, 3, -1.0)
    }

    fn bell(i: usize, j: usize, sign: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = [ZERO; 4];
        amps[i] = Complex64::new(h, 0.0);
        amps[j] = Complex64::new(sign * h, 0.0);
        Self(amps)
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.0
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// `|v⟩⟨v|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, |r, c| self.0[r] * self.0[c].conj())
    }

    /// `1 − |⟨self|other⟩|`, zero iff the states agree up to global phase.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        (1.0 - self.inner(other).norm()).max(0.0)
    }
}

/// Spectrum and eigenvectors of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn state(&self, index: usize) -> StateVector {
        let amps = std::array::from_fn(|r| self.vectors[(r, index)]);
        StateVector::from_amplitudes(amps).expect("eigenvectors are unit norm")
    }

    pub fn states(&self) -> Vec<StateVector> {
        (0..self.values.len()).map(|i| self.state(i)).collect()
    }

    /// `V·diag(f(λ))·V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        &(v * &ComplexMatrix::diag(&d)) * &v.adjoint()
    }
}

/// Hermitian eigendecomposition of a 4×4 (or 2×2) matrix.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOL {
        return invalid(format!(
            "matrix is not Hermitian (max |H - H†| = {err:.3e})"
        ));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (&h.inner + h.inner.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// `exp(−i·h·t)` for Hermitian `h`, via the eigendecomposition.
pub fn expm_unitary(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return invalid("evolution time must be finite");
    }
    let eig = herm_eig(h)?;
    Ok(eig.map_spectrum(|l| cis(-l * t)))
}

/// `1 − |Tr(u†v)|/n`: zero iff `u = e^{iφ}v`.
pub fn phase_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    Ok(1.0 - trace_overlap(u, v)?)
}

/// `|Tr(u†v)|/n` clamped into `[0, 1]`, after checking both inputs.
pub(crate) fn trace_overlap(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return invalid("unitaries must have the same dimension");
    }
    for (name, m) in [("first", u), ("second", v)] {
        let err = m.unitarity_error();
        if !(err <= UNITARY_TOL) {
            return invalid(format!(
                "{name} matrix is not unitary (max |U†U - I| = {err:.3e})"
            ));
        }
    }
    let overlap = (&u.adjoint() * v).trace().norm() / u.dim() as f64;
    Ok(overlap.clamp(0.0, 1.0))
}
