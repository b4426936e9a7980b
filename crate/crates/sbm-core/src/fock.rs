//! Operators and states on the truncated Fock ⊗ spin Hilbert space.
//!
//! Storage basis: index `2N + s` with `s = 0` for spin-up (`σz = +1`),
//! `s = 1` for spin-down (`σz = −1`), and `N = 0..n_max` the Fock level.
//! The spin is stored in the `σz` eigenbasis; the `σx` eigenstates are
//! the derived constants `|±⟩ = (|↑⟩ ± |↓⟩)/√2`.
//!
//! The driven Hamiltonian is real-symmetric in this basis, which the
//! propagator exploits; the public matrix type is nevertheless complex,
//! since displacement operators are genuinely complex for complex labels.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SbmError};
use crate::model::{DriveKind, ModelParams};

pub const SPIN_UP: usize = 0;
pub const SPIN_DOWN: usize = 1;

/// Storage index of `|N⟩ ⊗ |s⟩`.
#[inline]
pub fn basis_index(fock_level: usize, spin: usize) -> usize {
    2 * fock_level + spin
}

/// Dense complex square matrix with a Hermiticity flag.
///
/// The flag is only ever set by constructions that are symmetric
/// algebraically; when set, `entries` equals its conjugate transpose
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn from_dense(entries: DMatrix<Complex64>, hermitian: bool) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(SbmError::DimMismatch { expected: dim, got: entries.ncols() });
        }
        if hermitian && entries != entries.adjoint() {
            return Err(SbmError::NotHermitian);
        }
        Ok(OperatorMatrix { dim, entries, hermitian })
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix { dim, entries: DMatrix::identity(dim, dim), hermitian: true }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim != self.dim {
            return Err(SbmError::DimMismatch { expected: self.dim, got: state.dim });
        }
        Ok(StateVector { dim: self.dim, amplitudes: &self.entries * &state.amplitudes })
    }

    /// Matrix product `self · other`. The result is not flagged
    /// Hermitian (products of Hermitian matrices generally are not).
    pub fn mul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if other.dim != self.dim {
            return Err(SbmError::DimMismatch { expected: self.dim, got: other.dim });
        }
        Ok(OperatorMatrix {
            dim: self.dim,
            entries: &self.entries * &other.entries,
            hermitian: false,
        })
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix { dim: self.dim, entries: self.entries.adjoint(), hermitian: self.hermitian }
    }

    pub fn scale(&self, factor: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            dim: self.dim,
            entries: self.entries.map(|e| e * factor),
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        (&self.entries - &other.entries).iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

/// Complex amplitudes over the storage basis, unit norm after any
/// construction or propagation step.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub dim: usize,
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Self {
        StateVector { dim: amplitudes.len(), amplitudes }
    }

    pub fn zero(dim: usize) -> Self {
        StateVector { dim, amplitudes: DVector::zeros(dim) }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= Complex64::new(n, 0.0);
        }
    }

    /// Zero-pad (or truncate-check) a boson-only vector to a larger
    /// boson dimension.
    pub fn padded_to(&self, dim: usize) -> Result<StateVector> {
        if dim < self.dim {
            return Err(SbmError::DimMismatch { expected: self.dim, got: dim });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes.rows_mut(0, self.dim).copy_from(&self.amplitudes);
        Ok(StateVector { dim, amplitudes })
    }
}

/// Boson annihilation operator on the truncated space, size `n_max + 1`:
/// entry `(N−1, N) = √N`.
pub fn annihilation(n_max: usize) -> Result<OperatorMatrix> {
    if n_max == 0 {
        return Err(SbmError::InvalidParams(
            "n_max = 0 leaves no dynamics; need n_max ≥ 1".to_string(),
        ));
    }
    let dim = n_max + 1;
    let mut entries = DMatrix::zeros(dim, dim);
    for level in 1..dim {
        entries[(level - 1, level)] = Complex64::new((level as f64).sqrt(), 0.0);
    }
    Ok(OperatorMatrix { dim, entries, hermitian: false })
}

/// Boson creation operator, the adjoint of [`annihilation`].
pub fn creation(n_max: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(n_max)?.adjoint())
}

/// Boson number operator `a†a` (diagonal `N`).
pub fn number(n_max: usize) -> Result<OperatorMatrix> {
    if n_max == 0 {
        return Err(SbmError::InvalidParams("n_max must be ≥ 1".to_string()));
    }
    let dim = n_max + 1;
    let mut entries = DMatrix::zeros(dim, dim);
    for level in 0..dim {
        entries[(level, level)] = Complex64::new(level as f64, 0.0);
    }
    Ok(OperatorMatrix { dim, entries, hermitian: true })
}

/// Displacement operator `D(z) = exp(z a† − z* a)` on the truncated
/// space, computed as the exponential of the skew-Hermitian generator
/// through the Hermitian eigendecomposition of `−i(z a† − z* a)`.
/// Unitary up to truncation error on states supported well below
/// `n_max`; callers are responsible for adequate truncation.
pub fn displacement(z: Complex64, n_max: usize) -> Result<OperatorMatrix> {
    let dim = n_max + 1;
    if z == Complex64::ZERO {
        return Ok(OperatorMatrix::identity(dim));
    }
    // A = −i(z a† − z* a) is Hermitian; D = exp(iA).
    let mut generator = DMatrix::zeros(dim, dim);
    let minus_i = Complex64::new(0.0, -1.0);
    for level in 1..dim {
        let above = minus_i * z * (level as f64).sqrt();
        generator[(level, level - 1)] = above;
        generator[(level - 1, level)] = above.conj();
    }
    let eig = generator.symmetric_eigen();
    let phases =
        DVector::from_iterator(dim, eig.eigenvalues.iter().map(|&l| Complex64::new(0.0, l).exp()));
    let mut scaled = eig.eigenvectors.clone();
    for (col, phase) in phases.iter().enumerate() {
        for row in 0..dim {
            scaled[(row, col)] *= phase;
        }
    }
    let entries = &scaled * eig.eigenvectors.adjoint();
    Ok(OperatorMatrix { dim, entries, hermitian: false })
}

/// Truncated coherent state `|z⟩` (boson-only), renormalized to unit
/// norm after truncation. Mean photon number is `|z|²` when the
/// adequacy precondition `n_max ≥ |z|² + 8|z|` holds.
pub fn coherent_state(z: Complex64, n_max: usize) -> Result<StateVector> {
    let magnitude = z.norm();
    let needed = magnitude * magnitude + 8.0 * magnitude;
    if (n_max as f64) < needed {
        return Err(SbmError::TruncationInadequate(format!(
            "coherent state |z|={magnitude:.3} needs n_max ≥ {:.0}, got {n_max}",
            needed.ceil()
        )));
    }
    let dim = n_max + 1;
    let mut amplitudes = DVector::zeros(dim);
    // c_N = c_{N−1} · z / √N with c_0 = e^{−|z|²/2}.
    let mut coeff = Complex64::new((-0.5 * magnitude * magnitude).exp(), 0.0);
    amplitudes[0] = coeff;
    for level in 1..dim {
        coeff *= z / (level as f64).sqrt();
        amplitudes[level] = coeff;
    }
    let mut state = StateVector { dim, amplitudes };
    state.normalize();
    Ok(state)
}

/// `σz ⊗ 1` on the full space (diagonal ±1 by spin).
pub fn sigma_z_full(n_max: usize) -> OperatorMatrix {
    let dim = 2 * (n_max + 1);
    let mut entries = DMatrix::zeros(dim, dim);
    for level in 0..=n_max {
        entries[(basis_index(level, SPIN_UP), basis_index(level, SPIN_UP))] = Complex64::ONE;
        entries[(basis_index(level, SPIN_DOWN), basis_index(level, SPIN_DOWN))] = -Complex64::ONE;
    }
    OperatorMatrix { dim, entries, hermitian: true }
}

/// `σx ⊗ 1` on the full space (spin flip at fixed Fock level).
pub fn sigma_x_full(n_max: usize) -> OperatorMatrix {
    let dim = 2 * (n_max + 1);
    let mut entries = DMatrix::zeros(dim, dim);
    for level in 0..=n_max {
        entries[(basis_index(level, SPIN_UP), basis_index(level, SPIN_DOWN))] = Complex64::ONE;
        entries[(basis_index(level, SPIN_DOWN), basis_index(level, SPIN_UP))] = Complex64::ONE;
    }
    OperatorMatrix { dim, entries, hermitian: true }
}

/// Spin raising operator `σ₊ ⊗ 1` (maps `|N,↓⟩` to `|N,↑⟩`).
pub fn sigma_plus_full(n_max: usize) -> OperatorMatrix {
    let dim = 2 * (n_max + 1);
    let mut entries = DMatrix::zeros(dim, dim);
    for level in 0..=n_max {
        entries[(basis_index(level, SPIN_UP), basis_index(level, SPIN_DOWN))] = Complex64::ONE;
    }
    OperatorMatrix { dim, entries, hermitian: false }
}

/// Spin lowering operator `σ₋ ⊗ 1`, the adjoint of [`sigma_plus_full`].
pub fn sigma_minus_full(n_max: usize) -> OperatorMatrix {
    sigma_plus_full(n_max).adjoint()
}

/// Full driven Hamiltonian as a real-symmetric `f64` matrix:
/// `ω a†a ⊗ 1 + (ε/2) σz + g σx(a† + a) + drive`, with the drive term
/// `Ω (a† + a) ⊗ 1` for photon drive and `Ω σx` for atom drive, at the
/// instantaneous amplitude `drive_value`.
pub(crate) fn hamiltonian_real(
    params: &ModelParams,
    drive_value: f64,
    n_max: usize,
) -> DMatrix<f64> {
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::zeros(dim, dim);
    let half_epsilon = 0.5 * params.epsilon;
    for level in 0..=n_max {
        let up = basis_index(level, SPIN_UP);
        let down = basis_index(level, SPIN_DOWN);
        let field = params.omega * level as f64;
        h[(up, up)] = field + half_epsilon;
        h[(down, down)] = field - half_epsilon;
    }
    // σx(a† + a): couples (N, s) ↔ (N+1, 1−s) with weight √(N+1).
    for level in 0..n_max {
        let root = ((level + 1) as f64).sqrt();
        for spin in [SPIN_UP, SPIN_DOWN] {
            let row = basis_index(level + 1, 1 - spin);
            let col = basis_index(level, spin);
            h[(row, col)] += params.g * root;
            h[(col, row)] += params.g * root;
        }
    }
    match params.drive.kind {
        DriveKind::Photon => {
            // Ω(a† + a) ⊗ 1: couples (N, s) ↔ (N+1, s).
            for level in 0..n_max {
                let root = ((level + 1) as f64).sqrt();
                for spin in [SPIN_UP, SPIN_DOWN] {
                    let row = basis_index(level + 1, spin);
                    let col = basis_index(level, spin);
                    h[(row, col)] += drive_value * root;
                    h[(col, row)] += drive_value * root;
                }
            }
        }
        DriveKind::Atom => {
            // Ω σx ⊗ 1.
            for level in 0..=n_max {
                let up = basis_index(level, SPIN_UP);
                let down = basis_index(level, SPIN_DOWN);
                h[(up, down)] += drive_value;
                h[(down, up)] += drive_value;
            }
        }
        DriveKind::None => {}
    }
    h
}

/// Full driven Hamiltonian on the `2(n_max + 1)`-dimensional space,
/// with the Hermitian flag set. Real-symmetric in the storage basis.
pub fn build_hamiltonian(params: &ModelParams, drive_value: f64, n_max: usize) -> OperatorMatrix {
    let real = hamiltonian_real(params, drive_value, n_max);
    let dim = real.nrows();
    let entries = DMatrix::from_fn(dim, dim, |row, col| Complex64::new(real[(row, col)], 0.0));
    OperatorMatrix { dim, entries, hermitian: true }
}

/// Product state `|boson⟩ ⊗ (up·|↑⟩ + down·|↓⟩)`.
pub fn product_with_spin(boson: &StateVector, up: Complex64, down: Complex64) -> StateVector {
    let dim = 2 * boson.dim;
    let mut amplitudes = DVector::zeros(dim);
    for level in 0..boson.dim {
        amplitudes[basis_index(level, SPIN_UP)] = boson.amplitudes[level] * up;
        amplitudes[basis_index(level, SPIN_DOWN)] = boson.amplitudes[level] * down;
    }
    StateVector { dim, amplitudes }
}

/// The two degenerate product states `|G±(0)⟩ = D(∓g/ω)|0⟩ ⊗ |±⟩`
/// (degenerate only for ε = 0, but constructible for any parameters).
/// Each has `⟨a⟩ = ∓g/ω` and `σx` expectation ±1.
pub fn polaron_ground_pair(
    params: &ModelParams,
    n_max: usize,
) -> Result<(StateVector, StateVector)> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let label = params.g / params.omega;
    let plus_boson = coherent_state(Complex64::new(-label, 0.0), n_max)?;
    let minus_boson = coherent_state(Complex64::new(label, 0.0), n_max)?;
    let plus = product_with_spin(&plus_boson, inv_sqrt2, inv_sqrt2);
    let minus = product_with_spin(&minus_boson, inv_sqrt2, -inv_sqrt2);
    Ok((plus, minus))
}

/// Initial state of a run: the eigenstate of the undriven Hamiltonian.
///
/// For ε = 0 this is the polaron superposition `(|G+⟩ − |G−⟩)/√2`
/// (unit norm because the spin parts are orthogonal). For ε ≠ 0 the
/// caller chooses between the same superposition and the numerically
/// exact ground state of the undriven Hamiltonian. A degenerate
/// numerical ground state falls back to the polaron superposition with
/// a warning record.
pub fn default_initial_state(
    params: &ModelParams,
    n_max: usize,
    use_exact_ground: bool,
) -> Result<(StateVector, Option<String>)> {
    if !use_exact_ground {
        return Ok((polaron_superposition(params, n_max)?, None));
    }
    let undriven = hamiltonian_real(params, 0.0, n_max);
    let eig = undriven.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let ground = order[0];
    let gap = eig.eigenvalues[order[1]] - eig.eigenvalues[ground];
    if gap.abs() < 1e-10 {
        let warning = format!(
            "undriven ground state is degenerate (gap {gap:.2e}); using polaron superposition"
        );
        return Ok((polaron_superposition(params, n_max)?, Some(warning)));
    }
    let column = eig.eigenvectors.column(ground);
    // Fix the sign so repeated runs produce the identical vector.
    let lead = column.iter().cloned().fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    let amplitudes = DVector::from_iterator(
        column.len(),
        column.iter().map(|&v| Complex64::new(sign * v, 0.0)),
    );
    let mut state = StateVector::from_amplitudes(amplitudes);
    state.normalize();
    Ok((state, None))
}

/// `(|G+⟩ − |G−⟩)/√2`.
pub fn polaron_superposition(params: &ModelParams, n_max: usize) -> Result<StateVector> {
    let (plus, minus) = polaron_ground_pair(params, n_max)?;
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amplitudes = (plus.amplitudes - minus.amplitudes) * inv_sqrt2;
    let mut state = StateVector::from_amplitudes(amplitudes);
    state.normalize();
    Ok(state)
}

/// Real quadratic form `⟨ψ|O|ψ⟩` of a Hermitian operator. The imaginary
/// residue must be at machine level (≤ 1e-12) and is discarded after
/// the assertion.
pub fn expectation(op: &OperatorMatrix, state: &StateVector) -> Result<f64> {
    if !op.hermitian {
        return Err(SbmError::NotHermitian);
    }
    if op.dim != state.dim {
        return Err(SbmError::DimMismatch { expected: op.dim, got: state.dim });
    }
    let image = &op.entries * &state.amplitudes;
    let value = state.amplitudes.dotc(&image);
    if value.im.abs() > 1e-12 {
        return Err(SbmError::Numerical(format!(
            "expectation of Hermitian operator has imaginary residue {:.2e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Complex inner product `⟨s1|s2⟩`.
pub fn overlap(s1: &StateVector, s2: &StateVector) -> Result<Complex64> {
    if s1.dim != s2.dim {
        return Err(SbmError::DimMismatch { expected: s1.dim, got: s2.dim });
    }
    Ok(s1.amplitudes.dotc(&s2.amplitudes))
}
