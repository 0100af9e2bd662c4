//! Spectral analysis of non-Hermitian Hamiltonians whose anticommutator
//! `{H, H†}` is a multiple of the identity.
//!
//! The pipeline normalizes `H`, diagonalizes the Hermitian operator
//! `F = H†H`, and reads eigenvalues, right and left eigenvectors, dual-space
//! maps and symmetry data off the `(f, 1 - f)` pairs of `F` in closed form.
//! A general dense eigensolver is kept alongside as an independent oracle.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`. The model zoo and random generators are `f64` only.

pub mod basis;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod higher_dim;
pub mod invariants;
pub mod matrix;
pub mod models;
pub mod random;
pub mod scalar;
pub mod spectrum;
pub mod symmetry;

pub use basis::{
    build_f_operator, classify_point, compute_basis, ladder_phases, non_normality, BasisPair,
    ComputationalBasis, FlatSinglet, LadderPhases, PointKind,
};
pub use eigen::{general_eig, hermitian_eig, schur, EigenSystem};
pub use error::{Error, Result};
pub use hamiltonian::{
    f_vector, gamma_decompose, normalize, pauli_decompose, verify_d_symmetry, FVector,
    NhHamiltonian, PauliVector,
};
pub use higher_dim::{
    block_decompose, degenerate_spectrum, flat_singlets, spectral_flattening_check, BlockPair,
    DegeneracyKind, DegenerateSpectrum,
};
pub use matrix::{anticommutator, commutator, CMatrix, CVector};
pub use scalar::{Real, Tolerances};
pub use spectrum::{
    bloch_point, decompose, dual_states, oracle_check, pair_spectrum, BlochPoint, Magnitude,
    OracleReport, PairSpectrum, SpectralDecomposition,
};
pub use symmetry::{
    build_dual_maps, build_symmetry_ops, energy_reality_class, gblc_classify, indefinite_norms,
    pseudo_hermitian_residuals, AntiUnitary, DualMaps, EnergyClass, SymmetryReport,
};

/// Double precision complex scalar.
pub type ComplexScalar = num_complex::Complex64;
/// Double precision dense matrix.
pub type ComplexMatrix = CMatrix<f64>;
/// Single precision dense matrix.
pub type ComplexMatrix32 = CMatrix<f32>;
/// Double precision column vector.
pub type ComplexVector = CVector<f64>;
pub type Hamiltonian = NhHamiltonian<f64>;
pub type Basis = ComputationalBasis<f64>;
pub type Spectrum = SpectralDecomposition<f64>;
pub type Maps = DualMaps<f64>;
