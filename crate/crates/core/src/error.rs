use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the analysis pipeline. Numeric payloads are widened
/// to `f64` so the type is shared by every scalar width.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square: {rows} rows but a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },
    #[error("{{H, H†}} is not scalar: relative spread {spread:e} (eigenvalues {min:e}..{max:e})")]
    NotScalarD { spread: f64, min: f64, max: f64 },
    #[error("operator vanishes (d = {d:e})")]
    ZeroOperator { d: f64 },
    #[error("matrix is not traceless (|Tr| = {trace:e})")]
    NotTraceless { trace: f64 },
    #[error("matrix is outside the Gamma span (residual {residual:e})")]
    NotInGammaSpan { residual: f64 },
    #[error("F eigenvalue {value} lies outside [0, 1]")]
    SpectrumOutOfBounds { value: f64 },
    #[error("F level {f} has no partner at {partner}")]
    UnpairedLevel { f: f64, partner: f64 },
    #[error("pair sits at an exceptional point (surviving phase {surviving_phase})")]
    ExceptionalPoint { surviving_phase: f64 },
    #[error("H has diagonal weight {leak:e} inside a computational pair")]
    DiagonalLeak { leak: f64 },
    #[error("eigenvectors are coalesced; duals are undefined")]
    CoalescedPair,
    #[error("framework and oracle disagree by {deviation:e} (tolerance {tolerance:e})")]
    MismatchBeyondTolerance { deviation: f64, tolerance: f64 },
    #[error("H couples distinct F levels (leak {leak:e})")]
    CrossLevelLeak { leak: f64 },
    #[error("BA is not diagonalizable (residual {residual:e})")]
    DefectiveBA { residual: f64 },
    #[error("energy gap closed (min |E| gap {gap:e})")]
    GapClosed { gap: f64 },
    #[error("unknown model `{name}`")]
    UnknownModel { name: String },
    #[error("model `{model}` needs parameter `{param}`")]
    MissingParam { model: String, param: String },
}
