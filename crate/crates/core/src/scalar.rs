//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrix and spectral code is written against [`Real`], which is
//! implemented for `f32` and `f64`. The tolerances that guard degeneracy
//! detection, exceptional-point classification and residual checks are
//! type dependent, so each implementation carries its own defaults.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Default thresholds for one floating point type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Max-norm deviation from Hermiticity accepted by the Hermitian solver.
    pub hermitian: T,
    /// Eigenvalues closer than this are treated as one degenerate cluster.
    pub degeneracy: T,
    /// `min(f, 1 - f)` at or below this marks an exceptional point.
    pub exceptional: T,
    /// Allowed error in `f + f' = 1` when matching computational levels.
    pub pairing: T,
    /// Eigenvector residual bound away from exceptional points.
    pub residual: T,
    /// Relative spread of `{H, H†}` accepted as a scalar.
    pub scalar_d: T,
    /// Allowed absolute trace of a matrix declared traceless.
    pub traceless: T,
    /// Residual above which the general solver reports a defective matrix.
    pub defect: T,
    /// Slack on the `[0, 1]` bound of the `F` spectrum.
    pub spectrum_bound: T,
}

/// Floating point type usable by the solvers (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    fn tolerances() -> Tolerances<Self>;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            hermitian: 1e-12,
            degeneracy: 1e-9,
            exceptional: 1e-9,
            pairing: 1e-9,
            residual: 1e-9,
            scalar_d: 1e-9,
            traceless: 1e-12,
            defect: 1e-8,
            spectrum_bound: 1e-9,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            hermitian: 1e-5,
            degeneracy: 1e-4,
            exceptional: 1e-4,
            pairing: 1e-4,
            residual: 1e-4,
            scalar_d: 1e-4,
            traceless: 1e-5,
            defect: 1e-3,
            spectrum_bound: 1e-4,
        }
    }
}

/// Complex number over a [`Real`] field.
pub type C<T> = Complex<T>;

pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `e^{iθ}`.
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

pub fn is_finite<T: Real>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut x = theta % two_pi;
    if x <= -T::PI() {
        x += two_pi;
    } else if x > T::PI() {
        x -= two_pi;
    }
    x
}

/// Distance from `x` to the nearest point of the lattice `offset + period·ℤ`.
pub fn lattice_distance<T: Real>(x: T, offset: T, period: T) -> T {
    let y = (x - offset) / period;
    (y - y.round()).abs() * period
}

/// Converts a complex value between floating point widths.
pub fn cast_complex<S: Real, T: Real>(z: C<S>) -> C<T> {
    Complex::new(T::lit(z.re.to_f64_lossy()), T::lit(z.im.to_f64_lossy()))
}
