//! Validation and normalization of input Hamiltonians, plus the Pauli and
//! Gamma-matrix expansions used by the two- and four-level models.

use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::matrix::{anticommutator, commutator, pauli, CMatrix};
use crate::scalar::{cr, Real, C};

/// A Hamiltonian shifted and rescaled so that `{H, H†} = I`. The shift is
/// `Tr(H)/N` except for odd-dimensional inputs whose flat states carry trace.
#[derive(Clone, Debug)]
pub struct NhHamiltonian<T> {
    pub original: CMatrix<T>,
    /// The removed multiple of the identity.
    pub trace_shift: C<T>,
    /// Scale of the anticommutator, `{H₀, H₀†} = d·I`.
    pub d: T,
    pub rescaled: CMatrix<T>,
    pub tol: T,
}

impl<T: Real> NhHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.rescaled.dim()
    }

    /// Maps a rescaled eigenvalue back to the scale of the input matrix.
    pub fn physical(&self, e: C<T>) -> C<T> {
        e * self.d.sqrt() + self.trace_shift
    }
}

/// Removes a trace shift, checks that `{H₀, H₀†}` is scalar and rescales.
///
/// The shift is `Tr(H)/N`. When that leaves a non-scalar anticommutator
/// (odd dimensions carry flat states that need not cancel in the trace) the
/// shift is refitted by least squares on the traceless part of `{H₀, H₀†}`.
/// The scalar test is relative: `‖D − d·I‖_max ≤ tol·d` with `d = Tr D / N`.
pub fn normalize<T: Real>(m: &CMatrix<T>, tol: T) -> Result<NhHamiltonian<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mean = m.trace() / T::from_usize(n).unwrap_or_else(T::one);
    let first = shifted(m, mean, tol);
    let (trace_shift, h0, d) = match first {
        Ok(v) => v,
        Err(e @ Error::NotScalarD { .. }) => {
            match fitted_shift(m, mean).map(|t| shifted(m, t, tol)) {
                Some(Ok(v)) => v,
                _ => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };
    let rescaled = h0.scale_real(T::one() / d.sqrt());
    Ok(NhHamiltonian {
        original: m.clone(),
        trace_shift,
        d,
        rescaled,
        tol,
    })
}

fn shifted<T: Real>(m: &CMatrix<T>, tau: C<T>, tol: T) -> Result<(C<T>, CMatrix<T>, T)> {
    let n = m.dim();
    let h0 = m - &CMatrix::identity(n).scale(tau);
    let dmat = anticommutator(&h0, &h0.adjoint())?;
    let d = dmat.trace().re / T::from_usize(n).unwrap_or_else(T::one);
    if d <= T::lit(1e-14) {
        return Err(Error::ZeroOperator {
            d: d.to_f64_lossy(),
        });
    }
    let spread = dmat.distance(&CMatrix::identity(n).scale_real(d)) / d;
    if spread > tol {
        let (min, max) = match hermitian_eig(&dmat, T::lit(1e-8)) {
            Ok(es) => (es.values[0].re, es.values[n - 1].re),
            Err(_) => (T::nan(), T::nan()),
        };
        return Err(Error::NotScalarD {
            spread: spread.to_f64_lossy(),
            min: min.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    Ok((tau, h0, d))
}

/// `{H−τ, H†−τ*}` differs from `{H, H†}` by `−2Re τ·(H+H†) − 2Im τ·i(H†−H)`
/// plus a multiple of `I`; fits `τ` so the traceless part vanishes. Directions
/// the fit cannot see keep the component of `fallback`.
fn fitted_shift<T: Real>(m: &CMatrix<T>, fallback: C<T>) -> Option<C<T>> {
    let n = m.dim();
    let traceless = |x: CMatrix<T>| {
        let t = x.trace() / T::from_usize(n).unwrap_or_else(T::one);
        &x - &CMatrix::identity(n).scale(t)
    };
    let md = m.adjoint();
    let target = traceless(anticommutator(m, &md).ok()?).scale_real(T::lit(0.5));
    let u = traceless(m + &md);
    let v = traceless((&md - m).scale(C::i()));
    let dot = |x: &CMatrix<T>, y: &CMatrix<T>| {
        x.as_slice()
            .iter()
            .zip(y.as_slice())
            .fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re)
    };
    let (uu, uv, vv) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
    let (ut, vt) = (dot(&u, &target), dot(&v, &target));
    let det = uu * vv - uv * uv;
    let scale = (uu * vv).max(T::min_positive_value());
    if det > T::lit(1e-10) * scale {
        return Some(C::new((ut * vv - vt * uv) / det, (vt * uu - ut * uv) / det));
    }
    if uu >= vv && uu > T::zero() {
        Some(C::new(ut / uu, fallback.im))
    } else if vv > T::zero() {
        Some(C::new(fallback.re, vt / vv))
    } else {
        None
    }
}

/// True when the traceless part of `m` commutes with its anticommutator
/// `D`, up to `tol·max(1, ‖m‖³)`.
pub fn verify_d_symmetry<T: Real>(m: &CMatrix<T>, tol: T) -> bool {
    let n = m.dim();
    let shift = m.trace() / T::from_usize(n).unwrap_or_else(T::one);
    let h0 = m - &CMatrix::identity(n).scale(shift);
    let scale = h0.max_abs().max(T::one()).powi(3);
    let Ok(d) = anticommutator(&h0, &h0.adjoint()) else {
        return false;
    };
    commutator(&h0, &d)
        .map(|c| c.max_abs() <= tol * scale)
        .unwrap_or(false)
}

/// Coefficients of `H = h·σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliVector<T> {
    pub h: [C<T>; 3],
}

impl<T: Real> PauliVector<T> {
    pub fn matrix(&self) -> CMatrix<T> {
        (0..3).fold(CMatrix::zeros(2), |acc, k| {
            acc + pauli(k + 1).scale(self.h[k])
        })
    }

    /// `Σ |h_μ|²`.
    pub fn norm_sqr(&self) -> T {
        self.h.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Expands a traceless 2×2 matrix on the Pauli basis.
pub fn pauli_decompose<T: Real>(h2: &CMatrix<T>) -> Result<PauliVector<T>> {
    if h2.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: h2.dim(),
        });
    }
    let tr = h2.trace().norm();
    if tr > T::tolerances().traceless * h2.max_abs().max(T::one()) {
        return Err(Error::NotTraceless {
            trace: tr.to_f64_lossy(),
        });
    }
    let half = T::lit(0.5);
    let h = [1, 2, 3].map(|mu| (&pauli::<T>(mu) * h2).trace() * half);
    Ok(PauliVector { h })
}

/// Real vector with `F = ½ I + 𝔣·σ` for a rescaled two-level `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FVector<T> {
    pub components: [T; 3],
    pub magnitude: T,
}

/// `𝔣_μ = −2 Im[h*_ν h_ρ]` for cyclic `(μ, ν, ρ)`.
pub fn f_vector<T: Real>(h: &PauliVector<T>) -> FVector<T> {
    let two = T::lit(2.0);
    let comp = |nu: usize, rho: usize| -two * (h.h[nu].conj() * h.h[rho]).im;
    let components = [comp(1, 2), comp(2, 0), comp(0, 1)];
    let magnitude = components.iter().map(|x| *x * *x).sum::<T>().sqrt();
    FVector {
        components,
        magnitude,
    }
}

/// The five mutually anticommuting 4×4 matrices, in order
/// `τ₃⊗σ₁, τ₃⊗σ₂, τ₁⊗σ₀, τ₂⊗σ₀, τ₃⊗σ₃`.
pub fn gamma_matrices<T: Real>() -> [CMatrix<T>; 5] {
    [
        pauli::<T>(3).kron(&pauli(1)),
        pauli::<T>(3).kron(&pauli(2)),
        pauli::<T>(1).kron(&pauli(0)),
        pauli::<T>(2).kron(&pauli(0)),
        pauli::<T>(3).kron(&pauli(3)),
    ]
}

/// Coefficients of `H = Σ h_μ Γ_μ` and the reconstruction residual.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaDecomposition<T> {
    pub h: [C<T>; 5],
    pub residual: T,
}

pub fn gamma_decompose<T: Real>(h4: &CMatrix<T>) -> Result<GammaDecomposition<T>> {
    if h4.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            found: h4.dim(),
        });
    }
    let gammas = gamma_matrices::<T>();
    let quarter = T::lit(0.25);
    let mut h = [cr(T::zero()); 5];
    let mut rebuilt = CMatrix::zeros(4);
    for (k, g) in gammas.iter().enumerate() {
        h[k] = (g * h4).trace() * quarter;
        rebuilt = rebuilt + g.scale(h[k]);
    }
    let residual = rebuilt.distance(h4);
    if residual > T::lit(1e-10).max(T::tolerances().traceless) * h4.max_abs().max(T::one()) {
        return Err(Error::NotInGammaSpan {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(GammaDecomposition { h, residual })
}

/// Builds `Σ h_μ Γ_μ`.
pub fn gamma_matrix<T: Real>(h: &[C<T>; 5]) -> CMatrix<T> {
    gamma_matrices::<T>()
        .iter()
        .zip(h)
        .fold(CMatrix::zeros(4), |acc, (g, c)| acc + g.scale(*c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{sigma_x, sigma_z};
    use num_complex::Complex64 as Z;

    fn z(re: f64, im: f64) -> Z {
        Z::new(re, im)
    }

    #[test]
    fn sigma_x_has_d_two() {
        let h = normalize(&sigma_x::<f64>(), 1e-9).unwrap();
        assert_eq!(h.trace_shift, z(0.0, 0.0));
        assert!((h.d - 2.0).abs() < 1e-15);
        assert!(
            h.rescaled
                .distance(&sigma_x().scale_real(1.0 / 2f64.sqrt()))
                < 1e-15
        );
    }

    #[test]
    fn gain_loss_d() {
        let (g1, g2, wr, wi) = (0.3, -0.1, 0.4, 0.25);
        let m = CMatrix::from_rows(vec![
            vec![z(0.0, -g1), z(wr, -wi)],
            vec![z(wr, wi), z(0.0, -g2)],
        ])
        .unwrap();
        let h = normalize(&m, 1e-9).unwrap();
        let dg: f64 = (g1 - g2) / 2.0;
        assert!((h.d - 2.0 * (wr * wr + wi * wi + dg * dg)).abs() < 1e-14);
        assert!((h.trace_shift - z(0.0, -(g1 + g2) / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn shifted_diagonal_is_accepted() {
        let h = normalize(&CMatrix::diagonal(&[z(1.0, 0.0), z(2.0, 0.0)]), 1e-9).unwrap();
        assert!((h.d - 0.5).abs() < 1e-15);
        assert!((h.trace_shift - z(1.5, 0.0)).norm() < 1e-15);
        assert!(verify_d_symmetry(
            &CMatrix::diagonal(&[z(1.0, 0.0), z(2.0, 0.0)]),
            1e-12
        ));
    }

    #[test]
    fn non_scalar_d_is_rejected() {
        let m = CMatrix::diagonal(&[z(1.0, 0.0), z(2.0, 0.0), z(4.0, 0.0)]);
        assert!(matches!(normalize(&m, 1e-9), Err(Error::NotScalarD { .. })));
        assert!(matches!(
            normalize(&CMatrix::<f64>::identity(3), 1e-9),
            Err(Error::ZeroOperator { .. })
        ));
    }

    #[test]
    fn unequal_blocks_with_coupling_break_d_symmetry() {
        let blocks = sigma_x::<f64>().embed(4, 0) + sigma_x::<f64>().scale_real(2.0).embed(4, 2);
        assert!(verify_d_symmetry(&blocks, 1e-12));
        let mut coupled = blocks.clone();
        coupled[(0, 2)] = z(0.5, 0.0);
        assert!(!verify_d_symmetry(&coupled, 1e-12));
    }

    #[test]
    fn pauli_components() {
        assert_eq!(
            pauli_decompose(&sigma_z::<f64>()).unwrap().h,
            [z(0.0, 0.0), z(0.0, 0.0), z(1.0, 0.0)]
        );
        assert!(matches!(
            pauli_decompose(&CMatrix::<f64>::identity(2)),
            Err(Error::NotTraceless { .. })
        ));
        assert!(matches!(
            pauli_decompose(&CMatrix::<f64>::identity(3)),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn shifted_gain_loss_components() {
        // Trace removal leaves −iδγ on the upper diagonal entry.
        let (g1, g2, wr, wi) = (0.5, 0.1, 0.3, -0.2);
        let m = CMatrix::from_rows(vec![
            vec![z(0.0, -g1), z(wr, -wi)],
            vec![z(wr, wi), z(0.0, -g2)],
        ])
        .unwrap();
        let h = normalize(&m, 1e-9).unwrap();
        let pv = pauli_decompose(&h.rescaled.scale_real(h.d.sqrt())).unwrap();
        let dg = (g1 - g2) / 2.0;
        assert!((pv.h[0] - z(wr, 0.0)).norm() < 1e-15);
        assert!((pv.h[1] - z(wi, 0.0)).norm() < 1e-15);
        assert!((pv.h[2] - z(0.0, -dg)).norm() < 1e-15);
    }

    #[test]
    fn alpha_beta_f_vector() {
        let (a, b) = (0.7_f64, 1.3_f64);
        let s = 1.0 / 2f64.sqrt();
        let pv = PauliVector {
            h: [
                z(s * a.sin() * b.cos(), 0.0),
                z(s * a.sin() * b.sin(), 0.0),
                z(0.0, s * a.cos()),
            ],
        };
        let fv = f_vector(&pv);
        assert!((fv.components[0] + 0.5 * (2.0 * a).sin() * b.sin()).abs() < 1e-15);
        assert!((fv.components[1] - 0.5 * (2.0 * a).sin() * b.cos()).abs() < 1e-15);
        assert!(fv.components[2].abs() < 1e-15);
        assert!((fv.magnitude - 0.5 * (2.0 * a).sin().abs()).abs() < 1e-15);
    }

    #[test]
    fn real_h_has_zero_f_vector() {
        let pv = PauliVector {
            h: [z(0.3, 0.0), z(-0.2, 0.0), z(0.6, 0.0)],
        };
        assert_eq!(f_vector(&pv).magnitude, 0.0);
    }

    #[test]
    fn gamma_five_and_rejection() {
        let g = gamma_matrices::<f64>();
        let dec = gamma_decompose(&g[4]).unwrap();
        assert_eq!(
            dec.h,
            [
                z(0.0, 0.0),
                z(0.0, 0.0),
                z(0.0, 0.0),
                z(0.0, 0.0),
                z(1.0, 0.0)
            ]
        );
        let outside = g[0].clone() + pauli::<f64>(2).kron(&pauli(1)).scale_real(0.3);
        assert!(matches!(
            gamma_decompose(&outside),
            Err(Error::NotInGammaSpan { .. })
        ));
        for i in 0..5 {
            for j in 0..5 {
                let ac = anticommutator(&g[i], &g[j]).unwrap();
                let expected = if i == j {
                    CMatrix::identity(4).scale_real(2.0)
                } else {
                    CMatrix::zeros(4)
                };
                assert_eq!(ac, expected);
            }
        }
    }
}
