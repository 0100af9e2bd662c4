//! Seeded random matrices for tests, the self-test runner and sweeps.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as Z;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{inner, norm, CMatrix, CVector};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut SeededRng) -> Z {
    Z::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries drawn independently from the standard complex normal.
pub fn complex_matrix(rng: &mut SeededRng, n: usize) -> CMatrix<f64> {
    CMatrix::from_fn(n, |_, _| complex_normal(rng))
}

pub fn hermitian_matrix(rng: &mut SeededRng, n: usize) -> CMatrix<f64> {
    let a = complex_matrix(rng, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary from Gram–Schmidt on a Gaussian matrix.
pub fn unitary_matrix(rng: &mut SeededRng, n: usize) -> CMatrix<f64> {
    let mut cols: Vec<CVector<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: CVector<f64> = (0..n).map(|_| complex_normal(rng)).collect();
        for q in &cols {
            let p = inner(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            cols.push(v.iter().map(|x| x / nv).collect());
        }
    }
    CMatrix::from_columns(&cols)
}

/// A random 2×2 matrix; every such matrix has scalar `{H₀, H₀†}`.
pub fn matrix_2x2(rng: &mut SeededRng) -> CMatrix<f64> {
    complex_matrix(rng, 2)
}

/// Ground truth for a generated scalar-D matrix.
#[derive(Clone, Debug)]
pub struct ScalarDSample {
    pub matrix: CMatrix<f64>,
    /// `f ≥ ½` of each pair.
    pub fs: Vec<f64>,
    /// `γ` of each pair.
    pub gammas: Vec<f64>,
    /// `γ₀` of each flat state.
    pub flat_gammas: Vec<f64>,
    pub d: f64,
    pub tau: Z,
}

impl ScalarDSample {
    /// Eigenvalues of `matrix` from the construction.
    pub fn eigenvalues(&self) -> Vec<Z> {
        let s = self.d.sqrt();
        let mut out = Vec::new();
        for (f, g) in self.fs.iter().zip(&self.gammas) {
            let e = Z::from_polar((f * (1.0 - f)).powf(0.25), *g) * s;
            out.push(e + self.tau);
            out.push(-e + self.tau);
        }
        for g in &self.flat_gammas {
            out.push(Z::from_polar(FRAC_1_SQRT_2 * s, *g) + self.tau);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScalarDOptions {
    /// All pairs share one `f` level with distinct phases.
    pub circular: bool,
    /// Keep `min(f, 1 − f)` at least this far from the boundary.
    pub ep_margin: f64,
    /// Keep distinct `f` levels at least this far apart.
    pub level_gap: f64,
    pub shift: bool,
}

impl Default for ScalarDOptions {
    fn default() -> Self {
        ScalarDOptions {
            circular: false,
            ep_margin: 0.02,
            level_gap: 0.02,
            shift: true,
        }
    }
}

/// `P · diag(ladder blocks, flat phases) · P†` scaled by `√d` and shifted by
/// `τ`, with `P` Haar random. Odd `n` carries one flat state.
pub fn scalar_d_matrix(rng: &mut SeededRng, n: usize, opts: ScalarDOptions) -> ScalarDSample {
    let pairs = n / 2;
    let mut fs: Vec<f64> = Vec::with_capacity(pairs);
    let lo = 0.5 + opts.level_gap;
    let hi = 1.0 - opts.ep_margin;
    let shared = rng.random_range(lo..hi);
    while fs.len() < pairs {
        let f = if opts.circular {
            shared
        } else {
            rng.random_range(lo..hi)
        };
        if opts.circular || fs.iter().all(|g| (g - f).abs() >= opts.level_gap) {
            fs.push(f);
        }
    }
    let mut gammas: Vec<f64> = Vec::with_capacity(pairs);
    while gammas.len() < pairs {
        let g = rng.random_range(-PI / 2.0 + 0.05..PI / 2.0);
        if gammas.iter().all(|h| (h - g).abs() >= 0.05) {
            gammas.push(g);
        }
    }
    let phis: Vec<f64> = (0..pairs).map(|_| rng.random_range(-PI..PI)).collect();
    let flat_gammas: Vec<f64> = (0..n % 2).map(|_| rng.random_range(-PI..PI)).collect();
    let mut core = CMatrix::zeros(n);
    for k in 0..pairs {
        let (f, g, p) = (fs[k], gammas[k], phis[k]);
        core[(2 * k + 1, 2 * k)] = Z::from_polar(f.sqrt(), g + p);
        core[(2 * k, 2 * k + 1)] = Z::from_polar((1.0 - f).sqrt(), g - p);
    }
    for (j, g) in flat_gammas.iter().enumerate() {
        core[(2 * pairs + j, 2 * pairs + j)] = Z::from_polar(FRAC_1_SQRT_2, *g);
    }
    let u = unitary_matrix(rng, n);
    let d: f64 = rng.random_range(0.25..4.0);
    let tau = if opts.shift {
        complex_normal(rng)
    } else {
        Z::new(0.0, 0.0)
    };
    let matrix =
        &(&(&u * &core) * &u.adjoint()).scale_real(d.sqrt()) + &CMatrix::identity(n).scale(tau);
    ScalarDSample {
        matrix,
        fs,
        gammas,
        flat_gammas,
        d,
        tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{general_eig, multiset_distance};
    use crate::hamiltonian::normalize;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(1);
        let u = unitary_matrix(&mut rng, 5);
        assert!((&u.adjoint() * &u).distance(&CMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn scalar_d_sample_has_its_stated_spectrum() {
        let mut rng = seeded(7);
        for n in 3..=6 {
            let s = scalar_d_matrix(&mut rng, n, ScalarDOptions::default());
            let h = normalize(&s.matrix, 1e-9).unwrap();
            assert!((h.d - s.d).abs() < 1e-10);
            let es = general_eig(&s.matrix).unwrap();
            assert!(multiset_distance(&es.values, &s.eigenvalues()) < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = complex_matrix(&mut seeded(3), 3);
        let b = complex_matrix(&mut seeded(3), 3);
        assert_eq!(a, b);
    }
}
