//! `N`-level Hamiltonians with scalar `{H, H†}`: per-level off-diagonal
//! blocks, degenerate pair spectra and flat `f = ½` states.

use crate::basis::{block, ComputationalBasis, FlatSinglet, LadderPhases};
use crate::eigen::{min_singular_value, schur};
use crate::error::{Error, Result};
use crate::hamiltonian::NhHamiltonian;
use crate::matrix::{anticommutator, norm, CMatrix, CVector};
use crate::scalar::{cr, Real, C};
use crate::spectrum::{Magnitude, SpectralDecomposition};

/// `H` on one `f`-level: `A` maps the `|f⟩_j` into the `|1−f⟩_i`, `B` the reverse.
#[derive(Clone, Debug)]
pub struct BlockPair<T> {
    pub f: T,
    pub m: usize,
    pub a: CMatrix<T>,
    pub b: CMatrix<T>,
    pub basis_f: Vec<CVector<T>>,
    pub basis_cf: Vec<CVector<T>>,
}

impl<T: Real> BlockPair<T> {
    /// Largest deviation of the singular values of `A` from `√f` and of `B`
    /// from `√(1−f)`.
    pub fn ladder_amplitude_defect(&self) -> T {
        let check = |m: &CMatrix<T>, s: T| {
            let gram = &m.adjoint() * m;
            gram.distance(&CMatrix::identity(m.dim()).scale_real(s * s))
        };
        let sf = self.f.sqrt();
        let scf = (T::one() - self.f).max(T::zero()).sqrt();
        check(&self.a, sf).max(check(&self.b, scf))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyKind {
    /// Single pair on this level.
    NonDegenerate,
    /// Several pairs share `|E|` with distinct phases.
    Circular,
    /// Several pairs share `|E|` and `γ`.
    Point,
}

#[derive(Clone, Debug)]
pub struct DegenerateEigenpair<T> {
    pub e_plus: C<T>,
    pub e_minus: C<T>,
    pub gamma: T,
    pub psi_a: CVector<T>,
    pub psi_b: CVector<T>,
    /// `(ψ_B)_i / (ψ_A)_i`, `None` where `(ψ_A)_i` vanishes.
    pub a_coeffs: Vec<Option<C<T>>>,
    /// Unnormalized `Σ_i (ψ_A)_i |f⟩_i ± (ψ_B)_i |1−f⟩_i` in the original basis.
    pub state_plus: CVector<T>,
    pub state_minus: CVector<T>,
}

#[derive(Clone, Debug)]
pub struct DegenerateSpectrum<T> {
    pub eigenpairs: Vec<DegenerateEigenpair<T>>,
    pub kind: DegeneracyKind,
    pub coalesced: bool,
}

fn level_key<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::tolerances().degeneracy
}

/// Groups the basis by `f`-level, highest first, and extracts `A` and `B`.
/// Levels with `f ≠ ½` use the raw `F` eigenspaces when available.
pub fn block_decompose<T: Real>(
    h: &NhHamiltonian<T>,
    basis: &ComputationalBasis<T>,
) -> Result<Vec<BlockPair<T>>> {
    let half = T::lit(0.5);
    let mut groups: Vec<(T, Vec<CVector<T>>, Vec<CVector<T>>)> = Vec::new();
    let raw_levels = !basis.levels.is_empty();
    if raw_levels {
        let levels = &basis.levels;
        let mut used = vec![false; levels.len()];
        for i in 0..levels.len() {
            if used[i] || levels[i].f <= half {
                continue;
            }
            let target = T::one() - levels[i].f;
            if let Some(j) = (0..levels.len()).find(|&j| {
                !used[j] && j != i && (levels[j].f - target).abs() <= T::tolerances().pairing
            }) {
                used[i] = true;
                used[j] = true;
                groups.push((
                    levels[i].f,
                    levels[i].vectors.clone(),
                    levels[j].vectors.clone(),
                ));
            }
        }
    }
    for p in &basis.pairs {
        if raw_levels && p.f != half {
            continue;
        }
        match groups.iter_mut().find(|g| level_key(g.0, p.f)) {
            Some(g) => {
                g.1.push(p.v_f.clone());
                g.2.push(p.v_cf.clone());
            }
            None => groups.push((p.f, vec![p.v_f.clone()], vec![p.v_cf.clone()])),
        }
    }
    groups.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let hm = &h.rescaled;
    let all: Vec<(usize, &CVector<T>)> = groups
        .iter()
        .enumerate()
        .flat_map(|(k, g)| g.1.iter().chain(g.2.iter()).map(move |v| (k, v)))
        .chain(basis.singlets.iter().map(|s| (usize::MAX, &s.v)))
        .collect();
    let leak_tol = T::tolerances().residual * T::lit(0.1);
    let mut leak = T::zero();
    for (k, x) in &all {
        let hx = hm.mul_vec(x);
        for (l, y) in &all {
            if k != l {
                leak = leak.max(crate::matrix::inner(y, &hx).norm());
            }
        }
    }
    if leak > leak_tol {
        return Err(Error::CrossLevelLeak {
            leak: leak.to_f64_lossy(),
        });
    }
    Ok(groups
        .into_iter()
        .map(|(f, bf, bcf)| explicit_block(h, f, bf, bcf))
        .collect())
}

/// Block of `H` on explicitly given level bases.
pub fn explicit_block<T: Real>(
    h: &NhHamiltonian<T>,
    f: T,
    basis_f: Vec<CVector<T>>,
    basis_cf: Vec<CVector<T>>,
) -> BlockPair<T> {
    let a = block(&h.rescaled, &basis_cf, &basis_f);
    let b = block(&h.rescaled, &basis_f, &basis_cf);
    BlockPair {
        f,
        m: basis_f.len(),
        a,
        b,
        basis_f,
        basis_cf,
    }
}

fn ambient<T: Real>(vectors: &[CVector<T>], coeffs: &[C<T>]) -> CVector<T> {
    let n = vectors[0].len();
    let mut out = vec![cr(T::zero()); n];
    for (v, c) in vectors.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += *c * *x;
        }
    }
    out
}

/// Solves `(BA) ψ_A = E² ψ_A` on one level and assembles the eigenstates.
pub fn degenerate_spectrum<T: Real>(bp: &BlockPair<T>) -> Result<DegenerateSpectrum<T>> {
    let ba = &bp.b * &bp.a;
    let (q, t) = schur(&ba)?;
    let m = bp.m;
    let scale = ba.max_abs().max(T::one());
    let mut off = T::zero();
    for i in 0..m {
        for j in (i + 1)..m {
            off = off.max(t[(i, j)].norm());
        }
    }
    let tol = T::tolerances().residual;
    if off > tol * scale || min_singular_value(&q) < tol {
        return Err(Error::DefectiveBA {
            residual: off.to_f64_lossy(),
        });
    }
    let sqrt_f = bp.f.sqrt();
    let coalesced = bp.f.min(T::one() - bp.f) <= T::tolerances().exceptional;
    let mut eigenpairs = Vec::with_capacity(m);
    for n in 0..m {
        let mu = t[(n, n)];
        let root = mu.sqrt();
        let gamma = if coalesced {
            T::zero()
        } else {
            LadderPhases::canonical(root.arg(), T::zero()).gamma
        };
        let e = C::from_polar(root.norm(), gamma);
        let psi_a = q.column(n);
        let a_psi = bp.a.mul_vec(&psi_a);
        let psi_b: CVector<T> = if coalesced {
            a_psi.iter().map(|z| *z / sqrt_f).collect()
        } else {
            a_psi.iter().map(|z| *z / e).collect()
        };
        let small = T::lit(1e-12);
        let a_coeffs = psi_a
            .iter()
            .zip(&psi_b)
            .map(|(x, y)| {
                if x.norm() > small {
                    Some(*y / *x)
                } else {
                    None
                }
            })
            .collect();
        let neg_b: CVector<T> = psi_b.iter().map(|z| -*z).collect();
        let f_part = ambient(&bp.basis_f, &psi_a);
        let plus_cf = ambient(&bp.basis_cf, &psi_b);
        let minus_cf = ambient(&bp.basis_cf, &neg_b);
        let (state_plus, state_minus) = if coalesced {
            (plus_cf.clone(), plus_cf)
        } else {
            (
                f_part.iter().zip(&plus_cf).map(|(x, y)| *x + *y).collect(),
                f_part.iter().zip(&minus_cf).map(|(x, y)| *x + *y).collect(),
            )
        };
        eigenpairs.push(DegenerateEigenpair {
            e_plus: e,
            e_minus: -e,
            gamma,
            psi_a,
            psi_b,
            a_coeffs,
            state_plus,
            state_minus,
        });
    }
    let kind = if m == 1 {
        DegeneracyKind::NonDegenerate
    } else {
        let same_gamma = eigenpairs
            .iter()
            .all(|p| (p.e_plus - eigenpairs[0].e_plus).norm() <= T::tolerances().residual);
        if same_gamma {
            DegeneracyKind::Point
        } else {
            DegeneracyKind::Circular
        }
    };
    Ok(DegenerateSpectrum {
        eigenpairs,
        kind,
        coalesced,
    })
}

/// Flat singlets whose eigen-relation `H v = e^{iγ₀}/√2 · v` holds.
pub fn flat_singlets<T: Real>(
    h: &NhHamiltonian<T>,
    basis: &ComputationalBasis<T>,
) -> Vec<FlatSinglet<T>> {
    let tol = T::tolerances().residual * T::lit(0.1);
    basis
        .singlets
        .iter()
        .filter(|s| {
            let hv = h.rescaled.mul_vec(&s.v);
            let e = s.energy();
            norm(
                &hv.iter()
                    .zip(&s.v)
                    .map(|(x, y)| *x - e * *y)
                    .collect::<Vec<_>>(),
            ) <= tol
        })
        .cloned()
        .collect()
}

/// Result of flattening every eigenvalue onto `e^{iγ}/√2` with the
/// eigenvectors kept.
#[derive(Clone, Debug)]
pub struct FlatteningReport<T> {
    pub flattened: CMatrix<T>,
    /// `‖{H_flat, H_flat†} − I‖_max`.
    pub residual: T,
    pub holds: bool,
    /// Per pair, the scalar `½(|a|² + |a|⁻²)` that `{H_flat, H_flat†}`
    /// takes on that pair's subspace.
    pub pair_scales: Vec<T>,
    /// `‖H_flat − H‖_max` against the rescaled input.
    pub distance_to_input: T,
}

/// Builds `H_flat = Σ E/|E| · (1/√2) |E⟩⟨Ẽ|` and checks `{H_flat, H_flat†} = I`.
pub fn spectral_flattening_check<T: Real>(
    h: &NhHamiltonian<T>,
    dec: &SpectralDecomposition<T>,
) -> Result<FlatteningReport<T>> {
    let gap_tol = T::lit(1e-8);
    let mut energies: Vec<(usize, C<T>)> = Vec::new();
    for (k, p) in dec.pairs.iter().enumerate() {
        if p.coalesced || p.abs_e <= gap_tol {
            return Err(Error::GapClosed {
                gap: p.abs_e.to_f64_lossy(),
            });
        }
        energies.push((k, p.e_plus));
        energies.push((k, p.e_minus));
    }
    for i in 0..energies.len() {
        for j in (i + 1)..energies.len() {
            if energies[i].0 != energies[j].0 {
                let gap = (energies[i].1 - energies[j].1).norm();
                if gap <= gap_tol {
                    return Err(Error::GapClosed {
                        gap: gap.to_f64_lossy(),
                    });
                }
            }
        }
    }
    let n = h.dim();
    let s = T::FRAC_1_SQRT_2();
    let mut flat = CMatrix::zeros(n);
    let mut pair_scales = Vec::with_capacity(dec.pairs.len());
    for p in &dec.pairs {
        let (Some(dp), Some(dm)) = (&p.dual_plus, &p.dual_minus) else {
            return Err(Error::CoalescedPair);
        };
        let unit = p.e_plus / p.abs_e * s;
        flat = flat + CMatrix::outer(&p.v_plus, dp).scale(unit)
            - CMatrix::outer(&p.v_minus, dm).scale(unit);
        if let Magnitude::Finite(m) = p.a_mag {
            let m2 = m * m;
            pair_scales.push((m2 + T::one() / m2) * T::lit(0.5));
        }
    }
    for (g, v) in &dec.flat {
        flat = flat + CMatrix::outer(v, v).scale(C::from_polar(s, *g));
    }
    let ac = anticommutator(&flat, &flat.adjoint())?;
    let residual = ac.distance(&CMatrix::identity(n));
    Ok(FlatteningReport {
        distance_to_input: flat.distance(&h.rescaled),
        holds: residual <= gap_tol,
        flattened: flat,
        residual,
        pair_scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::compute_basis;
    use crate::hamiltonian::normalize;
    use crate::matrix::sigma_x;
    use crate::spectrum::decompose;
    use num_complex::Complex64 as Z;

    #[test]
    fn two_level_block_is_one_by_one() {
        let (f, g, p): (f64, f64, f64) = (0.7, 0.3, -0.4);
        let m = CMatrix::from_rows(vec![
            vec![Z::new(0.0, 0.0), Z::from_polar((1.0 - f).sqrt(), g - p)],
            vec![Z::from_polar(f.sqrt(), g + p), Z::new(0.0, 0.0)],
        ])
        .unwrap();
        let h = normalize(&m, 1e-9).unwrap();
        let b = compute_basis(&h).unwrap();
        let blocks = block_decompose(&h, &b).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].m, 1);
        assert!((blocks[0].a[(0, 0)].norm() - f.sqrt()).abs() < 1e-14);
        assert!((blocks[0].b[(0, 0)].norm() - (1.0 - f).sqrt()).abs() < 1e-14);
        let ds = degenerate_spectrum(&blocks[0]).unwrap();
        assert_eq!(ds.kind, DegeneracyKind::NonDegenerate);
        assert!((ds.eigenpairs[0].gamma - g).abs() < 1e-14);
    }

    #[test]
    fn normal_input_is_a_flattening_fixed_point() {
        let h = normalize(&sigma_x::<f64>(), 1e-9).unwrap();
        let dec = decompose(&h, &compute_basis(&h).unwrap()).unwrap();
        let rep = spectral_flattening_check(&h, &dec).unwrap();
        assert!(rep.holds);
        assert!(rep.distance_to_input < 1e-15);
    }

    #[test]
    fn exceptional_pair_closes_the_gap() {
        let m = CMatrix::from_rows(vec![
            vec![Z::new(0.0, 0.0), Z::new(0.0, 0.0)],
            vec![Z::new(1.0, 0.0), Z::new(0.0, 0.0)],
        ])
        .unwrap();
        let h = normalize(&m, 1e-9).unwrap();
        let dec = decompose(&h, &compute_basis(&h).unwrap()).unwrap();
        assert!(matches!(
            spectral_flattening_check(&h, &dec),
            Err(Error::GapClosed { .. })
        ));
    }
}
