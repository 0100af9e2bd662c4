//! The computational basis: eigenvectors of `F = H†H` grouped into
//! `(f, 1 − f)` pairs on which `H` acts as a two-step ladder.

use crate::eigen::{gauge_fix, hermitian_eig, schur};
use crate::error::{Error, Result};
use crate::hamiltonian::NhHamiltonian;
use crate::matrix::{inner, norm, normalized, CMatrix, CVector};
use crate::scalar::{cr, wrap_angle, Real, C};

/// Location of a pair relative to the boundaries of the `F` spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    Exceptional,
    Normal,
    Generic,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Exceptional => "exceptional",
            PointKind::Normal => "normal",
            PointKind::Generic => "generic",
        }
    }
}

/// One `(|f⟩, |1−f⟩)` pair. The basis builder labels the larger eigenvalue
/// as `f`; explicit bases may use either order.
#[derive(Clone, Debug)]
pub struct BasisPair<T> {
    pub f: T,
    pub v_f: CVector<T>,
    pub v_cf: CVector<T>,
    pub kind: PointKind,
}

impl<T: Real> BasisPair<T> {
    /// The smaller of `f` and `1 − f`.
    pub fn ep_distance(&self) -> T {
        self.f.min(T::one() - self.f)
    }
}

/// An `f = ½` vector that `H` maps onto itself, `H v = e^{iγ₀}/√2 · v`.
#[derive(Clone, Debug)]
pub struct FlatSinglet<T> {
    pub v: CVector<T>,
    pub gamma0: T,
}

impl<T: Real> FlatSinglet<T> {
    pub fn energy(&self) -> C<T> {
        C::from_polar(T::FRAC_1_SQRT_2(), self.gamma0)
    }
}

/// One eigenspace of `F`, as returned by the Hermitian solver.
#[derive(Clone, Debug)]
pub struct FLevel<T> {
    pub f: T,
    pub vectors: Vec<CVector<T>>,
}

#[derive(Clone, Debug)]
pub struct ComputationalBasis<T> {
    pub pairs: Vec<BasisPair<T>>,
    pub singlets: Vec<FlatSinglet<T>>,
    /// Raw eigenspaces of `F` in descending `f`.
    pub levels: Vec<FLevel<T>>,
    /// Set when an odd-dimensional `H` has several `f = ½` states, which
    /// mix under `H`.
    pub mixed_normal_subspace: bool,
    pub tol: T,
}

impl<T: Real> ComputationalBasis<T> {
    pub fn dim(&self) -> usize {
        2 * self.pairs.len() + self.singlets.len()
    }

    /// Basis vectors as columns: each pair as `v_f, v_cf`, then the singlets.
    pub fn unitary(&self) -> CMatrix<T> {
        let mut cols = Vec::with_capacity(self.dim());
        for p in &self.pairs {
            cols.push(p.v_f.clone());
            cols.push(p.v_cf.clone());
        }
        cols.extend(self.singlets.iter().map(|s| s.v.clone()));
        CMatrix::from_columns(&cols)
    }

    /// `‖P†P − I‖_max` for the basis matrix `P`.
    pub fn orthonormality_defect(&self) -> T {
        let p = self.unitary();
        (&p.adjoint() * &p).distance(&CMatrix::identity(p.dim()))
    }
}

/// `(γ, φ)` with `H|f⟩ = e^{i(γ+φ)}√f |1−f⟩` and `H|1−f⟩ = e^{i(γ−φ)}√(1−f) |f⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderPhases<T> {
    pub gamma: T,
    pub phi: T,
}

impl<T: Real> LadderPhases<T> {
    /// Reduces `(γ, φ)` to `γ ∈ (−π/2, π/2]` by the joint shift `(γ, φ) → (γ ± π, φ ± π)`.
    /// Values within a few ulps of `−π/2` resolve to `+π/2`.
    pub fn canonical(gamma: T, phi: T) -> Self {
        let pi = T::PI();
        let half = T::FRAC_PI_2();
        let snap = T::epsilon() * T::lit(1e3);
        let mut g = wrap_angle(gamma);
        let mut p = phi;
        if g > half + snap {
            g -= pi;
            p -= pi;
        } else if g <= -half + snap {
            g += pi;
            p += pi;
        }
        LadderPhases {
            gamma: g,
            phi: wrap_angle(p),
        }
    }
}

/// `F = H†H` of the rescaled Hamiltonian.
pub fn build_f_operator<T: Real>(h: &NhHamiltonian<T>) -> CMatrix<T> {
    &h.rescaled.adjoint() * &h.rescaled
}

pub fn classify_point<T: Real>(f: T, tol: T) -> PointKind {
    if f.min(T::one() - f) <= tol {
        PointKind::Exceptional
    } else if (f - T::lit(0.5)).abs() <= tol {
        PointKind::Normal
    } else {
        PointKind::Generic
    }
}

/// Distance `|f − ½|` from the normal point.
pub fn non_normality<T: Real>(f: T) -> T {
    (f - T::lit(0.5)).abs()
}

/// Builds the basis with the default exceptional-point tolerance.
pub fn compute_basis<T: Real>(h: &NhHamiltonian<T>) -> Result<ComputationalBasis<T>> {
    compute_basis_with(h, T::tolerances().exceptional)
}

pub fn compute_basis_with<T: Real>(
    h: &NhHamiltonian<T>,
    ep_tol: T,
) -> Result<ComputationalBasis<T>> {
    let tols = T::tolerances();
    let f_op = build_f_operator(h);
    let es = hermitian_eig(&f_op, tols.hermitian)?;
    let n = h.dim();
    let half = T::lit(0.5);

    for v in &es.values {
        if v.re < -tols.spectrum_bound || v.re > T::one() + tols.spectrum_bound {
            return Err(Error::SpectrumOutOfBounds {
                value: v.re.to_f64_lossy(),
            });
        }
    }

    // Group into levels, descending in f.
    let mut levels: Vec<FLevel<T>> = Vec::new();
    for k in (0..n).rev() {
        let f = es.values[k].re.max(T::zero()).min(T::one());
        let near_half = (f - half).abs() <= tols.pairing;
        match levels.last_mut() {
            Some(last)
                if (last.f - f).abs() <= tols.degeneracy
                    || (near_half && (last.f - half).abs() <= tols.pairing) =>
            {
                last.vectors.push(es.vectors[k].clone());
            }
            _ => levels.push(FLevel {
                f,
                vectors: vec![es.vectors[k].clone()],
            }),
        }
    }
    for level in levels.iter_mut() {
        if (level.f - half).abs() <= tols.pairing {
            level.f = half;
        }
    }

    let mut pairs = Vec::new();
    let mut singlets = Vec::new();
    let mut used = vec![false; levels.len()];
    let mut mixed_normal_subspace = false;
    for i in 0..levels.len() {
        if used[i] {
            continue;
        }
        let level = &levels[i];
        if level.f == half {
            used[i] = true;
            if n % 2 == 1 && level.vectors.len() > 1 {
                mixed_normal_subspace = true;
            }
            let (p, s) = split_normal_level(&h.rescaled, &level.vectors, ep_tol)?;
            pairs.extend(p);
            singlets.extend(s);
            continue;
        }
        if level.f < half {
            return Err(Error::UnpairedLevel {
                f: level.f.to_f64_lossy(),
                partner: (T::one() - level.f).to_f64_lossy(),
            });
        }
        let target = T::one() - level.f;
        let partner = (i + 1..levels.len()).find(|&j| {
            !used[j]
                && (levels[j].f - target).abs() <= tols.pairing
                && levels[j].vectors.len() == level.vectors.len()
        });
        let Some(j) = partner else {
            return Err(Error::UnpairedLevel {
                f: level.f.to_f64_lossy(),
                partner: target.to_f64_lossy(),
            });
        };
        used[i] = true;
        used[j] = true;
        let kind = classify_point(level.f, ep_tol);
        let built = pair_level(&h.rescaled, level.f, &level.vectors, &levels[j].vectors)?;
        pairs.extend(built.into_iter().map(|(v_f, v_cf)| BasisPair {
            f: level.f,
            v_f,
            v_cf,
            kind,
        }));
    }

    Ok(ComputationalBasis {
        pairs,
        singlets,
        levels,
        mixed_normal_subspace,
        tol: ep_tol,
    })
}

fn combine_columns<T: Real>(vectors: &[CVector<T>], coeffs: &[C<T>]) -> CVector<T> {
    let n = vectors[0].len();
    let mut out = vec![cr(T::zero()); n];
    for (v, c) in vectors.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += *c * *x;
        }
    }
    out
}

/// Block of `H` between two families of vectors, `M_ij = ⟨rows_i|H|cols_j⟩`.
pub(crate) fn block<T: Real>(
    h: &CMatrix<T>,
    rows: &[CVector<T>],
    cols: &[CVector<T>],
) -> CMatrix<T> {
    let hc: Vec<CVector<T>> = cols.iter().map(|c| h.mul_vec(c)).collect();
    CMatrix::from_fn(rows.len(), |i, j| inner(&rows[i], &hc[j]))
}

/// Pairs an `f > ½` eigenspace with its `1 − f` partner. A single pair keeps
/// the solver's vectors; larger multiplicities are resolved in the
/// eigenbasis of `BA`, which closes each ladder.
fn pair_level<T: Real>(
    h: &CMatrix<T>,
    f: T,
    upper: &[CVector<T>],
    lower: &[CVector<T>],
) -> Result<Vec<(CVector<T>, CVector<T>)>> {
    if upper.len() == 1 {
        return Ok(vec![(upper[0].clone(), lower[0].clone())]);
    }
    let a = block(h, lower, upper);
    let b = block(h, upper, lower);
    let (q, _) = schur(&(&b * &a))?;
    let sqrt_f = f.sqrt();
    let mut out = Vec::with_capacity(upper.len());
    for psi in q.columns() {
        let mut v_f = combine_columns(upper, &psi);
        let a_psi: Vec<C<T>> = a.mul_vec(&psi).iter().map(|z| *z / sqrt_f).collect();
        let mut v_cf = normalized(&combine_columns(lower, &a_psi));
        gauge_fix(&mut v_f);
        gauge_fix(&mut v_cf);
        out.push((v_f, v_cf));
    }
    Ok(out)
}

/// Resolves an `f = ½` eigenspace. `H` is normal there, so its restricted
/// eigenvectors are orthonormal; eigenvalues `±λ` are combined into ladder
/// pairs and the rest become flat singlets.
fn split_normal_level<T: Real>(
    h: &CMatrix<T>,
    vectors: &[CVector<T>],
    ep_tol: T,
) -> Result<(Vec<BasisPair<T>>, Vec<FlatSinglet<T>>)> {
    let restricted = block(h, vectors, vectors);
    let (q, t) = schur(&restricted)?;
    let m = vectors.len();
    let states: Vec<(C<T>, CVector<T>)> = (0..m)
        .map(|k| {
            let mut v = combine_columns(vectors, &q.column(k));
            gauge_fix(&mut v);
            (t[(k, k)], v)
        })
        .collect();
    let tol = T::tolerances().pairing.sqrt().max(T::lit(1e-6));
    let mut used = vec![false; m];
    let mut pairs = Vec::new();
    let mut singlets = Vec::new();
    let sqrt_half = T::FRAC_1_SQRT_2();
    for i in 0..m {
        if used[i] {
            continue;
        }
        let partner = (i + 1..m)
            .filter(|&j| !used[j])
            .map(|j| (j, (states[i].0 + states[j].0).norm()))
            .filter(|(_, d)| *d <= tol)
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));
        used[i] = true;
        match partner {
            Some((j, _)) => {
                used[j] = true;
                // e₊ carries the eigenvalue on the canonical branch.
                let gi = LadderPhases::canonical(states[i].0.arg(), T::zero()).gamma;
                let (plus, minus) = if (gi - states[i].0.arg()).abs() < T::lit(1e-9) {
                    (&states[i].1, &states[j].1)
                } else {
                    (&states[j].1, &states[i].1)
                };
                let mut v_f: CVector<T> = plus
                    .iter()
                    .zip(minus)
                    .map(|(p, q)| (*p + *q) * sqrt_half)
                    .collect();
                let mut v_cf: CVector<T> = plus
                    .iter()
                    .zip(minus)
                    .map(|(p, q)| (*p - *q) * sqrt_half)
                    .collect();
                gauge_fix(&mut v_f);
                gauge_fix(&mut v_cf);
                pairs.push(BasisPair {
                    f: T::lit(0.5),
                    v_f,
                    v_cf,
                    kind: classify_point(T::lit(0.5), ep_tol),
                });
            }
            None => singlets.push(FlatSinglet {
                gamma0: states[i].0.arg(),
                v: states[i].1.clone(),
            }),
        }
    }
    Ok((pairs, singlets))
}

/// Builds a basis from explicit vector pairs, for models that come with a
/// preferred gauge. `f` is read off as `⟨v_f|F|v_f⟩`.
pub fn basis_from_vectors<T: Real>(
    h: &NhHamiltonian<T>,
    pairs: &[(CVector<T>, CVector<T>)],
    singlets: &[CVector<T>],
    ep_tol: T,
) -> Result<ComputationalBasis<T>> {
    let f_op = build_f_operator(h);
    let pairs: Vec<BasisPair<T>> = pairs
        .iter()
        .map(|(v_f, v_cf)| {
            let f = f_op.sandwich(v_f, v_f).re.max(T::zero()).min(T::one());
            BasisPair {
                f,
                v_f: v_f.clone(),
                v_cf: v_cf.clone(),
                kind: classify_point(f, ep_tol),
            }
        })
        .collect();
    let singlets = singlets
        .iter()
        .map(|v| {
            let hv = h.rescaled.mul_vec(v);
            FlatSinglet {
                gamma0: inner(v, &hv).arg(),
                v: v.clone(),
            }
        })
        .collect();
    Ok(ComputationalBasis {
        pairs,
        singlets,
        levels: Vec::new(),
        mixed_normal_subspace: false,
        tol: ep_tol,
    })
}

/// Extracts `(γ, φ)` from the two ladder matrix elements of a pair.
pub fn ladder_phases<T: Real>(
    h: &NhHamiltonian<T>,
    pair: &BasisPair<T>,
) -> Result<LadderPhases<T>> {
    let hm = &h.rescaled;
    let leak_tol = T::tolerances().residual * T::lit(0.1);
    let leak = hm
        .sandwich(&pair.v_f, &pair.v_f)
        .norm()
        .max(hm.sandwich(&pair.v_cf, &pair.v_cf).norm());
    if leak > leak_tol {
        return Err(Error::DiagonalLeak {
            leak: leak.to_f64_lossy(),
        });
    }
    let c1 = hm.sandwich(&pair.v_cf, &pair.v_f);
    let c2 = hm.sandwich(&pair.v_f, &pair.v_cf);
    if pair.kind == PointKind::Exceptional {
        let surviving = if c1.norm() >= c2.norm() { c1 } else { c2 };
        return Err(Error::ExceptionalPoint {
            surviving_phase: surviving.arg().to_f64_lossy(),
        });
    }
    let two = T::lit(2.0);
    Ok(LadderPhases::canonical(
        (c1.arg() + c2.arg()) / two,
        (c1.arg() - c2.arg()) / two,
    ))
}

/// `max_i ‖F v − f v‖` over every basis vector, a consistency check.
pub fn basis_residual<T: Real>(h: &NhHamiltonian<T>, basis: &ComputationalBasis<T>) -> T {
    let f_op = build_f_operator(h);
    let res = |v: &[C<T>], f: T| {
        let fv = f_op.mul_vec(v);
        norm(
            &fv.iter()
                .zip(v)
                .map(|(x, y)| *x - *y * f)
                .collect::<Vec<_>>(),
        )
    };
    let mut worst = T::zero();
    for p in &basis.pairs {
        worst = worst
            .max(res(&p.v_f, p.f))
            .max(res(&p.v_cf, T::one() - p.f));
    }
    for s in &basis.singlets {
        worst = worst.max(res(&s.v, T::lit(0.5)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::normalize;
    use crate::matrix::{sigma_x, CMatrix};
    use num_complex::Complex64 as Z;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn z(re: f64, im: f64) -> Z {
        Z::new(re, im)
    }

    fn alpha_beta(alpha: f64, beta: f64) -> CMatrix<f64> {
        let s = 1.0 / 2f64.sqrt();
        let (hx, hy, hz) = (
            z(s * alpha.sin() * beta.cos(), 0.0),
            z(s * alpha.sin() * beta.sin(), 0.0),
            z(0.0, s * alpha.cos()),
        );
        CMatrix::from_rows(vec![
            vec![hz, hx - Z::i() * hy],
            vec![hx + Z::i() * hy, -hz],
        ])
        .unwrap()
    }

    #[test]
    fn sigma_x_is_one_normal_pair() {
        let h = normalize(&sigma_x::<f64>(), 1e-9).unwrap();
        let f = build_f_operator(&h);
        assert!(f.distance(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
        let b = compute_basis(&h).unwrap();
        assert_eq!(b.pairs.len(), 1);
        assert!(b.singlets.is_empty());
        assert_eq!(b.pairs[0].kind, PointKind::Normal);
        let ph = ladder_phases(&h, &b.pairs[0]).unwrap();
        assert!(ph.gamma.abs() < 1e-15 && ph.phi.abs() < 1e-15);
    }

    #[test]
    fn classification_and_distance() {
        assert_eq!(classify_point(0.0, 1e-9), PointKind::Exceptional);
        assert_eq!(classify_point(0.5, 1e-9), PointKind::Normal);
        assert_eq!(classify_point(0.3, 1e-9), PointKind::Generic);
        assert_eq!(non_normality(0.5), 0.0);
        assert_eq!(non_normality(0.0), 0.5);
        assert!((non_normality(0.9_f64) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn alpha_beta_levels() {
        let h = normalize(&alpha_beta(PI / 6.0, 0.0), 1e-9).unwrap();
        let b = compute_basis(&h).unwrap();
        let expected = 0.5 + 0.5 * (PI / 3.0).sin();
        assert!((b.pairs[0].f - expected).abs() < 1e-14);
        assert!(basis_residual(&h, &b) < 1e-14);
        assert!(b.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn region_one_is_imaginary() {
        let h = normalize(&alpha_beta(PI / 8.0, 1.0), 1e-9).unwrap();
        let b = compute_basis(&h).unwrap();
        let ph = ladder_phases(&h, &b.pairs[0]).unwrap();
        assert!((ph.gamma - FRAC_PI_2).abs() < 1e-12, "{ph:?}");
    }

    #[test]
    fn exceptional_point_reports_surviving_phase() {
        let h = normalize(&alpha_beta(PI / 4.0, 0.3), 1e-9).unwrap();
        let b = compute_basis(&h).unwrap();
        assert_eq!(b.pairs[0].kind, PointKind::Exceptional);
        assert!(matches!(
            ladder_phases(&h, &b.pairs[0]),
            Err(Error::ExceptionalPoint { .. })
        ));
        let h2 = &h.rescaled * &h.rescaled;
        assert!(h2.max_abs() < 1e-15);
    }

    #[test]
    fn canonical_branch() {
        let p = LadderPhases::canonical(PI, 3.0 * PI / 2.0);
        assert!(p.gamma.abs() < 1e-15);
        assert!((p.phi - FRAC_PI_2).abs() < 1e-15);
        let q = LadderPhases::canonical(-FRAC_PI_2, 0.0);
        assert!((q.gamma - FRAC_PI_2).abs() < 1e-15);
        assert!((q.phi - PI).abs() < 1e-15);
    }

    #[test]
    fn leak_is_detected() {
        let h = normalize(&sigma_x::<f64>(), 1e-9).unwrap();
        let bad = BasisPair {
            f: 0.5,
            v_f: vec![z(1.0 / 2f64.sqrt(), 0.0), z(1.0 / 2f64.sqrt(), 0.0)],
            v_cf: vec![z(1.0 / 2f64.sqrt(), 0.0), z(-1.0 / 2f64.sqrt(), 0.0)],
            kind: PointKind::Normal,
        };
        assert!(matches!(
            ladder_phases(&h, &bad),
            Err(Error::DiagonalLeak { .. })
        ));
    }
}
