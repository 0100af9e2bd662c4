//! Maps between the eigenvectors of `H` and their biorthogonal duals, the
//! metric they induce, and the symmetry classification that follows.
//!
//! Operators are built on one computational pair with index 0 for `|f⟩`
//! and index 1 for `|1−f⟩`, and may be embedded back into the original basis.

use std::collections::BTreeMap;

use crate::basis::{BasisPair, ComputationalBasis};
use crate::error::{Error, Result};
use crate::hamiltonian::NhHamiltonian;
use crate::matrix::{inner, sigma_z, CMatrix, CVector};
use crate::scalar::{cis, cr, lattice_distance, Real, C};
use crate::spectrum::{Magnitude, PairSpectrum};

/// `A = V·K`, stored through its unitary part.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiUnitary<T> {
    pub v: CMatrix<T>,
}

impl<T: Real> AntiUnitary<T> {
    pub fn new(v: CMatrix<T>) -> Self {
        AntiUnitary { v }
    }

    /// `A x = V x*`.
    pub fn apply(&self, x: &[C<T>]) -> CVector<T> {
        let conj: Vec<C<T>> = x.iter().map(|z| z.conj()).collect();
        self.v.mul_vec(&conj)
    }

    /// `A M A⁻¹ = V M* V⁻¹`.
    pub fn conjugate(&self, m: &CMatrix<T>) -> Result<CMatrix<T>> {
        Ok(&(&self.v * &m.conj()) * &self.v.inverse()?)
    }

    /// Unitary part of `A²`, which is `V V*`.
    pub fn square(&self) -> CMatrix<T> {
        &self.v * &self.v.conj()
    }

    /// `A⁻¹ = (V⁻¹)* K`.
    pub fn inverse(&self) -> Result<Self> {
        Ok(AntiUnitary::new(self.v.inverse()?.conj()))
    }

    /// `A ∘ U` for a unitary `U`: `V U* K`.
    pub fn compose_unitary(&self, u: &CMatrix<T>) -> Self {
        AntiUnitary::new(&self.v * &u.conj())
    }
}

/// Which coordinates the operators of a [`DualMaps`] are written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapBasis {
    Computational,
    Original,
}

#[derive(Clone, Debug)]
pub struct DualMaps<T> {
    pub u1: CMatrix<T>,
    pub u2: CMatrix<T>,
    pub a1: AntiUnitary<T>,
    pub a2: AntiUnitary<T>,
    pub c1: CMatrix<T>,
    pub c2: CMatrix<T>,
    pub c3: CMatrix<T>,
    pub c4: CMatrix<T>,
    pub s1: AntiUnitary<T>,
    pub s2: AntiUnitary<T>,
    /// Chiral operator `|f⟩⟨f| − |1−f⟩⟨1−f|`.
    pub q: CMatrix<T>,
    /// `C₁†U₁ = |a| |f⟩⟨f| + |a|⁻¹ |1−f⟩⟨1−f|`.
    pub metric: CMatrix<T>,
    pub basis: MapBasis,
}

fn pair_columns<T: Real>(pair: &BasisPair<T>) -> [&CVector<T>; 2] {
    [&pair.v_f, &pair.v_cf]
}

/// `P M P†` with `P = (v_f  v_cf)`.
fn embed_unitary<T: Real>(m: &CMatrix<T>, pair: &BasisPair<T>) -> CMatrix<T> {
    let p = pair_columns(pair);
    let n = pair.v_f.len();
    CMatrix::from_fn(n, |i, j| {
        let mut acc = cr(T::zero());
        for k in 0..2 {
            for l in 0..2 {
                acc += p[k][i] * m[(k, l)] * p[l][j].conj();
            }
        }
        acc
    })
}

/// `P V Pᵀ`, the rule for the unitary part of an antiunitary.
fn embed_antiunitary<T: Real>(a: &AntiUnitary<T>, pair: &BasisPair<T>) -> AntiUnitary<T> {
    let p = pair_columns(pair);
    let n = pair.v_f.len();
    AntiUnitary::new(CMatrix::from_fn(n, |i, j| {
        let mut acc = cr(T::zero());
        for k in 0..2 {
            for l in 0..2 {
                acc += p[k][i] * a.v[(k, l)] * p[l][j];
            }
        }
        acc
    }))
}

impl<T: Real> DualMaps<T> {
    /// Writes every operator in the original basis of `pair`'s vectors.
    /// For `N > 2` the results act on the pair's subspace only.
    pub fn to_original(&self, pair: &BasisPair<T>) -> Self {
        assert_eq!(
            self.basis,
            MapBasis::Computational,
            "maps are already embedded"
        );
        let u = |m: &CMatrix<T>| embed_unitary(m, pair);
        let a = |x: &AntiUnitary<T>| embed_antiunitary(x, pair);
        DualMaps {
            u1: u(&self.u1),
            u2: u(&self.u2),
            a1: a(&self.a1),
            a2: a(&self.a2),
            c1: u(&self.c1),
            c2: u(&self.c2),
            c3: u(&self.c3),
            c4: u(&self.c4),
            s1: a(&self.s1),
            s2: a(&self.s2),
            q: u(&self.q),
            metric: u(&self.metric),
            basis: MapBasis::Original,
        }
    }
}

fn mat2<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> CMatrix<T> {
    let rows = [[a, b], [c, d]];
    CMatrix::from_fn(2, |i, j| rows[i][j])
}

/// `S₁ = (cos φ − i sin φ σ_z) K` and `S₂ = i(sin φ + i cos φ σ_z) K`.
pub fn build_symmetry_ops<T: Real>(phi: T) -> (AntiUnitary<T>, AntiUnitary<T>) {
    let z = cr(T::zero());
    let w1 = mat2(cis(-phi), z, z, cis(phi));
    let w2 = mat2(-cis(-phi), z, z, cis(phi));
    (AntiUnitary::new(w1), AntiUnitary::new(w2))
}

/// Builds the maps of one pair in computational coordinates.
pub fn build_dual_maps<T: Real>(_pair: &BasisPair<T>, ps: &PairSpectrum<T>) -> Result<DualMaps<T>> {
    let mag = match ps.a_mag {
        Magnitude::Finite(m) if m > T::zero() && !ps.coalesced => m,
        _ => {
            return Err(Error::ExceptionalPoint {
                surviving_phase: ps.phi.to_f64_lossy(),
            })
        }
    };
    let phi = ps.phi;
    let z = cr(T::zero());
    let one = cr(T::one());
    let u1 = mat2(z, cis(-phi), cis(phi), z);
    let q = sigma_z::<T>();
    let u2 = &q * &u1;
    let a1 = AntiUnitary::new(mat2(z, one, one, z));
    let a2 = AntiUnitary::new(mat2(z, one, -one, z));
    let a = C::from_polar(mag, phi);
    let c1 = mat2(z, one / a, a, z);
    let c2 = -c1.clone();
    let c3 = c1.scale(cis(-phi));
    let c4 = -c3.clone();
    let (s1, s2) = build_symmetry_ops(phi);
    let metric = &c1.adjoint() * &u1;
    Ok(DualMaps {
        u1,
        u2,
        a1,
        a2,
        c1,
        c2,
        c3,
        c4,
        s1,
        s2,
        q,
        metric,
        basis: MapBasis::Computational,
    })
}

/// `H` restricted to one pair, `P† H P`.
pub fn restrict_to_pair<T: Real>(h: &NhHamiltonian<T>, pair: &BasisPair<T>) -> CMatrix<T> {
    let p = pair_columns(pair);
    CMatrix::from_fn(2, |i, j| h.rescaled.sandwich(p[i], p[j]))
}

/// Coordinates of an original-basis vector in the pair basis.
pub fn project_to_pair<T: Real>(v: &[C<T>], pair: &BasisPair<T>) -> CVector<T> {
    vec![inner(&pair.v_f, v), inner(&pair.v_cf, v)]
}

/// Gram matrices `⟨U₁E_m|E_n⟩` and `⟨C₁†U₁E_m|E_n⟩`, indices ordered `(E₋, E₊)`.
pub fn indefinite_norms<T: Real>(
    maps: &DualMaps<T>,
    ps: &PairSpectrum<T>,
    pair: &BasisPair<T>,
) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if ps.coalesced {
        return Err(Error::CoalescedPair);
    }
    let states: [CVector<T>; 2] = match maps.basis {
        MapBasis::Computational => [
            project_to_pair(&ps.v_minus, pair),
            project_to_pair(&ps.v_plus, pair),
        ],
        MapBasis::Original => [ps.v_minus.clone(), ps.v_plus.clone()],
    };
    let gram = |op: &CMatrix<T>| {
        let mapped: Vec<CVector<T>> = states.iter().map(|s| op.mul_vec(s)).collect();
        CMatrix::from_fn(2, |m, n| inner(&mapped[m], &states[n]))
    };
    Ok((gram(&maps.u1), gram(&maps.metric)))
}

/// Residuals of the three families of dual-map relations, for `H` written
/// in the same basis as `maps`:
///
/// `U_i H U_i⁻¹ = ±e^{2iγ} H†`, `V_i H* V_i⁻¹ = ±H†`, `W_i H* W_i⁻¹ = ±e^{−2iγ} H`
/// with `+` for `i = 1` and `−` for `i = 2`.
pub fn pseudo_hermitian_residuals<T: Real>(
    hm: &CMatrix<T>,
    maps: &DualMaps<T>,
    gamma: T,
) -> Result<BTreeMap<String, T>> {
    let hd = hm.adjoint();
    let mut out = BTreeMap::new();
    let e2 = cis(T::lit(2.0) * gamma);
    for (i, sign) in [(1, T::one()), (2, -T::one())] {
        let (u, a, s) = if i == 1 {
            (&maps.u1, &maps.a1, &maps.s1)
        } else {
            (&maps.u2, &maps.a2, &maps.s2)
        };
        let lhs = &(u * hm) * &u.inverse()?;
        out.insert(format!("U{i}"), lhs.distance(&hd.scale(e2 * sign)));
        out.insert(
            format!("V{i}"),
            a.conjugate(hm)?.distance(&hd.scale_real(sign)),
        );
        out.insert(
            format!("W{i}"),
            s.conjugate(hm)?.distance(&hm.scale(e2.conj() * sign)),
        );
    }
    Ok(out)
}

/// Residuals of `A H A⁻¹ = H` and `A H A⁻¹ = −H`, a static symmetry check.
pub fn antiunitary_commutation<T: Real>(hm: &CMatrix<T>, a: &AntiUnitary<T>) -> Result<(T, T)> {
    let c = a.conjugate(hm)?;
    Ok((c.distance(hm), c.distance(&-hm.clone())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyClass {
    Real,
    Imaginary,
    Complex,
}

impl EnergyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyClass::Real => "real",
            EnergyClass::Imaginary => "imaginary",
            EnergyClass::Complex => "complex",
        }
    }
}

pub fn energy_reality_class<T: Real>(gamma: T, tol: T) -> EnergyClass {
    if lattice_distance(gamma, T::zero(), T::PI()) <= tol {
        EnergyClass::Real
    } else if lattice_distance(gamma, T::FRAC_PI_2(), T::PI()) <= tol {
        EnergyClass::Imaginary
    } else {
        EnergyClass::Complex
    }
}

/// One cell of a classification row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassEntry {
    /// `H = ε Ξ f(H) Ξ⁻¹` holds with this `ε`.
    Sign(i8),
    /// The operator exists but depends on the Hamiltonian's parameters, as
    /// happens for complex energies.
    Gated,
    /// Neither sign satisfies the relation.
    NotFound,
}

impl ClassEntry {
    /// Table value: the sign, or `0`.
    pub fn value(self) -> i8 {
        match self {
            ClassEntry::Sign(s) => s,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryReport<T> {
    pub energy_class: EnergyClass,
    pub residuals: BTreeMap<String, T>,
    /// Chiral class with `Ξ = Q`, `f(H) = H`.
    pub p: ClassEntry,
    /// Transpose class with `Ξ = V₁ᵀ`, `f(H) = Hᵀ`.
    pub c: ClassEntry,
    /// Sign of `V₁V₁*`.
    pub c_eta: i8,
    /// Transpose class with `Ξ = V₂ᵀ`.
    pub c_second: ClassEntry,
    /// Adjoint class with `Ξ = U₁`, `f(H) = H†`.
    pub q: ClassEntry,
    /// Conjugation class with `Ξ = W₁`, `f(H) = H*`.
    pub k: ClassEntry,
}

impl<T: Real> SymmetryReport<T> {
    /// `(P, C, Q, K)` as table values.
    pub fn row(&self) -> [i8; 4] {
        [
            self.p.value(),
            self.c.value(),
            self.q.value(),
            self.k.value(),
        ]
    }
}

fn search_sign<T: Real>(hm: &CMatrix<T>, image: &CMatrix<T>, tol: T) -> ClassEntry {
    if hm.distance(image) <= tol {
        ClassEntry::Sign(1)
    } else if hm.distance(&-image.clone()) <= tol {
        ClassEntry::Sign(-1)
    } else {
        ClassEntry::NotFound
    }
}

/// Tests `H = ε Ξ f(H) Ξ⁻¹` for the candidate operators of one pair, with
/// `hm` written in the same basis as `maps`. The adjoint and conjugation
/// classes are only reported for real or imaginary energies.
pub fn gblc_classify<T: Real>(
    hm: &CMatrix<T>,
    maps: &DualMaps<T>,
    gamma: T,
    tol: T,
) -> Result<SymmetryReport<T>> {
    let scale = hm.max_abs().max(T::one());
    let stol = tol * scale;
    let energy_class = energy_reality_class(gamma, T::tolerances().exceptional.max(tol));
    let conj =
        |xi: &CMatrix<T>, m: &CMatrix<T>| -> Result<CMatrix<T>> { Ok(&(xi * m) * &xi.inverse()?) };

    let p = search_sign(hm, &conj(&maps.q, hm)?, stol);
    let ht = hm.transpose();
    let c = search_sign(hm, &conj(&maps.a1.v.transpose(), &ht)?, stol);
    let c_second = search_sign(hm, &conj(&maps.a2.v.transpose(), &ht)?, stol);
    let sq = maps.a1.square();
    let c_eta = if sq.distance(&CMatrix::identity(sq.dim())) <= stol {
        1
    } else {
        -1
    };
    let (q, k) = if energy_class == EnergyClass::Complex {
        (ClassEntry::Gated, ClassEntry::Gated)
    } else {
        (
            search_sign(hm, &conj(&maps.u1, &hm.adjoint())?, stol),
            search_sign(hm, &maps.s1.conjugate(hm)?, stol),
        )
    };
    Ok(SymmetryReport {
        energy_class,
        residuals: pseudo_hermitian_residuals(hm, maps, gamma)?,
        p,
        c,
        c_eta,
        c_second,
        q,
        k,
    })
}

/// Convenience: maps, restricted Hamiltonian and classification for every
/// non-exceptional pair of a basis, in computational coordinates.
pub fn classify_pairs<T: Real>(
    h: &NhHamiltonian<T>,
    basis: &ComputationalBasis<T>,
    spectra: &[PairSpectrum<T>],
    tol: T,
) -> Vec<Option<(DualMaps<T>, SymmetryReport<T>)>> {
    basis
        .pairs
        .iter()
        .zip(spectra)
        .map(|(pair, ps)| {
            let maps = build_dual_maps(pair, ps).ok()?;
            let hm = restrict_to_pair(h, pair);
            let report = gblc_classify(&hm, &maps, ps.gamma, tol).ok()?;
            Some((maps, report))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{compute_basis, ladder_phases};
    use crate::hamiltonian::normalize;
    use crate::matrix::sigma_x;
    use crate::spectrum::{decompose, pair_spectrum};
    use num_complex::Complex64 as Z;
    use std::f64::consts::FRAC_PI_2;

    fn setup(m: &CMatrix<f64>) -> (NhHamiltonian<f64>, BasisPair<f64>, PairSpectrum<f64>) {
        let h = normalize(m, 1e-9).unwrap();
        let b = compute_basis(&h).unwrap();
        let pair = b.pairs[0].clone();
        let ph = ladder_phases(&h, &pair).unwrap();
        let ps = pair_spectrum(&h, &pair, ph);
        (h, pair, ps)
    }

    fn ladder(f: f64, gamma: f64, phi: f64) -> CMatrix<f64> {
        let z = Z::new(0.0, 0.0);
        CMatrix::from_rows(vec![
            vec![z, Z::from_polar((1.0 - f).sqrt(), gamma - phi)],
            vec![Z::from_polar(f.sqrt(), gamma + phi), z],
        ])
        .unwrap()
    }

    #[test]
    fn u2_is_q_u1() {
        let (_, pair, ps) = setup(&ladder(0.7, 0.3, 0.0));
        let maps = build_dual_maps(&pair, &ps).unwrap();
        assert_eq!(maps.u2, &maps.q * &maps.u1);
        assert!((&maps.u1 * &maps.u1).distance(&CMatrix::identity(2)) < 1e-15);
        assert!((&maps.u2 * &maps.u2).distance(&CMatrix::identity(2).scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn normal_point_metric() {
        let (_, pair, ps) = setup(&sigma_x());
        let maps = build_dual_maps(&pair, &ps).unwrap();
        assert!(maps.metric.distance(&CMatrix::identity(2)) < 1e-15);
        assert!((&maps.c2.adjoint() * &maps.u2).distance(&maps.q) < 1e-15);
    }

    #[test]
    fn action_contracts() {
        let (_, pair, ps) = setup(&ladder(0.2, 0.4, 0.7));
        let maps = build_dual_maps(&pair, &ps).unwrap().to_original(&pair);
        let dp = ps.dual_plus.clone().unwrap();
        let dm = ps.dual_minus.clone().unwrap();
        let e = cis(-ps.phi);
        let close = |x: &CVector<f64>, y: &CVector<f64>, s: Z| {
            x.iter()
                .zip(y)
                .map(|(a, b)| (*a - s * *b).norm())
                .fold(0.0, f64::max)
                < 1e-12
        };
        let one = Z::new(1.0, 0.0);
        assert!(close(&maps.u1.mul_vec(&ps.v_plus), &dp, one));
        assert!(close(&maps.u1.mul_vec(&ps.v_minus), &dm, -one));
        assert!(close(&maps.u2.mul_vec(&ps.v_plus), &dm, one));
        assert!(close(&maps.u2.mul_vec(&ps.v_minus), &dp, -one));
        assert!(close(&maps.a1.apply(&ps.v_plus), &dp, e));
        assert!(close(&maps.a1.apply(&ps.v_minus), &dm, -e));
        assert!(close(&maps.a2.apply(&ps.v_plus), &dm, e));
        assert!(close(&maps.a2.apply(&ps.v_minus), &dp, -e));
    }

    #[test]
    fn gram_matrices() {
        let (_, pair, ps) = setup(&ladder(0.3, -0.2, 1.1));
        let maps = build_dual_maps(&pair, &ps).unwrap();
        let (g, corrected) = indefinite_norms(&maps, &ps, &pair).unwrap();
        let expected = CMatrix::diagonal(&[Z::new(-1.0, 0.0), Z::new(1.0, 0.0)]);
        assert!(g.distance(&expected) < 1e-12);
        assert!(corrected.distance(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn relations_hold_in_both_bases() {
        let (h, pair, ps) = setup(&ladder(0.35, 0.6, -0.4));
        let maps = build_dual_maps(&pair, &ps).unwrap();
        let comp =
            pseudo_hermitian_residuals(&restrict_to_pair(&h, &pair), &maps, ps.gamma).unwrap();
        let orig =
            pseudo_hermitian_residuals(&h.rescaled, &maps.to_original(&pair), ps.gamma).unwrap();
        for (k, v) in &comp {
            assert!(*v < 1e-12, "{k}: {v}");
            assert!((orig[k] - v).abs() < 1e-10, "{k}");
        }
    }

    #[test]
    fn symmetry_ops_identities() {
        let phi = 0.83;
        let (s1, s2) = build_symmetry_ops(phi);
        let (_, pair, ps) = setup(&ladder(0.3, 0.1, phi));
        let maps = build_dual_maps(&pair, &ps).unwrap();
        let a1i = maps.a1.inverse().unwrap();
        let a2i = maps.a2.inverse().unwrap();
        assert!(a1i.compose_unitary(&maps.u1).v.distance(&maps.s1.v) < 1e-12);
        assert!(a2i.compose_unitary(&maps.u2).v.distance(&maps.s1.v) < 1e-12);
        assert!(a1i.compose_unitary(&maps.u2).v.distance(&maps.s2.v) < 1e-12);
        assert!(a2i.compose_unitary(&maps.u1).v.distance(&maps.s2.v) < 1e-12);
        let (t1, t2) = build_symmetry_ops(0.0);
        assert_eq!(t1.v, CMatrix::identity(2));
        assert!(t2.v.distance(&sigma_z::<f64>().scale_real(-1.0)) < 1e-15);
        assert!(s1.square().distance(&CMatrix::identity(2)) < 1e-15);
        assert!(s2.square().distance(&CMatrix::identity(2)) < 1e-15);
        assert!(maps.a1.square().distance(&CMatrix::identity(2)) == 0.0);
        assert!(
            maps.a2
                .square()
                .distance(&CMatrix::identity(2).scale_real(-1.0))
                == 0.0
        );
    }

    #[test]
    fn reality_classes() {
        assert_eq!(energy_reality_class(0.0, 1e-9), EnergyClass::Real);
        assert_eq!(
            energy_reality_class(FRAC_PI_2, 1e-9),
            EnergyClass::Imaginary
        );
        assert_eq!(energy_reality_class(0.3, 1e-9), EnergyClass::Complex);
    }

    #[test]
    fn hidden_symmetry_commutes() {
        let (h, pair, ps) = setup(&ladder(0.8, 0.5, 0.9));
        let maps = build_dual_maps(&pair, &ps).unwrap().to_original(&pair);
        let c = crate::matrix::commutator(&h.rescaled, &maps.c1).unwrap();
        assert!(c.max_abs() < 1e-12);
    }

    #[test]
    fn complex_row() {
        let (h, pair, ps) = setup(&ladder(0.7, 0.4, 0.2));
        let maps = build_dual_maps(&pair, &ps).unwrap();
        let rep = gblc_classify(&restrict_to_pair(&h, &pair), &maps, ps.gamma, 1e-9).unwrap();
        assert_eq!(rep.row(), [-1, 1, 0, 0]);
        assert_eq!(rep.q, ClassEntry::Gated);
        let dec = decompose(&h, &compute_basis(&h).unwrap()).unwrap();
        assert_eq!(dec.pairs.len(), 1);
    }
}
