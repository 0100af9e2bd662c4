//! Property suites over seeded random and model inputs. Each suite counts
//! its passing cases; the self-test runner prints these counts.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as Z;

use crate::basis::{
    basis_from_vectors, build_f_operator, compute_basis, ladder_phases, ComputationalBasis,
};
use crate::eigen::{general_eig, hermitian_eig, multiset_distance};
use crate::error::Result;
use crate::hamiltonian::{f_vector, normalize, pauli_decompose, NhHamiltonian};
use crate::higher_dim::{block_decompose, degenerate_spectrum, flat_singlets};
use crate::matrix::{anticommutator, commutator, inner, vec_distance, CMatrix};
use crate::models::{self, ModelInstance};
use crate::random::{self, ScalarDOptions, SeededRng};
use crate::spectrum::{decompose, oracle_compare, SpectralDecomposition};
use crate::symmetry::{
    build_dual_maps, gblc_classify, indefinite_norms, pseudo_hermitian_residuals, restrict_to_pair,
    ClassEntry, EnergyClass,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// First few failure descriptions.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            passed: 0,
            total: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 3 {
            self.failures.push(what());
        }
    }

    fn record<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

/// Normalized Hamiltonian, computational basis and decomposition.
pub struct Pipeline {
    pub h: NhHamiltonian<f64>,
    pub basis: ComputationalBasis<f64>,
    pub dec: SpectralDecomposition<f64>,
}

pub fn pipeline(m: &CMatrix<f64>) -> Result<Pipeline> {
    let h = normalize(m, 1e-9)?;
    let basis = compute_basis(&h)?;
    let dec = decompose(&h, &basis)?;
    Ok(Pipeline { h, basis, dec })
}

pub fn model_pipeline(model: &ModelInstance) -> Result<Pipeline> {
    let h = normalize(model.operand(), 1e-9)?;
    let basis = model.basis(&h, 1e-9)?;
    let dec = decompose(&h, &basis)?;
    Ok(Pipeline { h, basis, dec })
}

/// 2×2 matrix with both `f` levels at least `margin` away from `0, 1`.
fn generic_2x2(rng: &mut SeededRng, margin: f64) -> CMatrix<f64> {
    loop {
        let m = random::matrix_2x2(rng);
        if let Ok(p) = pipeline(&m) {
            if p.basis.pairs[0].ep_distance() > margin {
                return m;
            }
        }
    }
}

/// `U [[0, 0], [z, 0]] U† + τ`, an exceptional 2×2 matrix.
pub fn exceptional_2x2(rng: &mut SeededRng) -> CMatrix<f64> {
    let mut core = CMatrix::zeros(2);
    core[(1, 0)] = random::complex_normal(rng);
    let u = random::unitary_matrix(rng, 2);
    &(&(&u * &core) * &u.adjoint()) + &CMatrix::identity(2).scale(random::complex_normal(rng))
}

/// `U · ⊕ [[0, e^{i(γ−φ)}], [e^{i(γ+φ)}, 0]]/√2 · U†`, so that `F = I/2`.
pub fn normal_point_matrix(rng: &mut SeededRng, pairs: usize) -> CMatrix<f64> {
    use rand::Rng;
    let n = 2 * pairs;
    let mut core = CMatrix::zeros(n);
    for k in 0..pairs {
        let g: f64 = rng.random_range(-FRAC_PI_2 + 0.1..FRAC_PI_2) + 0.3 * k as f64;
        let p: f64 = rng.random_range(-PI..PI);
        core[(2 * k + 1, 2 * k)] = Z::from_polar(FRAC_1_SQRT_2, g + p);
        core[(2 * k, 2 * k + 1)] = Z::from_polar(FRAC_1_SQRT_2, g - p);
    }
    let u = random::unitary_matrix(rng, n);
    &(&u * &core) * &u.adjoint()
}

/// One instance of every zoo model at generic parameters, plus a few
/// special points.
pub fn zoo_sample() -> Vec<ModelInstance> {
    vec![
        models::gain_loss(0.0, 0.2, -0.2, 0.3, 0.1),
        models::gain_loss(0.4, 0.7, 0.1, 0.3, -0.5),
        models::nonreciprocal(1.0, 0.5, 0.2),
        models::hatano_nelson(0.8, 0.3, 0.7, 0.5),
        models::alpha_beta(PI / 8.0, 1.0),
        models::alpha_beta(1.0, 0.3),
        models::alpha_beta(2.0, 2.0),
        models::alpha_beta(2.8, 4.0),
        models::alpha_beta(FRAC_PI_2, 0.5),
        models::chiral_embed_f(0.2, 1.0, 1.0, 0.0),
        models::chiral_embed_f(0.5, 1.0, 1.0, 0.0),
        models::gamma_4d(PI / 6.0, 0.5),
        models::gamma_4d(1.2, 2.0),
        models::flat_3d(0.55),
        models::flat_3d(2.0),
        models::supplement_pt(0.0, 0.3, 0.6),
        models::supplement_pt(0.0, 0.6, 0.3),
        models::supplement_pt(0.2, -0.3, 0.5),
    ]
}

fn seed_for(seed: u64, suite: u64) -> SeededRng {
    random::seeded(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(suite))
}

pub fn matrix_bilinearity(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("matrix.bilinearity");
    let mut rng = seed_for(seed, 1);
    for _ in 0..100 {
        let n = 3;
        let (a, b, c) = (
            random::complex_matrix(&mut rng, n),
            random::complex_matrix(&mut rng, n),
            random::complex_matrix(&mut rng, n),
        );
        let k = random::complex_normal(&mut rng);
        let lhs = anticommutator(&(&a + &c.scale(k)), &b).unwrap();
        let rhs = &anticommutator(&a, &b).unwrap() + &anticommutator(&c, &b).unwrap().scale(k);
        let lhs2 = commutator(&(&a + &c.scale(k)), &b).unwrap();
        let rhs2 = &commutator(&a, &b).unwrap() + &commutator(&c, &b).unwrap().scale(k);
        let dev = lhs.distance(&rhs).max(lhs2.distance(&rhs2));
        s.check(dev <= 1e-12, || format!("deviation {dev:e}"));
    }
    s
}

pub fn hermitian_reconstruction(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("eigen.hermitian_reconstruction");
    let mut rng = seed_for(seed, 2);
    for i in 0..100 {
        let n = 2 + i % 7;
        let m = random::hermitian_matrix(&mut rng, n);
        let Some(es) = s.record(hermitian_eig(&m, 1e-12), "hermitian_eig") else {
            continue;
        };
        let mut rec = CMatrix::zeros(n);
        for (l, v) in es.values.iter().zip(&es.vectors) {
            rec = &rec + &CMatrix::outer(v, v).scale(*l);
        }
        let dev = rec.distance(&m);
        s.check(dev <= 1e-10, || format!("n={n}: {dev:e}"));
    }
    s
}

pub fn general_vs_hermitian(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("eigen.general_vs_hermitian");
    let mut rng = seed_for(seed, 3);
    for i in 0..100 {
        let n = 2 + i % 7;
        let m = random::hermitian_matrix(&mut rng, n);
        let (Some(h), Some(g)) = (
            s.record(hermitian_eig(&m, 1e-12), "hermitian_eig"),
            s.record(general_eig(&m), "general_eig"),
        ) else {
            continue;
        };
        let dev = multiset_distance(&h.values, &g.values);
        s.check(dev <= 1e-9, || format!("n={n}: {dev:e}"));
    }
    s
}

pub fn unitary_invariance(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("eigen.unitary_invariance");
    let mut rng = seed_for(seed, 4);
    for i in 0..100 {
        let n = 2 + i % 5;
        let m = random::complex_matrix(&mut rng, n);
        let u = random::unitary_matrix(&mut rng, n);
        let c = &(&u * &m) * &u.adjoint();
        let (Some(a), Some(b)) = (
            s.record(general_eig(&m), "general_eig"),
            s.record(general_eig(&c), "general_eig"),
        ) else {
            continue;
        };
        let dev = multiset_distance(&a.values, &b.values);
        s.check(dev <= 1e-9 * m.max_abs().max(1.0), || {
            format!("n={n}: {dev:e}")
        });
    }
    s
}

pub fn normalization(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("hamiltonian.normalization");
    let mut rng = seed_for(seed, 5);
    for _ in 0..1000 {
        let m = random::matrix_2x2(&mut rng);
        let Some(h) = s.record(normalize(&m, 1e-9), "normalize") else {
            continue;
        };
        let d = anticommutator(&h.rescaled, &h.rescaled.adjoint()).unwrap();
        let dev = d.distance(&CMatrix::identity(2));
        s.check(dev <= 1e-12, || format!("{dev:e}"));
    }
    s
}

pub fn pauli_roundtrip(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("hamiltonian.pauli_roundtrip");
    let mut rng = seed_for(seed, 6);
    for _ in 0..200 {
        let m = random::matrix_2x2(&mut rng);
        let t = &m - &CMatrix::identity(2).scale(m.trace() / 2.0);
        let Some(pv) = s.record(pauli_decompose(&t), "pauli_decompose") else {
            continue;
        };
        let dev = pv.matrix().distance(&t);
        s.check(dev <= 1e-12, || format!("{dev:e}"));
    }
    s
}

pub fn f_vector_consistency(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("hamiltonian.f_vector");
    let mut rng = seed_for(seed, 7);
    for _ in 0..200 {
        let m = random::matrix_2x2(&mut rng);
        let Some(h) = s.record(normalize(&m, 1e-9), "normalize") else {
            continue;
        };
        let Some(pv) = s.record(pauli_decompose(&h.rescaled), "pauli_decompose") else {
            continue;
        };
        let fm = f_vector(&pv).magnitude;
        let Some(es) = s.record(hermitian_eig(&build_f_operator(&h), 1e-12), "F") else {
            continue;
        };
        let want = [Z::new(0.5 - fm, 0.0), Z::new(0.5 + fm, 0.0)];
        let dev = multiset_distance(&es.values, &want);
        s.check(dev <= 1e-10, || format!("{dev:e}"));
    }
    s
}

pub fn physical_restoration(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("hamiltonian.physical_restoration");
    let mut rng = seed_for(seed, 8);
    let mut inputs: Vec<CMatrix<f64>> = (0..200).map(|_| generic_2x2(&mut rng, 1e-6)).collect();
    for i in 0..50 {
        inputs.push(random::scalar_d_matrix(&mut rng, 3 + i % 4, ScalarDOptions::default()).matrix);
    }
    for m in inputs {
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let Some(o) = s.record(general_eig(&m), "general_eig") else {
            continue;
        };
        let dev = multiset_distance(&p.dec.physical_eigenvalues(), &o.values);
        s.check(dev <= 1e-9 * m.max_abs().max(1.0), || {
            format!("n={}: {dev:e}", m.dim())
        });
    }
    s
}

pub fn ladder_closure(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("basis.ladder_closure");
    let mut rng = seed_for(seed, 9);
    for _ in 0..200 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let Some(ph) = s.record(ladder_phases(&p.h, pair), "ladder_phases") else {
            continue;
        };
        let f = pair.f;
        let hv = p.h.rescaled.mul_vec(&pair.v_f);
        let want: Vec<Z> = pair
            .v_cf
            .iter()
            .map(|x| x * Z::from_polar(f.sqrt(), ph.gamma + ph.phi))
            .collect();
        let hdv = p.h.rescaled.adjoint().mul_vec(&pair.v_f);
        let want_d: Vec<Z> = pair
            .v_cf
            .iter()
            .map(|x| x * Z::from_polar((1.0 - f).sqrt(), -(ph.gamma - ph.phi)))
            .collect();
        let dev = vec_distance(&hv, &want).max(vec_distance(&hdv, &want_d));
        s.check(dev <= 1e-9, || format!("f={f}: {dev:e}"));
    }
    s
}

pub fn ep_vacuum(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("basis.ep_vacuum");
    let mut rng = seed_for(seed, 10);
    for _ in 0..100 {
        let m = exceptional_2x2(&mut rng);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let ep = p.basis.pairs[0].ep_distance();
        let hm = &p.h.rescaled;
        let h2 = (hm * hm).max_abs();
        let hd = hm.adjoint();
        let hd2 = (&hd * &hd).max_abs();
        s.check(ep <= 1e-10 && h2 <= 1e-8 && hd2 <= 1e-8, || {
            format!("f distance {ep:e}, |H²| {h2:e}, |H†²| {hd2:e}")
        });
    }
    s
}

pub fn f_bounds(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("basis.f_bounds");
    let mut rng = seed_for(seed, 11);
    for i in 0..300 {
        let m = if i % 3 == 0 {
            random::scalar_d_matrix(&mut rng, 3 + i % 4, ScalarDOptions::default()).matrix
        } else {
            random::matrix_2x2(&mut rng)
        };
        let Some(h) = s.record(normalize(&m, 1e-9), "normalize") else {
            continue;
        };
        let Some(es) = s.record(hermitian_eig(&build_f_operator(&h), 1e-12), "F") else {
            continue;
        };
        let ok = es
            .values
            .iter()
            .all(|f| f.re >= -1e-9 && f.re <= 1.0 + 1e-9);
        s.check(ok, || format!("{:?}", es.values));
    }
    s
}

pub fn degenerate_normal_basis(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("basis.degenerate_normal");
    let mut rng = seed_for(seed, 12);
    for i in 0..60 {
        let m = normal_point_matrix(&mut rng, 1 + i % 3);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        for pair in &p.basis.pairs {
            let Some(ph) = s.record(ladder_phases(&p.h, pair), "ladder_phases") else {
                continue;
            };
            let hv = p.h.rescaled.mul_vec(&pair.v_f);
            let want: Vec<Z> = pair
                .v_cf
                .iter()
                .map(|x| x * Z::from_polar(FRAC_1_SQRT_2, ph.gamma + ph.phi))
                .collect();
            let dev = vec_distance(&hv, &want);
            s.check(dev <= 1e-10 && (pair.f - 0.5).abs() <= 1e-9, || {
                format!("n={}: {dev:e}", m.dim())
            });
        }
    }
    s
}

pub fn chiral_pairing(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("spectrum.chiral_pairing");
    let mut rng = seed_for(seed, 13);
    for _ in 0..200 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let ps = &p.dec.pairs[0];
        let q = &CMatrix::outer(&pair.v_f, &pair.v_f) - &CMatrix::outer(&pair.v_cf, &pair.v_cf);
        let qv = q.mul_vec(&ps.v_plus);
        let ph = inner(&ps.v_minus, &qv);
        let ph = ph / ph.norm();
        let aligned: Vec<Z> = ps.v_minus.iter().map(|x| x * ph).collect();
        let dev = vec_distance(&qv, &aligned);
        s.check(dev <= 1e-9, || format!("{dev:e}"));
    }
    s
}

pub fn abs_e_symmetry(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("spectrum.abs_e_symmetry");
    let mut rng = seed_for(seed, 14);
    for _ in 0..200 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let Some(swapped) = s.record(
            basis_from_vectors(&p.h, &[(pair.v_cf.clone(), pair.v_f.clone())], &[], 1e-9),
            "swapped basis",
        ) else {
            continue;
        };
        let Some(dec) = s.record(decompose(&p.h, &swapped), "decompose") else {
            continue;
        };
        let dev = (dec.pairs[0].abs_e - p.dec.pairs[0].abs_e).abs();
        s.check(dev <= 1e-12, || format!("{dev:e}"));
    }
    s
}

pub fn f_ladder(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("spectrum.f_ladder");
    let mut rng = seed_for(seed, 15);
    for _ in 0..200 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let ps = &p.dec.pairs[0];
        let fm = ps.f - 0.5;
        let shifted = &build_f_operator(&p.h) - &CMatrix::identity(2).scale_real(0.5);
        let a = shifted.mul_vec(&ps.v_plus);
        let b = shifted.mul_vec(&ps.v_minus);
        let wa: Vec<Z> = ps.v_minus.iter().map(|x| x * fm).collect();
        let wb: Vec<Z> = ps.v_plus.iter().map(|x| x * fm).collect();
        let dev = vec_distance(&a, &wa).max(vec_distance(&b, &wb));
        s.check(dev <= 1e-9, || format!("{dev:e}"));
    }
    s
}

pub fn non_orthogonality(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("spectrum.non_orthogonality");
    let mut rng = seed_for(seed, 16);
    let mut inputs: Vec<CMatrix<f64>> = (0..200).map(|_| generic_2x2(&mut rng, 1e-6)).collect();
    inputs.extend((0..20).map(|_| normal_point_matrix(&mut rng, 1)));
    for m in inputs {
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let ps = &p.dec.pairs[0];
        let mag = ps.a_mag.value();
        let want = (1.0 - mag * mag) / (2.0 * mag);
        let got = inner(&ps.v_plus, &ps.v_minus);
        let normal = (ps.f - 0.5).abs() <= 1e-9;
        let sign_ok = normal || (got.re > 0.0) == (mag < 1.0);
        let dev = (got - Z::new(want, 0.0)).norm();
        s.check(
            dev <= 1e-9 && sign_ok && (!normal || got.norm() <= 1e-9),
            || format!("{dev:e}"),
        );
    }
    s
}

/// Inputs with real or imaginary energies, for the checks that need them.
fn classified_inputs(rng: &mut SeededRng) -> Vec<CMatrix<f64>> {
    use rand::Rng;
    let mut out: Vec<CMatrix<f64>> = (0..100).map(|_| generic_2x2(rng, 1e-6)).collect();
    for _ in 0..50 {
        let alpha: f64 = rng.random_range(0.05..PI - 0.05);
        if (alpha - FRAC_PI_4).abs() < 0.01 || (alpha - 3.0 * FRAC_PI_4).abs() < 0.01 {
            continue;
        }
        let beta: f64 = rng.random_range(0.0..2.0 * PI);
        out.push(models::alpha_beta(alpha, beta).matrix);
    }
    out
}

pub fn biorthonormality(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("symmetry.indefinite_norms");
    let mut rng = seed_for(seed, 17);
    for m in classified_inputs(&mut rng) {
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let ps = &p.dec.pairs[0];
        let (Some(dp), Some(dm)) = (&ps.dual_plus, &ps.dual_minus) else {
            s.check(false, || "missing duals".into());
            continue;
        };
        let bi = CMatrix::from_fn(2, |i, j| {
            let l = if i == 0 { dm } else { dp };
            let r = if j == 0 { &ps.v_minus } else { &ps.v_plus };
            inner(l, r)
        });
        let bdev = bi.distance(&CMatrix::identity(2));
        let Some(maps) = s.record(build_dual_maps(pair, ps), "maps") else {
            continue;
        };
        let Some((gram, corrected)) = s.record(indefinite_norms(&maps, ps, pair), "norms") else {
            continue;
        };
        let eta = CMatrix::diagonal(&[Z::new(-1.0, 0.0), Z::new(1.0, 0.0)]);
        let gdev = gram.distance(&eta);
        let cdev = corrected.distance(&CMatrix::identity(2));
        s.check(bdev <= 1e-9 && gdev <= 1e-9 && cdev <= 1e-9, || {
            format!("bi {bdev:e}, gram {gdev:e}, metric {cdev:e}")
        });
    }
    s
}

pub fn pseudo_hermiticity(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("symmetry.pseudo_hermiticity");
    let mut rng = seed_for(seed, 18);
    for _ in 0..100 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let ps = &p.dec.pairs[0];
        let Some(maps) = s.record(build_dual_maps(pair, ps), "maps") else {
            continue;
        };
        let hm = restrict_to_pair(&p.h, pair);
        let Some(res) = s.record(
            pseudo_hermitian_residuals(&hm, &maps, ps.gamma),
            "residuals",
        ) else {
            continue;
        };
        let worst = res.values().cloned().fold(0.0, f64::max);
        s.check(worst <= 1e-9, || format!("{res:?}"));
    }
    s
}

pub fn basis_change_consistency(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("symmetry.basis_change");
    let mut rng = seed_for(seed, 19);
    for _ in 0..100 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let ps = &p.dec.pairs[0];
        let Some(maps) = s.record(build_dual_maps(pair, ps), "maps") else {
            continue;
        };
        let hm = restrict_to_pair(&p.h, pair);
        let orig = maps.to_original(pair);
        let (Some(a), Some(b)) = (
            s.record(
                pseudo_hermitian_residuals(&hm, &maps, ps.gamma),
                "computational",
            ),
            s.record(
                pseudo_hermitian_residuals(&p.h.rescaled, &orig, ps.gamma),
                "original",
            ),
        ) else {
            continue;
        };
        let dev = a.iter().map(|(k, v)| (v - b[k]).abs()).fold(0.0, f64::max);
        s.check(dev <= 1e-10, || format!("{dev:e}"));
    }
    s
}

pub fn composition_identities(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("symmetry.composition");
    let mut rng = seed_for(seed, 20);
    for m in classified_inputs(&mut rng) {
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let ps = &p.dec.pairs[0];
        let Some(maps) = s.record(build_dual_maps(pair, ps), "maps") else {
            continue;
        };
        let hm = restrict_to_pair(&p.h, pair);
        let Some(r) = s.record(gblc_classify(&hm, &maps, ps.gamma, 1e-9), "classify") else {
            continue;
        };
        // V₂ = Q V₁ composes the chiral and transpose classes; K composes
        // the adjoint and transpose classes.
        let v2 = r.c_second.value() == r.p.value() * r.c.value();
        let k = match r.k {
            ClassEntry::Sign(k) => k == r.q.value() * r.c.value(),
            ClassEntry::Gated => r.energy_class == EnergyClass::Complex,
            ClassEntry::NotFound => false,
        };
        s.check(v2 && k, || {
            format!("row {:?}, c2 {:?}", r.row(), r.c_second)
        });
    }
    s
}

pub fn hidden_symmetry(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("symmetry.hidden_c1");
    let mut rng = seed_for(seed, 21);
    for _ in 0..100 {
        let m = generic_2x2(&mut rng, 1e-6);
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let pair = &p.basis.pairs[0];
        let Some(maps) = s.record(build_dual_maps(pair, &p.dec.pairs[0]), "maps") else {
            continue;
        };
        let hm = restrict_to_pair(&p.h, pair);
        let dev = commutator(&hm, &maps.c1).unwrap().max_abs();
        let a1 = maps.a1.square().distance(&CMatrix::identity(2));
        let a2 = maps
            .a2
            .square()
            .distance(&CMatrix::identity(2).scale_real(-1.0));
        s.check(dev <= 1e-9 && a1 == 0.0 && a2 == 0.0, || {
            format!("[H, C1] {dev:e}")
        });
    }
    s
}

pub fn circular_orthogonality(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("higher_dim.circular_orthogonality");
    let mut rng = seed_for(seed, 22);
    let opts = ScalarDOptions {
        circular: true,
        shift: false,
        ..Default::default()
    };
    for i in 0..40 {
        let sample = random::scalar_d_matrix(&mut rng, 4 + 2 * (i % 2), opts);
        let Some(h) = s.record(normalize(&sample.matrix, 1e-9), "normalize") else {
            continue;
        };
        let Some(basis) = s.record(compute_basis(&h), "basis") else {
            continue;
        };
        let Some(blocks) = s.record(block_decompose(&h, &basis), "blocks") else {
            continue;
        };
        for bp in &blocks {
            let Some(ds) = s.record(degenerate_spectrum(bp), "degenerate_spectrum") else {
                continue;
            };
            let a2 = (bp.f / (1.0 - bp.f)).sqrt();
            let mut dev: f64 = 0.0;
            for (n, pn) in ds.eigenpairs.iter().enumerate() {
                for (m, pm) in ds.eigenpairs.iter().enumerate() {
                    let delta = if n == m { 1.0 } else { 0.0 };
                    let pp = inner(&pn.state_plus, &pm.state_plus);
                    let mp = inner(&pn.state_minus, &pm.state_plus);
                    dev = dev
                        .max((pp - Z::new((1.0 + a2) * delta, 0.0)).norm())
                        .max((mp - Z::new((1.0 - a2) * delta, 0.0)).norm());
                }
            }
            s.check(dev <= 1e-9, || format!("m={}: {dev:e}", bp.m));
        }
    }
    s
}

pub fn assembled_oracle(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("higher_dim.oracle_equivalence");
    let mut rng = seed_for(seed, 23);
    for model in zoo_sample() {
        let Some(p) = s.record(model_pipeline(&model), model.name.as_str()) else {
            continue;
        };
        let Some(o) = s.record(general_eig(model.operand()), "general_eig") else {
            continue;
        };
        let dev = multiset_distance(&p.dec.physical_eigenvalues(), &o.values);
        s.check(dev <= 1e-8, || format!("{}: {dev:e}", model.name));
    }
    for i in 0..100 {
        let sample = random::scalar_d_matrix(&mut rng, 3 + i % 4, ScalarDOptions::default());
        let Some(p) = s.record(pipeline(&sample.matrix), "pipeline") else {
            continue;
        };
        let Some(o) = s.record(oracle_compare(&p.h, &p.dec, 1e-8), "oracle") else {
            continue;
        };
        s.check(o.passed, || {
            format!("n={}: {:e}", sample.matrix.dim(), o.eigenvalue_deviation)
        });
    }
    s
}

pub fn odd_dimension_flat(seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("higher_dim.odd_dimension");
    let mut rng = seed_for(seed, 24);
    let mut inputs: Vec<CMatrix<f64>> = (0..40)
        .map(|i| {
            random::scalar_d_matrix(&mut rng, 3 + 2 * (i % 2), ScalarDOptions::default()).matrix
        })
        .collect();
    inputs.extend((0..50).map(|k| models::flat_3d(2.0 * PI * k as f64 / 50.0).matrix));
    for m in inputs {
        let Some(p) = s.record(pipeline(&m), "pipeline") else {
            continue;
        };
        let flats = flat_singlets(&p.h, &p.basis);
        let normal_pairs = p
            .basis
            .pairs
            .iter()
            .filter(|q| (q.f - 0.5).abs() <= 1e-9)
            .count();
        let count = flats.len() + 2 * normal_pairs;
        let flat_dev = flats
            .iter()
            .map(|f| (f.energy().norm() - FRAC_1_SQRT_2).abs())
            .fold(0.0, f64::max);
        s.check(
            count % 2 == 1 && !flats.is_empty() && flat_dev <= 1e-10,
            || {
                format!(
                    "n={}: {} flat, {} normal pairs, |E| dev {flat_dev:e}",
                    m.dim(),
                    flats.len(),
                    normal_pairs
                )
            },
        );
    }
    s
}

pub fn zoo_scaling(_seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("models.normalize");
    for model in zoo_sample() {
        let Some(h) = s.record(normalize(model.operand(), 1e-9), model.name.as_str()) else {
            continue;
        };
        let dev = (h.d - model.expected.d).abs();
        s.check(dev <= 1e-9, || {
            format!("{}: d {} vs {}", model.name, h.d, model.expected.d)
        });
    }
    s
}

/// Closed-form record of `model` against the pipeline; `None` on agreement.
pub fn expected_mismatch(model: &ModelInstance, p: &Pipeline) -> Option<String> {
    let ex = &model.expected;
    let tol = 1e-9;
    let mut fs: Vec<f64> = p.dec.pairs.iter().map(|q| q.f).collect();
    let mut want_f = ex.pair_f.clone();
    fs.sort_by(f64::total_cmp);
    want_f.sort_by(f64::total_cmp);
    if fs.len() != want_f.len() || fs.iter().zip(&want_f).any(|(a, b)| (a - b).abs() > tol) {
        return Some(format!("f {fs:?} vs {want_f:?}"));
    }
    let mut es: Vec<f64> = p.dec.pairs.iter().map(|q| q.abs_e).collect();
    let mut want_e = ex.abs_e.clone();
    es.sort_by(f64::total_cmp);
    want_e.sort_by(f64::total_cmp);
    if es.iter().zip(&want_e).any(|(a, b)| (a - b).abs() > tol) {
        return Some(format!("|E| {es:?} vs {want_e:?}"));
    }
    let spread = multiset_distance(&p.dec.eigenvalues(), &ex.energies);
    let spread_tol = if ex.exceptional { 1e-6 } else { tol };
    if spread > spread_tol {
        return Some(format!("energies off by {spread:e}"));
    }
    if let (Some((g, ph)), Some(q)) = (ex.phases, p.dec.pairs.first()) {
        if (q.gamma - g).abs() > tol || (crate::scalar::wrap_angle(q.phi - ph)).abs() > tol {
            return Some(format!("phases ({}, {}) vs ({g}, {ph})", q.gamma, q.phi));
        }
    }
    if let (Some(a), Some(q)) = (ex.a_mag, p.dec.pairs.first()) {
        if (q.a_mag.value() - a).abs() > tol {
            return Some(format!("|a| {} vs {a}", q.a_mag.value()));
        }
    }
    if let (Some(c), Some(q)) = (ex.energy_class, p.dec.pairs.first()) {
        let got = crate::symmetry::energy_reality_class(q.gamma, 1e-9);
        if got != c {
            return Some(format!("class {got:?} vs {c:?}"));
        }
    }
    if ex.exceptional != p.dec.pairs.iter().any(|q| q.coalesced) {
        return Some("exceptional flag".into());
    }
    if let Some(spec) = &ex.assembled_spectrum {
        match general_eig(&model.matrix) {
            Ok(es) => {
                let dev = multiset_distance(&es.values, spec);
                if dev > 1e-8 {
                    return Some(format!("assembled spectrum off by {dev:e}"));
                }
            }
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

pub fn zoo_expected(_seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("models.expected_records");
    for model in zoo_sample() {
        let Some(p) = s.record(model_pipeline(&model), model.name.as_str()) else {
            continue;
        };
        let mismatch = expected_mismatch(&model, &p);
        let oracle = oracle_compare(&p.h, &p.dec, 1e-8)
            .map(|o| o.passed)
            .unwrap_or(false);
        s.check(mismatch.is_none() && oracle, || {
            format!(
                "{} {:?}: {}",
                model.name,
                model.params,
                mismatch.unwrap_or_else(|| "oracle".into())
            )
        });
    }
    s
}

/// Expected energy class of the α–β model.
pub fn alpha_beta_class(alpha: f64) -> EnergyClass {
    if alpha > FRAC_PI_4 && alpha < 3.0 * FRAC_PI_4 {
        EnergyClass::Real
    } else {
        EnergyClass::Imaginary
    }
}

pub fn alpha_beta_regions(_seed: u64) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("models.alpha_beta_regions");
    let steps = (PI / 1e-4) as usize;
    let mut mismatched = 0usize;
    let mut first = None;
    let mut skipped = 0usize;
    for k in 1..steps {
        let alpha = k as f64 * 1e-4;
        let model = models::alpha_beta(alpha, 0.0);
        let Ok(p) = model_pipeline(&model) else {
            mismatched += 1;
            continue;
        };
        let q = &p.dec.pairs[0];
        if q.coalesced {
            skipped += 1;
            continue;
        }
        let got = crate::symmetry::energy_reality_class(q.gamma, 1e-9);
        let phases_ok = model
            .expected
            .phases
            .map(|(g, ph)| {
                (q.gamma - g).abs() <= 1e-9 && crate::scalar::wrap_angle(q.phi - ph).abs() <= 1e-9
            })
            .unwrap_or(false);
        if got != alpha_beta_class(alpha) || !phases_ok {
            mismatched += 1;
            first.get_or_insert(alpha);
        }
    }
    s.check(mismatched == 0 && skipped <= 4, || {
        format!("{mismatched} mismatches, first at {first:?}, {skipped} exceptional")
    });
    s
}

pub type Suite = fn(u64) -> SuiteOutcome;

pub const SUITES: &[Suite] = &[
    matrix_bilinearity,
    hermitian_reconstruction,
    general_vs_hermitian,
    unitary_invariance,
    normalization,
    pauli_roundtrip,
    f_vector_consistency,
    physical_restoration,
    ladder_closure,
    ep_vacuum,
    f_bounds,
    degenerate_normal_basis,
    chiral_pairing,
    abs_e_symmetry,
    f_ladder,
    non_orthogonality,
    biorthonormality,
    pseudo_hermiticity,
    basis_change_consistency,
    composition_identities,
    hidden_symmetry,
    circular_orthogonality,
    assembled_oracle,
    odd_dimension_flat,
    zoo_scaling,
    zoo_expected,
    alpha_beta_regions,
];

pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    SUITES.iter().map(|suite| suite(seed)).collect()
}
