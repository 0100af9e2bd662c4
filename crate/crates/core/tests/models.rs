use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nh_bypass::basis::ladder_phases;
use nh_bypass::eigen::multiset_distance;
use nh_bypass::invariants::{expected_mismatch, model_pipeline};
use nh_bypass::models::*;
use nh_bypass::symmetry::{restrict_to_pair, MapBasis};
use nh_bypass::*;
use num_complex::Complex64 as Z;

fn assert_record(m: &ModelInstance) {
    let p = model_pipeline(m).unwrap();
    if let Some(msg) = expected_mismatch(m, &p) {
        panic!("{} {:?}: {msg}", m.name, m.params);
    }
}

#[test]
fn gain_loss_without_imbalance_is_normal() {
    let m = gain_loss(0.0, 0.3, 0.3, 0.4, 0.2);
    let p = model_pipeline(&m).unwrap();
    assert!((p.dec.pairs[0].f - 0.5).abs() < 1e-12);
    let traceless = &m.matrix - &ComplexMatrix::identity(2).scale(m.matrix.trace() / 2.0);
    assert!(traceless.hermiticity_defect() < 1e-15);
}

#[test]
fn gain_loss_exceptional_when_imbalance_equals_coupling() {
    let m = gain_loss(0.0, 0.35, -0.35, 0.35, 0.0);
    assert!(m.expected.exceptional);
    let p = model_pipeline(&m).unwrap();
    assert!(p.dec.pairs[0].coalesced);
}

#[test]
fn gain_loss_point_with_f_two_tenths() {
    // Ω² + δγ² = ½ and δγ·Ω = 0.15.
    let omega = (0.8f64.sqrt() + 0.2f64.sqrt()) / 2.0;
    let dg = (0.8f64.sqrt() - 0.2f64.sqrt()) / 2.0;
    let m = gain_loss(0.0, dg, -dg, omega, 0.0);
    let p = model_pipeline(&m).unwrap();
    assert!((p.h.d - 1.0).abs() < 1e-12);
    assert!((p.dec.pairs[0].f - 0.8).abs() < 1e-12);
    assert!((p.dec.pairs[0].abs_e - 0.16f64.powf(0.25)).abs() < 1e-12);
    assert!((gain_loss_abs_e(dg, omega) - 0.16f64.powf(0.25)).abs() < 1e-12);
    assert_record(&m);
}

#[test]
fn nonreciprocal_rotates_into_gain_loss() {
    let (o1, o2, delta) = (1.0, 0.5, 0.2);
    let nr = nonreciprocal(o1, o2, delta);
    let s = FRAC_1_SQRT_2;
    let r = ComplexMatrix::from_rows(vec![
        vec![Z::new(s, 0.0), Z::new(0.0, -s)],
        vec![Z::new(0.0, -s), Z::new(s, 0.0)],
    ])
    .unwrap();
    let rotated = &(&r * &nr.matrix) * &r.adjoint();
    let (or, oi, dg) = nonreciprocal_as_gain_loss(o1, o2, delta);
    let gl = gain_loss(0.0, dg, -dg, or, oi);
    let strip = |m: &ComplexMatrix| m - &ComplexMatrix::identity(2).scale(m.trace() / 2.0);
    assert!(strip(&rotated).distance(&strip(&gl.matrix)) < 1e-12);
    let a = general_eig(&strip(&nr.matrix)).unwrap();
    let b = general_eig(&strip(&gl.matrix)).unwrap();
    assert!(multiset_distance(&a.values, &b.values) < 1e-10);
    assert_record(&nr);
}

#[test]
fn reciprocal_coupling_is_normal() {
    let p = model_pipeline(&nonreciprocal(0.7, 0.7, 0.3)).unwrap();
    assert!((p.dec.pairs[0].f - 0.5).abs() < 1e-12);
}

#[test]
fn hatano_nelson_f_vector_has_no_z_part() {
    let (tr, tl, k, delta) = (0.9, 0.4, 1.1, 0.6);
    let m = hatano_nelson(tr, tl, k, delta);
    let traceless = &m.matrix - &ComplexMatrix::identity(2).scale(m.matrix.trace() / 2.0);
    let fv = f_vector(&pauli_decompose(&traceless).unwrap());
    let want = hatano_nelson_f_vector(tr, tl, k, delta);
    for i in 0..3 {
        assert!((fv.components[i] - want[i]).abs() < 1e-14);
    }
    assert_record(&m);
}

#[test]
fn alpha_beta_normal_contour_energies() {
    let m = alpha_beta(FRAC_PI_2, 0.4);
    let p = model_pipeline(&m).unwrap();
    let ps = &p.dec.pairs[0];
    assert!((ps.f - 0.5).abs() < 1e-12);
    let (ep, em) = ps.energies_on_branch(PI);
    assert!((ep - Z::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((em - Z::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
}

#[test]
fn alpha_beta_exceptional_contours() {
    for alpha in [FRAC_PI_4, 3.0 * FRAC_PI_4] {
        let p = model_pipeline(&alpha_beta(alpha, 0.9)).unwrap();
        let f = p.dec.pairs[0].f;
        assert!(f * (1.0 - f) <= 1e-12);
        assert!(p.dec.pairs[0].coalesced);
    }
}

#[test]
fn alpha_beta_region_one_is_imaginary() {
    let m = alpha_beta(PI / 8.0, 1.0);
    let p = model_pipeline(&m).unwrap();
    let ps = &p.dec.pairs[0];
    assert!((ps.gamma - FRAC_PI_2).abs() < 1e-12);
    assert_eq!(energy_reality_class(ps.gamma, 1e-9), EnergyClass::Imaginary);
    assert_record(&m);
}

#[test]
fn alpha_beta_region_tables() {
    for &(alpha, beta) in &[
        (0.3, 0.2),
        (1.0, 5.0),
        (2.0, 1.0),
        (2.8, 3.0),
        (0.0, 1.0),
        (PI, 2.0),
    ] {
        assert_record(&alpha_beta(alpha, beta));
    }
}

#[test]
fn alpha_beta_s1_in_original_basis() {
    for &alpha in &[0.9, 1.2, 1.5] {
        for &beta in &[0.0, 0.7, 3.0] {
            let m = alpha_beta(alpha, beta);
            let p = model_pipeline(&m).unwrap();
            let maps = build_dual_maps(&p.basis.pairs[0], &p.dec.pairs[0])
                .unwrap()
                .to_original(&p.basis.pairs[0]);
            assert_eq!(maps.basis, MapBasis::Original);
            assert!(
                maps.s1.v.distance(&alpha_beta_s1(beta)) < 1e-10,
                "alpha {alpha} beta {beta}"
            );
        }
    }
}

#[test]
fn chiral_embedding_spectra() {
    for &f in &[0.5, 0.2, 0.0, 1.0] {
        let m = chiral_embed_f(f, 1.0, 1.0, 0.0);
        let es = general_eig(&m.matrix).unwrap();
        let want = m.expected.assembled_spectrum.clone().unwrap();
        assert!(multiset_distance(&es.values, &want) < 1e-10, "f = {f}");
    }
    let zero = general_eig(&chiral_embed_f(0.0, 1.0, 1.0, 0.0).matrix).unwrap();
    assert_eq!(zero.values.iter().filter(|e| e.norm() < 1e-10).count(), 2);
    let half = general_eig(&chiral_embed_f(0.5, 1.0, 1.0, 0.0).matrix).unwrap();
    assert_eq!(
        half.values
            .iter()
            .filter(|e| (e.re - FRAC_1_SQRT_2).abs() < 1e-10)
            .count(),
        2
    );
}

#[test]
fn chiral_embedding_of_generic_inner_hamiltonian() {
    let inner = ladder_2x2(0.3);
    let h = normalize(&inner, 1e-9).unwrap();
    let m = chiral_embed(
        &h.rescaled,
        Z::new(0.5, 0.2),
        Z::new(0.5, -0.2),
        Z::new(0.1, 0.0),
    );
    assert_eq!(m.dim(), 4);
    assert!(m.hermiticity_defect() < 1e-15);
}

#[test]
fn gamma_4d_normal_point_and_exceptional_point() {
    let p = model_pipeline(&gamma_4d(0.0, 0.3)).unwrap();
    let want = [Z::new(0.0, FRAC_1_SQRT_2), Z::new(0.0, -FRAC_1_SQRT_2)];
    for e in p.dec.eigenvalues() {
        assert!(want.iter().any(|w| (e - w).norm() < 1e-10));
    }
    let ep = model_pipeline(&gamma_4d(FRAC_PI_4, 0.3)).unwrap();
    assert!(ep.dec.eigenvalues().iter().all(|e| e.norm() < 1e-7));
    assert!(ep.dec.pairs.iter().all(|q| q.coalesced));
}

#[test]
fn gamma_4d_records() {
    for &(a, b) in &[(PI / 6.0, 0.5), (1.2, 2.0), (2.0, 4.0), (2.7, 1.0)] {
        assert_record(&gamma_4d(a, b));
    }
}

#[test]
fn flat_3d_special_points() {
    let p = model_pipeline(&flat_3d(FRAC_PI_4)).unwrap();
    assert!((p.dec.pairs[0].f - 0.5).abs() < 1e-12);
    assert!((p.dec.pairs[0].e_plus.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
    let ep = model_pipeline(&flat_3d(FRAC_PI_2)).unwrap();
    assert!(ep.dec.pairs[0].coalesced);
    assert!((ep.dec.flat[0].0).abs() < 1e-12);
    assert!(
        (nh_bypass::higher_dim::flat_singlets(&ep.h, &ep.basis)[0].energy() - FRAC_1_SQRT_2).norm()
            < 1e-12
    );
}

#[test]
fn flat_3d_pair_phases_follow_kappa() {
    for k in 0..50 {
        let kappa = 2.0 * PI * (k as f64 + 0.3) / 50.0;
        let m = flat_3d(kappa);
        assert_record(&m);
        let h = normalize(&m.matrix, 1e-9).unwrap();
        let b = m.basis(&h, 1e-9).unwrap();
        let ph = ladder_phases(&h, &b.pairs[0]).unwrap();
        let (s, c) = kappa.sin_cos();
        let hm = restrict_to_pair(&h, &b.pairs[0]);
        assert!((hm[(1, 0)] - Z::new(s, 0.0)).norm() < 1e-12);
        assert!((hm[(0, 1)] - Z::new(c, 0.0)).norm() < 1e-12);
        assert!((ph.gamma - m.expected.phases.unwrap().0).abs() < 1e-12);
    }
}

#[test]
fn supplement_pt_regions() {
    let real = supplement_pt(0.0, 0.3, 0.6);
    assert_eq!(real.expected.energy_class, Some(EnergyClass::Real));
    let imag = supplement_pt(0.0, 0.6, 0.3);
    assert_eq!(imag.expected.energy_class, Some(EnergyClass::Imaginary));
    for m in [&real, &imag] {
        let p = model_pipeline(m).unwrap();
        assert_eq!(
            energy_reality_class(p.dec.pairs[0].gamma, 1e-9),
            m.expected.energy_class.unwrap()
        );
        assert_record(m);
    }
    let ep = supplement_pt(0.0, 0.4, 0.4);
    let f = ep.expected.pair_f[0];
    assert!(f * (1.0 - f) < 1e-15);
    assert!(model_pipeline(&ep).unwrap().dec.pairs[0].coalesced);
}

#[test]
fn supplement_pt_basis_is_sigma_y() {
    let m = supplement_pt(0.2, -0.3, 0.5);
    let h = normalize(&m.matrix, 1e-9).unwrap();
    let b = m.basis(&h, 1e-9).unwrap();
    let f_op = build_f_operator(&h);
    for (v, f) in [
        (&b.pairs[0].v_f, m.expected.pair_f[0]),
        (&b.pairs[0].v_cf, 1.0 - m.expected.pair_f[0]),
    ] {
        let fv = f_op.mul_vec(v);
        let want: Vec<Z> = v.iter().map(|x| x * f).collect();
        assert!(nh_bypass::matrix::vec_distance(&fv, &want) < 1e-12);
    }
}

#[test]
fn every_registered_model_builds_from_defaults_plus_required() {
    use std::collections::BTreeMap;
    for spec in MODELS {
        let mut p = BTreeMap::new();
        for ps in spec.params {
            if ps.default.is_none() {
                p.insert(ps.name.to_string(), 0.37);
            }
        }
        let m = build_model(spec.name, &p).unwrap();
        assert!(normalize(m.operand(), 1e-9).is_ok(), "{}", spec.name);
    }
}
