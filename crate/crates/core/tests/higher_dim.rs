use std::f64::consts::FRAC_1_SQRT_2;

use nh_bypass::eigen::multiset_distance;
use nh_bypass::higher_dim::explicit_block;
use nh_bypass::invariants::pipeline;
use nh_bypass::matrix::basis_vector;
use nh_bypass::models::flat_3d;
use nh_bypass::random::{scalar_d_matrix, seeded, ScalarDOptions};
use nh_bypass::*;
use num_complex::Complex64 as Z;

/// `|f⟩₁, |f⟩₂, |1−f⟩₁, |1−f⟩₂` on the standard basis with diagonal blocks.
fn circular_case(f: f64, g1: f64, g2: f64, phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for (k, g) in [(0usize, g1), (1, g2)] {
        m[(2 + k, k)] = Z::from_polar(f.sqrt(), g + phi);
        m[(k, 2 + k)] = Z::from_polar((1.0 - f).sqrt(), g - phi);
    }
    m
}

#[test]
fn constructed_circular_degeneracy() {
    let (f, g1, g2, phi) = (0.7, 0.3, -0.9, 0.4);
    let m = circular_case(f, g1, g2, phi);
    let h = normalize(&m, 1e-9).unwrap();
    let bf = vec![basis_vector(4, 0), basis_vector(4, 1)];
    let bcf = vec![basis_vector(4, 2), basis_vector(4, 3)];
    let bp = explicit_block(&h, f, bf, bcf);
    assert!(bp.ladder_amplitude_defect() < 1e-12);
    let ds = degenerate_spectrum(&bp).unwrap();
    assert_eq!(ds.kind, DegeneracyKind::Circular);
    let mag = (f * (1.0 - f)).powf(0.25);
    let mut energies = Vec::new();
    for p in &ds.eigenpairs {
        assert!((p.e_plus.norm() - mag).abs() < 1e-12);
        energies.push(p.e_plus);
        energies.push(p.e_minus);
    }
    let oracle = general_eig(&m).unwrap();
    assert!(multiset_distance(&energies, &oracle.values) < 1e-10);
}

#[test]
fn block_decomposition_of_random_scalar_d() {
    let mut rng = seeded(11);
    for n in [4, 5, 6] {
        let s = scalar_d_matrix(&mut rng, n, ScalarDOptions::default());
        let p = pipeline(&s.matrix).unwrap();
        let blocks = block_decompose(&p.h, &p.basis).unwrap();
        assert_eq!(blocks.len(), n / 2);
        for bp in &blocks {
            assert!(bp.ladder_amplitude_defect() < 1e-9);
            let ds = degenerate_spectrum(bp).unwrap();
            assert_eq!(ds.kind, DegeneracyKind::NonDegenerate);
            let ba = &bp.b * &bp.a;
            for e in &ds.eigenpairs {
                let lhs = ba.mul_vec(&e.psi_a);
                let rhs: Vec<Z> = e.psi_a.iter().map(|x| x * e.e_plus * e.e_plus).collect();
                assert!(nh_bypass::matrix::vec_distance(&lhs, &rhs) < 1e-9);
            }
        }
    }
}

#[test]
fn flat_model_splits_into_one_block_and_one_singlet() {
    let m = flat_3d(0.4);
    let p = pipeline(&m.matrix).unwrap();
    let blocks = block_decompose(&p.h, &p.basis).unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].m, 1);
    let flats = flat_singlets(&p.h, &p.basis);
    assert_eq!(flats.len(), 1);
    assert!((flats[0].energy() - Z::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
}

#[test]
fn even_generic_has_no_flat_states() {
    let mut rng = seeded(5);
    let s = scalar_d_matrix(&mut rng, 4, ScalarDOptions::default());
    let p = pipeline(&s.matrix).unwrap();
    assert!(flat_singlets(&p.h, &p.basis).is_empty());
}

#[test]
fn flat_singlet_is_constant_over_kappa() {
    for k in 0..50 {
        let kappa = 0.03 + 6.2 * k as f64 / 50.0;
        let p = pipeline(&flat_3d(kappa).matrix).unwrap();
        let flats = flat_singlets(&p.h, &p.basis);
        assert_eq!(flats.len(), 1, "kappa {kappa}");
        assert!((flats[0].energy().norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(flats[0].gamma0.abs() < 1e-12);
    }
}

#[test]
fn flattening_keeps_normal_input_fixed() {
    let m = ComplexMatrix::from_rows(vec![
        vec![Z::new(0.0, 0.0), Z::new(0.0, -FRAC_1_SQRT_2)],
        vec![Z::new(0.0, FRAC_1_SQRT_2), Z::new(0.0, 0.0)],
    ])
    .unwrap();
    let p = pipeline(&m).unwrap();
    let rep = spectral_flattening_check(&p.h, &p.dec).unwrap();
    assert!(rep.holds);
    assert!(rep.distance_to_input < 1e-10);
}

#[test]
fn flattening_leaves_pair_scalars_set_by_a() {
    // On each pair H_flat is (e^{iγ}/√2)·C₁, so {H_flat, H_flat†} restricted to
    // the pair is ½(|a|² + |a|⁻²)·I, which equals I only at |a| = 1.
    let mut rng = seeded(3);
    let s = scalar_d_matrix(&mut rng, 4, ScalarDOptions::default());
    let p = pipeline(&s.matrix).unwrap();
    let rep = spectral_flattening_check(&p.h, &p.dec).unwrap();
    for (ps, scale) in p.dec.pairs.iter().zip(&rep.pair_scales) {
        let a = ps.a_mag.value();
        assert!((scale - 0.5 * (a * a + 1.0 / (a * a))).abs() < 1e-12);
    }
    assert!(!rep.holds);
}

#[test]
fn flattening_rejects_exceptional_pairs() {
    let m = flat_3d(std::f64::consts::FRAC_PI_2);
    let p = pipeline(&m.matrix).unwrap();
    assert!(matches!(
        spectral_flattening_check(&p.h, &p.dec),
        Err(Error::GapClosed { .. })
    ));
}

#[test]
fn cross_level_leak_is_reported() {
    let m = circular_case(0.7, 0.3, -0.9, 0.4);
    let h = normalize(&m, 1e-9).unwrap();
    let mut basis = compute_basis(&h).unwrap();
    // Mislabel: swap one |f⟩ with a |1−f⟩ so that H couples two groups.
    let v = basis.pairs[0].v_f.clone();
    basis.pairs[0].v_f = basis.pairs[1].v_cf.clone();
    basis.pairs[1].v_cf = v;
    basis.levels.clear();
    basis.pairs[1].f = 0.2;
    assert!(matches!(
        block_decompose(&h, &basis),
        Err(Error::CrossLevelLeak { .. })
    ));
}
