use nh_bypass::basis::ladder_phases;
use nh_bypass::eigen::multiset_distance;
use nh_bypass::matrix::{inner, vec_distance};
use nh_bypass::symmetry::restrict_to_pair;
use nh_bypass::*;
use num_complex::Complex64 as Z;
use proptest::prelude::*;

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n)
}

fn build(n: usize, e: &[(f64, f64)]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        let (re, im) = e[i * n + j];
        Z::new(re, im)
    })
}

fn away_from_ep(m: &ComplexMatrix) -> Option<(Hamiltonian, Basis, Spectrum)> {
    let h = normalize(m, 1e-9).ok()?;
    let b = compute_basis(&h).ok()?;
    if b.pairs[0].ep_distance() <= 1e-6 {
        return None;
    }
    let d = decompose(&h, &b).ok()?;
    Some((h, b, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn anticommutator_is_linear_in_first_slot(a in entries(3), b in entries(3), c in entries(3), s in (-2.0..2.0f64, -2.0..2.0f64)) {
        let (a, b, c) = (build(3, &a), build(3, &b), build(3, &c));
        let s = Z::new(s.0, s.1);
        let lhs = anticommutator(&(&a + &c.scale(s)), &b).unwrap();
        let rhs = &anticommutator(&a, &b).unwrap() + &anticommutator(&c, &b).unwrap().scale(s);
        prop_assert!(lhs.distance(&rhs) <= 1e-12);
    }

    #[test]
    fn normalized_two_level_has_unit_anticommutator(e in entries(2)) {
        let m = build(2, &e);
        prop_assume!(m.max_abs() > 1e-3);
        let h = normalize(&m, 1e-9).unwrap();
        let d = anticommutator(&h.rescaled, &h.rescaled.adjoint()).unwrap();
        prop_assert!(d.distance(&ComplexMatrix::identity(2)) <= 1e-12);
        prop_assert!(h.rescaled.trace().norm() <= 1e-12);
    }

    #[test]
    fn restored_spectrum_matches_oracle(e in entries(2)) {
        let m = build(2, &e);
        let Some((_, _, dec)) = away_from_ep(&m) else { return Ok(()) };
        let oracle = general_eig(&m).unwrap();
        prop_assert!(multiset_distance(&dec.physical_eigenvalues(), &oracle.values) <= 1e-9 * m.max_abs().max(1.0));
    }

    #[test]
    fn ladder_closes_on_computational_pair(e in entries(2)) {
        let m = build(2, &e);
        let Some((h, b, _)) = away_from_ep(&m) else { return Ok(()) };
        let pair = &b.pairs[0];
        let ph = ladder_phases(&h, pair).unwrap();
        let hv = h.rescaled.mul_vec(&pair.v_f);
        let want: Vec<Z> = pair.v_cf.iter().map(|x| x * Z::from_polar(pair.f.sqrt(), ph.gamma + ph.phi)).collect();
        prop_assert!(vec_distance(&hv, &want) <= 1e-9);
        prop_assert!(ph.gamma > -std::f64::consts::FRAC_PI_2 && ph.gamma <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn f_minus_half_swaps_energy_states(e in entries(2)) {
        let m = build(2, &e);
        let Some((h, _, dec)) = away_from_ep(&m) else { return Ok(()) };
        let ps = &dec.pairs[0];
        let shifted = &build_f_operator(&h) - &ComplexMatrix::identity(2).scale_real(0.5);
        let got = shifted.mul_vec(&ps.v_plus);
        let want: Vec<Z> = ps.v_minus.iter().map(|x| x * (ps.f - 0.5)).collect();
        prop_assert!(vec_distance(&got, &want) <= 1e-9);
    }

    #[test]
    fn duals_are_biorthonormal(e in entries(2)) {
        let m = build(2, &e);
        let Some((_, b, dec)) = away_from_ep(&m) else { return Ok(()) };
        let ps = &dec.pairs[0];
        let (dp, dm) = dual_states(ps, &b.pairs[0]).unwrap();
        prop_assert!((inner(&dp, &ps.v_plus) - 1.0).norm() <= 1e-9);
        prop_assert!((inner(&dm, &ps.v_minus) - 1.0).norm() <= 1e-9);
        prop_assert!(inner(&dp, &ps.v_minus).norm() <= 1e-9);
        prop_assert!(inner(&dm, &ps.v_plus).norm() <= 1e-9);
    }

    #[test]
    fn dual_map_relations_hold(e in entries(2)) {
        let m = build(2, &e);
        let Some((h, b, dec)) = away_from_ep(&m) else { return Ok(()) };
        let pair = &b.pairs[0];
        let ps = &dec.pairs[0];
        let maps = build_dual_maps(pair, ps).unwrap();
        let hm = restrict_to_pair(&h, pair);
        let res = pseudo_hermitian_residuals(&hm, &maps, ps.gamma).unwrap();
        for (k, v) in &res {
            prop_assert!(*v <= 1e-9, "{} = {:e}", k, v);
        }
        let (gram, corrected) = indefinite_norms(&maps, ps, pair).unwrap();
        let eta = ComplexMatrix::diagonal(&[Z::new(-1.0, 0.0), Z::new(1.0, 0.0)]);
        prop_assert!(gram.distance(&eta) <= 1e-9);
        prop_assert!(corrected.distance(&ComplexMatrix::identity(2)) <= 1e-9);
    }

    #[test]
    fn bloch_angle_tracks_a(e in entries(2)) {
        let m = build(2, &e);
        let Some((_, _, dec)) = away_from_ep(&m) else { return Ok(()) };
        let ps = &dec.pairs[0];
        let bp = ps.bloch();
        prop_assert!(((bp.theta / 2.0).tan() - ps.a_mag.value()).abs() <= 1e-9 * ps.a_mag.value().max(1.0));
    }
}
