//! Full pipeline run producing an [`AnalysisReport`].

use std::collections::BTreeMap;

use nh_bypass::basis::{compute_basis_with, non_normality};
use nh_bypass::invariants::{expected_mismatch, Pipeline};
use nh_bypass::matrix::inner;
use nh_bypass::models::ModelInstance;
use nh_bypass::spectrum::oracle_compare;
use nh_bypass::symmetry::{classify_pairs, indefinite_norms};
use nh_bypass::{
    decompose, dual_states, energy_reality_class, general_eig, normalize, Basis, ComplexMatrix,
    ComplexScalar, Error, Hamiltonian, PointKind,
};

use crate::input::MatrixFile;
use crate::report::*;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub scalar_d_tol: f64,
    pub ep_tol: f64,
    pub oracle_tol: f64,
    pub expected: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            scalar_d_tol: 1e-9,
            ep_tol: 1e-9,
            oracle_tol: 1e-8,
            expected: false,
        }
    }
}

pub fn analyze_matrix(m: &ComplexMatrix, s: &Settings) -> Result<AnalysisReport, CliError> {
    let source = Source {
        kind: "matrix".into(),
        model: None,
        params: BTreeMap::new(),
    };
    let h = match normalize(m, s.scalar_d_tol) {
        Ok(h) => h,
        Err(Error::ZeroOperator { .. }) => return scalar_report(m, source, s),
        Err(e) => return Err(e.into()),
    };
    let basis = compute_basis_with(&h, s.ep_tol)?;
    build_report(h, basis, source, m, s)
}

/// Report for `m = τ·I`, whose every vector is an eigenvector.
fn scalar_report(
    m: &ComplexMatrix,
    source: Source,
    s: &Settings,
) -> Result<AnalysisReport, CliError> {
    let n = m.dim();
    let tau = m.trace() / n as f64;
    let oracle = general_eig(m)?;
    let values = vec![tau; n];
    let deviation = nh_bypass::eigen::multiset_distance(&oracle.values, &values);
    let herm = m.hermiticity_defect();
    Ok(AnalysisReport {
        version: REPORT_VERSION,
        source,
        input: MatrixFile::from_matrix(m),
        operand: None,
        tolerances: tolerances(s),
        point: "normal".into(),
        normalization: NormalizationReport {
            tau: pair(tau),
            d: 0.0,
            hermiticity_defect: herm,
            hermitian: herm <= 1e-12 * m.max_abs().max(1.0),
            scalar: true,
        },
        basis: BasisReport {
            pairs: Vec::new(),
            singlets: 0,
            mixed_normal_subspace: false,
        },
        spectrum: SpectrumReport {
            physical_eigenvalues: values.iter().copied().map(pair).collect(),
            rescaled_eigenvalues: Vec::new(),
            pairs: Vec::new(),
        },
        flat_states: Vec::new(),
        dual_maps: Vec::new(),
        symmetry: Vec::new(),
        oracle: OracleSummary {
            eigenvalue_deviation: deviation,
            vector_deviation: 0.0,
            tolerance: s.oracle_tol * m.max_abs().max(1.0),
            defective: oracle.defective,
            conditioning: oracle.min_singular,
            coalesced: false,
            passed: deviation <= s.oracle_tol * m.max_abs().max(1.0),
        },
        assembled_eigenvalues: None,
        expected: None,
    })
}

fn tolerances(s: &Settings) -> ToleranceReport {
    ToleranceReport {
        scalar_d: s.scalar_d_tol,
        ep_tol: s.ep_tol,
        oracle_tol: s.oracle_tol,
    }
}

pub fn analyze_model(model: &ModelInstance, s: &Settings) -> Result<AnalysisReport, CliError> {
    let h = normalize(model.operand(), s.scalar_d_tol)?;
    let basis = model.basis(&h, s.ep_tol)?;
    let source = Source {
        kind: "model".into(),
        model: Some(model.name.clone()),
        params: model.params.clone(),
    };
    let mut report = build_report(h.clone(), basis.clone(), source, &model.matrix, s)?;
    if model.inner.is_some() {
        report.operand = Some(MatrixFile::from_matrix(model.operand()));
        let es = general_eig(&model.matrix)?;
        report.assembled_eigenvalues = Some(sorted(es.values).into_iter().map(pair).collect());
    }
    if s.expected {
        let dec = decompose(&h, &basis)?;
        let mismatch = expected_mismatch(model, &Pipeline { h, basis, dec });
        let ex = &model.expected;
        report.expected = Some(ExpectedComparison {
            matches: mismatch.is_none(),
            mismatch,
            d: ex.d,
            pair_f: ex.pair_f.clone(),
            abs_e: ex.abs_e.clone(),
            energies: ex.energies.iter().copied().map(pair).collect(),
            phases: ex.phases.map(|(g, p)| [g, p]),
            a_mag: ex.a_mag.map(Num),
            energy_class: ex.energy_class.map(|c| c.as_str().to_string()),
            exceptional: ex.exceptional,
        });
    }
    Ok(report)
}

/// Orders eigenvalues by real then imaginary part.
pub fn sorted(mut v: Vec<ComplexScalar>) -> Vec<ComplexScalar> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn build_report(
    h: Hamiltonian,
    basis: Basis,
    source: Source,
    input: &ComplexMatrix,
    s: &Settings,
) -> Result<AnalysisReport, CliError> {
    let dec = decompose(&h, &basis)?;
    let oracle = oracle_compare(&h, &dec, s.oracle_tol)?;
    let sqrt_d = h.d.sqrt();
    let physical = |e: ComplexScalar| pair(e * sqrt_d + h.trace_shift);

    let pairs = dec
        .pairs
        .iter()
        .map(|p| PairReport {
            f: p.f,
            kind: p.kind.as_str().into(),
            abs_e: p.abs_e,
            gamma: p.gamma,
            phi: p.phi,
            a_mag: Num(p.a_mag.value()),
            theta: p.theta,
            e_plus: pair(p.e_plus),
            e_minus: pair(p.e_minus),
            physical_e_plus: physical(p.e_plus),
            physical_e_minus: physical(p.e_minus),
            energy_class: energy_reality_class(p.gamma, s.ep_tol.max(1e-9))
                .as_str()
                .into(),
            non_normality: non_normality(p.f),
            coalesced: p.coalesced,
            near_exceptional: p.near_exceptional,
            residual: p.residual,
        })
        .collect();

    let flat_states = dec
        .flat
        .iter()
        .map(|(g, _)| {
            let e = ComplexScalar::from_polar(std::f64::consts::FRAC_1_SQRT_2, *g);
            FlatReport {
                gamma0: *g,
                energy: pair(e),
                physical_energy: physical(e),
            }
        })
        .collect();

    let classified = classify_pairs(&h, &basis, &dec.pairs, s.oracle_tol);
    let mut dual_maps = Vec::new();
    let mut symmetry = Vec::new();
    for (k, ((bp, ps), c)) in basis
        .pairs
        .iter()
        .zip(&dec.pairs)
        .zip(classified)
        .enumerate()
    {
        let class = energy_reality_class(ps.gamma, s.ep_tol.max(1e-9))
            .as_str()
            .to_string();
        let Some((maps, rep)) = c else {
            let note = if ps.coalesced {
                "pair is coalesced; duals are undefined"
            } else {
                "dual maps unavailable"
            };
            dual_maps.push(DualMapReport {
                pair: k,
                available: false,
                note: Some(note.into()),
                residuals: BTreeMap::new(),
                biorthonormality_defect: None,
                gram_defect: None,
                corrected_gram_defect: None,
            });
            symmetry.push(SymmetryEntry {
                pair: k,
                energy_class: class,
                row: None,
                classes: BTreeMap::new(),
                c_eta: None,
            });
            continue;
        };
        let bio = dual_states(ps, bp).ok().map(|(dp, dm)| {
            let g = [
                inner(&dp, &ps.v_plus) - 1.0,
                inner(&dp, &ps.v_minus),
                inner(&dm, &ps.v_plus),
                inner(&dm, &ps.v_minus) - 1.0,
            ];
            g.iter().map(|z| z.norm()).fold(0.0, f64::max)
        });
        let norms = indefinite_norms(&maps, ps, bp).ok();
        let eta =
            ComplexMatrix::diagonal(&[ComplexScalar::new(-1.0, 0.0), ComplexScalar::new(1.0, 0.0)]);
        dual_maps.push(DualMapReport {
            pair: k,
            available: true,
            note: None,
            residuals: rep.residuals.clone(),
            biorthonormality_defect: bio,
            gram_defect: norms.as_ref().map(|(g, _)| g.distance(&eta)),
            corrected_gram_defect: norms
                .as_ref()
                .map(|(_, c)| c.distance(&ComplexMatrix::identity(2))),
        });
        let classes = [
            ("P", rep.p),
            ("C", rep.c),
            ("C2", rep.c_second),
            ("Q", rep.q),
            ("K", rep.k),
        ]
        .into_iter()
        .map(|(n, e)| (n.to_string(), class_entry(e)))
        .collect();
        symmetry.push(SymmetryEntry {
            pair: k,
            energy_class: rep.energy_class.as_str().into(),
            row: Some(rep.row()),
            classes,
            c_eta: Some(rep.c_eta),
        });
    }

    let point = if dec
        .pairs
        .iter()
        .any(|p| p.coalesced || p.kind == PointKind::Exceptional)
    {
        "exceptional"
    } else if dec.pairs.iter().all(|p| p.kind == PointKind::Normal) {
        "normal"
    } else {
        "generic"
    };
    let scale = input.max_abs().max(1.0);
    let herm = h.original.hermiticity_defect();
    Ok(AnalysisReport {
        version: REPORT_VERSION,
        source,
        input: MatrixFile::from_matrix(input),
        operand: None,
        tolerances: tolerances(s),
        point: point.into(),
        normalization: NormalizationReport {
            tau: pair(h.trace_shift),
            d: h.d,
            hermiticity_defect: herm,
            hermitian: herm <= 1e-12 * scale,
            scalar: false,
        },
        basis: BasisReport {
            pairs: basis
                .pairs
                .iter()
                .map(|p| BasisPairSummary {
                    f: p.f,
                    partner: 1.0 - p.f,
                    kind: p.kind.as_str().into(),
                })
                .collect(),
            singlets: basis.singlets.len(),
            mixed_normal_subspace: basis.mixed_normal_subspace,
        },
        spectrum: SpectrumReport {
            physical_eigenvalues: dec.physical_eigenvalues().into_iter().map(pair).collect(),
            rescaled_eigenvalues: dec.eigenvalues().into_iter().map(pair).collect(),
            pairs,
        },
        flat_states,
        dual_maps,
        symmetry,
        oracle: OracleSummary {
            eigenvalue_deviation: oracle.eigenvalue_deviation,
            vector_deviation: oracle.vector_deviation,
            tolerance: oracle.tolerance,
            defective: oracle.oracle_defective,
            conditioning: oracle.oracle_conditioning,
            coalesced: oracle.coalesced,
            passed: oracle.passed,
        },
        assembled_eigenvalues: None,
        expected: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nh_bypass::models::{alpha_beta, gain_loss};

    #[test]
    fn identity_is_a_normal_point() {
        let r = analyze_matrix(&ComplexMatrix::identity(2), &Settings::default()).unwrap();
        assert!(r.normalization.hermitian && r.normalization.scalar);
        assert_eq!(r.point, "normal");
        assert_eq!(r.spectrum.physical_eigenvalues, vec![[1.0, 0.0]; 2]);
        assert!(r.oracle.passed);
        let sz =
            ComplexMatrix::diagonal(&[ComplexScalar::new(1.0, 0.0), ComplexScalar::new(-1.0, 0.0)]);
        let r = analyze_matrix(&sz, &Settings::default()).unwrap();
        assert!(r.normalization.hermitian);
        assert_eq!(r.spectrum.pairs[0].kind, "normal");
        assert_eq!(r.point, "normal");
        assert!(r.oracle.passed);
    }

    #[test]
    fn gain_loss_report_matches_record() {
        let s = Settings {
            expected: true,
            ..Settings::default()
        };
        let r = analyze_model(&gain_loss(0.0, 0.1, -0.1, 0.3, 0.0), &s).unwrap();
        assert!(r.expected.unwrap().matches);
        assert_eq!(r.symmetry[0].row, Some([-1, 1, 1, 1]));
    }

    #[test]
    fn exceptional_model_reports_infinite_a() {
        let r = analyze_model(
            &alpha_beta(std::f64::consts::FRAC_PI_4, 0.0),
            &Settings::default(),
        )
        .unwrap();
        assert!(r.spectrum.pairs[0].coalesced);
        assert_eq!(r.spectrum.pairs[0].a_mag, Num(f64::INFINITY));
        assert!(!r.dual_maps[0].available);
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
