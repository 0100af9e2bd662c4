//! Serialized analysis report. Fields are only ever added; `version` is
//! bumped when they are.

use std::collections::BTreeMap;
use std::fmt;

use nh_bypass::symmetry::ClassEntry;
use nh_bypass::ComplexScalar;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::input::MatrixFile;

pub const REPORT_VERSION: u32 = 1;

/// A float that may be infinite, written as the string `"inf"` when it is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn token(self) -> Option<&'static str> {
        if self.0.is_nan() {
            Some("nan")
        } else if self.0 == f64::INFINITY {
            Some("inf")
        } else if self.0 == f64::NEG_INFINITY {
            Some("-inf")
        } else {
            None
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.token() {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(self.0),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    "nan" => Ok(Num(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

pub fn pair(z: ComplexScalar) -> [f64; 2] {
    [z.re, z.im]
}

pub fn class_entry(e: ClassEntry) -> String {
    match e {
        ClassEntry::Sign(s) if s > 0 => "+1".into(),
        ClassEntry::Sign(_) => "-1".into(),
        ClassEntry::Gated => "gated".into(),
        ClassEntry::NotFound => "none".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: u32,
    pub source: Source,
    pub input: MatrixFile,
    /// The matrix the pipeline ran on, when it differs from `input`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operand: Option<MatrixFile>,
    pub tolerances: ToleranceReport,
    /// `normal` when every pair sits at `f = ½` (or the input is a multiple
    /// of the identity), `exceptional` when any pair coalesces, else `generic`.
    pub point: String,
    pub normalization: NormalizationReport,
    pub basis: BasisReport,
    pub spectrum: SpectrumReport,
    pub flat_states: Vec<FlatReport>,
    pub dual_maps: Vec<DualMapReport>,
    pub symmetry: Vec<SymmetryEntry>,
    pub oracle: OracleSummary,
    /// Eigenvalues of `input` when the pipeline ran on `operand`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assembled_eigenvalues: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedComparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Source {
    /// `"matrix"` or `"model"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub scalar_d: f64,
    pub ep_tol: f64,
    pub oracle_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub tau: [f64; 2],
    pub d: f64,
    pub hermiticity_defect: f64,
    pub hermitian: bool,
    /// The input is `τ·I`; there is nothing left to rescale.
    #[serde(default)]
    pub scalar: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub pairs: Vec<BasisPairSummary>,
    pub singlets: usize,
    pub mixed_normal_subspace: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisPairSummary {
    pub f: f64,
    pub partner: f64,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub physical_eigenvalues: Vec<[f64; 2]>,
    pub rescaled_eigenvalues: Vec<[f64; 2]>,
    pub pairs: Vec<PairReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub f: f64,
    pub kind: String,
    pub abs_e: f64,
    pub gamma: f64,
    pub phi: f64,
    pub a_mag: Num,
    pub theta: f64,
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
    pub physical_e_plus: [f64; 2],
    pub physical_e_minus: [f64; 2],
    pub energy_class: String,
    pub non_normality: f64,
    pub coalesced: bool,
    pub near_exceptional: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatReport {
    pub gamma0: f64,
    pub energy: [f64; 2],
    pub physical_energy: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualMapReport {
    pub pair: usize,
    pub available: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biorthonormality_defect: Option<f64>,
    /// Distance of the dual Gram matrix from `diag(−1, +1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_defect: Option<f64>,
    /// Distance of the metric-corrected Gram matrix from the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_gram_defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub pair: usize,
    pub energy_class: String,
    /// `(P, C, Q, K)` signs with `0` for gated or missing entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<[i8; 4]>,
    /// Each class as `+1`, `-1`, `gated` or `none`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub classes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_eta: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub eigenvalue_deviation: f64,
    pub vector_deviation: f64,
    pub tolerance: f64,
    pub defective: bool,
    pub conditioning: f64,
    pub coalesced: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedComparison {
    pub matches: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
    pub d: f64,
    pub pair_f: Vec<f64>,
    pub abs_e: Vec<f64>,
    pub energies: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_mag: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_class: Option<String>,
    pub exceptional: bool,
}

/// Per-pair table of a report, one row per pair and one per flat state.
pub fn write_csv(report: &AnalysisReport, out: &mut dyn std::io::Write) -> csv::Result<()> {
    use crate::sweep::format_float as ff;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "state",
        "f",
        "kind",
        "abs_e",
        "gamma",
        "phi",
        "a_mag",
        "theta",
        "e_plus_re",
        "e_plus_im",
        "e_minus_re",
        "e_minus_im",
        "physical_e_plus_re",
        "physical_e_plus_im",
        "physical_e_minus_re",
        "physical_e_minus_im",
        "energy_class",
        "non_normality",
        "coalesced",
    ])?;
    for (k, p) in report.spectrum.pairs.iter().enumerate() {
        w.write_record([
            format!("pair{k}"),
            ff(p.f),
            p.kind.clone(),
            ff(p.abs_e),
            ff(p.gamma),
            ff(p.phi),
            ff(p.a_mag.0),
            ff(p.theta),
            ff(p.e_plus[0]),
            ff(p.e_plus[1]),
            ff(p.e_minus[0]),
            ff(p.e_minus[1]),
            ff(p.physical_e_plus[0]),
            ff(p.physical_e_plus[1]),
            ff(p.physical_e_minus[0]),
            ff(p.physical_e_minus[1]),
            p.energy_class.clone(),
            ff(p.non_normality),
            p.coalesced.to_string(),
        ])?;
    }
    for (k, s) in report.flat_states.iter().enumerate() {
        let mut row = vec![format!("flat{k}"), ff(0.5), "flat".into()];
        row.extend([ff(std::f64::consts::FRAC_1_SQRT_2), ff(s.gamma0)]);
        row.extend(std::iter::repeat_n(String::new(), 3));
        row.extend([
            ff(s.energy[0]),
            ff(s.energy[1]),
            String::new(),
            String::new(),
        ]);
        row.extend([
            ff(s.physical_energy[0]),
            ff(s.physical_energy[1]),
            String::new(),
            String::new(),
        ]);
        row.extend([String::new(), String::new(), String::new()]);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_numbers_use_tokens() {
        let v = vec![Num(1.5), Num(f64::INFINITY), Num(-0.1)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"inf",-0.1]"#);
        let back: Vec<Num> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn seventeen_digit_values_survive() {
        let x = [
            0.1 + 0.2,
            std::f64::consts::PI,
            1.0 / 3.0,
            5e-324,
            1.7976931348623157e308,
        ];
        let s = serde_json::to_string(&x).unwrap();
        let back: [f64; 5] = serde_json::from_str(&s).unwrap();
        assert_eq!(back.map(f64::to_bits), x.map(f64::to_bits));
    }
}
