//! Matrix files: `{"dim": N, "entries": [[[re, im], ...], ...]}`.
//!
//! `entries` is row-major, either as `N` rows of `N` pairs or as one flat
//! list of `N²` pairs.

use std::f64::consts::PI;

use nh_bypass::{ComplexMatrix, ComplexScalar};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Entries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        MatrixFile {
            dim: m.dim(),
            entries: Entries::Rows(rows),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let n = self.dim;
        if n == 0 {
            return Err(CliError::parse("matrix", "dim must be positive"));
        }
        let flat: Vec<[f64; 2]> = match &self.entries {
            Entries::Rows(rows) => {
                if rows.len() != n {
                    return Err(CliError::parse(
                        "matrix",
                        format!("dim is {n} but entries has {} rows", rows.len()),
                    ));
                }
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(CliError::parse(
                        "matrix",
                        format!("row {i} has {} entries, expected {n}", r.len()),
                    ));
                }
                rows.concat()
            }
            Entries::Flat(v) => {
                if v.len() != n * n {
                    return Err(CliError::parse(
                        "matrix",
                        format!("dim is {n} but entries has {} values", v.len()),
                    ));
                }
                v.clone()
            }
        };
        if flat.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::parse("matrix", "entries must be finite"));
        }
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            let [re, im] = flat[i * n + j];
            ComplexScalar::new(re, im)
        }))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, CliError> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| CliError::parse("matrix", e.to_string()))?;
    file.to_matrix()
}

/// Parses a number, also accepting multiples of π such as `pi/4`, `-3pi/4`
/// or `0.5pi`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let bad = || CliError::parse("number", format!("`{s}`"));
    let lower = t.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (lower.as_str(), 1.0),
    };
    let coeff = num
        .trim()
        .strip_suffix("pi")
        .ok_or_else(bad)?
        .trim()
        .trim_end_matches('*');
    let c = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(c * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_entry_layouts_parse() {
        let a = parse_matrix(r#"{"dim": 2, "entries": [[[1, 0], [0, 2]], [[0, -2], [3, 0]]]}"#)
            .unwrap();
        let b =
            parse_matrix(r#"{"dim": 2, "entries": [[1, 0], [0, 2], [0, -2], [3, 0]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[(0, 1)], ComplexScalar::new(0.0, 2.0));
        assert_eq!(a[(1, 0)], ComplexScalar::new(0.0, -2.0));
    }

    #[test]
    fn shape_errors_are_parse_errors() {
        for text in [
            r#"{"dim": 2, "entries": [[[1, 0]], [[0, 0], [1, 0]]]}"#,
            r#"{"dim": 3, "entries": [[1, 0], [0, 2]]}"#,
            r#"{"dim": 0, "entries": []}"#,
            r#"{"dim": 1, "entries": [["1", 0]]}"#,
            "not json",
        ] {
            assert!(
                matches!(parse_matrix(text), Err(CliError::Parse { .. })),
                "{text}"
            );
        }
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = parse_matrix(
            r#"{"dim": 2, "entries": [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6], [0.7, 0.8]]}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert!((parse_number("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_number("-3pi/4").unwrap() + 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((parse_number("0.5*pi").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(parse_number("pie").is_err());
    }
}
