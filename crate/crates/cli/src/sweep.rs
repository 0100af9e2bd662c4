//! Parameter sweeps over registered models.
//!
//! Points are evaluated in parallel and emitted row-major over the grid,
//! the first axis varying slowest.

use std::collections::BTreeMap;
use std::io::Write;

use nh_bypass::models::build_model;
use nh_bypass::ComplexScalar;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{analyze_model, sorted, Settings};
use crate::input::parse_number;
use crate::report::{Num, REPORT_VERSION};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    /// Parses `name=start:stop:count`.
    pub fn parse(spec: &str) -> Result<Axis, CliError> {
        let bad = |msg: &str| CliError::parse("grid", format!("`{spec}`: {msg}"));
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected name=start:stop:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count must be a positive integer"))?;
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        Ok(Axis {
            name: name.trim().replace('-', "_"),
            start: parse_number(parts[0])?,
            stop: parse_number(parts[1])?,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub model: String,
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<Axis>,
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairColumns {
    pub f: f64,
    pub abs_e: f64,
    pub gamma: f64,
    pub energy_class: String,
    pub non_normality: f64,
    pub a_mag: f64,
    pub ep_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointData {
    pub d: f64,
    pub pairs: Vec<PairColumns>,
    pub eigenvalues: Vec<ComplexScalar>,
    pub oracle_deviation: f64,
    /// `(f, |E|, matches)` from the closed-form record.
    pub expected: Option<(Vec<f64>, Vec<f64>, bool)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub outcome: Result<PointData, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub axis: String,
    /// Grid index below the crossing along `axis`.
    pub index: usize,
    pub from: f64,
    pub to: f64,
    /// Coordinates on the other axes.
    pub at: BTreeMap<String, f64>,
    /// `ep_tol` when `min(f, 1 − f) − ep_tol` changes sign, `class` when a
    /// pair switches between real and imaginary energies.
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) => Num(*x).serialize(s),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(x: f64) -> String {
    match Num(x).token() {
        Some(t) => t.to_string(),
        // Negative zero prints as zero.
        None => format!("{:.16e}", x + 0.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub version: u32,
    pub model: String,
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub crossings: Vec<Crossing>,
}

fn evaluate(spec: &SweepSpec, coords: &[f64]) -> Result<PointData, String> {
    let mut params = spec.fixed.clone();
    for (axis, v) in spec.axes.iter().zip(coords) {
        params.insert(axis.name.clone(), *v);
    }
    let model = build_model(&spec.model, &params).map_err(|e| e.to_string())?;
    let report = analyze_model(&model, &spec.settings).map_err(|e| e.to_string())?;
    let pairs = report
        .spectrum
        .pairs
        .iter()
        .map(|p| PairColumns {
            f: p.f,
            abs_e: p.abs_e,
            gamma: p.gamma,
            energy_class: p.energy_class.clone(),
            non_normality: p.non_normality,
            a_mag: p.a_mag.0,
            ep_distance: p.f.min(1.0 - p.f),
        })
        .collect();
    let raw = report
        .assembled_eigenvalues
        .as_ref()
        .unwrap_or(&report.spectrum.physical_eigenvalues);
    let eigenvalues = sorted(
        raw.iter()
            .map(|[re, im]| ComplexScalar::new(*re, *im))
            .collect(),
    );
    let expected = report
        .expected
        .as_ref()
        .map(|e| (e.pair_f.clone(), e.abs_e.clone(), e.matches));
    Ok(PointData {
        d: report.normalization.d,
        pairs,
        eigenvalues,
        oracle_deviation: report.oracle.eigenvalue_deviation,
        expected,
    })
}

fn grid_coords(axes: &[Axis], flat: usize) -> Vec<f64> {
    let mut idx = vec![0; axes.len()];
    let mut rem = flat;
    for (k, axis) in axes.iter().enumerate().rev() {
        idx[k] = rem % axis.count;
        rem /= axis.count;
    }
    axes.iter().zip(idx).map(|(a, i)| a.value(i)).collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepPoint> {
    let total: usize = spec.axes.iter().map(|a| a.count).product();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let coords = grid_coords(&spec.axes, flat);
            let outcome = evaluate(spec, &coords);
            SweepPoint { coords, outcome }
        })
        .collect()
}

fn pair_suffix(k: usize) -> String {
    if k == 0 {
        String::new()
    } else {
        format!("_{k}")
    }
}

pub fn tabulate(spec: &SweepSpec, points: &[SweepPoint]) -> SweepTable {
    let ok = || points.iter().filter_map(|p| p.outcome.as_ref().ok());
    let n_pairs = ok().map(|d| d.pairs.len()).max().unwrap_or(0);
    let n_eig = ok().map(|d| d.eigenvalues.len()).max().unwrap_or(0);
    let with_expected = spec.settings.expected;
    let ep_tol = spec.settings.ep_tol;

    let mut data_columns = vec!["d".to_string()];
    for k in 0..n_pairs {
        let s = pair_suffix(k);
        for c in [
            "f",
            "abs_e",
            "gamma",
            "energy_class",
            "non_normality",
            "a_mag",
        ] {
            data_columns.push(format!("{c}{s}"));
        }
        if with_expected {
            data_columns.push(format!("expected_f{s}"));
            data_columns.push(format!("expected_abs_e{s}"));
        }
    }
    data_columns.push("ep_flag".into());
    for j in 0..n_eig {
        data_columns.push(format!("e{j}_re"));
        data_columns.push(format!("e{j}_im"));
    }
    data_columns.push("oracle_deviation".into());
    if with_expected {
        data_columns.push("expected_match".into());
    }
    data_columns.push("error".into());
    // A parameter named like a data column (chiral_embed's `f`) is prefixed.
    let mut columns: Vec<String> = spec
        .axes
        .iter()
        .map(|a| {
            if data_columns.contains(&a.name) {
                format!("param_{}", a.name)
            } else {
                a.name.clone()
            }
        })
        .collect();
    columns.extend(data_columns);

    let rows = points
        .iter()
        .map(|p| {
            let mut row: Vec<Cell> = p.coords.iter().map(|x| Cell::Num(*x)).collect();
            match &p.outcome {
                Ok(d) => {
                    row.push(Cell::Num(d.d));
                    for k in 0..n_pairs {
                        match d.pairs.get(k) {
                            Some(q) => {
                                row.push(Cell::Num(q.f));
                                row.push(Cell::Num(q.abs_e));
                                row.push(Cell::Num(q.gamma));
                                row.push(Cell::Text(q.energy_class.clone()));
                                row.push(Cell::Num(q.non_normality));
                                row.push(Cell::Num(q.a_mag));
                            }
                            None => row.extend(std::iter::repeat_n(Cell::Empty, 6)),
                        }
                        if with_expected {
                            let ex = d.expected.as_ref();
                            let get = |v: Option<&Vec<f64>>| {
                                v.and_then(|v| v.get(k))
                                    .map_or(Cell::Empty, |x| Cell::Num(*x))
                            };
                            row.push(get(ex.map(|e| &e.0)));
                            row.push(get(ex.map(|e| &e.1)));
                        }
                    }
                    row.push(Cell::Bool(d.pairs.iter().any(|q| q.ep_distance <= ep_tol)));
                    for j in 0..n_eig {
                        match d.eigenvalues.get(j) {
                            Some(z) => {
                                row.push(Cell::Num(z.re));
                                row.push(Cell::Num(z.im));
                            }
                            None => row.extend([Cell::Empty, Cell::Empty]),
                        }
                    }
                    row.push(Cell::Num(d.oracle_deviation));
                    if with_expected {
                        row.push(d.expected.as_ref().map_or(Cell::Empty, |e| Cell::Bool(e.2)));
                    }
                    row.push(Cell::Empty);
                }
                Err(msg) => {
                    row.extend(std::iter::repeat_n(
                        Cell::Empty,
                        columns.len() - row.len() - 1,
                    ));
                    row.push(Cell::Text(msg.clone()));
                }
            }
            row
        })
        .collect();

    SweepTable {
        version: REPORT_VERSION,
        model: spec.model.clone(),
        fixed: spec.fixed.clone(),
        axes: spec.axes.clone(),
        columns,
        rows,
        crossings: crossings(spec, points),
    }
}

fn crossings(spec: &SweepSpec, points: &[SweepPoint]) -> Vec<Crossing> {
    let ep_tol = spec.settings.ep_tol;
    let mut out = Vec::new();
    let counts: Vec<usize> = spec.axes.iter().map(|a| a.count).collect();
    for (a, axis) in spec.axes.iter().enumerate() {
        let stride: usize = counts[a + 1..].iter().product();
        for (i, p) in points.iter().enumerate() {
            let along = (i / stride) % axis.count;
            if along + 1 >= axis.count {
                continue;
            }
            let q = &points[i + stride];
            let (Ok(dp), Ok(dq)) = (&p.outcome, &q.outcome) else {
                continue;
            };
            let margin = |d: &PointData| {
                d.pairs
                    .iter()
                    .map(|x| x.ep_distance)
                    .fold(f64::INFINITY, f64::min)
                    - ep_tol
            };
            let reason = if (margin(dp) > 0.0) != (margin(dq) > 0.0) {
                Some("ep_tol")
            } else if dp.pairs.iter().zip(&dq.pairs).any(|(x, y)| {
                let rigid = |c: &str| c == "real" || c == "imaginary";
                rigid(&x.energy_class) && rigid(&y.energy_class) && x.energy_class != y.energy_class
            }) {
                Some("class")
            } else {
                None
            };
            if let Some(reason) = reason {
                let at = spec
                    .axes
                    .iter()
                    .zip(&p.coords)
                    .enumerate()
                    .filter(|(b, _)| *b != a)
                    .map(|(_, (ax, v))| (ax.name.clone(), *v))
                    .collect();
                out.push(Crossing {
                    axis: axis.name.clone(),
                    index: along,
                    from: p.coords[a],
                    to: q.coords[a],
                    at,
                    reason: reason.into(),
                });
            }
        }
    }
    out
}

pub fn write_csv(table: &SweepTable, out: &mut dyn Write) -> Result<(), CliError> {
    {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(&table.columns).map_err(csv_error)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::csv))
                .map_err(csv_error)?;
        }
        w.flush()?;
    }
    writeln!(out, "# ep_crossings={}", table.crossings.len())?;
    for c in &table.crossings {
        let at: Vec<String> =
            c.at.iter()
                .map(|(k, v)| format!("{k}={}", format_float(*v)))
                .collect();
        writeln!(
            out,
            "# crossing axis={} index={} from={} to={} reason={}{}",
            c.axis,
            c.index,
            format_float(c.from),
            format_float(c.to),
            c.reason,
            if at.is_empty() {
                String::new()
            } else {
                format!(" at={}", at.join(";"))
            }
        )?;
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
