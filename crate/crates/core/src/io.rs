//! CSV output of grid solutions and a small reader for it.
//!
//! Values are written with the shortest decimal text that parses back to
//! the same floating-point number, so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{SystemModel, VACUUM_FLOOR};
use crate::scalar::Scalar;
use crate::scheme::GridSolution;

fn file_error(path: &Path, source: std::io::Error) -> Error {
    Error::File {
        path: path.to_path_buf(),
        source,
    }
}

/// The CSV text for `sol`: header `x,<names>`, one row per cell in
/// ascending `x`, in the model's output (primitive) variables.
pub fn csv_string<T: Scalar, M: SystemModel<T> + ?Sized>(sol: &GridSolution<T>, model: &M) -> String {
    let mut out = String::from("x");
    for name in model.output_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (j, cell) in sol.cells.iter().enumerate() {
        write!(out, "{}", sol.cell_center(j)).unwrap();
        for v in model.output_values(cell).as_slice() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv<T: Scalar, M: SystemModel<T> + ?Sized>(
    sol: &GridSolution<T>,
    model: &M,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, csv_string(sol, model)).map_err(|e| file_error(path, e))
}

/// A parsed CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(format!("row {}: {e}", i + 1)))?;
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    parse_csv(&text)
}

/// Per-column extrema of the written output variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary<T> {
    pub names: Vec<&'static str>,
    pub min: Vec<T>,
    pub max: Vec<T>,
    /// Cells whose density fell below the vacuum floor (pressureless only).
    pub near_vacuum: usize,
}

pub fn summarize<T: Scalar, M: SystemModel<T> + ?Sized>(sol: &GridSolution<T>, model: &M) -> Summary<T> {
    let names = model.output_names().to_vec();
    let k = names.len();
    let mut min = vec![T::infinity(); k];
    let mut max = vec![T::neg_infinity(); k];
    let mut near_vacuum = 0;
    for cell in &sol.cells {
        let out = model.output_values(cell);
        for c in 0..k {
            min[c] = min[c].min(out[c]);
            max[c] = max[c].max(out[c]);
        }
        if names.first() == Some(&"rho") && cell[0] < T::lit(VACUUM_FLOOR) {
            near_vacuum += 1;
        }
    }
    Summary {
        names,
        min,
        max,
        near_vacuum,
    }
}

impl<T: Scalar> Summary<T> {
    /// `name=[min, max]` pairs, space separated.
    pub fn ranges(&self) -> String {
        self.names
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(n, (lo, hi))| format!("{n}=[{lo}, {hi}]"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `base` with `_t<time>` inserted before the extension.
pub fn snapshot_path(base: &Path, time: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_t{time}.{ext}"),
        None => format!("{stem}_t{time}"),
    };
    base.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelKind, StateVector};
    use crate::scheme::BoundaryKind;
    use proptest::prelude::*;

    fn uniform_pressureless() -> GridSolution<f64> {
        let cell = StateVector::from_slice(&[1.0, 2.0]);
        GridSolution::new(0.0, 1.0, vec![cell; 4], BoundaryKind::Transmissive).unwrap()
    }

    #[test]
    fn header_and_first_row() {
        let text = csv_string(&uniform_pressureless(), &ModelKind::Pressureless);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,rho,u");
        assert_eq!(lines[1], "0.125,1,2");
        assert_eq!(lines[4], "0.875,1,2");
    }

    #[test]
    fn column_counts() {
        for model in ModelKind::ALL {
            let cells = vec![StateVector::<f64>::from_slice(&[1.0; 4][..model.dim()]); 4];
            let sol = GridSolution::new(0.0, 1.0, cells, BoundaryKind::Periodic).unwrap();
            let table = parse_csv(&csv_string(&sol, &model)).unwrap();
            let expected = 1 + model.output_names().len();
            assert_eq!(table.header.len(), expected);
            assert!(table.rows.iter().all(|r| r.len() == expected));
        }
    }

    #[test]
    fn write_to_missing_directory_is_file_error() {
        let err = write_csv(&uniform_pressureless(), &ModelKind::Pressureless, "/nonexistent/dir/a.csv").unwrap_err();
        assert!(matches!(err, Error::File { .. }));
        assert!(err.to_string().contains("/nonexistent/dir/a.csv"));
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(parse_csv("x,u\n1,2,3\n").is_err());
        assert!(parse_csv("x,u\n1,abc\n").is_err());
        assert!(parse_csv("").is_err());
    }

    #[test]
    fn summary_counts_vacuum_cells() {
        let cells = vec![
            StateVector::from_slice(&[1.0, 1.0]),
            StateVector::from_slice(&[0.0, 0.0]),
            StateVector::from_slice(&[2.0, -4.0]),
            StateVector::from_slice(&[1e-13, 0.0]),
        ];
        let sol = GridSolution::new(0.0, 1.0, cells, BoundaryKind::Transmissive).unwrap();
        let s = summarize(&sol, &ModelKind::Pressureless);
        assert_eq!(s.near_vacuum, 2);
        assert_eq!(s.min, vec![0.0, -2.0]);
        assert_eq!(s.max, vec![2.0, 1.0]);
        assert_eq!(s.ranges(), "rho=[0, 2] u=[-2, 1]");
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_path(Path::new("/a/r.csv"), 0.1), PathBuf::from("/a/r_t0.1.csv"));
        assert_eq!(snapshot_path(Path::new("r"), 2.0), PathBuf::from("r_t2"));
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(vals in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 4..20)) {
            let cells: Vec<_> = vals.iter().map(|&(a, b)| StateVector::from_slice(&[a, b])).collect();
            let sol = GridSolution::new(-1.0, 3.0, cells, BoundaryKind::Periodic).unwrap();
            let model = ModelKind::ModifiedBurgers;
            let table = parse_csv(&csv_string(&sol, &model)).unwrap();
            for (j, row) in table.rows.iter().enumerate() {
                prop_assert_eq!(row[0], sol.cell_center(j));
                prop_assert_eq!(row[1], vals[j].0);
                prop_assert_eq!(row[2], vals[j].1);
            }
        }
    }
}
