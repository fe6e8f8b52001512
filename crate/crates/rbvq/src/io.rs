//! Dataset CSV loading/saving and metrics CSV files.
//!
//! Dataset files are plain comma-separated numeric columns, optionally with
//! a header line and optionally with a trailing label column that gets
//! dropped on load. Metrics files follow the fixed schema in
//! [`MetricsRecord::CSV_HEADER`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rbvq_core::metrics::MetricsRecord;
use rbvq_core::stream::Dataset;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{row}: {msg}")]
    Parse {
        path: String,
        row: usize,
        msg: String,
    },
    #[error("{path}: no data rows")]
    Empty { path: String },
}

/// What to do with a trailing label column when loading a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    None,
    Last,
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

/// Loads a dataset CSV. Row numbers in errors are 1-based physical lines.
pub fn load_csv_dataset(
    path: &Path,
    has_header: bool,
    label: LabelColumn,
) -> Result<Dataset, IoError> {
    let file = File::open(path).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut data: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut rows = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|source| IoError::File {
            path: path_str(path),
            source,
        })?;
        if row == 1 && has_header {
            continue;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut cells: Vec<&str> = trimmed.split(',').collect();
        if label == LabelColumn::Last {
            if cells.len() < 2 {
                return Err(IoError::Parse {
                    path: path_str(path),
                    row,
                    msg: "cannot drop label column from a single-column row".into(),
                });
            }
            cells.pop();
        }
        match dim {
            None => dim = Some(cells.len()),
            Some(d) if d != cells.len() => {
                return Err(IoError::Parse {
                    path: path_str(path),
                    row,
                    msg: format!("ragged row: expected {d} columns, got {}", cells.len()),
                });
            }
            Some(_) => {}
        }
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| IoError::Parse {
                path: path_str(path),
                row,
                msg: format!("column {}: not a number: {cell:?}", col + 1),
            })?;
            if !v.is_finite() {
                return Err(IoError::Parse {
                    path: path_str(path),
                    row,
                    msg: format!("column {}: non-finite value", col + 1),
                });
            }
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(IoError::Empty {
            path: path_str(path),
        });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, dim.unwrap_or(0), data).map_err(|e| IoError::Parse {
        path: path_str(path),
        row: 0,
        msg: e.to_string(),
    })
}

/// Writes a dataset as headerless comma-separated numeric rows.
pub fn save_csv_dataset(path: &Path, ds: &Dataset) -> Result<(), IoError> {
    let file = File::create(path).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        for p in ds.points() {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    };
    write(&mut w).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })
}

pub fn write_metrics_csv(path: &Path, records: &[MetricsRecord]) -> Result<(), IoError> {
    let file = File::create(path).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "{}", MetricsRecord::CSV_HEADER)?;
        for r in records {
            writeln!(w, "{}", r.to_csv_row())?;
        }
        w.flush()
    };
    write(&mut w).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })
}

/// Reads any metrics-style CSV back: header names plus numeric rows.
pub fn read_metrics_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), IoError> {
    let file = File::open(path).map_err(|source| IoError::File {
        path: path_str(path),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut header: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|source| IoError::File {
            path: path_str(path),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if row == 1 {
            header = trimmed.split(',').map(str::to_owned).collect();
            continue;
        }
        let mut parsed = Vec::with_capacity(header.len());
        for (col, cell) in trimmed.split(',').enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| IoError::Parse {
                path: path_str(path),
                row,
                msg: format!("column {}: not a number: {cell:?}", col + 1),
            })?;
            parsed.push(v);
        }
        if parsed.len() != header.len() {
            return Err(IoError::Parse {
                path: path_str(path),
                row,
                msg: format!(
                    "ragged row: expected {} columns, got {}",
                    header.len(),
                    parsed.len()
                ),
            });
        }
        rows.push(parsed);
    }
    if header.is_empty() {
        return Err(IoError::Empty {
            path: path_str(path),
        });
    }
    Ok((header, rows))
}
