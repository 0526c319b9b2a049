use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::AccuracyTable;
use crate::classifier::SplitAccuracy;
use crate::colorspace::ColorSpace;
use crate::error::{Error, Result};

/// `colorspace,dim5,dim10,...` then one row per space, two decimals per cell.
pub fn render_csv(table: &AccuracyTable) -> String {
    let mut out = String::from("colorspace");
    for d in &table.dims {
        write!(out, ",dim{d}").unwrap();
    }
    out.push('\n');
    for (space, row) in table.spaces.iter().zip(&table.cells) {
        out.push_str(space.tag());
        for cell in row {
            write!(out, ",{:.2}", cell.mean).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Long-format per-split values: `colorspace,dim,split,accuracy`.
pub fn render_splits_csv(table: &AccuracyTable) -> String {
    let mut out = String::from("colorspace,dim,split,accuracy\n");
    for (space, row) in table.spaces.iter().zip(&table.cells) {
        for cell in row {
            for (s, acc) in cell.per_split.iter().enumerate() {
                writeln!(out, "{},{},{},{}", space.tag(), cell.dim, s + 1, acc).unwrap();
            }
        }
    }
    out
}

/// `accuracy.csv` -> `accuracy_splits.csv`.
pub fn splits_path(table_path: &Path) -> PathBuf {
    let stem = table_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "accuracy".into());
    table_path.with_file_name(format!("{stem}_splits.csv"))
}

/// Writes the table and its per-split sidecar.
pub fn emit_csv(table: &AccuracyTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if table.cells.len() != table.spaces.len() || table.cells.iter().any(|r| r.len() != table.dims.len()) {
        return Err(Error::Parameter("accuracy table is incomplete".into()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, render_csv(table)).map_err(|e| Error::io(path, e))?;
    let side = splits_path(path);
    std::fs::write(&side, render_splits_csv(table)).map_err(|e| Error::io(&side, e))
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parameter(format!("{}: {e}", path.display()))
}

/// Reads a table written by [`emit_csv`]; per-split values come from the
/// sidecar when it exists.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<AccuracyTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.get(0) != Some("colorspace") {
        return Err(csv_err(path, "first column must be 'colorspace'"));
    }
    let dims = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("dim")
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| csv_err(path, format!("bad column '{h}'")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut spaces = Vec::new();
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let space: ColorSpace = rec.get(0).unwrap_or_default().parse()?;
        let row = rec
            .iter()
            .skip(1)
            .zip(&dims)
            .map(|(v, &dim)| {
                let mean = v.parse::<f64>().map_err(|e| csv_err(path, e))?;
                Ok(SplitAccuracy {
                    dim,
                    mean,
                    per_split: Vec::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != dims.len() {
            return Err(csv_err(path, format!("row {space} is incomplete")));
        }
        spaces.push(space);
        cells.push(row);
    }

    let side = splits_path(path);
    if side.is_file() {
        let mut rdr = csv::Reader::from_path(&side).map_err(|e| csv_err(&side, e))?;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_err(&side, e))?;
            let space: ColorSpace = rec.get(0).unwrap_or_default().parse()?;
            let dim: usize = rec.get(1).unwrap_or_default().parse().map_err(|e| csv_err(&side, e))?;
            let acc: f64 = rec.get(3).unwrap_or_default().parse().map_err(|e| csv_err(&side, e))?;
            let r = spaces.iter().position(|&s| s == space);
            let c = dims.iter().position(|&d| d == dim);
            match (r, c) {
                (Some(r), Some(c)) => cells[r][c].per_split.push(acc),
                _ => return Err(csv_err(&side, format!("unknown cell {space}/{dim}"))),
            }
        }
    }

    Ok(AccuracyTable { spaces, dims, cells })
}
