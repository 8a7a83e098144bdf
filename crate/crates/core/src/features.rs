//! Feature matrix files: one file per video, rows = frames, columns =
//! feature dimensions.
//!
//! Two layouts, distinguished by extension:
//! - `.tsv` / `.txt`: one frame per line, tab-separated decimal values
//!   (shortest round-trip rendering, so writes are byte-stable).
//! - `.bin`: little-endian `u32` row count, `u32` column count, then
//!   row-major `f64` values.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub fn write_features(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    match extension(path) {
        Layout::Text => write_text(path, rows),
        Layout::Binary => write_binary(path, rows),
    }
}

pub fn read_features(path: &Path) -> Result<Vec<Vec<f64>>> {
    match extension(path) {
        Layout::Text => read_text(path),
        Layout::Binary => read_binary(path),
    }
}

enum Layout {
    Text,
    Binary,
}

fn extension(path: &Path) -> Layout {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => Layout::Binary,
        _ => Layout::Text,
    }
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::Features {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn write_text(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", line.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}

fn read_text(path: &Path) -> Result<Vec<Vec<f64>>> {
    let content = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    for (lineno, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| bad(path, format!("line {}: bad value {tok:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(w) = width {
            if row.len() != w {
                return Err(bad(
                    path,
                    format!("line {}: expected {w} columns, got {}", lineno + 1, row.len()),
                ));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad(path, "no frames"));
    }
    Ok(rows)
}

fn write_binary(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(&(rows.len() as u32).to_le_bytes())?;
    out.write_all(&(cols as u32).to_le_bytes())?;
    for row in rows {
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_binary(path: &Path) -> Result<Vec<Vec<f64>>> {
    let bytes = fs::read(path)?;
    if bytes.len() < 8 {
        return Err(bad(path, "truncated header"));
    }
    let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let want = 8 + rows * cols * 8;
    if bytes.len() != want {
        return Err(bad(
            path,
            format!("expected {want} bytes for {rows}x{cols}, got {}", bytes.len()),
        ));
    }
    if rows == 0 || cols == 0 {
        return Err(bad(path, "no frames"));
    }
    let mut out = Vec::with_capacity(rows);
    let mut offset = 8;
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            row.push(f64::from_le_bytes(
                bytes[offset..offset + 8].try_into().unwrap(),
            ));
            offset += 8;
        }
        out.push(row);
    }
    Ok(out)
}
