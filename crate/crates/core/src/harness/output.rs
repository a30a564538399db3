//! Trajectory CSV and JSON persistence.
//!
//! CSV columns are `t,f,grad_norm,accepted,queries` with LF line endings.
//! Floats use `{:.16e}` (17 significant digits, round-trips `f64`) and
//! `accepted` is `0` or `1`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::algorithms::{Trajectory, TrajectoryRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,f,grad_norm,accepted,queries";

pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (trajectory.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trajectory.rows {
        writeln!(out, "{},{:.16e},{:.16e},{},{}", r.t, r.f, r.grad_norm, u8::from(r.accepted), r.queries)
            .expect("writing to a String cannot fail");
    }
    out
}

/// One parsed CSV line: `(t, f, grad_norm, accepted, queries)`.
pub type CsvRow = (usize, f64, f64, bool, u64);

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.split('\n');
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::domain("trajectory CSV header mismatch"));
    }
    let bad = |line: &str| Error::domain(format!("malformed trajectory CSV line `{line}`"));
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(bad(line));
        }
        let accepted = match parts[3] {
            "0" => false,
            "1" => true,
            _ => return Err(bad(line)),
        };
        rows.push((
            parts[0].parse().map_err(|_| bad(line))?,
            parts[1].parse().map_err(|_| bad(line))?,
            parts[2].parse().map_err(|_| bad(line))?,
            accepted,
            parts[4].parse().map_err(|_| bad(line))?,
        ));
    }
    Ok(rows)
}

pub fn write_trajectory_csv(path: &Path, trajectory: &Trajectory) -> Result<()> {
    write_file(path, &trajectory_csv(trajectory))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    write_file(path, &to_json(value)?)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Row values a CSV line carries, for comparisons against the source.
pub fn csv_view(row: &TrajectoryRow) -> CsvRow {
    (row.t, row.f, row.grad_norm, row.accepted, row.queries)
}
