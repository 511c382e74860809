//! Report formatting and atomic file output.
//!
//! CSV: comma-separated, header row, LF line endings, 12-significant-digit
//! decimal formatting. JSON: UTF-8, stable key order (struct order plus
//! ordered maps). Files are written atomically (temp + rename) so partial
//! output never lands under the final name.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Format with 12 significant digits, plain decimal in a readable exponent
/// range, scientific otherwise; deterministic across runs.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// A verdict row in the machine-readable summary.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub task: String,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Verdict {
    pub fn new(task: &str, inequality: &str, lhs: f64, rhs: f64, holds: bool) -> Self {
        Verdict {
            task: task.to_string(),
            inequality: inequality.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            holds,
        }
    }
}

/// In-memory CSV table with fixed formatting.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width mismatch");
        self.rows.push(cells);
    }

    pub fn push_numbers(&mut self, cells: &[f64]) {
        self.push_row(cells.iter().map(|&x| fmt_sig(x)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Write bytes atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!(
        "tmp-{}",
        std::process::id()
    ));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    write_atomic(path, &body)
}

pub fn write_csv(path: &Path, table: &CsvTable) -> Result<()> {
    write_atomic(path, table.render().as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1.00000000000");
        assert_eq!(fmt_sig(0.101321183642), "0.101321183642");
        assert_eq!(fmt_sig(-2.5), "-2.50000000000");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert!(fmt_sig(1.0e-7).contains('e'));
        // 12 significant digits survive a round trip at this scale
        let x = 54.5981500331;
        assert_eq!(fmt_sig(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_rendering_uses_lf() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push_numbers(&[1.0, 0.5]);
        let s = t.render();
        assert_eq!(s, "a,b\n1.00000000000,0.500000000000\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn atomic_write_round_trip() {
        let dir = std::env::temp_dir().join(format!("plab-report-{}", std::process::id()));
        let path = dir.join("x.json");
        write_json(&path, &serde_json::json!({"k": 1})).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert!(body.contains("\"k\""));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
