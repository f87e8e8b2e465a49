//! Check reports and their JSON/CSV serializations.
//!
//! Reports are fully deterministic: struct-ordered JSON keys, decimal
//! strings rendered at fixed significant digits, and grid-order rows. The
//! CSV schema is versioned via a leading `schema_version` column.

use serde::Serialize;

/// Version tag carried in the first CSV column and in JSON reports.
pub const CSV_SCHEMA_VERSION: &str = "1";

/// A report-only observation: a violated or disputed inequality recorded
/// with its worst point and true margin, without failing the check.
#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub label: String,
    pub point: Vec<String>,
    pub margin: String,
    /// Number of grid points sharing this observation.
    pub count: usize,
}

/// Outcome of one inequality check over a grid.
///
/// `worst_margin` is the minimum of (RHS - LHS) over the grid in the
/// check's stated margin convention: >= 0 means the inequality held with
/// room to spare, and the check passes iff `worst_margin >= -tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub grid: String,
    pub tolerance: String,
    pub worst_margin: String,
    pub worst_point: Vec<String>,
    pub passed: bool,
    pub schema_version: String,
    pub points_checked: usize,
    pub precision_bits: usize,
    /// Set when the check failed at the base precision and was rerun at 4x.
    pub retried_at_bits: Option<usize>,
    pub workers: usize,
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// A per-point result table for one check, emitted as RFC-4180 CSV with a
/// schema-version and check-name prefix on every row.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub check_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl CsvTable {
    pub fn new(check_name: &str, columns: &[&str]) -> Self {
        CsvTable {
            check_name: check_name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("schema_version,check");
        for c in &self.columns {
            out.push(',');
            out.push_str(&csv_quote(c));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(CSV_SCHEMA_VERSION);
            out.push(',');
            out.push_str(&csv_quote(&self.check_name));
            for field in row {
                out.push(',');
                out.push_str(&csv_quote(field));
            }
            out.push('\n');
        }
        out
    }
}
