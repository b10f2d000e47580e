use std::io::Write;

use serde::Serialize;

use crate::export::fmt_f64;

/// Default absolute slack added on top of theoretical bounds.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub step: usize,
    pub observed: f64,
    pub bound: f64,
    /// `bound − observed`.
    pub margin: f64,
}

impl BoundRow {
    pub fn new(step: usize, observed: f64, bound: f64) -> Self {
        Self {
            step,
            observed,
            bound,
            margin: bound - observed,
        }
    }
}

/// Observed quantities against their theoretical upper bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub tol: f64,
    /// Some margin is below `−tol`.
    pub violated: bool,
    pub worst_margin: f64,
}

impl BoundReport {
    pub fn from_rows(rows: Vec<BoundRow>, tol: f64) -> Self {
        let worst_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        let violated = rows.iter().any(|r| !(r.margin >= -tol));
        Self {
            rows,
            tol,
            violated,
            worst_margin,
        }
    }

    /// Row with the smallest margin.
    pub fn worst_row(&self) -> Option<&BoundRow> {
        self.rows.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,observed,bound,margin")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.step,
                fmt_f64(r.observed),
                fmt_f64(r.bound),
                fmt_f64(r.margin)
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            violated: self.violated,
            worst_margin: self.worst_margin,
            convention_selected: None,
        }
    }
}

/// JSON summary written next to a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub violated: bool,
    pub worst_margin: f64,
    pub convention_selected: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violation_flag_follows_tolerance() {
        let r = BoundReport::from_rows(
            vec![BoundRow::new(1, 1.0, 2.0), BoundRow::new(2, 1.0 + 5e-10, 1.0)],
            1e-9,
        );
        assert!(!r.violated);
        assert_eq!(r.worst_row().unwrap().step, 2);
        let r = BoundReport::from_rows(vec![BoundRow::new(1, 1.1, 1.0)], 1e-9);
        assert!(r.violated);
        assert!((r.worst_margin + 0.1).abs() < 1e-15);
    }

    #[test]
    fn nan_counts_as_violation() {
        let r = BoundReport::from_rows(vec![BoundRow::new(1, f64::NAN, 1.0)], 1e-9);
        assert!(r.violated);
    }

    #[test]
    fn csv_header() {
        let r = BoundReport::from_rows(vec![BoundRow::new(3, 0.25, 0.5)], 1e-9);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "n,observed,bound,margin\n3,2.5000000000000000e-1,5.0000000000000000e-1,2.5000000000000000e-1\n"
        );
    }
}
