//! CSV rows and the human-readable rate summary.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use regfem_core::analysis::{ConvergenceRow, RatePrediction, H1_SLOPE_TOL, L2_SLOPE_TOL};

use crate::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "level",
    "h",
    "h0",
    "eps",
    "dofs",
    "err_l2",
    "err_h1",
    "eoc_l2",
    "eoc_h1",
    "assemble_ms",
    "solve_ms",
];

fn record(row: &ConvergenceRow) -> [String; 11] {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    [
        row.level.to_string(),
        format!("{:e}", row.h),
        format!("{:e}", row.h0),
        format!("{:e}", row.epsilon),
        row.n_dofs.to_string(),
        format!("{:e}", row.err_l2),
        format!("{:e}", row.err_h1),
        opt(row.eoc_l2),
        opt(row.eoc_h1),
        format!("{:.3}", row.assemble_ms),
        format!("{:.3}", row.solve_ms),
    ]
}

/// Header plus one line per row; the first row has empty EOC fields.
pub fn write_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Usage("no rows to write".into()));
    }
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, file)
}

/// Fitted DoF slopes of the finest level against the prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCheck {
    pub l2_fitted: Option<f64>,
    pub h1_fitted: Option<f64>,
    pub l2_pass: bool,
    pub h1_pass: bool,
}

impl RateCheck {
    pub fn new(rows: &[ConvergenceRow], prediction: &RatePrediction) -> Self {
        let last = rows.last();
        let l2_fitted = last.and_then(|r| r.slope_vs_dofs_l2);
        let h1_fitted = last.and_then(|r| r.slope_vs_dofs_h1);
        Self {
            l2_fitted,
            h1_fitted,
            l2_pass: l2_fitted.is_some_and(|s| prediction.l2_within(s)),
            h1_pass: h1_fitted.is_some_and(|s| prediction.h1_within(s)),
        }
    }

    pub fn passed(&self) -> bool {
        self.l2_pass && self.h1_pass
    }
}

/// Two lines, e.g. `L2 slope fitted -0.752, predicted -0.75 (tol 0.10): PASS`.
pub fn emit_summary(rows: &[ConvergenceRow], prediction: &RatePrediction) -> String {
    let check = RateCheck::new(rows, prediction);
    let mut s = String::new();
    let lines = [
        ("L2", check.l2_fitted, prediction.expected_l2_dof_slope, L2_SLOPE_TOL, check.l2_pass),
        ("H1", check.h1_fitted, prediction.expected_h1_dof_slope, H1_SLOPE_TOL, check.h1_pass),
    ];
    for (norm, fitted, predicted, tol, pass) in lines {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let fitted = fitted.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
        let _ = writeln!(s, "{norm} slope fitted {fitted}, predicted {predicted:.3} (tol {tol:.2}): {verdict}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use regfem_core::analysis::predicted_rates;
    use regfem_core::mesh::DomainCase;

    fn row(level: u32, dofs: usize, err: f64) -> ConvergenceRow {
        ConvergenceRow {
            level,
            h: 0.125,
            h0: 0.04,
            epsilon: 0.125,
            n_dofs: dofs,
            err_l2: err,
            err_h1: err.sqrt(),
            eoc_l2: None,
            eoc_h1: None,
            slope_vs_dofs_l2: None,
            slope_vs_dofs_h1: None,
            assemble_ms: 0.0,
            solve_ms: 0.0,
            rhs_sum: 0.0,
            interface_load: 0.0,
            interface_measure: 0.0,
            cg_iterations: 0,
            cg_relative_residual: 0.0,
        }
    }

    #[test]
    fn one_row_gives_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[row(0, 81, 1e-3)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[1].contains(",,"), "empty EOC fields: {}", lines[1]);
    }

    #[test]
    fn summary_reports_slopes_and_verdicts() {
        let p = predicted_rates(DomainCase::Square, 1.0).unwrap();
        let mut r = row(3, 1000, 1e-3);
        r.slope_vs_dofs_l2 = Some(-0.752);
        r.slope_vs_dofs_h1 = Some(-0.4);
        let text = emit_summary(&[r], &p);
        assert!(text.contains("L2 slope fitted -0.752, predicted -0.750"), "{text}");
        assert!(text.lines().next().unwrap().ends_with("PASS"));
        assert!(text.lines().nth(1).unwrap().ends_with("FAIL"));
    }

    #[test]
    fn summary_without_fit_fails() {
        let p = predicted_rates(DomainCase::Square, 1.0).unwrap();
        let rows = [row(0, 81, 1e-3)];
        assert!(!RateCheck::new(&rows, &p).passed());
        assert!(emit_summary(&rows, &p).contains("n/a"));
    }
}
