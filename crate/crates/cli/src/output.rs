//! Text and CSV renderings.

use std::io;

use kmrate_core::AxiomReport;

use crate::experiment::{CheckReport, ExperimentReport};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `n,residual,distance_to_reference`. The last column is left out
/// when `distances` is empty.
pub fn write_trace<W: io::Write>(out: W, residuals: &[f64], distances: &[f64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if distances.is_empty() {
        w.write_record(["n", "residual"])?;
        for (n, r) in residuals.iter().enumerate() {
            w.write_record([n.to_string(), float(*r)])?;
        }
    } else {
        w.write_record(["n", "residual", "distance_to_reference"])?;
        for (n, (r, d)) in residuals.iter().zip(distances).enumerate() {
            w.write_record([n.to_string(), float(*r), float(*d)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
}

fn checks_csv(w: &mut csv::Writer<Vec<u8>>, checks: &[AxiomReport]) -> csv::Result<()> {
    w.write_record(["check", "status", "samples", "skipped", "violations", "worst", "tolerance"])?;
    for c in checks {
        w.write_record([
            c.check.name().to_string(),
            if c.passed() { "pass" } else { "fail" }.to_string(),
            c.samples.to_string(),
            c.skipped.to_string(),
            c.violations.to_string(),
            format!("{:e}", c.worst_violation()),
            format!("{:e}", c.tolerance),
        ])?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

pub fn experiment_text(r: &ExperimentReport) -> String {
    let mut s = String::new();
    s += &format!("experiment {}\n", r.name);
    s += &format!("  space     {}\n", r.space);
    s += &format!("  operator  {}\n", r.operator);
    s += &format!("  schedule  {}\n", r.schedule);
    s += &format!("  d_C       {}\n", opt(r.d_c));
    s += &format!("  b         {}\n", opt(r.afp_radius_b));
    s += &format!("  steps     {} (final residual {:e})\n", r.steps, r.final_residual);
    if let Some(p) = &r.trace_path {
        s += &format!("  trace     {}\n", p.display());
    }
    if !r.rows.is_empty() {
        s += &format!("\n  {:<12} {:>8}  {:<22} {:>16}  valid\n", "epsilon", "n*", "bound", "value");
        for row in &r.rows {
            let n = row.n_star.map_or_else(|| "-".into(), |n| n.to_string());
            if row.bounds.is_empty() {
                s += &format!("  {:<12} {:>8}\n", row.eps, n);
            }
            for b in &row.bounds {
                s += &format!(
                    "  {:<12} {:>8}  {:<22} {:>16}  {}\n",
                    row.eps,
                    n,
                    b.bound.kind.tag(),
                    b.bound.to_string(),
                    b.validity.label()
                );
            }
            for note in &row.notes {
                s += &format!("  {:<12} note: {note}\n", row.eps);
            }
        }
    }
    s += "\n";
    for c in &r.checks {
        s += &format!("  {c}\n");
    }
    for note in &r.notes {
        s += &format!("  note: {note}\n");
    }
    s += &format!(
        "result {}: {} failed checks, {} failed bound rows\n",
        if r.passed() { "pass" } else { "FAIL" },
        r.failed_checks(),
        r.failed_rows()
    );
    s
}

/// Bound rows, a blank line, then the check table.
pub fn experiment_csv(r: &ExperimentReport) -> String {
    let rows = csv_string(|w| {
        w.write_record(["experiment", "epsilon", "n_star", "bound", "value", "log10", "valid"])?;
        for row in &r.rows {
            let n = row.n_star.map_or_else(String::new, |n| n.to_string());
            for b in &row.bounds {
                w.write_record([
                    r.name.clone(),
                    row.eps.to_string(),
                    n.clone(),
                    b.bound.kind.tag().to_string(),
                    b.bound.value.as_ref().map_or_else(String::new, |v| v.to_string()),
                    format!("{:.6}", b.bound.log10),
                    b.validity.label().to_string(),
                ])?;
            }
        }
        Ok(())
    });
    let checks = csv_string(|w| checks_csv(w, &r.checks));
    format!("{rows}\n{checks}")
}

pub fn checks_text(r: &CheckReport) -> String {
    let mut s = format!("checks {}\n  space     {}\n  operator  {}\n\n", r.name, r.space, r.operator);
    for c in &r.checks {
        s += &format!("  {c}\n");
    }
    let failed = r.checks.iter().filter(|c| !c.passed()).count();
    s += &format!("result {}: {} failed checks\n", if failed == 0 { "pass" } else { "FAIL" }, failed);
    s
}

pub fn checks_csv_string(r: &CheckReport) -> String {
    csv_string(|w| checks_csv(w, &r.checks))
}
