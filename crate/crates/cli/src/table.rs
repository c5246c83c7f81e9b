//! Quadratic against exponential: the CAT(0) bounds next to the exponential
//! bound for general hyperbolic spaces.

use kmrate_core::rates::{cat0_bound, cat0_bound_derived, cat0_constant_bound, ishikawa_bound, RateBound, ThetaFn};

#[derive(Debug, Clone, PartialEq)]
pub struct TableParams {
    pub eps: Vec<f64>,
    /// Diameter, used for every column.
    pub d: f64,
    pub k: u64,
    pub lambda: f64,
    pub theta: ThetaFn,
    /// Adds the `4(d+1)²/ε²` column.
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub eps: f64,
    pub ishikawa: RateBound,
    pub cat0: RateBound,
    pub cat0_constant: RateBound,
    pub cat0_derived: Option<RateBound>,
}

impl TableRow {
    /// `log10` of exponential over quadratic (constant step).
    pub fn log10_gap(&self) -> f64 {
        self.ishikawa.log10 - self.cat0_constant.log10
    }
}

pub fn comparison_table(p: &TableParams) -> kmrate_core::Result<Vec<TableRow>> {
    p.eps
        .iter()
        .map(|&eps| {
            Ok(TableRow {
                eps,
                ishikawa: ishikawa_bound(eps, p.d, p.k)?,
                cat0: cat0_bound(eps, p.d, &p.theta)?,
                cat0_constant: cat0_constant_bound(eps, p.d, p.lambda)?,
                cat0_derived: if p.derived { Some(cat0_bound_derived(eps, p.d, &p.theta)?) } else { None },
            })
        })
        .collect()
}

pub fn render_text(rows: &[TableRow], derived: bool) -> String {
    let mut s = format!("{:<10} {:>16} {:>16} {:>16}", "epsilon", "exponential", "cat0", "cat0-constant");
    if derived {
        s += &format!(" {:>16}", "cat0-derived");
    }
    s += &format!(" {:>10}\n", "log10-gap");
    for r in rows {
        s += &format!(
            "{:<10} {:>16} {:>16} {:>16}",
            r.eps,
            r.ishikawa.to_string(),
            r.cat0.to_string(),
            r.cat0_constant.to_string()
        );
        if let Some(d) = &r.cat0_derived {
            s += &format!(" {:>16}", d.to_string());
        }
        s += &format!(" {:>10.1}\n", r.log10_gap());
    }
    s
}

/// Exact digits wherever they exist; the exponential column also carries
/// its `log10`.
pub fn render_csv(rows: &[TableRow], derived: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["epsilon", "exponential", "exponential_log10", "cat0", "cat0_constant"];
    if derived {
        header.push("cat0_derived");
    }
    header.push("log10_gap");
    w.write_record(&header).expect("writing to memory");
    let digits = |b: &RateBound| b.value.as_ref().map_or_else(String::new, |v| v.to_string());
    for r in rows {
        let mut rec = vec![
            r.eps.to_string(),
            digits(&r.ishikawa),
            format!("{:.6}", r.ishikawa.log10),
            digits(&r.cat0),
            digits(&r.cat0_constant),
        ];
        if let Some(d) = &r.cat0_derived {
            rec.push(digits(d));
        }
        rec.push(format!("{:.6}", r.log10_gap()));
        w.write_record(&rec).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
}
