//! Trace CSV: fixed header, one row per iterate, reals with 17 significant
//! digits so that every double survives a write/parse round trip.

use std::io::{self, Write};

use rcg::IterateRecord;

pub const HEADER: &str =
    "k,f,grad_norm,alpha,beta,c,used_scaling,dir_deriv,armijo_ok,curvature_ok,\
descent_ok,ordering_ok,beta_positive_ok,zoutendijk_partial";

/// The columns of one trace row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub used_scaling: bool,
    pub dir_deriv: f64,
    pub armijo_ok: bool,
    pub curvature_ok: bool,
    pub descent_ok: bool,
    pub ordering_ok: bool,
    pub beta_positive_ok: bool,
    pub zoutendijk_partial: f64,
}

impl From<&IterateRecord> for Row {
    fn from(r: &IterateRecord) -> Self {
        Row {
            k: r.k,
            f: r.f,
            grad_norm: r.grad_norm,
            alpha: r.alpha,
            beta: r.beta,
            c: r.c,
            used_scaling: r.used_scaling,
            dir_deriv: r.dir_deriv,
            armijo_ok: r.armijo_ok,
            curvature_ok: r.curvature_ok,
            descent_ok: r.descent_ok,
            ordering_ok: r.ordering_ok,
            beta_positive_ok: r.beta_positive_ok,
            zoutendijk_partial: r.zoutendijk_partial,
        }
    }
}

/// `{:.16e}`: one digit before the point and sixteen after.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(mut w: W, trace: &[IterateRecord]) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in trace {
        let r = Row::from(r);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            real(r.f),
            real(r.grad_norm),
            real(r.alpha),
            real(r.beta),
            real(r.c),
            r.used_scaling,
            real(r.dir_deriv),
            r.armijo_ok,
            r.curvature_ok,
            r.descent_ok,
            r.ordering_ok,
            r.beta_positive_ok,
            real(r.zoutendijk_partial),
        )?;
    }
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| parse_row(line).map_err(|e| format!("row {}: {e}", i + 1)))
        .collect()
}

fn parse_row(line: &str) -> Result<Row, String> {
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != 14 {
        return Err(format!("expected 14 columns, got {}", cols.len()));
    }
    let r = |i: usize| {
        cols[i]
            .parse::<f64>()
            .map_err(|e| format!("column {i}: {e}"))
    };
    let b = |i: usize| {
        cols[i]
            .parse::<bool>()
            .map_err(|e| format!("column {i}: {e}"))
    };
    Ok(Row {
        k: cols[0].parse().map_err(|e| format!("column 0: {e}"))?,
        f: r(1)?,
        grad_norm: r(2)?,
        alpha: r(3)?,
        beta: r(4)?,
        c: r(5)?,
        used_scaling: b(6)?,
        dir_deriv: r(7)?,
        armijo_ok: b(8)?,
        curvature_ok: b(9)?,
        descent_ok: b(10)?,
        ordering_ok: b(11)?,
        beta_positive_ok: b(12)?,
        zoutendijk_partial: r(13)?,
    })
}
