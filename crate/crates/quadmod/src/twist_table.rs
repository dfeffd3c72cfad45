//! Tabulated twist sequences as CSV.

use std::io::Write;

use quadmod_core::twist::{self, TwistPlan};
use quadmod_core::{TwistError, C64};

use crate::error::CliError;

pub const HEADER: [&str; 9] = [
    "n", "l1_re", "l1_im", "l2_re", "l2_im", "l3_re", "l3_im", "error", "sum_residual",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistRow {
    /// `None` for the limit row.
    pub n: Option<u64>,
    pub multipliers: [C64; 3],
    pub error: f64,
    pub sum_residual: f64,
}

/// `1, 2, 4, …, n_max` when `geometric`, else `1..=n_max`.
pub fn grid(n_max: u64, geometric: bool) -> Vec<u64> {
    if geometric {
        twist::geometric_grid(n_max)
    } else {
        (1..=n_max).collect()
    }
}

/// One row per `n`, then the limit `(1, 1, λ)`.
pub fn rows(plan: &TwistPlan, ns: &[u64]) -> Result<Vec<TwistRow>, TwistError> {
    let mut out = Vec::with_capacity(ns.len() + 1);
    for &n in ns {
        let s = twist::twist_state(plan, n)?;
        out.push(TwistRow {
            n: Some(n),
            multipliers: s.triple.to_array(),
            error: twist::limit_distance(plan, &s),
            sum_residual: s.sum_residual(),
        });
    }
    let one = C64::new(1.0, 0.0);
    out.push(TwistRow {
        n: None,
        multipliers: [one, one, plan.limit_lambda],
        error: 0.0,
        sum_residual: 0.0,
    });
    Ok(out)
}

fn float(x: f64) -> Result<String, CliError> {
    if !x.is_finite() {
        return Err(CliError::Numeric("non-finite value in twist table".into()));
    }
    Ok(format!("{x:.16e}"))
}

pub fn write_csv<W: Write>(out: W, rows: &[TwistRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::io("writing CSV", e.into());
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.n.map_or_else(|| "inf".to_owned(), |n| n.to_string())];
        for m in r.multipliers {
            rec.push(float(m.re)?);
            rec.push(float(m.im)?);
        }
        rec.push(float(r.error)?);
        rec.push(float(r.sum_residual)?);
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("writing CSV", e))
}
