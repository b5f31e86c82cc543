//! CSV and JSON renderings of the analysis reports.
//!
//! CSV output has one header row and LF line endings. Floating fields are
//! printed with 15 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::ProductTrace;
use crate::bounds::{BoundReport, BoundRow};
use crate::density::DensityReport;
use crate::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 15;

/// `v` with [`SIGNIFICANT_DIGITS`] significant digits; plain decimal for
/// moderate magnitudes, scientific notation otherwise.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = SIGNIFICANT_DIGITS - 1)
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

fn parse_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("malformed CSV: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    pub k: usize,
    pub count: u64,
    pub alpha_hat: f64,
    pub recip_sum: f64,
}

fn density_rows(report: &DensityReport, with_limit: bool) -> Vec<DensityRow> {
    (0..=report.degree)
        .map(|k| DensityRow {
            limit: with_limit.then_some(report.limit),
            k,
            count: report.counts[k],
            alpha_hat: report.alpha_hat[k],
            recip_sum: report.recip_sums[k],
        })
        .collect()
}

/// Columns `k,count,alpha_hat,recip_sum`; a leading `limit` column is added
/// when more than one report is written.
pub fn density_csv(reports: &[DensityReport]) -> String {
    let with_limit = reports.len() > 1;
    let header: &[&str] = if with_limit {
        &["limit", "k", "count", "alpha_hat", "recip_sum"]
    } else {
        &["k", "count", "alpha_hat", "recip_sum"]
    };
    let rows = reports.iter().flat_map(|r| density_rows(r, with_limit)).map(|row| {
        let mut fields = Vec::with_capacity(5);
        if let Some(limit) = row.limit {
            fields.push(limit.to_string());
        }
        fields.extend([
            row.k.to_string(),
            row.count.to_string(),
            fmt_float(row.alpha_hat),
            fmt_float(row.recip_sum),
        ]);
        fields
    });
    csv_string(header, rows)
}

pub fn parse_density_csv(text: &str) -> Result<Vec<DensityRow>> {
    parse_csv(text)
}

pub fn density_json(reports: &[DensityReport]) -> Value {
    let one = |r: &DensityReport| {
        json!({
            "limit": r.limit,
            "degree": r.degree,
            "total": r.total,
            "weighted_sum": r.weighted_sum,
            "recip_total": r.recip_total,
            "excluded": r.excluded,
            "rows": density_rows(r, false),
        })
    };
    match reports {
        [single] => one(single),
        many => Value::Array(many.iter().map(one).collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub x: u64,
    pub value: f64,
    pub normalized: f64,
}

pub fn trace_csv(traces: &[ProductTrace]) -> String {
    csv_string(
        &["x", "value", "normalized"],
        traces
            .iter()
            .map(|t| vec![t.x.to_string(), fmt_float(t.value), fmt_float(t.normalized)]),
    )
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    parse_csv(text)
}

pub fn trace_json(traces: &[ProductTrace]) -> Value {
    json!(traces)
}

/// Columns `n,phi_p,ratio`, keeping every `stride`-th row plus the minimizer.
pub fn bound_csv(rows: &[BoundRow], argmin: Option<u64>, stride: usize) -> String {
    let stride = stride.max(1);
    csv_string(
        &["n", "phi_p", "ratio"],
        rows.iter()
            .enumerate()
            .filter(|(i, r)| i % stride == 0 || Some(r.n) == argmin)
            .map(|(_, r)| vec![r.n.to_string(), r.phi_p.to_string(), fmt_float(r.ratio)]),
    )
}

pub fn parse_bound_csv(text: &str) -> Result<Vec<BoundRow>> {
    parse_csv(text)
}

pub fn bound_json(report: &BoundReport) -> Value {
    json!(report)
}

/// Numeric comparison of two CSV documents: identical headers and integer
/// fields, floating fields within `tol` relative.
pub fn csv_numerically_equal(a: &str, b: &str, tol: f64) -> bool {
    let (la, lb): (Vec<&str>, Vec<&str>) = (a.lines().collect(), b.lines().collect());
    if la.len() != lb.len() || la.first() != lb.first() {
        return false;
    }
    la.iter().zip(&lb).skip(1).all(|(x, y)| {
        let (fx, fy): (Vec<&str>, Vec<&str>) = (x.split(',').collect(), y.split(',').collect());
        fx.len() == fy.len()
            && fx.iter().zip(&fy).all(|(u, v)| {
                u == v
                    || match (u.parse::<f64>(), v.parse::<f64>()) {
                        (Ok(p), Ok(q)) => (p - q).abs() <= tol * p.abs().max(q.abs()),
                        _ => false,
                    }
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(fmt_float(0.5), "0.500000000000000");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_float(8.0 / 35.0), "0.228571428571429");
        assert_eq!(fmt_float(123.456), "123.456000000000");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.5e-9), "1.50000000000000e-9");
        for v in [0.1, 2.0 / 3.0, 1e-300, 6.02e23, -4.5] {
            let back: f64 = fmt_float(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-14 * v.abs());
        }
    }

    #[test]
    fn numeric_comparison() {
        let a = "x,value\n10,0.228571428571429\n";
        let b = "x,value\n10,0.228571428571428\n";
        assert!(csv_numerically_equal(a, b, 1e-12));
        assert!(!csv_numerically_equal(a, "x,value\n11,0.228571428571429\n", 1e-12));
        assert!(!csv_numerically_equal(a, "x,value\n10,0.2285\n", 1e-12));
    }
}
