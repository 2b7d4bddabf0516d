//! Sampled curves and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::params::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    LocalGammaVsXi,
    NonlocalLambdaVsAlpha,
    HVsXi,
    Profile,
}

impl CurveKind {
    /// Column names, in CSV order. The first column is the abscissa.
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            CurveKind::LocalGammaVsXi => &["xi", "gamma", "gamma_asym", "residual"],
            CurveKind::NonlocalLambdaVsAlpha => &["alpha", "xi", "h", "lambda", "lambda_asym", "residual"],
            CurveKind::HVsXi => &["xi", "h", "h_asym", "residual"],
            CurveKind::Profile => &["x", "w"],
        }
    }

    pub fn csv_header(&self) -> String {
        self.columns().join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub kind: CurveKind,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub tolerances: Tolerances,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub version: String,
}

impl TableMeta {
    pub fn new(kind: CurveKind, p: f64, q: Option<f64>, tolerances: Tolerances) -> Self {
        Self {
            kind,
            p,
            q,
            tolerances,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// One sample. Failed samples keep their abscissa, carry NaN elsewhere and
/// record the error.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub error: Option<String>,
}

impl Row {
    pub fn ok(values: Vec<f64>) -> Self {
        Self { values, error: None }
    }

    pub fn failed(abscissa: f64, width: usize, error: impl ToString) -> Self {
        let mut values = vec![f64::NAN; width];
        values[0] = abscissa;
        Self { values, error: Some(error.to_string()) }
    }

    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub meta: TableMeta,
    pub rows: Vec<Row>,
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl CurveTable {
    pub fn new(meta: TableMeta, rows: Vec<Row>) -> Result<Self> {
        let width = meta.kind.columns().len();
        if let Some(r) = rows.iter().find(|r| r.values.len() != width) {
            return Err(Error::Table(format!("row has {} values, expected {width}", r.values.len())));
        }
        if rows.windows(2).any(|w| !(w[0].values[0] < w[1].values[0])) {
            return Err(Error::Table("abscissae must be strictly increasing".into()));
        }
        Ok(Self { meta, rows })
    }

    pub fn kind(&self) -> CurveKind {
        self.meta.kind
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_valid()).count()
    }

    /// Values of one column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.kind().columns().iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    /// CSV with 17 significant digits, so values re-parse exactly.
    pub fn to_csv(&self) -> String {
        let mut out = self.kind().csv_header();
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.values.iter().map(|&v| fmt_value(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows of a CSV produced by [`CurveTable::to_csv`].
    pub fn parse_csv(kind: CurveKind, text: &str) -> Result<Vec<Vec<f64>>> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Table("empty CSV".into()))?;
        if header != kind.csv_header() {
            return Err(Error::Table(format!("unexpected header {header:?}")));
        }
        lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|f| f.parse::<f64>().map_err(|_| Error::Table(format!("bad number {f:?}"))))
                    .collect()
            })
            .collect()
    }

    /// `{meta: {...}, rows: [{column: value, ...}]}`; NaN becomes `null`.
    pub fn to_json(&self) -> Result<Value> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (name, &v) in self.kind().columns().iter().zip(&row.values) {
                    m.insert((*name).to_string(), if v.is_finite() { json!(v) } else { Value::Null });
                }
                if let Some(e) = &row.error {
                    m.insert("error".into(), json!(e));
                }
                Value::Object(m)
            })
            .collect();
        Ok(json!({ "meta": serde_json::to_value(&self.meta)?, "rows": rows }))
    }

    /// A single polyline of column `y` against column `x`, with axes.
    pub fn to_svg(&self, x: &str, y: &str) -> Result<String> {
        let xs = self.column(x).ok_or_else(|| Error::Table(format!("no column {x}")))?;
        let ys = self.column(y).ok_or_else(|| Error::Table(format!("no column {y}")))?;
        let points: Vec<(f64, f64)> = xs.into_iter().zip(ys).filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
        Ok(svg_polyline(&points, x, y))
    }
}

/// Self-contained SVG document with one polyline and labelled axes.
pub fn svg_polyline(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let range = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = range(&mut points.iter().map(|p| p.0));
    let (mut y0, mut y1) = range(&mut points.iter().map(|p| p.1));
    if !(x1 > x0) {
        x0 = if x0.is_finite() { x0 - 0.5 } else { 0.0 };
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y0 = if y0.is_finite() { y0 - 0.5 } else { 0.0 };
        y1 = y0 + 1.0;
    }
    let sx = |v: f64| M + (v - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{M}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{M}" y1="{M}" x2="{M}" y2="{b}"/></g>"#,
        b = H - M,
        r = W - M
    );
    let _ = writeln!(
        s,
        r#"<g font-family="sans-serif" font-size="12"><text x="{cx}" y="{ty}" text-anchor="middle">{x_label}</text><text x="14" y="{cy}" text-anchor="middle" transform="rotate(-90 14 {cy})">{y_label}</text><text x="{M}" y="{ty}" text-anchor="start">{x0:.4e}</text><text x="{r}" y="{ty}" text-anchor="end">{x1:.4e}</text><text x="{l}" y="{b}" text-anchor="end">{y0:.4e}</text><text x="{l}" y="{M}" text-anchor="end">{y1:.4e}</text></g>"#,
        cx = W / 2.0,
        ty = H - M + 30.0,
        cy = H / 2.0,
        r = W - M,
        l = M - 4.0,
        b = H - M,
    );
    let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    s.push_str("</svg>\n");
    s
}
