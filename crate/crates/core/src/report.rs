//! Tabular output: `%.17g` numbers, CSV with LF line endings, and JSON with a
//! run manifest.

use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Formats `v` like C's `printf("%.17g", v)`, independent of locale.
pub fn fmt_g17(v: f64) -> String {
    fmt_g(v, 17)
}

/// `%.{precision}g`
pub fn fmt_g(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // the exponent after rounding to p significant digits
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }

    /// Reads a CSV field back: integers, then `%.17g` floats, then text.
    fn parse(field: &str) -> Cell {
        if field.is_empty() {
            return Cell::Empty;
        }
        if let Ok(v) = field.parse::<i64>() {
            return Cell::Int(v);
        }
        match field {
            "nan" => return Cell::Num(f64::NAN),
            "inf" => return Cell::Num(f64::INFINITY),
            "-inf" => return Cell::Num(f64::NEG_INFINITY),
            _ => {}
        }
        match field.parse::<f64>() {
            Ok(v) => Cell::Num(v),
            Err(_) => Cell::Text(field.to_string()),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&fmt_g17(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn from_csv(src: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(src.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| Error::Config(format!("bad CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Config(format!("bad CSV record: {e}")))?;
            rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(Table { columns, rows })
    }

    /// Rows as objects keyed by column name.
    pub fn rows_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// `{"manifest": {...}, "columns": [...], "rows": [...]}`
    pub fn to_json(&self, manifest: &Manifest) -> String {
        let doc = json!({
            "manifest": manifest.to_json(),
            "columns": self.columns,
            "rows": self.rows_json(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }
}

/// Differences between `expected` and `actual`, skipping `ignore` columns.
///
/// Numbers match when `|a - b| <= rel_tol * max(|a|, |b|)`; NaNs match each other.
pub fn diff_tables(expected: &Table, actual: &Table, ignore: &[&str], rel_tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if expected.columns != actual.columns {
        out.push(format!(
            "columns differ: expected [{}], got [{}]",
            expected.columns.join(","),
            actual.columns.join(",")
        ));
        return out;
    }
    if expected.rows.len() != actual.rows.len() {
        out.push(format!(
            "row count differs: expected {}, got {}",
            expected.rows.len(),
            actual.rows.len()
        ));
        return out;
    }
    for (i, (re, ra)) in expected.rows.iter().zip(&actual.rows).enumerate() {
        for ((col, a), b) in expected.columns.iter().zip(re).zip(ra) {
            if ignore.contains(&col.as_str()) {
                continue;
            }
            let same = match (a.as_f64(), b.as_f64()) {
                (Some(a), Some(b)) => {
                    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs())
                }
                _ => a.to_string() == b.to_string(),
            };
            if !same {
                out.push(format!("row {}, column {col}: expected `{a}`, got `{b}`", i + 1));
            }
        }
    }
    out
}

/// Run provenance attached to JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub config: Value,
    pub timestamp: u64,
    pub version: &'static str,
    pub extra: Map<String, Value>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Manifest {
            command: command.into(),
            config,
            timestamp,
            version: env!("CARGO_PKG_VERSION"),
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("version".into(), json!(self.version));
        obj.insert("timestamp".into(), json!(self.timestamp));
        obj.insert("config".into(), self.config.clone());
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (2.0, "2"),
            (1.0 / 3.0, "0.33333333333333331"),
            (1e-5, "1.0000000000000001e-05"),
            (1.5e-300, "1.5000000000000001e-300"),
            (1e17, "1e+17"),
            (12345678901234567.0, "12345678901234568"),
            (-0.0, "-0"),
            (0.0001, "0.0001"),
            (7.62360992, "7.6236099199999998"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g17(v), want, "{v:e}");
        }
        assert_eq!(fmt_g(f64::NAN, 17), "nan");
        assert_eq!(fmt_g(123.456, 4), "123.5");
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, 1.0 / 7.0, 6.02214076e23, -2.5e-9, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(["x", "re", "tag", "exact"]);
        t.push(vec![0.0.into(), 0.1.into(), "mrk4".into(), Cell::Empty]);
        t.push(vec![0.3.into(), (1.0 / 3.0).into(), "a,b".into(), 2.0.into()]);
        let s = t.to_csv();
        assert!(s.starts_with("x,re,tag,exact\n"));
        assert!(!s.contains('\r'));
        let back = Table::from_csv(&s).unwrap();
        assert_eq!(back.to_csv(), s);
        assert_eq!(back.rows[1][1].as_f64(), Some(1.0 / 3.0));
        assert_eq!(back.rows[1][2], Cell::Text("a,b".into()));
    }

    #[test]
    fn table_diff() {
        let mut a = Table::new(["x", "t"]);
        a.push(vec![1.0.into(), 0.5.into()]);
        let mut b = a.clone();
        assert!(diff_tables(&a, &b, &[], 0.0).is_empty());
        b.rows[0][1] = 0.7.into();
        assert_eq!(diff_tables(&a, &b, &[], 0.0).len(), 1);
        assert!(diff_tables(&a, &b, &["t"], 0.0).is_empty());
        b.rows[0][0] = (1.0 + 1e-15).into();
        assert!(diff_tables(&a, &b, &["t"], 1e-12).is_empty());
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(["x", "a"]);
        t.push(vec![1.0.into(), f64::NAN.into()]);
        let s = t.to_json(&Manifest::new("solve", json!({"h": 0.5})));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0]["a"], Value::Null);
        assert_eq!(v["manifest"]["config"]["h"], json!(0.5));
        let keys: Vec<_> = v["rows"][0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["x", "a"]);
    }
}
