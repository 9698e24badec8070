//! Rectangular numeric results with a JSON metadata block.

use std::fmt::Write as _;

use serde_json::{Map, Value};

/// Significant digits kept when serializing numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format `{other}` (expected csv or json)")),
        }
    }
}

/// A table entry. Integers such as seeds are kept exact.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl Cell {
    fn text(self) -> String {
        match self {
            Cell::Num(x) => format_number(x),
            Cell::Int(i) => i.to_string(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(i) => Value::from(i),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Map<String, Value>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new(), metadata: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: Vec<f64>) {
        self.push(row.into_iter().map(Cell::Num).collect());
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// First line `# {metadata}`, then the header and one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut meta = self.metadata.clone();
        meta.insert("columns".into(), self.columns.clone().into());
        writeln!(out, "# {}", Value::Object(meta)).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.text()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> =
            self.rows.iter().map(|r| Value::Array(r.iter().map(|c| c.json()).collect())).collect();
        let doc = serde_json::json!({
            "metadata": Value::Object(self.metadata.clone()),
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).unwrap();
        s.push('\n');
        s
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap()
}

/// Shortest text for the rounded value, in exponent form outside
/// `[1e-5, 1e15)`; `inf`, `-inf` and `nan` spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round_sig(x);
        // avoid "-0"
        if r == 0.0 {
            "0".into()
        } else if !(1e-5..1e15).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1e-20 / 3.0), "3.33333333333e-21");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()]);
        t.meta("tool", "spinlab");
        t.push(vec![Cell::Num(1.0), Cell::Int(u64::MAX)]);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# {"));
        let meta: Value = serde_json::from_str(&lines[0][2..]).unwrap();
        assert_eq!(meta["columns"], serde_json::json!(["a", "b"]));
        assert_eq!(&lines[1..], ["a,b", "1,18446744073709551615"]);
    }

    #[test]
    fn json_maps_non_finite_to_null() {
        let mut t = ResultTable::new(vec!["x".into()]);
        t.push_f64(vec![f64::INFINITY]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
    }
}
