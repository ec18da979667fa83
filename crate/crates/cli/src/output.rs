//! Output envelope: an ordered value tree rendered as JSON (sorted keys,
//! fixed float formatting) or projected to CSV. Identical inputs must give
//! byte-identical output, so every float goes through one formatter.

use std::fmt::Write as _;

/// Fixed 12-significant-digit formatting for every float that leaves the
/// program, in either format.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() || x.is_infinite() {
        return if x > 0.0 { "inf".into() } else if x < 0.0 { "-inf".into() } else { "nan".into() };
    }
    format!("{x:.11e}")
}

#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Str(String),
    UInt(u64),
    Float(f64),
    Bool(bool),
    List(Vec<Value>),
    Object(Vec<(String, Value)>),
}

impl Value {
    pub fn object() -> Value {
        Value::Object(Vec::new())
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        match self {
            Value::Object(entries) => entries.push((key.to_string(), value)),
            _ => panic!("set on a non-object value"),
        }
        self
    }
}

fn escape_json(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_json(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Null => out.push_str("null"),
        Value::Str(s) => escape_json(s, out),
        Value::UInt(v) => {
            let _ = write!(out, "{v}");
        }
        Value::Float(v) => {
            // JSON numbers accept exponent notation; keep the fixed format
            let _ = write!(out, "{}", fmt_float(*v));
        }
        Value::Bool(v) => {
            let _ = write!(out, "{v}");
        }
        Value::List(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                let _ = write!(out, "{pad}  ");
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{pad}]");
        }
        Value::Object(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut sorted: Vec<&(String, Value)> = entries.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            out.push_str("{\n");
            for (i, (key, item)) in sorted.iter().enumerate() {
                let _ = write!(out, "{pad}  ");
                escape_json(key, out);
                out.push_str(": ");
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < sorted.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{pad}}}");
        }
    }
}

pub fn to_json(value: &Value) -> String {
    let mut out = String::new();
    write_json(value, 0, &mut out);
    out.push('\n');
    out
}

/// One CSV table: a header plus rows of pre-formatted fields.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn to_csv(table: &Table) -> String {
    let mut out = String::new();
    out.push_str(
        &table
            .header
            .iter()
            .map(|f| csv_field(f))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Full command envelope.
pub struct Envelope {
    pub command: &'static str,
    pub parameters: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    pub table: Table,
}

impl Envelope {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut root = Value::object();
                root.set("command", Value::Str(self.command.to_string()));
                root.set("parameters", self.parameters.clone());
                root.set("results", self.results.clone());
                root.set(
                    "warnings",
                    Value::List(self.warnings.iter().map(|w| Value::Str(w.clone())).collect()),
                );
                to_json(&root)
            }
            Format::Csv => to_csv(&self.table),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted_and_floats_fixed() {
        let mut v = Value::object();
        v.set("zeta", Value::Float(1.320323631693739));
        v.set("alpha", Value::UInt(7));
        let s = to_json(&v);
        let alpha = s.find("\"alpha\"").unwrap();
        let zeta = s.find("\"zeta\"").unwrap();
        assert!(alpha < zeta);
        assert!(s.contains("1.32032363169e0"), "{s}");
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let mut t = Table::new(&["pattern", "value"]);
        t.push(vec!["0,2,6,8".into(), fmt_float(9.0)]);
        let s = to_csv(&t);
        assert_eq!(s, "pattern,value\n\"0,2,6,8\",9.00000000000e0\n");
    }

    #[test]
    fn float_format_is_twelve_significant_digits() {
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
        assert_eq!(fmt_float(58980.0), "5.89800000000e4");
        assert_eq!(fmt_float(-1.5), "-1.50000000000e0");
    }
}
