//! CSV tables and a TOML summary, written with fixed formatting so that
//! identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Seventeen significant digits; `inf` for the extended value.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One CSV file: a header line and rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        writeln!(out, "{}", line(&self.header)).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", line(r)).unwrap();
        }
        out
    }
}

/// Scalar entries of the summary file.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    Floats(Vec<f64>),
    Strs(Vec<String>),
}

impl Field {
    fn render(&self) -> String {
        let float = |v: f64| {
            if v.is_infinite() {
                if v > 0.0 { "inf" } else { "-inf" }.to_string()
            } else if v.is_nan() {
                "nan".to_string()
            } else {
                format!("{v:.16e}")
            }
        };
        let string = |s: &str| toml::Value::String(s.to_string()).to_string();
        match self {
            Field::Str(s) => string(s),
            Field::Float(v) => float(*v),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Floats(v) => format!("[{}]", v.iter().map(|&x| float(x)).collect::<Vec<_>>().join(", ")),
            Field::Strs(v) => format!("[{}]", v.iter().map(|s| string(s)).collect::<Vec<_>>().join(", ")),
        }
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Str(s)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v as i64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field::Floats(v)
    }
}

impl From<Vec<String>> for Field {
    fn from(v: Vec<String>) -> Self {
        Field::Strs(v)
    }
}

/// Everything one command produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub seeds: Vec<u64>,
    pub tolerances: Vec<(String, Field)>,
    pub results: Vec<(String, Field)>,
    pub tables: Vec<Table>,
    /// Further files as `(name, contents)`.
    pub files: Vec<(String, String)>,
    /// One-line outcome printed to stdout.
    pub verdict: Option<String>,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            ..Default::default()
        }
    }

    pub fn tolerance(&mut self, key: &str, v: impl Into<Field>) -> &mut Self {
        self.tolerances.push((key.to_string(), v.into()));
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Field>) -> &mut Self {
        self.results.push((key.to_string(), v.into()));
        self
    }

    pub fn table(&mut self, t: Table) -> &mut Self {
        self.tables.push(t);
        self
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str("[run]\n");
        writeln!(out, "tool = {}", Field::from("harmonica").render()).unwrap();
        writeln!(out, "version = {}", Field::from(env!("CARGO_PKG_VERSION")).render()).unwrap();
        writeln!(out, "command = {}", Field::from(self.command.as_str()).render()).unwrap();
        writeln!(out, "threads = 1").unwrap();
        writeln!(
            out,
            "seeds = [{}]",
            self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
        )
        .unwrap();
        let files: Vec<String> = self
            .tables
            .iter()
            .map(|t| format!("{}.csv", t.name))
            .chain(self.files.iter().map(|f| f.0.clone()))
            .collect();
        writeln!(out, "files = {}", Field::Strs(files).render()).unwrap();
        for (title, entries) in [("tolerances", &self.tolerances), ("results", &self.results)] {
            writeln!(out, "\n[{title}]").unwrap();
            for (k, v) in entries {
                writeln!(out, "{k} = {}", v.render()).unwrap();
            }
        }
        out
    }

    /// Writes every table and `summary.toml` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents)?;
        }
        std::fs::write(dir.join("summary.toml"), self.summary())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        assert_eq!(num(0.25), "2.5000000000000000e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        let mut t = Table::new("t", &["id", "value"]);
        t.push(vec!["1,2".into(), num(1.0)]);
        assert_eq!(t.to_csv(), "id,value\n\"1,2\",1.0000000000000000e0\n");
    }

    #[test]
    fn summary_is_valid_toml() {
        let mut r = Report::new("capacity --space path5".into());
        r.seeds.push(7);
        r.tolerance("direct", 1e-12).result("capacity", 0.5).result("ok", true);
        r.result("inf", f64::INFINITY).result("list", vec![1.0, 2.0]);
        let v: toml::Table = toml::from_str(&r.summary()).unwrap();
        assert_eq!(v["results"]["capacity"].as_float(), Some(0.5));
        assert_eq!(v["run"]["seeds"].as_array().unwrap().len(), 1);
    }
}
