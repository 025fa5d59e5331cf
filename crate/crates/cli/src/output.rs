//! Result tables and their three on-disk formats.
//!
//! Floats are written in shortest round-trip exponent form, so a table is a
//! pure function of its values.
//!
//! The plot-data format is two whitespace-separated columns per line, `x y`,
//! preceded by `#` comment lines naming the table and the two columns. When a
//! table has a grouping column, each group is a separate block introduced by
//! `# group <name>` and separated from the next by two blank lines.

use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    PlotData,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "plotdata" => Ok(Format::PlotData),
            "json-lines" => Ok(Format::JsonLines),
            _ => Err("expected csv, plotdata or json-lines".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Str(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:e}"),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn plot_text(&self) -> String {
        match self {
            Cell::Bool(b) => u8::from(*b).to_string(),
            Cell::Empty => "NaN".into(),
            other => other.text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| Value::from(v.to_string()), Value::from),
            Cell::Float(v) => Value::from(*v),
            Cell::Str(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Column names used for plot data: `x`, `y` and an optional group.
    pub plot: (&'static str, &'static str, Option<&'static str>),
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str], plot: (&'static str, &'static str)) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            plot: (plot.0, plot.1, None),
        }
    }

    pub fn grouped_by(mut self, column: &'static str) -> Self {
        self.plot.2 = Some(column);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| *c == name)
            .unwrap_or_else(|| panic!("table {} has no column {name}", self.name))
    }

    pub fn write(&self, format: Format, config: &ExperimentConfig, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::PlotData => self.write_plot(out),
            Format::JsonLines => self.write_json(config, out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()
    }

    fn write_plot(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let (x, y, group) = self.plot;
        let (xi, yi) = (self.column(x), self.column(y));
        writeln!(out, "# lamptree plot-data: {}", self.name)?;
        writeln!(out, "# columns: {x} {y}")?;
        let gi = group.map(|g| self.column(g));
        let mut current: Option<String> = None;
        for row in &self.rows {
            if let Some(gi) = gi {
                let g = row[gi].text();
                if current.as_ref() != Some(&g) {
                    if current.is_some() {
                        writeln!(out, "\n")?;
                    }
                    writeln!(out, "# group {g}")?;
                    current = Some(g);
                }
            }
            writeln!(out, "{} {}", row[xi].plot_text(), row[yi].plot_text())?;
        }
        Ok(())
    }

    /// First line is the experiment configuration, then one object per row.
    fn write_json(&self, config: &ExperimentConfig, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", config.to_json())?;
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), v.json()))
                .collect();
            writeln!(out, "{}", Value::Object(obj))?;
        }
        Ok(())
    }
}

/// Writes to `path`, or to `stdout` when no path is given.
pub fn emit(
    table: &Table,
    format: Format,
    config: &ExperimentConfig,
    path: Option<&str>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let io_err = |p: &str, e: std::io::Error| CliError::Io {
        path: p.to_string(),
        message: e.to_string(),
    };
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            table.write(format, config, &mut buf).map_err(|e| io_err(p, e))?;
            std::fs::write(p, buf).map_err(|e| io_err(p, e))
        }
        None => table.write(format, config, stdout).map_err(|e| io_err("<stdout>", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["n", "source", "L"], ("n", "L")).grouped_by("source");
        t.push(vec![10u64.into(), "a".into(), 1.5.into()]);
        t.push(vec![20u64.into(), "a".into(), Cell::Empty]);
        t.push(vec![10u64.into(), "b, c".into(), 0.25.into()]);
        t
    }

    #[test]
    fn csv_quotes_and_formats() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &ExperimentConfig::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,source,L\n10,a,1.5e0\n20,a,\n10,\"b, c\",2.5e-1\n");
    }

    #[test]
    fn plot_blocks() {
        let mut buf = Vec::new();
        sample().write(Format::PlotData, &ExperimentConfig::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# lamptree plot-data: demo\n# columns: n L\n# group a\n10 1.5e0\n20 NaN\n\n\n# group b, c\n10 2.5e-1\n"
        );
    }

    #[test]
    fn json_rows() {
        let mut buf = Vec::new();
        let mut c = ExperimentConfig::default();
        c.set("d", "3").unwrap();
        sample().write(Format::JsonLines, &c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(ExperimentConfig::from_json(lines[0]).unwrap(), c);
        assert_eq!(lines[2], r#"{"L":null,"n":20,"source":"a"}"#);
    }
}
