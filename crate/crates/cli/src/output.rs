use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    /// One JSON object per line.
    Json,
}

/// Flat records rendered as a table, CSV or JSON lines.
pub struct Records {
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Records {
    pub fn new(header: Vec<&'static str>) -> Self {
        Records { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), crate::CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell))?;
                }
                w.flush()?;
            }
            Format::Json => {
                for row in &self.rows {
                    let obj: serde_json::Map<String, Value> =
                        self.header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect();
                    writeln!(out, "{}", Value::Object(obj))?;
                }
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
                for row in &cells {
                    for (w, c) in widths.iter_mut().zip(row) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(out, "{}", line(self.header.clone()))?;
                for row in &cells {
                    writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
                }
            }
        }
        Ok(())
    }
}
