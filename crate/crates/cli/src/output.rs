use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, SCHEMA};

/// Writes tagged records: one JSON object per line, or CSV blocks separated by blank lines.
pub struct Emitter {
    format: Format,
    out: Box<dyn Write>,
    blocks: usize,
}

fn tag(kind: &str, value: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("record".into(), Value::String(kind.into()));
    match value {
        Value::Object(fields) => m.extend(fields),
        other => {
            m.insert("value".into(), other);
        }
    }
    m
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => serde_json::to_string(v).unwrap_or_default(),
    }
}

impl Emitter {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        Emitter { format, out, blocks: 0 }
    }

    /// A single record (reports, summaries, verdicts).
    pub fn record<T: Serialize>(&mut self, kind: &str, value: &T) -> io::Result<()> {
        let v = serde_json::to_value(value).map_err(io::Error::other)?;
        let m = tag(kind, v);
        match self.format {
            Format::Jsonl => self.line(&m),
            Format::Csv => {
                let header: Vec<String> = m.keys().cloned().collect();
                self.block(&header, std::slice::from_ref(&m))
            }
        }
    }

    /// Homogeneous rows; a single CSV block with the union of the keys.
    pub fn table<T: Serialize>(&mut self, kind: &str, rows: &[T]) -> io::Result<()> {
        let maps = rows
            .iter()
            .map(|r| serde_json::to_value(r).map(|v| tag(kind, v)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(io::Error::other)?;
        match self.format {
            Format::Jsonl => maps.iter().try_for_each(|m| self.line(m)),
            Format::Csv => {
                let mut header: Vec<String> = Vec::new();
                for m in &maps {
                    for k in m.keys() {
                        if !header.contains(k) {
                            header.push(k.clone());
                        }
                    }
                }
                self.block(&header, &maps)
            }
        }
    }

    fn line(&mut self, m: &Map<String, Value>) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, m).map_err(io::Error::other)?;
        writeln!(self.out)
    }

    fn block(&mut self, header: &[String], rows: &[Map<String, Value>]) -> io::Result<()> {
        if self.blocks > 0 {
            writeln!(self.out)?;
        }
        self.blocks += 1;
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header)?;
        for m in rows {
            w.write_record(header.iter().map(|k| m.get(k).map(cell).unwrap_or_default()))?;
        }
        w.flush()
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}
