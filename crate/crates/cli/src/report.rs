//! Report assembly and rendering. Every float goes through [`num`] so the
//! text and JSON forms print the same 12-significant-digit value.

use std::fmt::Write;

use labp::{Graph, HalfInt};
use serde_json::{json, Map, Value};

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn half(h: HalfInt) -> Value {
    Value::String(h.to_string())
}

pub fn edge_label(g: &Graph, k: usize) -> String {
    let (u, v) = g.edge(k);
    format!("{u}-{v}")
}

pub struct Report {
    pub command: &'static str,
    pub input: Value,
    pub results: Map<String, Value>,
    pub certificates: Map<String, Value>,
    pub notices: Vec<String>,
    pub certified: bool,
}

impl Report {
    pub fn new(command: &'static str, g: &Graph) -> Self {
        Report {
            command,
            input: json!({
                "vertices": g.n_vertices(),
                "edges": g.n_edges(),
                "bipartite": g.bipartition().is_some(),
            }),
            results: Map::new(),
            certificates: Map::new(),
            notices: Vec::new(),
            certified: true,
        }
    }

    pub fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn certificate(&mut self, key: &str, value: Value) {
        self.certificates.insert(key.into(), value);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "input": self.input,
            "results": self.results,
            "certificates": self.certificates,
            "notices": self.notices,
            "status": self.status(),
        })
    }

    pub fn status(&self) -> &'static str {
        if self.certified {
            "certified"
        } else {
            "uncertified"
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let input = &self.input;
        writeln!(
            out,
            "{}: |V| = {}, |E| = {}, bipartite = {}",
            self.command, input["vertices"], input["edges"], input["bipartite"]
        )
        .unwrap();
        for (key, value) in &self.results {
            write_entry(&mut out, key, value);
        }
        if !self.certificates.is_empty() {
            writeln!(out, "certificates:").unwrap();
            for (key, value) in &self.certificates {
                out.push_str("  ");
                write_entry(&mut out, key, value);
            }
        }
        for notice in &self.notices {
            writeln!(out, "notice: {notice}").unwrap();
        }
        writeln!(out, "status: {}", self.status()).unwrap();
        out
    }
}

fn write_entry(out: &mut String, key: &str, value: &Value) {
    match value {
        Value::Array(items) if items.iter().any(|v| v.is_object()) => {
            writeln!(out, "{key}:").unwrap();
            for item in items {
                writeln!(out, "  - {}", inline(item)).unwrap();
            }
        }
        _ => writeln!(out, "{key} = {}", inline(value)).unwrap(),
    }
}

fn inline(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => "n/a".into(),
        Value::Array(items) => format!("({})", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k} = {}", inline(v))).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}
