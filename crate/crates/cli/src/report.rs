//! Reports: a text rendering for humans and a sorted JSON value for machines.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub name: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    pub inputs: Vec<(String, String)>,
    pub lines: Vec<String>,
    pub results: Map<String, Value>,
    pub flags: Vec<Flag>,
    pub provenance: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, scenario: &str) -> Self {
        Report { command: command.into(), scenario: scenario.into(), ..Default::default() }
    }

    pub fn input(&mut self, k: &str, v: impl ToString) {
        self.inputs.push((k.into(), v.to_string()));
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// A `key: value` line mirrored into the JSON results.
    pub fn kv(&mut self, k: &str, v: impl ToString) {
        let v = v.to_string();
        self.lines.push(format!("{k}: {v}"));
        self.results.insert(k.replace(' ', "_"), Value::String(v));
    }

    pub fn value(&mut self, k: &str, v: Value) {
        self.results.insert(k.into(), v);
    }

    pub fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.flags.push(Flag { name: name.into(), ok });
    }

    pub fn prov(&mut self, k: &str, v: impl ToString) {
        self.provenance.push((k.into(), v.to_string()));
    }

    pub fn failed_flags(&self) -> Vec<&Flag> {
        self.flags.iter().filter(|f| !f.ok).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("command: {}\nscenario: {}\n", self.command, self.scenario);
        if !self.inputs.is_empty() {
            s.push_str("inputs:\n");
            for (k, v) in &self.inputs {
                s.push_str(&format!("  {k}: {v}\n"));
            }
        }
        s.push_str("results:\n");
        for l in &self.lines {
            for part in l.lines() {
                s.push_str(&format!("  {part}\n"));
            }
        }
        if !self.flags.is_empty() {
            s.push_str("flags:\n");
            for f in &self.flags {
                s.push_str(&format!("  [{}] {}\n", if f.ok { "ok" } else { "FAIL" }, f.name));
            }
        }
        s.push_str("provenance:\n");
        for (k, v) in &self.provenance {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let pairs = |v: &[(String, String)]| -> Value {
            Value::Object(v.iter().map(|(k, x)| (k.clone(), Value::String(x.clone()))).collect())
        };
        let flags: Map<String, Value> = self.flags.iter().map(|f| (f.name.clone(), Value::Bool(f.ok))).collect();
        json!({
            "command": self.command,
            "scenario": self.scenario,
            "inputs": pairs(&self.inputs),
            "results": Value::Object(self.results.clone()),
            "flags": Value::Object(flags),
            "provenance": pairs(&self.provenance),
        })
    }
}

/// Fixed-width float rendering so text reports are byte-stable.
pub fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

pub fn fmt_levels(v: &[(f64, f64)]) -> String {
    v.iter().map(|(l, m)| format!("{}:{}", fmt_f(*l), fmt_f(*m))).collect::<Vec<_>>().join(" ")
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
