//! Structured command output and its human-readable rendering.
//!
//! The text form is a pure function of [`Report`], so a saved `--json`
//! document regenerates exactly the same summary.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use upsilon::{ApproxOrder, Interval, UpsilonParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl From<Interval<f64>> for Bounds {
    fn from(i: Interval<f64>) -> Self {
        Self { lo: i.lo, hi: i.hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub coef: Vec<f64>,
    pub dof: Vec<f64>,
}

impl From<&UpsilonParams<f64>> for Params {
    fn from(p: &UpsilonParams<f64>) -> Self {
        Self {
            coef: p.coef().to_vec(),
            dof: p.dof().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terms {
    pub edgeworth: usize,
    pub cornish_fisher: usize,
}

impl From<ApproxOrder> for Terms {
    fn from(o: ApproxOrder) -> Self {
        Self {
            edgeworth: o.edgeworth_terms,
            cornish_fisher: o.cf_terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub reject: bool,
    pub alpha: f64,
    pub sided: String,
    /// One threshold for one-sided tests, two for two-sided.
    pub critical: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nct_p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nct_reject: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub method: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Terms>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
    /// Point outputs of distribution commands, aligned with the inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// Command-specific named results (posterior hyperparameters, coverage).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.results.insert(key.to_string(), to_value(value));
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k:<14}{v}");
        };
        line("method", self.method.clone());
        for (k, v) in &self.inputs {
            line(k, value(v));
        }
        if let Some(t) = self.terms {
            line("terms", format!("edgeworth {}, cornish-fisher {}", t.edgeworth, t.cornish_fisher));
        }
        if let Some(s) = self.seed {
            line("seed", s.to_string());
        }
        if let Some(p) = &self.params {
            line("coef", list(&p.coef));
            line("dof", list(&p.dof));
        }
        if let Some(s) = self.statistic {
            line("statistic", num(s));
        }
        if let Some(i) = self.interval {
            line("interval", format!("[{}, {}]", num(i.lo), num(i.hi)));
        }
        if let Some(p) = self.p_value {
            line("p-value", num(p));
        }
        if let Some(d) = &self.decision {
            line("critical", list(&d.critical));
            let verdict = if d.reject { "reject" } else { "do not reject" };
            let alt = match d.sided.as_str() {
                "two" => "two-sided".to_string(),
                s => format!("{s} alternative"),
            };
            line("decision", format!("{verdict} at alpha {}, {alt}", num(d.alpha)));
            if let (Some(p), Some(r)) = (d.nct_p_value, d.nct_reject) {
                let verdict = if r { "reject" } else { "do not reject" };
                line("noncentral t", format!("p-value {}, {verdict}", num(p)));
            }
        }
        if let Some(v) = &self.values {
            line("values", list(v));
        }
        for (k, v) in &self.results {
            line(k, value(v));
        }
        for n in &self.notes {
            line("note", n.clone());
        }
        out
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Seven significant digits, switching to exponent form outside [1e-4, 1e7).
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if (1e-4..1e7).contains(&a) {
        let digits = (6 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{x:.digits$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.6e}")
    }
}

fn list(xs: &[f64]) -> String {
    if xs.is_empty() {
        return "(none)".into();
    }
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

fn value(v: &Value) -> String {
    match v {
        Value::Null => "(none)".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => num(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "(none)".into(),
        Value::Array(items) if items.iter().all(|i| i.is_array()) => {
            let rows: Vec<String> = items.iter().map(|r| format!("[{}]", value(r))).collect();
            rows.join("; ")
        }
        Value::Array(items) => items.iter().map(value).collect::<Vec<_>>().join(", "),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k} = {}", value(v)))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(-5.751024), "-5.751024");
        assert_eq!(num(84.0), "84");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.23456789e-7), "1.234568e-7");
        assert_eq!(num(0.00212345678), "0.002123457");
    }

    #[test]
    fn json_round_trip_preserves_text() {
        let mut r = Report::new("demo");
        r.input("n", 120).input("x", [0.1, 1.0 / 3.0]).input("file", "a.csv");
        r.interval = Some(Bounds { lo: -0.123456789, hi: 2.0 / 3.0 });
        r.params = Some(Params { coef: vec![std::f64::consts::PI], dof: vec![9.0] });
        r.decision = Some(Decision {
            reject: true,
            alpha: 0.01,
            sided: "upper".into(),
            critical: vec![-1.2],
            nct_p_value: Some(1e-9),
            nct_reject: Some(true),
        });
        r.result("posterior", BTreeMap::from([("mu", 0.1), ("m", 12.0)]));
        let back: Report = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.render(), r.render());
    }
}
