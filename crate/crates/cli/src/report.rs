//! Report assembly: one JSON value for machines, text lines for humans.

use lgb_core::algebra::Check;
use lgb_core::isomorphism::IsoCertificate;
use lgb_core::kernel::rational::fmt_rat;
use lgb_core::kernel::{Field, Rational, Scalar};
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A verification failed or a search came back empty.
    Finding,
}

#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub input: Value,
    pub result: Map<String, Value>,
    pub text: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &'static str, input: Value) -> Report {
        Report { command, input, result: Map::new(), text: Vec::new(), status: Status::Ok }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.result.insert(key.to_string(), value.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn finding(&mut self) {
        self.status = Status::Finding;
    }

    pub fn to_json(&self, elapsed_ms: Option<f64>) -> Value {
        let mut out = Map::new();
        out.insert("schema".into(), json!(SCHEMA));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("command".into(), json!(self.command));
        out.insert("input".into(), self.input.clone());
        out.insert(
            "status".into(),
            json!(match self.status {
                Status::Ok => "ok",
                Status::Finding => "finding",
            }),
        );
        out.insert("result".into(), Value::Object(self.result.clone()));
        if let Some(ms) = elapsed_ms {
            out.insert("timing_ms".into(), json!(ms));
        }
        Value::Object(out)
    }
}

pub fn rational(q: &Rational) -> Value {
    Value::String(fmt_rat(q))
}

pub fn rationals(qs: &[Rational]) -> Value {
    Value::Array(qs.iter().map(rational).collect())
}

pub fn field(f: &Field) -> Value {
    match f.modulus() {
        None => json!("Q"),
        Some(m) => json!({
            "symbol": m.symbol(),
            "modulus": m.poly().display(m.symbol()),
            "certified_irreducible": m.is_certified_irreducible(),
        }),
    }
}

/// Rationals as `"p/q"`; extension elements as coefficient vectors in
/// increasing powers of the generator, with the modulus.
pub fn scalar(s: &Scalar) -> Value {
    match s.to_rational() {
        Some(q) => rational(&q),
        None => json!({
            "coeffs": s.coeffs().iter().map(fmt_rat).collect::<Vec<_>>(),
            "field": field(s.field()),
        }),
    }
}

pub fn check(c: &Check) -> Value {
    json!({
        "name": c.name,
        "passed": c.passed,
        "checked": c.checked,
        "witnesses": c.witnesses,
    })
}

pub fn checks(cs: &[Check]) -> Value {
    Value::Array(cs.iter().map(check).collect())
}

pub fn check_lines(cs: &[Check]) -> Vec<String> {
    let mut out = Vec::new();
    for c in cs {
        out.push(format!("  {:<22} {} ({} cases)", c.name, if c.passed { "pass" } else { "FAIL" }, c.checked));
        for w in c.witnesses.iter().take(3) {
            out.push(format!("      witness: {w}"));
        }
    }
    out
}

pub fn certificate(c: &IsoCertificate) -> Value {
    json!({
        "source": c.source,
        "target": c.target,
        "passed": c.passed(),
        "checks": checks(&c.checks),
    })
}

/// Two-column plain-text table.
pub fn table(rows: &[(String, String)]) -> Vec<String> {
    let w = rows.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(a, b)| format!("  {a:<w$}  {b}")).collect()
}
