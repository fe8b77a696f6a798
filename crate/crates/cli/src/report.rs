use std::fmt::Write as _;

use critforge::milnor::Inconclusive;
use critforge::Error;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Inconclusive,
    UsageError,
    ContractViolation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::UsageError => 1,
            Status::Inconclusive => 2,
            Status::ContractViolation => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Inconclusive => "inconclusive",
            Status::UsageError => "error",
            Status::ContractViolation => "contract_violation",
        }
    }

    /// Severity used to combine batch exit codes.
    pub fn severity(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 1,
            Status::UsageError => 2,
            Status::ContractViolation => 3,
        }
    }
}

/// A finished job: status plus either a result object or an error.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub body: Value,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome { status: Status::Ok, body: result }
    }

    pub fn inconclusive(why: &Inconclusive, mut extra: Map<String, Value>) -> Self {
        extra.insert("reason".into(), json!(why.code()));
        extra.insert("checked_to".into(), json!(why.checked_to()));
        extra.insert("message".into(), json!(why.to_string()));
        Outcome { status: Status::Inconclusive, body: Value::Object(extra) }
    }

    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        Outcome {
            status: Status::UsageError,
            body: json!({ "code": code, "message": message.into() }),
        }
    }

    pub fn from_error(e: &Error) -> Self {
        let status = match e {
            Error::Contract(_) => Status::ContractViolation,
            Error::NonIsolated(_) | Error::Resource(_) | Error::Precision { .. } => Status::Inconclusive,
            _ => Status::UsageError,
        };
        let mut body = json!({ "code": e.code(), "message": e.to_string() });
        if status == Status::Inconclusive {
            body["reason"] = json!(e.code());
        }
        Outcome { status, body }
    }
}

/// Job settings echoed into every report.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub command: &'a str,
    pub order: u32,
    pub cap: u32,
    pub mode: &'a str,
}

pub fn envelope(ctx: &Context<'_>, outcome: &Outcome) -> Value {
    let mut v = json!({
        "schema": SCHEMA_VERSION,
        "command": ctx.command,
        "status": outcome.status.name(),
        "order": ctx.order,
        "cap": ctx.cap,
        "mode": ctx.mode,
    });
    let key = match outcome.status {
        Status::Ok | Status::Inconclusive => "result",
        Status::UsageError | Status::ContractViolation => "error",
    };
    v[key] = outcome.body.clone();
    v
}

/// Rebuilds objects with keys inserted in sorted order, so output is
/// sorted whatever map type serde_json was built with.
pub fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), canonical(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn to_json(v: &Value) -> String {
    serde_json::to_string(&canonical(v)).expect("JSON values serialize")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for k in keys {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, &m[k], out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => {
            let _ = writeln!(out, "  {prefix}: {}", scalar(other));
        }
    }
}

pub fn to_human(ctx: &Context<'_>, outcome: &Outcome) -> String {
    let mut out = format!(
        "{}: {} (N = {}, mode = {}, cap = {})\n",
        ctx.command,
        outcome.status.name(),
        ctx.order,
        ctx.mode,
        ctx.cap
    );
    flatten("", &outcome.body, &mut out);
    out
}
