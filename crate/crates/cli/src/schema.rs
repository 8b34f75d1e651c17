//! Field-by-field validation of JSON configs, so that one run reports every
//! offending field instead of stopping at the first.

use lctcap::MatrixSpec;
use serde_json::{Map, Value};

#[derive(Clone, Copy)]
pub enum Kind {
    Number,
    Integer,
    String,
    Choice(&'static [&'static str]),
    Matrix,
    Range,
    Numbers,
    Object,
}

pub struct Field {
    pub name: &'static str,
    pub kind: Kind,
    pub required: bool,
}

pub const fn req(name: &'static str, kind: Kind) -> Field {
    Field { name, kind, required: true }
}

pub const fn opt(name: &'static str, kind: Kind) -> Field {
    Field { name, kind, required: false }
}

fn path(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

/// Returns the object, or records why it is not one.
pub fn as_object<'a>(v: &'a Value, at: &str, problems: &mut Vec<String>) -> Option<&'a Map<String, Value>> {
    let obj = v.as_object();
    if obj.is_none() {
        problems.push(format!("{}: expected a JSON object", if at.is_empty() { "config" } else { at }));
    }
    obj
}

/// Checks `v` against `fields`: unknown keys, missing keys and wrong types.
pub fn check(v: &Value, fields: &[Field], prefix: &str, problems: &mut Vec<String>) {
    let Some(obj) = as_object(v, prefix, problems) else {
        return;
    };
    for key in obj.keys() {
        if !fields.iter().any(|f| f.name == key) {
            let known: Vec<&str> = fields.iter().map(|f| f.name).collect();
            problems.push(format!("{}: unknown field (expected one of {})", path(prefix, key), known.join(", ")));
        }
    }
    for f in fields {
        let at = path(prefix, f.name);
        match obj.get(f.name) {
            None if f.required => problems.push(format!("{at}: missing required field")),
            None => {}
            Some(value) => check_kind(value, f.kind, &at, problems),
        }
    }
}

fn check_kind(v: &Value, kind: Kind, at: &str, problems: &mut Vec<String>) {
    match kind {
        Kind::Number if !v.is_number() => problems.push(format!("{at}: expected a number, got {v}")),
        Kind::Integer if !v.is_u64() => problems.push(format!("{at}: expected a non-negative integer, got {v}")),
        Kind::String if !v.is_string() => problems.push(format!("{at}: expected a string, got {v}")),
        Kind::Choice(options) => match v.as_str() {
            Some(s) if options.contains(&s) => {}
            _ => problems.push(format!("{at}: expected one of {}, got {v}", options.join(", "))),
        },
        Kind::Matrix => check_matrix(v, at, problems),
        Kind::Range => check(v, &[req("lo", Kind::Number), req("hi", Kind::Number)], at, problems),
        Kind::Numbers => {
            let ok = v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_number));
            if !ok {
                problems.push(format!("{at}: expected a non-empty array of numbers, got {v}"));
            }
        }
        Kind::Object if !v.is_object() => problems.push(format!("{at}: expected an object, got {v}")),
        _ => {}
    }
}

fn check_matrix(v: &Value, at: &str, problems: &mut Vec<String>) {
    match serde_json::from_value::<MatrixSpec>(v.clone()) {
        Ok(spec) => {
            if let Err(e) = spec.resolve() {
                problems.push(format!("{at}: {e}"));
            }
        }
        Err(_) => problems.push(format!(
            "{at}: expected [a, b, c, d] or an object with `kind` \
             (identity, cft, frft{{alpha}}, theorem1{{b, d}}, theorem2{{a, b}}, general{{a, b, c, d}}), got {v}"
        )),
    }
}
