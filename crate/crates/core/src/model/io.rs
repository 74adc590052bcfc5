//! JSON-syntax text formats for correlations and behaviours.
//!
//! Rationals are strings (`"num/den"` or an integer). Table keys are
//! `"a,b,x,y"` for correlations and `"prep,y,b"` for behaviours. Emission is
//! canonical: keys appear in table order, so `parse(emit(v)) == v` and
//! re-emitting a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::rational::Rational;

use super::{
    validate_correlation, BellCorrelation, BellScenario, CtxBehaviour, CtxScenario, Mixture,
    ModelError, PrepLabel, PreparationEquivalence, TableViolation,
};

pub const CORRELATION_TYPE: &str = "bell-correlation";
pub const BEHAVIOUR_TYPE: &str = "ctx-behaviour";
pub const SCENARIO_TYPE: &str = "ctx-scenario";

/// Any model document, dispatched on its `"type"` field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Correlation(BellCorrelation),
    Behaviour(CtxBehaviour),
    Scenario(CtxScenario),
}

pub fn parse_document(text: &str) -> Result<Document, ModelError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
    match v.get("type").and_then(Value::as_str) {
        Some(CORRELATION_TYPE) => correlation_from_value(&v).map(Document::Correlation),
        Some(BEHAVIOUR_TYPE) => behaviour_from_value(&v).map(Document::Behaviour),
        Some(SCENARIO_TYPE) => scenario_from_value(&v).map(Document::Scenario),
        Some(other) => Err(ModelError::Format(format!("unknown document type {other:?}"))),
        None => Err(ModelError::Format("missing \"type\" field".into())),
    }
}

pub(crate) fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub(crate) fn usize_list(v: &Value, field: &str) -> Result<Vec<usize>, ModelError> {
    let arr = v
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| ModelError::Format(format!("missing array field {field:?}")))?;
    arr.iter()
        .map(|e| {
            e.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| ModelError::Format(format!("{field:?} must hold positive integers")))
        })
        .collect()
}

pub(crate) fn rational_value(v: &Value) -> Result<Rational, ModelError> {
    match v {
        Value::String(s) => Ok(s.parse()?),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or(0))),
        _ => Err(ModelError::Format(format!(
            "expected a rational string, got {v}"
        ))),
    }
}

pub(crate) fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, ModelError> {
    v.get(field)
        .and_then(Value::as_object)
        .ok_or_else(|| ModelError::Format(format!("missing object field {field:?}")))
}

fn parse_index(s: &str, arity: usize) -> Result<Vec<usize>, ModelError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != arity {
        return Err(ModelError::MalformedTable(format!(
            "key {s:?} has {} components, expected {arity}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| match p.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ModelError::MalformedTable(format!("bad index in key {s:?}"))),
        })
        .collect()
}

pub fn correlation_to_value(p: &BellCorrelation) -> Value {
    let s = p.scenario();
    let mut table = Map::new();
    for ((a, b, x, y), v) in s.cells().zip(p.table()) {
        table.insert(format!("{a},{b},{x},{y}"), Value::String(v.to_string()));
    }
    let mut root = Map::new();
    root.insert("type".into(), CORRELATION_TYPE.into());
    root.insert("A".into(), s.outcomes_a().into());
    root.insert("B".into(), s.outcomes_b().into());
    root.insert("table".into(), Value::Object(table));
    Value::Object(root)
}

pub fn correlation_from_value(v: &Value) -> Result<BellCorrelation, ModelError> {
    let scenario = BellScenario::new(usize_list(v, "A")?, usize_list(v, "B")?)?;
    let mut raw = BTreeMap::new();
    for (k, val) in object(v, "table")? {
        let idx = parse_index(k, 4)?;
        if raw
            .insert((idx[0], idx[1], idx[2], idx[3]), rational_value(val)?)
            .is_some()
        {
            return Err(ModelError::MalformedTable(format!("duplicate key {k:?}")));
        }
    }
    validate_correlation(&raw, &scenario)
}

pub fn emit_correlation(p: &BellCorrelation) -> String {
    to_pretty(&correlation_to_value(p))
}

pub fn parse_correlation(text: &str) -> Result<BellCorrelation, ModelError> {
    match parse_document(text)? {
        Document::Correlation(p) => Ok(p),
        _ => Err(ModelError::Format(
            "expected a bell-correlation document".into(),
        )),
    }
}

fn mixture_to_value(m: &Mixture) -> Value {
    Value::Object(
        m.iter()
            .map(|(l, c)| (l.to_string(), Value::String(c.to_string())))
            .collect(),
    )
}

fn mixture_from_value(v: &Value) -> Result<Mixture, ModelError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ModelError::Format("equivalence side must be an object".into()))?;
    obj.iter()
        .map(|(k, c)| Ok((k.parse::<PrepLabel>()?, rational_value(c)?)))
        .collect()
}

pub fn equivalence_to_value(eq: &PreparationEquivalence) -> Value {
    let mut m = Map::new();
    m.insert("lhs".into(), mixture_to_value(eq.lhs()));
    m.insert("rhs".into(), mixture_to_value(eq.rhs()));
    Value::Object(m)
}

pub fn equivalence_from_value(v: &Value) -> Result<PreparationEquivalence, ModelError> {
    let lhs = mixture_from_value(v.get("lhs").unwrap_or(&Value::Null))?;
    let rhs = mixture_from_value(v.get("rhs").unwrap_or(&Value::Null))?;
    PreparationEquivalence::new(lhs, rhs)
}

pub fn scenario_to_value(s: &CtxScenario) -> Map<String, Value> {
    let mut root = Map::new();
    root.insert(
        "preps".into(),
        s.preps().iter().map(|l| Value::String(l.to_string())).collect(),
    );
    root.insert("B".into(), s.outcomes_b().into());
    root.insert(
        "equivalences".into(),
        s.equivalences().iter().map(equivalence_to_value).collect(),
    );
    if let Some(idx) = s.index_a() {
        root.insert("index_A".into(), idx.into());
    }
    root
}

pub fn scenario_from_value(v: &Value) -> Result<CtxScenario, ModelError> {
    let preps = v
        .get("preps")
        .and_then(Value::as_array)
        .ok_or_else(|| ModelError::Format("missing array field \"preps\"".into()))?
        .iter()
        .map(|e| {
            e.as_str()
                .ok_or_else(|| ModelError::Format("preparation labels must be strings".into()))?
                .parse::<PrepLabel>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let outcomes_b = usize_list(v, "B")?;
    let equivalences = match v.get("equivalences") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .map(equivalence_from_value)
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(ModelError::Format("\"equivalences\" must be an array".into())),
    };
    let index_a = match v.get("index_A") {
        None | Some(Value::Null) => None,
        Some(_) => Some(usize_list(v, "index_A")?),
    };
    CtxScenario::new(preps, outcomes_b, equivalences, index_a)
}

pub fn behaviour_to_value(q: &CtxBehaviour) -> Value {
    let s = q.scenario();
    let mut root = Map::new();
    root.insert("type".into(), BEHAVIOUR_TYPE.into());
    root.extend(scenario_to_value(s));
    let mut table = Map::new();
    for ((z, y, b), v) in s.cells().zip(q.table()) {
        table.insert(format!("{},{y},{b}", s.preps()[z]), Value::String(v.to_string()));
    }
    root.insert("table".into(), Value::Object(table));
    Value::Object(root)
}

pub fn behaviour_from_value(v: &Value) -> Result<CtxBehaviour, ModelError> {
    let scenario = scenario_from_value(v)?;
    let mut raw: BTreeMap<(PrepLabel, usize, usize), Rational> = BTreeMap::new();
    for (k, val) in object(v, "table")? {
        let parts: Vec<&str> = k.split(',').collect();
        if parts.len() != 3 {
            return Err(ModelError::MalformedTable(format!(
                "key {k:?} has {} components, expected 3",
                parts.len()
            )));
        }
        let label: PrepLabel = parts[0].parse()?;
        let rest = parse_index(&parts[1..].join(","), 2)?;
        if raw.insert((label, rest[0], rest[1]), rational_value(val)?).is_some() {
            return Err(ModelError::MalformedTable(format!("duplicate key {k:?}")));
        }
    }
    let mut missing = Vec::new();
    let mut table = Vec::with_capacity(scenario.table_len());
    for (z, y, b) in scenario.cells() {
        let key = (scenario.preps()[z], y, b);
        match raw.remove(&key) {
            Some(val) => table.push(val),
            None => {
                missing.push(TableViolation::MissingCell(format!("{},{y},{b}", key.0)));
                table.push(Rational::zero());
            }
        }
    }
    if let Some(((l, y, b), _)) = raw.into_iter().next() {
        return Err(ModelError::MalformedTable(format!(
            "cell {l},{y},{b} is outside the scenario"
        )));
    }
    if !missing.is_empty() {
        return Err(ModelError::Normalisation(missing));
    }
    CtxBehaviour::new(scenario, table)
}

pub fn emit_behaviour(q: &CtxBehaviour) -> String {
    to_pretty(&behaviour_to_value(q))
}

pub fn parse_behaviour(text: &str) -> Result<CtxBehaviour, ModelError> {
    match parse_document(text)? {
        Document::Behaviour(q) => Ok(q),
        _ => Err(ModelError::Format(
            "expected a ctx-behaviour document".into(),
        )),
    }
}

pub fn emit_scenario(s: &CtxScenario) -> String {
    let mut root = Map::new();
    root.insert("type".into(), SCENARIO_TYPE.into());
    root.extend(scenario_to_value(s));
    to_pretty(&Value::Object(root))
}

/// A scenario from either a `ctx-scenario` or a `ctx-behaviour` document.
pub fn parse_scenario(text: &str) -> Result<CtxScenario, ModelError> {
    match parse_document(text)? {
        Document::Scenario(s) => Ok(s),
        Document::Behaviour(q) => Ok(q.scenario().clone()),
        Document::Correlation(_) => Err(ModelError::Format(
            "expected a ctx-scenario or ctx-behaviour document".into(),
        )),
    }
}
