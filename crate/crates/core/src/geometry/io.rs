//! JSON-syntax files for certificates, vertex lists and facet lists.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::model::io::{object, rational_value, to_pretty};
use crate::model::{BellScenario, CtxScenario, ModelError, PrepLabel};
use crate::rational::Rational;

use super::local::{BellInequality, LocalStrategy, LocalVerdict};
use super::noncontextual::{CtxInequality, NcVerdict, OnticModel};
use super::polytope::Polytope;

pub const LOCAL_CERTIFICATE_TYPE: &str = "local-certificate";
pub const NC_CERTIFICATE_TYPE: &str = "nc-certificate";
pub const FACETS_TYPE: &str = "nc-facets";
pub const VERTICES_TYPE: &str = "nc-vertices";

fn rstr(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn index_list(v: &Value, what: &str) -> Result<Vec<usize>, ModelError> {
    v.as_array()
        .ok_or_else(|| ModelError::Format(format!("{what} must be an array")))?
        .iter()
        .map(|e| {
            e.as_u64()
                .filter(|&n| n > 0)
                .map(|n| n as usize)
                .ok_or_else(|| ModelError::Format(format!("{what} must hold positive integers")))
        })
        .collect()
}

fn sparse(keys: impl Iterator<Item = String>, values: &[Rational]) -> Value {
    Value::Object(
        keys.zip(values)
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (k, rstr(v)))
            .collect(),
    )
}

fn dense(
    map: &Map<String, Value>,
    keys: Vec<String>,
) -> Result<Vec<Rational>, ModelError> {
    let mut pos: BTreeMap<String, usize> = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut out = vec![Rational::zero(); pos.len()];
    for (k, v) in map {
        let canonical: String = k.split(',').map(str::trim).collect::<Vec<_>>().join(",");
        let i = pos
            .remove(&canonical)
            .ok_or_else(|| ModelError::MalformedTable(format!("coefficient key {k:?} is not a cell")))?;
        out[i] = rational_value(v)?;
    }
    Ok(out)
}

fn bell_keys(s: &BellScenario) -> impl Iterator<Item = String> + '_ {
    s.cells().map(|(a, b, x, y)| format!("{a},{b},{x},{y}"))
}

fn ctx_keys(s: &CtxScenario) -> impl Iterator<Item = String> + '_ {
    s.cells().map(|(z, y, b)| format!("{},{y},{b}", s.preps()[z]))
}

pub fn local_verdict_to_value(verdict: &LocalVerdict) -> Value {
    let mut root = Map::new();
    root.insert("type".into(), LOCAL_CERTIFICATE_TYPE.into());
    root.insert("member".into(), verdict.is_member().into());
    match verdict {
        LocalVerdict::Local(weights) => {
            let list = weights
                .iter()
                .map(|(st, w)| {
                    let mut m = Map::new();
                    m.insert("alice".into(), st.alice.clone().into());
                    m.insert("bob".into(), st.bob.clone().into());
                    m.insert("weight".into(), rstr(w));
                    Value::Object(m)
                })
                .collect();
            root.insert("weights".into(), Value::Array(list));
        }
        LocalVerdict::Nonlocal {
            inequality,
            violation,
        } => {
            let mut ineq = Map::new();
            ineq.insert("constant".into(), rstr(&inequality.constant));
            ineq.insert(
                "coefficients".into(),
                sparse(bell_keys(&inequality.scenario), &inequality.coefficients),
            );
            root.insert("inequality".into(), Value::Object(ineq));
            root.insert("violation".into(), rstr(violation));
        }
    }
    Value::Object(root)
}

pub fn local_verdict_from_value(v: &Value, s: &BellScenario) -> Result<LocalVerdict, ModelError> {
    expect_type(v, LOCAL_CERTIFICATE_TYPE)?;
    if member(v)? {
        let list = v
            .get("weights")
            .and_then(Value::as_array)
            .ok_or_else(|| ModelError::Format("missing \"weights\" array".into()))?;
        let weights = list
            .iter()
            .map(|e| {
                let st = LocalStrategy {
                    alice: index_list(e.get("alice").unwrap_or(&Value::Null), "\"alice\"")?,
                    bob: index_list(e.get("bob").unwrap_or(&Value::Null), "\"bob\"")?,
                };
                let w = rational_value(e.get("weight").unwrap_or(&Value::Null))?;
                Ok((st, w))
            })
            .collect::<Result<_, ModelError>>()?;
        Ok(LocalVerdict::Local(weights))
    } else {
        let ineq = v
            .get("inequality")
            .ok_or_else(|| ModelError::Format("missing \"inequality\"".into()))?;
        let coefficients = dense(object(ineq, "coefficients")?, bell_keys(s).collect())?;
        Ok(LocalVerdict::Nonlocal {
            inequality: BellInequality {
                scenario: s.clone(),
                coefficients,
                constant: rational_value(ineq.get("constant").unwrap_or(&Value::Null))?,
            },
            violation: rational_value(v.get("violation").unwrap_or(&Value::Null))?,
        })
    }
}

pub fn nc_verdict_to_value(s: &CtxScenario, verdict: &NcVerdict) -> Value {
    let mut root = Map::new();
    root.insert("type".into(), NC_CERTIFICATE_TYPE.into());
    root.insert("member".into(), verdict.is_member().into());
    match verdict {
        NcVerdict::NonContextual(model) => {
            root.insert(
                "atlas".into(),
                Value::Array(model.atlas.iter().map(|l| l.clone().into()).collect()),
            );
            let mu: Map<String, Value> = s
                .preps()
                .iter()
                .zip(&model.mu)
                .map(|(l, row)| (l.to_string(), Value::Array(row.iter().map(rstr).collect())))
                .collect();
            root.insert("mu".into(), Value::Object(mu));
        }
        NcVerdict::Contextual {
            inequality,
            violation,
        } => {
            root.insert("inequality".into(), ctx_inequality_to_value(s, inequality));
            root.insert("violation".into(), rstr(violation));
        }
    }
    Value::Object(root)
}

pub fn ctx_inequality_to_value(s: &CtxScenario, inequality: &CtxInequality) -> Value {
    let mut ineq = Map::new();
    ineq.insert("constant".into(), rstr(&inequality.constant));
    ineq.insert("coefficients".into(), sparse(ctx_keys(s), &inequality.coefficients));
    Value::Object(ineq)
}

pub fn nc_verdict_from_value(v: &Value, s: &CtxScenario) -> Result<NcVerdict, ModelError> {
    expect_type(v, NC_CERTIFICATE_TYPE)?;
    if member(v)? {
        let atlas = v
            .get("atlas")
            .and_then(Value::as_array)
            .ok_or_else(|| ModelError::Format("missing \"atlas\" array".into()))?
            .iter()
            .map(|l| index_list(l, "atlas entry"))
            .collect::<Result<Vec<_>, _>>()?;
        let mu_obj = object(v, "mu")?;
        let mut by_label: BTreeMap<PrepLabel, Vec<Rational>> = BTreeMap::new();
        for (k, row) in mu_obj {
            let label: PrepLabel = k.parse()?;
            let values = row
                .as_array()
                .ok_or_else(|| ModelError::Format(format!("mu[{k}] must be an array")))?
                .iter()
                .map(rational_value)
                .collect::<Result<Vec<_>, _>>()?;
            by_label.insert(label, values);
        }
        let mu = s
            .preps()
            .iter()
            .map(|l| {
                by_label
                    .remove(l)
                    .ok_or_else(|| ModelError::Format(format!("mu has no row for preparation {l}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(extra) = by_label.keys().next() {
            return Err(ModelError::UnknownLabel(extra.to_string()));
        }
        Ok(NcVerdict::NonContextual(OnticModel { atlas, mu }))
    } else {
        let ineq = v
            .get("inequality")
            .ok_or_else(|| ModelError::Format("missing \"inequality\"".into()))?;
        Ok(NcVerdict::Contextual {
            inequality: ctx_inequality_from_value(ineq, s)?,
            violation: rational_value(v.get("violation").unwrap_or(&Value::Null))?,
        })
    }
}

pub fn ctx_inequality_from_value(v: &Value, s: &CtxScenario) -> Result<CtxInequality, ModelError> {
    Ok(CtxInequality {
        coefficients: dense(object(v, "coefficients")?, ctx_keys(s).collect())?,
        constant: rational_value(v.get("constant").unwrap_or(&Value::Null))?,
    })
}

fn expect_type(v: &Value, t: &str) -> Result<(), ModelError> {
    match v.get("type").and_then(Value::as_str) {
        Some(found) if found == t => Ok(()),
        found => Err(ModelError::Format(format!("expected type {t:?}, found {found:?}"))),
    }
}

fn member(v: &Value) -> Result<bool, ModelError> {
    v.get("member")
        .and_then(Value::as_bool)
        .ok_or_else(|| ModelError::Format("missing boolean \"member\"".into()))
}

pub fn emit(v: &Value) -> String {
    to_pretty(v)
}

fn one_line(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialise")
}

/// Facet list with a coordinate legend; one facet per line as
/// `[c0, c1, …]` meaning c0 + Σ c_i·coord_i ≥ 0.
pub fn emit_facets(poly: &Polytope, s: &CtxScenario) -> String {
    let legend: Vec<Value> = poly.coordinate_names(s).into_iter().map(Value::String).collect();
    let positivity = poly.positivity_facets(s);
    let mut out = String::from("{\n");
    out += &format!("  \"type\": {},\n", one_line(&FACETS_TYPE.into()));
    out += &format!("  \"form\": {},\n", one_line(&"c0 + sum_i c_i * coord_i >= 0".into()));
    out += &format!("  \"coordinates\": {},\n", one_line(&Value::Array(legend)));
    out += &format!("  \"dimension\": {},\n", poly.dimension);
    out += &format!("  \"vertex_count\": {},\n", poly.vertices.len());
    out += &format!("  \"facet_count\": {},\n", poly.facets.len());
    out += &format!("  \"positivity_facets\": {},\n", one_line(&positivity.into()));
    out += "  \"facets\": [\n";
    let lines: Vec<String> = poly
        .facets
        .iter()
        .map(|f| {
            let mut row = vec![f.constant.to_string()];
            row.extend(f.coefficients.iter().map(ToString::to_string));
            format!("    [{}]", row.join(", "))
        })
        .collect();
    out += &lines.join(",\n");
    out += "\n  ]\n}\n";
    out
}

/// Vertex list in reduced coordinates, one vertex per line.
pub fn emit_vertices(poly: &Polytope, s: &CtxScenario) -> String {
    let legend: Vec<Value> = poly.coordinate_names(s).into_iter().map(Value::String).collect();
    let mut out = String::from("{\n");
    out += &format!("  \"type\": {},\n", one_line(&VERTICES_TYPE.into()));
    out += &format!("  \"coordinates\": {},\n", one_line(&Value::Array(legend)));
    out += &format!("  \"vertex_count\": {},\n", poly.vertices.len());
    out += "  \"vertices\": [\n";
    let lines: Vec<String> = poly
        .vertices
        .iter()
        .map(|v| format!("    {}", one_line(&Value::Array(v.iter().map(rstr).collect()))))
        .collect();
    out += &lines.join(",\n");
    out += "\n  ]\n}\n";
    out
}
