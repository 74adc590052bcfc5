//! JSON-syntax files for realisations and assemblages. Complex entries are
//! `[re, im]` pairs; matrices are arrays of rows.

use serde_json::{json, Map, Value};

use super::snap::snap;
use super::steering::{Assemblage, HjwRealisation};
use super::{projector, CMatrix, CVector, QuantumBellRealisation, QuantumError};

pub const REALISATION_TYPE: &str = "quantum-realisation";
pub const ASSEMBLAGE_TYPE: &str = "assemblage";
pub const HJW_TYPE: &str = "hjw-realisation";

fn fmt_err(msg: impl Into<String>) -> QuantumError {
    QuantumError::Format(msg.into())
}

fn complex_value(z: &num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_from(v: &Value) -> Result<num_complex::Complex64, QuantumError> {
    match v {
        Value::Number(n) => Ok(super::c(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| fmt_err("complex entry must be numeric"))?;
            let im = pair[1].as_f64().ok_or_else(|| fmt_err("complex entry must be numeric"))?;
            Ok(super::c(re, im))
        }
        _ => Err(fmt_err(format!("expected [re, im], got {v}"))),
    }
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_value(v: &Value) -> Result<CMatrix, QuantumError> {
    let rows = v.as_array().ok_or_else(|| fmt_err("matrix must be an array of rows"))?;
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        let row = row.as_array().ok_or_else(|| fmt_err("matrix row must be an array"))?;
        if row.len() != n {
            return Err(QuantumError::DimensionMismatch("matrix must be square".into()));
        }
        for e in row {
            entries.push(complex_from(e)?);
        }
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

fn vector_to_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(complex_value).collect())
}

fn vector_from_value(v: &Value) -> Result<CVector, QuantumError> {
    let items = v.as_array().ok_or_else(|| fmt_err("vector must be an array"))?;
    let entries = items.iter().map(complex_from).collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(entries))
}

fn povms_to_value(p: &[Vec<CMatrix>]) -> Value {
    Value::Array(
        p.iter()
            .map(|povm| Value::Array(povm.iter().map(matrix_to_value).collect()))
            .collect(),
    )
}

fn povms_from_value(v: Option<&Value>, field: &str) -> Result<Vec<Vec<CMatrix>>, QuantumError> {
    let list = v
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err(format!("missing array field {field:?}")))?;
    list.iter()
        .map(|povm| {
            povm.as_array()
                .ok_or_else(|| fmt_err(format!("{field:?} entries must be arrays of matrices")))?
                .iter()
                .map(matrix_from_value)
                .collect()
        })
        .collect()
}

fn dims(v: &Value) -> Result<(usize, usize), QuantumError> {
    let d = v
        .get("dims")
        .and_then(Value::as_array)
        .filter(|d| d.len() == 2)
        .ok_or_else(|| fmt_err("\"dims\" must be [dA, dB]"))?;
    let get = |i: usize| {
        d[i].as_u64()
            .filter(|&n| n > 0)
            .map(|n| n as usize)
            .ok_or_else(|| fmt_err("dimensions must be positive integers"))
    };
    Ok((get(0)?, get(1)?))
}

fn typed(t: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("type".into(), t.into());
    m
}

pub fn realisation_to_value(r: &QuantumBellRealisation) -> Value {
    let mut m = typed(REALISATION_TYPE);
    m.insert("dims".into(), json!([r.da, r.db]));
    m.insert("rho".into(), matrix_to_value(&r.rho));
    m.insert("M".into(), povms_to_value(&r.m));
    m.insert("N".into(), povms_to_value(&r.n));
    Value::Object(m)
}

/// Accepts either a density matrix `"rho"` or a pure state `"psi"`.
pub fn realisation_from_value(v: &Value) -> Result<QuantumBellRealisation, QuantumError> {
    let (da, db) = dims(v)?;
    let rho = match (v.get("rho"), v.get("psi")) {
        (Some(rho), _) => matrix_from_value(rho)?,
        (None, Some(psi)) => projector(&vector_from_value(psi)?),
        (None, None) => return Err(fmt_err("realisation needs \"rho\" or \"psi\"")),
    };
    Ok(QuantumBellRealisation {
        da,
        db,
        rho,
        m: povms_from_value(v.get("M"), "M")?,
        n: povms_from_value(v.get("N"), "N")?,
    })
}

fn weight_value(w: f64) -> Value {
    match snap(w, 1_000_000, 1e-12) {
        Some(r) => Value::String(r.to_string()),
        None => json!(w),
    }
}

fn weight_from(v: &Value) -> Result<f64, QuantumError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| fmt_err("bad weight")),
        Value::String(s) => s
            .parse::<crate::Rational>()
            .map(|r| r.to_f64())
            .map_err(|e| fmt_err(e.to_string())),
        _ => Err(fmt_err("weight must be a number or rational string")),
    }
}

pub fn assemblage_to_value(asm: &Assemblage) -> Value {
    let mut m = typed(ASSEMBLAGE_TYPE);
    m.insert(
        "weights".into(),
        Value::Array(
            asm.weights
                .iter()
                .map(|ws| Value::Array(ws.iter().map(|&w| weight_value(w)).collect()))
                .collect(),
        ),
    );
    m.insert(
        "states".into(),
        Value::Array(
            asm.states
                .iter()
                .map(|ss| {
                    Value::Array(
                        ss.iter()
                            .map(|s| s.as_ref().map_or(Value::Null, matrix_to_value))
                            .collect(),
                    )
                })
                .collect(),
        ),
    );
    m.insert("rho_B".into(), matrix_to_value(&asm.rho_b));
    Value::Object(m)
}

pub fn assemblage_from_value(v: &Value) -> Result<Assemblage, QuantumError> {
    let weights = v
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err("missing \"weights\""))?
        .iter()
        .map(|ws| {
            ws.as_array()
                .ok_or_else(|| fmt_err("weights must be nested arrays"))?
                .iter()
                .map(weight_from)
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>, _>>()?;
    let states = v
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err("missing \"states\""))?
        .iter()
        .map(|ss| {
            ss.as_array()
                .ok_or_else(|| fmt_err("states must be nested arrays"))?
                .iter()
                .map(|s| match s {
                    Value::Null => Ok(None),
                    s => matrix_from_value(s).map(Some),
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<Option<CMatrix>>>, _>>()?;
    let rho_b = match v.get("rho_B") {
        Some(m) => matrix_from_value(m)?,
        None => {
            // Average of the first input's states.
            let first = states.first().ok_or_else(|| fmt_err("no states"))?;
            let d = first.iter().flatten().next().ok_or_else(|| fmt_err("no states"))?.nrows();
            let mut total = CMatrix::zeros(d, d);
            for (w, s) in weights[0].iter().zip(first) {
                if let Some(s) = s {
                    total += s * super::c(*w, 0.0);
                }
            }
            total
        }
    };
    Ok(Assemblage {
        weights,
        states,
        rho_b,
    })
}

pub fn hjw_to_value(h: &HjwRealisation) -> Value {
    let mut m = typed(HJW_TYPE);
    m.insert("dims".into(), json!([h.r, h.db]));
    m.insert("psi".into(), vector_to_value(&h.psi));
    m.insert("M".into(), povms_to_value(&h.m));
    m.insert("eigenvalues".into(), json!(h.eigenvalues));
    Value::Object(m)
}
