use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::geometry::io::{
    emit, emit_facets, emit_vertices, local_verdict_from_value, local_verdict_to_value,
    nc_verdict_from_value, nc_verdict_to_value, LOCAL_CERTIFICATE_TYPE, NC_CERTIFICATE_TYPE,
};
use crate::geometry::{
    check_local, check_noncontextual, nc_polytope, verify_local, verify_noncontextual,
    CertificateReport, LocalVerdict, NcVerdict,
};
use crate::mapping::{
    bell_to_ctx, ctx_to_bell, embed_bell, embed_repeated_preparations, interior_blend,
    reduce_tau, single_equivalence_normal_form, MappingError, NormalForm, RelabellingRecord,
};
use crate::model::io::{
    behaviour_from_value, correlation_from_value, emit_behaviour, emit_correlation,
    equivalence_to_value, scenario_from_value, to_pretty, BEHAVIOUR_TYPE, CORRELATION_TYPE,
    SCENARIO_TYPE,
};
use crate::model::{check_no_signalling, equivalence_residual, BellCorrelation, CtxBehaviour, CtxScenario};
use crate::quantum::io::{
    assemblage_from_value, assemblage_to_value, hjw_to_value, realisation_from_value,
    realisation_to_value, ASSEMBLAGE_TYPE, REALISATION_TYPE,
};
use crate::quantum::{
    assemblage_from_bell, chsh_value, hjw_construct, realisation_to_tables, snap_correlation,
    verify_steering, Assemblage, QuantumBellRealisation,
};

use super::report::unwrap_report;
use super::{read_input, CheckKind, CliError, Command, Report, Settings};

pub(super) const RECORD_TYPE: &str = "relabelling-record";

enum Doc {
    Correlation(BellCorrelation),
    Behaviour(CtxBehaviour),
    Scenario(CtxScenario),
    Realisation(QuantumBellRealisation),
    Assemblage(Assemblage),
    Certificate(String, Value),
    Record(RelabellingRecord),
}

impl Doc {
    fn type_name(&self) -> &str {
        match self {
            Doc::Correlation(_) => CORRELATION_TYPE,
            Doc::Behaviour(_) => BEHAVIOUR_TYPE,
            Doc::Scenario(_) => SCENARIO_TYPE,
            Doc::Realisation(_) => REALISATION_TYPE,
            Doc::Assemblage(_) => ASSEMBLAGE_TYPE,
            Doc::Certificate(t, _) => t,
            Doc::Record(_) => RECORD_TYPE,
        }
    }
}

fn wrong_type(path: &Path, doc: &Doc, expected: &str) -> CliError {
    CliError::Input(format!(
        "{}: expected {expected}, found a {} document",
        path.display(),
        doc.type_name()
    ))
}

fn load_value(path: &Path, report: &mut Report) -> Result<Value, CliError> {
    let text = read_input(path)?;
    report.add_input(&text);
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(unwrap_report(v))
}

fn classify(path: &Path, v: Value) -> Result<Doc, CliError> {
    let at = |e: CliError| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    };
    let t = v.get("type").and_then(Value::as_str).map(str::to_string);
    let doc = match t.as_deref() {
        Some(CORRELATION_TYPE) => Doc::Correlation(correlation_from_value(&v).map_err(|e| at(e.into()))?),
        Some(BEHAVIOUR_TYPE) => Doc::Behaviour(behaviour_from_value(&v).map_err(|e| at(e.into()))?),
        Some(SCENARIO_TYPE) => Doc::Scenario(scenario_from_value(&v).map_err(|e| at(e.into()))?),
        Some(REALISATION_TYPE) => Doc::Realisation(realisation_from_value(&v).map_err(|e| at(e.into()))?),
        Some(ASSEMBLAGE_TYPE) => Doc::Assemblage(assemblage_from_value(&v).map_err(|e| at(e.into()))?),
        Some(t @ (LOCAL_CERTIFICATE_TYPE | NC_CERTIFICATE_TYPE)) => Doc::Certificate(t.to_string(), v),
        Some(RECORD_TYPE) => Doc::Record(
            serde_json::from_value(v).map_err(|e| at(CliError::Input(e.to_string())))?,
        ),
        Some(other) => return Err(at(CliError::Input(format!("unknown document type {other:?}")))),
        None => return Err(at(CliError::Input("missing \"type\" field".into()))),
    };
    Ok(doc)
}

fn load(path: &Path, report: &mut Report) -> Result<Doc, CliError> {
    let v = load_value(path, report)?;
    classify(path, v)
}

fn load_correlation(path: &Path, report: &mut Report) -> Result<BellCorrelation, CliError> {
    match load(path, report)? {
        Doc::Correlation(p) => Ok(p),
        d => Err(wrong_type(path, &d, CORRELATION_TYPE)),
    }
}

fn load_behaviour(path: &Path, report: &mut Report) -> Result<CtxBehaviour, CliError> {
    match load(path, report)? {
        Doc::Behaviour(q) => Ok(q),
        d => Err(wrong_type(path, &d, BEHAVIOUR_TYPE)),
    }
}

fn load_scenario(path: &Path, report: &mut Report) -> Result<CtxScenario, CliError> {
    match load(path, report)? {
        Doc::Scenario(s) => Ok(s),
        Doc::Behaviour(q) => Ok(q.scenario().clone()),
        d => Err(wrong_type(path, &d, SCENARIO_TYPE)),
    }
}

fn record_to_value(r: &RelabellingRecord) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), RECORD_TYPE.into());
    if let Value::Object(fields) = serde_json::to_value(r).expect("record serialises") {
        m.extend(fields);
    }
    Value::Object(m)
}

fn load_record(path: &Path, report: &mut Report) -> Result<RelabellingRecord, CliError> {
    let text = read_input(path)?;
    report.add_input(&text);
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    // A `reduce` report carries the record as a field.
    let v = match v.get("record") {
        Some(r) => r.clone(),
        None => v,
    };
    match classify(path, v)? {
        Doc::Record(r) => Ok(r),
        d => Err(wrong_type(path, &d, RECORD_TYPE)),
    }
}

fn rstr(r: &crate::Rational) -> Value {
    Value::String(r.to_string())
}

fn certificate_check(report: &mut Report, cert: &CertificateReport) -> Result<(), CliError> {
    report.set("certificate_check", cert_report_value(cert));
    if cert.valid() {
        Ok(())
    } else {
        Err(CliError::Internal(format!(
            "produced certificate failed its own verification: {}",
            cert.defects.join("; ")
        )))
    }
}

fn cert_report_value(cert: &CertificateReport) -> Value {
    json!({
        "valid": cert.valid(),
        "checks": cert.checks,
        "defects": cert.defects,
    })
}

pub(super) fn execute(command: &Command, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new(&command.name());
    match command {
        Command::Validate { input } => validate(input, settings, &mut report)?,
        Command::Map { input } => {
            let p = load_correlation(input, &mut report)?;
            let m = bell_to_ctx(&p)?;
            report.set("index_A", m.index_a.clone().into());
            report.note(format!(
                "{} preparations, {} equivalences, index_A = {:?}",
                m.behaviour.scenario().num_preps(),
                m.behaviour.scenario().equivalences().len(),
                m.index_a
            ));
            report.document(emit_behaviour(&m.behaviour));
        }
        Command::Unmap { input, index_a } => {
            let q = load_behaviour(input, &mut report)?;
            let index = match (index_a, q.scenario().index_a()) {
                (Some(i), _) => i.clone(),
                (None, Some(i)) => i.to_vec(),
                (None, None) => {
                    return Err(CliError::Input(
                        "unmap needs --index-A (the behaviour carries no index_A)".into(),
                    ))
                }
            };
            let p = ctx_to_bell(&q, &index)?;
            report.set("index_A", index.into());
            report.document(emit_correlation(&p));
        }
        Command::Reduce { input } => {
            let p = load_correlation(input, &mut report)?;
            match reduce_tau(&p) {
                Ok((reduced, record)) => {
                    report.verdict(if record.is_identity() { "unchanged" } else { "reduced" });
                    report.note(format!(
                        "A = {:?} reduced to {:?}; removed inputs {:?}",
                        record.original_a, record.reduced_a, record.removed_inputs
                    ));
                    report.set("record", record_to_value(&record));
                    report.document(emit_correlation(&reduced));
                }
                Err(MappingError::FullyDeterministic(record)) => {
                    report.verdict("fully-deterministic");
                    report.note("every Alice input is deterministic; no reduced correlation exists");
                    report.set("record", record_to_value(&record));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::EmbedBell { input, record } => {
            let p = load_correlation(input, &mut report)?;
            let record = load_record(record, &mut report)?;
            report.document(emit_correlation(&embed_bell(&p, &record)?));
        }
        Command::NormalForm { input } => {
            let s = load_scenario(input, &mut report)?;
            let forms: Vec<Value> = s
                .equivalences()
                .iter()
                .map(|eq| {
                    let nf = match single_equivalence_normal_form(eq) {
                        NormalForm::Reduced(r) => equivalence_to_value(&r),
                        NormalForm::Vacuous => "vacuous".into(),
                    };
                    json!({ "equivalence": equivalence_to_value(eq), "normal_form": nf })
                })
                .collect();
            report.note(format!("{} equivalences normalised", forms.len()));
            report.set("normal_forms", forms.into());
        }
        Command::EmbedPreps { input } => {
            let q = load_behaviour(input, &mut report)?;
            let e = embed_repeated_preparations(&q)?;
            let clones: Map<String, Value> = e
                .clones
                .iter()
                .map(|(new, orig)| (new.to_string(), orig.to_string().into()))
                .collect();
            report.note(format!(
                "{} preparations after cloning {} labels",
                e.behaviour.scenario().num_preps(),
                clones.len()
            ));
            report.set("clones", Value::Object(clones));
            report.document(emit_behaviour(&e.behaviour));
        }
        Command::Blend { input, n } => {
            let p = load_correlation(input, &mut report)?;
            report.set("n", (*n).into());
            report.document(emit_correlation(&interior_blend(&p, *n)?));
        }
        Command::Check {
            kind,
            inputs,
            behaviour,
        } => {
            if inputs.len() == 1 {
                return check_one(*kind, &inputs[0], behaviour.as_deref(), settings, report);
            }
            if behaviour.is_some() {
                return Err(CliError::Input("--behaviour takes a single scenario input".into()));
            }
            return check_batch(*kind, inputs, settings, report);
        }
        Command::Facets { input } => {
            let s = load_scenario(input, &mut report)?;
            let poly = nc_polytope(&s, &settings.budget)?;
            let positivity = poly.positivity_facets(&s).len();
            report.set("dimension", poly.dimension.into());
            report.set("vertex_count", poly.vertices.len().into());
            report.set("facet_count", poly.facets.len().into());
            report.set("positivity_facet_count", positivity.into());
            report.set("nontrivial_facet_count", (poly.facets.len() - positivity).into());
            report.note(format!(
                "{} facets ({positivity} positivity, {} nontrivial), {} vertices, dimension {}",
                poly.facets.len(),
                poly.facets.len() - positivity,
                poly.vertices.len(),
                poly.dimension
            ));
            report.document(emit_facets(&poly, &s));
        }
        Command::Vertices { input } => {
            let s = load_scenario(input, &mut report)?;
            let poly = nc_polytope(&s, &settings.budget)?;
            report.set("vertex_count", poly.vertices.len().into());
            report.note(format!("{} vertices", poly.vertices.len()));
            report.document(emit_vertices(&poly, &s));
        }
        Command::Assemblage { input } => {
            let r = match load(input, &mut report)? {
                Doc::Realisation(r) => r,
                d => return Err(wrong_type(input, &d, REALISATION_TYPE)),
            };
            let (asm, steered) = assemblage_from_bell(&r, settings.tolerance)?;
            report.set("averaging_residual", asm.averaging_residual().into());
            report.set("behaviour", json!(steered.q));
            report.document(to_pretty(&assemblage_to_value(&asm)));
        }
        Command::Hjw { input, bob } => hjw(input, bob.as_deref(), settings, &mut report)?,
        Command::VerifyCert { certificate, input } => {
            verify_cert(certificate, input, settings, &mut report)?
        }
        Command::Snap { input } => {
            let r = match load(input, &mut report)? {
                Doc::Realisation(r) => r,
                d => return Err(wrong_type(input, &d, REALISATION_TYPE)),
            };
            let tables = realisation_to_tables(&r, settings.tolerance)?;
            report.set("table", json!(tables.table));
            if let Some(v) = chsh_value(&tables) {
                report.set("chsh", v.into());
                report.note(format!("CHSH value {v:.10}"));
            }
            match snap_correlation(&tables, settings.snap_den, settings.tolerance) {
                Some(p) => {
                    report.verdict("snapped");
                    report.document(emit_correlation(&p));
                }
                None => {
                    report.verdict("not-snapped");
                    report.note(format!(
                        "no normalised rational table with denominators <= {} within {:e}",
                        settings.snap_den, settings.tolerance
                    ));
                }
            }
        }
    }
    Ok(report)
}

fn validate(input: &Path, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let doc = load(input, report)?;
    report.set("document_type", doc.type_name().into());
    report.verdict("valid");
    match &doc {
        Doc::Correlation(p) => {
            let ns = check_no_signalling(p);
            report.set("A", p.scenario().outcomes_a().to_vec().into());
            report.set("B", p.scenario().outcomes_b().to_vec().into());
            report.set("no_signalling", ns.no_signalling.into());
            report.set("max_signalling_residual", rstr(&ns.max_residual));
        }
        Doc::Behaviour(q) => {
            let res = equivalence_residual(q)?;
            report.set("preps", q.scenario().num_preps().into());
            report.set("in_contextual_set", res.iter().all(|r| r.is_zero()).into());
            report.set("equivalence_residuals", res.iter().map(rstr).collect());
        }
        Doc::Scenario(s) => {
            report.set("preps", s.num_preps().into());
            report.set("equivalences", s.equivalences().len().into());
        }
        Doc::Realisation(r) => r.validate(settings.tolerance)?,
        Doc::Assemblage(a) => {
            a.validate(settings.tolerance)?;
            report.set("averaging_residual", a.averaging_residual().into());
        }
        Doc::Certificate(..) | Doc::Record(_) => {
            report.note("syntax only; use verify-cert to check a certificate against data");
        }
    }
    report.note(format!("{} document is valid", doc.type_name()));
    Ok(())
}

fn check_one(
    kind: CheckKind,
    input: &Path,
    behaviour: Option<&Path>,
    settings: &Settings,
    mut report: Report,
) -> Result<Report, CliError> {
    let doc = load(input, &mut report)?;
    if behaviour.is_some() && kind != CheckKind::Nc {
        return Err(CliError::Input("--behaviour only applies to check nc".into()));
    }
    match kind {
        CheckKind::Ns => {
            let Doc::Correlation(p) = doc else {
                return Err(wrong_type(input, &doc, CORRELATION_TYPE));
            };
            let ns = check_no_signalling(&p);
            report.verdict(if ns.no_signalling { "no-signalling" } else { "signalling" });
            report.set("max_residual", rstr(&ns.max_residual));
            report.note(format!("max signalling residual {}", ns.max_residual));
        }
        CheckKind::Ctxset => {
            let Doc::Behaviour(q) = doc else {
                return Err(wrong_type(input, &doc, BEHAVIOUR_TYPE));
            };
            let res = equivalence_residual(&q)?;
            let member = res.iter().all(|r| r.is_zero());
            report.verdict(if member { "member" } else { "non-member" });
            report.set("equivalence_residuals", res.iter().map(rstr).collect());
            if let Some(worst) = res.iter().max() {
                report.note(format!("largest equivalence residual {worst}"));
            }
        }
        CheckKind::Local => {
            let Doc::Correlation(p) = doc else {
                return Err(wrong_type(input, &doc, CORRELATION_TYPE));
            };
            let verdict = check_local(&p, &settings.budget)?;
            report.verdict(if verdict.is_member() { "member" } else { "non-member" });
            if let LocalVerdict::Nonlocal { violation, .. } = &verdict {
                report.set("violation", rstr(violation));
                report.note(format!("violates the certificate inequality by {violation}"));
            }
            let cert = local_verdict_to_value(&verdict);
            report.output_text(emit(&cert));
            report.set("certificate", cert);
            certificate_check(&mut report, &verify_local(&p, &verdict, &settings.budget)?)?;
        }
        CheckKind::Nc => {
            let q = match (doc, behaviour) {
                (Doc::Behaviour(q), None) => q,
                (Doc::Correlation(p), None) => {
                    report.set("mapped_from_correlation", true.into());
                    bell_to_ctx(&p)?.behaviour
                }
                (Doc::Scenario(s), Some(path)) => behaviour_for(&s, path, input, &mut report)?,
                (Doc::Behaviour(q), Some(path)) => {
                    behaviour_for(q.scenario(), path, input, &mut report)?
                }
                (doc, _) => return Err(wrong_type(input, &doc, BEHAVIOUR_TYPE)),
            };
            let verdict = check_noncontextual(&q, &settings.budget)?;
            report.verdict(if verdict.is_member() { "member" } else { "non-member" });
            if let NcVerdict::Contextual { violation, .. } = &verdict {
                report.set("violation", rstr(violation));
                report.note(format!("violates the certificate inequality by {violation}"));
            }
            let cert = nc_verdict_to_value(q.scenario(), &verdict);
            report.output_text(emit(&cert));
            report.set("certificate", cert);
            certificate_check(&mut report, &verify_noncontextual(&q, &verdict, &settings.budget)?)?;
        }
    }
    Ok(report)
}

/// Loads `path` and checks that it is a behaviour on scenario `s`.
fn behaviour_for(
    s: &CtxScenario,
    path: &Path,
    scenario_path: &Path,
    report: &mut Report,
) -> Result<CtxBehaviour, CliError> {
    let q = load_behaviour(path, report)?;
    if q.scenario() != s {
        return Err(CliError::Input(format!(
            "{}: behaviour scenario differs from {}",
            path.display(),
            scenario_path.display()
        )));
    }
    Ok(q)
}

fn check_batch(
    kind: CheckKind,
    inputs: &[PathBuf],
    settings: &Settings,
    mut report: Report,
) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let name = Command::Check {
        kind,
        inputs: Vec::new(),
        behaviour: None,
    }
    .name();
    let results: Vec<Report> = pool.install(|| {
        inputs
            .par_iter()
            .map(|path| {
                check_one(kind, path, None, settings, Report::new(&name))
                    .unwrap_or_else(|e| Report::failure(&name, &e))
            })
            .collect()
    });
    let mut code = 0;
    let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
    let mut items = Vec::with_capacity(results.len());
    for (path, r) in inputs.iter().zip(&results) {
        code = code.max(r.code());
        *counts.entry(r.verdict_str().to_string()).or_default() += 1;
        for digest in r.inputs() {
            report.push_input_digest(digest.clone());
        }
        let mut item = Map::new();
        item.insert("input".into(), path.display().to_string().into());
        item.insert("verdict".into(), r.verdict_str().into());
        item.extend(r.fields().clone());
        items.push(Value::Object(item));
    }
    report.verdict("batch");
    report.set_code(code);
    report.note(
        counts
            .iter()
            .map(|(v, n)| format!("{n} {v}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    report.set("verdict_counts", json!(counts));
    report.set("results", Value::Array(items));
    Ok(report)
}

fn hjw(input: &Path, bob: Option<&Path>, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let tol = settings.tolerance;
    let (asm, source) = match load(input, report)? {
        Doc::Assemblage(a) => (a, None),
        Doc::Realisation(r) => (assemblage_from_bell(&r, tol)?.0, Some(r)),
        d => return Err(wrong_type(input, &d, "an assemblage or quantum-realisation")),
    };
    let bob_povms = match bob {
        Some(path) => match load(path, report)? {
            Doc::Realisation(r) => Some(r.n),
            d => return Err(wrong_type(path, &d, REALISATION_TYPE)),
        },
        None => source.as_ref().map(|r| r.n.clone()),
    };
    let h = hjw_construct(&asm, tol)?;
    let res = verify_steering(&h, &asm)?;
    report.set("hjw", hjw_to_value(&h));
    report.set(
        "residuals",
        json!({
            "steering": res.steering,
            "completeness": res.completeness,
            "min_eigenvalue": res.min_eigenvalue,
        }),
    );
    report.note(format!(
        "rank {}; steering residual {:e}, completeness residual {:e}",
        h.r, res.steering, res.completeness
    ));
    let mut ok = res.steering <= tol && res.completeness <= tol && res.min_eigenvalue >= -tol;
    if let Some(n) = bob_povms {
        let realised = h.with_bob(n);
        if let Some(src) = &source {
            let diff = realisation_to_tables(&realised, tol)?
                .max_difference(&realisation_to_tables(src, tol)?);
            report.set("table_difference", diff.into());
            report.note(format!("largest table difference {diff:e}"));
            ok &= diff <= tol;
        }
        report.document(to_pretty(&realisation_to_value(&realised)));
    }
    if !ok {
        return Err(CliError::Internal(format!(
            "steering construction exceeds tolerance {tol:e}: {res:?}"
        )));
    }
    report.verdict("verified");
    Ok(())
}

fn verify_cert(
    certificate: &Path,
    input: &Path,
    settings: &Settings,
    report: &mut Report,
) -> Result<(), CliError> {
    let cert = load_value(certificate, report)?;
    // A `check` report carries the certificate as a field.
    let cert = match cert.get("certificate") {
        Some(c) => c.clone(),
        None => cert,
    };
    let (kind, cert) = match classify(certificate, cert)? {
        Doc::Certificate(t, v) => (t, v),
        d => return Err(wrong_type(certificate, &d, "a certificate")),
    };
    let data = load(input, report)?;
    let checked = if kind == LOCAL_CERTIFICATE_TYPE {
        let Doc::Correlation(p) = data else {
            return Err(wrong_type(input, &data, CORRELATION_TYPE));
        };
        let verdict = local_verdict_from_value(&cert, p.scenario())?;
        verify_local(&p, &verdict, &settings.budget)?
    } else {
        let q = match data {
            Doc::Behaviour(q) => q,
            Doc::Correlation(p) => bell_to_ctx(&p)?.behaviour,
            d => return Err(wrong_type(input, &d, BEHAVIOUR_TYPE)),
        };
        let verdict = nc_verdict_from_value(&cert, q.scenario())?;
        verify_noncontextual(&q, &verdict, &settings.budget)?
    };
    report.verdict(if checked.valid() { "accepted" } else { "rejected" });
    for d in &checked.defects {
        report.note(d.clone());
    }
    report.set("certificate_type", kind.into());
    report.set("check", cert_report_value(&checked));
    Ok(())
}
