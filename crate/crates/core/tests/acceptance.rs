//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use bellctx::fixtures;
use bellctx::geometry::{
    check_local, check_noncontextual, verify_local, verify_noncontextual, Budget, CtxInequality,
    LocalVerdict, NcVerdict,
};
use bellctx::mapping::{
    bell_to_ctx, ctx_to_bell, embed_bell, embed_repeated_preparations, reduce_tau,
    single_equivalence_normal_form, MappingError, NormalForm,
};
use bellctx::model::{
    check_no_signalling, equivalence_residual, marginals, BellCorrelation, BellScenario,
    CtxBehaviour, Mixture, PrepLabel, PreparationEquivalence,
};
use bellctx::quantum::{
    assemblage_from_bell, chsh_value, hjw_construct, realisation_to_tables, tsirelson_realisation,
    verify_steering, QuantumBellRealisation, TOLERANCE,
};
use bellctx::Rational;
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit_s: u64) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < limit_s as f64, || format!("took {t:.1} s, limit {limit_s} s"))?;
    Ok(t)
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = bellctx::cli::run(std::iter::once("bellctx").chain(args.iter().copied()));
    ensure(out.code == 0, || format!("exit {}: {}", out.code, out.stderr.trim()))?;
    serde_json::from_str(&out.stdout).map_err(|e| e.to_string())
}

fn plain(terms: &[(usize, i64, i64)]) -> Mixture {
    terms
        .iter()
        .map(|&(n, a, b)| (PrepLabel::Plain(n), Rational::frac(a, b)))
        .collect()
}

/// The reference facet of the H polytope, in full table layout:
/// 2 − q(1|1,2) − 3q(1|2,1) + 2q(1|3,1) + 2q(1|3,2) ≥ 0.
fn reference_facet(q: &CtxBehaviour) -> CtxInequality {
    let s = q.scenario();
    let mut coefficients = vec![Rational::zero(); s.table_len()];
    for &(z, y, c) in &[(1, 2, -1), (2, 1, -3), (3, 1, 2), (3, 2, 2)] {
        coefficients[s.index(z - 1, y, 1)] = Rational::from_integer(c);
    }
    CtxInequality {
        coefficients,
        constant: Rational::from_integer(2),
    }
}

fn facet_enumeration() -> Check {
    let start = Instant::now();
    let report = cli(&["facets", &data("h-scenario.json")])?;
    let t = within(start, 60)?;
    let doc = &report["document"];
    let count = doc["facet_count"].as_u64().unwrap_or(0);
    let positivity = report["positivity_facet_count"].as_u64().unwrap_or(0);
    let nontrivial = report["nontrivial_facet_count"].as_u64().unwrap_or(0);
    ensure(count == 60, || format!("{count} facets"))?;
    ensure(positivity + nontrivial == count, || "positivity split missing".into())?;
    let names: Vec<&str> = doc["coordinates"]
        .as_array()
        .ok_or("no coordinate legend")?
        .iter()
        .filter_map(Value::as_str)
        .collect();
    let mut row = vec![0i64; names.len() + 1];
    row[0] = 2;
    for (name, c) in [("q(1|1,2)", -1), ("q(1|2,1)", -3), ("q(1|3,1)", 2), ("q(1|3,2)", 2)] {
        let i = names.iter().position(|n| *n == name).ok_or(format!("{name} not in legend"))?;
        row[i + 1] = c;
    }
    let found = doc["facets"]
        .as_array()
        .ok_or("no facet list")?
        .iter()
        .any(|f| f.as_array().map(|v| v.iter().map(|e| e.as_i64()).eq(row.iter().map(|&c| Some(c)))) == Some(true));
    ensure(found, || "reference facet not among the facets".into())?;
    Ok(format!("{count} facets ({positivity} positivity, {nontrivial} nontrivial), reference facet present, {t:.2} s"))
}

fn contextual_violation() -> Check {
    let q = fixtures::q_c();
    let facet = reference_facet(&q);
    let value = facet.evaluate(&q);
    ensure(value == Rational::frac(-1, 40), || format!("reference facet gives {value}"))?;
    let budget = Budget::default();
    let verdict = check_noncontextual(&q, &budget).map_err(|e| e.to_string())?;
    let NcVerdict::Contextual { inequality, violation } = &verdict else {
        return Err("q_c declared non-contextual".into());
    };
    ensure(*violation == Rational::frac(1, 40), || format!("violation {violation}"))?;
    ensure(inequality.canonical() == facet, || "certificate is not the reference facet".into())?;
    let check = verify_noncontextual(&q, &verdict, &budget).map_err(|e| e.to_string())?;
    ensure(check.valid(), || format!("certificate rejected: {:?}", check.defects))?;
    let report = cli(&["check", "nc", &data("h-scenario.json"), "--behaviour", &data("qc.json")])?;
    ensure(report["violation"] == "1/40", || format!("CLI violation {}", report["violation"]))?;
    Ok("violation 1/40, certificate equals the reference facet and verifies".into())
}

fn repeated_preparations() -> Check {
    let e = embed_repeated_preparations(&fixtures::q_c()).map_err(|e| e.to_string())?;
    ensure(e.behaviour == fixtures::q_c_prime(), || "embedding differs from q′_c".into())?;
    let budget = Budget::default();
    let verdict = check_noncontextual(&e.behaviour, &budget).map_err(|e| e.to_string())?;
    ensure(verdict.is_member(), || "q′_c declared contextual".into())?;
    let check = verify_noncontextual(&e.behaviour, &verdict, &budget).map_err(|e| e.to_string())?;
    ensure(check.valid(), || format!("found model rejected: {:?}", check.defects))?;
    let reference = NcVerdict::NonContextual(fixtures::q_c_prime_model());
    let check = verify_noncontextual(&e.behaviour, &reference, &budget).map_err(|e| e.to_string())?;
    ensure(check.valid(), || format!("reference model rejected: {:?}", check.defects))?;
    let counts = (check.count("data"), check.count("equivalence"), check.count("normalisation"));
    ensure(counts == (14, 8, 7), || format!("constraint counts {counts:?}"))?;
    Ok("q′_c reproduced, member, reference model satisfies 14 data, 8 equivalence and 7 normalisation constraints".into())
}

fn normal_forms() -> Check {
    let eq = PreparationEquivalence::new(plain(&[(1, 1, 2), (2, 1, 2)]), plain(&[(1, 1, 3), (3, 1, 3), (4, 1, 3)]))
        .map_err(|e| e.to_string())?;
    let expected = PreparationEquivalence::new(plain(&[(1, 1, 4), (2, 3, 4)]), plain(&[(3, 1, 2), (4, 1, 2)]))
        .map_err(|e| e.to_string())?;
    let NormalForm::Reduced(nf) = single_equivalence_normal_form(&eq) else {
        return Err("normal form is vacuous".into());
    };
    ensure(nf == expected, || format!("normal form {nf:?}"))?;
    let e = embed_repeated_preparations(&fixtures::q_c()).map_err(|e| e.to_string())?;
    let decompositions = vec![
        plain(&[(1, 3, 8), (2, 5, 8)]),
        plain(&[(3, 5, 12), (4, 5, 12), (6, 1, 6)]),
        plain(&[(5, 1, 2), (7, 1, 2)]),
    ];
    ensure(e.decompositions == decompositions, || format!("decompositions {:?}", e.decompositions))?;
    let clones: Vec<_> = e.clones.iter().map(|(c, o)| (*c, *o)).collect();
    let want = vec![(PrepLabel::Plain(6), PrepLabel::Plain(1)), (PrepLabel::Plain(7), PrepLabel::Plain(3))];
    ensure(clones == want, || format!("clones {clones:?}"))?;
    ensure(e.behaviour.scenario() == &fixtures::scenario_h_prime(), || "embedded scenario differs".into())?;
    Ok("¼P1+¾P2 ≃ ½(P3+P4); H → H′ with clones P6←P1, P7←P3".into())
}

fn round_trips() -> Check {
    let start = Instant::now();
    let mut rng = rng(5);
    for i in 0..1000 {
        let s = random_scenario(&mut rng, 1, true);
        let p = random_ns(&mut rng, &s);
        let m = bell_to_ctx(&p).map_err(|e| format!("case {i}: {e}"))?;
        let back = ctx_to_bell(&m.behaviour, &m.index_a).map_err(|e| format!("case {i}: {e}"))?;
        ensure(back == p, || format!("case {i}: Λ⁻¹Λ(p) ≠ p"))?;
    }
    for i in 0..1000 {
        let s = random_scenario(&mut rng, 1, true);
        let (q, index_a) = random_ns_form_behaviour(&mut rng, &s);
        let p = ctx_to_bell(&q, &index_a).map_err(|e| format!("case {i}: {e}"))?;
        let m = bell_to_ctx(&p).map_err(|e| format!("case {i}: {e}"))?;
        ensure(m.behaviour == q, || format!("case {i}: ΛΛ⁻¹(q) ≠ q"))?;
        ensure(m.index_a == index_a, || format!("case {i}: index_A changed"))?;
    }
    let t = within(start, 30)?;
    Ok(format!("1000 + 1000 exact round trips, {t:.2} s"))
}

fn classicality_preserved() -> Check {
    let start = Instant::now();
    let budget = Budget::default();
    let mut rng = rng(6);
    for i in 0..200 {
        let s = random_scenario(&mut rng, 1, true);
        let p = random_local(&mut rng, &s);
        let q = bell_to_ctx(&p).map_err(|e| format!("local {i}: {e}"))?.behaviour;
        let verdict = check_noncontextual(&q, &budget).map_err(|e| format!("local {i}: {e}"))?;
        ensure(verdict.is_member(), || format!("local {i}: image is contextual"))?;
        let check = verify_noncontextual(&q, &verdict, &budget).map_err(|e| e.to_string())?;
        ensure(check.valid(), || format!("local {i}: model rejected {:?}", check.defects))?;
    }
    for i in 0..200 {
        let s = random_scenario(&mut rng, 1, true);
        let (q, index_a) = random_nc_behaviour(&mut rng, &s);
        let p = ctx_to_bell(&q, &index_a).map_err(|e| format!("nc {i}: {e}"))?;
        let verdict = check_local(&p, &budget).map_err(|e| format!("nc {i}: {e}"))?;
        ensure(verdict.is_member(), || format!("nc {i}: preimage is nonlocal"))?;
        let check = verify_local(&p, &verdict, &budget).map_err(|e| e.to_string())?;
        ensure(check.valid(), || format!("nc {i}: weights rejected {:?}", check.defects))?;
    }
    let q = bell_to_ctx(&fixtures::pr()).map_err(|e| e.to_string())?.behaviour;
    let verdict = check_noncontextual(&q, &budget).map_err(|e| e.to_string())?;
    let NcVerdict::Contextual { violation, .. } = &verdict else {
        return Err("PR image declared non-contextual".into());
    };
    let check = verify_noncontextual(&q, &verdict, &budget).map_err(|e| e.to_string())?;
    ensure(check.valid(), || format!("PR certificate rejected {:?}", check.defects))?;
    let t = within(start, 120)?;
    Ok(format!("200 local → NC, 200 NC → local, PR image contextual (violation {violation}), {t:.2} s"))
}

/// Λ applied entrywise without the no-signalling gate.
fn lambda_by_formula(p: &BellCorrelation) -> CtxBehaviour {
    let s = p.scenario();
    let m = marginals(p);
    let alice: Vec<Vec<Rational>> = s
        .outcomes_a()
        .iter()
        .enumerate()
        .map(|(i, &n)| (1..=n).map(|a| m.alice(a, i + 1).clone()).collect())
        .collect();
    let scenario = ns_scenario(&alice, s.outcomes_b());
    CtxBehaviour::from_fn(scenario, |l, y, b| match *l {
        PrepLabel::Outcome { a, x } => p.get(a, b, x, y).checked_div(&alice[x - 1][a - 1]).expect("positive marginal"),
        PrepLabel::Plain(_) => unreachable!(),
    })
    .expect("rows are distributions")
}

fn full_support(rng: &mut TestRng, s: &BellScenario) -> BellCorrelation {
    let half = Rational::frac(1, 2);
    combine(s, &[(random_ns(rng, s), half.clone()), (uniform(s), half)])
}

fn signalling_detection() -> Check {
    let mut rng = rng(7);
    for i in 0..200 {
        let s = random_scenario(&mut rng, 1, true);
        let p = random_ns(&mut rng, &s);
        let q = bell_to_ctx(&p).map_err(|e| format!("case {i}: {e}"))?.behaviour;
        let r = equivalence_residual(&q).map_err(|e| e.to_string())?;
        ensure(r.iter().all(Rational::is_zero), || format!("case {i}: residual {r:?}"))?;
    }
    for i in 0..50 {
        let s = random_scenario(&mut rng, 2, false);
        let base = full_support(&mut rng, &s);
        let x0 = rng.gen_range(1..=s.inputs_x());
        let y0 = rng.gen_range(1..=s.inputs_y());
        let a0 = rng.gen_range(1..=s.outcomes_a()[x0 - 1]);
        let mut bs: Vec<usize> = (1..=s.outcomes_b()[y0 - 1]).collect();
        bs.shuffle(&mut rng);
        let (b0, b1) = (bs[0], bs[1]);
        let eps = base.get(a0, b1, x0, y0) * Rational::frac(rng.gen_range(1..=4), 4);
        let p = BellCorrelation::from_fn(s.clone(), |a, b, x, y| {
            let v = base.get(a, b, x, y).clone();
            if (a, x, y) != (a0, x0, y0) {
                v
            } else if b == b0 {
                v + &eps
            } else if b == b1 {
                v - &eps
            } else {
                v
            }
        })
        .map_err(|e| e.to_string())?;
        let ns = check_no_signalling(&p);
        ensure(ns.max_residual == eps, || format!("case {i}: NS residual {} vs {eps}", ns.max_residual))?;
        ensure(
            matches!(bell_to_ctx(&p), Err(MappingError::SignallingInput(ref r)) if *r == eps),
            || format!("case {i}: forward map accepted a signalling table"),
        )?;
        let residual = equivalence_residual(&lambda_by_formula(&p)).map_err(|e| e.to_string())?;
        for (k, r) in residual.iter().enumerate() {
            // Equivalence k pairs input 1 with input k + 2.
            let touched = x0 == 1 || x0 == k + 2;
            let want = if touched { eps.clone() } else { Rational::zero() };
            ensure(*r == want, || format!("case {i}: equivalence {k} residual {r}, planted {eps}"))?;
        }
    }
    Ok("200 NS tables with zero residual, 50 planted shifts recovered exactly".into())
}

/// A kept input (base input, base outcome per position) or a deterministic
/// one (certain outcome, outcome count).
type Slot = Result<(usize, Vec<Option<usize>>), (usize, usize)>;

/// Inserts deterministic inputs and zero-probability outcomes into `base`.
fn plant(rng: &mut TestRng, base: &BellCorrelation) -> BellCorrelation {
    let s = base.scenario();
    let m = marginals(base);
    let mut slots: Vec<Slot> = Vec::new();
    for (i, &n) in s.outcomes_a().iter().enumerate() {
        let mut pos: Vec<Option<usize>> = (1..=n).map(Some).collect();
        for _ in 0..rng.gen_range(0..=1) {
            let at = rng.gen_range(0..=pos.len());
            pos.insert(at, None);
        }
        slots.push(Ok((i + 1, pos)));
    }
    for _ in 0..rng.gen_range(1..=2) {
        let n = rng.gen_range(1..=3);
        let at = rng.gen_range(0..=slots.len());
        slots.insert(at, Err((rng.gen_range(1..=n), n)));
    }
    if slots.iter().all(|sl| matches!(sl, Ok((_, pos)) if pos.iter().all(Option::is_some)) || sl.is_err()) {
        if let Some(Ok((_, pos))) = slots.iter_mut().find(|sl| sl.is_ok()) {
            pos.push(None);
        }
    }
    let outcomes_a = slots
        .iter()
        .map(|sl| match sl {
            Ok((_, pos)) => pos.len(),
            Err((_, n)) => *n,
        })
        .collect();
    let big = BellScenario::new(outcomes_a, s.outcomes_b().to_vec()).expect("valid shape");
    BellCorrelation::from_fn(big, |a, b, x, y| match &slots[x - 1] {
        Ok((xb, pos)) => match pos[a - 1] {
            Some(ab) => base.get(ab, b, *xb, y).clone(),
            None => Rational::zero(),
        },
        Err((c, _)) if a == *c => m.bob(b, y).clone(),
        Err(_) => Rational::zero(),
    })
    .expect("planted table is normalised")
}

fn tau_reduction() -> Check {
    let mut rng = rng(8);
    for i in 0..100 {
        let s = random_scenario(&mut rng, 1, false);
        let base = full_support(&mut rng, &s);
        let p = plant(&mut rng, &base);
        let (reduced, record) = reduce_tau(&p).map_err(|e| format!("case {i}: {e}"))?;
        ensure(reduced == base, || format!("case {i}: reduced table differs from the base"))?;
        let m = marginals(&reduced);
        for (x, &n) in reduced.scenario().outcomes_a().iter().enumerate() {
            for a in 1..=n {
                let v = m.alice(a, x + 1);
                ensure(v.is_positive() && v < &Rational::one(), || {
                    format!("case {i}: reduced marginal p_A({a}|{}) = {v}", x + 1)
                })?;
            }
        }
        let back = embed_bell(&reduced, &record).map_err(|e| format!("case {i}: {e}"))?;
        ensure(back == p, || format!("case {i}: embedding does not restore p"))?;
    }
    Ok("100 planted tables reduced to their base and restored exactly".into())
}

fn steering_round_trip(r: &QuantumBellRealisation) -> Result<(f64, f64, f64), String> {
    let (asm, _) = assemblage_from_bell(r, TOLERANCE).map_err(|e| e.to_string())?;
    let h = hjw_construct(&asm, TOLERANCE).map_err(|e| e.to_string())?;
    let res = verify_steering(&h, &asm).map_err(|e| e.to_string())?;
    let rebuilt = h.with_bob(r.n.clone());
    let want = realisation_to_tables(r, TOLERANCE).map_err(|e| e.to_string())?;
    let got = realisation_to_tables(&rebuilt, TOLERANCE).map_err(|e| e.to_string())?;
    Ok((got.max_difference(&want), res.steering, res.completeness))
}

fn steering_reconstruction() -> Check {
    let start = Instant::now();
    let mut rng = rng(9);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for d in 2..=4 {
        for i in 0..20 {
            let da = rng.gen_range(1..=d);
            let r = random_realisation(&mut rng, da, d);
            let (table, steering, completeness) = steering_round_trip(&r).map_err(|e| format!("d={d} case {i}: {e}"))?;
            ensure(table <= 1e-9 && steering <= 1e-9 && completeness <= 1e-10, || {
                format!("d={d} case {i}: table {table:e}, steering {steering:e}, completeness {completeness:e}")
            })?;
            worst = (worst.0.max(table), worst.1.max(steering), worst.2.max(completeness));
        }
    }
    let ts = tsirelson_realisation();
    let (table, steering, completeness) = steering_round_trip(&ts)?;
    ensure(table <= 1e-9 && steering <= 1e-9 && completeness <= 1e-10, || "Tsirelson round trip".into())?;
    let chsh = chsh_value(&realisation_to_tables(&ts, TOLERANCE).map_err(|e| e.to_string())?).ok_or("not CHSH shaped")?;
    let gap = (chsh - 2.0 * 2f64.sqrt()).abs();
    ensure(gap <= 1e-10, || format!("CHSH {chsh}"))?;
    let t = within(start, 60)?;
    Ok(format!(
        "60 realisations, max table error {:.1e}, steering {:.1e}, completeness {:.1e}; CHSH 2√2 within {gap:.1e}; {t:.2} s",
        worst.0, worst.1, worst.2
    ))
}

fn small_scenario(rng: &mut TestRng) -> BellScenario {
    let a = (0..rng.gen_range(2..=3)).map(|_| rng.gen_range(2..=3)).collect();
    BellScenario::new(a, vec![2, 2]).expect("valid shape")
}

fn tamper(rng: &mut TestRng, kind: usize, budget: &Budget) -> Result<(bool, String), String> {
    let delta = Rational::frac(1, rng.gen_range(2..=20));
    match kind {
        0..=2 => {
            let s = random_scenario(rng, 2, false);
            let (p, verdict) = loop {
                let p = if kind == 0 { random_local(rng, &s) } else { pr_lift(rng, &s).expect("room for a PR box") };
                let v = check_local(&p, budget).map_err(|e| e.to_string())?;
                if v.is_member() == (kind == 0) {
                    break (p, v);
                }
            };
            let (bad, marker) = match verdict {
                LocalVerdict::Local(mut ws) => {
                    let k = rng.gen_range(0..ws.len());
                    ws[k].1 = -ws[k].1.clone();
                    (LocalVerdict::Local(ws), format!("weight {k} "))
                }
                LocalVerdict::Nonlocal { mut inequality, violation } if kind == 1 => {
                    inequality.constant -= &delta;
                    (LocalVerdict::Nonlocal { inequality, violation }, "local vertex".into())
                }
                LocalVerdict::Nonlocal { inequality, violation } => {
                    (LocalVerdict::Nonlocal { inequality, violation: violation + &delta }, "claimed violation".into())
                }
            };
            let check = verify_local(&p, &bad, budget).map_err(|e| e.to_string())?;
            Ok((!check.valid() && check.defects.iter().any(|d| d.contains(&marker)), marker))
        }
        _ => {
            let q = if kind == 3 {
                let s = random_scenario(rng, 1, true);
                random_nc_behaviour(rng, &s).0
            } else {
                let s = small_scenario(rng);
                bell_to_ctx(&pr_lift(rng, &s).expect("room for a PR box")).map_err(|e| e.to_string())?.behaviour
            };
            let verdict = check_noncontextual(&q, budget).map_err(|e| e.to_string())?;
            let (bad, marker) = match verdict {
                NcVerdict::NonContextual(mut model) => {
                    let nonzero: Vec<(usize, usize)> = model
                        .mu
                        .iter()
                        .enumerate()
                        .flat_map(|(z, row)| row.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(move |(k, _)| (z, k)))
                        .collect();
                    let &(z, k) = nonzero.choose(rng).expect("measures are normalised");
                    model.mu[z][k] = -model.mu[z][k].clone();
                    let label = q.scenario().preps()[z];
                    (NcVerdict::NonContextual(model), format!("mu[{label}][{}]", k + 1))
                }
                NcVerdict::Contextual { mut inequality, violation } if kind == 4 => {
                    inequality.constant -= &delta;
                    (NcVerdict::Contextual { inequality, violation }, "non-contextual vertex".into())
                }
                NcVerdict::Contextual { inequality, violation } => {
                    (NcVerdict::Contextual { inequality, violation: violation + &delta }, "claimed violation".into())
                }
            };
            ensure(bad.is_member() == (kind == 3), || "unexpected verdict".into())?;
            let check = verify_noncontextual(&q, &bad, budget).map_err(|e| e.to_string())?;
            Ok((!check.valid() && check.defects.iter().any(|d| d.contains(&marker)), marker))
        }
    }
}

fn tampered_certificates() -> Check {
    let budget = Budget::default();
    let mut rng = rng(10);
    for i in 0..100 {
        let (located, marker) = tamper(&mut rng, i % 6, &budget).map_err(|e| format!("case {i}: {e}"))?;
        ensure(located, || format!("case {i}: tampering not located at {marker}"))?;
    }
    Ok("100 tampered certificates rejected with the defect located".into())
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("facet enumeration of H", facet_enumeration),
        ("contextuality of q_c", contextual_violation),
        ("repeated preparations embedding", repeated_preparations),
        ("normal forms", normal_forms),
        ("exact round trips", round_trips),
        ("classicality is preserved", classicality_preserved),
        ("signalling detection", signalling_detection),
        ("tau reduction", tau_reduction),
        ("steering reconstruction", steering_reconstruction),
        ("tampered certificates", tampered_certificates),
    ];
    let mut failed = 0;
    let total = Instant::now();
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = Duration::from_secs_f64(start.elapsed().as_secs_f64());
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{elapsed:.2?}]", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{elapsed:.2?}]", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.2?}", criteria.len() - failed, total.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
