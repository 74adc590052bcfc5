//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use bellctx::model::{
    canonical_ns_equivalence, BellCorrelation, BellScenario, CtxBehaviour, CtxScenario, PrepLabel,
};
use bellctx::quantum::{c, CMatrix, QuantumBellRealisation};
use bellctx::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` positive weights with small denominators summing to one.
pub fn random_weights(rng: &mut TestRng, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|n| Rational::frac(n, total)).collect()
}

/// Shapes up to (3,3,3,3): every input has 2 or 3 outcomes unless `allow_one`.
pub fn random_scenario(rng: &mut TestRng, min_inputs: usize, allow_one: bool) -> BellScenario {
    let lo = if allow_one { 1 } else { 2 };
    let x = rng.gen_range(min_inputs..=3);
    let y = rng.gen_range(min_inputs..=3);
    let a = (0..x).map(|_| rng.gen_range(lo..=3)).collect();
    let b = (0..y).map(|_| rng.gen_range(lo..=3)).collect();
    BellScenario::new(a, b).expect("valid shape")
}

pub fn combine(s: &BellScenario, parts: &[(BellCorrelation, Rational)]) -> BellCorrelation {
    BellCorrelation::from_fn(s.clone(), |a, b, x, y| {
        parts.iter().map(|(p, w)| w * p.get(a, b, x, y)).sum()
    })
    .expect("convex combination of correlations")
}

pub fn random_deterministic(rng: &mut TestRng, s: &BellScenario) -> BellCorrelation {
    let alice: Vec<usize> = s.outcomes_a().iter().map(|&n| rng.gen_range(1..=n)).collect();
    let bob: Vec<usize> = s.outcomes_b().iter().map(|&n| rng.gen_range(1..=n)).collect();
    bellctx::model::deterministic(s, &alice, &bob).expect("strategy fits")
}

/// Convex mixture of one to four deterministic strategies.
pub fn random_local(rng: &mut TestRng, s: &BellScenario) -> BellCorrelation {
    let k = rng.gen_range(1..=4);
    let ws = random_weights(rng, k);
    let parts: Vec<_> = ws.into_iter().map(|w| (random_deterministic(rng, s), w)).collect();
    combine(s, &parts)
}

/// A PR box on two random outcomes of two inputs per side, every other
/// input answered deterministically. `None` when the shape has no room.
pub fn pr_lift(rng: &mut TestRng, s: &BellScenario) -> Option<BellCorrelation> {
    let pick_inputs = |rng: &mut TestRng, outs: &[usize]| -> Option<Vec<usize>> {
        let mut wide: Vec<usize> = (1..=outs.len()).filter(|&i| outs[i - 1] >= 2).collect();
        if wide.len() < 2 {
            return None;
        }
        wide.shuffle(rng);
        wide.truncate(2);
        Some(wide)
    };
    let xs = pick_inputs(rng, s.outcomes_a())?;
    let ys = pick_inputs(rng, s.outcomes_b())?;
    let pair = |rng: &mut TestRng, n: usize| {
        let mut o: Vec<usize> = (1..=n).collect();
        o.shuffle(rng);
        [o[0], o[1]]
    };
    let a_out: Vec<[usize; 2]> = s.outcomes_a().iter().map(|&n| if n >= 2 { pair(rng, n) } else { [1, 1] }).collect();
    let b_out: Vec<[usize; 2]> = s.outcomes_b().iter().map(|&n| if n >= 2 { pair(rng, n) } else { [1, 1] }).collect();
    let a_det: Vec<usize> = s.outcomes_a().iter().map(|&n| rng.gen_range(1..=n)).collect();
    let b_det: Vec<usize> = s.outcomes_b().iter().map(|&n| rng.gen_range(1..=n)).collect();
    let half = Rational::frac(1, 2);
    let p = BellCorrelation::from_fn(s.clone(), |a, b, x, y| {
        let xi = xs.iter().position(|&v| v == x);
        let yi = ys.iter().position(|&v| v == y);
        let bit_a = a_out[x - 1].iter().position(|&v| v == a);
        let bit_b = b_out[y - 1].iter().position(|&v| v == b);
        match (xi, yi) {
            (Some(i), Some(j)) => match (bit_a, bit_b) {
                (Some(u), Some(v)) if (u ^ v) == (i & j) => half.clone(),
                _ => Rational::zero(),
            },
            (Some(_), None) if bit_a.is_some() && b == b_det[y - 1] => half.clone(),
            (None, Some(_)) if bit_b.is_some() && a == a_det[x - 1] => half.clone(),
            (None, None) if a == a_det[x - 1] && b == b_det[y - 1] => Rational::one(),
            _ => Rational::zero(),
        }
    })
    .expect("lifted PR box is normalised");
    Some(p)
}

/// Local mixtures, optionally blended with a lifted PR box.
pub fn random_ns(rng: &mut TestRng, s: &BellScenario) -> BellCorrelation {
    let local = random_local(rng, s);
    if rng.gen_bool(0.6) {
        if let Some(pr) = pr_lift(rng, s) {
            let w = Rational::frac(rng.gen_range(1..=8), 8);
            return combine(s, &[(pr, w.clone()), (local, Rational::one() - w)]);
        }
    }
    local
}

/// Uniform product distribution.
pub fn uniform(s: &BellScenario) -> BellCorrelation {
    BellCorrelation::from_fn(s.clone(), |_, _, x, y| {
        Rational::frac(1, (s.outcomes_a()[x - 1] * s.outcomes_b()[y - 1]) as i64)
    })
    .expect("uniform is normalised")
}

pub fn random_distribution(rng: &mut TestRng, n: usize, zeros: bool) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n)
        .map(|_| if zeros && rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=9) })
        .collect();
    let total: i64 = raw.iter().sum();
    if total == 0 {
        let mut d = vec![Rational::zero(); n];
        d[rng.gen_range(0..n)] = Rational::one();
        return d;
    }
    raw.into_iter().map(|v| Rational::frac(v, total)).collect()
}

pub fn ns_scenario(alice: &[Vec<Rational>], outcomes_b: &[usize]) -> CtxScenario {
    let preps = alice
        .iter()
        .enumerate()
        .flat_map(|(i, d)| {
            d.iter()
                .enumerate()
                .filter(|(_, p)| p.is_positive())
                .map(move |(a, _)| PrepLabel::outcome(a + 1, i + 1))
        })
        .collect();
    let eqs = canonical_ns_equivalence(alice).expect("marginals are distributions");
    let index = alice.iter().map(Vec::len).collect();
    CtxScenario::new(preps, outcomes_b.to_vec(), eqs, Some(index)).expect("NS-form scenario")
}

/// A behaviour in NS form built directly from Bob's averaged distributions:
/// q(·|[a|x],y) = Q(·|y) + t·d_a with Σ_a p_A(a|x) d_a = 0 and Σ_b d_a = 0,
/// `t` pushed up to the boundary of the simplex now and then.
pub fn random_ns_form_behaviour(rng: &mut TestRng, s: &BellScenario) -> (CtxBehaviour, Vec<usize>) {
    let alice: Vec<Vec<Rational>> = s
        .outcomes_a()
        .iter()
        .map(|&n| random_distribution(rng, n, true))
        .collect();
    let q_avg: Vec<Vec<Rational>> = s
        .outcomes_b()
        .iter()
        .map(|&n| random_distribution(rng, n, false))
        .collect();
    let scenario = ns_scenario(&alice, s.outcomes_b());
    // rows[x][a][y][b]
    let mut rows: Vec<Vec<Vec<Vec<Rational>>>> = Vec::new();
    for dist in &alice {
        let support: Vec<usize> = (0..dist.len()).filter(|&a| dist[a].is_positive()).collect();
        let mut per_a = vec![Vec::new(); dist.len()];
        for (y, q) in q_avg.iter().enumerate() {
            let nb = s.outcomes_b()[y];
            let mut d: Vec<Vec<Rational>> = support
                .iter()
                .map(|_| (0..nb).map(|_| Rational::from_integer(rng.gen_range(-3..=3))).collect())
                .collect();
            for row in &mut d {
                let mean: Rational = row.iter().sum::<Rational>() * Rational::frac(1, nb as i64);
                row.iter_mut().for_each(|v| *v -= &mean);
            }
            for b in 0..nb {
                let avg: Rational = support.iter().zip(&d).map(|(&a, row)| &dist[a] * &row[b]).sum();
                d.iter_mut().for_each(|row| row[b] -= &avg);
            }
            let limit = d
                .iter()
                .flat_map(|row| row.iter().enumerate())
                .filter(|(_, v)| v.is_negative())
                .map(|(b, v)| q[b].checked_div(&-v.clone()).expect("nonzero entry"))
                .min();
            let t = match limit {
                Some(l) => l * Rational::frac(rng.gen_range(0..=4), 4),
                None => Rational::zero(),
            };
            for (k, &a) in support.iter().enumerate() {
                let row: Vec<Rational> = (0..nb).map(|b| &q[b] + &t * &d[k][b]).collect();
                per_a[a].push(row);
            }
        }
        rows.push(per_a);
    }
    let q = CtxBehaviour::from_fn(scenario, |l, y, b| match *l {
        PrepLabel::Outcome { a, x } => rows[x - 1][a - 1][y - 1][b - 1].clone(),
        PrepLabel::Plain(_) => unreachable!(),
    })
    .expect("rows are distributions");
    (q, s.outcomes_a().to_vec())
}

/// A non-contextual behaviour in NS form from an explicit ontic model: an
/// averaged measure ν over deterministic responses, split among Alice's
/// outcomes with random proportions per input.
pub fn random_nc_behaviour(rng: &mut TestRng, s: &BellScenario) -> (CtxBehaviour, Vec<usize>) {
    let atlas: Vec<Vec<usize>> = s.outcomes_b().iter().fold(vec![Vec::new()], |acc, &n| {
        acc.into_iter()
            .flat_map(|p| (1..=n).map(move |b| [p.clone(), vec![b]].concat()))
            .collect()
    });
    let nu = random_distribution(rng, atlas.len(), true);
    let mut alice = Vec::new();
    let mut mus = Vec::new();
    for &na in s.outcomes_a() {
        // split[l][a]: share of ν(λ_l) going to outcome a.
        let split: Vec<Vec<Rational>> = (0..atlas.len()).map(|_| random_distribution(rng, na, true)).collect();
        let marg: Vec<Rational> = (0..na)
            .map(|a| nu.iter().zip(&split).map(|(v, w)| v * &w[a]).sum())
            .collect();
        let mu: Vec<Vec<Rational>> = (0..na)
            .map(|a| {
                if marg[a].is_zero() {
                    return Vec::new();
                }
                nu.iter().zip(&split).map(|(v, w)| (v * &w[a]).checked_div(&marg[a]).expect("positive marginal")).collect()
            })
            .collect();
        alice.push(marg);
        mus.push(mu);
    }
    let scenario = ns_scenario(&alice, s.outcomes_b());
    let q = CtxBehaviour::from_fn(scenario, |l, y, b| match *l {
        PrepLabel::Outcome { a, x } => mus[x - 1][a - 1]
            .iter()
            .zip(&atlas)
            .filter(|(_, lam)| lam[y - 1] == b)
            .map(|(m, _)| m.clone())
            .sum(),
        PrepLabel::Plain(_) => unreachable!(),
    })
    .expect("model rows are distributions");
    (q, s.outcomes_a().to_vec())
}

pub fn random_complex(rng: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Density matrix of rank at most `rank`.
pub fn random_density(rng: &mut TestRng, d: usize, rank: usize) -> CMatrix {
    let g = random_complex(rng, d, rank);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// S^{-1/2} G_k S^{-1/2} with S = Σ G_k for random PSD G_k.
pub fn random_povm(rng: &mut TestRng, d: usize, outcomes: usize) -> Vec<CMatrix> {
    let gs: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = random_complex(rng, d, d);
            &g * g.adjoint()
        })
        .collect();
    let total = gs.iter().fold(CMatrix::zeros(d, d), |acc, g| acc + g);
    let eig = total.symmetric_eigen();
    let inv_sqrt = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0)));
    let w = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    gs.iter().map(|g| &w * g * &w).collect()
}

/// Random state on ℂ^da ⊗ ℂ^db (sometimes rank deficient on Bob's side) with
/// random POVMs for both parties.
pub fn random_realisation(rng: &mut TestRng, da: usize, db: usize) -> QuantumBellRealisation {
    let rank = rng.gen_range(1..=da * db);
    let rho = random_density(rng, da * db, rank);
    let x = rng.gen_range(1..=3);
    let y = rng.gen_range(1..=3);
    let m = (0..x).map(|_| { let k = rng.gen_range(2..=3); random_povm(rng, da, k) }).collect();
    let n = (0..y).map(|_| { let k = rng.gen_range(2..=3); random_povm(rng, db, k) }).collect();
    QuantumBellRealisation { da, db, rho, m, n }
}
