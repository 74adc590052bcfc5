//! Reference scenarios and behaviours used by tests, examples and the CLI.

use crate::geometry::OnticModel;
use crate::model::{
    pr_box, BellCorrelation, CtxBehaviour, CtxScenario, Mixture, PrepLabel, PreparationEquivalence,
};
use crate::rational::Rational;

fn plain(terms: &[(usize, i64, i64)]) -> Mixture {
    terms
        .iter()
        .map(|&(n, num, den)| (PrepLabel::Plain(n), Rational::frac(num, den)))
        .collect()
}

/// The PR box on (2,2,2,2).
pub fn pr() -> BellCorrelation {
    pr_box()
}

/// Five preparations, two binary measurements and the single hypothetical
/// preparation ½(P1+P2) ≃ ⅓(P1+P3+P4) ≃ ⅕P1 + ⅖(P3+P5).
pub fn scenario_h() -> CtxScenario {
    let d1 = plain(&[(1, 1, 2), (2, 1, 2)]);
    let d2 = plain(&[(1, 1, 3), (3, 1, 3), (4, 1, 3)]);
    let d3 = plain(&[(1, 1, 5), (3, 2, 5), (5, 2, 5)]);
    let eqs = vec![
        PreparationEquivalence::new(d1, d2.clone()).expect("valid"),
        PreparationEquivalence::new(d2, d3).expect("valid"),
    ];
    CtxScenario::new((1..=5).map(PrepLabel::Plain).collect(), vec![2, 2], eqs, None)
        .expect("valid scenario")
}

/// q(1|P_x, y) for x = 1..5, y = 1, 2.
const Q_C_FIRST: [[(i64, i64); 2]; 5] = [
    [(19, 200), (1, 2)],
    [(127, 200), (1, 2)],
    [(19, 200), (19, 200)],
    [(181, 200), (181, 200)],
    [(77, 100), (181, 200)],
];

fn binary_rows(scenario: CtxScenario, source: impl Fn(usize) -> usize) -> CtxBehaviour {
    CtxBehaviour::from_fn(scenario, |l, y, b| {
        let PrepLabel::Plain(n) = *l else {
            unreachable!("fixture uses plain labels")
        };
        let (num, den) = Q_C_FIRST[source(n) - 1][y - 1];
        let v = Rational::frac(num, den);
        if b == 1 {
            v
        } else {
            Rational::one() - v
        }
    })
    .expect("valid behaviour")
}

/// A contextual behaviour in [`scenario_h`].
pub fn q_c() -> CtxBehaviour {
    binary_rows(scenario_h(), |n| n)
}

/// Scenario H after removing ⅕P1 and cloning P1 ↦ P6, P3 ↦ P7.
pub fn scenario_h_prime() -> CtxScenario {
    let d1 = plain(&[(1, 3, 8), (2, 5, 8)]);
    let d2 = plain(&[(3, 5, 12), (4, 5, 12), (6, 1, 6)]);
    let d3 = plain(&[(5, 1, 2), (7, 1, 2)]);
    let eqs = vec![
        PreparationEquivalence::new(d1.clone(), d2).expect("valid"),
        PreparationEquivalence::new(d1, d3).expect("valid"),
    ];
    CtxScenario::new((1..=7).map(PrepLabel::Plain).collect(), vec![2, 2], eqs, None)
        .expect("valid scenario")
}

/// q_c copied into [`scenario_h_prime`]; it is non-contextual there.
pub fn q_c_prime() -> CtxBehaviour {
    binary_rows(scenario_h_prime(), |n| match n {
        6 => 1,
        7 => 3,
        n => n,
    })
}

/// μ_x({λ}) for [`q_c_prime`] over four ontic states, rows λ and columns x.
const MU_PRIME: [[(i64, i64); 7]; 4] = [
    [(1, 2), (73, 200), (1671, 2000), (0, 1), (0, 1), (81, 200), (133, 160)],
    [(81, 200), (0, 1), (139, 2000), (19, 200), (23, 100), (1, 2), (59, 800)],
    [(0, 1), (27, 200), (139, 2000), (19, 200), (19, 200), (19, 200), (59, 800)],
    [(19, 200), (1, 2), (51, 2000), (81, 100), (27, 40), (0, 1), (17, 800)],
];

/// The four-state non-contextual model of [`q_c_prime`].
///
/// In the reference table ontic state λ answers measurement 1 with outcome 1
/// for λ ∈ {3, 4} and measurement 2 with outcome 1 for λ ∈ {2, 4}. The atlas
/// lists assignments (b₁, b₂) lexicographically, so its rows are λ = 4, 3, 2, 1.
pub fn q_c_prime_model() -> OnticModel {
    let rows = [3, 2, 1, 0];
    OnticModel {
        atlas: vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]],
        mu: (0..7)
            .map(|x| {
                rows.iter()
                    .map(|&l| Rational::frac(MU_PRIME[l][x].0, MU_PRIME[l][x].1))
                    .collect()
            })
            .collect(),
    }
}
