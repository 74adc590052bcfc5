// Exact feasibility with a Farkas certificate when infeasible.

use bellctx::geometry::{lp_feasibility, lp_minimise, LinearSystem, LpOptimum, LpOutcome};
use bellctx::Rational;

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // x + y = 1, x - y = 1/3 with x, y >= 0.
    let sys = LinearSystem::new(vec![vec![r(1), r(1)], vec![r(1), r(-1)]], vec![r(1), Rational::frac(1, 3)]);
    match lp_feasibility(&sys) {
        LpOutcome::Feasible(x) => println!("feasible: x = {}, y = {}", x[0], x[1]),
        LpOutcome::Infeasible(_) => return Err("system should be feasible".into()),
    }

    // x + y = 1, x + y = 2 cannot both hold.
    let bad = LinearSystem::new(vec![vec![r(1), r(1)], vec![r(1), r(1)]], vec![r(1), r(2)]);
    match lp_feasibility(&bad) {
        LpOutcome::Infeasible(y) => {
            println!("infeasible, certificate {:?}", y.iter().map(ToString::to_string).collect::<Vec<_>>());
            if !bad.is_farkas_certificate(&y) {
                return Err("certificate does not verify".into());
            }
        }
        LpOutcome::Feasible(_) => return Err("system should be infeasible".into()),
    }

    // Minimise y subject to x + y = 1.
    let mut opt = LinearSystem::new(vec![vec![r(1), r(1)]], vec![r(1)]);
    opt.objective = Some(vec![r(0), r(1)]);
    if let LpOptimum::Optimal { value, .. } = lp_minimise(&opt) {
        println!("min y = {value}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
