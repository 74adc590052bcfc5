use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::model::CtxScenario;
use crate::rational::{to_coprime_integers, Rational};

use super::dd::{extreme_rays, DdError};
use super::linalg::{affine_solutions, nullspace, rref_with_order};
use super::noncontextual::{mu_system, CtxInequality};
use super::{Budget, GeometryError};

/// constant + Σ coefficients[i]·coord_i ≥ 0 over the polytope's reduced
/// coordinates, with coprime integer entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub coefficients: Vec<BigInt>,
    pub constant: BigInt,
}

impl Facet {
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        let mut v = Rational::from_bigint(self.constant.clone());
        for (c, x) in self.coefficients.iter().zip(point) {
            if !x.is_zero() {
                v += Rational::from_bigint(c.clone()) * x;
            }
        }
        v
    }

    /// The same inequality over the full behaviour table.
    pub fn to_inequality(&self, poly: &Polytope, s: &CtxScenario) -> CtxInequality {
        let mut coefficients = vec![Rational::zero(); s.table_len()];
        for (c, &(z, y, b)) in self.coefficients.iter().zip(&poly.coordinates) {
            coefficients[s.index(z, y, b)] = Rational::from_bigint(c.clone());
        }
        CtxInequality {
            coefficients,
            constant: Rational::from_bigint(self.constant.clone()),
        }
    }
}

/// The non-contextual polytope of a scenario.
///
/// Coordinates are q(b|z,y) for b < B_y (the last outcome is implied).
/// Vertices are listed in these coordinates, sorted. Facets are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    /// (prep position, y, b) per reduced coordinate.
    pub coordinates: Vec<(usize, usize, usize)>,
    pub vertices: Vec<Vec<Rational>>,
    pub facets: Vec<Facet>,
    pub dimension: usize,
    /// Reduced coordinates left free by the affine hull (ascending). Facets
    /// only involve these.
    pub chart: Vec<usize>,
}

impl Polytope {
    pub fn coordinate_names(&self, s: &CtxScenario) -> Vec<String> {
        self.coordinates
            .iter()
            .map(|&(z, y, b)| s.coordinate_name(z, y, b))
            .collect()
    }

    /// Facets equivalent on the polytope to a single positivity constraint
    /// q(b|z,y) ≥ 0 (including the implied last outcome).
    pub fn positivity_facets(&self, s: &CtxScenario) -> Vec<usize> {
        let tight = |f: &dyn Fn(&[Rational]) -> Rational| -> BTreeSet<usize> {
            self.vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| f(v).is_zero())
                .map(|(i, _)| i)
                .collect()
        };
        let mut positivity: Vec<BTreeSet<usize>> = Vec::new();
        for z in 0..s.num_preps() {
            for y in 1..=s.num_measurements() {
                let idx: Vec<usize> = (0..self.coordinates.len())
                    .filter(|&i| self.coordinates[i].0 == z && self.coordinates[i].1 == y)
                    .collect();
                for &i in &idx {
                    positivity.push(tight(&|v: &[Rational]| v[i].clone()));
                }
                positivity.push(tight(&|v: &[Rational]| {
                    Rational::one() - idx.iter().map(|&i| &v[i]).sum::<Rational>()
                }));
            }
        }
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| positivity.contains(&tight(&|v: &[Rational]| f.evaluate(v))))
            .map(|(i, _)| i)
            .collect()
    }
}

fn reduced_coordinates(s: &CtxScenario) -> Vec<(usize, usize, usize)> {
    s.cells()
        .filter(|&(_, y, b)| b < s.outcomes_b()[y - 1])
        .collect()
}

fn dd_error(e: DdError, budget: &Budget) -> GeometryError {
    match e {
        DdError::TooManyRays { limit } => GeometryError::BudgetExceeded {
            what: "double description",
            needed: format!("more than {limit}"),
            limit: budget.vertices,
        },
        DdError::NotPointed { rank, dim } => {
            GeometryError::Internal(format!("cone not pointed (rank {rank} < {dim})"))
        }
    }
}

/// Vertices of the non-contextual set as full behaviour tables, sorted.
///
/// The μ-polytope (normalisation and equivalence constraints, μ ≥ 0) is
/// parametrised over its affine hull, homogenised, and enumerated by double
/// description; its vertices are pushed through the atlas and deduplicated.
pub fn nc_vertices(s: &CtxScenario, budget: &Budget) -> Result<Vec<Vec<Rational>>, GeometryError> {
    let sys = mu_system(s, budget)?;
    let l = sys.atlas.len();
    let n = s.num_preps() * l;
    let structural = &sys.rows[..sys.num_structural];
    let mut f = vec![Rational::zero(); sys.num_structural];
    for v in f.iter_mut().take(s.num_preps()) {
        *v = Rational::one();
    }
    let (x0, dirs) = affine_solutions(structural, &f, n)
        .ok_or_else(|| GeometryError::Internal("normalisation rows are inconsistent".into()))?;
    let mu_points: Vec<Vec<Rational>> = if dirs.is_empty() {
        if x0.iter().any(Rational::is_negative) {
            Vec::new()
        } else {
            vec![x0]
        }
    } else {
        // Row i: t·x0_i + Σ_j z_j·dirs[j][i] ≥ 0, with an extra t ≥ 0.
        let mut rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let mut r = vec![x0[i].clone()];
                r.extend(dirs.iter().map(|d| d[i].clone()));
                to_coprime_integers(&r)
            })
            .filter(|r| r.iter().any(|v| v != &BigInt::from(0)))
            .collect();
        let mut t = vec![BigInt::from(0); dirs.len() + 1];
        t[0] = BigInt::from(1);
        rows.push(t);
        let rays = extreme_rays(&rows, dirs.len() + 1, budget.vertices)
            .map_err(|e| dd_error(e, budget))?;
        rays.into_iter()
            .filter(|r| r[0] > BigInt::from(0))
            .map(|r| {
                let t = Rational::from_bigint(r[0].clone());
                let z: Vec<Rational> = r[1..]
                    .iter()
                    .map(|v| Rational::from_bigint(v.clone()).checked_div(&t).expect("t > 0"))
                    .collect();
                (0..n)
                    .map(|i| {
                        let mut v = x0[i].clone();
                        for (zj, d) in z.iter().zip(&dirs) {
                            if !zj.is_zero() && !d[i].is_zero() {
                                v += zj * &d[i];
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    };
    let data = &sys.rows[sys.num_structural..];
    let projected: BTreeSet<Vec<Rational>> = mu_points
        .iter()
        .map(|mu| data.iter().map(|row| super::lp::dot(row, mu)).collect())
        .collect();
    if projected.len() > budget.vertices {
        return Err(GeometryError::BudgetExceeded {
            what: "non-contextual vertices",
            needed: projected.len().to_string(),
            limit: budget.vertices,
        });
    }
    Ok(projected.into_iter().collect())
}

/// Facets of conv(points) in ℝ^D, each involving only the free coordinates
/// of the affine hull. Dependent coordinates are eliminated starting from
/// the highest index. Returns (dimension, chart, sorted facets).
pub fn hull_facets(
    points: &[Vec<Rational>],
    d: usize,
    budget: &Budget,
) -> Result<(usize, Vec<usize>, Vec<Facet>), GeometryError> {
    if points.is_empty() {
        return Ok((0, Vec::new(), Vec::new()));
    }
    let lifted: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r = vec![Rational::one()];
            r.extend(p.iter().cloned());
            r
        })
        .collect();
    // Equations e0 + e·p = 0 holding on every point.
    let equations = nullspace(&lifted, d + 1);
    let order: Vec<usize> = (1..=d).rev().collect();
    let (_, pivots) = rref_with_order(&equations, &order);
    let chart: Vec<usize> = (0..d).filter(|i| !pivots.contains(&(i + 1))).collect();
    let dimension = chart.len();
    if dimension == 0 {
        return Ok((0, chart, Vec::new()));
    }
    let rows: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| {
            let mut r = vec![Rational::one()];
            r.extend(chart.iter().map(|&i| p[i].clone()));
            to_coprime_integers(&r)
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rays = extreme_rays(&rows, dimension + 1, budget.vertices).map_err(|e| dd_error(e, budget))?;
    let mut facets: Vec<Facet> = rays
        .into_iter()
        .map(|r| {
            let mut coefficients = vec![BigInt::from(0); d];
            for (k, &i) in chart.iter().enumerate() {
                coefficients[i] = r[k + 1].clone();
            }
            Facet {
                coefficients,
                constant: r[0].clone(),
            }
        })
        .collect();
    facets.sort();
    Ok((dimension, chart, facets))
}

pub fn nc_polytope(s: &CtxScenario, budget: &Budget) -> Result<Polytope, GeometryError> {
    let coordinates = reduced_coordinates(s);
    let vertices: Vec<Vec<Rational>> = nc_vertices(s, budget)?
        .into_iter()
        .map(|v| {
            coordinates
                .iter()
                .map(|&(z, y, b)| v[s.index(z, y, b)].clone())
                .collect()
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (dimension, chart, facets) = hull_facets(&vertices, coordinates.len(), budget)?;
    Ok(Polytope {
        coordinates,
        vertices,
        facets,
        dimension,
        chart,
    })
}

/// Vertices of {p : facets hold} restricted to the affine hull of `poly`,
/// recomputed from its facets alone, sorted.
pub fn vertices_from_facets(poly: &Polytope, budget: &Budget) -> Result<Vec<Vec<Rational>>, GeometryError> {
    let d = poly.coordinates.len();
    let Some(first) = poly.vertices.first() else {
        return Ok(Vec::new());
    };
    if poly.dimension == 0 {
        return Ok(vec![first.clone()]);
    }
    let lifted: Vec<Vec<Rational>> = poly
        .vertices
        .iter()
        .map(|p| {
            let mut r = vec![Rational::one()];
            r.extend(p.iter().cloned());
            r
        })
        .collect();
    let equations = nullspace(&lifted, d + 1);
    let mut rows: Vec<Vec<BigInt>> = poly
        .facets
        .iter()
        .map(|f| {
            let mut r = vec![f.constant.clone()];
            r.extend(poly.chart.iter().map(|&i| f.coefficients[i].clone()));
            r
        })
        .collect();
    let mut t = vec![BigInt::from(0); poly.dimension + 1];
    t[0] = BigInt::from(1);
    rows.push(t);
    let rays = extreme_rays(&rows, poly.dimension + 1, budget.vertices).map_err(|e| dd_error(e, budget))?;
    let mut out = BTreeSet::new();
    for r in rays.into_iter().filter(|r| r[0] > BigInt::from(0)) {
        let t = Rational::from_bigint(r[0].clone());
        let mut point = vec![None; d];
        for (k, &i) in poly.chart.iter().enumerate() {
            point[i] = Some(Rational::from_bigint(r[k + 1].clone()).checked_div(&t).expect("t > 0"));
        }
        // Solve the hull equations for the dependent coordinates.
        let known: Vec<Rational> = point.iter().map(|p| p.clone().unwrap_or_else(Rational::zero)).collect();
        let dependent: Vec<usize> = (0..d).filter(|i| point[*i].is_none()).collect();
        let e: Vec<Vec<Rational>> = equations
            .iter()
            .map(|eq| dependent.iter().map(|&i| eq[i + 1].clone()).collect())
            .collect();
        let f: Vec<Rational> = equations
            .iter()
            .map(|eq| -(&eq[0] + super::lp::dot(&eq[1..], &known)))
            .collect();
        let (sol, free) = affine_solutions(&e, &f, dependent.len())
            .ok_or_else(|| GeometryError::Internal("hull equations inconsistent".into()))?;
        if !free.is_empty() {
            return Err(GeometryError::Internal("chart does not determine the point".into()));
        }
        let mut full = known;
        for (k, &i) in dependent.iter().enumerate() {
            full[i] = sol[k].clone();
        }
        out.insert(full);
    }
    Ok(out.into_iter().collect())
}
