//! Double description for pointed cones {x : A x ≥ 0} over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{to_coprime_integers, Rational};

/// Fixed-width bitset over constraint indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

#[derive(Debug, Clone)]
struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DdError {
    /// The constraint matrix has rank below the dimension, so the cone has a
    /// lineality space.
    NotPointed { rank: usize, dim: usize },
    /// The intermediate ray count went above the limit.
    TooManyRays { limit: usize },
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Integer rows from rational ones, scaled positively.
pub fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| to_coprime_integers(r)).collect()
}

/// Picks the first `dim` linearly independent rows in order and returns
/// their indices, or fewer if the rank is deficient.
fn independent_rows(rows: &[Vec<BigInt>], dim: usize) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut v: Vec<Rational> = row.iter().cloned().map(Rational::from_bigint).collect();
        for (p, e) in &echelon {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].recip().expect("nonzero");
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, e) in echelon.iter_mut() {
                if !e[p].is_zero() {
                    let f = e[p].clone();
                    for (x, y) in e.iter_mut().zip(&v) {
                        *x -= &f * y;
                    }
                }
            }
            echelon.push((p, v));
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    chosen
}

/// Inverse of a square rational matrix by Gauss–Jordan; `None` if singular.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip().ok()?;
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Extreme rays of {x ∈ ℝ^d : A x ≥ 0}, each primitive, in a deterministic
/// order (sorted). Fails if A has rank below `d` or if more than
/// `ray_limit` rays are ever held at once.
pub fn extreme_rays(
    rows: &[Vec<BigInt>],
    dim: usize,
    ray_limit: usize,
) -> Result<Vec<Vec<BigInt>>, DdError> {
    let m = rows.len();
    let basis = independent_rows(rows, dim);
    if basis.len() < dim {
        return Err(DdError::NotPointed {
            rank: basis.len(),
            dim,
        });
    }
    let sub: Vec<Vec<Rational>> = basis
        .iter()
        .map(|&i| rows[i].iter().cloned().map(Rational::from_bigint).collect())
        .collect();
    let inv = invert(&sub).expect("independent rows");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rational> = (0..dim).map(|i| inv[i][j].clone()).collect();
            let v = to_coprime_integers(&col);
            Ray { v, zeros: Bits::new(m) }
        })
        .collect();
    for &i in &basis {
        for ray in rays.iter_mut() {
            if dot(&rows[i], &ray.v).is_zero() {
                ray.zeros.set(i);
            }
        }
    }
    let in_basis: std::collections::BTreeSet<usize> = basis.iter().copied().collect();
    for i in (0..m).filter(|i| !in_basis.contains(i)) {
        let row = &rows[i];
        let values: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (ray, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    ray.zeros.set(i);
                }
            }
            continue;
        }
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(k, r)| {
                    k != p && k != n && r.zeros.contains_all(&common)
                });
                if blocked {
                    continue;
                }
                let (vp, vn) = (&values[p], &values[n]);
                let v: Vec<BigInt> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[n].v)
                    .map(|(a, b)| b * vp - a * vn)
                    .collect();
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { v: primitive(v), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut ray, v) in rays.into_iter().zip(values) {
            if v.is_zero() {
                ray.zeros.set(i);
                next.push(ray);
            } else if v.is_positive() {
                next.push(ray);
            }
        }
        next.extend(fresh);
        if next.len() > ray_limit {
            return Err(DdError::TooManyRays { limit: ray_limit });
        }
        rays = next;
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Ok(out)
}
