//! Exact row reduction helpers.

use crate::rational::Rational;

/// Reduced row echelon form. Pivot columns are chosen in the order given by
/// `column_order`; returns the nonzero rows and their pivot columns.
pub fn rref_with_order(
    m: &[Vec<Rational>],
    column_order: &[usize],
) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut rows: Vec<Vec<Rational>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut next = 0;
    for &c in column_order {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][c].recip().expect("nonzero pivot");
        for x in rows[next].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    rows.truncate(next);
    (rows, pivots)
}

pub fn rref(m: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let order: Vec<usize> = (0..cols).collect();
    rref_with_order(m, &order)
}

pub fn rank(m: &[Vec<Rational>], cols: usize) -> usize {
    rref(m, cols).1.len()
}

/// Basis of {z : M z = 0}, one vector per non-pivot column.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let (rows, pivots) = rref(m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            v
        })
        .collect()
}

/// Solutions of E x = f as x0 + N z. Returns `None` if inconsistent.
/// `N` is given column-wise: one direction per free variable.
pub fn affine_solutions(
    e: &[Vec<Rational>],
    f: &[Rational],
    cols: usize,
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let augmented: Vec<Vec<Rational>> = e
        .iter()
        .zip(f)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (rows, pivots) = rref(&augmented, cols + 1);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x0 = vec![Rational::zero(); cols];
    for (row, &p) in rows.iter().zip(&pivots) {
        x0[p] = row[cols].clone();
    }
    let directions = (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            v
        })
        .collect();
    Some((x0, directions))
}
