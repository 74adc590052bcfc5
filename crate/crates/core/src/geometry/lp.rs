//! Dense two-phase simplex over exact rationals with Bland's rule.

use crate::rational::Rational;

/// `A x = b` with `x_j ≥ 0` for every `j` where `nonneg[j]` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub nonneg: Vec<bool>,
    /// Minimised by [`lp_minimise`]; ignored by [`lp_feasibility`].
    pub objective: Option<Vec<Rational>>,
}

impl LinearSystem {
    /// All variables nonnegative, no objective.
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Self {
        let n = a.first().map_or(0, Vec::len);
        LinearSystem {
            a,
            b,
            nonneg: vec![true; n],
            objective: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    fn check_shape(&self) {
        assert_eq!(self.a.len(), self.b.len(), "row count mismatch");
        for row in &self.a {
            assert_eq!(row.len(), self.nonneg.len(), "column count mismatch");
        }
        if let Some(c) = &self.objective {
            assert_eq!(c.len(), self.nonneg.len(), "objective length mismatch");
        }
    }

    /// Every row holds and every sign constraint is respected.
    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().zip(&self.nonneg).all(|(v, &nn)| !nn || !v.is_negative())
            && self.a.iter().zip(&self.b).all(|(row, rhs)| dot(row, x) == *rhs)
    }

    /// `y` certifies infeasibility: yᵀA ≥ 0 on nonnegative columns, yᵀA = 0 on
    /// free columns, and yᵀb < 0.
    pub fn is_farkas_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.num_rows() {
            return false;
        }
        let yb: Rational = y.iter().zip(&self.b).map(|(u, v)| u * v).sum();
        if !yb.is_negative() {
            return false;
        }
        (0..self.num_vars()).all(|j| {
            let col: Rational = y.iter().zip(&self.a).map(|(u, row)| u * &row[j]).sum();
            if self.nonneg[j] {
                !col.is_negative()
            } else {
                col.is_zero()
            }
        })
    }
}

pub fn dot(row: &[Rational], x: &[Rational]) -> Rational {
    row.iter()
        .zip(x)
        .filter(|(r, v)| !r.is_zero() && !v.is_zero())
        .map(|(r, v)| r * v)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOptimum {
    Optimal { x: Vec<Rational>, value: Rational },
    Unbounded,
    Infeasible(Vec<Rational>),
}

pub fn lp_feasibility(sys: &LinearSystem) -> LpOutcome {
    sys.check_shape();
    let mut t = Tableau::build(sys);
    match t.phase_one() {
        Err(y) => LpOutcome::Infeasible(y),
        Ok(()) => LpOutcome::Feasible(t.solution()),
    }
}

pub fn lp_minimise(sys: &LinearSystem) -> LpOptimum {
    sys.check_shape();
    let c = sys
        .objective
        .clone()
        .unwrap_or_else(|| vec![Rational::zero(); sys.num_vars()]);
    let mut t = Tableau::build(sys);
    if let Err(y) = t.phase_one() {
        return LpOptimum::Infeasible(y);
    }
    if !t.phase_two(&c) {
        return LpOptimum::Unbounded;
    }
    let x = t.solution();
    let value = dot(&c, &x);
    LpOptimum::Optimal { x, value }
}

/// Columns: split structural columns, then one artificial per row, then rhs.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Per original variable: (positive column, negative column if free).
    columns: Vec<(usize, Option<usize>)>,
    structural: usize,
    /// Per original row, the sign applied to make b ≥ 0.
    signs: Vec<bool>,
    /// Row count before redundant rows are dropped.
    num_original_rows: usize,
}

impl Tableau {
    fn build(sys: &LinearSystem) -> Self {
        let mut columns = Vec::with_capacity(sys.num_vars());
        let mut next = 0;
        for &nn in &sys.nonneg {
            if nn {
                columns.push((next, None));
                next += 1;
            } else {
                columns.push((next, Some(next + 1)));
                next += 2;
            }
        }
        let structural = next;
        let m = sys.num_rows();
        let width = structural + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for (i, (arow, rhs)) in sys.a.iter().zip(&sys.b).enumerate() {
            let flip = rhs.is_negative();
            signs.push(flip);
            let mut row = vec![Rational::zero(); width];
            for (j, v) in arow.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let v = if flip { -v } else { v.clone() };
                let (pos, neg) = columns[j];
                if let Some(neg) = neg {
                    row[neg] = -&v;
                }
                row[pos] = v;
            }
            row[structural + i] = Rational::one();
            row[width - 1] = if flip { -rhs } else { rhs.clone() };
            rows.push(row);
        }
        Tableau {
            rows,
            basis: (structural..structural + m).collect(),
            columns,
            structural,
            signs,
            num_original_rows: m,
        }
    }

    fn width(&self) -> usize {
        self.structural + self.num_original_rows + 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip().expect("pivot element is nonzero");
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs for cost vector `cost` over all tableau columns.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let w = self.width() - 1;
        let mut r: Vec<Rational> = cost[..w].to_vec();
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row[..w].iter().enumerate() {
                if !v.is_zero() {
                    r[j] -= cb * v;
                }
            }
        }
        r
    }

    /// Runs Bland's rule until optimal. Columns `>= limit` never enter.
    /// Returns false when unbounded.
    fn optimise(&mut self, cost: &[Rational], limit: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let rc = self.reduced_costs(cost);
            let Some(enter) = (0..limit).find(|&j| rc[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = row[rhs].checked_div(&row[enter]).expect("positive");
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    /// Minimises the sum of artificials. On failure returns a Farkas vector
    /// in the coordinates of the original system.
    fn phase_one(&mut self) -> Result<(), Vec<Rational>> {
        let m = self.num_original_rows;
        let w = self.width();
        let mut cost = vec![Rational::zero(); w];
        for c in cost.iter_mut().skip(self.structural).take(m) {
            *c = Rational::one();
        }
        self.optimise(&cost, w - 1);
        let value: Rational = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &bv)| bv >= self.structural)
            .map(|(row, _)| row[w - 1].clone())
            .sum();
        if value.is_positive() {
            let rc = self.reduced_costs(&cost);
            let y = (0..m)
                .map(|i| {
                    let yi = Rational::one() - &rc[self.structural + i];
                    if self.signs[i] {
                        yi
                    } else {
                        -yi
                    }
                })
                .collect();
            return Err(y);
        }
        self.expel_artificials();
        Ok(())
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are redundant and are dropped.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.structural {
                i += 1;
                continue;
            }
            match (0..self.structural).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn phase_two(&mut self, c: &[Rational]) -> bool {
        let mut cost = vec![Rational::zero(); self.width()];
        for (j, &(pos, neg)) in self.columns.iter().enumerate() {
            cost[pos] = c[j].clone();
            if let Some(neg) = neg {
                cost[neg] = -&c[j];
            }
        }
        self.optimise(&cost, self.structural)
    }

    fn solution(&self) -> Vec<Rational> {
        let rhs = self.width() - 1;
        let mut values = vec![Rational::zero(); self.structural];
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if bv < self.structural {
                values[bv] = row[rhs].clone();
            }
        }
        self.columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &values[pos] - &values[neg],
                None => values[pos].clone(),
            })
            .collect()
    }
}
