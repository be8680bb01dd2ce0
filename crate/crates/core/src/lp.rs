//! Dense two-phase simplex with a Bland fallback against cycling.
//!
//! Sized for the small LPs that show up in reward-set geometry: a few dozen
//! variables and a few hundred rows. Determinism matters more than speed,
//! so there is no randomization and no pricing heuristic.

use crate::error::{IrlError, Result};

/// Reduced-cost and feasibility tolerance.
pub const LP_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 50;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// `minimize c.x` subject to linear rows and `lower <= x <= upper`.
/// Lower bounds must be finite; upper bounds may be infinite.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    /// Phase-1 optimum (total artificial mass) above tolerance.
    Infeasible { residual: f64 },
    Unbounded,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(IrlError::Dimension("LP bound vectors".into()));
        }
        if self.lower.iter().any(|l| !l.is_finite()) {
            return Err(IrlError::Invalid("LP lower bounds must be finite".into()));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| u < l) {
            return Ok(LpOutcome::Infeasible { residual: f64::INFINITY });
        }

        // Shift x = lower + u so every variable is u >= 0.
        let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::new();
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(IrlError::Dimension("LP row length".into()));
            }
            let shift: f64 = c.coeffs.iter().zip(&self.lower).map(|(a, l)| a * l).sum();
            rows.push((c.coeffs.clone(), c.cmp, c.rhs - shift));
        }
        for j in 0..n {
            if self.upper[j].is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                rows.push((e, Cmp::Le, self.upper[j] - self.lower[j]));
            }
        }
        for row in rows.iter_mut() {
            if row.2 < 0.0 {
                row.0.iter_mut().for_each(|a| *a = -*a);
                row.2 = -row.2;
                row.1 = match row.1 {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
        }

        let mut t = Tableau::build(n, &rows);
        let residual = t.phase_one()?;
        if residual > LP_TOL {
            return Ok(LpOutcome::Infeasible { residual });
        }
        t.drop_artificials();
        let cost: Vec<f64> = self.objective.clone();
        if !t.phase_two(&cost)? {
            return Ok(LpOutcome::Unbounded);
        }
        let u = t.primal(n);
        let x: Vec<f64> = u.iter().zip(&self.lower).map(|(u, l)| u + l).collect();
        let value = x.iter().zip(&self.objective).map(|(x, c)| x * c).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

struct Tableau {
    /// `m` rows of width `cols + 1`; the last entry is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    /// Columns barred from entering.
    barred: Vec<bool>,
    obj: Vec<f64>,
}

impl Tableau {
    fn build(n: usize, rows: &[(Vec<f64>, Cmp, f64)]) -> Tableau {
        let slacks = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;
        let mut a = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (coeffs, cmp, rhs) in rows {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(coeffs);
            row[cols] = *rhs;
            match cmp {
                Cmp::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Cmp::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Cmp::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            a.push(row);
        }
        Tableau {
            a,
            basis,
            cols,
            first_artificial,
            barred: vec![false; cols],
            obj: vec![0.0; cols + 1],
        }
    }

    /// Loads reduced costs for `cost` (indexed by column) and prices out basics.
    fn set_objective(&mut self, cost: &[f64]) {
        self.obj.iter_mut().for_each(|x| *x = 0.0);
        self.obj[..cost.len()].copy_from_slice(cost);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.obj[b];
            if cb != 0.0 {
                for (o, x) in self.obj.iter_mut().zip(&self.a[i]) {
                    *o -= cb * x;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.a[r][c];
        self.a[r].iter_mut().for_each(|x| *x *= inv);
        self.a[r][c] = 1.0;
        let pivot_row = std::mem::take(&mut self.a[r]);
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, p) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            self.obj[c] = 0.0;
        }
        self.a[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Simplex iterations to optimality. Returns false when unbounded.
    ///
    /// Pricing is Dantzig's most negative reduced cost and the ratio test
    /// prefers the largest pivot among near-ties, which keeps the dense
    /// tableau well conditioned. After a run of degenerate pivots both
    /// rules fall back to Bland's lowest-index choice so cycling cannot
    /// persist.
    fn run(&mut self) -> Result<bool> {
        let rhs = self.cols;
        let mut degenerate = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= BLAND_AFTER;
            let candidates = (0..self.cols).filter(|&j| !self.barred[j] && self.obj[j] < -LP_TOL);
            let entering = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&x, &y| self.obj[x].total_cmp(&self.obj[y]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut min_ratio = f64::INFINITY;
            for row in &self.a {
                if row[c] > PIVOT_TOL {
                    min_ratio = min_ratio.min(row[rhs].max(0.0) / row[c]);
                }
            }
            if !min_ratio.is_finite() {
                return Ok(false);
            }
            let slack = RATIO_TOL * (1.0 + min_ratio);
            let mut leave: Option<usize> = None;
            for (i, row) in self.a.iter().enumerate() {
                let x = row[c];
                if x <= PIVOT_TOL || row[rhs].max(0.0) / x > min_ratio + slack {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(k) if bland => self.basis[i] < self.basis[k],
                    Some(k) => x > self.a[k][c],
                };
                if better {
                    leave = Some(i);
                }
            }
            let r = leave.expect("a row attains the minimum ratio");
            if min_ratio <= slack {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
        Err(IrlError::Numerical(format!(
            "simplex exceeded {MAX_PIVOTS} pivots"
        )))
    }

    fn phase_one(&mut self) -> Result<f64> {
        let cost: Vec<f64> = (0..self.cols)
            .map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 })
            .collect();
        self.set_objective(&cost);
        if !self.run()? {
            return Err(IrlError::Numerical("phase one reported unbounded".into()));
        }
        Ok(-self.obj[self.cols])
    }

    fn drop_artificials(&mut self) {
        let fa = self.first_artificial;
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= fa {
                let replacement = (0..fa).find(|&j| self.a[i][j].abs() > 1e-9);
                match replacement {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // Redundant row.
                        self.a.swap_remove(i);
                        self.basis.swap_remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for j in fa..self.cols {
            self.barred[j] = true;
        }
    }

    fn phase_two(&mut self, cost: &[f64]) -> Result<bool> {
        self.set_objective(cost);
        self.run()
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut u = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                u[b] = self.a[i][self.cols].max(0.0);
            }
        }
        u
    }
}
