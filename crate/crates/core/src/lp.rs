//! Exact rational linear programming: a dense two-phase simplex method with
//! Bland's pivot rule.
//!
//! Problems are small (a few hundred columns) and every quantity must be
//! exact, so the tableau is a plain matrix of big rationals. Bland's rule
//! (smallest improving column, ties in the ratio test broken by the smallest
//! basic variable) guarantees termination and makes the returned basic
//! solution a deterministic function of the input.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    /// Sparse row: `(variable, coefficient)`.
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

/// `minimize objective·x` subject to the constraints, `x ≥ 0` and optional
/// upper bounds.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
    pub upper: Vec<Option<Q>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Q>,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![Q::zero(); num_vars],
            constraints: Vec::new(),
            upper: vec![None; num_vars],
        }
    }

    /// `min c·x` s.t. `A x = b`, `x ≥ 0`, from dense data.
    pub fn standard_form(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Lp(format!(
                "dimension mismatch: {} constraint rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        let n = c.len();
        if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Lp(format!(
                "dimension mismatch: row {i} has {} entries, objective has {n}",
                row.len()
            )));
        }
        let mut p = LpProblem::new(n);
        p.objective = c.to_vec();
        for (row, rhs) in a.iter().zip(b) {
            let coeffs = row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect();
            p.constrain(coeffs, Relation::Eq, rhs.clone());
        }
        Ok(p)
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.upper.len() != self.num_vars {
            return Err(Error::Lp(format!(
                "dimension mismatch: {} variables, objective of length {}, {} bounds",
                self.num_vars,
                self.objective.len(),
                self.upper.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(Error::Lp(format!(
                    "dimension mismatch: constraint {i} refers to variable {j} of {}",
                    self.num_vars
                )));
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    obj: Vec<Q>,
    basis: Vec<usize>,
    width: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let piv = prow[c].clone();
        if piv != rational::one() {
            let inv = rational::one() / piv;
            for v in prow.iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Q>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= d;
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[Q]) {
        let mut obj: Vec<Q> = cost.to_vec();
        obj.push(Q::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[j] -= cb * v;
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self, allowed: &[bool]) -> Phase {
        let rhs = self.rhs();
        loop {
            let Some(enter) = (0..self.width).find(|&j| allowed[j] && self.obj[j].is_negative()) else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &best {
                    None => true,
                    Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Phase::Unbounded,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solves the problem exactly.
pub fn solve(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    let n = p.num_vars;

    // rows as (dense coefficients over the original variables, relation, rhs)
    let mut rows: Vec<(Vec<Q>, Relation, Q)> = Vec::new();
    for c in &p.constraints {
        let mut dense = vec![Q::zero(); n];
        for (j, v) in &c.coeffs {
            dense[*j] += v;
        }
        rows.push((dense, c.relation, c.rhs.clone()));
    }
    for (j, u) in p.upper.iter().enumerate() {
        if let Some(u) = u {
            let mut dense = vec![Q::zero(); n];
            dense[j] = rational::one();
            rows.push((dense, Relation::Le, u.clone()));
        }
    }
    for (dense, rel, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            for v in dense.iter_mut() {
                *v = -v.clone();
            }
            *rhs = -rhs.clone();
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = n + slacks + artificials;
    let art_start = n + slacks;
    let m = rows.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        obj: Vec::new(),
        basis: Vec::with_capacity(m),
        width,
    };
    let (mut next_slack, mut next_art) = (n, art_start);
    for (dense, rel, rhs) in rows {
        let mut row = dense;
        row.resize(width + 1, Q::zero());
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = rational::one();
                t.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -rational::one();
                next_slack += 1;
                row[next_art] = rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
        }
        t.rows.push(row);
    }

    if artificials > 0 {
        let cost: Vec<Q> = (0..width)
            .map(|j| if j >= art_start { rational::one() } else { Q::zero() })
            .collect();
        t.set_objective(&cost);
        let all = vec![true; width];
        if let Phase::Unbounded = t.run(&all) {
            return Err(Error::Lp("phase one cannot be unbounded".into()));
        }
        if !t.obj[width].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // drive the remaining (zero-valued) artificials out of the basis
        let mut redundant = Vec::new();
        for i in 0..t.rows.len() {
            if t.basis[i] < art_start {
                continue;
            }
            match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            t.rows.remove(i);
            t.basis.remove(i);
        }
    }

    let mut cost = p.objective.clone();
    cost.resize(width, Q::zero());
    t.set_objective(&cost);
    let allowed: Vec<bool> = (0..width).map(|j| j < art_start).collect();
    if let Phase::Unbounded = t.run(&allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][width].clone();
        }
    }
    let value = x.iter().zip(&p.objective).fold(Q::zero(), |acc, (a, c)| acc + a * c);
    Ok(LpOutcome::Optimal(LpSolution { x, value }))
}
