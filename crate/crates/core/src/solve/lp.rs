//! Dense two-phase simplex for standard-form linear programs
//! `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Pivoting uses Bland's smallest-index rule for both the entering and the
//! leaving variable, so the method cannot cycle. A column that is a positive
//! multiple of a unit vector seeds the starting basis for its row; the other
//! rows get artificial variables.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};

/// Optimality tolerance on reduced costs.
pub const REDUCED_COST_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    cost: Vec<f64>,
    a: DMatrix<f64>,
    b: Vec<f64>,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>, a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        if a.ncols() != cost.len() {
            return domain(format!("A has {} columns but c has {} entries", a.ncols(), cost.len()));
        }
        if a.nrows() != b.len() {
            return domain(format!("A has {} rows but b has {} entries", a.nrows(), b.len()));
        }
        if cost.iter().chain(b.iter()).chain(a.iter()).any(|v| !v.is_finite()) {
            return domain("non-finite LP data");
        }
        Ok(Self { cost, a, b })
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic variables of the final tableau (original indices).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn into_result(self) -> Result<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible => Err(Error::Infeasible),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major, `cols + 1` entries per row, last is the right-hand side.
    t: Vec<f64>,
    /// Reduced costs, last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Original constraint index of each tableau row.
    origin: Vec<usize>,
    excluded: Vec<bool>,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width() + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.t[r * self.width() + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let inv = 1.0 / self.at(pr, pc);
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f != 0.0 {
                for (v, p) in self.t[r * w..(r + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                self.t[r * w + pc] = 0.0;
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    fn set_objective(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        let w = self.width();
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(&self.t[r * w..(r + 1) * w]) {
                    *o -= cb * v;
                }
            }
        }
    }

    /// Bland's rule iterations until optimal or unbounded.
    fn run(&mut self) -> Result<Step> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Capacity("simplex pivot limit reached".into()));
            }
            let entering = (0..self.cols).find(|&j| !self.excluded[j] && self.obj[j] < -REDUCED_COST_TOL);
            let Some(pc) = entering else {
                return Ok(Step::Optimal);
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * bratio.abs().max(1.0);
                            if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return Ok(Step::Unbounded),
            }
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width();
        self.t.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.origin.remove(r);
        self.rows -= 1;
    }
}

/// Solves a standard-form LP.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let m = lp.num_constraints();
    let nv = lp.num_vars();
    let mut a = lp.a.clone();
    let mut b = lp.b.clone();
    for r in 0..m {
        if b[r] < 0.0 {
            b[r] = -b[r];
            a.row_mut(r).neg_mut();
        }
    }

    // Starting basis: reuse positive unit-like columns where possible.
    let mut basis: Vec<Option<usize>> = vec![None; m];
    for j in 0..nv {
        let col = a.column(j);
        let mut nz = col.iter().enumerate().filter(|(_, v)| **v != 0.0);
        if let (Some((r, &v)), None) = (nz.next(), nz.next()) {
            if v > 0.0 && basis[r].is_none() {
                basis[r] = Some(j);
                let inv = 1.0 / v;
                a.row_mut(r).scale_mut(inv);
                b[r] *= inv;
            }
        }
    }
    let artificial_rows: Vec<usize> = (0..m).filter(|&r| basis[r].is_none()).collect();
    let cols = nv + artificial_rows.len();
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    for r in 0..m {
        for j in 0..nv {
            t[r * w + j] = a[(r, j)];
        }
        t[r * w + cols] = b[r];
    }
    for (k, &r) in artificial_rows.iter().enumerate() {
        t[r * w + nv + k] = 1.0;
        basis[r] = Some(nv + k);
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        obj: Vec::new(),
        basis: basis.into_iter().map(|b| b.unwrap()).collect(),
        origin: (0..m).collect(),
        excluded: vec![false; cols],
        pivots: 0,
    };

    if !artificial_rows.is_empty() {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(nv) {
            *c = 1.0;
        }
        tab.set_objective(&phase1);
        tab.run()?;
        let infeasibility = -tab.obj[cols];
        let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= nv {
                let pc = (0..nv)
                    .filter(|&j| tab.at(r, j).abs() > 1e-9)
                    .max_by(|&i, &j| tab.at(r, i).abs().total_cmp(&tab.at(r, j).abs()).then(j.cmp(&i)));
                match pc {
                    Some(pc) => tab.pivot(r, pc),
                    None => {
                        tab.remove_row(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for j in nv..cols {
            tab.excluded[j] = true;
        }
    }

    let mut cost = lp.cost.clone();
    cost.resize(cols, 0.0);
    tab.set_objective(&cost);
    if let Step::Unbounded = tab.run()? {
        return Ok(LpOutcome::Unbounded);
    }

    let x = basic_solution(lp, &tab);
    Ok(LpOutcome::Optimal(LpSolution {
        objective: lp.objective(&x),
        x,
        basis: tab.basis.clone(),
        pivots: tab.pivots,
    }))
}

/// Re-solves `B x_B = b` on the original data for the final basis; falls back
/// to the tableau values if that system is numerically singular.
fn basic_solution(lp: &LinearProgram, tab: &Tableau) -> Vec<f64> {
    let nv = lp.num_vars();
    let mut x = vec![0.0; nv];
    let k = tab.rows;
    let mut bmat = DMatrix::zeros(k, k);
    let mut rhs = DVector::zeros(k);
    for (i, &orig) in tab.origin.iter().enumerate() {
        rhs[i] = lp.b[orig];
        for (c, &j) in tab.basis.iter().enumerate() {
            bmat[(i, c)] = lp.a[(orig, j)];
        }
    }
    let refined = bmat.lu().solve(&rhs).filter(|v| v.iter().all(|x| x.is_finite()));
    for (c, &j) in tab.basis.iter().enumerate() {
        let v = match &refined {
            Some(sol) if (sol[c] - tab.rhs(c)).abs() <= 1e-6 * (1.0 + tab.rhs(c).abs()) => sol[c],
            _ => tab.rhs(c),
        };
        x[j] = v.max(0.0);
    }
    x
}
