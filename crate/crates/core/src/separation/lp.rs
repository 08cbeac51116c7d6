//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are small (a few hundred rows at most), so a full tableau is
//! rebuilt once and pivoted in place. Every variable carries a finite box,
//! which means the maximization can never be unbounded.

use crate::error::{Error, Result};

/// Pivot and reduced-cost tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }
}

/// Maximize `objective · x` subject to `constraints` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective at `primal`; zero unless the status is optimal.
    pub value: f64,
    pub primal: Vec<f64>,
}

/// How an original variable is expressed through nonnegative tableau columns.
enum VarMap {
    /// `x = offset + s`
    Shift { col: usize, offset: f64 },
    /// `x = offset - s`
    Flip { col: usize, offset: f64 },
    /// `x = s_plus - s_minus`
    Split { plus: usize, minus: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over the columns flagged in `active`. Returns false if
    /// the objective is unbounded.
    fn optimize(&mut self, cost: &[f64], active: &[bool], stage: &'static str) -> Result<bool> {
        let m = self.rows.len();
        let mut is_basic = vec![false; self.ncols];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column.
            let mut entering = None;
            for j in 0..self.ncols {
                if !active[j] || is_basic[j] {
                    continue;
                }
                let mut reduced = cost[j];
                for i in 0..m {
                    reduced -= cost[self.basis[i]] * self.rows[i][j];
                }
                if reduced > FEASIBILITY_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(true);
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][c];
                if a > FEASIBILITY_TOL {
                    let ratio = self.rhs(i) / a;
                    leaving = match leaving {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leaving else {
                return Ok(false);
            };
            is_basic[self.basis[r]] = false;
            is_basic[c] = true;
            self.pivot(r, c);
        }
        Err(Error::LpFailure {
            stage,
            reason: format!("no convergence after {MAX_PIVOTS} pivots"),
        })
    }
}

/// Solves a bounded linear program.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let nv = problem.objective.len();
    if problem.lower.len() != nv || problem.upper.len() != nv {
        return Err(Error::DimensionMismatch(format!(
            "{nv} objective coefficients but {} lower / {} upper bounds",
            problem.lower.len(),
            problem.upper.len()
        )));
    }
    if let Some(k) = problem.constraints.iter().position(|c| c.coeffs.len() != nv) {
        return Err(Error::DimensionMismatch(format!(
            "constraint {k} has {} coefficients, expected {nv}",
            problem.constraints[k].coeffs.len()
        )));
    }
    let all_finite = problem.objective.iter().chain(&problem.lower).chain(&problem.upper).all(|v| v.is_finite())
        && problem
            .constraints
            .iter()
            .all(|c| c.rhs.is_finite() && c.coeffs.iter().all(|v| v.is_finite()));
    if !all_finite {
        return Err(Error::InvalidParameter("LP data must be finite".into()));
    }
    if let Some(j) = (0..nv).find(|&j| problem.lower[j] > problem.upper[j]) {
        return Ok(infeasible(nv, j));
    }

    // Nonnegative structural columns and their upper bounds.
    let mut maps = Vec::with_capacity(nv);
    let mut ub: Vec<f64> = Vec::new();
    for j in 0..nv {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        if l >= 0.0 {
            maps.push(VarMap::Shift { col: ub.len(), offset: l });
            ub.push(u - l);
        } else if u <= 0.0 {
            maps.push(VarMap::Flip { col: ub.len(), offset: u });
            ub.push(u - l);
        } else {
            maps.push(VarMap::Split {
                plus: ub.len(),
                minus: ub.len() + 1,
            });
            ub.push(u);
            ub.push(-l);
        }
    }
    let ns = ub.len();

    // Rows in terms of the structural columns: (coeffs, relation, rhs).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &problem.constraints {
        let mut a = vec![0.0; ns];
        let mut rhs = c.rhs;
        for (j, map) in maps.iter().enumerate() {
            let cj = c.coeffs[j];
            match *map {
                VarMap::Shift { col, offset } => {
                    a[col] += cj;
                    rhs -= cj * offset;
                }
                VarMap::Flip { col, offset } => {
                    a[col] -= cj;
                    rhs -= cj * offset;
                }
                VarMap::Split { plus, minus } => {
                    a[plus] += cj;
                    a[minus] -= cj;
                }
            }
        }
        rows.push((a, c.relation, rhs));
    }
    for (k, &u) in ub.iter().enumerate() {
        let mut a = vec![0.0; ns];
        a[k] = 1.0;
        rows.push((a, Relation::Le, u));
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|v| *v = -*v);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Column layout: structural | slack/surplus (one per inequality) | artificial.
    let m = rows.len();
    let n_ineq = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = ns + n_ineq + n_art;
    let art_start = ns + n_ineq;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
    };
    let (mut next_slack, mut next_art) = (ns, art_start);
    let mut art_scale: f64 = 1.0;
    for (a, rel, rhs) in &rows {
        let mut t = vec![0.0; ncols + 1];
        t[..ns].copy_from_slice(a);
        t[ncols] = *rhs;
        match rel {
            Relation::Le => {
                t[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                t[next_slack] = -1.0;
                next_slack += 1;
                t[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
                art_scale = art_scale.max(rhs.abs());
            }
            Relation::Eq => {
                t[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
                art_scale = art_scale.max(rhs.abs());
            }
        }
        tab.rows.push(t);
    }

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        cost[art_start..].iter_mut().for_each(|c| *c = -1.0);
        let active = vec![true; ncols];
        tab.optimize(&cost, &active, "phase 1")?;
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= art_start)
            .map(|i| tab.rhs(i))
            .sum();
        if infeasibility > FEASIBILITY_TOL * art_scale {
            return Ok(infeasible(nv, 0));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| {
                    tab.rows[i][c].abs() > FEASIBILITY_TOL && !tab.basis.contains(&c)
                }) {
                    tab.pivot(i, c);
                }
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    for (j, map) in maps.iter().enumerate() {
        let cj = problem.objective[j];
        match *map {
            VarMap::Shift { col, .. } => cost[col] += cj,
            VarMap::Flip { col, .. } => cost[col] -= cj,
            VarMap::Split { plus, minus } => {
                cost[plus] += cj;
                cost[minus] -= cj;
            }
        }
    }
    let mut active = vec![true; ncols];
    active[art_start..].iter_mut().for_each(|a| *a = false);
    let bounded = tab.optimize(&cost, &active, "phase 2")?;

    let mut s = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        s[b] = tab.rhs(i);
    }
    let primal: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset } => offset + s[col],
            VarMap::Flip { col, offset } => offset - s[col],
            VarMap::Split { plus, minus } => s[plus] - s[minus],
        })
        .collect();
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: 0.0,
            primal,
        });
    }
    verify(problem, &primal)?;
    let value = dot(&problem.objective, &primal);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        primal,
    })
}

fn infeasible(nv: usize, _hint: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        value: 0.0,
        primal: vec![0.0; nv],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Confirms that an optimal primal really satisfies every constraint.
fn verify(problem: &LpProblem, x: &[f64]) -> Result<()> {
    for (j, &v) in x.iter().enumerate() {
        let slack = 1e-7 * (1.0 + problem.upper[j].abs().max(problem.lower[j].abs()));
        if v < problem.lower[j] - slack || v > problem.upper[j] + slack {
            return Err(Error::LpFailure {
                stage: "verification",
                reason: format!("variable {j} = {v} outside its bounds"),
            });
        }
    }
    for (k, c) in problem.constraints.iter().enumerate() {
        let lhs = dot(&c.coeffs, x);
        let scale: f64 = 1.0
            + c.rhs.abs()
            + c.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).sum::<f64>();
        let slack = 1e-7 * scale;
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + slack,
            Relation::Ge => lhs >= c.rhs - slack,
            Relation::Eq => (lhs - c.rhs).abs() <= slack,
        };
        if !ok {
            return Err(Error::LpFailure {
                stage: "verification",
                reason: format!("constraint {k} violated: lhs {lhs}, rhs {}", c.rhs),
            });
        }
    }
    Ok(())
}
