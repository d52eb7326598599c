//! Dense two-phase primal simplex for small linear programs.
//!
//! Problems here have at most a few dozen variables, so the solver keeps a
//! full dense tableau and uses Bland's rule for both the entering and the
//! leaving variable. That makes every solve deterministic and guarantees the
//! returned point is a basic (vertex) solution, which the outer-bound code
//! relies on when counting active network states.
//!
//! After the final pivot the basic solution and the dual multipliers are
//! recomputed from the original standardized matrix with a fresh LU solve,
//! so accumulated tableau round-off does not leak into reported values.

use std::fmt;

use thiserror::Error;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Smallest admissible pivot element, scaled by the largest entry of the column when that exceeds 1.
pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced costs above this are treated as improving.
const COST_TOL: f64 = 1e-10;
/// Number of rejected sub-tolerance pivots tolerated before giving up.
const MAX_TINY_PIVOTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("numerical breakdown: pivot elements repeatedly below {PIVOT_TOL:e}")]
    NumericalBreakdown,
    #[error("iteration limit of {0} pivots reached")]
    IterationLimit(usize),
    #[error("final point violates constraint {row} by {violation:e}")]
    InaccurateSolution { row: usize, violation: f64 },
}

/// `maximize objective . x` subject to per-row relations and per-variable bounds.
///
/// Every variable has lower bound 0 and no upper bound unless changed with
/// [`LinearProgram::set_bounds`]. A lower bound of `None` means unbounded below.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    relations: Vec<Relation>,
    rhs: Vec<f64>,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            lower: vec![Some(0.0); n],
            upper: vec![None; n],
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
        self
    }

    /// Add a row given as `(variable, coefficient)` pairs; repeated variables accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> &mut Self {
        let mut row = vec![0.0; self.objective.len()];
        for &(j, a) in terms {
            row[j] += a;
        }
        self.add_constraint(row, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower_bounds(&self) -> &[Option<f64>] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[Option<f64>] {
        &self.upper
    }

    /// Check shapes and finiteness.
    pub fn check(&self) -> Result<(), SolverError> {
        let n = self.objective.len();
        if self.relations.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(SolverError::Malformed("row, relation and rhs counts differ".into()));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(SolverError::Malformed("bound vectors have wrong length".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(SolverError::Malformed(format!("row {i} has {} coefficients, expected {n}", row.len())));
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(SolverError::Malformed(format!("row {i} has a non-finite coefficient")));
            }
        }
        if self.objective.iter().chain(&self.rhs).any(|a| !a.is_finite()) {
            return Err(SolverError::Malformed("non-finite objective or rhs".into()));
        }
        let finite_bound = |b: &Option<f64>| b.map_or(true, |v| v.is_finite());
        if !self.lower.iter().chain(&self.upper).all(finite_bound) {
            return Err(SolverError::Malformed("non-finite variable bound".into()));
        }
        Ok(())
    }

    /// Evaluate `objective . x`.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any row or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for ((row, rel), b) in self.rows.iter().zip(&self.relations).zip(&self.rhs) {
            let lhs = dot(row, x);
            let v = match rel {
                Relation::Le => lhs - b,
                Relation::Ge => b - lhs,
                Relation::Eq => (lhs - b).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &xj) in x.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - xj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(xj - u);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

/// Result of [`solve_lp`].
///
/// `objective`, `x` and `duals` are meaningful only for [`LpStatus::Optimal`];
/// otherwise the vectors are empty and `objective` is NaN (infeasible) or
/// +inf (unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Primal point in the caller's variables.
    pub x: Vec<f64>,
    /// Basic columns of the standardized problem, in row order.
    pub basis: Vec<usize>,
    /// One multiplier per caller constraint. Sign convention for a maximization:
    /// `<=` rows have `y >= 0`, `>=` rows have `y <= 0`, `=` rows are free, and
    /// `objective - A^T y` is the vector of bound multipliers.
    pub duals: Vec<f64>,
    /// Number of equality rows after standardization (caller rows plus finite upper bounds).
    pub standard_rows: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, standard_rows: usize) -> Self {
        LpSolution {
            status,
            objective: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NAN,
            },
            x: Vec::new(),
            basis: Vec::new(),
            duals: Vec::new(),
            standard_rows,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How a caller variable maps onto non-negative standardized columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + s`
    Shifted { col: usize, lower: f64 },
    /// `x = upper - s`
    Reflected { col: usize, upper: f64 },
    /// `x = s_pos - s_neg`
    Split { pos: usize, neg: usize },
}

/// `A s (rel) b`, `s >= 0`, maximize `c . s + offset`.
struct Standard {
    a: Vec<Vec<f64>>,
    rel: Vec<Relation>,
    b: Vec<f64>,
    c: Vec<f64>,
    offset: f64,
    vars: Vec<VarMap>,
    /// +1 or -1 for every caller row (rows negated to make `b >= 0`).
    row_sign: Vec<f64>,
    caller_rows: usize,
}

fn standardize(lp: &LinearProgram) -> Option<Standard> {
    let n = lp.num_vars();
    let mut vars = Vec::with_capacity(n);
    let mut ncols = 0;
    for j in 0..n {
        let map = match (lp.lower[j], lp.upper[j]) {
            (Some(l), u) => {
                if let Some(u) = u {
                    if u < l {
                        return None;
                    }
                }
                VarMap::Shifted { col: ncols, lower: l }
            }
            (None, Some(u)) => VarMap::Reflected { col: ncols, upper: u },
            (None, None) => {
                ncols += 1;
                VarMap::Split { pos: ncols - 1, neg: ncols }
            }
        };
        ncols += 1;
        vars.push(map);
    }

    let mut c = vec![0.0; ncols];
    let mut offset = 0.0;
    for (j, map) in vars.iter().enumerate() {
        let cj = lp.objective[j];
        match *map {
            VarMap::Shifted { col, lower } => {
                c[col] += cj;
                offset += cj * lower;
            }
            VarMap::Reflected { col, upper } => {
                c[col] -= cj;
                offset += cj * upper;
            }
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }

    let mut a = Vec::new();
    let mut rel = Vec::new();
    let mut b = Vec::new();
    for ((row, &r), &rhs) in lp.rows.iter().zip(&lp.relations).zip(&lp.rhs) {
        let mut srow = vec![0.0; ncols];
        let mut srhs = rhs;
        for (j, map) in vars.iter().enumerate() {
            let aj = row[j];
            if aj == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shifted { col, lower } => {
                    srow[col] += aj;
                    srhs -= aj * lower;
                }
                VarMap::Reflected { col, upper } => {
                    srow[col] -= aj;
                    srhs -= aj * upper;
                }
                VarMap::Split { pos, neg } => {
                    srow[pos] += aj;
                    srow[neg] -= aj;
                }
            }
        }
        a.push(srow);
        rel.push(r);
        b.push(srhs);
    }
    let caller_rows = a.len();
    for (j, map) in vars.iter().enumerate() {
        if let (VarMap::Shifted { col, lower }, Some(u)) = (*map, lp.upper[j]) {
            let mut srow = vec![0.0; ncols];
            srow[col] = 1.0;
            a.push(srow);
            rel.push(Relation::Le);
            b.push(u - lower);
        }
    }

    let mut row_sign = vec![1.0; a.len()];
    for i in 0..a.len() {
        if b[i] < 0.0 {
            for v in a[i].iter_mut() {
                *v = -*v;
            }
            b[i] = -b[i];
            rel[i] = rel[i].flipped();
            row_sign[i] = -1.0;
        }
    }

    Some(Standard { a, rel, b, c, offset, vars, row_sign, caller_rows })
}

/// Dense simplex tableau over structural, slack and artificial columns.
struct Tableau {
    m: usize,
    /// Total columns excluding the rhs.
    n: usize,
    /// Row-major `m x (n + 1)`; the last column is the rhs.
    t: Vec<f64>,
    /// Reduced costs `d_j` followed by `-z`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    iterations: usize,
    max_iterations: usize,
    tiny_pivots: usize,
}

enum StepOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.n + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.n + 1) + self.n]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.n + 1;
        let p = self.t[r * w + e];
        let inv = 1.0 / p;
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.t[r * w + e] = 1.0;
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[e];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[e] = 0.0;
            }
        }
        let f = self.obj[e];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.obj[e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// Run Bland's-rule pivots until no column in `0..allowed` improves.
    fn optimize(&mut self, allowed: usize) -> Result<StepOutcome, SolverError> {
        loop {
            let mut entering = None;
            let mut saw_tiny = false;
            for e in 0..allowed {
                if self.obj[e] <= COST_TOL {
                    continue;
                }
                // Bland: lowest-index improving column; leaving row by min ratio,
                // ties broken by lowest basic index.
                let mut best: Option<(usize, f64)> = None;
                let col_max = (0..self.m).map(|i| self.at(i, e)).fold(0.0f64, f64::max);
                let any_positive = col_max > 0.0;
                let pivot_tol = PIVOT_TOL * col_max.max(1.0);
                for i in 0..self.m {
                    let a = self.at(i, e);
                    if a <= pivot_tol {
                        continue;
                    }
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12 * br.abs().max(1.0)
                                || (ratio <= br + 1e-12 * br.abs().max(1.0) && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
                match best {
                    Some((r, _)) => {
                        entering = Some((r, e));
                        break;
                    }
                    None if any_positive => {
                        // only sub-tolerance pivots available in this column
                        saw_tiny = true;
                        continue;
                    }
                    None => return Ok(StepOutcome::Unbounded),
                }
            }
            let Some((r, e)) = entering else {
                if saw_tiny {
                    self.tiny_pivots += 1;
                    if self.tiny_pivots > MAX_TINY_PIVOTS {
                        return Err(SolverError::NumericalBreakdown);
                    }
                }
                return Ok(StepOutcome::Optimal);
            };
            if saw_tiny {
                self.tiny_pivots += 1;
                if self.tiny_pivots > MAX_TINY_PIVOTS {
                    return Err(SolverError::NumericalBreakdown);
                }
            }
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(SolverError::IterationLimit(self.max_iterations));
            }
            self.pivot(r, e);
        }
    }
}

/// Solve `lp` to a vertex optimum.
///
/// Infeasible and unbounded programs are reported through
/// [`LpSolution::status`]; only malformed input or numerical trouble is an `Err`.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, SolverError> {
    lp.check()?;
    let Some(std) = standardize(lp) else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, 0));
    };
    let m = std.a.len();
    let ns = std.c.len();

    let n_slack = std.rel.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = std.rel.iter().filter(|r| **r != Relation::Le).count();
    let first_slack = ns;
    let first_artificial = ns + n_slack;
    let n = first_artificial + n_art;
    let w = n + 1;

    let mut t = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut slack = first_slack;
    let mut art = first_artificial;
    for i in 0..m {
        t[i * w..i * w + ns].copy_from_slice(&std.a[i]);
        t[i * w + n] = std.b[i];
        match std.rel[i] {
            Relation::Le => {
                t[i * w + slack] = 1.0;
                basis[i] = slack;
                slack += 1;
            }
            Relation::Ge => {
                t[i * w + slack] = -1.0;
                slack += 1;
                t[i * w + art] = 1.0;
                basis[i] = art;
                art += 1;
            }
            Relation::Eq => {
                t[i * w + art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
    }

    let mut tab = Tableau {
        m,
        n,
        t,
        obj: vec![0.0; w],
        basis,
        first_artificial,
        iterations: 0,
        max_iterations: 10_000 + 100 * (m + n),
        tiny_pivots: 0,
    };

    if n_art > 0 {
        // phase 1: maximize -(sum of artificials)
        for i in 0..m {
            if tab.basis[i] >= first_artificial {
                for j in 0..w {
                    tab.obj[j] += tab.t[i * w + j];
                }
            }
        }
        for j in first_artificial..n {
            tab.obj[j] = 0.0;
        }
        tab.optimize(n)?;
        let scale = std.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= first_artificial).map(|i| tab.rhs(i)).sum();
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, m));
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if tab.basis[i] < first_artificial {
                continue;
            }
            let (j, mag) = (0..first_artificial).map(|j| (j, tab.at(i, j).abs())).fold((0, 0.0), |acc, v| {
                if v.1 > acc.1 {
                    v
                } else {
                    acc
                }
            });
            if mag > 1e-7 {
                tab.pivot(i, j);
            }
        }
    }

    // phase 2 reduced costs for the current basis
    let mut cfull = vec![0.0; n];
    cfull[..ns].copy_from_slice(&std.c);
    tab.obj.iter_mut().for_each(|v| *v = 0.0);
    tab.obj[..n].copy_from_slice(&cfull);
    for i in 0..m {
        let cb = cfull[tab.basis[i]];
        if cb != 0.0 {
            for j in 0..w {
                tab.obj[j] -= cb * tab.t[i * w + j];
            }
        }
    }
    for i in 0..m {
        tab.obj[tab.basis[i]] = 0.0;
    }
    if let StepOutcome::Unbounded = tab.optimize(tab.first_artificial)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, m));
    }

    // Recompute the basic solution and duals from the original columns.
    let column = |j: usize| -> Vec<f64> {
        let mut col = vec![0.0; m];
        if j < ns {
            for (c, row) in col.iter_mut().zip(&std.a) {
                *c = row[j];
            }
        } else {
            // slack/artificial columns are signed unit vectors; recover them from
            // the construction order
            let mut s = first_slack;
            let mut a = first_artificial;
            for (c, rel) in col.iter_mut().zip(&std.rel) {
                match rel {
                    Relation::Le => {
                        if s == j {
                            *c = 1.0;
                        }
                        s += 1;
                    }
                    Relation::Ge => {
                        if s == j {
                            *c = -1.0;
                        }
                        if a == j {
                            *c = 1.0;
                        }
                        s += 1;
                        a += 1;
                    }
                    Relation::Eq => {
                        if a == j {
                            *c = 1.0;
                        }
                        a += 1;
                    }
                }
            }
        }
        col
    };
    let bmat: Vec<Vec<f64>> = tab.basis.iter().map(|&j| column(j)).collect();
    // bmat[k] is the column of the k-th basic variable
    let mut xs = vec![0.0; n];
    let mut y = vec![0.0; m];
    let lu_ok = {
        // B x_B = b
        let mut dense = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                dense[i * m + k] = bmat[k][i];
            }
        }
        let xb = lu_solve(dense.clone(), m, std.b.clone());
        // B^T y = c_B
        let mut dense_t = vec![0.0; m * m];
        for k in 0..m {
            for i in 0..m {
                dense_t[k * m + i] = bmat[k][i];
            }
        }
        let cb: Vec<f64> = tab.basis.iter().map(|&j| cfull[j]).collect();
        let yy = lu_solve(dense_t, m, cb);
        match (xb, yy) {
            (Some(xb), Some(yy)) => {
                for (k, &j) in tab.basis.iter().enumerate() {
                    xs[j] = xb[k];
                }
                y = yy;
                true
            }
            _ => false,
        }
    };
    if !lu_ok {
        for (i, &j) in tab.basis.iter().enumerate() {
            xs[j] = tab.rhs(i);
        }
    }
    for v in xs.iter_mut() {
        if *v < 0.0 && *v > -FEAS_TOL {
            *v = 0.0;
        }
    }

    let mut x = vec![0.0; lp.num_vars()];
    for (j, map) in std.vars.iter().enumerate() {
        x[j] = match *map {
            VarMap::Shifted { col, lower } => lower + xs[col],
            VarMap::Reflected { col, upper } => upper - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        };
    }

    for (i, ((row, rel), b)) in lp.rows.iter().zip(&lp.relations).zip(&lp.rhs).enumerate() {
        let lhs = dot(row, &x);
        let scale = 1.0f64.max(b.abs()).max(row.iter().zip(&x).map(|(a, v)| (a * v).abs()).sum());
        let v = match rel {
            Relation::Le => lhs - b,
            Relation::Ge => b - lhs,
            Relation::Eq => (lhs - b).abs(),
        };
        if v > FEAS_TOL * scale {
            return Err(SolverError::InaccurateSolution { row: i, violation: v });
        }
    }

    let duals = (0..std.caller_rows).map(|i| std.row_sign[i] * y[i]).collect();
    let objective = dot(&lp.objective, &x);
    debug_assert!((objective - (dot(&std.c, &xs[..ns]) + std.offset)).abs() < 1e-6 * (1.0 + objective.abs()));

    Ok(LpSolution { status: LpStatus::Optimal, objective, x, basis: tab.basis.clone(), duals, standard_rows: m })
}

/// Solve `M z = rhs` for a row-major `n x n` matrix by Gaussian elimination
/// with partial pivoting. `None` when the matrix is numerically singular.
fn lu_solve(mut a: Vec<f64>, n: usize, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    for k in 0..n {
        let (p, pv) =
            (k..n).map(|i| (i, a[i * n + k].abs())).fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pv < 1e-14 {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let d = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    let mut z = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k * n + j] * z[j]).sum();
        z[k] = (rhs[k] - s) / a[k * n + k];
    }
    Some(z)
}

/// The LP dual of `lp`, written again as a maximization.
///
/// For `max c.x` the dual is `min b.y`; it is returned as `max -b.y` so the
/// dual's optimal objective equals minus the primal optimum. Dual variable
/// `i` belongs to caller row `i`, followed by one variable per non-trivial
/// bound (a lower bound other than 0, or any finite upper bound), in variable
/// order, lower before upper. Variables for `>=` rows are negated so that
/// every dual variable is either `>= 0` or free.
pub fn dual_of(lp: &LinearProgram) -> LinearProgram {
    let n = lp.num_vars();
    // Collect every row the dual needs a multiplier for.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> =
        lp.rows.iter().zip(&lp.relations).zip(&lp.rhs).map(|((r, &rel), &b)| (r.clone(), rel, b)).collect();
    // true when the primal variable is sign-constrained (x >= 0)
    let mut nonneg = vec![false; n];
    for j in 0..n {
        match lp.lower[j] {
            Some(0.0) => nonneg[j] = true,
            Some(l) => {
                let mut r = vec![0.0; n];
                r[j] = 1.0;
                rows.push((r, Relation::Ge, l));
            }
            None => {}
        }
        if let Some(u) = lp.upper[j] {
            let mut r = vec![0.0; n];
            r[j] = 1.0;
            rows.push((r, Relation::Le, u));
        }
    }

    let k = rows.len();
    let sign: Vec<f64> = rows.iter().map(|(_, rel, _)| if *rel == Relation::Ge { -1.0 } else { 1.0 }).collect();
    let objective: Vec<f64> = rows.iter().zip(&sign).map(|((_, _, b), s)| -s * b).collect();
    let mut dual = LinearProgram::maximize(objective);
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        if *rel == Relation::Eq {
            dual.set_bounds(i, None, None);
        }
    }
    for j in 0..n {
        let coeffs: Vec<f64> = rows.iter().zip(&sign).map(|((r, _, _), s)| s * r[j]).collect();
        let rel = if nonneg[j] { Relation::Ge } else { Relation::Eq };
        dual.add_constraint(coeffs, rel, lp.objective[j]);
    }
    debug_assert_eq!(dual.num_vars(), k);
    dual
}
