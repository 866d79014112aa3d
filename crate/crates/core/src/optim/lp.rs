//! Dense-basis primal simplex for small linear programs.
//!
//! Problems are converted to standard form `min cᵀz, Az = b, z ≥ 0` and solved
//! with a two-phase revised simplex that keeps an explicit basis inverse.
//! Columns are stored as coefficient lists so that LPs with tens of thousands
//! of short columns (the interpolation LPs in `delta`) stay cheap to price.
//! Pricing is Dantzig's rule; after `stall_threshold` consecutive degenerate
//! pivots the solver switches to Bland's rule (lowest index enters, lowest
//! basic index leaves on ties) until the objective moves again.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// `(variable index, coefficient)` pairs; repeated indices are summed.
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `optimize objectiveᵀx` subject to the rows in `constraints` and
/// `bounds[j].0 ≤ x_j ≤ bounds[j].1` (infinite bounds allowed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A minimization over `n` variables, each defaulting to `x ≥ 0`.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense: Sense::Minimize,
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        LinearProgram {
            sense: Sense::Maximize,
            ..LinearProgram::minimize(objective)
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, kind, rhs });
        self.constraints.len() - 1
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Eq, rhs)
    }

    /// Adds a row from a dense coefficient slice.
    pub fn add_dense(&mut self, coeffs: &[f64], kind: RowKind, rhs: f64) -> usize {
        let sparse = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        self.add_row(sparse, kind, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = (f64::NEG_INFINITY, f64::INFINITY);
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for row in &self.constraints {
            let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            let v = match row.kind {
                RowKind::Le => lhs - row.rhs,
                RowKind::Ge => row.rhs - lhs,
                RowKind::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (xj, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values (meaningful when optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row multipliers as sensitivities `∂objective/∂rhsᵢ`, one per constraint.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: usize,
    pub stall_threshold: usize,
    pub refactor_every: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-8,
            optimality_tol: 1e-10,
            pivot_tol: 1e-10,
            max_iterations: 200_000,
            stall_threshold: 50,
            refactor_every: 50,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &LpOptions::default())
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// x = lo + z
    Shift { col: usize, lo: f64 },
    /// x = hi − z
    Flip { col: usize, hi: f64 },
    /// x = z⁺ − z⁻
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    cols: Vec<Vec<(usize, f64)>>,
    costs: Vec<f64>,
    rhs: Vec<f64>,
    /// +1 or −1 per row: rows with negative rhs are negated.
    row_sign: Vec<f64>,
    /// Column usable as an initial unit basis column, per row.
    unit_col: Vec<Option<usize>>,
    var_map: Vec<VarMap>,
    cost_offset: f64,
}

fn to_standard_form(lp: &LinearProgram) -> Result<StandardForm> {
    let n = lp.num_vars();
    if lp.bounds.len() != n {
        return Err(Error::LpNumerical(format!(
            "bounds length {} does not match {} variables",
            lp.bounds.len(),
            n
        )));
    }
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut costs = Vec::new();
    let mut var_map = Vec::with_capacity(n);
    let mut cost_offset = 0.0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // (col, upper) for finite ranges
    for j in 0..n {
        let c = sign * lp.objective[j];
        if !c.is_finite() {
            return Err(Error::LpNumerical(format!("non-finite objective at {j}")));
        }
        let (lo, hi) = lp.bounds[j];
        if lo > hi {
            return Err(Error::LpNumerical(format!("empty bounds for variable {j}")));
        }
        if lo.is_finite() {
            let col = costs.len();
            costs.push(c);
            cost_offset += c * lo;
            var_map.push(VarMap::Shift { col, lo });
            if hi.is_finite() {
                extra_rows.push((col, hi - lo));
            }
        } else if hi.is_finite() {
            let col = costs.len();
            costs.push(-c);
            cost_offset += c * hi;
            var_map.push(VarMap::Flip { col, hi });
        } else {
            let pos = costs.len();
            costs.push(c);
            costs.push(-c);
            var_map.push(VarMap::Split { pos, neg: pos + 1 });
        }
    }
    let n_vars = costs.len();
    let m = lp.constraints.len() + extra_rows.len();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_vars];
    let mut rhs = Vec::with_capacity(m);
    let mut kinds = Vec::with_capacity(m);

    for (i, row) in lp.constraints.iter().enumerate() {
        let mut b = row.rhs;
        if !b.is_finite() {
            return Err(Error::LpNumerical(format!("non-finite rhs in row {i}")));
        }
        for &(j, a) in &row.coeffs {
            if j >= n || !a.is_finite() {
                return Err(Error::LpNumerical(format!("bad coefficient ({j}, {a}) in row {i}")));
            }
            if a == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Shift { col, lo } => {
                    b -= a * lo;
                    cols[col].push((i, a));
                }
                VarMap::Flip { col, hi } => {
                    b -= a * hi;
                    cols[col].push((i, -a));
                }
                VarMap::Split { pos, neg } => {
                    cols[pos].push((i, a));
                    cols[neg].push((i, -a));
                }
            }
        }
        rhs.push(b);
        kinds.push(row.kind);
    }
    for (k, &(col, ub)) in extra_rows.iter().enumerate() {
        let i = lp.constraints.len() + k;
        cols[col].push((i, 1.0));
        rhs.push(ub);
        kinds.push(RowKind::Le);
    }
    // Merge repeated row entries and drop zeros.
    for col in cols.iter_mut() {
        col.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
        for &(i, a) in col.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => merged.push((i, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        *col = merged;
    }

    let mut row_sign = vec![1.0; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            row_sign[i] = -1.0;
            rhs[i] = -rhs[i];
        }
    }
    for col in cols.iter_mut() {
        for e in col.iter_mut() {
            e.1 *= row_sign[e.0];
        }
    }
    let mut unit_col = vec![None; m];
    for i in 0..m {
        let slack_coef = match kinds[i] {
            RowKind::Le => 1.0,
            RowKind::Ge => -1.0,
            RowKind::Eq => continue,
        } * row_sign[i];
        let col = cols.len();
        cols.push(vec![(i, slack_coef)]);
        costs.push(0.0);
        if slack_coef > 0.0 {
            unit_col[i] = Some(col);
        }
    }
    Ok(StandardForm {
        cols,
        costs,
        rhs,
        row_sign,
        unit_col,
        var_map,
        cost_offset,
    })
}

/// Steps at or below this size count as degenerate pivots.
const DEGENERATE_STEP: f64 = 1e-12;

/// Smallest pivot accepted, relative to the largest entry of the column.
const PIVOT_RATIO: f64 = 1e-9;

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    m: usize,
    /// Structural and slack columns followed by artificial unit columns.
    cols: Vec<&'a [(usize, f64)]>,
    n_real: usize,
    b: &'a [f64],
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<f64>,
    binv: Vec<f64>,
    opts: &'a LpOptions,
    iterations: usize,
    since_refactor: usize,
    /// Largest right-hand side magnitude (at least 1).
    b_scale: f64,
}

impl<'a> Simplex<'a> {
    fn pi(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for r in 0..m {
            let c = costs[self.basis[r]];
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (p, &v) in pi.iter_mut().zip(row) {
                    *p += c * v;
                }
            }
        }
        pi
    }

    fn ftran(&self, col: &[(usize, f64)]) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(i, v) in col {
            for (r, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[r * m + i] * v;
            }
        }
        alpha
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_real
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (r, &j) in self.basis.iter().enumerate() {
            for &(i, v) in self.cols[j] {
                bmat[(i, r)] = v;
            }
        }
        let inv = bmat.clone().try_inverse().ok_or_else(|| {
            Error::LpNumerical(format!(
                "singular basis at iteration {} (m = {m})",
                self.iterations
            ))
        })?;
        // Residual check on a probe vector guards against a numerically
        // useless inverse without another O(m³) product.
        let probe = DVector::<f64>::from_fn(m, |i, _| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract());
        let resid = (&bmat * (&inv * &probe) - &probe).amax() / probe.amax();
        if !resid.is_finite() || resid > 1e-6 {
            return Err(Error::LpNumerical(format!(
                "ill-conditioned basis at iteration {}: ‖B·B⁻¹·v − v‖∞ = {resid:e}",
                self.iterations
            )));
        }
        for r in 0..m {
            for i in 0..m {
                self.binv[r * m + i] = inv[(r, i)];
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.xb[r] = row.iter().zip(self.b).map(|(a, b)| a * b).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], theta: f64) {
        let m = self.m;
        for (i, x) in self.xb.iter_mut().enumerate() {
            *x -= theta * alpha[i];
        }
        self.xb[r] = theta;
        let ar = alpha[r];
        let prow: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v / ar).collect();
        for i in 0..m {
            if i == r {
                continue;
            }
            let a = alpha[i];
            if a != 0.0 {
                let row = &mut self.binv[i * m..(i + 1) * m];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= a * p;
                }
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&prow);
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Harris two-pass ratio test. The first pass finds the largest step
    /// keeping every basic variable above `−feasibility_tol`; the second picks,
    /// among rows blocking within that step, the largest pivot (or the lowest
    /// basis index under Bland's rule). Returns `(row, step)`.
    fn ratio_test(&self, alpha: &[f64], phase_two: bool, bland: bool) -> Option<(usize, f64)> {
        let amax = alpha.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let tol = self.opts.pivot_tol.max(PIVOT_RATIO * amax);
        let prefer = |cand: Option<usize>, r: usize| match cand {
            None => Some(r),
            Some(br) => {
                let better = if bland {
                    self.basis[r] < self.basis[br]
                } else {
                    alpha[r].abs() > alpha[br].abs()
                };
                Some(if better { r } else { br })
            }
        };
        if phase_two {
            // Artificial variables stuck at zero leave first, at zero step.
            let mut art = None;
            for r in 0..self.m {
                if self.is_artificial(self.basis[r]) && alpha[r].abs() > tol {
                    art = prefer(art, r);
                }
            }
            if let Some(r) = art {
                return Some((r, 0.0));
            }
        }
        let ratio = |r: usize| self.xb[r].max(0.0) / alpha[r];
        let mut theta_min = f64::INFINITY;
        for r in 0..self.m {
            if alpha[r] > tol {
                theta_min = theta_min.min(ratio(r));
            }
        }
        if !theta_min.is_finite() {
            return None;
        }
        if theta_min <= DEGENERATE_STEP {
            // Degenerate vertex: lexicographic rule on rows of B⁻¹/αᵣ, which
            // rules out cycling whatever the entering choice.
            let mut best: Option<usize> = None;
            for r in 0..self.m {
                if alpha[r] > tol && ratio(r) <= DEGENERATE_STEP {
                    best = match best {
                        None => Some(r),
                        Some(br) if self.lex_less(r, alpha[r], br, alpha[br]) => Some(r),
                        keep => keep,
                    };
                }
            }
            return best.map(|r| (r, ratio(r)));
        }
        let delta = self.opts.feasibility_tol;
        let mut theta_max = f64::INFINITY;
        for r in 0..self.m {
            if alpha[r] > tol {
                theta_max = theta_max.min((self.xb[r].max(0.0) + delta) / alpha[r]);
            }
        }
        let mut best = None;
        for r in 0..self.m {
            if alpha[r] > tol && ratio(r) <= theta_max {
                best = prefer(best, r);
            }
        }
        best.map(|r| (r, ratio(r)))
    }

    /// Lexicographic comparison of `B⁻¹[r]/a` against `B⁻¹[s]/b`.
    fn lex_less(&self, r: usize, a: f64, s: usize, b: f64) -> bool {
        let m = self.m;
        let (row_r, row_s) = (&self.binv[r * m..(r + 1) * m], &self.binv[s * m..(s + 1) * m]);
        for (x, y) in row_r.iter().zip(row_s) {
            let (u, v) = (x / a, y / b);
            if (u - v).abs() > 1e-12 * (u.abs() + v.abs()) + 1e-14 {
                return u < v;
            }
        }
        self.basis[r] < self.basis[s]
    }

    fn run_phase(&mut self, costs: &[f64], phase_two: bool) -> Result<PhaseOutcome> {
        let mut stall = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(Error::LpNumerical(format!(
                    "iteration limit {} reached",
                    self.opts.max_iterations
                )));
            }
            if self.since_refactor >= self.opts.refactor_every.max(self.m) {
                self.refactor()?;
            }
            if !phase_two {
                // Feasibility reached: no point in further degenerate pivots.
                let infeas: f64 = (0..self.m)
                    .filter(|&r| self.is_artificial(self.basis[r]))
                    .map(|r| self.xb[r].max(0.0))
                    .sum();
                if infeas <= self.opts.feasibility_tol * self.b_scale {
                    return Ok(PhaseOutcome::Optimal);
                }
            }
            let pi = self.pi(costs);
            let limit = if phase_two { self.n_real } else { self.cols.len() };
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..limit {
                if self.in_basis[j] {
                    continue;
                }
                let d = costs[j] - self.cols[j].iter().map(|&(i, v)| pi[i] * v).sum::<f64>();
                if d < -self.opts.optimality_tol {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let alpha = self.ftran(self.cols[q]);
            let leave = self.ratio_test(&alpha, phase_two, bland);
            let Some((r, theta)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if alpha[r].abs() < 1e-11 {
                // Tiny pivot: refresh the factorization and retry once.
                if self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Err(Error::LpNumerical(format!(
                    "pivot element {:e} too small at iteration {}",
                    alpha[r], self.iterations
                )));
            }
            if theta <= 1e-12 {
                stall += 1;
                if stall >= self.opts.stall_threshold {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
                    self.pivot(r, q, &alpha, theta);
        }
    }
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    let sf = to_standard_form(lp)?;
    let m = sf.rhs.len();
    let n_real = sf.cols.len();
    let n_cons = lp.constraints.len();

    // Artificial columns for rows without a usable slack.
    let mut art_cols: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        match sf.unit_col[i] {
            Some(col) => basis.push(col),
            None => {
                basis.push(n_real + art_cols.len());
                art_cols.push(vec![(i, 1.0)]);
            }
        }
    }
    let mut cols: Vec<&[(usize, f64)]> = sf.cols.iter().map(|c| c.as_slice()).collect();
    cols.extend(art_cols.iter().map(|c| c.as_slice()));
    let total = cols.len();
    let mut in_basis = vec![false; total];
    for &j in &basis {
        in_basis[j] = true;
    }
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let mut sx = Simplex {
        m,
        cols,
        n_real,
        b: &sf.rhs,
        basis,
        in_basis,
        xb: sf.rhs.clone(),
        binv,
        opts,
        iterations: 0,
        since_refactor: 0,
        b_scale: sf.rhs.iter().fold(1.0_f64, |a, b| a.max(b.abs())),
    };
    let bscale = sx.b_scale;
    if !art_cols.is_empty() {
        let mut phase1 = vec![0.0; total];
        for c in phase1.iter_mut().skip(n_real) {
            *c = 1.0;
        }
        sx.run_phase(&phase1, false)?;
        sx.refactor()?;
        let infeas: f64 = (0..m)
            .filter(|&r| sx.is_artificial(sx.basis[r]))
            .map(|r| sx.xb[r].max(0.0))
            .sum();
        if infeas > opts.feasibility_tol * bscale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; lp.num_vars()],
                objective: f64::NAN,
                duals: vec![0.0; n_cons],
                iterations: sx.iterations,
            });
        }
        // Drive remaining zero-level artificials out of the basis.
        for r in 0..m {
            if !sx.is_artificial(sx.basis[r]) {
                continue;
            }
            let row: Vec<f64> = sx.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n_real {
                if sx.in_basis[j] {
                    continue;
                }
                let v: f64 = sx.cols[j].iter().map(|&(i, a)| row[i] * a).sum();
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let alpha = sx.ftran(sx.cols[j]);
                sx.xb[r] = 0.0;
                sx.pivot(r, j, &alpha, 0.0);
            }
        }
        sx.refactor()?;
    }

    let mut costs = sf.costs.clone();
    costs.resize(total, 0.0);
    let outcome = sx.run_phase(&costs, true)?;
    if let PhaseOutcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; lp.num_vars()],
            objective: match lp.sense {
                Sense::Minimize => f64::NEG_INFINITY,
                Sense::Maximize => f64::INFINITY,
            },
            duals: vec![0.0; n_cons],
            iterations: sx.iterations,
        });
    }
    sx.refactor()?;
    let mut z = vec![0.0; total];
    for (r, &j) in sx.basis.iter().enumerate() {
        z[j] = sx.xb[r].max(0.0);
    }
    let x: Vec<f64> = sf
        .var_map
        .iter()
        .map(|vm| match *vm {
            VarMap::Shift { col, lo } => lo + z[col],
            VarMap::Flip { col, hi } => hi - z[col],
            VarMap::Split { pos, neg } => z[pos] - z[neg],
        })
        .collect();
    let pi = sx.pi(&costs);
    let sense_sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let duals = (0..n_cons).map(|i| sense_sign * sf.row_sign[i] * pi[i]).collect();
    let _ = sf.cost_offset;
    let objective = lp.objective_value(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals,
        iterations: sx.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_x_bounded_by_three() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_le(vec![(0, 1.0)], 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covering_row() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.add_ge(vec![(0, 1.0), (1, 1.0)], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add_le(vec![(0, 1.0)], -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add_le(vec![(1, 1.0)], 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min x - y, x free with x ≥ -2 via a row, y ∈ (-∞, 5]
        let mut lp = LinearProgram::minimize(vec![1.0, -1.0]);
        lp.set_free(0);
        lp.set_bounds(1, f64::NEG_INFINITY, 5.0);
        lp.add_ge(vec![(0, 1.0)], -2.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.x[0] + 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 5.0).abs() < 1e-12);
        assert!((sol.objective + 7.0).abs() < 1e-12);
    }

    #[test]
    fn boxed_variable_and_equality() {
        // max 2a + b, a + b = 3, 0 ≤ a ≤ 1
        let mut lp = LinearProgram::maximize(vec![2.0, 1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.add_eq(vec![(0, 1.0), (1, 1.0)], 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 4.0).abs() < 1e-12);
        assert!(lp.max_violation(&sol.x) < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.add_eq(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_eq(vec![(0, 2.0), (1, 2.0)], 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance; Bland fallback must terminate.
        let mut lp = LinearProgram::minimize(vec![-0.75, 20.0, -0.5, 6.0]);
        lp.add_le(vec![(0, 0.25), (1, -8.0), (2, -1.0), (3, 9.0)], 0.0);
        lp.add_le(vec![(0, 0.5), (1, -12.0), (2, -0.5), (3, 3.0)], 0.0);
        lp.add_le(vec![(2, 1.0)], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective + 1.25).abs() < 1e-10);
    }
}
