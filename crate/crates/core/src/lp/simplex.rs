//! Bounded-variable primal simplex with a product-form inverse.
//!
//! Phase 1 is the composite method: the cost vector is the gradient of the
//! total bound violation of basic variables, so there are no artificial
//! columns and any basis (including a caller-supplied warm start) is a valid
//! starting point. Dantzig pricing with Bland's rule engaged after a run of
//! degenerate pivots. All tie-breaks are by index, which makes the pivot
//! path, and therefore the returned basis and duals, deterministic.

use super::{Basis, BasisStatus, LinearProgram, LpError, LpSolution, LpStatus, Rel};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Per-row feasibility target.
    pub feas_tol: f64,
    /// Bound violation target for basic variables.
    pub bound_tol: f64,
    /// Reduced-cost optimality tolerance.
    pub opt_tol: f64,
    /// Smallest acceptable pivot magnitude.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before Bland's rule engages.
    pub bland_after: u64,
    /// Refactorization cadence in pivots.
    pub refactor_every: u64,
    /// Hard iteration cap; 0 means scale with problem size.
    pub max_iterations: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feas_tol: 1e-7,
            bound_tol: 1e-9,
            opt_tol: 1e-7,
            pivot_tol: 1e-8,
            bland_after: 500,
            refactor_every: 100,
            max_iterations: 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
    FreeZero,
}

struct Eta {
    pivot_row: u32,
    pivot_val: f64,
    /// Off-pivot entries of the transformed entering column.
    entries: Vec<(u32, f64)>,
}

/// Working problem after empty-row/column removal (the only presolve).
struct Work {
    /// CSC storage for structural columns over kept rows.
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    /// Slack bounds per kept row (lower, upper).
    slack_lb: Vec<f64>,
    slack_ub: Vec<f64>,
    /// Map work var -> original var.
    var_map: Vec<usize>,
    /// Map work row -> original row.
    row_map: Vec<usize>,
    /// Original vars fixed by presolve: (orig var, value, status).
    fixed: Vec<(usize, f64, BasisStatus)>,
}

enum Presolved {
    Work(Work),
    /// An empty column with an improving unbounded direction.
    Unbounded,
    /// An empty row that cannot hold.
    Infeasible,
}

fn presolve(lp: &LinearProgram) -> Presolved {
    let n = lp.num_vars();
    let mut used = vec![false; n];
    for r in &lp.rows {
        for &(j, _) in &r.coeffs {
            used[j] = true;
        }
    }
    let mut fixed = Vec::new();
    let mut var_map = Vec::new();
    let mut work_of_var = vec![usize::MAX; n];
    for j in 0..n {
        if used[j] {
            work_of_var[j] = var_map.len();
            var_map.push(j);
        } else {
            // Empty column: pin at the cheapest finite bound.
            let (l, u, c) = (lp.lower[j], lp.upper[j], lp.cost[j]);
            let (v, st) = if c > 0.0 {
                if l.is_finite() {
                    (l, BasisStatus::AtLower)
                } else {
                    return Presolved::Unbounded;
                }
            } else if c < 0.0 {
                if u.is_finite() {
                    (u, BasisStatus::AtUpper)
                } else {
                    return Presolved::Unbounded;
                }
            } else if l.is_finite() {
                (l, BasisStatus::AtLower)
            } else if u.is_finite() {
                (u, BasisStatus::AtUpper)
            } else {
                (0.0, BasisStatus::FreeZero)
            };
            fixed.push((j, v, st));
        }
    }
    let mut row_map = Vec::new();
    for (i, r) in lp.rows.iter().enumerate() {
        if r.coeffs.is_empty() {
            let ok = match r.rel {
                Rel::Le => 0.0 <= r.rhs + 1e-9,
                Rel::Ge => 0.0 >= r.rhs - 1e-9,
                Rel::Eq => r.rhs.abs() <= 1e-9,
            };
            if !ok {
                return Presolved::Infeasible;
            }
        } else {
            row_map.push(i);
        }
    }
    let nw = var_map.len();
    let mw = row_map.len();
    let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nw];
    let mut rhs = Vec::with_capacity(mw);
    let mut slack_lb = Vec::with_capacity(mw);
    let mut slack_ub = Vec::with_capacity(mw);
    for (wi, &oi) in row_map.iter().enumerate() {
        let r = &lp.rows[oi];
        rhs.push(r.rhs);
        let (sl, su) = match r.rel {
            Rel::Le => (0.0, f64::INFINITY),
            Rel::Ge => (f64::NEG_INFINITY, 0.0),
            Rel::Eq => (0.0, 0.0),
        };
        slack_lb.push(sl);
        slack_ub.push(su);
        for &(j, v) in &r.coeffs {
            cols[work_of_var[j]].push((wi as u32, v));
        }
    }
    let mut col_ptr = Vec::with_capacity(nw + 1);
    let mut col_rows = Vec::new();
    let mut col_vals = Vec::new();
    col_ptr.push(0);
    for c in &cols {
        for &(r, v) in c {
            col_rows.push(r);
            col_vals.push(v);
        }
        col_ptr.push(col_rows.len());
    }
    Presolved::Work(Work {
        col_ptr,
        col_rows,
        col_vals,
        cost: var_map.iter().map(|&j| lp.cost[j]).collect(),
        lower: var_map.iter().map(|&j| lp.lower[j]).collect(),
        upper: var_map.iter().map(|&j| lp.upper[j]).collect(),
        rhs,
        slack_lb,
        slack_ub,
        var_map,
        row_map,
        fixed,
    })
}

struct Engine<'a> {
    w: &'a Work,
    opts: &'a SolveOptions,
    nw: usize,
    mw: usize,
    /// Column states for structurals then slacks.
    state: Vec<ColState>,
    /// basis[r] = column occupying row r.
    basis: Vec<usize>,
    /// Current value of every column.
    x: Vec<f64>,
    etas: Vec<Eta>,
    since_refactor: u64,
    iterations: u64,
    degen_streak: u64,
    bland: bool,
    // scratch
    buf: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn total(&self) -> usize {
        self.nw + self.mw
    }

    fn col_lb(&self, c: usize) -> f64 {
        if c < self.nw {
            self.w.lower[c]
        } else {
            self.w.slack_lb[c - self.nw]
        }
    }

    fn col_ub(&self, c: usize) -> f64 {
        if c < self.nw {
            self.w.upper[c]
        } else {
            self.w.slack_ub[c - self.nw]
        }
    }

    fn col_cost(&self, c: usize) -> f64 {
        if c < self.nw {
            self.w.cost[c]
        } else {
            0.0
        }
    }

    /// Scatter column `c` into dense `v` (must be zeroed, length mw).
    fn scatter_col(&self, c: usize, v: &mut [f64]) {
        if c < self.nw {
            for k in self.w.col_ptr[c]..self.w.col_ptr[c + 1] {
                v[self.w.col_rows[k] as usize] = self.w.col_vals[k];
            }
        } else {
            v[c - self.nw] = 1.0;
        }
    }

    fn ftran(&self, v: &mut [f64]) {
        for e in &self.etas {
            let pr = e.pivot_row as usize;
            let t = v[pr] / e.pivot_val;
            if t != 0.0 {
                for &(r, w) in &e.entries {
                    v[r as usize] -= t * w;
                }
            }
            v[pr] = t;
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for e in self.etas.iter().rev() {
            let pr = e.pivot_row as usize;
            let mut t = v[pr];
            for &(r, w) in &e.entries {
                t -= w * v[r as usize];
            }
            v[pr] = t / e.pivot_val;
        }
    }

    /// Rebuild the eta file for the current basic set, reassigning basis
    /// positions so position == pivot row. Falls back to slack columns for
    /// rows no basic column can pivot on.
    fn reinvert(&mut self) -> Result<(), LpError> {
        let mw = self.mw;
        let mut cols: Vec<usize> = self.basis.clone();
        // Sparsest-first ordering reduces eta fill; ties by index keep it
        // deterministic.
        cols.sort_by_key(|&c| {
            let nnz = if c < self.nw {
                self.w.col_ptr[c + 1] - self.w.col_ptr[c]
            } else {
                1
            };
            (nnz, c)
        });
        self.etas.clear();
        let mut row_used = vec![false; mw];
        let mut new_basis = vec![usize::MAX; mw];
        let mut dropped: Vec<usize> = Vec::new();
        let mut v = vec![0.0; mw];
        for &c in &cols {
            for e in v.iter_mut() {
                *e = 0.0;
            }
            self.scatter_col(c, &mut v);
            self.ftran(&mut v);
            let mut best_r = usize::MAX;
            let mut best = 0.0;
            for (r, used) in row_used.iter().enumerate() {
                if !used && v[r].abs() > best {
                    best = v[r].abs();
                    best_r = r;
                }
            }
            if best < 1e-10 {
                dropped.push(c);
                continue;
            }
            self.push_eta(best_r, &v);
            row_used[best_r] = true;
            new_basis[best_r] = c;
        }
        for c in dropped {
            self.state[c] = self.offbasis_state(c);
            self.x[c] = self.offbasis_value(c);
        }
        for r in 0..mw {
            if row_used[r] {
                continue;
            }
            let s = self.nw + r;
            for e in v.iter_mut() {
                *e = 0.0;
            }
            self.scatter_col(s, &mut v);
            self.ftran(&mut v);
            if v[r].abs() < 1e-12 {
                return Err(LpError::Numerical {
                    iterations: self.iterations,
                    detail: "singular basis beyond repair".into(),
                });
            }
            self.push_eta(r, &v);
            row_used[r] = true;
            new_basis[r] = s;
            self.state[s] = ColState::Basic;
        }
        self.basis = new_basis;
        for &c in &self.basis {
            self.state[c] = ColState::Basic;
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn push_eta(&mut self, pivot_row: usize, v: &[f64]) {
        let scale = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let drop = 1e-13 * scale.max(1.0);
        let mut entries = Vec::new();
        for (r, &val) in v.iter().enumerate() {
            if r != pivot_row && val.abs() > drop {
                entries.push((r as u32, val));
            }
        }
        self.etas.push(Eta {
            pivot_row: pivot_row as u32,
            pivot_val: v[pivot_row],
            entries,
        });
    }

    fn offbasis_state(&self, c: usize) -> ColState {
        let (l, u) = (self.col_lb(c), self.col_ub(c));
        if l.is_finite() {
            ColState::AtLower
        } else if u.is_finite() {
            ColState::AtUpper
        } else {
            ColState::FreeZero
        }
    }

    fn offbasis_value(&self, c: usize) -> f64 {
        match self.offbasis_state(c) {
            ColState::AtLower => self.col_lb(c),
            ColState::AtUpper => self.col_ub(c),
            _ => 0.0,
        }
    }

    /// Recompute basic values from the nonbasic point.
    fn recompute_basics(&mut self) {
        let mut v = self.w.rhs.clone();
        for c in 0..self.total() {
            if self.state[c] == ColState::Basic {
                continue;
            }
            let xv = match self.state[c] {
                ColState::AtLower => self.col_lb(c),
                ColState::AtUpper => self.col_ub(c),
                _ => 0.0,
            };
            self.x[c] = xv;
            if xv != 0.0 {
                if c < self.nw {
                    for k in self.w.col_ptr[c]..self.w.col_ptr[c + 1] {
                        v[self.w.col_rows[k] as usize] -= self.w.col_vals[k] * xv;
                    }
                } else {
                    v[c - self.nw] -= xv;
                }
            }
        }
        self.ftran(&mut v);
        for r in 0..self.mw {
            self.x[self.basis[r]] = v[r];
        }
    }

    /// Total bound violation over basic columns.
    fn infeasibility(&self) -> f64 {
        let mut f = 0.0;
        for &c in &self.basis {
            let xv = self.x[c];
            let (l, u) = (self.col_lb(c), self.col_ub(c));
            if xv < l {
                f += l - xv;
            } else if xv > u {
                f += xv - u;
            }
        }
        f
    }

    /// Pricing vector for the current phase.
    fn dual_vector(&mut self, phase1: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.mw];
        for r in 0..self.mw {
            let c = self.basis[r];
            y[r] = if phase1 {
                let xv = self.x[c];
                if xv < self.col_lb(c) - self.opts.bound_tol {
                    -1.0
                } else if xv > self.col_ub(c) + self.opts.bound_tol {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.col_cost(c)
            };
        }
        self.btran(&mut y);
        y
    }

    fn reduced_cost(&self, c: usize, y: &[f64], phase1: bool) -> f64 {
        let base = if phase1 { 0.0 } else { self.col_cost(c) };
        if c < self.nw {
            let mut acc = base;
            for k in self.w.col_ptr[c]..self.w.col_ptr[c + 1] {
                acc -= y[self.w.col_rows[k] as usize] * self.w.col_vals[k];
            }
            acc
        } else {
            base - y[c - self.nw]
        }
    }

    /// Pick the entering column. Returns (column, direction).
    fn price(&self, y: &[f64], phase1: bool) -> Option<(usize, f64)> {
        let tol = self.opts.opt_tol;
        let mut best: Option<(usize, f64, f64)> = None; // col, dir, score
        for c in 0..self.total() {
            let st = self.state[c];
            if st == ColState::Basic {
                continue;
            }
            let (l, u) = (self.col_lb(c), self.col_ub(c));
            if l == u {
                continue; // fixed
            }
            let d = self.reduced_cost(c, y, phase1);
            let (dir, score) = match st {
                ColState::AtLower => {
                    if d < -tol {
                        (1.0, -d)
                    } else {
                        continue;
                    }
                }
                ColState::AtUpper => {
                    if d > tol {
                        (-1.0, d)
                    } else {
                        continue;
                    }
                }
                ColState::FreeZero => {
                    if d < -tol {
                        (1.0, -d)
                    } else if d > tol {
                        (-1.0, d)
                    } else {
                        continue;
                    }
                }
                ColState::Basic => unreachable!(),
            };
            if self.bland {
                return Some((c, dir)); // smallest index wins
            }
            match best {
                Some((_, _, s)) if s >= score => {}
                _ => best = Some((c, dir, score)),
            }
        }
        best.map(|(c, d, _)| (c, d))
    }

    /// Ratio test. Returns `None` for an unbounded direction, otherwise
    /// (step, Some((leaving row, hit_upper)) | None for a bound flip).
    #[allow(clippy::type_complexity)]
    fn ratio_test(
        &self,
        enter: usize,
        dir: f64,
        v: &[f64],
        phase1: bool,
    ) -> Option<(f64, Option<(usize, bool)>)> {
        let bound_tol = self.opts.bound_tol;
        let mut t_min = f64::INFINITY;
        let mut leave: Option<(usize, bool)> = None;
        let mut leave_piv = 0.0;
        for (r, &wr) in v.iter().enumerate().take(self.mw) {
            if wr.abs() <= 1e-11 {
                continue;
            }
            let delta = -dir * wr;
            let c = self.basis[r];
            let xv = self.x[c];
            let (l, u) = (self.col_lb(c), self.col_ub(c));
            let (t, hit_upper) = if phase1 && xv < l - bound_tol {
                // Infeasible below: blocks only on arrival at its lower bound.
                if delta > 0.0 {
                    ((l - xv) / delta, false)
                } else {
                    continue;
                }
            } else if phase1 && xv > u + bound_tol {
                if delta < 0.0 {
                    ((u - xv) / delta, true)
                } else {
                    continue;
                }
            } else if delta > 0.0 {
                if u.is_finite() {
                    (((u - xv) / delta).max(0.0), true)
                } else {
                    continue;
                }
            } else if l.is_finite() {
                (((l - xv) / delta).max(0.0), false)
            } else {
                continue;
            };
            let t = t.max(0.0);
            if t < t_min - 1e-10 {
                t_min = t;
                leave = Some((r, hit_upper));
                leave_piv = wr.abs();
            } else if t <= t_min + 1e-10 {
                // Tie: prefer the larger pivot for stability; under Bland,
                // the smallest leaving column index.
                let better = if self.bland {
                    leave.map(|(lr, _)| self.basis[r] < self.basis[lr]).unwrap_or(true)
                } else {
                    wr.abs() > leave_piv
                };
                if better {
                    t_min = t_min.min(t);
                    leave = Some((r, hit_upper));
                    leave_piv = wr.abs();
                }
            }
        }
        // Entering variable's own far bound.
        let (l, u) = (self.col_lb(enter), self.col_ub(enter));
        let span = u - l;
        let t_own = if span.is_finite() { span } else { f64::INFINITY };
        if t_own < t_min {
            return Some((t_own, None));
        }
        if leave.is_none() {
            return if t_own.is_finite() {
                Some((t_own, None))
            } else {
                None
            };
        }
        Some((t_min, leave))
    }

    fn apply_step(
        &mut self,
        enter: usize,
        dir: f64,
        t: f64,
        v: &[f64],
        leave: Option<(usize, bool)>,
    ) {
        if t > 0.0 {
            for (r, &wr) in v.iter().enumerate().take(self.mw) {
                if wr != 0.0 {
                    self.x[self.basis[r]] -= dir * t * wr;
                }
            }
            self.x[enter] += dir * t;
        }
        match leave {
            None => {
                // Bound flip.
                self.state[enter] = if dir > 0.0 {
                    ColState::AtUpper
                } else {
                    ColState::AtLower
                };
                self.x[enter] = if dir > 0.0 {
                    self.col_ub(enter)
                } else {
                    self.col_lb(enter)
                };
            }
            Some((r, hit_upper)) => {
                let out = self.basis[r];
                self.state[out] = if hit_upper {
                    ColState::AtUpper
                } else {
                    ColState::AtLower
                };
                self.x[out] = if hit_upper {
                    self.col_ub(out)
                } else {
                    self.col_lb(out)
                };
                self.basis[r] = enter;
                self.state[enter] = ColState::Basic;
                self.push_eta(r, v);
                self.since_refactor += 1;
            }
        }
    }
}

pub(super) fn solve(
    lp: &LinearProgram,
    warm: Option<&Basis>,
    opts: &SolveOptions,
) -> Result<LpSolution, LpError> {
    // Re-run builder validation on the fly: rows built by hand could carry
    // NaN if constructed outside LpBuilder.
    for (j, &c) in lp.cost.iter().enumerate() {
        if c.is_nan() || lp.lower[j].is_nan() || lp.upper[j].is_nan() {
            return Err(LpError::Malformed(format!(
                "non-finite data on var {:?}",
                lp.var_labels[j]
            )));
        }
    }
    let work = match presolve(lp) {
        Presolved::Work(w) => w,
        Presolved::Unbounded => return Ok(finish_degenerate(lp, LpStatus::Unbounded)),
        Presolved::Infeasible => return Ok(finish_degenerate(lp, LpStatus::Infeasible)),
    };
    let nw = work.var_map.len();
    let mw = work.row_map.len();
    let mut eng = Engine {
        w: &work,
        opts,
        nw,
        mw,
        state: vec![ColState::AtLower; nw + mw],
        basis: (0..mw).map(|r| nw + r).collect(),
        x: vec![0.0; nw + mw],
        etas: Vec::new(),
        since_refactor: 0,
        iterations: 0,
        degen_streak: 0,
        bland: false,
        buf: vec![0.0; mw],
    };
    // Initial states: slacks basic, structurals at their natural bound.
    let mut applied_warm = false;
    if let Some(b) = warm {
        if b.0.len() == lp.num_vars() + lp.num_rows() {
            let mut states = vec![ColState::AtLower; nw + mw];
            let mut basics: Vec<usize> = Vec::new();
            for (wj, &oj) in work.var_map.iter().enumerate() {
                states[wj] = map_status(b.0[oj], work.lower[wj], work.upper[wj]);
                if states[wj] == ColState::Basic {
                    basics.push(wj);
                }
            }
            for (wr, &or) in work.row_map.iter().enumerate() {
                let c = nw + wr;
                states[c] = map_status(
                    b.0[lp.num_vars() + or],
                    work.slack_lb[wr],
                    work.slack_ub[wr],
                );
                if states[c] == ColState::Basic {
                    basics.push(c);
                }
            }
            if basics.len() == mw {
                eng.state = states;
                eng.basis = basics;
                applied_warm = true;
            }
        }
    }
    if !applied_warm {
        for j in 0..nw {
            eng.state[j] = eng.offbasis_state(j);
        }
        for r in 0..mw {
            eng.state[nw + r] = ColState::Basic;
        }
    }
    eng.reinvert()?;
    eng.recompute_basics();

    let cap = if opts.max_iterations > 0 {
        opts.max_iterations
    } else {
        (30 * (nw + mw) as u64).clamp(20_000, 400_000)
    };

    let mut confirmations = 0u32;
    let mut stalls = 0u32;
    let status = loop {
        if eng.iterations >= cap {
            return Err(LpError::Numerical {
                iterations: eng.iterations,
                detail: "iteration cap exceeded".into(),
            });
        }
        if eng.since_refactor >= opts.refactor_every {
            eng.reinvert()?;
            eng.recompute_basics();
        }
        let inf = eng.infeasibility();
        let phase1 = inf > opts.bound_tol * (1.0 + eng.mw as f64).sqrt();
        let y = eng.dual_vector(phase1);
        let entering = eng.price(&y, phase1);
        let (enter, dir) = match entering {
            Some(e) => e,
            None => {
                // Confirm against fresh factors before declaring.
                if eng.since_refactor > 0 && confirmations < 8 {
                    confirmations += 1;
                    eng.reinvert()?;
                    eng.recompute_basics();
                    continue;
                }
                if phase1 {
                    if inf <= 1e-6 {
                        // Numerically feasible; fall through to phase 2 by
                        // snapping the tiny violations.
                        break snap_and_continue(&mut eng, opts, cap)?;
                    }
                    break LpStatus::Infeasible;
                }
                break LpStatus::Optimal;
            }
        };
        confirmations = 0;
        // Transform the entering column.
        for e in eng.buf.iter_mut() {
            *e = 0.0;
        }
        let mut v = std::mem::take(&mut eng.buf);
        eng.scatter_col(enter, &mut v);
        eng.ftran(&mut v);
        let step = eng.ratio_test(enter, dir, &v, phase1);
        match step {
            None => {
                eng.buf = v;
                if phase1 {
                    return Err(LpError::Numerical {
                        iterations: eng.iterations,
                        detail: "unbounded phase-1 descent".into(),
                    });
                }
                break LpStatus::Unbounded;
            }
            Some((t, leave)) => {
                if let Some((r, _)) = leave {
                    if v[r].abs() < opts.pivot_tol {
                        // Unstable pivot: rebuild factors and retry.
                        eng.buf = v;
                        stalls += 1;
                        if stalls > 6 {
                            return Err(LpError::Numerical {
                                iterations: eng.iterations,
                                detail: "persistent unstable pivots".into(),
                            });
                        }
                        eng.reinvert()?;
                        eng.recompute_basics();
                        continue;
                    }
                }
                stalls = 0;
                if t <= 1e-11 {
                    eng.degen_streak += 1;
                    if eng.degen_streak >= opts.bland_after {
                        eng.bland = true;
                    }
                } else {
                    eng.degen_streak = 0;
                    eng.bland = false;
                }
                eng.apply_step(enter, dir, t, &v, leave);
                eng.buf = v;
                eng.iterations += 1;
            }
        }
    };
    Ok(assemble(lp, &work, &mut eng, status))
}

/// Phase-1 stalled with violations below 1e-6: snap basics onto bounds and
/// keep going in phase 2. Returns the terminal status of the continued run.
fn snap_and_continue(
    eng: &mut Engine,
    opts: &SolveOptions,
    cap: u64,
) -> Result<LpStatus, LpError> {
    for r in 0..eng.mw {
        let c = eng.basis[r];
        let (l, u) = (eng.col_lb(c), eng.col_ub(c));
        eng.x[c] = eng.x[c].clamp(l.min(u), u.max(l));
    }
    loop {
        if eng.iterations >= cap {
            return Err(LpError::Numerical {
                iterations: eng.iterations,
                detail: "iteration cap exceeded".into(),
            });
        }
        if eng.since_refactor >= opts.refactor_every {
            eng.reinvert()?;
            eng.recompute_basics();
            for r in 0..eng.mw {
                let c = eng.basis[r];
                let (l, u) = (eng.col_lb(c), eng.col_ub(c));
                eng.x[c] = eng.x[c].clamp(l.min(u), u.max(l));
            }
        }
        let y = eng.dual_vector(false);
        match eng.price(&y, false) {
            None => return Ok(LpStatus::Optimal),
            Some((enter, dir)) => {
                let mut v = std::mem::take(&mut eng.buf);
                for e in v.iter_mut() {
                    *e = 0.0;
                }
                eng.scatter_col(enter, &mut v);
                eng.ftran(&mut v);
                match eng.ratio_test(enter, dir, &v, false) {
                    None => {
                        eng.buf = v;
                        return Ok(LpStatus::Unbounded);
                    }
                    Some((t, leave)) => {
                        eng.apply_step(enter, dir, t, &v, leave);
                        eng.buf = v;
                        eng.iterations += 1;
                    }
                }
            }
        }
    }
}

fn map_status(s: BasisStatus, l: f64, u: f64) -> ColState {
    match s {
        BasisStatus::Basic => ColState::Basic,
        BasisStatus::AtLower => {
            if l.is_finite() {
                ColState::AtLower
            } else if u.is_finite() {
                ColState::AtUpper
            } else {
                ColState::FreeZero
            }
        }
        BasisStatus::AtUpper => {
            if u.is_finite() {
                ColState::AtUpper
            } else if l.is_finite() {
                ColState::AtLower
            } else {
                ColState::FreeZero
            }
        }
        BasisStatus::FreeZero => ColState::FreeZero,
    }
}

fn finish_degenerate(lp: &LinearProgram, status: LpStatus) -> LpSolution {
    let n = lp.num_vars();
    let m = lp.num_rows();
    LpSolution {
        status,
        objective: match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        primal: vec![0.0; n],
        dual: vec![0.0; m],
        reduced_cost: lp.cost.clone(),
        iterations: 0,
        basis: Basis(vec![BasisStatus::AtLower; n + m]),
        infeasibility: if status == LpStatus::Infeasible { f64::INFINITY } else { 0.0 },
        dual_ray: None,
        var_labels: lp.var_labels.clone(),
        row_labels: lp.rows.iter().map(|r| r.label.clone()).collect(),
        row_rels: lp.rows.iter().map(|r| r.rel).collect(),
        var_index: lp
            .var_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect(),
        row_index: lp
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.label.clone(), i))
            .collect(),
    }
}

fn assemble(lp: &LinearProgram, work: &Work, eng: &mut Engine, status: LpStatus) -> LpSolution {
    let n = lp.num_vars();
    let m = lp.num_rows();
    let mut primal = vec![0.0; n];
    let mut reduced = vec![0.0; n];
    let mut dual = vec![0.0; m];
    let mut basis = vec![BasisStatus::AtLower; n + m];
    let mut infeasibility = 0.0;
    let mut dual_ray = None;

    for &(oj, v, st) in &work.fixed {
        primal[oj] = v;
        reduced[oj] = lp.cost[oj];
        basis[oj] = st;
    }
    for (wj, &oj) in work.var_map.iter().enumerate() {
        primal[oj] = eng.x[wj];
        basis[oj] = match eng.state[wj] {
            ColState::Basic => BasisStatus::Basic,
            ColState::AtLower => BasisStatus::AtLower,
            ColState::AtUpper => BasisStatus::AtUpper,
            ColState::FreeZero => BasisStatus::FreeZero,
        };
    }
    for (wr, &or) in work.row_map.iter().enumerate() {
        let c = eng.nw + wr;
        basis[n + or] = match eng.state[c] {
            ColState::Basic => BasisStatus::Basic,
            ColState::AtUpper => BasisStatus::AtUpper,
            _ => BasisStatus::AtLower,
        };
    }
    if status != LpStatus::Unbounded {
        // Final duals against the terminal factors.
        let phase1 = status == LpStatus::Infeasible;
        let y = eng.dual_vector(phase1);
        for (wj, &oj) in work.var_map.iter().enumerate() {
            reduced[oj] = if eng.state[wj] == ColState::Basic {
                0.0
            } else {
                eng.reduced_cost(wj, &y, false)
            };
        }
        let mut ray = vec![0.0; m];
        for (wr, &or) in work.row_map.iter().enumerate() {
            let yv = y[wr];
            let reported = match lp.rows[or].rel {
                Rel::Le => -yv,
                _ => yv,
            };
            if phase1 {
                ray[or] = reported;
            } else {
                dual[or] = reported;
            }
        }
        if phase1 {
            infeasibility = eng.infeasibility();
            dual_ray = Some(ray);
        }
    }
    // Rows dropped by presolve keep dual 0 and a basic slack.
    for (or, r) in lp.rows.iter().enumerate() {
        if r.coeffs.is_empty() {
            basis[n + or] = BasisStatus::Basic;
        }
    }
    let objective = match status {
        LpStatus::Optimal => {
            let mut obj = 0.0;
            for j in 0..n {
                obj += lp.cost[j] * primal[j];
            }
            obj
        }
        LpStatus::Unbounded => f64::NEG_INFINITY,
        LpStatus::Infeasible => f64::NAN,
    };
    LpSolution {
        status,
        objective,
        primal,
        dual,
        reduced_cost: reduced,
        iterations: eng.iterations,
        basis: Basis(basis),
        infeasibility,
        dual_ray,
        var_labels: lp.var_labels.clone(),
        row_labels: lp.rows.iter().map(|r| r.label.clone()).collect(),
        row_rels: lp.rows.iter().map(|r| r.rel).collect(),
        var_index: lp
            .var_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect(),
        row_index: lp
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.label.clone(), i))
            .collect(),
    }
}

