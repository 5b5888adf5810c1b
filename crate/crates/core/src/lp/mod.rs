//! Linear programming kernel.
//!
//! Bounded-variable revised simplex with a product-form inverse. Returns the
//! primal point, one dual value per row and one reduced cost per variable;
//! every price published by the market layers above is one of these duals.
//!
//! Dual sign convention (fixed here, used by all pricing formulas):
//! * equality row: dual = ∂objective/∂rhs (free sign),
//! * `>=` row: dual = ∂objective/∂rhs, non-negative at optimum,
//! * `<=` row: dual = −∂objective/∂rhs, non-negative at optimum.
//!
//! So the dual of a binding `<=` row in a minimization is `>= 0`, and the
//! multiplier enters the Lagrangian as `dual * (lhs − rhs)` for `<=` rows and
//! `dual * (rhs − lhs)` for `>=`/`=` rows.

mod simplex;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use simplex::SolveOptions;

/// Row relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
        }
    }
}

/// One constraint row: `sum(coeffs) REL rhs`.
#[derive(Clone, Debug)]
pub struct Row {
    pub label: String,
    pub rel: Rel,
    pub rhs: f64,
    /// Sparse coefficients as (variable index, value).
    pub coeffs: Vec<(usize, f64)>,
}

/// Immutable minimization LP. Built through [`LpBuilder`], which enforces the
/// invariants (finite-or-infinite data, unique labels), and safe to share
/// across threads once built.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub var_labels: Vec<String>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
    var_index: HashMap<String, usize>,
    row_index: HashMap<String, usize>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var(&self, label: &str) -> Option<usize> {
        self.var_index.get(label).copied()
    }

    pub fn row(&self, label: &str) -> Option<usize> {
        self.row_index.get(label).copied()
    }

    /// Plain-text dump for offline diffing: one row per line with label,
    /// relation, rhs and the sparse coefficients by variable label.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# lp minimize vars={} rows={}",
            self.num_vars(),
            self.num_rows()
        );
        for (j, lbl) in self.var_labels.iter().enumerate() {
            let _ = writeln!(
                out,
                "var {} cost {} lb {} ub {}",
                lbl, self.cost[j], self.lower[j], self.upper[j]
            );
        }
        for r in &self.rows {
            let _ = write!(out, "row {} {} {} |", r.label, r.rel.symbol(), r.rhs);
            for &(j, v) in &r.coeffs {
                let _ = write!(out, " {} {}", self.var_labels[j], v);
            }
            let _ = writeln!(out);
        }
        out
    }
}

/// Errors from building or solving an LP.
#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("numerical failure after {iterations} iterations: {detail}")]
    Numerical { iterations: u64, detail: String },
}

/// Builder with validation.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    var_labels: Vec<String>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
    var_index: HashMap<String, usize>,
    row_labels: HashMap<String, usize>,
}

impl LpBuilder {
    pub fn minimize() -> Self {
        Self::default()
    }

    /// Add a variable; returns its index.
    pub fn var(&mut self, label: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        let label = label.into();
        let idx = self.var_labels.len();
        self.var_index.insert(label.clone(), idx);
        self.var_labels.push(label);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.push(cost);
        idx
    }

    pub fn var_count(&self) -> usize {
        self.var_labels.len()
    }

    pub fn var_id(&self, label: &str) -> Option<usize> {
        self.var_index.get(label).copied()
    }

    /// Add a row; duplicate coefficient entries on one variable are summed.
    pub fn row(
        &mut self,
        label: impl Into<String>,
        rel: Rel,
        rhs: f64,
        coeffs: &[(usize, f64)],
    ) -> usize {
        let label = label.into();
        let idx = self.rows.len();
        self.row_labels.insert(label.clone(), idx);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs.to_vec();
        sorted.sort_by_key(|&(j, _)| j);
        for (j, v) in sorted {
            if v == 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => merged.push((j, v)),
            }
        }
        self.rows.push(Row {
            label,
            rel,
            rhs,
            coeffs: merged,
        });
        idx
    }

    pub fn build(self) -> Result<LinearProgram, LpError> {
        if self.var_index.len() != self.var_labels.len() {
            let mut seen = HashMap::new();
            for l in &self.var_labels {
                if seen.insert(l.clone(), ()).is_some() {
                    return Err(LpError::Malformed(format!("duplicate variable label {l:?}")));
                }
            }
        }
        if self.row_labels.len() != self.rows.len() {
            let mut seen = HashMap::new();
            for r in &self.rows {
                if seen.insert(r.label.clone(), ()).is_some() {
                    return Err(LpError::Malformed(format!(
                        "duplicate row label {:?}",
                        r.label
                    )));
                }
            }
        }
        for (j, lbl) in self.var_labels.iter().enumerate() {
            let (l, u, c) = (self.lower[j], self.upper[j], self.cost[j]);
            if l.is_nan() || u.is_nan() || c.is_nan() || c.is_infinite() {
                return Err(LpError::Malformed(format!("non-finite data on var {lbl:?}")));
            }
            if l > u {
                return Err(LpError::Malformed(format!(
                    "crossed bounds on var {lbl:?}: [{l}, {u}]"
                )));
            }
        }
        for r in &self.rows {
            if r.rhs.is_nan() || r.rhs.is_infinite() {
                return Err(LpError::Malformed(format!(
                    "non-finite rhs on row {:?}",
                    r.label
                )));
            }
            for &(j, v) in &r.coeffs {
                if !v.is_finite() {
                    return Err(LpError::Malformed(format!(
                        "non-finite coefficient on row {:?}",
                        r.label
                    )));
                }
                if j >= self.var_labels.len() {
                    return Err(LpError::Malformed(format!(
                        "row {:?} references unknown variable index {j}",
                        r.label
                    )));
                }
            }
        }
        let row_index = self.row_labels;
        Ok(LinearProgram {
            var_labels: self.var_labels,
            cost: self.cost,
            lower: self.lower,
            upper: self.upper,
            rows: self.rows,
            var_index: self.var_index,
            row_index,
        })
    }
}

/// Solve status of a well-posed LP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Basis membership of one column (structural variables first, then one
/// slack per row).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable pinned at zero.
    FreeZero,
}

/// A full basis snapshot: `n + m` statuses (variables then slacks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis(pub Vec<BasisStatus>);

impl Basis {
    /// Extend a basis from a previous solve when `extra_rows` new rows were
    /// appended to the LP: the new slacks start basic.
    pub fn extend_for_rows(&self, extra_rows: usize) -> Basis {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat(BasisStatus::Basic).take(extra_rows));
        Basis(v)
    }
}

/// Primal/dual solution of one solve.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Value per structural variable.
    pub primal: Vec<f64>,
    /// Dual per row, in the reported sign convention (see module docs).
    pub dual: Vec<f64>,
    /// Reduced cost per structural variable.
    pub reduced_cost: Vec<f64>,
    pub iterations: u64,
    pub basis: Basis,
    /// Terminal phase-1 infeasibility (sum of bound violations); > 0 only
    /// when `status == Infeasible`.
    pub infeasibility: f64,
    /// Phase-1 duals at termination when infeasible, for diagnostics.
    pub dual_ray: Option<Vec<f64>>,
    var_labels: Vec<String>,
    row_labels: Vec<String>,
    row_rels: Vec<Rel>,
    var_index: HashMap<String, usize>,
    row_index: HashMap<String, usize>,
}

impl LpSolution {
    /// Dual value of the row with this label (reported sign convention).
    pub fn dual_by_label(&self, label: &str) -> Result<f64, LpError> {
        self.row_index
            .get(label)
            .map(|&i| self.dual[i])
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))
    }

    pub fn primal_by_label(&self, label: &str) -> Result<f64, LpError> {
        self.var_index
            .get(label)
            .map(|&j| self.primal[j])
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))
    }

    pub fn reduced_cost_by_label(&self, label: &str) -> Result<f64, LpError> {
        self.var_index
            .get(label)
            .map(|&j| self.reduced_cost[j])
            .ok_or_else(|| LpError::UnknownLabel(label.to_string()))
    }

    /// ∂objective/∂rhs for the given row (undoes the reporting sign flip on
    /// `<=` rows).
    pub fn objective_sensitivity(&self, row: usize) -> f64 {
        match self.row_rels[row] {
            Rel::Le => -self.dual[row],
            _ => self.dual[row],
        }
    }

    pub fn var_labels(&self) -> &[String] {
        &self.var_labels
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }
}

/// Free-function form of [`LpSolution::dual_by_label`].
pub fn dual_by_label(sol: &LpSolution, label: &str) -> Result<f64, LpError> {
    sol.dual_by_label(label)
}

/// Solve from a cold start.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    simplex::solve(lp, None, &SolveOptions::default())
}

/// Solve starting from a basis of a structurally compatible LP (same
/// variables; at least as many rows). Falls back to a cold start when the
/// basis does not fit.
pub fn solve_lp_warm(lp: &LinearProgram, basis: Option<&Basis>) -> Result<LpSolution, LpError> {
    simplex::solve(lp, basis, &SolveOptions::default())
}

/// Solve with explicit options.
pub fn solve_lp_opts(
    lp: &LinearProgram,
    basis: Option<&Basis>,
    opts: &SolveOptions,
) -> Result<LpSolution, LpError> {
    simplex::solve(lp, basis, opts)
}

#[cfg(test)]
mod tests;
