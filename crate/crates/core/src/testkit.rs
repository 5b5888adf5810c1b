//! Brute-force oracles and random instance generators.
//!
//! Everything here is deliberately naive: the oracles enumerate instead of
//! pivoting, so they share no code path with the solvers they check. They are
//! compiled only for tests and benches (`testkit` feature).

use crate::lp::{LinearProgram, LpBuilder, Rel};
use crate::util::dense_solve;

/// Result of a brute-force LP enumeration.
#[derive(Clone, Debug)]
pub enum OracleOutcome {
    Optimal { objective: f64, point: Vec<f64> },
    Infeasible,
}

/// Enumerate all basic solutions of an LP whose variables satisfy
/// `lower == 0`, `upper == +inf` (the form the random generator produces)
/// and return the best feasible one.
///
/// Panics when given an LP outside that form: the oracle is for test
/// instances, not general programs.
pub fn enumerate_lp_optimum(lp: &LinearProgram) -> OracleOutcome {
    let n = lp.num_vars();
    let m = lp.num_rows();
    for j in 0..n {
        assert_eq!(lp.lower[j], 0.0, "oracle requires zero lower bounds");
        assert!(
            lp.upper[j].is_infinite(),
            "oracle requires free upper bounds"
        );
    }
    if m == 0 {
        // Feasible at the origin; any negative cost would be unbounded,
        // which the generator never produces without a bounding row.
        return OracleOutcome::Optimal {
            objective: 0.0,
            point: vec![0.0; n],
        };
    }
    // Columns: n structurals then m slacks (+1 each, bounds by relation).
    let total = n + m;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut choose = vec![0usize; m];
    // Dense columns for speed.
    let mut dense_cols = vec![vec![0.0; m]; total];
    for (i, r) in lp.rows.iter().enumerate() {
        for &(j, v) in &r.coeffs {
            dense_cols[j][i] = v;
        }
        dense_cols[n + i][i] = 1.0;
    }
    let rhs: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();
    let rels: Vec<Rel> = lp.rows.iter().map(|r| r.rel).collect();
    let mut feasible_any = false;
    combinations(total, m, &mut choose, 0, 0, &mut |subset: &[usize]| {
        // B columns in row-major for dense_solve: a[r][k] = col[k][r]
        let mut a = vec![vec![0.0; m]; m];
        for (k, &c) in subset.iter().enumerate() {
            for r in 0..m {
                a[r][k] = dense_cols[c][r];
            }
        }
        let xb = match dense_solve(&a, &rhs) {
            Some(x) => x,
            None => return,
        };
        // Bound check.
        let tol = 1e-7;
        for (k, &c) in subset.iter().enumerate() {
            let v = xb[k];
            if c < n {
                if v < -tol {
                    return;
                }
            } else {
                match rels[c - n] {
                    Rel::Le => {
                        if v < -tol {
                            return;
                        }
                    }
                    Rel::Ge => {
                        if v > tol {
                            return;
                        }
                    }
                    Rel::Eq => {
                        if v.abs() > tol {
                            return;
                        }
                    }
                }
            }
        }
        feasible_any = true;
        let mut obj = 0.0;
        let mut point = vec![0.0; n];
        for (k, &c) in subset.iter().enumerate() {
            if c < n {
                obj += lp.cost[c] * xb[k];
                point[c] = xb[k];
            }
        }
        match &best {
            Some((b, _)) if *b <= obj + 1e-12 => {}
            _ => best = Some((obj, point)),
        }
    });
    match best {
        Some((objective, point)) => OracleOutcome::Optimal { objective, point },
        None => {
            debug_assert!(!feasible_any);
            OracleOutcome::Infeasible
        }
    }
}

fn combinations(
    total: usize,
    k: usize,
    buf: &mut Vec<usize>,
    start: usize,
    depth: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(buf);
        return;
    }
    for c in start..=(total - (k - depth)) {
        buf[depth] = c;
        combinations(total, k, buf, c + 1, depth + 1, f);
    }
}

/// Substitute fixed values for a subset of variables, producing a smaller LP
/// over the remaining ones (used by the MILP enumeration oracle).
pub fn pin_and_reduce(lp: &LinearProgram, pins: &[(usize, f64)]) -> (LinearProgram, f64) {
    let pinned: std::collections::HashMap<usize, f64> = pins.iter().copied().collect();
    let mut b = LpBuilder::minimize();
    let mut newidx = vec![usize::MAX; lp.num_vars()];
    let mut const_cost = 0.0;
    for j in 0..lp.num_vars() {
        if let Some(&v) = pinned.get(&j) {
            const_cost += lp.cost[j] * v;
        } else {
            newidx[j] = b.var(lp.var_labels[j].clone(), lp.lower[j], lp.upper[j], lp.cost[j]);
        }
    }
    for r in &lp.rows {
        let mut rhs = r.rhs;
        let mut coeffs = Vec::new();
        for &(j, v) in &r.coeffs {
            if let Some(&pv) = pinned.get(&j) {
                rhs -= v * pv;
            } else {
                coeffs.push((newidx[j], v));
            }
        }
        b.row(r.label.clone(), r.rel, rhs, &coeffs);
    }
    (b.build().expect("reduced LP is well-formed"), const_cost)
}

/// Random feasible, bounded LP with integer data in [-9, 9], variables
/// `x >= 0`, and a bounding row so the optimum is finite.
pub fn random_lp(rng: &mut impl rand::Rng, n: usize, m: usize) -> LinearProgram {
    let mut b = LpBuilder::minimize();
    let mut idx = Vec::new();
    for j in 0..n {
        let c = rng.gen_range(-9..=9) as f64;
        idx.push(b.var(format!("x{j}"), 0.0, f64::INFINITY, c));
    }
    // A feasible integer point keeps every constructed row satisfiable.
    let x0: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
    for i in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|j| {
                let v = rng.gen_range(-9..=9);
                (v != 0).then_some((idx[j], v as f64))
            })
            .collect();
        let at_x0: i64 = coeffs
            .iter()
            .map(|&(j, v)| v as i64 * x0[j])
            .sum();
        let (rel, rhs) = match rng.gen_range(0..3) {
            0 => (Rel::Le, at_x0 + rng.gen_range(0..=9)),
            1 => (Rel::Ge, at_x0 - rng.gen_range(0..=9)),
            _ => (Rel::Eq, at_x0),
        };
        b.row(format!("r{i}"), rel, rhs as f64, &coeffs);
    }
    let all: Vec<(usize, f64)> = idx.iter().map(|&j| (j, 1.0)).collect();
    b.row("bounding", Rel::Le, (10 * n as i64 + 9) as f64, &all);
    b.build().expect("random LP is well-formed")
}
