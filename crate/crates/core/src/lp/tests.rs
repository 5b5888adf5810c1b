use super::*;
use crate::testkit::{enumerate_lp_optimum, random_lp, OracleOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lp2(c: (f64, f64)) -> LinearProgram {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, c.0);
    let y = b.var("y", 0.0, f64::INFINITY, c.1);
    b.row("cap", Rel::Le, 1.0, &[(x, 1.0), (y, 1.0)]);
    b.build().unwrap()
}

#[test]
fn textbook_vertex() {
    // minimize -2x - y s.t. x + y <= 1, x,y >= 0.
    let lp = lp2((-2.0, -1.0));
    let s = solve_lp(&lp).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective + 2.0).abs() < 1e-9);
    assert!((s.primal_by_label("x").unwrap() - 1.0).abs() < 1e-9);
    assert!(s.primal_by_label("y").unwrap().abs() < 1e-9);
    assert!((s.dual_by_label("cap").unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn identity_ge_row() {
    // minimize x s.t. x >= 3.
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 1.0);
    b.row("floor", Rel::Ge, 3.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective - 3.0).abs() < 1e-9);
    assert!((s.dual_by_label("floor").unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn equality_balance_dual_is_marginal_cost() {
    // minimize 10 g s.t. g = 150, 0 <= g <= 300.
    let mut b = LpBuilder::minimize();
    let g = b.var("g", 0.0, 300.0, 10.0);
    b.row("balance", Rel::Eq, 150.0, &[(g, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert!((s.objective - 1500.0).abs() < 1e-9);
    assert!((s.dual_by_label("balance").unwrap() - 10.0).abs() < 1e-9);
}

#[test]
fn nonbinding_row_has_zero_dual() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 1.0);
    b.row("floor", Rel::Ge, 3.0, &[(x, 1.0)]);
    b.row("roomy", Rel::Le, 100.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.dual_by_label("roomy").unwrap(), 0.0);
    assert!(s.dual_by_label("nope").is_err());
}

#[test]
fn infeasible_certified_with_ray() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 1.0);
    b.row("hi", Rel::Ge, 3.0, &[(x, 1.0)]);
    b.row("lo", Rel::Le, 2.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    assert!(s.infeasibility > 1e-6);
    assert!(s.dual_ray.is_some());
}

#[test]
fn unbounded_detected() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, -1.0);
    b.row("floor", Rel::Ge, 1.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::Unbounded);
}

#[test]
fn free_variable_equality() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", f64::NEG_INFINITY, f64::INFINITY, 3.0);
    b.row("pin", Rel::Eq, -7.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert!((s.primal[0] + 7.0).abs() < 1e-9);
    assert!((s.objective + 21.0).abs() < 1e-9);
    assert!((s.dual_by_label("pin").unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn upper_bound_flip() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, 5.0, -1.0);
    let y = b.var("y", 0.0, f64::INFINITY, 0.0);
    b.row("cap", Rel::Le, 10.0, &[(x, 1.0), (y, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert!((s.primal[0] - 5.0).abs() < 1e-9);
    // At the upper bound the reduced cost stays -1 and the row is slack.
    assert!((s.reduced_cost[0] + 1.0).abs() < 1e-9);
    assert_eq!(s.dual_by_label("cap").unwrap(), 0.0);
}

#[test]
fn malformed_inputs_rejected() {
    let mut b = LpBuilder::minimize();
    b.var("x", 0.0, f64::INFINITY, f64::NAN);
    assert!(matches!(b.build(), Err(LpError::Malformed(_))));

    let mut b = LpBuilder::minimize();
    b.var("x", 0.0, f64::INFINITY, 1.0);
    b.var("x", 0.0, f64::INFINITY, 1.0);
    assert!(matches!(b.build(), Err(LpError::Malformed(_))));

    let mut b = LpBuilder::minimize();
    b.var("x", 2.0, 1.0, 0.0);
    assert!(matches!(b.build(), Err(LpError::Malformed(_))));
}

fn check_solution_quality(lp: &LinearProgram, s: &LpSolution) {
    // Primal feasibility within 1e-7 per row, bounds within 1e-9.
    for (i, r) in lp.rows.iter().enumerate() {
        let lhs: f64 = r.coeffs.iter().map(|&(j, v)| v * s.primal[j]).sum();
        let resid = match r.rel {
            Rel::Le => (lhs - r.rhs).max(0.0),
            Rel::Ge => (r.rhs - lhs).max(0.0),
            Rel::Eq => (lhs - r.rhs).abs(),
        };
        let scale = 1.0 + r.rhs.abs();
        assert!(resid <= 1e-7 * scale, "row {i} residual {resid}");
        // Complementary slackness: dual * slack small.
        let slack = match r.rel {
            Rel::Le => r.rhs - lhs,
            Rel::Ge => lhs - r.rhs,
            Rel::Eq => 0.0,
        };
        assert!(
            (s.dual[i] * slack).abs() <= 1e-6 * scale.max(s.dual[i].abs()),
            "row {i} compl slackness {} * {}",
            s.dual[i],
            slack
        );
    }
    for j in 0..lp.num_vars() {
        assert!(s.primal[j] >= lp.lower[j] - 1e-9);
        assert!(s.primal[j] <= lp.upper[j] + 1e-9);
        // Reduced cost * distance to active bound.
        let rc = s.reduced_cost[j];
        let dist_lo = (s.primal[j] - lp.lower[j]).abs();
        let dist_hi = (lp.upper[j] - s.primal[j]).abs();
        let dist = dist_lo.min(dist_hi);
        if dist.is_finite() {
            assert!(
                (rc * dist).abs() <= 1e-6 * (1.0 + rc.abs()) * (1.0 + dist),
                "var {j} rc*dist {rc} {dist}"
            );
        }
    }
    // Strong duality via the basis identity: c'x == y'b + sum_nb d_j x_j.
    let mut dual_obj = 0.0;
    for (i, r) in lp.rows.iter().enumerate() {
        dual_obj += s.objective_sensitivity(i) * r.rhs;
    }
    for j in 0..lp.num_vars() {
        dual_obj += s.reduced_cost[j] * s.primal[j];
    }
    assert!(
        (s.objective - dual_obj).abs() <= 1e-6 * (1.0 + s.objective.abs()),
        "duality gap {} vs {}",
        s.objective,
        dual_obj
    );
}

#[test]
fn random_lps_match_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut solved = 0;
    let mut tries = 0;
    while solved < 20 && tries < 200 {
        tries += 1;
        let n = 2 + (tries % 7);
        let m = 1 + (tries % 5);
        let lp = random_lp(&mut rng, n, m);
        let s = solve_lp(&lp).unwrap();
        match enumerate_lp_optimum(&lp) {
            OracleOutcome::Optimal { objective, .. } => {
                assert_eq!(s.status, LpStatus::Optimal, "lp #{tries}");
                assert!(
                    (s.objective - objective).abs() <= 1e-6 * (1.0 + objective.abs()),
                    "lp #{tries}: got {} oracle {}",
                    s.objective,
                    objective
                );
                check_solution_quality(&lp, &s);
                solved += 1;
            }
            OracleOutcome::Infeasible => {
                assert_eq!(s.status, LpStatus::Infeasible, "lp #{tries}");
            }
        }
    }
    assert!(solved >= 20);
}

#[test]
fn resolve_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let lp = random_lp(&mut rng, 6, 4);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            assert_eq!(a.objective, b.objective);
            assert_eq!(a.basis, b.basis);
            assert_eq!(a.primal, b.primal);
        }
    }
}

#[test]
fn cost_scaling_scales_duals_not_primal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let lp = random_lp(&mut rng, 5, 4);
        let base = solve_lp(&lp).unwrap();
        if base.status != LpStatus::Optimal {
            continue;
        }
        for k in [2.0, 10.0, 0.5] {
            let mut b = LpBuilder::minimize();
            for j in 0..lp.num_vars() {
                b.var(
                    lp.var_labels[j].clone(),
                    lp.lower[j],
                    lp.upper[j],
                    lp.cost[j] * k,
                );
            }
            for r in &lp.rows {
                b.row(r.label.clone(), r.rel, r.rhs, &r.coeffs);
            }
            let scaled = solve_lp(&b.build().unwrap()).unwrap();
            assert_eq!(scaled.status, LpStatus::Optimal);
            assert!((scaled.objective - k * base.objective).abs() <= 1e-8 * (1.0 + base.objective.abs() * k.abs()));
            for j in 0..lp.num_vars() {
                assert!((scaled.primal[j] - base.primal[j]).abs() < 1e-8);
            }
            for i in 0..lp.num_rows() {
                assert!(
                    (scaled.dual[i] - k * base.dual[i]).abs() <= 1e-7 * (1.0 + base.dual[i].abs() * k),
                    "dual {i}"
                );
            }
        }
    }
}

#[test]
fn warm_start_after_rhs_change() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 2.0);
    let y = b.var("y", 0.0, f64::INFINITY, 3.0);
    b.row("demand", Rel::Ge, 10.0, &[(x, 1.0), (y, 1.0)]);
    b.row("xcap", Rel::Le, 6.0, &[(x, 1.0)]);
    let lp = b.build().unwrap();
    let cold = solve_lp(&lp).unwrap();
    assert!((cold.objective - (2.0 * 6.0 + 3.0 * 4.0)).abs() < 1e-9);

    let mut b2 = LpBuilder::minimize();
    let x = b2.var("x", 0.0, f64::INFINITY, 2.0);
    let y = b2.var("y", 0.0, f64::INFINITY, 3.0);
    b2.row("demand", Rel::Ge, 12.0, &[(x, 1.0), (y, 1.0)]);
    b2.row("xcap", Rel::Le, 6.0, &[(x, 1.0)]);
    let lp2 = b2.build().unwrap();
    let warm = solve_lp_warm(&lp2, Some(&cold.basis)).unwrap();
    let cold2 = solve_lp(&lp2).unwrap();
    assert_eq!(warm.status, LpStatus::Optimal);
    assert!((warm.objective - cold2.objective).abs() < 1e-9);
}

#[test]
fn basis_extension_for_added_rows() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 1.0);
    b.row("floor", Rel::Ge, 3.0, &[(x, 1.0)]);
    let lp = b.build().unwrap();
    let s = solve_lp(&lp).unwrap();

    let mut b2 = LpBuilder::minimize();
    let x = b2.var("x", 0.0, f64::INFINITY, 1.0);
    b2.row("floor", Rel::Ge, 3.0, &[(x, 1.0)]);
    b2.row("floor2", Rel::Ge, 5.0, &[(x, 1.0)]);
    let lp2 = b2.build().unwrap();
    let warm = solve_lp_warm(&lp2, Some(&s.basis.extend_for_rows(1))).unwrap();
    assert!((warm.objective - 5.0).abs() < 1e-9);
}

#[test]
fn debug_dump_format() {
    let lp = lp2((-2.0, -1.0));
    let dump = lp.debug_dump();
    assert!(dump.contains("row cap <= 1 | x 1 y 1"));
    assert!(dump.contains("var x cost -2 lb 0 ub inf"));
}

#[test]
fn empty_row_and_column_presolve() {
    let mut b = LpBuilder::minimize();
    let x = b.var("x", 0.0, f64::INFINITY, 1.0);
    b.var("lonely", 0.0, 4.0, -2.0); // no rows: pinned at upper
    b.row("nothing", Rel::Le, 5.0, &[]);
    b.row("floor", Rel::Ge, 1.0, &[(x, 1.0)]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.primal_by_label("lonely").unwrap() - 4.0).abs() < 1e-12);
    assert!((s.objective - (1.0 - 8.0)).abs() < 1e-9);
    assert_eq!(s.dual_by_label("nothing").unwrap(), 0.0);

    // Contradictory empty row.
    let mut b = LpBuilder::minimize();
    b.var("x", 0.0, f64::INFINITY, 1.0);
    b.row("broken", Rel::Ge, 2.0, &[]);
    let s = solve_lp(&b.build().unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
}
