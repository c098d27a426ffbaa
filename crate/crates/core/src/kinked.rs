//! Kinked-majorant LPs shared by the value, interpolation and evaluation
//! problems.
//!
//! For an anchor `x` and support points `(θ′, v′)` the LP is
//! `min v` s.t. `v + ⟨s, θ′ − x⟩ ≥ v′`, `s ≥ 0`, `Σs ≤ C`, plus optional
//! pins `v = p`. The law-invariant variant requires the support rows for
//! every scenario permutation of `θ′`; it is solved by cutting planes whose
//! separation step is an assignment problem, and the assignment potentials
//! give the auxiliary variables of the reduced LP as a certificate.

use std::collections::HashSet;

use prefrobust_lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, Var};

use crate::assignment::{min_cost_assignment, Assignment};
use crate::error::{Error, Result};
use crate::prospect::Prospect;

/// A sorted prospect together with its value.
pub(crate) type Support<'a> = (&'a Prospect, f64);

const CUT_TOL: f64 = 1e-10;
const MAX_ROUNDS: usize = 5000;

#[derive(Clone, Debug)]
pub(crate) struct Majorant {
    pub value: f64,
    pub s: Vec<f64>,
}

/// Auxiliary variables of the reduced law-invariant LP for one support
/// point: `y` is indexed by the support prospect's scenarios, `w` by the
/// anchor's scenarios.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AssignmentDual {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct LawMajorant {
    pub value: f64,
    pub s: Vec<f64>,
    pub duals: Vec<AssignmentDual>,
}

fn subgradient_vars(p: &mut LpProblem, x: &Prospect, c: f64) -> Vec<Var> {
    let n = x.attributes();
    let s: Vec<Var> = (0..x.len())
        .map(|k| p.add_named_var(0.0, 0.0, f64::INFINITY, format!("s_{}_{}", k / n, k % n)))
        .collect();
    let terms: Vec<(Var, f64)> = s.iter().map(|&sk| (sk, 1.0)).collect();
    p.add_constraint(&terms, Relation::Le, c);
    s
}

fn support_row(v: Var, s: &[Var], x: &[f64], theta: &[f64]) -> Vec<(Var, f64)> {
    let mut terms = vec![(v, 1.0)];
    for (k, (&a, &b)) in theta.iter().zip(x).enumerate() {
        if a != b {
            terms.push((s[k], a - b));
        }
    }
    terms
}

/// The kinked-majorant LP with one support row per support point.
pub(crate) fn base_problem(
    x: &Prospect,
    support: &[Support],
    pins: &[f64],
    c: f64,
) -> (LpProblem, Var, Vec<Var>) {
    let mut p = LpProblem::new(Sense::Minimize);
    let v = p.add_named_var(1.0, f64::NEG_INFINITY, f64::INFINITY, "v");
    let s = subgradient_vars(&mut p, x, c);
    for &(theta, val) in support {
        p.add_constraint(&support_row(v, &s, x.as_slice(), theta.as_slice()), Relation::Ge, val);
    }
    for &pin in pins {
        p.add_constraint(&[(v, 1.0)], Relation::Eq, pin);
    }
    (p, v, s)
}

fn unbounded() -> Error {
    Error::Solver("kinked-majorant LP reported unbounded; the support must be nonempty".into())
}

/// Solves the base LP. `None` means the pins made it infeasible.
pub(crate) fn solve_base(
    x: &Prospect,
    support: &[Support],
    pins: &[f64],
    c: f64,
) -> Result<Option<Majorant>> {
    let (p, v, s) = base_problem(x, support, pins, c);
    let r = solve_lp(&p)?;
    match r.status {
        LpStatus::Optimal => Ok(Some(Majorant {
            value: r.value(v),
            s: s.iter().map(|&k| r.value(k)).collect(),
        })),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(unbounded()),
    }
}

/// Cheapest scenario matching of `theta` against the weights `s`:
/// cost of sending source row `a` of `theta` to row `b` is
/// `Σ_n s[b,n]·theta[a,n]`.
fn best_permutation(theta: &Prospect, s: &[f64]) -> Assignment {
    let t = theta.scenarios();
    let n = theta.attributes();
    let mut cost = vec![0.0; t * t];
    for b in 0..t {
        let sb = &s[b * n..(b + 1) * n];
        for a in 0..t {
            cost[b * t + a] = theta.row(a).iter().zip(sb).map(|(x, y)| x * y).sum();
        }
    }
    min_cost_assignment(&cost, t)
}

/// Solves the law-invariant LP by cutting planes over scenario permutations.
/// `None` means the pins made it infeasible.
pub(crate) fn solve_law(
    x: &Prospect,
    support: &[Support],
    pins: &[f64],
    c: f64,
) -> Result<Option<LawMajorant>> {
    let t = x.scenarios();
    let n = x.attributes();
    let (mut p, v, s) = base_problem(x, support, pins, c);
    let identity: Vec<usize> = (0..t).collect();
    let mut cuts: Vec<HashSet<Vec<usize>>> = support
        .iter()
        .map(|_| HashSet::from([identity.clone()]))
        .collect();
    for _ in 0..MAX_ROUNDS {
        let r = solve_lp(&p)?;
        match r.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(None),
            LpStatus::Unbounded => return Err(unbounded()),
        }
        let vv = r.value(v);
        let sv: Vec<f64> = s.iter().map(|&k| r.value(k)).collect();
        let sx = x.dot(&sv);
        let mut added = false;
        let mut assignments = Vec::with_capacity(support.len());
        for (k, &(theta, val)) in support.iter().enumerate() {
            let a = best_permutation(theta, &sv);
            let slack = vv - sx + a.total - val;
            let scale = 1.0f64.max(val.abs()).max(vv.abs());
            if slack < -CUT_TOL * scale && cuts[k].insert(a.col.clone()) {
                let mut row = vec![0.0; t * n];
                for (b, &src) in a.col.iter().enumerate() {
                    row[b * n..(b + 1) * n].copy_from_slice(theta.row(src));
                }
                p.add_constraint(&support_row(v, &s, x.as_slice(), &row), Relation::Ge, val);
                added = true;
            }
            assignments.push(a);
        }
        if !added {
            let duals = assignments
                .into_iter()
                .map(|a| AssignmentDual {
                    y: a.col_pot,
                    w: a.row_pot,
                })
                .collect();
            return Ok(Some(LawMajorant {
                value: vv,
                s: sv,
                duals,
            }));
        }
    }
    Err(Error::Solver(format!(
        "permutation cutting planes did not converge in {MAX_ROUNDS} rounds"
    )))
}

/// The reduced law-invariant LP written out in full: per support point,
/// free vectors `y` and `w` with `Σ_n θ′[a,n]·s[b,n] − y_a − w_b ≥ 0` for all
/// scenario pairs `(a, b)`.
pub(crate) fn law_reduced_problem(
    x: &Prospect,
    support: &[Support],
    pins: &[f64],
    c: f64,
) -> (LpProblem, Var, Vec<Var>) {
    let t = x.scenarios();
    let n = x.attributes();
    let mut p = LpProblem::new(Sense::Minimize);
    let v = p.add_named_var(1.0, f64::NEG_INFINITY, f64::INFINITY, "v");
    let s = subgradient_vars(&mut p, x, c);
    for (k, &(theta, val)) in support.iter().enumerate() {
        let inf = f64::INFINITY;
        let y: Vec<Var> = (0..t)
            .map(|a| p.add_named_var(0.0, -inf, inf, format!("y_{k}_{a}")))
            .collect();
        let w: Vec<Var> = (0..t)
            .map(|b| p.add_named_var(0.0, -inf, inf, format!("w_{k}_{b}")))
            .collect();
        let mut terms = vec![(v, 1.0)];
        terms.extend(s.iter().zip(x.as_slice()).filter(|(_, &xv)| xv != 0.0).map(|(&sk, &xv)| (sk, -xv)));
        terms.extend(y.iter().chain(&w).map(|&z| (z, 1.0)));
        p.add_constraint(&terms, Relation::Ge, val);
        for a in 0..t {
            for b in 0..t {
                let mut terms: Vec<(Var, f64)> = (0..n)
                    .filter(|&m| theta.get(a, m) != 0.0)
                    .map(|m| (s[b * n + m], theta.get(a, m)))
                    .collect();
                terms.push((y[a], -1.0));
                terms.push((w[b], -1.0));
                p.add_constraint(&terms, Relation::Ge, 0.0);
            }
        }
    }
    for &pin in pins {
        p.add_constraint(&[(v, 1.0)], Relation::Eq, pin);
    }
    (p, v, s)
}

/// Direct solve of [`law_reduced_problem`].
pub(crate) fn solve_law_reduced(
    x: &Prospect,
    support: &[Support],
    pins: &[f64],
    c: f64,
) -> Result<Option<Majorant>> {
    let (p, v, s) = law_reduced_problem(x, support, pins, c);
    let r = solve_lp(&p)?;
    match r.status {
        LpStatus::Optimal => Ok(Some(Majorant {
            value: r.value(v),
            s: s.iter().map(|&k| r.value(k)).collect(),
        })),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(unbounded()),
    }
}
