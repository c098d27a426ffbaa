//! Row generation: solve over a subset of rows, then add the rows the
//! relaxed optimum violates until none remain.

use crate::{simplex, LpError, LpProblem, LpResult, LpStatus, FEAS_TOL};

/// Solves `p` starting from the rows listed in `initial` and adding violated
/// rows in rounds. The relaxation is exact once its optimum satisfies every
/// row, so the result matches [`crate::solve_lp`] on the full problem.
///
/// If a relaxation is unbounded the full problem is solved directly.
pub fn solve_lp_lazy(p: &LpProblem, initial: &[usize]) -> Result<LpResult, LpError> {
    p.check()?;
    let m = p.num_constraints();
    let mut active = vec![false; m];
    for &i in initial {
        if i >= m {
            return Err(LpError::Malformed(format!(
                "initial row {i} out of range for {m} rows"
            )));
        }
        active[i] = true;
    }
    let batch = 2 * p.num_vars() + 10;
    let mut iterations = 0;
    loop {
        let mut sub = LpProblem {
            sense: p.sense,
            objective: p.objective.clone(),
            lower: p.lower.clone(),
            upper: p.upper.clone(),
            constraints: Vec::new(),
            names: Vec::new(),
        };
        sub.constraints = p
            .constraints
            .iter()
            .zip(&active)
            .filter(|(_, &a)| a)
            .map(|(r, _)| r.clone())
            .collect();
        let mut res = simplex::solve(&sub)?;
        iterations += res.iterations;
        res.iterations = iterations;
        match res.status {
            LpStatus::Infeasible => return Ok(res),
            LpStatus::Unbounded => {
                let mut full = simplex::solve(p)?;
                full.iterations += iterations;
                return Ok(full);
            }
            LpStatus::Optimal => {}
        }
        let mut violated: Vec<(usize, f64)> = p
            .constraints
            .iter()
            .enumerate()
            .filter(|&(i, _)| !active[i])
            .map(|(i, r)| (i, r.violation(&res.x) / r.scale()))
            .filter(|&(_, v)| v > FEAS_TOL)
            .collect();
        if violated.is_empty() {
            return Ok(res);
        }
        violated.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for &(i, _) in violated.iter().take(batch) {
            active[i] = true;
        }
    }
}
