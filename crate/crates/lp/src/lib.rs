//! A minimal linear-programming layer.
//!
//! Problems are built with [`LpProblem`] and solved with [`solve_lp`], a dense
//! two-phase primal simplex over bounded variables. [`solve_lp_lazy`] solves
//! the same problems by row generation, which pays off when most rows are
//! slack at the optimum.
//!
//! The solver is deterministic: identical problems produce bit-identical
//! results.

mod format;
mod lazy;
mod simplex;

pub use format::write_lp_format;
pub use lazy::solve_lp_lazy;

/// Primal feasibility tolerance applied to constraint rows and bounds.
pub const FEAS_TOL: f64 = 1e-9;

/// Optimization direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

/// Relation between a row's left-hand side and its right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Handle to a variable of an [`LpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse coefficients as (variable index, value) pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Left-hand side evaluated at `x`.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }

    fn scale(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(self.rhs.abs(), |m, &(_, a)| m.max(a.abs()))
            .max(1.0)
    }
}

/// A linear program: optimize `objective · x` subject to linear rows and
/// per-variable bounds (which may be infinite).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Optional variable names, used only by [`write_lp_format`].
    pub names: Vec<String>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem {
            sense,
            ..Default::default()
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Adds a variable with objective coefficient `obj` and bounds `lo ≤ x ≤ hi`.
    pub fn add_var(&mut self, obj: f64, lo: f64, hi: f64) -> Var {
        self.add_named_var(obj, lo, hi, format!("x{}", self.objective.len()))
    }

    pub fn add_named_var(&mut self, obj: f64, lo: f64, hi: f64, name: impl Into<String>) -> Var {
        self.objective.push(obj);
        self.lower.push(lo);
        self.upper.push(hi);
        self.names.push(name.into());
        Var(self.objective.len() - 1)
    }

    /// Adds a nonnegative variable.
    pub fn add_nonneg(&mut self, obj: f64) -> Var {
        self.add_var(obj, 0.0, f64::INFINITY)
    }

    /// Adds a free variable.
    pub fn add_free(&mut self, obj: f64) -> Var {
        self.add_var(obj, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_constraint(&mut self, terms: &[(Var, f64)], relation: Relation, rhs: f64) {
        let coeffs = terms.iter().map(|&(v, a)| (v.0, a)).collect();
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn add_row(&mut self, row: Constraint) {
        self.constraints.push(row);
    }

    /// Checks structural well-formedness.
    pub fn check(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed(format!(
                "bound vectors have lengths {} and {} but there are {n} variables",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(LpError::Malformed(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(LpError::Malformed(format!(
                "objective coefficient {j} is not finite"
            )));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has a non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::Malformed(format!(
                        "row {i} references variable {j} but there are {n} variables"
                    )));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!(
                        "row {i} has a non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest row violation and bound violation of `x`, each measured
    /// relative to the magnitude of the row.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|r| r.violation(x) / r.scale())
            .fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. `objective` and `x` are meaningful only when the
/// status is [`LpStatus::Optimal`].
#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Simplex pivots performed, including bound flips.
    pub iterations: usize,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, v: Var) -> f64 {
        self.x[v.0]
    }

    fn without_solution(status: LpStatus, iterations: usize) -> Self {
        LpResult {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            iterations,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Solves `p` with the dense bounded simplex.
pub fn solve_lp(p: &LpProblem) -> Result<LpResult, LpError> {
    p.check()?;
    simplex::solve(p)
}
