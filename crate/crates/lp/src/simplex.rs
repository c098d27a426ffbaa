//! Dense two-phase primal simplex over bounded variables.
//!
//! Every row `a·x (rel) b` gets a slack `s` with `a·x + s = b`, bounded
//! according to the relation. Rows whose initial residual cannot be absorbed
//! by the slack receive an artificial column, and phase one minimizes their
//! sum. Nonbasic variables rest at a finite bound, or at zero when free.
//! The ratio test is the two-pass Harris variant, and long runs of degenerate
//! pivots switch pricing from Dantzig's rule to Bland's rule.

use crate::{LpError, LpProblem, LpResult, LpStatus, Relation, Sense, FEAS_TOL};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const DEGENERATE_RUN: usize = 40;
const MAX_CLEANUP_ROUNDS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable resting at zero.
    Zero,
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// `B⁻¹ M`, row-major.
    t: Vec<f64>,
    /// Sparse copy of `M`, the scaled and sign-adjusted constraint matrix.
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    /// Sign applied to each row so the initial basis is the identity.
    row_sign: Vec<f64>,
    /// First slack column; slack of row `i` is column `slack0 + i`.
    slack0: usize,
    basis: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    limit: usize,
}

pub(crate) fn solve(p: &LpProblem) -> Result<LpResult, LpError> {
    let n = p.num_vars();
    let flip = if p.sense() == Sense::Maximize { -1.0 } else { 1.0 };

    // Dense, row-scaled copy of the structural part. Empty rows are checked
    // directly and dropped.
    let mut dense_rows: Vec<(Vec<f64>, f64, Relation)> = Vec::with_capacity(p.num_constraints());
    for row in &p.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            let ok = match row.relation {
                Relation::Le => 0.0 <= row.rhs + FEAS_TOL,
                Relation::Ge => 0.0 >= row.rhs - FEAS_TOL,
                Relation::Eq => row.rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(LpResult::without_solution(LpStatus::Infeasible, 0));
            }
            continue;
        }
        for v in &mut a {
            *v /= scale;
        }
        dense_rows.push((a, row.rhs / scale, row.relation));
    }

    let m = dense_rows.len();
    let slack0 = n;
    let mut lo = p.lower.clone();
    let mut hi = p.upper.clone();
    let mut x = vec![0.0; n + m];
    let mut state = vec![State::Lower; n + m];
    for j in 0..n {
        if lo[j].is_finite() {
            x[j] = lo[j];
            state[j] = State::Lower;
        } else if hi[j].is_finite() {
            x[j] = hi[j];
            state[j] = State::Upper;
        } else {
            x[j] = 0.0;
            state[j] = State::Zero;
        }
    }
    for (_, _, rel) in &dense_rows {
        let (l, h) = match rel {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        };
        lo.push(l);
        hi.push(h);
    }

    // Decide which rows need an artificial column.
    let mut art_rows = Vec::new();
    let mut row_sign = vec![1.0; m];
    let mut basic_value = vec![0.0; m];
    for (i, (a, b, _)) in dense_rows.iter().enumerate() {
        let r = b - a.iter().zip(&x[..n]).map(|(a, x)| a * x).sum::<f64>();
        let s = slack0 + i;
        if r >= lo[s] - FEAS_TOL && r <= hi[s] + FEAS_TOL {
            x[s] = r;
            state[s] = State::Basic;
        } else {
            let (bound, st) = if r < lo[s] {
                (lo[s], State::Lower)
            } else {
                (hi[s], State::Upper)
            };
            x[s] = bound;
            state[s] = st;
            let e = r - bound;
            row_sign[i] = e.signum();
            basic_value[i] = e.abs();
            art_rows.push(i);
        }
    }
    let nart = art_rows.len();
    let ncols = n + m + nart;
    lo.extend(std::iter::repeat(0.0).take(nart));
    hi.extend(std::iter::repeat(f64::INFINITY).take(nart));
    x.extend(std::iter::repeat(0.0).take(nart));
    state.extend(std::iter::repeat(State::Basic).take(nart));

    let mut t = vec![0.0; m * ncols];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![0; m];
    let mut art_of_row = vec![usize::MAX; m];
    for (k, &i) in art_rows.iter().enumerate() {
        art_of_row[i] = n + m + k;
    }
    for (i, (a, b, _)) in dense_rows.iter().enumerate() {
        let sgn = row_sign[i];
        let tr = &mut t[i * ncols..(i + 1) * ncols];
        let mut sparse = Vec::new();
        for (j, &v) in a.iter().enumerate() {
            if v != 0.0 {
                tr[j] = sgn * v;
                sparse.push((j, sgn * v));
            }
        }
        tr[slack0 + i] = sgn;
        sparse.push((slack0 + i, sgn));
        if art_of_row[i] != usize::MAX {
            let c = art_of_row[i];
            tr[c] = 1.0;
            sparse.push((c, 1.0));
            basis[i] = c;
            x[c] = basic_value[i];
        } else {
            basis[i] = slack0 + i;
        }
        rows.push(sparse);
        rhs.push(sgn * b);
    }

    let mut tab = Tableau {
        m,
        ncols,
        t,
        rows,
        rhs,
        row_sign,
        slack0,
        basis,
        state,
        x,
        lo,
        hi,
        cost: vec![0.0; ncols],
        d: vec![0.0; ncols],
        iterations: 0,
        limit: 50_000usize.max(50 * (m + ncols)),
    };

    if nart > 0 {
        let mut c1 = vec![0.0; ncols];
        for c in &mut c1[n + m..] {
            *c = 1.0;
        }
        tab.set_cost(c1);
        match tab.run()? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(LpError::Numerical("phase one reported unbounded".into()));
            }
        }
        let infeas: f64 = tab.x[n + m..].iter().sum();
        let bmax = tab.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        if infeas > FEAS_TOL * bmax {
            return Ok(LpResult::without_solution(LpStatus::Infeasible, tab.iterations));
        }
        for c in n + m..ncols {
            tab.hi[c] = 0.0;
            if tab.state[c] != State::Basic {
                tab.state[c] = State::Lower;
            }
            tab.x[c] = 0.0;
        }
    }

    let mut c2 = vec![0.0; ncols];
    for (c, &o) in c2.iter_mut().zip(&p.objective) {
        *c = flip * o;
    }
    tab.set_cost(c2);
    match tab.run()? {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return Ok(LpResult::without_solution(LpStatus::Unbounded, tab.iterations));
        }
    }

    let xs: Vec<f64> = tab.x[..n].to_vec();
    let objective = p.objective.iter().zip(&xs).map(|(c, x)| c * x).sum();
    let viol = p.max_violation(&xs);
    if viol > 1e-7 {
        return Err(LpError::Numerical(format!(
            "optimal point violates the problem by {viol:e}"
        )));
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        objective,
        x: xs,
        iterations: tab.iterations,
    })
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.ncols..(i + 1) * self.ncols]
    }

    fn set_cost(&mut self, cost: Vec<f64>) {
        self.cost = cost;
        self.refresh_reduced_costs();
    }

    fn refresh_reduced_costs(&mut self) {
        let mut d = self.cost.clone();
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, tij) in d.iter_mut().zip(self.row(i)) {
                    *dj -= cb * tij;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    /// Recomputes basic values from the nonbasic ones, removing drift
    /// accumulated over many tableau updates.
    fn refresh_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                if self.state[j] != State::Basic {
                    r[i] -= a * self.x[j];
                }
            }
        }
        // Column slack0 + i of the tableau holds sign_i · B⁻¹ e_i.
        for k in 0..self.m {
            let tr = self.row(k);
            let mut v = 0.0;
            for i in 0..self.m {
                v += self.row_sign[i] * tr[self.slack0 + i] * r[i];
            }
            let b = self.basis[k];
            self.x[b] = v;
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols {
            let st = self.state[j];
            if st == State::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let (score, dir) = match st {
                State::Lower if dj < -OPT_TOL => (-dj, 1.0),
                State::Upper if dj > OPT_TOL => (dj, -1.0),
                State::Zero if dj.abs() > OPT_TOL => (dj.abs(), -dj.signum()),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        let mut cleanup = 0;
        loop {
            match self.iterate()? {
                Outcome::Unbounded => return Ok(Outcome::Unbounded),
                Outcome::Optimal => {
                    self.refresh_basic_values();
                    self.refresh_reduced_costs();
                    cleanup += 1;
                    if cleanup >= MAX_CLEANUP_ROUNDS || self.choose_entering(false).is_none() {
                        return Ok(Outcome::Optimal);
                    }
                }
            }
        }
    }

    fn iterate(&mut self) -> Result<Outcome, LpError> {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit(self.limit));
            }
            let bland = degenerate > DEGENERATE_RUN;
            let Some((q, dir)) = self.choose_entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            self.iterations += 1;

            // Harris ratio test, pass one: relaxed step bound.
            let mut relaxed = f64::INFINITY;
            for i in 0..self.m {
                let alpha = self.t[i * self.ncols + q];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basis[i];
                let rate = -dir * alpha;
                let r = if rate < 0.0 {
                    if self.lo[b].is_finite() {
                        (self.x[b] - self.lo[b] + FEAS_TOL) / -rate
                    } else {
                        continue;
                    }
                } else if self.hi[b].is_finite() {
                    (self.hi[b] - self.x[b] + FEAS_TOL) / rate
                } else {
                    continue;
                };
                relaxed = relaxed.min(r);
            }
            // Pass two: among rows within the relaxed bound, the largest pivot.
            let mut leave: Option<(usize, f64)> = None;
            let mut best_alpha = 0.0;
            if relaxed.is_finite() {
                for i in 0..self.m {
                    let alpha = self.t[i * self.ncols + q];
                    if alpha.abs() <= PIVOT_TOL {
                        continue;
                    }
                    let b = self.basis[i];
                    let rate = -dir * alpha;
                    let r = if rate < 0.0 {
                        if self.lo[b].is_finite() {
                            (self.x[b] - self.lo[b]) / -rate
                        } else {
                            continue;
                        }
                    } else if self.hi[b].is_finite() {
                        (self.hi[b] - self.x[b]) / rate
                    } else {
                        continue;
                    };
                    if r <= relaxed && alpha.abs() > best_alpha {
                        best_alpha = alpha.abs();
                        leave = Some((i, r.max(0.0)));
                    }
                }
            }

            let span = self.hi[q] - self.lo[q];
            let step = match leave {
                Some((_, r)) => r,
                None => f64::INFINITY,
            };
            if span.is_finite() && span <= step {
                // Bound flip, no basis change.
                for i in 0..self.m {
                    let alpha = self.t[i * self.ncols + q];
                    if alpha != 0.0 {
                        let b = self.basis[i];
                        self.x[b] -= dir * alpha * span;
                    }
                }
                if dir > 0.0 {
                    self.x[q] = self.hi[q];
                    self.state[q] = State::Upper;
                } else {
                    self.x[q] = self.lo[q];
                    self.state[q] = State::Lower;
                }
                degenerate = 0;
                continue;
            }
            let Some((r, step)) = leave else {
                return Ok(Outcome::Unbounded);
            };

            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }

            for i in 0..self.m {
                let alpha = self.t[i * self.ncols + q];
                if alpha != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= dir * alpha * step;
                }
            }
            self.x[q] += dir * step;
            let leaving = self.basis[r];
            let rate = -dir * self.t[r * self.ncols + q];
            if rate < 0.0 {
                self.x[leaving] = self.lo[leaving];
                self.state[leaving] = State::Lower;
            } else {
                self.x[leaving] = self.hi[leaving];
                self.state[leaving] = State::Upper;
            }
            self.basis[r] = q;
            self.state[q] = State::Basic;
            self.pivot(r, q);
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            let inv = 1.0 / piv;
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        for other in before.chunks_exact_mut(nc).chain(after.chunks_exact_mut(nc)) {
            let f = other[q];
            if f.abs() > DROP_TOL {
                for (o, p) in other.iter_mut().zip(prow.iter()) {
                    *o -= f * p;
                }
            }
            other[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for (o, p) in self.d.iter_mut().zip(prow.iter()) {
                *o -= f * p;
            }
        }
        self.d[q] = 0.0;
    }
}
