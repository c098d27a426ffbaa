//! Text dump in the CPLEX LP file format.

use std::fmt::Write;

use crate::{LpProblem, Relation, Sense};

fn term(out: &mut String, first: &mut bool, coef: f64, name: &str) {
    if coef == 0.0 {
        return;
    }
    if *first {
        if coef < 0.0 {
            out.push_str("- ");
        }
        *first = false;
    } else if coef < 0.0 {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let _ = write!(out, "{} {}", coef.abs(), name);
}

fn name(p: &LpProblem, j: usize) -> String {
    p.names
        .get(j)
        .cloned()
        .unwrap_or_else(|| format!("x{j}"))
}

/// Renders `p` in LP format, readable by most solvers.
pub fn write_lp_format(p: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str(match p.sense() {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj: ");
    let mut first = true;
    for (j, &c) in p.objective.iter().enumerate() {
        term(&mut out, &mut first, c, &name(p, j));
    }
    if first {
        out.push('0');
    }
    out.push_str("\nSubject To\n");
    for (i, row) in p.constraints.iter().enumerate() {
        let _ = write!(out, " c{i}: ");
        let mut first = true;
        for &(j, a) in &row.coeffs {
            term(&mut out, &mut first, a, &name(p, j));
        }
        if first {
            out.push('0');
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..p.num_vars() {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        let nm = name(p, j);
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {nm} free");
            }
            (true, false) => {
                if lo != 0.0 {
                    let _ = writeln!(out, " {nm} >= {lo}");
                }
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {nm} <= {hi}");
            }
            (true, true) => {
                let _ = writeln!(out, " {lo} <= {nm} <= {hi}");
            }
        }
    }
    out.push_str("End\n");
    out
}
