//! Evaluation of the robust choice function at arbitrary prospects.
//!
//! The value at `x` is `min{v_h, val_h(x)}` where `val_h(x)` is the
//! interpolation LP against the first `h` sorted prospects and `h` is the
//! first level with `val_h(x) > v_{h+1}` (the sentinel `v_{J+1} = −∞` makes
//! level `J` always qualify). The predicate is monotone in `h`, so a binary
//! search needs `⌈log₂(J+1)⌉` LPs.

use prefrobust_lp::LpProblem;
use serde::Serialize;

use crate::error::Result;
use crate::instance::ValidInstance;
use crate::kinked;
use crate::prospect::Prospect;
use crate::value::{Decomposition, GUARD};

/// Result of one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    /// Level whose interpolation LP determined the value.
    pub level: usize,
    /// Interpolation LPs solved.
    pub lp_calls: usize,
    /// Subgradient of the final interpolation LP.
    pub subgradient: Vec<f64>,
}

/// Value and subgradient of the interpolation LP at level `h`.
pub fn interpolation_value(x: &Prospect, d: &Decomposition, h: usize, inst: &ValidInstance) -> Result<(f64, Vec<f64>)> {
    d.check(inst, d.law_invariant)?;
    inst.check_prospect(x)?;
    interpolate(x, d, h, inst, d.law_invariant)
}

/// The interpolation LP at level `h` (for the law-invariant pipeline, the
/// reduced LP written out in full).
pub fn interpolation_problem(x: &Prospect, d: &Decomposition, h: usize, inst: &ValidInstance) -> Result<LpProblem> {
    d.check(inst, d.law_invariant)?;
    inst.check_prospect(x)?;
    let support = d.support(inst, h);
    Ok(if d.law_invariant {
        kinked::law_reduced_problem(x, &support, &[], inst.lipschitz()).0
    } else {
        kinked::base_problem(x, &support, &[], inst.lipschitz()).0
    })
}

fn interpolate(x: &Prospect, d: &Decomposition, h: usize, inst: &ValidInstance, law: bool) -> Result<(f64, Vec<f64>)> {
    let support = d.support(inst, h);
    let c = inst.lipschitz();
    let m = if law {
        kinked::solve_law(x, &support, &[], c)?.map(|m| (m.value, m.s))
    } else {
        kinked::solve_base(x, &support, &[], c)?.map(|m| (m.value, m.s))
    };
    // Without pins the LP is always feasible.
    Ok(m.expect("interpolation LP without pins is feasible"))
}

struct Levels<'a> {
    x: &'a Prospect,
    d: &'a Decomposition,
    inst: &'a ValidInstance,
    law: bool,
    lp_calls: usize,
}

impl Levels<'_> {
    fn solve(&mut self, h: usize) -> Result<(f64, Vec<f64>)> {
        self.lp_calls += 1;
        interpolate(self.x, self.d, h, self.inst, self.law)
    }

    /// Whether level `h` contains the value of `x`.
    fn qualifies(&self, h: usize, val: f64) -> bool {
        match self.d.value(h + 1) {
            None => true,
            Some(next) => val > next + GUARD,
        }
    }

    fn finish(&self, h: usize, val: f64, s: Vec<f64>) -> Evaluation {
        Evaluation {
            value: val.min(self.d.value(h).expect("level in range")),
            level: h,
            lp_calls: self.lp_calls,
            subgradient: s,
        }
    }

    fn binary(mut self) -> Result<Evaluation> {
        let mut hi = self.d.len() + 1;
        let mut lo = 0;
        let mut cached = None;
        while hi != lo + 1 {
            let h = (hi + lo).div_ceil(2);
            let (val, s) = self.solve(h)?;
            if self.qualifies(h, val) {
                hi = h;
                cached = Some((val, s));
            } else {
                lo = h;
            }
        }
        let (val, s) = cached.expect("the last level always qualifies");
        Ok(self.finish(hi, val, s))
    }

    fn linear(mut self) -> Result<Evaluation> {
        let mut h = 1;
        loop {
            let (val, s) = self.solve(h)?;
            if self.qualifies(h, val) {
                return Ok(self.finish(h, val, s));
            }
            h += 1;
        }
    }
}

fn levels<'a>(x: &'a Prospect, d: &'a Decomposition, inst: &'a ValidInstance, law: bool) -> Result<Levels<'a>> {
    d.check(inst, law)?;
    inst.check_prospect(x)?;
    Ok(Levels {
        x,
        d,
        inst,
        law,
        lp_calls: 0,
    })
}

/// Robust choice function at `x` by binary search over levels.
pub fn eval_rcf(x: &Prospect, d: &Decomposition, inst: &ValidInstance) -> Result<Evaluation> {
    levels(x, d, inst, false)?.binary()
}

/// Law-invariant robust choice function at `x` by binary search over levels.
pub fn eval_rcf_law(x: &Prospect, d: &Decomposition, inst: &ValidInstance) -> Result<Evaluation> {
    levels(x, d, inst, true)?.binary()
}

/// Same contract as [`eval_rcf`], scanning levels one at a time.
pub fn eval_rcf_levelsearch(x: &Prospect, d: &Decomposition, inst: &ValidInstance) -> Result<Evaluation> {
    levels(x, d, inst, false)?.linear()
}

/// Same contract as [`eval_rcf_law`], scanning levels one at a time.
pub fn eval_rcf_law_levelsearch(x: &Prospect, d: &Decomposition, inst: &ValidInstance) -> Result<Evaluation> {
    levels(x, d, inst, true)?.linear()
}

/// Dispatches on the decomposition's law-invariance tag.
pub fn evaluate(x: &Prospect, d: &Decomposition, inst: &ValidInstance) -> Result<Evaluation> {
    levels(x, d, inst, d.law_invariant)?.binary()
}

/// Upper bound on LP solves for one binary-search evaluation over `j`
/// sorted prospects.
pub fn binary_search_budget(j: usize) -> usize {
    (usize::BITS - j.leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{EcdsPair, Instance};
    use crate::value::{sort_value_problem, sort_value_problem_law};

    fn fixture_a() -> ValidInstance {
        let s = Prospect::scalar;
        Instance::new(
            s(5.0),
            vec![EcdsPair {
                preferred: s(3.0),
                dominated: s(1.0),
            }],
            1.0,
            false,
        )
        .validate()
        .unwrap()
    }

    #[test]
    fn budget_is_ceil_log2() {
        let expect = |j: usize| (j as f64 + 1.0).log2().ceil() as usize;
        for j in 1..200 {
            assert_eq!(binary_search_budget(j), expect(j), "j = {j}");
        }
    }

    #[test]
    fn fixture_a_values() {
        let inst = fixture_a();
        let d = sort_value_problem(&inst).unwrap();
        for (x, want) in [(4.0, -1.0), (5.0, 0.0), (0.0, -5.0), (6.0, 0.0), (3.0, -2.0), (1.0, -4.0)] {
            let x = Prospect::scalar(x);
            let a = eval_rcf(&x, &d, &inst).unwrap();
            let b = eval_rcf_levelsearch(&x, &d, &inst).unwrap();
            assert!((a.value - want).abs() < 1e-9, "{x:?}: {}", a.value);
            assert!((b.value - want).abs() < 1e-9);
            assert!(a.lp_calls <= binary_search_budget(3));
        }
        assert!(eval_rcf(&Prospect::column(&[1.0, 2.0]).unwrap(), &d, &inst).is_err());
        assert!(eval_rcf_law(&Prospect::scalar(1.0), &d, &inst).is_err());
    }

    #[test]
    fn fixture_b_law_values() {
        let col = |a: f64, b: f64| Prospect::column(&[a, b]).unwrap();
        let inst = Instance::new(
            col(5.0, 5.0),
            vec![EcdsPair {
                preferred: col(3.0, 4.0),
                dominated: col(1.0, 3.0),
            }],
            1.0,
            true,
        )
        .validate()
        .unwrap();
        let d = sort_value_problem_law(&inst).unwrap();
        for (x, want) in [(col(4.0, 3.0), -2.0), (col(3.0, 4.0), -2.0), (col(5.0, 5.0), 0.0)] {
            let a = eval_rcf_law(&x, &d, &inst).unwrap();
            let b = eval_rcf_law_levelsearch(&x, &d, &inst).unwrap();
            assert!((a.value - want).abs() < 1e-9, "{x:?}: {}", a.value);
            assert!((b.value - want).abs() < 1e-9);
        }
    }
}
