//! Preference robust optimization: maximize the robust choice function of an
//! affine reward over a polyhedral decision set.
//!
//! The level-`j` problem maximizes `v ≤ v_j` subject to `G(z)` lying in the
//! acceptance set generated by the first `j` sorted prospects. Level `j` is
//! feasible when that maximum exceeds `v_{j+1}`; feasibility is monotone in
//! `j`, and the first feasible level carries the optimum.

use std::path::Path;

use prefrobust_lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, Var};
use serde::{Deserialize, Serialize};

use crate::accept::{kappa, law_dual_system};
use crate::error::{Error, Result};
use crate::instance::{Instance, ValidInstance};
use crate::prospect::{tilde, Prospect};
use crate::value::{solve_value_problem, Decomposition, GUARD};

/// Affine reward `G_{t,n}(z) = ⟨g[t][n], z⟩ + h[t][n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineReward {
    pub g: Vec<Vec<Vec<f64>>>,
    pub h: Vec<Vec<f64>>,
}

/// Polyhedral decision set `{z : A z ≤ b, Aeq z = beq, lo ≤ z ≤ hi}` with an
/// affine reward. `null` bounds are infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionModel {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(rename = "Aeq", default, skip_serializing_if = "Vec::is_empty")]
    pub aeq: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beq: Vec<f64>,
    #[serde(rename = "G")]
    pub reward: AffineReward,
    #[serde(default)]
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

/// A model whose decision set has been checked to be nonempty and bounded.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidModel {
    model: DecisionModel,
    t: usize,
    n: usize,
    m: usize,
}

fn model_err(msg: impl Into<String>) -> Error {
    Error::Model(msg.into())
}

impl DecisionModel {
    /// Portfolio model: `z` in the simplex, single-attribute reward
    /// `Σ_m R[t][m]·z_m` for a `T×M` return table.
    pub fn portfolio(returns: &[Vec<f64>]) -> Result<Self> {
        let m = returns.first().map_or(0, Vec::len);
        if m == 0 || returns.iter().any(|r| r.len() != m) {
            return Err(model_err("return table must be a nonempty T×M matrix"));
        }
        Ok(DecisionModel {
            a: Vec::new(),
            b: Vec::new(),
            aeq: vec![vec![1.0; m]],
            beq: vec![1.0],
            reward: AffineReward {
                g: returns.iter().map(|r| vec![r.clone()]).collect(),
                h: vec![vec![0.0]; returns.len()],
            },
            bounds: vec![(Some(0.0), None); m],
        })
    }

    pub fn num_vars(&self) -> usize {
        self.reward
            .g
            .first()
            .and_then(|r| r.first())
            .map_or(0, Vec::len)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("decision model JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn check_dims(&self) -> Result<(usize, usize, usize)> {
        let g = &self.reward.g;
        let t = g.len();
        let n = g.first().map_or(0, Vec::len);
        let m = self.num_vars();
        if t == 0 || n == 0 || m == 0 {
            return Err(model_err("reward needs at least one scenario, attribute and decision variable"));
        }
        if g.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != m)) {
            return Err(model_err(format!("reward coefficients must be {t}×{n}×{m}")));
        }
        let h = &self.reward.h;
        if h.len() != t || h.iter().any(|r| r.len() != n) {
            return Err(model_err(format!("reward offsets must be {t}×{n}")));
        }
        if self.a.len() != self.b.len() || self.a.iter().any(|r| r.len() != m) {
            return Err(model_err(format!("A must be {}×{m} to match b", self.b.len())));
        }
        if self.aeq.len() != self.beq.len() || self.aeq.iter().any(|r| r.len() != m) {
            return Err(model_err(format!("Aeq must be {}×{m} to match beq", self.beq.len())));
        }
        if !self.bounds.is_empty() && self.bounds.len() != m {
            return Err(model_err(format!("bounds must list {m} pairs")));
        }
        let finite = g.iter().flatten().flatten()
            .chain(h.iter().flatten())
            .chain(self.a.iter().flatten().chain(&self.b))
            .chain(self.aeq.iter().flatten().chain(&self.beq))
            .all(|x| x.is_finite());
        if !finite {
            return Err(model_err("model data must be finite"));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            let lo = lo.unwrap_or(f64::NEG_INFINITY);
            let hi = hi.unwrap_or(f64::INFINITY);
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(model_err(format!("variable {i} has empty bounds [{lo}, {hi}]")));
            }
        }
        Ok((t, n, m))
    }

    /// Checks dimensions, then solves two LPs per coordinate to confirm the
    /// decision set is nonempty and bounded.
    pub fn validate(&self) -> Result<ValidModel> {
        let (t, n, m) = self.check_dims()?;
        let valid = ValidModel {
            model: self.clone(),
            t,
            n,
            m,
        };
        for i in 0..m {
            for sense in [Sense::Minimize, Sense::Maximize] {
                let mut lp = LpProblem::new(sense);
                let z = valid.add_decision(&mut lp);
                lp.objective[z[i].0] = 1.0;
                match solve_lp(&lp)?.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => return Err(model_err("the decision set is empty")),
                    LpStatus::Unbounded => {
                        return Err(model_err(format!("the decision set is unbounded in variable {i}")))
                    }
                }
            }
        }
        Ok(valid)
    }
}

impl ValidModel {
    pub fn model(&self) -> &DecisionModel {
        &self.model
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn scenarios(&self) -> usize {
        self.t
    }

    pub fn attributes(&self) -> usize {
        self.n
    }

    /// Adds the decision variables and the decision-set rows to `lp`.
    pub(crate) fn add_decision(&self, lp: &mut LpProblem) -> Vec<Var> {
        let md = &self.model;
        let z: Vec<Var> = (0..self.m)
            .map(|i| {
                let (lo, hi) = md.bounds.get(i).copied().unwrap_or((None, None));
                lp.add_named_var(
                    0.0,
                    lo.unwrap_or(f64::NEG_INFINITY),
                    hi.unwrap_or(f64::INFINITY),
                    format!("z{i}"),
                )
            })
            .collect();
        let row = |coefs: &[f64]| -> Vec<(Var, f64)> {
            coefs.iter().zip(&z).filter(|(c, _)| **c != 0.0).map(|(&c, &v)| (v, c)).collect()
        };
        for (r, &rhs) in md.a.iter().zip(&md.b) {
            lp.add_constraint(&row(r), Relation::Le, rhs);
        }
        for (r, &rhs) in md.aeq.iter().zip(&md.beq) {
            lp.add_constraint(&row(r), Relation::Eq, rhs);
        }
        z
    }

    /// Terms and constant of reward entry `k` (scenario-major).
    pub(crate) fn reward_terms(&self, k: usize, z: &[Var]) -> (Vec<(Var, f64)>, f64) {
        let (t, n) = (k / self.n, k % self.n);
        let g = &self.model.reward.g[t][n];
        let terms = g.iter().zip(z).filter(|(c, _)| **c != 0.0).map(|(&c, &v)| (v, c)).collect();
        (terms, self.model.reward.h[t][n])
    }

    /// The reward prospect `G(z)`.
    pub fn apply(&self, z: &[f64]) -> Result<Prospect> {
        if z.len() != self.m {
            return Err(Error::Dimension(format!("decision has {} entries, model has {}", z.len(), self.m)));
        }
        let r = &self.model.reward;
        let data = (0..self.t * self.n)
            .map(|k| {
                let (t, n) = (k / self.n, k % self.n);
                r.g[t][n].iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + r.h[t][n]
            })
            .collect();
        Prospect::new(self.t, self.n, data)
    }

    /// Whether `z` satisfies every constraint within `tol`.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        let md = &self.model;
        let dot = |r: &[f64]| r.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        z.len() == self.m
            && md.a.iter().zip(&md.b).all(|(r, &b)| dot(r) <= b + tol)
            && md.aeq.iter().zip(&md.beq).all(|(r, &b)| (dot(r) - b).abs() <= tol)
            && md.bounds.iter().zip(z).all(|(&(lo, hi), &x)| {
                lo.map_or(true, |l| x >= l - tol) && hi.map_or(true, |h| x <= h + tol)
            })
    }

    fn check(&self, inst: &ValidInstance) -> Result<()> {
        if self.t != inst.scenarios() || self.n != inst.attributes() {
            return Err(Error::Dimension(format!(
                "model rewards are {}x{} but the instance uses {}x{}",
                self.t,
                self.n,
                inst.scenarios(),
                inst.attributes()
            )));
        }
        Ok(())
    }
}

/// Optimum of the level-`j` problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSolution {
    pub z: Vec<f64>,
    pub value: f64,
    /// Whether the optimum lies strictly above the next sorted value.
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustSolution {
    pub z_star: Vec<f64>,
    pub value: f64,
    pub level_index: usize,
    pub lp_calls: usize,
}

fn level_lp(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance, law: bool) -> Result<LevelSolution> {
    d.check(inst, law)?;
    model.check(inst)?;
    if j == 0 || j > d.len() {
        return Err(Error::InvalidValue(format!("level index must be in 1..={}, got {j}", d.len())));
    }
    let c = inst.lipschitz();
    let top = d.value(j).expect("level in range");
    let mut lp = LpProblem::new(Sense::Maximize);
    // Uncapped: at a tied level (v_j = v_{j+1}) a cap at v_j would hide
    // decisions above v_{j+1} and break the monotonicity of the search.
    let v = lp.add_named_var(1.0, f64::NEG_INFINITY, f64::INFINITY, "v");
    let z = model.add_decision(&mut lp);
    if law {
        let sys = law_dual_system(&mut lp, d, j, inst, |k| model.reward_terms(k, &z));
        let mut terms: Vec<(Var, f64)> = d.entries[..j].iter().zip(&sys.p).map(|(e, &p)| (p, e.value)).collect();
        terms.push((sys.q, -c));
        terms.push((v, -1.0));
        lp.add_constraint(&terms, Relation::Ge, 0.0);
    } else {
        let gens: Vec<Prospect> = d.entries[..j]
            .iter()
            .map(|e| tilde(inst.prospect(e.prospect), e.value, c))
            .collect::<Result<_>>()?;
        let p: Vec<Var> = (0..j).map(|_| lp.add_nonneg(0.0)).collect();
        let simplex: Vec<(Var, f64)> = p.iter().map(|&x| (x, 1.0)).collect();
        lp.add_constraint(&simplex, Relation::Eq, 1.0);
        for k in 0..inst.w0().len() {
            let (mut terms, h) = model.reward_terms(k, &z);
            terms.extend(gens.iter().zip(&p).map(|(g, &pv)| (pv, -g.as_slice()[k])));
            terms.push((v, -1.0 / c));
            lp.add_constraint(&terms, Relation::Ge, -h);
        }
    }
    let r = solve_lp(&lp)?;
    match r.status {
        LpStatus::Optimal => {
            let raw = r.value(v);
            let feasible = d.value(j + 1).map_or(true, |next| raw > next + GUARD);
            Ok(LevelSolution {
                z: z.iter().map(|&x| r.value(x)).collect(),
                value: raw.min(top),
                feasible,
            })
        }
        LpStatus::Infeasible => Err(Error::Infeasible("the decision set is empty".into())),
        LpStatus::Unbounded => Err(Error::Solver("level problem reported unbounded".into())),
    }
}

/// Whether some decision attains a level in `(v_{j+1}, v_j]`; returns a
/// witness decision when it does.
pub fn feasibility(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<Option<Vec<f64>>> {
    let s = level_lp(j, model, d, inst, false)?;
    Ok(s.feasible.then_some(s.z))
}

/// Best decision and level within level `j`.
pub fn optimize_at_level(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<(Vec<f64>, f64)> {
    at_level(j, model, d, inst, false)
}

pub fn feasibility_law(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<Option<Vec<f64>>> {
    let s = level_lp(j, model, d, inst, true)?;
    Ok(s.feasible.then_some(s.z))
}

pub fn optimize_at_level_law(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<(Vec<f64>, f64)> {
    at_level(j, model, d, inst, true)
}

fn at_level(j: usize, model: &ValidModel, d: &Decomposition, inst: &ValidInstance, law: bool) -> Result<(Vec<f64>, f64)> {
    let s = level_lp(j, model, d, inst, law)?;
    if !s.feasible {
        return Err(Error::Infeasible(format!("no decision reaches level {j}")));
    }
    Ok((s.z, s.value))
}

fn binary(model: &ValidModel, d: &Decomposition, inst: &ValidInstance, law: bool) -> Result<RobustSolution> {
    let mut hi = d.len() + 1;
    let mut lo = 0;
    let mut lp_calls = 0;
    let mut cached = None;
    while hi != lo + 1 {
        let h = (hi + lo).div_ceil(2);
        lp_calls += 1;
        let s = level_lp(h, model, d, inst, law)?;
        if s.feasible {
            hi = h;
            cached = Some(s);
        } else {
            lo = h;
        }
    }
    let s = cached.expect("the last level is always feasible");
    Ok(RobustSolution {
        z_star: s.z,
        value: s.value,
        level_index: hi,
        lp_calls,
    })
}

fn linear(model: &ValidModel, d: &Decomposition, inst: &ValidInstance, law: bool) -> Result<RobustSolution> {
    for h in 1..=d.len() {
        let s = level_lp(h, model, d, inst, law)?;
        if s.feasible {
            return Ok(RobustSolution {
                z_star: s.z,
                value: s.value,
                level_index: h,
                lp_calls: h,
            });
        }
    }
    unreachable!("the last level is always feasible")
}

/// Maximizes the robust choice function of `G(z)` by binary search over levels.
pub fn solve_pro(model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<RobustSolution> {
    binary(model, d, inst, false)
}

/// Same optimum as [`solve_pro`], scanning levels one at a time.
pub fn solve_pro_levelsearch(model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<RobustSolution> {
    linear(model, d, inst, false)
}

pub fn solve_pro_law(model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<RobustSolution> {
    binary(model, d, inst, true)
}

pub fn solve_pro_law_levelsearch(model: &ValidModel, d: &Decomposition, inst: &ValidInstance) -> Result<RobustSolution> {
    linear(model, d, inst, true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkSolution {
    pub z: Vec<f64>,
    pub objective: f64,
    /// Decomposition of the instance renormalized at the benchmark.
    #[serde(skip)]
    pub decomposition: Decomposition,
}

/// Maximizes `f·z` subject to the reward being robustly at least as good as
/// the benchmark `y`. The instance is renormalized with `y` as its
/// normalizing prospect and re-sorted.
pub fn solve_benchmark_pro(model: &ValidModel, f: &[f64], y: &Prospect, inst: &Instance) -> Result<BenchmarkSolution> {
    if f.len() != model.num_vars() {
        return Err(Error::Dimension(format!(
            "objective has {} coefficients, model has {} variables",
            f.len(),
            model.num_vars()
        )));
    }
    let mut renorm = inst.clone();
    renorm.w0 = y.clone();
    let vi = renorm.validate()?;
    model.check(&vi)?;
    let d = solve_value_problem(&vi)?;
    let j = kappa(0.0, &d)?;
    let c = vi.lipschitz();
    let mut lp = LpProblem::new(Sense::Maximize);
    let z = model.add_decision(&mut lp);
    for (&zi, &fi) in z.iter().zip(f) {
        lp.objective[zi.0] = fi;
    }
    if vi.law_invariant() {
        let sys = law_dual_system(&mut lp, &d, j, &vi, |k| model.reward_terms(k, &z));
        let mut terms: Vec<(Var, f64)> = d.entries[..j].iter().zip(&sys.p).map(|(e, &p)| (p, e.value)).collect();
        terms.push((sys.q, -c));
        lp.add_constraint(&terms, Relation::Ge, 0.0);
    } else {
        let p: Vec<Var> = (0..j).map(|_| lp.add_nonneg(0.0)).collect();
        let simplex: Vec<(Var, f64)> = p.iter().map(|&x| (x, 1.0)).collect();
        lp.add_constraint(&simplex, Relation::Eq, 1.0);
        let gens: Vec<Prospect> = d.entries[..j]
            .iter()
            .map(|e| tilde(vi.prospect(e.prospect), e.value, c))
            .collect::<Result<_>>()?;
        for k in 0..vi.w0().len() {
            let (mut terms, h) = model.reward_terms(k, &z);
            terms.extend(gens.iter().zip(&p).map(|(g, &pv)| (pv, -g.as_slice()[k])));
            lp.add_constraint(&terms, Relation::Ge, -h);
        }
    }
    let r = solve_lp(&lp)?;
    match r.status {
        LpStatus::Optimal => Ok(BenchmarkSolution {
            z: z.iter().map(|&x| r.value(x)).collect(),
            objective: r.objective,
            decomposition: d,
        }),
        LpStatus::Infeasible => Err(Error::Infeasible(
            "no decision is robustly at least as good as the benchmark".into(),
        )),
        LpStatus::Unbounded => Err(Error::Solver("benchmark problem reported unbounded".into())),
    }
}
